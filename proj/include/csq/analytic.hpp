// analytic.hpp: closed-form squeezing parameter, eigenvalues and ground state of the
// displaced-frame Hamiltonian, used as independent checks on the numerics

#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "csq/model.hpp"

namespace csq {

struct SqueezeSolution {
    double r = 0.0;    // ≤ 0; −∞ on the domain edge; NaN outside the domain
    double e2r = 1.0;  // e^{2r} ∈ [0, 1]
    bool in_domain = true;  // 2Ωκ/g² ≤ 1
    bool r_infinite() const { return in_domain && e2r == 0.0; }
};

// e^{2r} = sqrt(1 − (2Ωκ/g²)²)
inline SqueezeSolution squeeze_parameter(const SystemParams& p) {
    p.validate();
    const double x = p.drive_ratio();
    if (x > 1.0) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        return {nan, nan, false};
    }
    const double e2r = std::sqrt(std::max(0.0, 1.0 - x * x));
    const double r = e2r > 0.0 ? 0.5 * std::log(e2r) : -std::numeric_limits<double>::infinity();
    return {r, e2r, true};
}

// κ* = g²/(2Ω), the optimal-damping locus 2Ωκ/g² = 1
inline double optimal_kappa(double omega, double g) {
    if (!(omega > 0.0)) throw InvalidArgument("optimal_kappa: omega must be > 0");
    if (!(g > 0.0)) throw InvalidArgument("optimal_kappa: g must be > 0");
    return g * g / (2.0 * omega);
}

struct EnergyPair {
    double plus;
    double minus;
};

// E_n^± = ±√n g [1 − (2Ωκ/g²)²]^{3/4}
inline EnergyPair eigenenergies(const SystemParams& p, unsigned n) {
    p.validate();
    const double x = p.drive_ratio();
    if (x > 1.0) throw OutOfDomain("eigenenergies: 2*omega*kappa/g^2 = " + std::to_string(x) + " exceeds 1");
    const double e = std::sqrt(static_cast<double>(n)) * p.g * std::pow(std::max(0.0, 1.0 - x * x), 0.75);
    return {e, -e};
}

// Offsets ω − ω₀ of best squeezing in the output spectrum; the n = 1 doublet.
inline EnergyPair spectral_peaks(const SystemParams& p) { return eigenenergies(p, 1); }

// Atomic amplitudes (ground, excited) of the dressed state paired with the
// squeezed vacuum: (ε⁺|−⟩ + ε⁻|+⟩)/√2, ε± = (1 ± e^{2r})^{1/2}. With the
// Hamiltonian convention of model.hpp the relative sign is +; the two
// amplitudes are real and non-negative.
inline Eigen::Vector2cd dressed_atom_amplitudes(const SqueezeSolution& sq) {
    const double ep = std::sqrt(1.0 + sq.e2r);
    const double em = std::sqrt(std::max(0.0, 1.0 - sq.e2r));
    return Eigen::Vector2cd(ep / std::sqrt(2.0), em / std::sqrt(2.0));
}

// S(r)|0⟩ ⊗ |A⁻⟩, or D(α)S(r)|0⟩ ⊗ |A⁻⟩ with α = Ω/g when displaced_back.
inline StateVector ground_state(const SystemParams& p, bool displaced_back) {
    const SqueezeSolution sq = squeeze_parameter(p);
    if (!sq.in_domain || sq.r_infinite())
        throw OutOfDomain("ground_state: requires 2*omega*kappa/g^2 < 1, got " + std::to_string(p.drive_ratio()));
    const FockSpace s = p.space();
    const auto n = static_cast<Eigen::Index>(s.n_fock());
    Vector field = Vector::Zero(n);
    field(0) = 1.0;
    if (sq.r != 0.0) field = squeeze(s, sq.r).matrix().topLeftCorner(n, n) * field;
    if (displaced_back && p.alpha() != 0.0) field = displacement(s, p.alpha()).matrix().topLeftCorner(n, n) * field;
    return product_state(s, dressed_atom_amplitudes(sq), field);
}

} // namespace csq
