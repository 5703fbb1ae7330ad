// observables.hpp: photon statistics, quadrature and phase fluctuations

#pragma once

#include <cmath>
#include <numbers>
#include <optional>

#include "csq/operators.hpp"

namespace csq {

struct PhotonStatistics {
    double mean_n = 0.0;
    double var_n = 0.0;
    std::optional<double> mandel_q;  // undefined when mean_n ≤ 1e-12
};

inline PhotonStatistics photon_statistics(const DensityMatrix& rho) {
    const Operator n = number_operator(rho.space());
    const double m1 = expectation(n, rho).real();
    const double m2 = expectation(n * n, rho).real();
    PhotonStatistics out;
    out.mean_n = std::max(0.0, m1);
    out.var_n = std::max(0.0, m2 - m1 * m1);
    if (out.mean_n > 1e-12) out.mandel_q = out.var_n / out.mean_n - 1.0;
    return out;
}

struct QuadratureReport {
    double theta = 0.0;
    double variance = 0.0;   // Var X_θ
    double four_var = 0.0;   // 4 Var X_θ, vacuum level 1
};

inline QuadratureReport quadrature_variance(const DensityMatrix& rho, double theta) {
    const Operator x = quadrature(rho.space(), theta);
    const double m1 = expectation(x, rho).real();
    const double m2 = expectation(x * x, rho).real();
    const double v = m2 - m1 * m1;
    return {theta, v, 4.0 * v};
}

// 4 ΔX₁ ΔX₂ with X₁ = X_{θ=0}, X₂ = X_{θ=π/2}
inline double uncertainty_product(const DensityMatrix& rho) {
    const double v1 = quadrature_variance(rho, 0.0).variance;
    const double v2 = quadrature_variance(rho, std::numbers::pi / 2).variance;
    return 4.0 * std::sqrt(std::max(0.0, v1) * std::max(0.0, v2));
}

// ΔĈ for the symmetrized Susskind–Glogower cosine
inline double phase_fluctuation(const DensityMatrix& rho) {
    const Operator c = phase_cosine(rho.space());
    const double m1 = expectation(c, rho).real();
    const double m2 = expectation(c * c, rho).real();
    return std::sqrt(std::max(0.0, m2 - m1 * m1));
}

// ⟨ψ|ρ|ψ⟩
inline double fidelity_pure(const DensityMatrix& rho, const StateVector& psi) {
    detail::require_same_space(rho.space(), psi.space(), "fidelity_pure");
    const Vector& v = psi.amplitudes();
    return v.dot(rho.matrix() * v).real();
}

// ⟨φ|ρ_field|φ⟩ for a field-only target (atom traced out).
inline double field_fidelity_pure(const DensityMatrix& rho, const Vector& field) {
    if (field.size() != static_cast<Eigen::Index>(rho.space().n_fock()))
        throw DimensionMismatch("field_fidelity_pure: field vector has wrong length");
    const Vector v = field.normalized();
    return v.dot(rho.field_reduced() * v).real();
}

// Field factor of D(α)|0⟩ on the given space.
inline Vector coherent_field(const FockSpace& s, cplx alpha) {
    const auto n = static_cast<Eigen::Index>(s.n_fock());
    return coherent_state(s, alpha).amplitudes().head(n);
}

} // namespace csq
