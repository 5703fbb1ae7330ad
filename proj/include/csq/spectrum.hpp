// spectrum.hpp: spectrum of squeezing of the cavity output field

#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "csq/dynamics.hpp"

namespace csq {

// ⟨:ΔX_θ(0)ΔX_θ(τ):⟩ with time-normal ordering:
// ¼[e^{2iθ}⟨δa†(0)δa†(τ)⟩ + e^{−2iθ}⟨δa(τ)δa(0)⟩ + ⟨δa†(0)δa(τ)⟩ + ⟨δa†(τ)δa(0)⟩],
// δa = a − ⟨a⟩_ss. Two propagations cover the four terms.
inline CorrelationSeries normally_ordered_quadrature_correlation(const Liouvillian& L, const DensityMatrix& rho_ss,
                                                                 double theta, const std::vector<double>& tau_grid,
                                                                 const IntegratorOptions& opt = {}) {
    const FockSpace& s = L.space();
    const Operator a = field_annihilation(s);
    const cplx mean_a = expectation(a, rho_ss);
    const Operator da = a - mean_a * identity(s);
    const Operator dad = da.adjoint();

    const auto right = two_time_correlations(L, rho_ss, dad, {dad, da}, tau_grid, Ordering::later_right, opt);
    const auto left = two_time_correlations(L, rho_ss, da, {da, dad}, tau_grid, Ordering::later_left, opt);
    const cplx w_plus = std::exp(2.0 * I * theta), w_minus = std::exp(-2.0 * I * theta);

    CorrelationSeries out;
    out.tau = tau_grid;
    out.values.resize(tau_grid.size());
    for (std::size_t k = 0; k < tau_grid.size(); ++k) {
        out.values[k] = 0.25 * (w_plus * right[0].values[k] + w_minus * left[0].values[k] + right[1].values[k] +
                                left[1].values[k]);
    }
    std::ostringstream d;
    d << "<:dX_theta(0) dX_theta(tau):> theta=" << theta << " time-normal ordered";
    out.descriptor = d.str();
    return out;
}

// Constant multiplying the cosine transform: 16 Γ_a, with Γ_a = κ under the
// default symbol reading and Γ_a = κ/2 under the alternative one.
struct SpectrumPrefactor {
    double value = 1.0;
    std::string description = "1";

    static SpectrumPrefactor sixteen_gamma_a(double kappa, bool gamma_a_is_kappa = true) {
        const double gamma_a = gamma_a_is_kappa ? kappa : 0.5 * kappa;
        std::ostringstream d;
        d << "16*Gamma_a, Gamma_a=" << (gamma_a_is_kappa ? "kappa" : "kappa/2") << "=" << gamma_a;
        return {16.0 * gamma_a, d.str()};
    }
};

struct SpectrumResult {
    double theta = 0.0;
    std::vector<double> omega_grid;
    std::vector<double> values;
    SpectrumPrefactor prefactor;
    double tau_max = 0.0;
    std::size_t n_tau = 0;
    double max_imag_residue = 0.0;  // discarded imaginary part of the transform
    bool tail_extended = false;
    CorrelationSeries correlation;
};

namespace detail {

// Composite Simpson weights on a uniform grid with an odd number of points.
inline std::vector<double> simpson_weights(std::size_t n, double h) {
    std::vector<double> w(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) w[k] = (k == 0 || k + 1 == n) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    for (auto& x : w) x *= h / 3.0;
    return w;
}

inline bool tail_decayed(const CorrelationSeries& c) {
    const double c0 = std::abs(c.values.front());
    double peak = 0.0;
    for (const auto& v : c.values) peak = std::max(peak, std::abs(v));
    if (peak < 1e-14) return true;  // identically vanishing series
    const std::size_t tail_from = c.values.size() - std::max<std::size_t>(1, c.values.size() / 20);
    double tail = 0.0;
    for (std::size_t k = tail_from; k < c.values.size(); ++k) tail = std::max(tail, std::abs(c.values[k]));
    return tail < 1e-6 * std::max(c0, 1e-300);
}

} // namespace detail

// S(ω, θ) = prefactor · ∫₀^∞ dτ cos(ωτ) ⟨:ΔX_θ(0)ΔX_θ(τ):⟩ by composite Simpson on
// a uniform τ grid. n_tau is rounded up to odd. If the correlation has not
// decayed by tau_max, the window is doubled once at the same step.
inline SpectrumResult squeezing_spectrum(const Liouvillian& L, const DensityMatrix& rho_ss, double theta,
                                         const std::vector<double>& omega_grid, double tau_max, std::size_t n_tau,
                                         const SpectrumPrefactor& prefactor, const IntegratorOptions& opt = {}) {
    if (!(tau_max > 0.0)) throw InvalidArgument("squeezing_spectrum: tau_max must be > 0");
    if (n_tau < 3) throw InvalidArgument("squeezing_spectrum: n_tau must be >= 3");
    if (n_tau % 2 == 0) ++n_tau;

    SpectrumResult out;
    out.theta = theta;
    out.omega_grid = omega_grid;
    out.prefactor = prefactor;

    CorrelationSeries c = normally_ordered_quadrature_correlation(L, rho_ss, theta, uniform_grid(tau_max, n_tau), opt);
    if (!detail::tail_decayed(c)) {
        tau_max *= 2.0;
        n_tau = 2 * (n_tau - 1) + 1;
        out.tail_extended = true;
        c = normally_ordered_quadrature_correlation(L, rho_ss, theta, uniform_grid(tau_max, n_tau), opt);
        if (!detail::tail_decayed(c)) {
            std::ostringstream msg;
            msg << "squeezing_spectrum: correlation not decayed by tau_max=" << tau_max;
            throw TailNotDecayed(msg.str());
        }
    }
    out.tau_max = tau_max;
    out.n_tau = n_tau;

    const double h = tau_max / static_cast<double>(n_tau - 1);
    const std::vector<double> w = detail::simpson_weights(n_tau, h);
    out.values.resize(omega_grid.size());
    for (std::size_t j = 0; j < omega_grid.size(); ++j) {
        cplx acc{};
        for (std::size_t k = 0; k < n_tau; ++k) acc += w[k] * std::cos(omega_grid[j] * c.tau[k]) * c.values[k];
        acc *= prefactor.value;
        out.values[j] = acc.real();
        out.max_imag_residue = std::max(out.max_imag_residue, std::abs(acc.imag()));
    }
    if (out.max_imag_residue > 1e-8) {
        std::ostringstream msg;
        msg << "squeezing_spectrum: discarded imaginary residue " << out.max_imag_residue;
        warn(msg.str());
    }
    out.correlation = std::move(c);
    return out;
}

inline std::vector<double> linear_grid(double lo, double hi, std::size_t count) {
    if (count < 2) return {lo};
    std::vector<double> g(count);
    for (std::size_t k = 0; k < count; ++k)
        g[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
    return g;
}

} // namespace csq
