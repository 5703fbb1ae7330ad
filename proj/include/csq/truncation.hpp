// truncation.hpp: per-run Fock truncation by convergence of steady-state observables

#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <vector>

#include "csq/analytic.hpp"
#include "csq/config.hpp"
#include "csq/dynamics.hpp"
#include "csq/observables.hpp"

namespace csq {

using LiouvillianFactory = std::function<Liouvillian(const SystemParams&, Frame)>;

inline LiouvillianFactory default_factory() {
    return [](const SystemParams& p, Frame f) { return liouvillian(p, f); };
}

// Every figure of merit reported for one steady state. NaN marks a value
// that is undefined at this point: Q of the vacuum, or the analytic
// fidelity outside 2Ωκ/g² < 1 and wherever |r| is too large for S(r).
struct CellObservables {
    double mean_n = 0.0;
    double var_n = 0.0;
    double mandel_q = 0.0;
    double four_var_x1 = 0.0;
    double four_var_x2 = 0.0;
    double uncertainty_product = 0.0;
    double phase_fluct = 0.0;
    double fidelity_to_analytic_gs = 0.0;
};

inline constexpr double max_resolvable_squeeze = 3.0;

inline CellObservables measure(const SystemParams& p, const DensityMatrix& rho) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CellObservables o;
    const PhotonStatistics ps = photon_statistics(rho);
    o.mean_n = ps.mean_n;
    o.var_n = ps.var_n;
    o.mandel_q = ps.mandel_q.value_or(nan);
    o.four_var_x1 = quadrature_variance(rho, 0.0).four_var;
    o.four_var_x2 = quadrature_variance(rho, std::numbers::pi / 2).four_var;
    o.uncertainty_product = uncertainty_product(rho);
    o.phase_fluct = phase_fluctuation(rho);
    const SqueezeSolution sq = squeeze_parameter(p);
    o.fidelity_to_analytic_gs =
        sq.in_domain && std::abs(sq.r) <= max_resolvable_squeeze ? fidelity_pure(rho, ground_state(p, true)) : nan;
    return o;
}

struct TruncationChoice {
    std::size_t n_fock;
    SteadyState steady;
    CellObservables observables;
    std::vector<std::size_t> tried;  // every truncation solved, in order
};

inline std::size_t initial_truncation(const SystemParams& p) {
    const double a = p.alpha();
    return static_cast<std::size_t>(std::ceil(a * a + 6.0 * a + 10.0 - 1e-12));
}

namespace detail {

inline bool agrees(double a, double b, double tol) {
    if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
    return std::abs(a - b) < tol * std::max(1.0, std::abs(a));
}

} // namespace detail

// N_k = ceil(α² + 6α) + 10·2^k. Returns the first N_k whose ⟨n⟩, Q and
// 4ΔX₁² agree with N_{k+1} to tol (relative for values above one).
inline TruncationChoice choose_truncation(const SystemParams& params, const TruncationSpec& limits = {},
                                          const LiouvillianFactory& factory = default_factory()) {
    params.validate();
    const double a = params.alpha();
    const auto base = static_cast<std::size_t>(std::ceil(a * a + 6.0 * a - 1e-12));
    auto n_at = [&](int k) { return base + (std::size_t{10} << k); };

    auto solve = [&](std::size_t n) {
        const SystemParams p = params.with_n_fock(n);
        SteadyState ss = solve_steady_state(factory(p, Frame::interaction));
        const CellObservables obs = measure(p, ss.rho);
        return std::pair{std::move(ss), obs};
    };

    std::vector<std::size_t> tried;
    int k = 0;
    std::size_t n = n_at(k);
    if (n > limits.cap) {
        std::ostringstream msg;
        msg << "choose_truncation: initial n_fock " << n << " exceeds cap " << limits.cap;
        throw TruncationDiverged(msg.str());
    }
    auto current = solve(n);
    tried.push_back(n);
    for (;;) {
        const std::size_t next_n = n_at(k + 1);
        if (next_n > limits.cap) {
            std::ostringstream msg;
            msg << "choose_truncation: not converged at n_fock " << n << " before cap " << limits.cap;
            throw TruncationDiverged(msg.str());
        }
        auto next = solve(next_n);
        tried.push_back(next_n);
        const auto& o0 = current.second;
        const auto& o1 = next.second;
        if (detail::agrees(o0.mean_n, o1.mean_n, limits.tol) && detail::agrees(o0.mandel_q, o1.mandel_q, limits.tol) &&
            detail::agrees(o0.four_var_x1, o1.four_var_x1, limits.tol)) {
            return TruncationChoice{n, std::move(current.first), current.second, std::move(tried)};
        }
        current = std::move(next);
        n = next_n;
        ++k;
    }
}

} // namespace csq
