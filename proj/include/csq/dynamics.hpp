// dynamics.hpp: steady states, time propagation and two-time correlations

#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>

#include "csq/model.hpp"

namespace csq {

struct SteadyState {
    DensityMatrix rho;
    double residual;  // ‖L vec(ρ)‖ / ‖L‖
    double hermiticity_defect;  // before symmetrization
};

// Solves L vec(ρ) = 0 with the (0,0) row replaced by the trace functional.
// That row is redundant in L (vec(I)† L = 0), so the replaced system is
// regular exactly when the null space of L is one-dimensional.
inline SteadyState solve_steady_state(const Liouvillian& L) {
    if (!L.dissipative()) throw NoDissipation("steady_state: kappa = gamma = 0, no attracting state");
    const SparseMatrix& m = L.matrix();
    const Eigen::Index d = L.space().dim();
    const Eigen::Index n = L.dim();

    std::vector<Eigen::Triplet<cplx>> t;
    t.reserve(static_cast<std::size_t>(m.nonZeros() + d));
    for (int j = 0; j < m.outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(m, j); it; ++it)
            if (it.row() != 0) t.emplace_back(static_cast<int>(it.row()), j, it.value());
    for (Eigen::Index k = 0; k < d; ++k) t.emplace_back(0, static_cast<int>(k * (d + 1)), cplx{1.0});
    SparseMatrix a(n, n);
    a.setFromTriplets(t.begin(), t.end());
    a.makeCompressed();

    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(a);
    lu.factorize(a);
    if (lu.info() != Eigen::Success) {
        throw NonUniqueSteadyState("steady_state: trace-constrained system is singular (" + lu.lastErrorMessage() + ")");
    }

    // Inverse iteration estimates the smallest eigenvalue magnitude of the
    // constrained system; a near-zero value means a degenerate null space.
    {
        Vector y(n);
        for (Eigen::Index k = 0; k < n; ++k) y(k) = cplx(1.0 + 0.37 * std::sin(0.7 * k), std::cos(1.3 * k));
        y.normalize();
        double growth = 0.0;
        for (int it = 0; it < 4; ++it) {
            Vector z = lu.solve(y);
            growth = z.norm();
            if (!std::isfinite(growth)) break;
            y = z / growth;
        }
        const double scale = std::max(1.0, a.norm() / std::sqrt(static_cast<double>(n)));
        if (!std::isfinite(growth) || growth * scale > 1e12) {
            throw NonUniqueSteadyState("steady_state: null space of the Liouvillian is degenerate");
        }
    }

    Vector b = Vector::Zero(n);
    b(0) = 1.0;
    Vector x = lu.solve(b);
    x += lu.solve(Vector(b - a * x));  // one step of iterative refinement

    Matrix rho = Eigen::Map<Matrix>(x.data(), d, d);
    const double herm = detail::max_abs(rho - rho.adjoint());
    rho = 0.5 * (rho + rho.adjoint());
    rho /= rho.trace();
    const Vector r = m * Eigen::Map<const Vector>(rho.data(), n);
    const double lnorm = L.norm();
    return {DensityMatrix(L.space(), std::move(rho)), lnorm > 0.0 ? r.norm() / lnorm : r.norm(), herm};
}

inline DensityMatrix steady_state(const Liouvillian& L) { return solve_steady_state(L).rho; }

// ---- adaptive Dormand–Prince 5(4) integration of d vec(X)/dt = L vec(X) ----

struct IntegratorOptions {
    double rtol = 1e-8;
    double atol = 1e-12;
    double initial_step = 0.0;  // 0 → automatic
    double max_step = 0.0;      // 0 → unbounded
    std::size_t max_steps = 50'000'000;
};

struct IntegratorStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
};

namespace detail {

// Integrates from t = 0 and calls sink(index, state) at each grid time.
template <class Sink>
IntegratorStats integrate_linear(const SparseMatrix& m, Vector y, const std::vector<double>& grid,
                                 const IntegratorOptions& opt, Sink&& sink) {
    // Dormand–Prince tableau; the system is autonomous so stage times drop out
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;

    IntegratorStats stats;
    const Eigen::Index n = y.size();
    Vector k1 = m * y, k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n);

    auto error_norm = [&](const Vector& e, const Vector& y0, const Vector& y1) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double sc = opt.atol + opt.rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
            const double q = std::abs(e(i)) / sc;
            acc += q * q;
        }
        return std::sqrt(acc / static_cast<double>(n));
    };

    double h = opt.initial_step;
    if (h <= 0.0) {
        const double yn = std::max(y.norm(), 1e-300), fn = k1.norm();
        h = fn > 0.0 ? 0.01 * yn / fn : 1e-3;
    }

    double t = 0.0;
    std::size_t idx = 0;
    while (idx < grid.size() && grid[idx] <= 0.0) sink(idx++, y);
    while (idx < grid.size()) {
        const double target = grid[idx];
        while (t < target) {
            if (stats.accepted + stats.rejected > opt.max_steps) throw StepSizeUnderflow("integrator: step budget exhausted");
            if (opt.max_step > 0.0) h = std::min(h, opt.max_step);
            const double h_free = h;
            bool last = false;
            if (t + h >= target) {
                h = target - t;
                last = true;
            }
            if (h < 1e-14 * std::max(1.0, std::abs(t))) throw StepSizeUnderflow("integrator: step size underflow at t=" + std::to_string(t));

            ytmp = y + h * (a21 * k1);
            k2 = m * ytmp;
            ytmp = y + h * (a31 * k1 + a32 * k2);
            k3 = m * ytmp;
            ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
            k4 = m * ytmp;
            ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
            k5 = m * ytmp;
            ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
            k6 = m * ytmp;
            ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            k7 = m * ynew;
            err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

            const double en = error_norm(err, y, ynew);
            if (!std::isfinite(en)) throw StepSizeUnderflow("integrator: non-finite error estimate");
            if (en <= 1.0) {
                t = last ? target : t + h;
                y.swap(ynew);
                k1.swap(k7);
                ++stats.accepted;
                const double fac = en > 0.0 ? 0.9 * std::pow(en, -0.2) : 5.0;
                // a step clipped to hit the grid does not shrink the next one
                h = last ? std::max(h_free, h * std::clamp(fac, 0.2, 5.0)) : h * std::clamp(fac, 0.2, 5.0);
            } else {
                ++stats.rejected;
                h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
            }
        }
        sink(idx++, y);
    }
    return stats;
}

inline void require_grid(const std::vector<double>& grid, const char* what) {
    if (grid.empty()) throw InvalidArgument(std::string(what) + ": empty time grid");
    if (grid.front() < 0.0) throw InvalidArgument(std::string(what) + ": grid starts before t = 0");
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (!(grid[k] > grid[k - 1])) throw InvalidArgument(std::string(what) + ": grid must be strictly ascending");
}

} // namespace detail

struct Propagation {
    std::vector<double> times;
    std::vector<DensityMatrix> states;
    double max_hermiticity_defect = 0.0;  // removed by re-symmetrization
    double max_trace_drift = 0.0;
    IntegratorStats stats;
};

// ρ(t) at every grid time, starting from ρ(0) = rho0.
inline Propagation propagate(const Liouvillian& L, const DensityMatrix& rho0, const std::vector<double>& t_grid,
                             const IntegratorOptions& opt = {}) {
    detail::require_same_space(L.space(), rho0.space(), "propagate");
    detail::require_grid(t_grid, "propagate");
    const Eigen::Index d = L.space().dim();
    const cplx tr0 = rho0.trace();
    Propagation out;
    out.times = t_grid;
    out.states.reserve(t_grid.size());
    const Vector y0 = Eigen::Map<const Vector>(rho0.matrix().data(), d * d);
    out.stats = detail::integrate_linear(L.matrix(), y0, t_grid, opt, [&](std::size_t, const Vector& y) {
        Matrix rho = Eigen::Map<const Matrix>(y.data(), d, d);
        out.max_hermiticity_defect = std::max(out.max_hermiticity_defect, detail::max_abs(rho - rho.adjoint()));
        out.max_trace_drift = std::max(out.max_trace_drift, std::abs(rho.trace() - tr0));
        rho = 0.5 * (rho + rho.adjoint());
        out.states.emplace_back(L.space(), std::move(rho));
    });
    if (out.max_hermiticity_defect > 1e-10) {
        std::ostringstream msg;
        msg << "propagate: re-symmetrized Hermiticity defect " << out.max_hermiticity_defect;
        warn(msg.str());
    }
    return out;
}

// Which side of ρ_ss the earlier-time operator A multiplies.
enum class Ordering {
    later_left,  // ⟨B(τ) A(0)⟩ = tr(B e^{Lτ}[A ρ])
    later_right  // ⟨A(0) B(τ)⟩ = tr(B e^{Lτ}[ρ A])
};

struct CorrelationSeries {
    std::vector<double> tau;
    std::vector<cplx> values;
    std::string descriptor;
};

// Quantum-regression evaluation of several measured operators B_k sharing
// one seed; a single propagation serves all of them.
inline std::vector<CorrelationSeries> two_time_correlations(const Liouvillian& L, const DensityMatrix& rho_ss,
                                                            const Operator& a, const std::vector<Operator>& bs,
                                                            const std::vector<double>& tau_grid, Ordering ordering,
                                                            const IntegratorOptions& opt = {}) {
    detail::require_same_space(L.space(), rho_ss.space(), "two_time_correlation");
    detail::require_same_space(L.space(), a.space(), "two_time_correlation");
    detail::require_grid(tau_grid, "two_time_correlation");
    if (tau_grid.front() != 0.0) throw InvalidArgument("two_time_correlation: tau grid must start at 0");
    const Eigen::Index d = L.space().dim();
    const Matrix seed = ordering == Ordering::later_left ? Matrix(a.matrix() * rho_ss.matrix())
                                                         : Matrix(rho_ss.matrix() * a.matrix());
    std::vector<CorrelationSeries> out(bs.size());
    std::vector<Matrix> bt;
    for (std::size_t k = 0; k < bs.size(); ++k) {
        detail::require_same_space(L.space(), bs[k].space(), "two_time_correlation");
        bt.push_back(bs[k].matrix().transpose());
        out[k].tau = tau_grid;
        out[k].values.resize(tau_grid.size());
        out[k].descriptor = ordering == Ordering::later_left ? "<B(tau) A(0)>" : "<A(0) B(tau)>";
    }
    const Vector y0 = Eigen::Map<const Vector>(seed.data(), d * d);
    detail::integrate_linear(L.matrix(), y0, tau_grid, opt, [&](std::size_t i, const Vector& y) {
        const Eigen::Map<const Matrix> x(y.data(), d, d);
        for (std::size_t k = 0; k < bs.size(); ++k) out[k].values[i] = bt[k].cwiseProduct(x).sum();
    });
    return out;
}

inline CorrelationSeries two_time_correlation(const Liouvillian& L, const DensityMatrix& rho_ss, const Operator& a,
                                              const Operator& b, const std::vector<double>& tau_grid,
                                              Ordering ordering = Ordering::later_left,
                                              const IntegratorOptions& opt = {}) {
    return std::move(two_time_correlations(L, rho_ss, a, {b}, tau_grid, ordering, opt).front());
}

inline std::vector<double> uniform_grid(double t_max, std::size_t count) {
    if (count < 2) throw InvalidArgument("uniform_grid: need at least two points");
    std::vector<double> g(count);
    for (std::size_t k = 0; k < count; ++k) g[k] = t_max * static_cast<double>(k) / static_cast<double>(count - 1);
    return g;
}

} // namespace csq
