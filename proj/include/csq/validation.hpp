// validation.hpp: the acceptance suite: ten pass/fail checks at desk scale

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "csq/frame_check.hpp"
#include "csq/runner.hpp"

namespace csq {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;
    std::string measured;
    std::string expected;
    double seconds = 0.0;
    double limit_seconds = 0.0;  // 0: no runtime bound
};

struct ValidationOptions {
    LiouvillianFactory factory = default_factory();
    SymbolConvention convention;
    unsigned sweep_threads = 2;
    std::vector<int> only;  // empty: all ten
    std::filesystem::path scratch_dir;  // empty: system temp directory
    std::function<void(const CriterionResult&)> on_result;
};

struct ValidationReport {
    std::vector<CriterionResult> results;
    bool all_passed() const {
        return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
    }
};

inline std::string format_result_line(const CriterionResult& r) {
    std::ostringstream o;
    o << (r.passed ? "[PASS] " : "[FAIL] ") << std::setw(2) << r.id << "  " << r.title << " | measured: " << r.measured
      << " | expected: " << r.expected << " | " << std::fixed << std::setprecision(1) << r.seconds << " s";
    if (r.limit_seconds > 0.0) o << " (limit " << r.limit_seconds << " s)";
    return o.str();
}

// Records invariant violations of everything constructed while installed.
// Liouvillians small enough for a dense eigensolve get their spectral
// abscissa checked directly; larger ones are rebuilt at a reduced truncation
// through the factory that produced them.
class InvariantLedger : public ConstructionAuditor {
public:
    static constexpr double herm_tol = 1e-10;
    static constexpr double trace_tol = 1e-10;
    static constexpr double pos_tol = 1e-8;
    static constexpr double annihilation_tol = 1e-10;
    static constexpr double abscissa_tol = 1e-9;
    static constexpr Eigen::Index dense_limit = 1600;  // n_fock ≤ 20
    static constexpr std::size_t reduced_n_fock = 12;

    void on_state(const DensityMatrix& rho) override {
        const StateCheck c = rho.check();
        std::lock_guard lock(mutex_);
        ++states_;
        worst_herm_ = std::max(worst_herm_, c.hermiticity_defect);
        worst_trace_ = std::max(worst_trace_, c.trace_error);
        worst_min_eig_ = std::min(worst_min_eig_, c.min_eigenvalue);
        if (!c.ok(herm_tol, trace_tol, pos_tol)) ++bad_states_;
    }

    void on_liouvillian(const Liouvillian& L) override {
        if (in_reduced_check_) return;
        const double defect = L.trace_annihilation_defect();
        const bool small = L.dim() <= dense_limit;
        std::optional<double> abscissa;
        if (small && L.dissipative()) abscissa = L.spectral_abscissa();
        std::lock_guard lock(mutex_);
        ++liouvillians_;
        worst_defect_ = std::max(worst_defect_, defect);
        if (abscissa) {
            ++abscissa_direct_;
            worst_abscissa_ = std::max(worst_abscissa_, *abscissa);
        } else if (!small) {
            ++large_liouvillians_;
        }
    }

    // Wraps a factory so that large Liouvillians it builds can be re-checked.
    LiouvillianFactory recording(LiouvillianFactory inner) {
        return [this, inner](const SystemParams& p, Frame f) {
            Liouvillian L = inner(p, f);
            if (L.dim() > dense_limit) {
                std::lock_guard lock(mutex_);
                ++large_recorded_;
                pending_.emplace(std::tuple(p.g, p.omega, p.kappa, p.gamma, static_cast<int>(f)), Pending{p, f, inner});
            }
            return L;
        };
    }

    // Dense spectral abscissa of each recorded large Liouvillian at the reduced truncation.
    void run_reduced_checks() {
        std::map<Key, Pending> todo;
        {
            std::lock_guard lock(mutex_);
            todo.swap(pending_);
        }
        for (auto& [key, job] : todo) {
            in_reduced_check_ = true;
            const Liouvillian L = job.factory(job.params.with_n_fock(reduced_n_fock), job.frame);
            in_reduced_check_ = false;
            const double defect = L.trace_annihilation_defect();
            const double abscissa = L.dissipative() ? L.spectral_abscissa() : 0.0;
            std::lock_guard lock(mutex_);
            ++abscissa_reduced_;
            worst_defect_ = std::max(worst_defect_, defect);
            worst_abscissa_ = std::max(worst_abscissa_, abscissa);
        }
    }

    bool passed() const {
        std::lock_guard lock(mutex_);
        return states_ > 0 && liouvillians_ > 0 && bad_states_ == 0 && worst_defect_ < annihilation_tol &&
               worst_abscissa_ <= abscissa_tol && large_liouvillians_ <= large_recorded_ && pending_.empty();
    }

    std::string summary() const {
        std::lock_guard lock(mutex_);
        std::ostringstream o;
        o << std::scientific << std::setprecision(2) << states_ << " states (" << bad_states_
          << " bad; max herm " << worst_herm_ << ", max |tr-1| " << worst_trace_ << ", min eig " << worst_min_eig_
          << "); " << liouvillians_ << " Liouvillians (max trace defect " << worst_defect_ << ", max abscissa "
          << worst_abscissa_ << " over " << abscissa_direct_ << " direct + " << abscissa_reduced_ << " at n_fock="
          << reduced_n_fock << "; " << large_liouvillians_ << " large, " << large_recorded_ << " via factory)";
        return o.str();
    }

    std::size_t states() const {
        std::lock_guard lock(mutex_);
        return states_;
    }

private:
    using Key = std::tuple<double, double, double, double, int>;
    struct Pending {
        SystemParams params;
        Frame frame;
        LiouvillianFactory factory;
    };

    mutable std::mutex mutex_;
    std::map<Key, Pending> pending_;
    static inline thread_local bool in_reduced_check_ = false;
    std::size_t states_ = 0, bad_states_ = 0;
    std::size_t liouvillians_ = 0, large_liouvillians_ = 0, large_recorded_ = 0;
    std::size_t abscissa_direct_ = 0, abscissa_reduced_ = 0;
    double worst_herm_ = 0.0, worst_trace_ = 0.0, worst_min_eig_ = 0.0;
    double worst_defect_ = 0.0, worst_abscissa_ = -std::numeric_limits<double>::infinity();
};

namespace detail {

inline std::string fmt(double x, int prec = 4) {
    std::ostringstream o;
    o << std::setprecision(prec) << x;
    return o.str();
}

// Golden-section minimization of a unimodal f on [lo, hi].
template <class F>
std::pair<double, double> golden_minimize(F&& f, double lo, double hi, double tol) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    return fc < fd ? std::pair{c, fc} : std::pair{d, fd};
}

// Vertex of the parabola through three equally spaced samples.
inline double parabolic_vertex(double x0, double h, double fm, double f0, double fp) {
    const double den = fm - 2.0 * f0 + fp;
    if (den == 0.0) return x0;
    return x0 + 0.5 * h * (fm - fp) / den;
}

} // namespace detail

class Validator {
public:
    explicit Validator(ValidationOptions opt) : opt_(std::move(opt)) {
        factory_ = ledger_.recording(opt_.factory);
        trunc_.cap = 200;
        trunc_.tol = 1e-6;
    }

    ValidationReport run() {
        ScopedAuditor audit(ledger_);
        ValidationReport rep;
        for (int id = 1; id <= 10; ++id) {
            if (!opt_.only.empty() && std::find(opt_.only.begin(), opt_.only.end(), id) == opt_.only.end()) continue;
            CriterionResult r = timed(id);
            if (opt_.on_result) opt_.on_result(r);
            rep.results.push_back(std::move(r));
        }
        return rep;
    }

private:
    using Clock = std::chrono::steady_clock;

    CriterionResult timed(int id) {
        const auto t0 = Clock::now();
        CriterionResult r;
        try {
            r = dispatch(id);
        } catch (const std::exception& e) {
            r.passed = false;
            r.measured = std::string("exception: ") + e.what();
        }
        r.id = id;
        r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        if (r.limit_seconds > 0.0 && r.seconds > r.limit_seconds) {
            r.passed = false;
            r.measured += " [runtime exceeded]";
        }
        return r;
    }

    CriterionResult dispatch(int id) {
        switch (id) {
            case 1: return coherent_limit();
            case 2: return squeezing_below_vacuum();
            case 3: return minimum_uncertainty();
            case 4: return analytic_cross_check();
            case 5: return spectrum_peaks();
            case 6: return monotonicity();
            case 7: return vacuum_phase_limit();
            case 8: return solver_cross_validation();
            case 9: return structural_invariants();
            case 10: return determinism();
        }
        throw InvalidArgument("unknown criterion id");
    }

    SystemParams point(double omega, double kappa, double gamma) const {
        SystemParams p;
        p.g = 1.0;
        p.omega = omega;
        p.kappa = kappa;
        p.gamma = gamma;
        return p;
    }

    TruncationChoice converged(const SystemParams& p) { return choose_truncation(p, trunc_, factory_); }

    CriterionResult coherent_limit() {
        CriterionResult r{1, "coherent limit (kappa -> 0)", false, "", "", 0.0, 30.0};
        const SystemParams p = point(2.0, 1e-4, 0.02);
        const TruncationChoice tc = converged(p);
        const double f = field_fidelity_pure(tc.steady.rho, coherent_field(p.with_n_fock(tc.n_fock).space(), p.alpha()));
        const double q = tc.observables.mandel_q;
        r.passed = f > 0.999 && std::abs(q) < 0.02;
        r.measured = "fidelity to |alpha=2> " + detail::fmt(f, 8) + ", Q " + detail::fmt(q) +
                     ", n_fock " + std::to_string(tc.n_fock);
        r.expected = "fidelity > 0.999, |Q| < 0.02";
        return r;
    }

    struct CutPoint {
        double kappa;
        CellObservables obs;
    };

    // κ cut at Ω/g = 2, γ from Γ_b/g = 0.02, 2κ/g = 0.05 … 1.5.
    const std::vector<CutPoint>& cut() {
        if (cut_) return *cut_;
        std::vector<CutPoint> pts;
        const double gamma = opt_.convention.gamma_from_gamma_b(0.02);
        for (double two_k : linear_grid(0.05, 1.5, 30)) {
            const SystemParams p = point(2.0, 0.5 * two_k, gamma);
            pts.push_back({p.kappa, converged(p).observables});
        }
        cut_ = std::move(pts);
        return *cut_;
    }

    CriterionResult squeezing_below_vacuum() {
        CriterionResult r{2, "squeezing below vacuum along the Omega/g=2 cut", false, "", "", 0.0, 600.0};
        const auto& pts = cut();
        std::size_t i = 0;
        for (std::size_t k = 1; k < pts.size(); ++k)
            if (pts[k].obs.four_var_x1 < pts[i].obs.four_var_x1) i = k;
        const double gamma = opt_.convention.gamma_from_gamma_b(0.02);
        const double lo = pts[i == 0 ? 0 : i - 1].kappa, hi = pts[std::min(i + 1, pts.size() - 1)].kappa;
        auto f = [&](double kappa) { return converged(point(2.0, kappa, gamma)).observables.four_var_x1; };
        const auto [k_star, v_star] = detail::golden_minimize(f, lo, hi, 1e-4);
        const CellObservables at = converged(point(2.0, k_star, gamma)).observables;
        const double ratio = 2.0 * 2.0 * k_star;
        r.passed = v_star < 1.0 && at.four_var_x1 < at.four_var_x2 && ratio >= 0.6 && ratio <= 1.3;
        r.measured = "min 4dX1^2 " + detail::fmt(v_star, 6) + " (4dX2^2 " + detail::fmt(at.four_var_x2, 6) +
                     ") at 2kappa/g " + detail::fmt(2.0 * k_star) + ", 2*Omega*kappa/g^2 " + detail::fmt(ratio);
        r.expected = "min < 1 and < 4dX2^2, 2*Omega*kappa/g^2 in [0.6, 1.3]";
        return r;
    }

    CriterionResult minimum_uncertainty() {
        CriterionResult r{3, "minimum uncertainty at weak atomic damping", false, "", "", 0.0, 60.0};
        const TruncationChoice tc = converged(point(2.0, 0.1, 0.002));
        const double u = tc.observables.uncertainty_product;
        r.passed = std::abs(u - 1.0) < 0.02;
        r.measured = "4 dX1 dX2 = " + detail::fmt(u, 6);
        r.expected = "1 within 2%";
        return r;
    }

    CriterionResult analytic_cross_check() {
        CriterionResult r{4, "analytic squeeze parameter cross-check", false, "", "", 0.0, 60.0};
        const SystemParams p = point(2.0, 0.1, 0.002);
        const TruncationChoice tc = converged(p);
        const double e2r = squeeze_parameter(p).e2r;
        const double v = tc.observables.four_var_x1;
        const double q = tc.observables.mandel_q;
        r.passed = std::abs(v / e2r - 1.0) < 0.05 && q < 0.0;
        r.measured = "4dX1^2 " + detail::fmt(v, 6) + " vs e^{2r} " + detail::fmt(e2r, 6) + " (rel " +
                     detail::fmt(v / e2r - 1.0, 3) + "), Q " + detail::fmt(q);
        r.expected = "rel. deviation < 5%, Q < 0";
        return r;
    }

    CriterionResult spectrum_peaks() {
        CriterionResult r{5, "squeezing-spectrum extrema location", false, "", "", 0.0, 900.0};
        RunConfig cfg;
        cfg.task = Task::spectrum;
        cfg.convention = opt_.convention;
        cfg.params = point(0.53, opt_.convention.kappa_from_gamma_a(0.665), opt_.convention.gamma_from_gamma_b(0.01));
        cfg.truncation = trunc_;
        cfg.spectrum.thetas = {0.0, std::numbers::pi / 2};
        cfg.spectrum.omega_min = 0.0;
        cfg.spectrum.omega_max = 2.0;
        cfg.spectrum.omega_count = 401;
        cfg.spectrum.tau_max = 200.0;
        cfg.spectrum.n_tau = 4001;
        const SpectrumRun run = run_spectrum(cfg, factory_);
        auto locate = [](const SpectrumResult& s, bool minimum) {
            const auto& v = s.values;
            std::size_t k = 1;
            for (std::size_t j = 1; j + 1 < v.size(); ++j)
                if (minimum ? v[j] < v[k] : v[j] > v[k]) k = j;
            const double h = s.omega_grid[1] - s.omega_grid[0];
            return std::pair{detail::parabolic_vertex(s.omega_grid[k], h, v[k - 1], v[k], v[k + 1]), v[k]};
        };
        const auto [w0, s0] = locate(run.spectra[0], true);
        const auto [w1, s1] = locate(run.spectra[1], false);
        const double target = 0.597;
        const double oracle = spectral_peaks(cfg.params).plus;
        r.passed = std::abs(w0 - target) <= 0.05;
        r.measured = "theta=0 minimum at |omega|/g " + detail::fmt(w0) + " (S " + detail::fmt(s0) +
                     "); theta=pi/2 maximum at " + detail::fmt(w1) + "; n_fock " + std::to_string(run.n_fock);
        r.expected = detail::fmt(target) + " +- 0.05 (peak formula gives " + detail::fmt(oracle) + ")";
        return r;
    }

    CriterionResult monotonicity() {
        CriterionResult r{6, "monotone <n> and phase fluctuation along the cut", false, "", "", 0.0, 600.0};
        const auto& pts = cut();
        std::size_t n_viol = 0, c_viol = 0;
        for (std::size_t k = 1; k < pts.size(); ++k) {
            if (pts[k].obs.mean_n > pts[k - 1].obs.mean_n) ++n_viol;
            if (pts[k].obs.phase_fluct < pts[k - 1].obs.phase_fluct) ++c_viol;
        }
        r.passed = pts.size() >= 12 && n_viol == 0 && c_viol == 0;
        r.measured = std::to_string(pts.size()) + " points; <n> " + detail::fmt(pts.front().obs.mean_n) + " -> " +
                     detail::fmt(pts.back().obs.mean_n) + " (" + std::to_string(n_viol) + " rises); dC " +
                     detail::fmt(pts.front().obs.phase_fluct) + " -> " + detail::fmt(pts.back().obs.phase_fluct) +
                     " (" + std::to_string(c_viol) + " drops)";
        r.expected = ">= 12 points, <n> nonincreasing, dC nondecreasing";
        return r;
    }

    CriterionResult vacuum_phase_limit() {
        CriterionResult r{7, "vacuum phase limit at kappa/g = 20", false, "", "", 0.0, 0.0};
        const TruncationChoice tc = converged(point(2.0, 20.0, 0.02));
        const double dc = tc.observables.phase_fluct;
        const double n = tc.observables.mean_n;
        r.passed = std::abs(dc - 0.5) < 0.02 && n < 0.05;
        r.measured = "dC " + detail::fmt(dc, 6) + ", <n> " + detail::fmt(n, 4);
        r.expected = "|dC - 0.5| < 0.02, <n> < 0.05";
        return r;
    }

    CriterionResult solver_cross_validation() {
        CriterionResult r{8, "steady-state solver vs long-time propagation", false, "", "", 0.0, 0.0};
        const SystemParams p = point(2.0, 0.25, 0.02).with_n_fock(20);
        const FockSpace s = p.space();
        const Liouvillian L = factory_(p, Frame::interaction);
        const DensityMatrix ss = steady_state(L);
        const Propagation pr =
            propagate(L, DensityMatrix::pure(basis_state(s, AtomLevel::ground, 0)), uniform_grid(400.0, 5));
        const double dist = trace_distance(pr.states.back(), ss);

        const Operator a = field_annihilation(s), ad = a.adjoint();
        const Operator sm = atom_lowering(s), sp = sm.adjoint();
        const std::vector<double> tau{0.0, 0.5};
        double worst = 0.0;
        auto check = [&](const Operator& A, const Operator& B, Ordering ord) {
            const cplx c0 = two_time_correlation(L, ss, A, B, tau, ord).values[0];
            const cplx stat = ord == Ordering::later_left ? expectation(B * A, ss) : expectation(A * B, ss);
            worst = std::max(worst, std::abs(c0 - stat));
        };
        check(ad, a, Ordering::later_right);
        check(a, ad, Ordering::later_left);
        check(a, a, Ordering::later_left);
        check(sp, sm, Ordering::later_right);
        for (double th : {0.0, std::numbers::pi / 2}) {
            const cplx c0 = normally_ordered_quadrature_correlation(L, ss, th, tau).values[0];
            const double stat = quadrature_variance(ss, th).variance - 0.25;
            worst = std::max(worst, std::abs(c0 - stat));
        }
        r.passed = dist < 1e-6 && worst < 1e-8;
        r.measured = "trace distance at t=400 " + detail::fmt(dist, 3) + ", max |C(0) - static| " + detail::fmt(worst, 3);
        r.expected = "distance < 1e-6, tau=0 deviation < 1e-8";
        return r;
    }

    CriterionResult structural_invariants() {
        CriterionResult r{9, "structural invariants of all produced objects", false, "", "", 0.0, 0.0};
        // a workload of its own so the check is meaningful when run alone
        const SystemParams p = point(0.5, 0.3, 0.02).with_n_fock(14);
        const Liouvillian L = factory_(p, Frame::interaction);
        const DensityMatrix ss = steady_state(L);
        propagate(L, DensityMatrix::pure(coherent_state(p.space(), 0.5)), uniform_grid(5.0, 6));
        frame_consistency_check(p);
        ledger_.run_reduced_checks();
        r.passed = ledger_.passed();
        r.measured = ledger_.summary();
        r.expected = "herm < 1e-10, |tr-1| < 1e-10, min eig >= -1e-8, trace defect < 1e-10, abscissa <= 1e-9";
        return r;
    }

    CriterionResult determinism() {
        CriterionResult r{10, "byte-identical sweep output", false, "", "", 0.0, 0.0};
        namespace fs = std::filesystem;
        const fs::path dir = (opt_.scratch_dir.empty() ? fs::temp_directory_path() : opt_.scratch_dir) /
                             ("csq_determinism_" + std::to_string(Clock::now().time_since_epoch().count()));
        fs::create_directories(dir);
        std::string text =
            "task = sweep\n"
            "params.gamma_b = 0.01\n"
            "sweep.axis1.name = omega_over_g\nsweep.axis1.min = 0.5\nsweep.axis1.max = 1.5\nsweep.axis1.count = 3\n"
            "sweep.axis2.name = two_gamma_a_over_g\nsweep.axis2.min = 0.2\nsweep.axis2.max = 0.6\n"
            "sweep.axis2.count = 2\n"
            "threads = " + std::to_string(opt_.sweep_threads) + "\n";
        text += std::string("convention.gamma_a_is_kappa = ") + (opt_.convention.gamma_a_is_kappa ? "true" : "false") + "\n";
        text += std::string("convention.gamma_b_is_half_gamma = ") +
                (opt_.convention.gamma_b_is_half_gamma ? "true" : "false") + "\n";
        auto slurp = [](const fs::path& f) {
            std::ifstream in(f, std::ios::binary);
            return std::string(std::istreambuf_iterator<char>(in), {});
        };
        std::string out[2];
        for (int k = 0; k < 2; ++k) {
            RunConfig cfg = parse_config_string(text);
            cfg.output_path = (dir / ("run" + std::to_string(k) + ".csv")).string();
            run_sweep(cfg, factory_);
            out[k] = slurp(cfg.output_path);
        }
        std::error_code ec;
        fs::remove_all(dir, ec);
        const std::size_t rows = static_cast<std::size_t>(std::count(out[0].begin(), out[0].end(), '\n'));
        r.passed = !out[0].empty() && out[0] == out[1] && rows == 7;
        r.measured = std::to_string(rows) + " lines, " + std::to_string(out[0].size()) + " bytes, " +
                     (out[0] == out[1] ? "identical" : "different");
        r.expected = "two runs byte-identical (header + 6 rows)";
        return r;
    }

    ValidationOptions opt_;
    InvariantLedger ledger_;
    LiouvillianFactory factory_;
    TruncationSpec trunc_;
    std::optional<std::vector<CutPoint>> cut_;
};

inline ValidationReport run_validation(ValidationOptions opt = {}) { return Validator(std::move(opt)).run(); }

} // namespace csq
