// runner.hpp: steady / sweep / spectrum / timeevo tasks and their data files

#pragma once

#include <atomic>
#include <exception>
#include <limits>
#include <mutex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "csq/spectrum.hpp"
#include "csq/truncation.hpp"

namespace csq {

// ---- number formatting ---------------------------------------------------

// 17 significant digits, scientific, "nan" for undefined values.
inline std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

namespace detail {

inline nlohmann::json json_number(double x) {
    if (!std::isfinite(x)) return nullptr;
    return x;
}

// Writes through a temporary file; the target only appears once complete.
template <class Body>
void write_file_atomically(const std::filesystem::path& path, Body&& body) {
    const std::filesystem::path tmp = path.string() + ".partial";
    try {
        {
            std::ofstream out(tmp, std::ios::binary);
            if (!out) throw Error("cannot write '" + tmp.string() + "'");
            body(out);
            out.flush();
            if (!out) throw Error("write failed for '" + tmp.string() + "'");
        }
        std::filesystem::rename(tmp, path);
    } catch (...) {
        std::error_code ec;
        std::filesystem::remove(tmp, ec);
        throw;
    }
}

inline std::string sanitize_status(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ';';
    return s;
}

} // namespace detail

// ---- single steady-state cell ---------------------------------------------

struct CellRecord {
    SystemParams params;
    std::string status = "ok";
    std::size_t n_fock_used = 0;
    double residual = std::numeric_limits<double>::quiet_NaN();
    CellObservables obs;
};

inline const std::vector<std::string>& cell_columns() {
    static const std::vector<std::string> cols{"g", "omega", "kappa", "gamma", "status", "n_fock_used", "residual",
                                               "mean_n", "var_n", "mandel_q", "four_var_x1", "four_var_x2",
                                               "uncertainty_product", "phase_fluct", "fidelity_to_analytic_gs"};
    return cols;
}

inline std::string format_cell(const CellRecord& c) {
    std::ostringstream o;
    const auto& b = c.obs;
    o << format_number(c.params.g) << ',' << format_number(c.params.omega) << ',' << format_number(c.params.kappa)
      << ',' << format_number(c.params.gamma) << ',' << c.status << ',' << c.n_fock_used << ','
      << format_number(c.residual) << ',' << format_number(b.mean_n) << ',' << format_number(b.var_n) << ','
      << format_number(b.mandel_q) << ',' << format_number(b.four_var_x1) << ',' << format_number(b.four_var_x2)
      << ',' << format_number(b.uncertainty_product) << ',' << format_number(b.phase_fluct) << ','
      << format_number(b.fidelity_to_analytic_gs);
    return o.str();
}

inline nlohmann::json cell_json(const CellRecord& c) {
    using detail::json_number;
    const auto& b = c.obs;
    return {{"g", c.params.g},
            {"omega", c.params.omega},
            {"kappa", c.params.kappa},
            {"gamma", c.params.gamma},
            {"status", c.status},
            {"n_fock_used", c.n_fock_used},
            {"residual", json_number(c.residual)},
            {"mean_n", json_number(b.mean_n)},
            {"var_n", json_number(b.var_n)},
            {"mandel_q", json_number(b.mandel_q)},
            {"four_var_x1", json_number(b.four_var_x1)},
            {"four_var_x2", json_number(b.four_var_x2)},
            {"uncertainty_product", json_number(b.uncertainty_product)},
            {"phase_fluct", json_number(b.phase_fluct)},
            {"fidelity_to_analytic_gs", json_number(b.fidelity_to_analytic_gs)}};
}

// Solves one parameter point. Numerical failures are recorded in the
// status field instead of propagating.
inline CellRecord evaluate_cell(const SystemParams& p, bool auto_n_fock, const TruncationSpec& trunc,
                                const LiouvillianFactory& factory = default_factory()) {
    CellRecord rec;
    rec.params = p;
    try {
        if (auto_n_fock) {
            TruncationChoice tc = choose_truncation(p, trunc, factory);
            rec.params.n_fock = tc.n_fock;
            rec.n_fock_used = tc.n_fock;
            rec.residual = tc.steady.residual;
            rec.obs = tc.observables;
        } else {
            const SteadyState ss = solve_steady_state(factory(p, Frame::interaction));
            rec.n_fock_used = p.n_fock;
            rec.residual = ss.residual;
            rec.obs = measure(p, ss.rho);
        }
    } catch (const TruncationDiverged& e) {
        rec.status = detail::sanitize_status(std::string("TruncationDiverged: ") + e.what());
    } catch (const NonUniqueSteadyState& e) {
        rec.status = detail::sanitize_status(std::string("NonUniqueSteadyState: ") + e.what());
    } catch (const NoDissipation& e) {
        rec.status = detail::sanitize_status(std::string("NoDissipation: ") + e.what());
    } catch (const Error& e) {
        rec.status = detail::sanitize_status(std::string("Error: ") + e.what());
    }
    return rec;
}

// ---- sweeps ---------------------------------------------------------------

struct SweepCell {
    std::size_t i1 = 0, i2 = 0;
    double v1 = 0.0;
    double v2 = std::numeric_limits<double>::quiet_NaN();
    CellRecord record;
};

struct SweepGrid {
    SweepSpec axes;
    SymbolConvention convention;
    std::vector<SweepCell> cells;  // axis1 index slow, axis2 index fast
};

// Runs fn(i) for i in [0, n) on a small worker pool.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

inline SweepGrid run_sweep_grid(const RunConfig& cfg, const LiouvillianFactory& factory = default_factory()) {
    if (!cfg.sweep) throw ConfigError("run_sweep: no sweep specification");
    const SweepSpec& sp = *cfg.sweep;
    const std::vector<double> v1 = sp.axis1.values();
    const std::vector<double> v2 = sp.axis2 ? sp.axis2->values() : std::vector<double>{};
    const std::size_t n2 = sp.axis2 ? v2.size() : 1;

    SweepGrid grid{sp, cfg.convention, std::vector<SweepCell>(v1.size() * n2)};
    for (std::size_t i = 0; i < v1.size(); ++i)
        for (std::size_t j = 0; j < n2; ++j) {
            SweepCell& c = grid.cells[i * n2 + j];
            c.i1 = i;
            c.i2 = j;
            c.v1 = v1[i];
            c.record.params = cfg.params;
            apply_axis(c.record.params, sp.axis1.quantity, v1[i], cfg.convention);
            if (sp.axis2) {
                c.v2 = v2[j];
                apply_axis(c.record.params, sp.axis2->quantity, v2[j], cfg.convention);
            }
        }
    parallel_for(grid.cells.size(), cfg.threads, [&](std::size_t k) {
        SweepCell& c = grid.cells[k];
        c.record = evaluate_cell(c.record.params, cfg.auto_n_fock, cfg.truncation, factory);
    });
    return grid;
}

inline void write_sweep_csv(const SweepGrid& grid, std::ostream& out) {
    out << "i1,i2," << to_string(grid.axes.axis1.quantity) << ','
        << (grid.axes.axis2 ? to_string(grid.axes.axis2->quantity) : "axis2");
    for (const auto& c : cell_columns()) out << ',' << c;
    out << '\n';
    for (const auto& c : grid.cells)
        out << c.i1 << ',' << c.i2 << ',' << format_number(c.v1) << ',' << format_number(c.v2) << ','
            << format_cell(c.record) << '\n';
}

inline std::string sweep_csv(const SweepGrid& grid) {
    std::ostringstream o;
    write_sweep_csv(grid, o);
    return o.str();
}

inline nlohmann::json sweep_json(const SweepGrid& grid) {
    nlohmann::json axes = nlohmann::json::array();
    auto axis_json = [](const Axis& a) {
        return nlohmann::json{{"name", to_string(a.quantity)}, {"min", a.min}, {"max", a.max}, {"count", a.count}};
    };
    axes.push_back(axis_json(grid.axes.axis1));
    if (grid.axes.axis2) axes.push_back(axis_json(*grid.axes.axis2));
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : grid.cells) {
        nlohmann::json j = cell_json(c.record);
        j["i1"] = c.i1;
        j["i2"] = c.i2;
        j["axis1"] = c.v1;
        j["axis2"] = detail::json_number(c.v2);
        cells.push_back(std::move(j));
    }
    return {{"axes", axes},
            {"convention",
             {{"gamma_a_is_kappa", grid.convention.gamma_a_is_kappa},
              {"gamma_b_is_half_gamma", grid.convention.gamma_b_is_half_gamma}}},
            {"cells", cells}};
}

// Optimal-damping locus 2Ωκ/g² = 1 for every Ω in the sweep.
inline void write_locus_csv(const RunConfig& cfg, std::ostream& out) {
    std::vector<double> omegas;
    const auto& sp = *cfg.sweep;
    if (sp.axis1.quantity == AxisQuantity::omega_over_g)
        for (double v : sp.axis1.values()) omegas.push_back(v * cfg.params.g);
    else if (sp.axis2 && sp.axis2->quantity == AxisQuantity::omega_over_g)
        for (double v : sp.axis2->values()) omegas.push_back(v * cfg.params.g);
    else
        omegas.push_back(cfg.params.omega);
    out << "omega_over_g,kappa_star_over_g,two_gamma_a_over_g\n";
    for (double om : omegas) {
        if (!(om > 0.0)) continue;
        const double ks = optimal_kappa(om, cfg.params.g);
        out << format_number(om / cfg.params.g) << ',' << format_number(ks / cfg.params.g) << ','
            << format_number(2.0 * cfg.convention.gamma_a_from_kappa(ks) / cfg.params.g) << '\n';
    }
}

inline std::filesystem::path sibling(const std::filesystem::path& p, const std::string& suffix) {
    return p.string() + suffix;
}

// Sweep files: <out> (CSV or JSON per format), <out>.locus.csv, and
// <out>.json when the CSV is accompanied by a JSON mirror.
inline SweepGrid run_sweep(const RunConfig& cfg, const LiouvillianFactory& factory = default_factory()) {
    SweepGrid grid = run_sweep_grid(cfg, factory);
    if (!cfg.output_path.empty()) {
        const std::filesystem::path out = cfg.output_path;
        if (cfg.format == OutputFormat::csv) {
            detail::write_file_atomically(out, [&](std::ostream& o) { write_sweep_csv(grid, o); });
            if (cfg.json_mirror)
                detail::write_file_atomically(sibling(out, ".json"),
                                              [&](std::ostream& o) { o << sweep_json(grid).dump(2) << '\n'; });
        } else {
            detail::write_file_atomically(out, [&](std::ostream& o) { o << sweep_json(grid).dump(2) << '\n'; });
        }
        detail::write_file_atomically(sibling(out, ".locus.csv"), [&](std::ostream& o) { write_locus_csv(cfg, o); });
    }
    return grid;
}

// ---- steady task ----------------------------------------------------------

inline CellRecord run_steady(const RunConfig& cfg, const LiouvillianFactory& factory = default_factory()) {
    CellRecord rec = evaluate_cell(cfg.params, cfg.auto_n_fock, cfg.truncation, factory);
    if (!cfg.output_path.empty()) {
        detail::write_file_atomically(cfg.output_path, [&](std::ostream& o) {
            if (cfg.format == OutputFormat::csv) {
                for (std::size_t k = 0; k < cell_columns().size(); ++k) o << (k ? "," : "") << cell_columns()[k];
                o << '\n' << format_cell(rec) << '\n';
            } else {
                o << cell_json(rec).dump(2) << '\n';
            }
        });
    }
    return rec;
}

// ---- spectrum task --------------------------------------------------------

struct SpectrumRun {
    std::size_t n_fock = 0;
    std::vector<SpectrumResult> spectra;  // one per θ
};

inline std::size_t resolve_truncation(const RunConfig& cfg, const LiouvillianFactory& factory) {
    return cfg.auto_n_fock ? choose_truncation(cfg.params, cfg.truncation, factory).n_fock : cfg.params.n_fock;
}

inline nlohmann::json spectrum_metadata(const RunConfig& cfg, const SpectrumRun& run) {
    nlohmann::json thetas = nlohmann::json::array();
    for (const auto& s : run.spectra)
        thetas.push_back({{"theta", s.theta},
                          {"tau_max", s.tau_max},
                          {"n_tau", s.n_tau},
                          {"tail_extended", s.tail_extended},
                          {"max_imag_residue", s.max_imag_residue}});
    const auto& p = cfg.params;
    return {{"params", {{"g", p.g}, {"omega", p.omega}, {"kappa", p.kappa}, {"gamma", p.gamma}}},
            {"n_fock", run.n_fock},
            {"frame", "interaction"},
            {"ordering", "time-normal"},
            {"prefactor",
             {{"value", run.spectra.empty() ? 0.0 : run.spectra.front().prefactor.value},
              {"convention", run.spectra.empty() ? "" : run.spectra.front().prefactor.description}}},
            {"convention",
             {{"gamma_a_is_kappa", cfg.convention.gamma_a_is_kappa},
              {"gamma_b_is_half_gamma", cfg.convention.gamma_b_is_half_gamma}}},
            {"omega_grid", {{"min", cfg.spectrum.omega_min}, {"max", cfg.spectrum.omega_max}, {"count", cfg.spectrum.omega_count}}},
            {"requested_tau_max", cfg.spectrum.tau_max},
            {"requested_n_tau", cfg.spectrum.n_tau},
            {"thetas", thetas}};
}

// Files: <out> with columns omega, S(θ₁), S(θ₂), … and <out>.meta.json.
inline SpectrumRun run_spectrum(const RunConfig& cfg, const LiouvillianFactory& factory = default_factory()) {
    SpectrumRun run;
    run.n_fock = resolve_truncation(cfg, factory);
    const SystemParams p = cfg.params.with_n_fock(run.n_fock);
    const Liouvillian L = factory(p, Frame::interaction);
    const DensityMatrix rho = steady_state(L);
    const auto omega = linear_grid(cfg.spectrum.omega_min, cfg.spectrum.omega_max, cfg.spectrum.omega_count);
    const SpectrumPrefactor pref = SpectrumPrefactor::sixteen_gamma_a(p.kappa, cfg.convention.gamma_a_is_kappa);
    run.spectra.resize(cfg.spectrum.thetas.size());
    parallel_for(run.spectra.size(), cfg.threads, [&](std::size_t k) {
        run.spectra[k] = squeezing_spectrum(L, rho, cfg.spectrum.thetas[k], omega, cfg.spectrum.tau_max,
                                            cfg.spectrum.n_tau, pref);
    });
    if (!cfg.output_path.empty()) {
        const std::filesystem::path out = cfg.output_path;
        const std::filesystem::path meta = sibling(out, ".meta.json");
        try {
            detail::write_file_atomically(out, [&](std::ostream& o) {
                if (cfg.format == OutputFormat::json) {
                    nlohmann::json j = spectrum_metadata(cfg, run);
                    j["omega"] = omega;
                    nlohmann::json vals = nlohmann::json::array();
                    for (const auto& s : run.spectra) vals.push_back(s.values);
                    j["values"] = vals;
                    o << j.dump(2) << '\n';
                    return;
                }
                o << "omega";
                for (const auto& s : run.spectra) o << ",S_theta=" << detail::format_double(s.theta);
                o << '\n';
                for (std::size_t j = 0; j < omega.size(); ++j) {
                    o << format_number(omega[j]);
                    for (const auto& s : run.spectra) o << ',' << format_number(s.values[j]);
                    o << '\n';
                }
            });
            detail::write_file_atomically(meta, [&](std::ostream& o) { o << spectrum_metadata(cfg, run).dump(2) << '\n'; });
        } catch (...) {
            std::error_code ec;
            std::filesystem::remove(out, ec);
            std::filesystem::remove(meta, ec);
            throw;
        }
    }
    return run;
}

// ---- time evolution task --------------------------------------------------

struct TimeEvoRun {
    std::size_t n_fock = 0;
    Propagation propagation;
};

// Propagates |−,0⟩⟨−,0| and records observables on a uniform grid.
inline TimeEvoRun run_timeevo(const RunConfig& cfg, const LiouvillianFactory& factory = default_factory()) {
    const std::size_t n = cfg.auto_n_fock && (cfg.params.kappa > 0.0 || cfg.params.gamma > 0.0)
                              ? resolve_truncation(cfg, factory)
                              : (cfg.auto_n_fock ? initial_truncation(cfg.params) : cfg.params.n_fock);
    const SystemParams p = cfg.params.with_n_fock(n);
    const FockSpace s = p.space();
    const Liouvillian L = factory(p, Frame::interaction);
    TimeEvoRun run{n, propagate(L, DensityMatrix::pure(basis_state(s, AtomLevel::ground, 0)),
                                uniform_grid(cfg.timeevo.t_max, cfg.timeevo.count))};
    if (!cfg.output_path.empty()) {
        detail::write_file_atomically(cfg.output_path, [&](std::ostream& o) {
            nlohmann::json rows = nlohmann::json::array();
            if (cfg.format == OutputFormat::csv)
                o << "t,trace,purity,mean_n,mandel_q,four_var_x1,four_var_x2,phase_fluct\n";
            for (std::size_t k = 0; k < run.propagation.states.size(); ++k) {
                const DensityMatrix& rho = run.propagation.states[k];
                const PhotonStatistics ps = photon_statistics(rho);
                const double q = ps.mandel_q.value_or(std::numeric_limits<double>::quiet_NaN());
                const double x1 = quadrature_variance(rho, 0.0).four_var;
                const double x2 = quadrature_variance(rho, std::numbers::pi / 2).four_var;
                const double pf = phase_fluctuation(rho);
                const double t = run.propagation.times[k];
                if (cfg.format == OutputFormat::csv) {
                    o << format_number(t) << ',' << format_number(rho.trace().real()) << ','
                      << format_number(rho.purity()) << ',' << format_number(ps.mean_n) << ',' << format_number(q)
                      << ',' << format_number(x1) << ',' << format_number(x2) << ',' << format_number(pf) << '\n';
                } else {
                    rows.push_back({{"t", t},
                                    {"trace", rho.trace().real()},
                                    {"purity", rho.purity()},
                                    {"mean_n", ps.mean_n},
                                    {"mandel_q", detail::json_number(q)},
                                    {"four_var_x1", x1},
                                    {"four_var_x2", x2},
                                    {"phase_fluct", pf}});
                }
            }
            if (cfg.format == OutputFormat::json) o << nlohmann::json{{"n_fock", n}, {"rows", rows}}.dump(2) << '\n';
        });
    }
    return run;
}

} // namespace csq
