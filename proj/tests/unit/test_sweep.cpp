#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <gtest/gtest.h>

#include "csq/runner.hpp"

using namespace csq;
namespace fs = std::filesystem;

namespace {

SystemParams params(double omega, double kappa, double gamma) {
    SystemParams p;
    p.omega = omega;
    p.kappa = kappa;
    p.gamma = gamma;
    return p;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string l;
    while (std::getline(ss, l)) out.push_back(l);
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream o;
    o << in.rdbuf();
    return o.str();
}

fs::path scratch(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("csq_test_sweep_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

RunConfig small_sweep(unsigned threads) {
    return parse_config_string("task = sweep\nparams.gamma = 0.02\nthreads = " + std::to_string(threads) +
                               "\nsweep.axis1.name = omega_over_g\nsweep.axis1.min = 0.5\nsweep.axis1.max = 1\n"
                               "sweep.axis1.count = 2\nsweep.axis2.name = kappa\nsweep.axis2.min = 0.2\n"
                               "sweep.axis2.max = 0.6\nsweep.axis2.count = 3\n");
}

} // namespace

TEST(Truncation, UndrivenStartsAtTen) {
    const TruncationChoice tc = choose_truncation(params(0, 0.3, 0.02));
    EXPECT_EQ(tc.tried.front(), 10u);
    EXPECT_EQ(tc.n_fock, 10u);
}

TEST(Truncation, StrongDriveConvergesEarly) {
    const SystemParams p = params(2, 0.1, 0.02);
    EXPECT_EQ(initial_truncation(p), 26u);
    const TruncationChoice tc = choose_truncation(p);
    EXPECT_EQ(tc.tried.front(), 26u);
    EXPECT_LE(tc.n_fock, 40u);
    EXPECT_LT(tc.steady.residual, 1e-10);
}

TEST(Truncation, ChosenValueAgreesWithLargerSpace) {
    const SystemParams p = params(1, 0.3, 0.02);
    const TruncationChoice tc = choose_truncation(p);
    const DensityMatrix big = steady_state(liouvillian(p.with_n_fock(tc.n_fock + 30), Frame::interaction));
    const CellObservables o = measure(p.with_n_fock(tc.n_fock + 30), big);
    EXPECT_NEAR(tc.observables.mean_n, o.mean_n, 1e-6 * std::max(1.0, o.mean_n));
    EXPECT_NEAR(tc.observables.four_var_x1, o.four_var_x1, 1e-6 * std::max(1.0, o.four_var_x1));
}

TEST(Truncation, CapExceeded) {
    TruncationSpec limits;
    limits.cap = 30;
    EXPECT_THROW(choose_truncation(params(4, 0.05, 0.02), limits), TruncationDiverged);
    limits.cap = 15;
    EXPECT_THROW(choose_truncation(params(0, 0.3, 0.02), limits), TruncationDiverged);
}

TEST(Sweep, CsvLayout) {
    const SweepGrid g = run_sweep_grid(small_sweep(1));
    const auto ls = lines(sweep_csv(g));
    ASSERT_EQ(ls.size(), 7u);
    const auto header = split(ls[0]);
    EXPECT_EQ(header.size(), 4 + cell_columns().size());
    EXPECT_EQ(header[2], "omega_over_g");
    EXPECT_EQ(header[3], "kappa");
    for (std::size_t k = 1; k < ls.size(); ++k) {
        const auto row = split(ls[k]);
        ASSERT_EQ(row.size(), header.size());
        EXPECT_EQ(row[8], "ok");
        EXPECT_EQ(row[0], std::to_string((k - 1) / 3));
        EXPECT_EQ(row[1], std::to_string((k - 1) % 3));
    }
}

TEST(Sweep, DeterministicAcrossThreadCounts) {
    EXPECT_EQ(sweep_csv(run_sweep_grid(small_sweep(1))), sweep_csv(run_sweep_grid(small_sweep(3))));
}

TEST(Sweep, CellsIndependentOfGrid) {
    const SweepGrid g = run_sweep_grid(small_sweep(2));
    for (const SweepCell& c : g.cells) {
        const CellRecord alone = evaluate_cell(params(c.record.params.omega, c.record.params.kappa, 0.02), true, {});
        EXPECT_EQ(alone.n_fock_used, c.record.n_fock_used);
        EXPECT_NEAR(alone.obs.mean_n, c.record.obs.mean_n, 1e-12);
        EXPECT_NEAR(alone.obs.four_var_x1, c.record.obs.four_var_x1, 1e-12);
        EXPECT_NEAR(alone.obs.phase_fluct, c.record.obs.phase_fluct, 1e-12);
    }
}

TEST(Sweep, SinglePointMatchesSteady) {
    RunConfig sweep = parse_config_string("task = sweep\nparams.omega = 1\nparams.gamma = 0.02\n"
                                          "sweep.axis1.name = kappa\nsweep.axis1.min = 0.4\nsweep.axis1.count = 1\n");
    RunConfig steady = parse_config_string("params.omega = 1\nparams.gamma = 0.02\nparams.kappa = 0.4\n");
    const SweepGrid g = run_sweep_grid(sweep);
    ASSERT_EQ(g.cells.size(), 1u);
    EXPECT_EQ(format_cell(g.cells[0].record), format_cell(run_steady(steady)));
}

TEST(Sweep, FailedCellRecordedAndOthersKept) {
    RunConfig c = parse_config_string("task = sweep\nparams.gamma = 0.02\nparams.kappa = 0.05\ntruncation.cap = 40\n"
                                      "sweep.axis1.name = omega_over_g\nsweep.axis1.min = 0\nsweep.axis1.max = 4\n"
                                      "sweep.axis1.count = 2\n");
    const SweepGrid g = run_sweep_grid(c);
    ASSERT_EQ(g.cells.size(), 2u);
    EXPECT_EQ(g.cells[0].record.status, "ok");
    EXPECT_EQ(g.cells[1].record.status.rfind("TruncationDiverged", 0), 0u);
    EXPECT_TRUE(std::isnan(g.cells[1].record.residual));
    EXPECT_EQ(split(lines(sweep_csv(g))[2]).size(), 4 + cell_columns().size());
}

TEST(Sweep, MeanPhotonNumberNearCoherentLimit) {
    // Ω = 2 with the smallest damping of the κ cut: ⟨n⟩ → (Ω/g)² = 4
    RunConfig c = parse_config_string("task = sweep\nparams.omega = 2\nparams.gamma_b = 0.01\nthreads = 2\n"
                                      "sweep.axis1.name = two_gamma_a_over_g\nsweep.axis1.min = 0.05\n"
                                      "sweep.axis1.max = 0.45\nsweep.axis1.count = 3\n");
    const SweepGrid g = run_sweep_grid(c);
    EXPECT_NEAR(g.cells.front().record.obs.mean_n, 4.0, 0.2);
    for (std::size_t k = 1; k < g.cells.size(); ++k)
        EXPECT_LT(g.cells[k].record.obs.mean_n, g.cells[k - 1].record.obs.mean_n);
}

TEST(Sweep, OutputFiles) {
    const fs::path d = scratch("files");
    RunConfig c = small_sweep(2);
    c.output_path = (d / "grid.csv").string();
    c.json_mirror = true;
    const SweepGrid g = run_sweep(c);
    EXPECT_EQ(slurp(d / "grid.csv"), sweep_csv(g));
    const nlohmann::json j = nlohmann::json::parse(slurp(d / "grid.csv.json"));
    EXPECT_EQ(j["cells"].size(), 6u);
    EXPECT_EQ(j["axes"][1]["name"], "kappa");
    const auto locus = lines(slurp(d / "grid.csv.locus.csv"));
    ASSERT_EQ(locus.size(), 3u);
    const auto row = split(locus[1]);
    EXPECT_DOUBLE_EQ(std::stod(row[1]), optimal_kappa(0.5, 1.0));
    for (const auto& e : fs::directory_iterator(d)) EXPECT_EQ(e.path().string().find(".partial"), std::string::npos);
}

TEST(SpectrumTask, FilesAndMetadata) {
    const fs::path d = scratch("spectrum");
    RunConfig c = parse_config_string("task = spectrum\nparams.omega = 0.53\nparams.kappa = 0.665\nparams.gamma = 0.02\n"
                                      "params.n_fock = 8\nspectrum.omega_min = 0\nspectrum.omega_max = 2\n"
                                      "spectrum.omega_count = 11\nspectrum.tau_max = 60\nspectrum.n_tau = 1201\n");
    c.output_path = (d / "s.csv").string();
    const SpectrumRun run = run_spectrum(c);
    const auto ls = lines(slurp(d / "s.csv"));
    ASSERT_EQ(ls.size(), 12u);
    EXPECT_EQ(ls[0], "omega,S_theta=0,S_theta=1.5707963267948966");
    const auto last = split(ls.back());
    ASSERT_EQ(last.size(), 3u);
    EXPECT_EQ(std::stod(last[0]), 2.0);
    EXPECT_EQ(std::stod(last[1]), run.spectra[0].values.back());
    const nlohmann::json meta = nlohmann::json::parse(slurp(d / "s.csv.meta.json"));
    EXPECT_EQ(meta["n_fock"], 8);
    EXPECT_DOUBLE_EQ(meta["prefactor"]["value"].get<double>(), 16 * 0.665);
    EXPECT_EQ(meta["thetas"].size(), 2u);
    EXPECT_EQ(meta["ordering"], "time-normal");
}

TEST(SpectrumTask, UndrivenGivesZeros) {
    RunConfig c = parse_config_string("task = spectrum\nparams.omega = 0\nparams.kappa = 0.5\nparams.gamma = 0.02\n"
                                      "spectrum.omega_count = 21\nspectrum.tau_max = 40\nspectrum.n_tau = 401\n");
    const SpectrumRun run = run_spectrum(c);
    EXPECT_EQ(run.n_fock, 10u);
    for (const auto& s : run.spectra)
        for (double v : s.values) EXPECT_LT(std::abs(v), 1e-9);
}

TEST(SpectrumTask, FailureLeavesNoFiles) {
    const fs::path d = scratch("spectrum_fail");
    RunConfig c = parse_config_string("task = spectrum\nparams.omega = 0.53\nparams.kappa = 0.665\nparams.gamma = 0.02\n"
                                      "params.n_fock = 8\nspectrum.tau_max = 3\nspectrum.n_tau = 61\n");
    c.output_path = (d / "s.csv").string();
    EXPECT_THROW(run_spectrum(c), TailNotDecayed);
    EXPECT_TRUE(fs::is_empty(d));
}

TEST(TimeEvoTask, Rows) {
    const fs::path d = scratch("timeevo");
    RunConfig c = parse_config_string("task = timeevo\nparams.omega = 1\nparams.kappa = 0.3\nparams.gamma = 0.02\n"
                                      "params.n_fock = 12\ntimeevo.t_max = 10\ntimeevo.count = 6\noutput.format = json\n");
    c.output_path = (d / "t.json").string();
    const TimeEvoRun run = run_timeevo(c);
    const nlohmann::json j = nlohmann::json::parse(slurp(d / "t.json"));
    ASSERT_EQ(j["rows"].size(), 6u);
    EXPECT_EQ(j["rows"][0]["mean_n"], 0.0);
    EXPECT_NEAR(j["rows"][5]["trace"].get<double>(), 1.0, 1e-9);
    EXPECT_EQ(run.propagation.times.back(), 10.0);
}

TEST(Sweep, MandelMinimumTracksOptimalLocus) {
    RunConfig c = parse_config_string("task = sweep\nparams.gamma_b = 0.01\nthreads = 2\n"
                                      "sweep.axis1.name = omega_over_g\nsweep.axis1.min = 0.5\nsweep.axis1.max = 3\n"
                                      "sweep.axis1.count = 11\nsweep.axis2.name = two_gamma_a_over_g\n"
                                      "sweep.axis2.min = 0.05\nsweep.axis2.max = 1.5\nsweep.axis2.count = 15\n");
    const SweepGrid g = run_sweep_grid(c);
    double prev_kappa = 1e9;
    for (std::size_t i = 0; i < 11; ++i) {
        const SweepCell* best = nullptr;
        for (std::size_t j = 0; j < 15; ++j) {
            const SweepCell& cell = g.cells[i * 15 + j];
            ASSERT_EQ(cell.record.status, "ok");
            if (!best || cell.record.obs.mandel_q < best->record.obs.mandel_q) best = &cell;
        }
        const double omega = best->record.params.omega;
        const double ratio = best->record.params.kappa / optimal_kappa(omega, 1.0);
        EXPECT_LT(best->record.obs.mandel_q, 0.0) << "omega " << omega;
        EXPECT_GE(ratio, 0.6) << "omega " << omega;
        EXPECT_LE(ratio, 1.3) << "omega " << omega;
        EXPECT_LE(best->record.params.kappa, prev_kappa) << "omega " << omega;
        prev_kappa = best->record.params.kappa;
    }
}
