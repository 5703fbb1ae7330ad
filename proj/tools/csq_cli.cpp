// csq_cli: steady states, sweeps, spectra and time evolution of the driven atom–cavity model

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "csq/csq.hpp"

namespace {

enum Exit { ok = 0, validation_failed = 1, config_error = 2, numerical_error = 3 };

struct Flags {
    std::string config;
    std::string out;
    std::string format;
    unsigned threads = 0;
    bool seedless = false;
    std::vector<int> only;
};

csq::RunConfig resolve(const Flags& f, csq::Task task) {
    csq::RunConfig cfg = f.config.empty() ? csq::RunConfig{} : csq::load_config(f.config);
    cfg.task = task;
    if (!f.out.empty()) cfg.output_path = f.out;
    if (!f.format.empty()) cfg.format = csq::parse_format(f.format);
    if (f.threads > 0) cfg.threads = f.threads;
    csq::validate_config(cfg);
    return cfg;
}

int run_task(const Flags& f, csq::Task task) {
    csq::RunConfig cfg = resolve(f, task);
    switch (task) {
        case csq::Task::steady: {
            const csq::CellRecord rec = csq::run_steady(cfg);
            if (cfg.output_path.empty()) {
                for (std::size_t k = 0; k < csq::cell_columns().size(); ++k)
                    std::cout << (k ? "," : "") << csq::cell_columns()[k];
                std::cout << '\n' << csq::format_cell(rec) << '\n';
            }
            return rec.status == "ok" ? ok : numerical_error;
        }
        case csq::Task::sweep: {
            const csq::SweepGrid grid = csq::run_sweep(cfg);
            if (cfg.output_path.empty()) csq::write_sweep_csv(grid, std::cout);
            return ok;
        }
        case csq::Task::spectrum:
            if (cfg.output_path.empty()) throw csq::ConfigError("spectrum needs --out or output.path");
            csq::run_spectrum(cfg);
            return ok;
        case csq::Task::timeevo:
            if (cfg.output_path.empty()) throw csq::ConfigError("timeevo needs --out or output.path");
            csq::run_timeevo(cfg);
            return ok;
        case csq::Task::validate: break;
    }
    return ok;
}

int run_validate(const Flags& f) {
    const csq::RunConfig cfg = resolve(f, csq::Task::validate);
    csq::ValidationOptions opt;
    opt.convention = cfg.convention;
    if (f.threads > 0) opt.sweep_threads = f.threads;
    opt.only = f.only;
    opt.on_result = [](const csq::CriterionResult& r) { std::cout << csq::format_result_line(r) << std::endl; };
    const csq::ValidationReport rep = csq::run_validation(opt);
    std::size_t passed = 0;
    for (const auto& r : rep.results) passed += r.passed;
    std::cout << passed << "/" << rep.results.size() << " criteria passed\n";
    return rep.all_passed() ? ok : validation_failed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Steady states, sweeps, spectra and time evolution of a driven, damped atom-cavity system"};
    app.require_subcommand(1);
    Flags flags;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", flags.config, "key = value configuration file")->check(CLI::ExistingFile);
        sub->add_option("--out", flags.out, "output path (overrides output.path)");
        sub->add_option("--format", flags.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--threads", flags.threads, "worker threads (overrides threads)")->check(CLI::PositiveNumber);
        sub->add_flag("--seedless", flags.seedless, "no-op: every algorithm here is deterministic, no RNG is used");
    };
    struct Sub {
        const char* name;
        const char* help;
        csq::Task task;
    };
    const Sub subs[] = {{"steady", "steady state and observables at one parameter point", csq::Task::steady},
                        {"sweep", "steady-state observables on a 1-D or 2-D parameter grid", csq::Task::sweep},
                        {"spectrum", "spectrum of squeezing of the output field", csq::Task::spectrum},
                        {"timeevo", "time evolution from the ground state with an empty cavity", csq::Task::timeevo},
                        {"validate", "run the acceptance suite", csq::Task::validate}};
    std::vector<std::pair<CLI::App*, csq::Task>> registered;
    for (const auto& s : subs) {
        CLI::App* sub = app.add_subcommand(s.name, s.help);
        add_common(sub);
        if (s.task == csq::Task::validate) sub->add_option("--only", flags.only, "criterion ids to run")->check(CLI::Range(1, 10));
        registered.emplace_back(sub, s.task);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : config_error;
    }

    try {
        for (const auto& [sub, task] : registered) {
            if (!sub->parsed()) continue;
            return task == csq::Task::validate ? run_validate(flags) : run_task(flags, task);
        }
    } catch (const csq::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const csq::Error& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return numerical_error;
    }
    return ok;
}
