// config.hpp: run configuration and its flat key-value text format
//
// Grammar: one `key = value` per line, keys are dotted paths, `#` starts a
// comment, blank lines are ignored. Unknown keys are an error. Lists are
// comma separated. Booleans are `true`/`false`. See README for every key.

#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "csq/model.hpp"

namespace csq {

enum class Task { steady, sweep, spectrum, timeevo, validate };
enum class OutputFormat { csv, json };

// Which physical rate a sweep axis drives.
enum class AxisQuantity {
    kappa,               // κ directly
    two_gamma_a_over_g,  // plot axis 2Γ_a/g, mapped through the convention
    omega_over_g,        // Ω/g
    gamma,               // γ directly
    gamma_b_over_g,      // symbol Γ_b/g, mapped through the convention
};

struct SymbolConvention {
    bool gamma_a_is_kappa = true;      // Γ_a = κ (else Γ_a = κ/2)
    bool gamma_b_is_half_gamma = true; // Γ_b = γ/2 (else Γ_b = γ)

    double kappa_from_gamma_a(double gamma_a) const { return gamma_a_is_kappa ? gamma_a : 2.0 * gamma_a; }
    double gamma_a_from_kappa(double kappa) const { return gamma_a_is_kappa ? kappa : 0.5 * kappa; }
    double gamma_from_gamma_b(double gamma_b) const { return gamma_b_is_half_gamma ? 2.0 * gamma_b : gamma_b; }

    friend bool operator==(const SymbolConvention&, const SymbolConvention&) = default;
};

struct Axis {
    AxisQuantity quantity = AxisQuantity::kappa;
    double min = 0.0;
    double max = 0.0;
    std::size_t count = 1;

    std::vector<double> values() const {
        std::vector<double> v(count);
        for (std::size_t k = 0; k < count; ++k)
            v[k] = count == 1 ? min : min + (max - min) * static_cast<double>(k) / static_cast<double>(count - 1);
        return v;
    }

    friend bool operator==(const Axis&, const Axis&) = default;
};

struct SweepSpec {
    Axis axis1;
    std::optional<Axis> axis2;
    friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

struct SpectrumSpec {
    std::vector<double> thetas{0.0, std::numbers::pi / 2};
    double omega_min = -2.0;
    double omega_max = 2.0;
    std::size_t omega_count = 201;
    double tau_max = 200.0;
    std::size_t n_tau = 4001;
    friend bool operator==(const SpectrumSpec&, const SpectrumSpec&) = default;
};

struct TimeEvoSpec {
    double t_max = 50.0;
    std::size_t count = 101;
    friend bool operator==(const TimeEvoSpec&, const TimeEvoSpec&) = default;
};

struct TruncationSpec {
    std::size_t cap = 200;
    double tol = 1e-6;
    friend bool operator==(const TruncationSpec&, const TruncationSpec&) = default;
};

struct RunConfig {
    Task task = Task::steady;
    SystemParams params;                 // params.n_fock ignored when auto_n_fock
    bool auto_n_fock = true;
    std::optional<SweepSpec> sweep;
    SpectrumSpec spectrum;
    TimeEvoSpec timeevo;
    TruncationSpec truncation;
    SymbolConvention convention;
    std::string output_path;
    OutputFormat format = OutputFormat::csv;
    bool json_mirror = false;
    unsigned threads = 1;

    friend bool operator==(const RunConfig& a, const RunConfig& b) {
        auto pk = [](const SystemParams& p) { return std::tuple(p.g, p.omega, p.kappa, p.gamma, p.n_fock); };
        return a.task == b.task && pk(a.params) == pk(b.params) && a.auto_n_fock == b.auto_n_fock &&
               a.sweep == b.sweep && a.spectrum == b.spectrum && a.timeevo == b.timeevo &&
               a.truncation == b.truncation && a.convention == b.convention && a.output_path == b.output_path &&
               a.format == b.format && a.json_mirror == b.json_mirror && a.threads == b.threads;
    }
};

// ---- enum names ----------------------------------------------------------

inline const char* to_string(Task t) {
    switch (t) {
        case Task::steady: return "steady";
        case Task::sweep: return "sweep";
        case Task::spectrum: return "spectrum";
        case Task::timeevo: return "timeevo";
        case Task::validate: return "validate";
    }
    return "?";
}

inline const char* to_string(AxisQuantity q) {
    switch (q) {
        case AxisQuantity::kappa: return "kappa";
        case AxisQuantity::two_gamma_a_over_g: return "two_gamma_a_over_g";
        case AxisQuantity::omega_over_g: return "omega_over_g";
        case AxisQuantity::gamma: return "gamma";
        case AxisQuantity::gamma_b_over_g: return "gamma_b_over_g";
    }
    return "?";
}

inline const char* to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }

inline Task parse_task(const std::string& s) {
    for (Task t : {Task::steady, Task::sweep, Task::spectrum, Task::timeevo, Task::validate})
        if (s == to_string(t)) return t;
    throw ConfigError("unknown task '" + s + "'");
}

inline AxisQuantity parse_axis_quantity(const std::string& s) {
    for (AxisQuantity q : {AxisQuantity::kappa, AxisQuantity::two_gamma_a_over_g, AxisQuantity::omega_over_g,
                           AxisQuantity::gamma, AxisQuantity::gamma_b_over_g})
        if (s == to_string(q)) return q;
    throw ConfigError("unknown sweep axis '" + s + "'");
}

inline OutputFormat parse_format(const std::string& s) {
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    throw ConfigError("unknown output format '" + s + "'");
}

// Applies one axis value to a parameter set.
inline void apply_axis(SystemParams& p, AxisQuantity q, double v, const SymbolConvention& conv) {
    switch (q) {
        case AxisQuantity::kappa: p.kappa = v; break;
        case AxisQuantity::two_gamma_a_over_g: p.kappa = conv.kappa_from_gamma_a(0.5 * v * p.g); break;
        case AxisQuantity::omega_over_g: p.omega = v * p.g; break;
        case AxisQuantity::gamma: p.gamma = v; break;
        case AxisQuantity::gamma_b_over_g: p.gamma = conv.gamma_from_gamma_b(v * p.g); break;
    }
}

// ---- parsing -------------------------------------------------------------

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto* end = v.data() + v.size();
    const auto res = std::from_chars(v.data(), end, out);
    if (res.ec != std::errc{} || res.ptr != end) throw ConfigError("key '" + key + "': not a number: '" + v + "'");
    return out;
}

inline std::size_t parse_size(const std::string& key, const std::string& v) {
    std::size_t out = 0;
    const auto* end = v.data() + v.size();
    const auto res = std::from_chars(v.data(), end, out);
    if (res.ec != std::errc{} || res.ptr != end) throw ConfigError("key '" + key + "': not a count: '" + v + "'");
    return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw ConfigError("key '" + key + "': expected true or false, got '" + v + "'");
}

inline std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
    if (out.empty()) throw ConfigError("key '" + key + "': empty list");
    return out;
}

// Shortest text that parses back to the same double.
inline std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

} // namespace detail

using KeyValues = std::map<std::string, std::string>;

inline KeyValues parse_key_values(std::istream& in) {
    KeyValues kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (!kv.emplace(key, val).second) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    return kv;
}

inline void validate_config(const RunConfig& c) {
    try {
        c.params.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    auto check_axis = [](const Axis& a, const char* name) {
        if (a.count < 1) throw ConfigError(std::string(name) + ": count must be >= 1");
        if (!(a.max >= a.min)) throw ConfigError(std::string(name) + ": max must be >= min");
        if (a.count == 1 && a.max != a.min) throw ConfigError(std::string(name) + ": a single-point axis needs min == max");
    };
    if (c.task == Task::sweep) {
        if (!c.sweep) throw ConfigError("task sweep needs sweep.axis1.*");
        check_axis(c.sweep->axis1, "sweep.axis1");
        if (c.sweep->axis2) check_axis(*c.sweep->axis2, "sweep.axis2");
    }
    if (c.spectrum.thetas.empty()) throw ConfigError("spectrum.thetas: empty");
    if (c.spectrum.omega_count < 1) throw ConfigError("spectrum.omega_count must be >= 1");
    if (!(c.spectrum.tau_max > 0.0)) throw ConfigError("spectrum.tau_max must be > 0");
    if (c.spectrum.n_tau < 3) throw ConfigError("spectrum.n_tau must be >= 3");
    if (!(c.timeevo.t_max > 0.0) || c.timeevo.count < 2) throw ConfigError("timeevo: need t_max > 0 and count >= 2");
    if (c.truncation.cap < 2 || !(c.truncation.tol > 0.0)) throw ConfigError("truncation: need cap >= 2 and tol > 0");
    if (c.threads < 1) throw ConfigError("threads must be >= 1");
}

// Symbol keys (params.gamma_a, params.gamma_b, params.two_gamma_a_over_g)
// are converted through the convention and stored as physical rates.
inline RunConfig parse_config(const KeyValues& kv) {
    RunConfig c;
    std::set<std::string> used;
    auto get = [&](const std::string& key) -> std::optional<std::string> {
        if (auto it = kv.find(key); it != kv.end()) {
            used.insert(key);
            return it->second;
        }
        return std::nullopt;
    };
    auto get_d = [&](const std::string& key, double& dst) {
        if (auto v = get(key)) dst = detail::parse_double(key, *v);
    };
    auto get_z = [&](const std::string& key, std::size_t& dst) {
        if (auto v = get(key)) dst = detail::parse_size(key, *v);
    };
    auto get_b = [&](const std::string& key, bool& dst) {
        if (auto v = get(key)) dst = detail::parse_bool(key, *v);
    };

    if (auto v = get("task")) c.task = parse_task(*v);
    get_b("convention.gamma_a_is_kappa", c.convention.gamma_a_is_kappa);
    get_b("convention.gamma_b_is_half_gamma", c.convention.gamma_b_is_half_gamma);

    get_d("params.g", c.params.g);
    get_d("params.omega", c.params.omega);
    get_d("params.kappa", c.params.kappa);
    get_d("params.gamma", c.params.gamma);
    if (auto v = get("params.gamma_a")) {
        if (kv.count("params.kappa")) throw ConfigError("params.gamma_a conflicts with params.kappa");
        c.params.kappa = c.convention.kappa_from_gamma_a(detail::parse_double("params.gamma_a", *v));
    }
    if (auto v = get("params.gamma_b")) {
        if (kv.count("params.gamma")) throw ConfigError("params.gamma_b conflicts with params.gamma");
        c.params.gamma = c.convention.gamma_from_gamma_b(detail::parse_double("params.gamma_b", *v));
    }
    if (auto v = get("params.n_fock")) {
        if (*v == "auto") {
            c.auto_n_fock = true;
        } else {
            c.auto_n_fock = false;
            c.params.n_fock = detail::parse_size("params.n_fock", *v);
        }
    }

    auto read_axis = [&](const std::string& prefix) -> std::optional<Axis> {
        auto name = get(prefix + ".name");
        if (!name) {
            for (const char* k : {".min", ".max", ".count"})
                if (kv.count(prefix + k)) throw ConfigError(prefix + k + " given without " + prefix + ".name");
            return std::nullopt;
        }
        Axis a;
        a.quantity = parse_axis_quantity(*name);
        if (!kv.count(prefix + ".min") || !kv.count(prefix + ".count"))
            throw ConfigError(prefix + " needs .min and .count");
        get_d(prefix + ".min", a.min);
        a.max = a.min;
        get_d(prefix + ".max", a.max);
        get_z(prefix + ".count", a.count);
        return a;
    };
    if (auto a1 = read_axis("sweep.axis1")) {
        c.sweep = SweepSpec{*a1, read_axis("sweep.axis2")};
    } else if (read_axis("sweep.axis2")) {
        throw ConfigError("sweep.axis2 given without sweep.axis1");
    }

    if (auto v = get("spectrum.thetas")) c.spectrum.thetas = detail::parse_list("spectrum.thetas", *v);
    get_d("spectrum.omega_min", c.spectrum.omega_min);
    get_d("spectrum.omega_max", c.spectrum.omega_max);
    get_z("spectrum.omega_count", c.spectrum.omega_count);
    get_d("spectrum.tau_max", c.spectrum.tau_max);
    get_z("spectrum.n_tau", c.spectrum.n_tau);
    get_d("timeevo.t_max", c.timeevo.t_max);
    get_z("timeevo.count", c.timeevo.count);
    get_z("truncation.cap", c.truncation.cap);
    get_d("truncation.tol", c.truncation.tol);
    if (auto v = get("output.path")) c.output_path = *v;
    if (auto v = get("output.format")) c.format = parse_format(*v);
    get_b("output.json_mirror", c.json_mirror);
    if (auto v = get("threads")) c.threads = static_cast<unsigned>(detail::parse_size("threads", *v));

    for (const auto& [k, v] : kv)
        if (!used.count(k)) throw ConfigError("unknown key '" + k + "'");
    validate_config(c);
    return c;
}

inline RunConfig parse_config(std::istream& in) { return parse_config(parse_key_values(in)); }

inline RunConfig parse_config_string(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    return parse_config(in);
}

// Canonical text form; rates are written as physical κ and γ.
inline std::string serialize_config(const RunConfig& c) {
    using detail::format_double;
    std::ostringstream o;
    auto b = [](bool x) { return x ? "true" : "false"; };
    o << "task = " << to_string(c.task) << '\n';
    o << "params.g = " << format_double(c.params.g) << '\n';
    o << "params.omega = " << format_double(c.params.omega) << '\n';
    o << "params.kappa = " << format_double(c.params.kappa) << '\n';
    o << "params.gamma = " << format_double(c.params.gamma) << '\n';
    o << "params.n_fock = " << (c.auto_n_fock ? std::string("auto") : std::to_string(c.params.n_fock)) << '\n';
    o << "convention.gamma_a_is_kappa = " << b(c.convention.gamma_a_is_kappa) << '\n';
    o << "convention.gamma_b_is_half_gamma = " << b(c.convention.gamma_b_is_half_gamma) << '\n';
    auto axis = [&](const std::string& prefix, const Axis& a) {
        o << prefix << ".name = " << to_string(a.quantity) << '\n';
        o << prefix << ".min = " << format_double(a.min) << '\n';
        o << prefix << ".max = " << format_double(a.max) << '\n';
        o << prefix << ".count = " << a.count << '\n';
    };
    if (c.sweep) {
        axis("sweep.axis1", c.sweep->axis1);
        if (c.sweep->axis2) axis("sweep.axis2", *c.sweep->axis2);
    }
    o << "spectrum.thetas = ";
    for (std::size_t k = 0; k < c.spectrum.thetas.size(); ++k)
        o << (k ? ", " : "") << format_double(c.spectrum.thetas[k]);
    o << '\n';
    o << "spectrum.omega_min = " << format_double(c.spectrum.omega_min) << '\n';
    o << "spectrum.omega_max = " << format_double(c.spectrum.omega_max) << '\n';
    o << "spectrum.omega_count = " << c.spectrum.omega_count << '\n';
    o << "spectrum.tau_max = " << format_double(c.spectrum.tau_max) << '\n';
    o << "spectrum.n_tau = " << c.spectrum.n_tau << '\n';
    o << "timeevo.t_max = " << format_double(c.timeevo.t_max) << '\n';
    o << "timeevo.count = " << c.timeevo.count << '\n';
    o << "truncation.cap = " << c.truncation.cap << '\n';
    o << "truncation.tol = " << format_double(c.truncation.tol) << '\n';
    if (!c.output_path.empty()) o << "output.path = " << c.output_path << '\n';
    o << "output.format = " << to_string(c.format) << '\n';
    o << "output.json_mirror = " << b(c.json_mirror) << '\n';
    o << "threads = " << c.threads << '\n';
    return o.str();
}

} // namespace csq
