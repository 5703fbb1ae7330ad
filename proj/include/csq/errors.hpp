// errors.hpp: exception types and the warning sink shared by all modules

#pragma once

#include <functional>
#include <iostream>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace csq {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidArgument : Error {
    using Error::Error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct NoDissipation : Error {
    using Error::Error;
};

struct NonUniqueSteadyState : Error {
    using Error::Error;
};

struct StepSizeUnderflow : Error {
    using Error::Error;
};

struct OutOfDomain : Error {
    using Error::Error;
};

struct TailNotDecayed : Error {
    using Error::Error;
};

struct TruncationDiverged : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

// Non-fatal diagnostics (under-resolved truncation, discarded imaginary
// residues). The default sink prints to stderr; tests and the CLI may swap it.
using WarningSink = std::function<void(std::string_view)>;

namespace detail {

struct WarningState {
    std::mutex mutex;
    WarningSink sink = [](std::string_view msg) { std::cerr << "warning: " << msg << '\n'; };
};

inline WarningState& warning_state() {
    static WarningState state;
    return state;
}

} // namespace detail

inline void warn(std::string_view msg) {
    auto& st = detail::warning_state();
    std::lock_guard lock(st.mutex);
    if (st.sink) st.sink(msg);
}

inline WarningSink set_warning_sink(WarningSink sink) {
    auto& st = detail::warning_state();
    std::lock_guard lock(st.mutex);
    std::swap(st.sink, sink);
    return sink;
}

// Installs a sink for the lifetime of the guard and restores the previous one.
class ScopedWarningSink {
public:
    explicit ScopedWarningSink(WarningSink sink) : previous_(set_warning_sink(std::move(sink))) {}
    ~ScopedWarningSink() { set_warning_sink(std::move(previous_)); }
    ScopedWarningSink(const ScopedWarningSink&) = delete;
    ScopedWarningSink& operator=(const ScopedWarningSink&) = delete;

private:
    WarningSink previous_;
};

} // namespace csq
