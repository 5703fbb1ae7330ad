// audit.hpp: process-wide observer of every density matrix and Liouvillian constructed

#pragma once

#include <atomic>

namespace csq {

class DensityMatrix;
class Liouvillian;

// Installed observers are called from whichever thread constructs the
// object, so implementations must be thread-safe.
class ConstructionAuditor {
public:
    virtual ~ConstructionAuditor() = default;
    virtual void on_state(const DensityMatrix&) {}
    virtual void on_liouvillian(const Liouvillian&) {}
};

namespace detail {

inline std::atomic<ConstructionAuditor*>& auditor_slot() {
    static std::atomic<ConstructionAuditor*> slot{nullptr};
    return slot;
}

} // namespace detail

inline ConstructionAuditor* set_auditor(ConstructionAuditor* a) { return detail::auditor_slot().exchange(a); }

class ScopedAuditor {
public:
    explicit ScopedAuditor(ConstructionAuditor& a) : previous_(set_auditor(&a)) {}
    ~ScopedAuditor() { set_auditor(previous_); }
    ScopedAuditor(const ScopedAuditor&) = delete;
    ScopedAuditor& operator=(const ScopedAuditor&) = delete;

private:
    ConstructionAuditor* previous_;
};

} // namespace csq
