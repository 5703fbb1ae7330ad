// frame_check.hpp: numerical equivalence of the interaction and displaced frames

#pragma once

#include "csq/dynamics.hpp"

namespace csq {

struct FrameReport {
    double trace_distance;
    DensityMatrix interaction_state;
    DensityMatrix displaced_back_state;  // D(α) ρ̃ D(α)†, α = Ω/g
};

inline FrameReport frame_consistency_check(const SystemParams& p) {
    p.validate();
    const DensityMatrix rho_i = steady_state(liouvillian(p, Frame::interaction));
    const DensityMatrix rho_d = steady_state(liouvillian(p, Frame::displaced));
    const Operator d = displacement(p.space(), p.alpha());
    Matrix back = d.matrix() * rho_d.matrix() * d.matrix().adjoint();
    back /= back.trace();
    DensityMatrix rho_b(p.space(), std::move(back));
    const double dist = trace_distance(rho_i, rho_b);
    return {dist, rho_i, std::move(rho_b)};
}

} // namespace csq
