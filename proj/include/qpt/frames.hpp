#pragma once

#include "qpt/params.hpp"
#include "qpt/types.hpp"

namespace qpt {

/// m1m2-unit quantities needed by the frame change, derivable from either
/// frame's SystemParams.
struct FrameLink {
    double mu;       // m2/(m1+m2)
    double mu_bar;   // m3/(m1+m3)
    double r13;      // m1-m3 separation in m1m2 length units
    double omega3;   // m3 angular rate in m1m2 time units
};

FrameLink frame_link(const SystemParams& p);

/// Take an m1m2-frame state to the m1m3 frame when m3 sits at phase theta3:
/// shift to m1, rotate by -theta3, rescale length/time, shift to the m1-m3
/// barycenter. Affine in the state.
State phi_transform(const State& s, double theta3, const SystemParams& p);

/// Exact inverse of phi_transform.
State phi_inverse(const State& s, double theta3, const SystemParams& p);

/// Constant (state-independent) Jacobian of phi_transform.
Mat4 dphi(double theta3, const SystemParams& p);

/// Jacobian of phi_inverse.
Mat4 dphi_inverse(double theta3, const SystemParams& p);

}  // namespace qpt
