#pragma once

#include <optional>
#include <vector>

#include "qpt/dop853.hpp"
#include "qpt/dynamics.hpp"
#include "qpt/params.hpp"
#include "qpt/types.hpp"

namespace qpt {

struct PropagationOptions {
    double rel_tol = 1e-12;
    double abs_tol = 1e-12;
    std::int64_t max_steps = 4'000'000;
    double collision_floor = default_collision_floor;
    bool with_stm = false;   // carry the 4x4 state-transition matrix
    bool with_mass = false;  // carry d(state)/d(mu_p) from w(0) = 0

    IntegrateOptions integrate_options() const {
        return IntegrateOptions{rel_tol, abs_tol, max_steps, collision_floor};
    }
};

struct PropagationResult {
    ExtendedState final_state;
    std::optional<Mat4> stm;
    std::optional<Vec4> dstate_dmu;
    IntegrateStats stats;
};

/// Propagate the equations of motion for time dt (optionally jointly with the
/// variational and mass-sensitivity systems; shared step control keeps them
/// consistent with the state).
PropagationResult propagate(const ExtendedState& s0, double dt, const SystemParams& p,
                            const PropagationOptions& opts = {});

/// The stroboscopic map: propagation over one period of the perturbation,
/// based at phase theta_p = 0. The phase returns to 0 (mod 2*pi) exactly.
State stroboscopic_map(const State& s, const SystemParams& p, const PropagationOptions& opts = {});

struct MapJacobian {
    State state;
    Mat4 df;
};
MapJacobian stroboscopic_jacobian(const State& s, const SystemParams& p,
                                  PropagationOptions opts = {});

/// d(stroboscopic map)/d(mu_p) at fixed omega of the perturbing moon.
Vec4 stroboscopic_mass_derivative(const State& s, const SystemParams& p,
                                  PropagationOptions opts = {});

/// Batch evaluation of the map (with optional Jacobian / mass sensitivity) at
/// many points; runs grid points concurrently.
struct MapBatchResult {
    std::vector<Vec4> f;
    std::vector<Mat4> df;      // filled iff with_stm
    std::vector<Vec4> dfdmu;   // filled iff with_mass
};
MapBatchResult stroboscopic_map_batch(const std::vector<Vec4>& points, const SystemParams& p,
                                      const PropagationOptions& opts);

}  // namespace qpt
