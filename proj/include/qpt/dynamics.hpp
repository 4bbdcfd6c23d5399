#pragma once

#include "qpt/params.hpp"
#include "qpt/types.hpp"

namespace qpt {

inline constexpr double default_collision_floor = 1e-12;

/// Position of the perturbing moon at phase angle theta, in the frame's own
/// synodic coordinates.
struct MoonPosition {
    double x, y;
};
MoonPosition moon_position(double theta, const SystemParams& p);

struct FieldDerivative {
    State sdot;
    double theta_p_dot;
};

/// Combined evaluation sharing the distance computations. Any of a/dfdmu may
/// be null. Throws CollisionSingularity when a body distance drops below
/// floor. The two synodic frames share one algebraic form, so this is the
/// single implementation behind both sets of equations of motion.
void eval_field(const State& s, double theta_p, const SystemParams& p, double floor, Vec4* f,
                Mat4* a, Vec4* dfdmu);

/// Equations of motion plus the constant phase rate d(theta_p)/dt.
FieldDerivative vector_field(const ExtendedState& es, const SystemParams& p,
                             double floor = default_collision_floor);

/// Time-periodic Hamiltonian in position-momentum variables.
double hamiltonian(const ExtendedState& es, const SystemParams& p,
                   double floor = default_collision_floor);

/// Jacobi constant C = -2H (exact relation at zero perturbing mass).
double jacobi_constant(const State& s, const SystemParams& p,
                       double floor = default_collision_floor);

/// First-order variational flow: dPhi/dt = A(s) Phi.
Mat4 variational_field(const ExtendedState& es, const Mat4& phi, const SystemParams& p,
                       double floor = default_collision_floor);

/// State Jacobian A of the vector field.
Mat4 state_jacobian(const ExtendedState& es, const SystemParams& p,
                    double floor = default_collision_floor);

/// Sensitivity flow for the perturbing-mass parameter:
/// dw/dt = A(s) w + df/dmu_p, including the Kepler radius dependence of the
/// perturbing moon's orbit on its mass (rate held fixed).
Vec4 mass_variational_field(const ExtendedState& es, const Vec4& w, const SystemParams& p,
                            double floor = default_collision_floor);

/// Analytic df/dmu_p alone.
Vec4 mass_partial(const ExtendedState& es, const SystemParams& p,
                  double floor = default_collision_floor);

}  // namespace qpt
