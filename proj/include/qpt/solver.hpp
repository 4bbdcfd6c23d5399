#pragma once

#include "qpt/cohomology.hpp"
#include "qpt/flow.hpp"
#include "qpt/torus.hpp"

namespace qpt {

struct NewtonReport {
    double residual_k = 0.0;   // sup_theta |F(K(theta)) - K(theta+omega)|
    double residual_p = 0.0;   // sup_theta |DF(K)P - (P o shift) Lambda|_F
    int iterations = 0;
    double min_su_angle = 0.0;
    double min_divisor = 0.0;  // min_k |1 - e^{ik omega}| over the grid band
    bool filtered = false;     // anti-alias filter fired during correction
    double eta2_average = 0.0; // center solvability defect of the last solve
    double lambda_product_drift = 0.0;  // |lambda_s * lambda_u - 1|
};

struct NewtonOptions {
    double tol = 1e-7;
    int max_iter = 20;
    double divisor_floor = 1e-8;
    double angle_floor = 1e-4;       // radians
    double twist_floor = 1e-10;
    double det_floor = 1e-10;
    double antialias_threshold = 1e-3;
    double center_reg = 0.05;        // Tikhonov floor for the unit-multiplier rows
    double blowup = 1e3;             // residual considered hopeless
    PropagationOptions prop;

    CohomologyOptions cohomology() const {
        CohomologyOptions c;
        c.divisor_floor = divisor_floor;
        c.twist_floor = twist_floor;
        return c;
    }
};

struct InvarianceError {
    std::vector<Vec4> e;    // F(K(theta_j)) - K(theta_j + omega)
    double residual;        // sup norm over the grid
};
InvarianceError invariance_error(const TorusCircle& k, const SystemParams& p,
                                 const PropagationOptions& opts = {});

/// Correct (K, P, Lambda) in place until the invariance residual reaches tol
/// and the reduced-transfer defect reaches 10*tol. Each iterate evaluates the
/// map and its Jacobian once per grid point, settles the bundle against that
/// Jacobian by repeated linearized passes, then corrects K through the
/// settled frame. Throws Diverged / NoConvergence / SmallDivisor /
/// TwistDegenerate / BundleDegenerate on structured failure.
NewtonReport newton_correct(TorusCircle& k, BundleSet& b, const SystemParams& p,
                            const NewtonOptions& opts = {});

/// One linearized correction pass of the bundle columns, multipliers, and
/// shear from the projected transfer matrices q_j = P(theta_j + omega)^{-1}
/// DF(K(theta_j)) P(theta_j); the tangent column is reset to the spectral
/// derivative of K.
void refresh_bundle_once(const TorusCircle& k, BundleSet& b, const std::vector<Mat4>& q,
                         const NewtonOptions& opts);

/// First-order parameter predictor for a mass-ratio step (omega fixed): the
/// returned circle is K + delta * dK/dmu with dK/dmu computed through the
/// bundle frame; metadata keeps the source mu_p (the caller moves it).
TorusCircle lindstedt_predict_mass(const TorusCircle& k, const BundleSet& b,
                                   const SystemParams& p, double delta,
                                   const NewtonOptions& opts = {});

/// Rotation-number predictor (masses fixed): K + delta * dK/domega, with the
/// returned circle's omega advanced by delta.
TorusCircle lindstedt_predict_omega(const TorusCircle& k, const BundleSet& b,
                                    const SystemParams& p, double delta,
                                    const NewtonOptions& opts = {});

struct TransformedTorus {
    TorusCircle k;
    BundleSet b;
    SystemParams params;
};

/// Carry a complete (K, P, Lambda) solution to the other rotating frame at
/// the aligned map phase: K pointwise through the frame map, P through its
/// constant Jacobian, multipliers and shear unchanged, rotation number
/// unchanged (the per-iterate angle is unit-free).
TransformedTorus transform_torus(const TorusCircle& k, const BundleSet& b,
                                 const SystemParams& p);

}  // namespace qpt
