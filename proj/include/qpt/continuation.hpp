#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qpt/solver.hpp"

namespace qpt {

enum class RunStatus { converged, diverged, singularity, resonance_gap };
const char* run_status_name(RunStatus s);

struct StepEntry {
    double param = 0.0;   // perturbing mass ratio or rotation number
    TorusCircle k;
    BundleSet b;
    NewtonReport report;
    double closest_own = 0.0;   // circle-to-moon distances, frame units
    double closest_pert = 0.0;
};

struct GapInterval {
    double lo = 0.0, hi = 0.0;  // last converged omega before / first after
    int p = 0, q = 0;           // nearest low-order rational of omega/2pi
    double min_divisor = 0.0;
};

struct ContinuationRun {
    std::string parameter;  // "mu3" | "mu2_bar" | "omega"
    double step = 0.0;
    std::vector<StepEntry> history;
    RunStatus status = RunStatus::converged;
    std::string message;
    std::vector<GapInterval> gaps;
    std::size_t max_modes_used = 0;
};

struct ContinuationOptions {
    double step = 0.0;             // unsigned magnitude; direction from target
    double tail_tol = default_tail_tol;
    std::size_t max_n = 8192;      // practical refinement cap (hard cap 2^20)
    int max_halvings = 6;
    bool collision_precheck = true;
    bool detect_gaps = false;      // omega sweeps: jump and record instead of failing
    int gap_scan_limit = 60;       // multiples of step to scan past a stall
    NewtonOptions newton;
    // invoked after every accepted step with the run so far
    std::function<void(const ContinuationRun&)> on_step;
};

/// March the perturbing mass ratio from the seed's value to target_mu with a
/// first-order predictor and the quasi-Newton corrector; fixed natural step
/// with halving on failure and tail-triggered resolution doubling.
ContinuationRun continue_in_mass(const TorusCircle& seed, const BundleSet& seed_b,
                                 const SystemParams& params, double target_mu,
                                 const ContinuationOptions& opts);

/// March the rotation number at fixed masses; optionally records resonance
/// gaps (clusters of breakdown bounded by converged tori) instead of failing.
ContinuationRun continue_in_omega(const TorusCircle& seed, const BundleSet& seed_b,
                                  const SystemParams& params, double target_omega,
                                  const ContinuationOptions& opts);

/// Best rational approximation p/q of x with q <= q_max (continued fractions).
struct Rational {
    int p = 0, q = 1;
};
Rational nearest_rational(double x, int q_max);

}  // namespace qpt
