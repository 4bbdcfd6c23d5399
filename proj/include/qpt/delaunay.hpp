#pragma once

#include <vector>

#include "qpt/params.hpp"
#include "qpt/types.hpp"

namespace qpt {

/// Synodic Delaunay variables of the rotating-frame two-body problem about
/// m1: actions L = sqrt(Gm1 a), G = L sqrt(1-e^2), mean anomaly ell, and
/// longitude of periapse g measured from the rotating x-axis.
struct DelaunayState {
    double l = 0.0;      // L
    double g_action = 0.0;  // G (signed, prograde positive)
    double ell = 0.0;    // mean anomaly in [0, 2pi)
    double g = 0.0;      // periapse longitude in [0, 2pi)
    bool near_circular = false;  // e below threshold; g set to 0
};

/// Osculating m1-centered elements of a rotating-frame state. Throws
/// HyperbolicState for nonnegative two-body energy.
DelaunayState state_to_delaunay(const State& s, const SystemParams& p);

enum class TorusTopology { kam_like, secondary, indeterminate };
const char* torus_topology_name(TorusTopology t);

struct TopologyReport {
    double action_spread_l = 0.0;   // (max-min) of L
    double action_spread_g = 0.0;   // (max-min) of G
    double coverage_fraction = 0.0; // fraction of (ell, g) bins visited
    TorusTopology classification = TorusTopology::indeterminate;
};

struct TopologyOptions {
    int bins = 64;
    double coverage_kam = 0.99;
    double coverage_secondary = 0.90;
    double action_threshold = 0.05;  // fraction of mean L
    std::size_t min_samples = 10000;
};

/// Classify a sampled flow-invariant torus from the angle coverage of
/// (ell, g) and the spread of the actions.
TopologyReport torus_topology(const std::vector<DelaunayState>& samples,
                              const TopologyOptions& opt = {});

}  // namespace qpt
