#pragma once

#include <optional>
#include <vector>

#include "qpt/flow.hpp"
#include "qpt/params.hpp"
#include "qpt/torus.hpp"

namespace qpt {

/// Unstable resonant periodic orbit of the unperturbed (single-moon) problem,
/// anchored at its negative-x-axis perpendicular crossing.
struct PeriodicOrbit {
    State initial;
    double period = 0.0;
    double jacobi = 0.0;
    int m = 0, n = 0;          // spacecraft:moon revolution ratio
    double mu = 0.0;           // the frame's primary-pair mass ratio
    Frame frame = Frame::m1m2;
    Mat4 monodromy = Mat4::Identity();
    double lambda_u = 0.0, lambda_s = 0.0;  // per orbit period
    double residual = 0.0;     // |flow_T(x0) - x0|
};

struct SeedTarget {
    enum class Kind { jacobi, period };
    Kind kind = Kind::jacobi;
    double value = 0.0;

    static SeedTarget jacobi(double c) { return {Kind::jacobi, c}; }
    static SeedTarget period(double t) { return {Kind::period, t}; }
};

/// Differential correction of an m:n resonant orbit using the
/// perpendicular-crossing symmetry: shoot from (x0, 0, 0, py0) to the half
/// period crossing, drive px there to zero together with the target
/// constraint. The default guess is the Kepler ellipse of the resonance with
/// its apoapsis on the negative x-axis.
PeriodicOrbit find_resonant_po(int m, int n, SeedTarget target, const SystemParams& params,
                               const PropagationOptions& opts = {},
                               std::optional<State> guess = {});

/// Sampled m1-centered radius range of the orbit trace (dense sampling).
struct RadialRange {
    double r_min, r_max;
};
RadialRange orbit_radial_range(const PeriodicOrbit& po, const SystemParams& params,
                               std::size_t samples = 4096,
                               const PropagationOptions& opts = {});

struct FamilyEntry {
    PeriodicOrbit po;
    RadialRange radial;
    bool crosses_perturber_radius = false;
};

/// Natural continuation of the orbit family in the Jacobi constant; each
/// member is classified by whether its trace crosses the perturbing moon's
/// orbit radius (the collision-risk criterion for the perturbed problem).
std::vector<FamilyEntry> po_family_sweep(int m, int n, double jacobi_from, double jacobi_to,
                                         int steps, const SystemParams& params,
                                         const PropagationOptions& opts = {});

/// A periodic orbit is an invariant circle of the map at zero perturbing
/// mass: sample it at N phases and build the frame bundle from transported
/// monodromy eigenvectors, the exact tangent, and the symplectic-conjugate
/// center direction; multipliers are rescaled to the map period.
struct SeedCircle {
    TorusCircle k;
    BundleSet b;
};
SeedCircle po_to_circle(const PeriodicOrbit& po, const SystemParams& params, std::size_t n_modes,
                        const PropagationOptions& opts = {});

/// Rotating-frame winding number of the orbit about m1 over one period,
/// in turns (exactly m - n for an m:n resonant orbit).
double rotating_winding(const PeriodicOrbit& po, const SystemParams& params,
                        const PropagationOptions& opts = {});

}  // namespace qpt
