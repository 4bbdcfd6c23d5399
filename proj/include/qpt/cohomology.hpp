#pragma once

#include <limits>
#include <vector>

#include "qpt/fourier.hpp"

namespace qpt {

struct CohomologyOptions {
    double divisor_floor = 1e-8;
    // modes whose coefficient is below `negligible` times the spectrum peak
    // are dropped instead of raising SmallDivisor
    double negligible = 1e-12;
    double twist_floor = 1e-10;
    // per-mode trust bound on |xi_k|; keeps near-resonant modes from being
    // amplified past the linear range of the caller's iteration
    double max_component = std::numeric_limits<double>::infinity();
    // Tikhonov parameter for near-resonant divisors: modes with |d| < 10*reg
    // are solved as eta_k * conj(d)/(|d|^2 + reg^2), capping the gain at
    // 1/(2 reg) while genuine content still converges across iterations
    double regularization = 0.0;
    // when positive, modes with |k| > band_limit are dropped from the
    // right-hand side before solving
    int band_limit = 0;
};

struct CohomologyResult {
    std::vector<double> xi;
    double rhs_average = 0.0;   // average of eta (reported for resonant modes)
    double min_divisor = 0.0;   // smallest divisor among retained modes
};

/// Solve a*xi(theta) - b*xi(theta+omega) = eta(theta) spectrally:
/// xi_k = eta_k / (a - b e^{ik omega}).
/// When a == b the k = 0 divisor vanishes: the zero-average solution is
/// returned and avg(eta) is reported instead of being divided through.
/// Throws SmallDivisor when a retained mode's divisor is below the floor.
CohomologyResult cohomology_solve_general(double a, double b, double omega,
                                          const std::vector<double>& eta,
                                          const CohomologyOptions& opt = {});

/// The classical form lambda*xi(theta) - xi(theta+omega) = eta(theta).
inline CohomologyResult cohomology_solve(double lambda, double omega,
                                         const std::vector<double>& eta,
                                         const CohomologyOptions& opt = {}) {
    return cohomology_solve_general(lambda, 1.0, omega, eta, opt);
}

struct CenterSolveResult {
    std::vector<double> xi1;   // tangent component (zero average: phase condition)
    std::vector<double> xi2;   // conjugate-center component (average set by twist)
    double eta2_average = 0.0; // solvability defect of the second equation
    double min_divisor = 0.0;
};

/// Coupled unipotent center block:
///   xi1(theta) - xi1(theta+omega) + T(theta) xi2(theta) = eta1(theta)
///   xi2(theta) - xi2(theta+omega)                       = eta2(theta)
/// The free average of xi2 is chosen to cancel the average of the first
/// equation's right side; avg(xi1) = 0 pins the phase origin. avg(eta2) is
/// reported, never silently absorbed.
CenterSolveResult solve_center_block(double omega, const std::vector<double>& eta1,
                                     const std::vector<double>& eta2,
                                     const std::vector<double>& shear,
                                     const CohomologyOptions& opt = {});

}  // namespace qpt
