#pragma once

#include <array>
#include <string>
#include <vector>

#include "qpt/fourier.hpp"
#include "qpt/params.hpp"
#include "qpt/types.hpp"

namespace qpt {

inline constexpr std::size_t min_modes = 32;
inline constexpr std::size_t max_modes = std::size_t(1) << 20;
inline constexpr double default_tail_tol = 1e-9;

struct TorusMeta {
    int res_m = 0;          // resonance label m:n
    int res_n = 0;
    std::string lineage;    // free-form provenance
};

/// Map-invariant circle sampled on the uniform angle grid theta_j = 2*pi*j/N.
struct TorusCircle {
    double omega = 0.0;     // rotation number per map iterate
    Frame frame = Frame::m1m2;
    double mu_p = 0.0;      // perturbing mass ratio the circle was solved at
    std::vector<Vec4> grid; // K(theta_j)
    TorusMeta meta;

    std::size_t n() const { return grid.size(); }
    void validate() const;
};

/// Frames of tangent / conjugate-center / stable / unstable directions plus
/// the reduced transfer data: constant multipliers and the center shear.
struct BundleSet {
    std::vector<Mat4> p;        // P(theta_j), columns in the order above
    std::vector<double> shear;  // T(theta_j)
    double lambda_s = 0.0;
    double lambda_u = 0.0;

    std::size_t n() const { return p.size(); }
};

// Spectral views of grids (per-component coefficient arrays).
std::array<std::vector<Cplx>, 4> circle_spectrum(const std::vector<Vec4>& grid);
std::vector<Vec4> circle_from_spectrum(const std::array<std::vector<Cplx>, 4>& spec);

/// K(theta + delta), exact for band-limited grids.
TorusCircle shift_circle(const TorusCircle& k, double delta);
std::vector<Vec4> shift_vector_grid(const std::vector<Vec4>& grid, double delta);
std::vector<Mat4> shift_matrix_grid(const std::vector<Mat4>& grid, double delta);
std::vector<double> shift_scalar_grid(const std::vector<double>& grid, double delta);

/// Spectral dK/dtheta on the grid.
std::vector<Vec4> circle_derivative(const TorusCircle& k);

/// Trigonometric interpolation of K at an arbitrary angle.
Vec4 evaluate_circle(const TorusCircle& k, double theta);

/// Relative l2 mass of the top-quarter frequency band (doubling trigger).
double estimate_tail(const TorusCircle& k);

/// Grid values at factor*N uniform angles via zero padding.
std::vector<Vec4> oversample_circle(const TorusCircle& k, std::size_t factor);

/// Double the grid resolution of a circle (and its bundle) by zero padding.
/// Throws ResolutionExhausted past max allowed modes.
void refine_resolution(TorusCircle& k, BundleSet& b, std::size_t max_n = max_modes);

/// Zero the top one-third frequency band of K if it carries more than
/// `threshold` of the total l2 mass. Returns true when filtering happened.
bool antialias_circle(TorusCircle& k, double threshold = 1e-3);

/// Constant rescale of the non-tangent columns to unit mean norm; a pure
/// gauge (multipliers unchanged, shear rescaled with the conjugate column)
/// that keeps the frame well conditioned along a continuation.
void rebalance_bundle(BundleSet& b);

/// Minimum over the grid of the (unsigned) angle between the stable and
/// unstable columns, in radians.
double min_su_angle(const BundleSet& b);

/// Minimum over the grid of |det P|.
double min_bundle_det(const BundleSet& b);

/// Smallest center divisor min_{1<=|k|<=N/2} |1 - e^{ik omega}|.
double min_center_divisor(double omega, std::size_t n);

}  // namespace qpt
