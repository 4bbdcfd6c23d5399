#include "qpt/torus.hpp"

#include <cmath>
#include <limits>

#include "qpt/errors.hpp"

namespace qpt {

void TorusCircle::validate() const {
    if (!is_power_of_two(n()) || n() < min_modes || n() > max_modes)
        throw ConfigError("torus grid size must be a power of two in [32, 2^20]");
    for (const auto& v : grid)
        if (!v.allFinite()) throw ConfigError("torus grid contains non-finite values");
}

std::array<std::vector<Cplx>, 4> circle_spectrum(const std::vector<Vec4>& grid) {
    std::array<std::vector<Cplx>, 4> spec;
    std::vector<double> comp(grid.size());
    for (int c = 0; c < 4; ++c) {
        for (std::size_t j = 0; j < grid.size(); ++j) comp[j] = grid[j][c];
        spec[c] = to_fourier(comp);
    }
    return spec;
}

std::vector<Vec4> circle_from_spectrum(const std::array<std::vector<Cplx>, 4>& spec) {
    std::vector<Vec4> grid(spec[0].size());
    for (int c = 0; c < 4; ++c) {
        std::vector<double> comp = from_fourier(spec[c]);
        for (std::size_t j = 0; j < grid.size(); ++j) grid[j][c] = comp[j];
    }
    return grid;
}

std::vector<Vec4> shift_vector_grid(const std::vector<Vec4>& grid, double delta) {
    auto spec = circle_spectrum(grid);
    for (auto& s : spec) shift_spectrum(s, delta);
    return circle_from_spectrum(spec);
}

TorusCircle shift_circle(const TorusCircle& k, double delta) {
    TorusCircle out = k;
    out.grid = shift_vector_grid(k.grid, delta);
    return out;
}

std::vector<Mat4> shift_matrix_grid(const std::vector<Mat4>& grid, double delta) {
    const std::size_t n = grid.size();
    std::vector<Mat4> out(n);
    std::vector<double> comp(n);
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            for (std::size_t j = 0; j < n; ++j) comp[j] = grid[j](r, c);
            auto spec = to_fourier(comp);
            shift_spectrum(spec, delta);
            std::vector<double> shifted = from_fourier(spec);
            for (std::size_t j = 0; j < n; ++j) out[j](r, c) = shifted[j];
        }
    }
    return out;
}

std::vector<double> shift_scalar_grid(const std::vector<double>& grid, double delta) {
    auto spec = to_fourier(grid);
    shift_spectrum(spec, delta);
    return from_fourier(spec);
}

std::vector<Vec4> circle_derivative(const TorusCircle& k) {
    auto spec = circle_spectrum(k.grid);
    for (auto& s : spec) derivative_spectrum(s);
    return circle_from_spectrum(spec);
}

Vec4 evaluate_circle(const TorusCircle& k, double theta) {
    auto spec = circle_spectrum(k.grid);
    Vec4 v;
    for (int c = 0; c < 4; ++c) v[c] = evaluate_spectrum(spec[c], theta);
    return v;
}

double estimate_tail(const TorusCircle& k) {
    auto spec = circle_spectrum(k.grid);
    const int band_start = static_cast<int>(3 * k.n() / 8);  // top quarter of |k| <= N/2
    double band2 = 0.0, total2 = 0.0;
    for (const auto& s : spec) {
        BandNorms bn = band_norms(s, band_start);
        band2 += bn.band * bn.band;
        total2 += bn.total * bn.total;
    }
    return total2 > 0.0 ? std::sqrt(band2 / total2) : 0.0;
}

std::vector<Vec4> oversample_circle(const TorusCircle& k, std::size_t factor) {
    auto spec = circle_spectrum(k.grid);
    std::array<std::vector<Cplx>, 4> big;
    for (int c = 0; c < 4; ++c) big[c] = resize_spectrum(spec[c], k.n() * factor);
    return circle_from_spectrum(big);
}

namespace {

std::vector<double> resize_scalar_grid(const std::vector<double>& grid, std::size_t new_n) {
    return from_fourier(resize_spectrum(to_fourier(grid), new_n));
}

}  // namespace

void refine_resolution(TorusCircle& k, BundleSet& b, std::size_t max_n) {
    const std::size_t n = k.n();
    const std::size_t new_n = 2 * n;
    if (new_n > max_n)
        throw ResolutionExhausted("refinement beyond " + std::to_string(max_n) + " modes");

    k.grid = oversample_circle(k, 2);

    std::vector<Mat4> p(new_n);
    std::vector<double> comp(n);
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            for (std::size_t j = 0; j < n; ++j) comp[j] = b.p[j](r, c);
            std::vector<double> big = resize_scalar_grid(comp, new_n);
            for (std::size_t j = 0; j < new_n; ++j) p[j](r, c) = big[j];
        }
    }
    b.p = std::move(p);
    b.shear = resize_scalar_grid(b.shear, new_n);
}

bool antialias_circle(TorusCircle& k, double threshold) {
    auto spec = circle_spectrum(k.grid);
    const int band_start = static_cast<int>(k.n() / 3);
    double band2 = 0.0, total2 = 0.0;
    for (const auto& s : spec) {
        BandNorms bn = band_norms(s, band_start);
        band2 += bn.band * bn.band;
        total2 += bn.total * bn.total;
    }
    if (total2 == 0.0 || std::sqrt(band2 / total2) <= threshold) return false;
    for (auto& s : spec) zero_band(s, band_start);
    k.grid = circle_from_spectrum(spec);
    return true;
}

void rebalance_bundle(BundleSet& b) {
    const std::size_t n = b.n();
    for (int col = 1; col <= 3; ++col) {
        double acc = 0.0;
        for (const auto& m : b.p) acc += m.col(col).norm();
        const double mean = acc / double(n);
        if (mean <= 0.0) continue;
        for (auto& m : b.p) m.col(col) /= mean;
        if (col == 1)
            for (auto& t : b.shear) t /= mean;
    }
}

double min_su_angle(const BundleSet& b) {
    double min_angle = std::numbers::pi;
    for (const auto& p : b.p) {
        const Vec4 s = p.col(2);
        const Vec4 u = p.col(3);
        const double c = std::abs(s.dot(u)) / (s.norm() * u.norm());
        const double angle = std::acos(std::min(1.0, c));
        min_angle = std::min(min_angle, angle);
    }
    return min_angle;
}

double min_bundle_det(const BundleSet& b) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& p : b.p) m = std::min(m, std::abs(p.determinant()));
    return m;
}

double min_center_divisor(double omega, std::size_t n) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= n / 2; ++k) {
        const double d = 2.0 * std::abs(std::sin(0.5 * static_cast<double>(k) * omega));
        m = std::min(m, d);
    }
    return m;
}

}  // namespace qpt
