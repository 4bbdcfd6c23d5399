#include <doctest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "qpt/fourier.hpp"
#include "qpt/torus.hpp"

using namespace qpt;

namespace {

std::vector<double> random_grid(std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> g(n);
    for (auto& v : g) v = dist(rng);
    return g;
}

// band-limited random function with spectrum decay, as a smooth test subject
std::vector<double> smooth_grid(std::size_t n, int kmax, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> g(n, 0.0);
    for (int k = 0; k <= kmax; ++k) {
        const double a = dist(rng) / (1.0 + k * k);
        const double b = dist(rng) / (1.0 + k * k);
        for (std::size_t j = 0; j < n; ++j) {
            const double th = two_pi * double(j) / double(n);
            g[j] += a * std::cos(k * th) + b * std::sin(k * th);
        }
    }
    return g;
}

}  // namespace

TEST_CASE("constant grid transforms to a single mode") {
    std::vector<double> g(64, 2.5);
    auto c = to_fourier(g);
    CHECK(std::abs(c[0] - Cplx(2.5, 0.0)) < 1e-14);
    for (std::size_t j = 1; j < c.size(); ++j) CHECK(std::abs(c[j]) < 1e-14);
}

TEST_CASE("cos(3 theta) lands on modes +-3 with coefficient 1/2") {
    const std::size_t n = 64;
    std::vector<double> g(n);
    for (std::size_t j = 0; j < n; ++j) g[j] = std::cos(3.0 * two_pi * double(j) / double(n));
    auto c = to_fourier(g);
    CHECK(std::abs(c[3] - Cplx(0.5, 0.0)) < 1e-14);
    CHECK(std::abs(c[n - 3] - Cplx(0.5, 0.0)) < 1e-14);
    for (std::size_t j = 0; j < n; ++j)
        if (j != 3 && j != n - 3) CHECK(std::abs(c[j]) < 1e-13);
}

TEST_CASE("random real grid round trips to 1e-13") {
    auto g = random_grid(256, 17);
    auto back = from_fourier(to_fourier(g));
    for (std::size_t j = 0; j < g.size(); ++j) CHECK(std::abs(back[j] - g[j]) < 1e-13);
}

TEST_CASE("rejects non power-of-two lengths") {
    std::vector<double> g(100, 0.0);
    CHECK_THROWS(to_fourier(g));
}

TEST_CASE("Parseval: grid and coefficient norms agree") {
    auto g = random_grid(512, 3);
    auto c = to_fourier(g);
    double grid2 = 0.0, coeff2 = 0.0;
    for (double v : g) grid2 += v * v;
    for (const auto& v : c) coeff2 += std::norm(v);
    CHECK(std::abs(grid2 / double(g.size()) - coeff2) < 1e-12 * std::max(1.0, coeff2));
}

TEST_CASE("shift by a grid spacing is a cyclic index shift") {
    auto g = smooth_grid(128, 40, 5);
    auto c = to_fourier(g);
    shift_spectrum(c, two_pi / 128.0);
    auto shifted = from_fourier(c);
    for (std::size_t j = 0; j < g.size(); ++j)
        CHECK(std::abs(shifted[j] - g[(j + 1) % g.size()]) < 1e-13);
}

TEST_CASE("shift composes to identity and preserves the grid norm") {
    auto g = smooth_grid(128, 30, 11);
    auto c = to_fourier(g);
    const double a = 1.2345;
    shift_spectrum(c, a);
    double norm_after = 0.0;
    for (const auto& v : c) norm_after += std::norm(v);
    shift_spectrum(c, -a);
    auto back = from_fourier(c);
    for (std::size_t j = 0; j < g.size(); ++j) CHECK(std::abs(back[j] - g[j]) < 1e-13);

    auto c0 = to_fourier(g);
    double norm_before = 0.0;
    for (const auto& v : c0) norm_before += std::norm(v);
    CHECK(std::abs(norm_before - norm_after) < 1e-12 * std::max(1.0, norm_before));
}

TEST_CASE("spectral derivative of sin is cos") {
    const std::size_t n = 64;
    std::vector<double> g(n);
    for (std::size_t j = 0; j < n; ++j) g[j] = std::sin(two_pi * double(j) / double(n));
    auto c = to_fourier(g);
    derivative_spectrum(c);
    auto d = from_fourier(c);
    for (std::size_t j = 0; j < n; ++j)
        CHECK(std::abs(d[j] - std::cos(two_pi * double(j) / double(n))) < 1e-12);
}

TEST_CASE("spectral derivative matches 4th-order finite differences") {
    // geometric spectral decay keeps the finite-difference truncation error
    // below the 1e-8 comparison threshold at this grid size
    const std::size_t n = 1024;
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> g(n, 0.0);
    for (int k = 1; k <= 20; ++k) {
        const double a = dist(rng) * std::pow(1.0 / 3.0, k);
        const double b = dist(rng) * std::pow(1.0 / 3.0, k);
        for (std::size_t j = 0; j < n; ++j) {
            const double th = two_pi * double(j) / double(n);
            g[j] += a * std::cos(k * th) + b * std::sin(k * th);
        }
    }
    auto c = to_fourier(g);
    derivative_spectrum(c);
    auto d = from_fourier(c);
    const double h = two_pi / double(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double fd = (-g[(j + 2) % n] + 8.0 * g[(j + 1) % n] - 8.0 * g[(j + n - 1) % n] +
                           g[(j + n - 2) % n]) /
                          (12.0 * h);
        CHECK(std::abs(d[j] - fd) < 1e-8 * std::max(1.0, std::abs(fd)));
    }
}

TEST_CASE("interpolation: grid-point exactness and direct-series match") {
    const std::size_t n = 64;
    auto g = smooth_grid(n, 12, 31);
    auto c = to_fourier(g);
    CHECK(std::abs(evaluate_spectrum(c, two_pi * 5.0 / double(n)) - g[5]) < 1e-12);

    // half-way points of a cosine are exactly interpolated
    std::vector<double> cosg(n);
    for (std::size_t j = 0; j < n; ++j) cosg[j] = std::cos(two_pi * double(j) / double(n));
    auto cc = to_fourier(cosg);
    const double mid = two_pi * (5.5 / double(n));
    CHECK(std::abs(evaluate_spectrum(cc, mid) - std::cos(mid)) < 1e-12);
}

TEST_CASE("zero-padding reproduces a band-limited function on the old grid") {
    const std::size_t n = 64;
    auto g = smooth_grid(n, 10, 41);
    auto big = resize_spectrum(to_fourier(g), 2 * n);
    auto fine = from_fourier(big);
    for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(fine[2 * j] - g[j]) < 1e-13);
}

TEST_CASE("tail estimate: zero for low-order content, decreasing under doubling") {
    TorusCircle k;
    k.omega = 1.0;
    const std::size_t n = 64;
    k.grid.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double th = two_pi * double(j) / double(n);
        k.grid[j] = Vec4(std::cos(3.0 * th), 0.0, 0.0, 0.0);
    }
    CHECK(estimate_tail(k) < 1e-14);

    // analytic full-spectrum function: the tail falls as the grid refines
    // (sharp enough that the coarse grids stay above the rounding floor)
    auto make = [](std::size_t nn) {
        TorusCircle t;
        t.omega = 1.0;
        t.grid.resize(nn);
        for (std::size_t j = 0; j < nn; ++j) {
            const double th = two_pi * double(j) / double(nn);
            t.grid[j] = Vec4(std::exp(10.0 * std::cos(th)) * 1e-4, 0.0, 0.0, 0.0);
        }
        return t;
    };
    const double t32 = estimate_tail(make(32));
    const double t64 = estimate_tail(make(64));
    const double t128 = estimate_tail(make(128));
    CHECK(t64 < t32);
    CHECK(t128 < t64);
}

TEST_CASE("torus ops scale no worse than N log N") {
    // amortized timing ratio between N and 2N stays under 2.5 per element,
    // i.e. under 5.0 for the doubled grid
    auto time_shift = [](std::size_t n) {
        TorusCircle k;
        k.omega = 1.0;
        k.grid.assign(n, Vec4(1.0, 0.5, -0.25, 0.125));
        for (std::size_t j = 0; j < n; ++j)
            k.grid[j][0] = std::cos(two_pi * double(j) / double(n));
        const auto t0 = std::chrono::steady_clock::now();
        const int reps = 20;
        for (int r = 0; r < reps; ++r) {
            auto s = shift_vector_grid(k.grid, 0.7);
            k.grid[0][1] += s[0][1] * 1e-300;  // defeat dead-code elimination
        }
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    const std::size_t n = 4096;
    double best_ratio = 1e9;
    for (int trial = 0; trial < 3; ++trial) {
        const double t1 = time_shift(n);
        const double t2 = time_shift(2 * n);
        best_ratio = std::min(best_ratio, t2 / t1);
    }
    CHECK(best_ratio < 5.0);
}
