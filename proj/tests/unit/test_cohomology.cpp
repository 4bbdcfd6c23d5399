#include <doctest.h>

#include <cmath>
#include <random>

#include "qpt/cohomology.hpp"
#include "qpt/errors.hpp"
#include "qpt/types.hpp"

using namespace qpt;

namespace {

// direct check of a*xi(theta) - b*xi(theta+omega) = eta(theta) by trig
// interpolation of xi at shifted points
double substitution_residual(double a, double b, double omega, const std::vector<double>& xi,
                             const std::vector<double>& eta) {
    const std::size_t n = xi.size();
    auto c = to_fourier(xi);
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double th = two_pi * double(j) / double(n);
        const double shifted = evaluate_spectrum(c, th + omega);
        worst = std::max(worst, std::abs(a * xi[j] - b * shifted - eta[j]));
    }
    return worst;
}

std::vector<double> band_limited(std::size_t n, int kmax, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> g(n, 0.0);
    for (int k = 1; k <= kmax; ++k) {
        const double a = dist(rng) / (1.0 + k);
        const double b = dist(rng) / (1.0 + k);
        for (std::size_t j = 0; j < n; ++j) {
            const double th = two_pi * double(j) / double(n);
            g[j] += a * std::cos(k * th) + b * std::sin(k * th);
        }
    }
    return g;
}

}  // namespace

TEST_CASE("hyperbolic equation against closed-form single-mode solution") {
    const std::size_t n = 64;
    const double omega = 0.9;
    std::vector<double> eta(n);
    for (std::size_t j = 0; j < n; ++j) eta[j] = std::cos(two_pi * double(j) / double(n));
    const CohomologyResult r = cohomology_solve(2.0, omega, eta);
    // modes +-1: xi_k = (1/2)/(2 - e^{+-i omega})
    const Cplx expected = 0.5 / (2.0 - std::polar(1.0, omega));
    auto c = to_fourier(r.xi);
    CHECK(std::abs(c[1] - expected) < 1e-14);
    CHECK(substitution_residual(2.0, 1.0, omega, r.xi, eta) < 1e-12);
}

TEST_CASE("resonant k=0 mode: zero-average solution with reported average") {
    const std::size_t n = 64;
    const double omega = 1.0;
    std::vector<double> eta(n);
    for (std::size_t j = 0; j < n; ++j) eta[j] = std::cos(two_pi * double(j) / double(n));
    const CohomologyResult r = cohomology_solve(1.0, omega, eta);
    double avg = 0.0;
    for (double v : r.xi) avg += v;
    CHECK(std::abs(avg) < 1e-13 * double(n));
    CHECK(std::abs(r.rhs_average) < 1e-14);
    CHECK(substitution_residual(1.0, 1.0, omega, r.xi, eta) < 1e-12);
}

TEST_CASE("forward-then-solve recovers a random band-limited solution") {
    const std::size_t n = 128;
    const double omega = 2.31;
    const double lambda = 0.7;
    const std::vector<double> truth = band_limited(n, 20, 5);
    // synthesize eta = lambda*truth(theta) - truth(theta+omega)
    auto c = to_fourier(truth);
    std::vector<Cplx> shifted = c;
    shift_spectrum(shifted, omega);
    std::vector<Cplx> eta_c(n);
    for (std::size_t j = 0; j < n; ++j) eta_c[j] = lambda * c[j] - shifted[j];
    const std::vector<double> eta = from_fourier(eta_c);
    const CohomologyResult r = cohomology_solve(lambda, omega, eta);
    for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(r.xi[j] - truth[j]) < 1e-11);
}

TEST_CASE("small divisor raises when the needed mode is resonant") {
    const std::size_t n = 64;
    // omega within 1e-9 of 2pi/8: mode 8 divisor ~ 8e-9 < floor
    const double omega = two_pi / 8.0 + 1e-9;
    std::vector<double> eta(n);
    for (std::size_t j = 0; j < n; ++j) eta[j] = std::cos(8.0 * two_pi * double(j) / double(n));
    CHECK_THROWS_AS(cohomology_solve(1.0, omega, eta), SmallDivisor);
    // but content-free resonant modes are dropped silently
    for (std::size_t j = 0; j < n; ++j) eta[j] = std::cos(two_pi * double(j) / double(n));
    CHECK_NOTHROW(cohomology_solve(1.0, omega, eta));
}

TEST_CASE("center block balances the averages through the shear") {
    const std::size_t n = 128;
    const double omega = 2.31;
    std::vector<double> eta1 = band_limited(n, 10, 7);
    for (auto& v : eta1) v += 0.37;  // nonzero average to be absorbed
    const std::vector<double> eta2 = band_limited(n, 10, 8);
    std::vector<double> shear(n);
    for (std::size_t j = 0; j < n; ++j)
        shear[j] = -2.1 + 0.3 * std::cos(two_pi * double(j) / double(n));

    const CenterSolveResult r = solve_center_block(omega, eta1, eta2, shear);
    CHECK(std::abs(r.eta2_average) < 1e-14);

    // substitute both equations
    const std::size_t nn = n;
    auto c1 = to_fourier(r.xi1);
    auto c2 = to_fourier(r.xi2);
    double worst = 0.0;
    for (std::size_t j = 0; j < nn; ++j) {
        const double th = two_pi * double(j) / double(nn);
        const double xi1s = evaluate_spectrum(c1, th + omega);
        const double xi2s = evaluate_spectrum(c2, th + omega);
        worst = std::max(worst,
                         std::abs(r.xi1[j] + shear[j] * r.xi2[j] - xi1s - eta1[j]));
        worst = std::max(worst, std::abs(r.xi2[j] - xi2s - eta2[j]));
    }
    CHECK(worst < 1e-11);

    // phase condition
    double avg1 = 0.0;
    for (double v : r.xi1) avg1 += v;
    CHECK(std::abs(avg1) < 1e-12 * double(n));
}

TEST_CASE("vanishing average shear is a structured failure") {
    const std::size_t n = 64;
    std::vector<double> eta1(n, 0.1), eta2(n, 0.0), shear(n);
    for (std::size_t j = 0; j < n; ++j) shear[j] = std::sin(two_pi * double(j) / double(n));
    CHECK_THROWS_AS(solve_center_block(1.0, eta1, eta2, shear), TwistDegenerate);
}
