#include "qpt/cohomology.hpp"

#include <cmath>
#include <complex>
#include <limits>

#include "qpt/errors.hpp"

namespace qpt {

CohomologyResult cohomology_solve_general(double a, double b, double omega,
                                          const std::vector<double>& eta,
                                          const CohomologyOptions& opt) {
    const std::size_t n = eta.size();
    std::vector<Cplx> c = to_fourier(eta);

    double peak = 0.0;
    for (const auto& v : c) peak = std::max(peak, std::abs(v));
    const double drop = opt.negligible * peak;

    CohomologyResult out;
    out.min_divisor = std::numeric_limits<double>::infinity();
    const bool resonant0 = a == b;

    for (std::size_t j = 0; j < n; ++j) {
        const int k = freq_of_index(j, n);
        if (opt.band_limit > 0 && std::abs(k) > opt.band_limit) {
            c[j] = 0.0;
            continue;
        }
        if (k == 0 && resonant0) {
            out.rhs_average = c[j].real();
            c[j] = 0.0;  // zero-average solution
            continue;
        }
        if (j == n / 2) {
            // the unpaired cosine mode cannot be divided consistently; it is
            // beyond the resolved band whenever the tail tolerance holds
            c[j] = 0.0;
            continue;
        }
        const Cplx divisor = a - b * std::polar(1.0, k * omega);
        const double mag = std::abs(divisor);
        if (mag < opt.divisor_floor) {
            if (std::abs(c[j]) > drop)
                throw SmallDivisor(k, mag,
                                   "cohomology divisor " + std::to_string(mag) + " at mode " +
                                       std::to_string(k));
            c[j] = 0.0;
            continue;
        }
        if (std::abs(c[j]) > drop) out.min_divisor = std::min(out.min_divisor, mag);
        if (opt.regularization > 0.0 && mag < 10.0 * opt.regularization) {
            c[j] *= std::conj(divisor) /
                    (mag * mag + opt.regularization * opt.regularization);
        } else {
            c[j] /= divisor;
        }
        const double m = std::abs(c[j]);
        if (m > opt.max_component) c[j] *= opt.max_component / m;
    }
    out.xi = from_fourier(c);
    return out;
}

namespace {

double grid_average(const std::vector<double>& g) {
    double s = 0.0;
    for (double v : g) s += v;
    return s / static_cast<double>(g.size());
}

}  // namespace

CenterSolveResult solve_center_block(double omega, const std::vector<double>& eta1,
                                     const std::vector<double>& eta2,
                                     const std::vector<double>& shear,
                                     const CohomologyOptions& opt) {
    const std::size_t n = eta1.size();
    CenterSolveResult out;

    CohomologyResult r2 = cohomology_solve(1.0, omega, eta2, opt);
    out.eta2_average = r2.rhs_average;
    out.min_divisor = r2.min_divisor;

    const double avg_t = grid_average(shear);
    if (std::abs(avg_t) < opt.twist_floor)
        throw TwistDegenerate("average shear " + std::to_string(avg_t) +
                              " below twist floor; cannot balance the center equations");

    // choose avg(xi2) so the first equation's right side has zero average
    std::vector<double> rhs1(n);
    double avg_top = 0.0;
    for (std::size_t j = 0; j < n; ++j) avg_top += eta1[j] - shear[j] * r2.xi[j];
    avg_top /= static_cast<double>(n);
    const double xi2_avg = avg_top / avg_t;

    out.xi2 = r2.xi;
    for (auto& v : out.xi2) v += xi2_avg;
    for (std::size_t j = 0; j < n; ++j) rhs1[j] = eta1[j] - shear[j] * out.xi2[j];

    CohomologyResult r1 = cohomology_solve(1.0, omega, rhs1, opt);
    out.xi1 = std::move(r1.xi);
    out.min_divisor = std::min(out.min_divisor, r1.min_divisor);
    return out;
}

}  // namespace qpt
