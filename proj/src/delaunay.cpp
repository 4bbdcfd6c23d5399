#include "qpt/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "qpt/errors.hpp"

namespace qpt {

DelaunayState state_to_delaunay(const State& s, const SystemParams& p) {
    const double mu = p.own_mu();
    const double gm1 = 1.0 - mu;

    // m1-centered position; the momenta are the inertial velocity in the
    // rotating basis about the barycenter, so subtract m1's own circular
    // velocity to center the two-body problem on m1.
    const double rx = s.x + mu, ry = s.y;
    const double vx = s.px, vy = s.py + mu;

    const double r = std::hypot(rx, ry);
    if (r <= 0.0) throw HyperbolicState("state_to_delaunay: at the primary");
    const double v2 = vx * vx + vy * vy;
    const double energy = 0.5 * v2 - gm1 / r;
    if (energy >= 0.0)
        throw HyperbolicState("state_to_delaunay: nonnegative two-body energy " +
                              std::to_string(energy));

    const double a = -gm1 / (2.0 * energy);
    const double h = rx * vy - ry * vx;  // angular momentum (z)

    // eccentricity vector in the rotating basis
    const double ex = (vy * h) / gm1 - rx / r;
    const double ey = (-vx * h) / gm1 - ry / r;
    const double e = std::hypot(ex, ey);

    DelaunayState d;
    d.l = std::sqrt(gm1 * a);
    d.g_action = h;

    if (e < 1e-10) {
        d.near_circular = true;
        d.g = 0.0;
        double lon = std::atan2(ry, rx);
        d.ell = wrap_angle(lon);
        return d;
    }

    d.g = wrap_angle(std::atan2(ey, ex));

    // true anomaly, signed consistently with the motion
    double nu = std::atan2(rx * ey - ry * ex, rx * ex + ry * ey);
    nu = -nu;  // angle from periapse to position
    if (h < 0.0) nu = -nu;

    const double ecc_fac = std::sqrt((1.0 - e) / (1.0 + e));
    const double ea = 2.0 * std::atan(ecc_fac * std::tan(0.5 * nu));
    double ell = ea - e * std::sin(ea);
    if (h < 0.0) ell = -ell;
    d.ell = wrap_angle(ell);
    return d;
}

const char* torus_topology_name(TorusTopology t) {
    switch (t) {
        case TorusTopology::kam_like: return "kam_like";
        case TorusTopology::secondary: return "secondary";
        case TorusTopology::indeterminate: return "indeterminate";
    }
    return "unknown";
}

TopologyReport torus_topology(const std::vector<DelaunayState>& samples,
                              const TopologyOptions& opt) {
    if (samples.size() < opt.min_samples)
        throw InsufficientSamples("torus_topology: need at least " +
                                  std::to_string(opt.min_samples) + " samples, got " +
                                  std::to_string(samples.size()));

    const int bins = opt.bins;
    std::vector<char> hit(static_cast<std::size_t>(bins) * bins, 0);
    double lmin = std::numeric_limits<double>::infinity(), lmax = -lmin;
    double gmin = lmin, gmax = -lmin;
    double lsum = 0.0;
    for (const auto& d : samples) {
        lmin = std::min(lmin, d.l);
        lmax = std::max(lmax, d.l);
        gmin = std::min(gmin, d.g_action);
        gmax = std::max(gmax, d.g_action);
        lsum += d.l;
        int bi = static_cast<int>(d.ell / two_pi * bins);
        int bj = static_cast<int>(d.g / two_pi * bins);
        bi = std::clamp(bi, 0, bins - 1);
        bj = std::clamp(bj, 0, bins - 1);
        hit[static_cast<std::size_t>(bi) * bins + bj] = 1;
    }
    std::size_t visited = 0;
    for (char c : hit) visited += c;

    TopologyReport rep;
    rep.action_spread_l = lmax - lmin;
    rep.action_spread_g = gmax - gmin;
    rep.coverage_fraction = double(visited) / double(bins * bins);

    const double mean_l = lsum / double(samples.size());
    const double thresh = opt.action_threshold * mean_l;
    if (rep.coverage_fraction >= opt.coverage_kam && rep.action_spread_l <= thresh &&
        rep.action_spread_g <= thresh) {
        rep.classification = TorusTopology::kam_like;
    } else if (rep.coverage_fraction < opt.coverage_secondary) {
        rep.classification = TorusTopology::secondary;
    } else {
        rep.classification = TorusTopology::indeterminate;
    }
    return rep;
}

}  // namespace qpt
