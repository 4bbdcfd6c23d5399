#include "qpt/dynamics.hpp"

#include <cmath>

#include "qpt/errors.hpp"

namespace qpt {

MoonPosition moon_position(double theta, const SystemParams& p) {
    const double rp = p.perturber_radius();
    return MoonPosition{-p.own_mu() + rp * std::cos(theta), rp * std::sin(theta)};
}

namespace {

inline void check_distance(double r, int body, double floor) {
    if (r < floor)
        throw CollisionSingularity(body, r,
                                   "distance to body " + std::to_string(body) +
                                       " below collision floor");
}

}  // namespace

void eval_field(const State& s, double theta_p, const SystemParams& p, double floor, Vec4* f,
                Mat4* a, Vec4* dfdmu) {
    const double mu = p.own_mu();
    const double b = p.perturber_ratio();
    const double rp = p.perturber_radius();
    const double ct = std::cos(theta_p);
    const double st = std::sin(theta_p);
    const double xp = -mu + rp * ct;
    const double yp = rp * st;

    const double d1x = s.x + mu, d1y = s.y;
    const double d2x = s.x - (1.0 - mu), d2y = s.y;
    const double d3x = s.x - xp, d3y = s.y - yp;

    const double r1 = std::sqrt(d1x * d1x + d1y * d1y);
    const double r2 = std::sqrt(d2x * d2x + d2y * d2y);
    const double r3 = std::sqrt(d3x * d3x + d3y * d3y);
    check_distance(r1, 1, floor);
    check_distance(r2, 2, floor);
    check_distance(r3, 3, floor);

    const double r1_3 = 1.0 / (r1 * r1 * r1);
    const double r2_3 = 1.0 / (r2 * r2 * r2);
    const double r3_3 = 1.0 / (r3 * r3 * r3);
    const double rp_2 = 1.0 / (rp * rp);

    if (f) {
        (*f)[0] = s.px + s.y;
        (*f)[1] = s.py - s.x;
        (*f)[2] = s.py - (1.0 - mu) * d1x * r1_3 - mu * d2x * r2_3 - b * d3x * r3_3 - b * ct * rp_2;
        (*f)[3] = -s.px - (1.0 - mu) * d1y * r1_3 - mu * d2y * r2_3 - b * d3y * r3_3 - b * st * rp_2;
    }

    if (a) {
        const double r1_5 = r1_3 / (r1 * r1);
        const double r2_5 = r2_3 / (r2 * r2);
        const double r3_5 = r3_3 / (r3 * r3);
        const double uxx = (1.0 - mu) * (r1_3 - 3.0 * d1x * d1x * r1_5) +
                           mu * (r2_3 - 3.0 * d2x * d2x * r2_5) +
                           b * (r3_3 - 3.0 * d3x * d3x * r3_5);
        const double uyy = (1.0 - mu) * (r1_3 - 3.0 * d1y * d1y * r1_5) +
                           mu * (r2_3 - 3.0 * d2y * d2y * r2_5) +
                           b * (r3_3 - 3.0 * d3y * d3y * r3_5);
        const double uxy = -3.0 * ((1.0 - mu) * d1x * d1y * r1_5 + mu * d2x * d2y * r2_5 +
                                   b * d3x * d3y * r3_5);
        *a << 0.0, 1.0, 1.0, 0.0,
             -1.0, 0.0, 0.0, 1.0,
             -uxx, -uxy, 0.0, 1.0,
             -uxy, -uyy, -1.0, 0.0;
    }

    if (dfdmu) {
        // Perturbing terms differentiated in the mass ratio; the moon's orbit
        // radius follows Kepler's law with its rate fixed, so rp depends on b.
        const double drp = p.perturber_radius_dmu();
        const double xp_b = drp * ct;
        const double yp_b = drp * st;
        const double r3_b = -(d3x * xp_b + d3y * yp_b) / r3;
        const double r3_4 = r3_3 / r3;
        const double rp_3 = rp_2 / rp;
        const double dpx = -d3x * r3_3 - b * (-xp_b * r3_3 - 3.0 * d3x * r3_b * r3_4) -
                           ct * rp_2 + 2.0 * b * ct * drp * rp_3;
        const double dpy = -d3y * r3_3 - b * (-yp_b * r3_3 - 3.0 * d3y * r3_b * r3_4) -
                           st * rp_2 + 2.0 * b * st * drp * rp_3;
        (*dfdmu)[0] = 0.0;
        (*dfdmu)[1] = 0.0;
        (*dfdmu)[2] = dpx;
        (*dfdmu)[3] = dpy;
    }
}

FieldDerivative vector_field(const ExtendedState& es, const SystemParams& p, double floor) {
    Vec4 f;
    eval_field(es.s, es.theta_p, p, floor, &f, nullptr, nullptr);
    return FieldDerivative{State::from_vec(f), p.perturber_rate() - 1.0};
}

double hamiltonian(const ExtendedState& es, const SystemParams& p, double floor) {
    const State& s = es.s;
    const double mu = p.own_mu();
    const double b = p.perturber_ratio();
    const double rp = p.perturber_radius();
    const MoonPosition m3 = moon_position(es.theta_p, p);

    const double d1x = s.x + mu, d2x = s.x - (1.0 - mu);
    const double r1 = std::sqrt(d1x * d1x + s.y * s.y);
    const double r2 = std::sqrt(d2x * d2x + s.y * s.y);
    const double d3x = s.x - m3.x, d3y = s.y - m3.y;
    const double r3 = std::sqrt(d3x * d3x + d3y * d3y);
    check_distance(r1, 1, floor);
    check_distance(r2, 2, floor);
    check_distance(r3, 3, floor);

    return 0.5 * (s.px * s.px + s.py * s.py) + s.px * s.y - s.py * s.x - (1.0 - mu) / r1 -
           mu / r2 - b / r3 +
           b * (s.x * std::cos(es.theta_p) + s.y * std::sin(es.theta_p)) / (rp * rp);
}

double jacobi_constant(const State& s, const SystemParams& p, double floor) {
    return -2.0 * hamiltonian(ExtendedState(s, 0.0), p, floor);
}

Mat4 state_jacobian(const ExtendedState& es, const SystemParams& p, double floor) {
    Mat4 a;
    eval_field(es.s, es.theta_p, p, floor, nullptr, &a, nullptr);
    return a;
}

Mat4 variational_field(const ExtendedState& es, const Mat4& phi, const SystemParams& p,
                       double floor) {
    return state_jacobian(es, p, floor) * phi;
}

Vec4 mass_partial(const ExtendedState& es, const SystemParams& p, double floor) {
    Vec4 d;
    eval_field(es.s, es.theta_p, p, floor, nullptr, nullptr, &d);
    return d;
}

Vec4 mass_variational_field(const ExtendedState& es, const Vec4& w, const SystemParams& p,
                            double floor) {
    Mat4 a;
    Vec4 d;
    eval_field(es.s, es.theta_p, p, floor, nullptr, &a, &d);
    return a * w + d;
}

}  // namespace qpt
