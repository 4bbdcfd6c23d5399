#pragma once

// Closed-form two-body propagation used as an oracle against the numerical
// integrator and the element conversions. Deliberately independent of the
// library implementation paths it checks.

#include <cmath>
#include <stdexcept>

#include "qpt/types.hpp"

namespace oracle {

struct Elements {
    double a, e;
    double omega_peri;  // inertial argument of periapse
    double m0;          // mean anomaly at epoch
    double n;           // mean motion
};

inline double solve_kepler(double m, double e) {
    double ea = m;
    for (int i = 0; i < 60; ++i) {
        const double f = ea - e * std::sin(ea) - m;
        const double fp = 1.0 - e * std::cos(ea);
        const double step = f / fp;
        ea -= step;
        if (std::abs(step) < 1e-15) break;
    }
    return ea;
}

// Elements of an inertial state about a unit-GM primary at the origin.
inline Elements elements_from_inertial(double rx, double ry, double vx, double vy) {
    const double r = std::hypot(rx, ry);
    const double v2 = vx * vx + vy * vy;
    const double energy = 0.5 * v2 - 1.0 / r;
    if (energy >= 0.0) throw std::runtime_error("oracle: not elliptic");
    Elements el;
    el.a = -0.5 / energy;
    const double h = rx * vy - ry * vx;
    const double ex = vy * h - rx / r;
    const double ey = -vx * h - ry / r;
    el.e = std::hypot(ex, ey);
    el.omega_peri = std::atan2(ey, ex);
    el.n = std::pow(el.a, -1.5);
    double nu = std::atan2(ry, rx) - el.omega_peri;
    // eccentric anomaly from the true anomaly
    const double ea =
        2.0 * std::atan(std::sqrt((1.0 - el.e) / (1.0 + el.e)) * std::tan(0.5 * nu));
    el.m0 = ea - el.e * std::sin(ea);
    if (h < 0.0) throw std::runtime_error("oracle: retrograde not supported");
    return el;
}

struct Inertial {
    double rx, ry, vx, vy;
};

inline Inertial inertial_at(const Elements& el, double t) {
    const double m = el.m0 + el.n * t;
    const double ea = solve_kepler(std::fmod(m, 2.0 * M_PI), el.e);
    const double cph = std::cos(el.omega_peri), sph = std::sin(el.omega_peri);
    // perifocal position/velocity
    const double x = el.a * (std::cos(ea) - el.e);
    const double y = el.a * std::sqrt(1.0 - el.e * el.e) * std::sin(ea);
    const double r = el.a * (1.0 - el.e * std::cos(ea));
    const double fac = std::sqrt(el.a) / r;
    const double vx_p = -fac * std::sin(ea);
    const double vy_p = fac * std::sqrt(1.0 - el.e * el.e) * std::cos(ea);
    return Inertial{cph * x - sph * y, sph * x + cph * y, cph * vx_p - sph * vy_p,
                    sph * vx_p + cph * vy_p};
}

// Rotating-frame position-momentum state of the Kepler motion at time t,
// for a frame rotating at unit rate about the origin (frames aligned at 0).
inline qpt::State rotating_state_at(const qpt::State& s0, double t) {
    // at t = 0 the momenta equal the inertial velocity components
    const Elements el = elements_from_inertial(s0.x, s0.y, s0.px, s0.py);
    const Inertial in = inertial_at(el, t);
    const double c = std::cos(t), s = std::sin(t);
    // rotate the inertial vectors into the frame at angle t
    return qpt::State{c * in.rx + s * in.ry, -s * in.rx + c * in.ry, c * in.vx + s * in.vy,
                      -s * in.vx + c * in.vy};
}

}  // namespace oracle
