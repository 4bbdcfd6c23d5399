#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

namespace qpt {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Which rotating frame the equations of motion are written in.
/// m1m2: frame co-rotating with the inner pair's moon (m2 fixed on the x-axis).
/// m1m3: frame co-rotating with m3.
enum class Frame { m1m2, m1m3 };

inline const char* frame_name(Frame f) { return f == Frame::m1m2 ? "m1m2" : "m1m3"; }

/// Wrap an angle into [0, 2*pi).
inline double wrap_angle(double a) {
    double w = std::fmod(a, two_pi);
    if (w < 0.0) w += two_pi;
    return w;
}

/// Planar state in position-momentum form. Velocities obey
/// xdot = px + y, ydot = py - x.
struct State {
    double x = 0.0;
    double y = 0.0;
    double px = 0.0;
    double py = 0.0;

    Vec4 vec() const { return Vec4(x, y, px, py); }
    static State from_vec(const Vec4& v) { return State{v[0], v[1], v[2], v[3]}; }

    friend State operator-(const State& a, const State& b) {
        return State{a.x - b.x, a.y - b.y, a.px - b.px, a.py - b.py};
    }
    double norm() const { return std::sqrt(x * x + y * y + px * px + py * py); }
};

/// State plus the perturbation phase angle (theta3 in the m1m2 frame,
/// theta2 in the m1m3 frame), wrapped to [0, 2*pi).
struct ExtendedState {
    State s;
    double theta_p = 0.0;

    ExtendedState() = default;
    ExtendedState(const State& s_, double th) : s(s_), theta_p(wrap_angle(th)) {}
};

/// Canonical symplectic form J: Omega(a, b) = a^T J b.
inline Mat4 symplectic_j() {
    Mat4 j = Mat4::Zero();
    j(0, 2) = 1.0;
    j(1, 3) = 1.0;
    j(2, 0) = -1.0;
    j(3, 1) = -1.0;
    return j;
}

inline double symplectic_product(const Vec4& a, const Vec4& b) {
    return a[0] * b[2] + a[1] * b[3] - a[2] * b[0] - a[3] * b[1];
}

}  // namespace qpt
