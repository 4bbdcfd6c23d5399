#include "qpt/frames.hpp"

#include <cmath>

namespace qpt {

FrameLink frame_link(const SystemParams& p) {
    FrameLink l;
    l.mu = p.mu;
    l.mu_bar = p.mu_bar;
    if (p.frame == Frame::m1m2) {
        l.r13 = p.r13;
        l.omega3 = p.omega3;
    } else {
        l.r13 = 1.0 / p.r12;
        l.omega3 = 1.0 / p.omega2;
    }
    return l;
}

State phi_transform(const State& s, double theta3, const SystemParams& p) {
    const FrameLink l = frame_link(p);
    const double c = std::cos(theta3), sn = std::sin(theta3);
    // rotate by -theta3 after shifting positions to m1 (and momenta by +mu on py)
    const double xr = c * (s.x + l.mu) + sn * s.y;
    const double yr = -sn * (s.x + l.mu) + c * s.y;
    const double pxr = c * s.px + sn * (s.py + l.mu);
    const double pyr = -sn * s.px + c * (s.py + l.mu);
    const double k = 1.0 / l.r13;
    const double kp = 1.0 / (l.r13 * l.omega3);
    return State{k * xr - l.mu_bar, k * yr, kp * pxr, kp * pyr - l.mu_bar};
}

State phi_inverse(const State& s, double theta3, const SystemParams& p) {
    const FrameLink l = frame_link(p);
    const double c = std::cos(theta3), sn = std::sin(theta3);
    const double xr = l.r13 * (s.x + l.mu_bar);
    const double yr = l.r13 * s.y;
    const double pxr = l.r13 * l.omega3 * s.px;
    const double pyr = l.r13 * l.omega3 * (s.py + l.mu_bar);
    return State{c * xr - sn * yr - l.mu, sn * xr + c * yr, c * pxr - sn * pyr,
                 sn * pxr + c * pyr - l.mu};
}

Mat4 dphi(double theta3, const SystemParams& p) {
    const FrameLink l = frame_link(p);
    const double c = std::cos(theta3), sn = std::sin(theta3);
    const double k = 1.0 / l.r13;
    const double kp = 1.0 / (l.r13 * l.omega3);
    Mat4 d = Mat4::Zero();
    d(0, 0) = k * c;
    d(0, 1) = k * sn;
    d(1, 0) = -k * sn;
    d(1, 1) = k * c;
    d(2, 2) = kp * c;
    d(2, 3) = kp * sn;
    d(3, 2) = -kp * sn;
    d(3, 3) = kp * c;
    return d;
}

Mat4 dphi_inverse(double theta3, const SystemParams& p) {
    const FrameLink l = frame_link(p);
    const double c = std::cos(theta3), sn = std::sin(theta3);
    const double k = l.r13;
    const double kp = l.r13 * l.omega3;
    Mat4 d = Mat4::Zero();
    d(0, 0) = k * c;
    d(0, 1) = -k * sn;
    d(1, 0) = k * sn;
    d(1, 1) = k * c;
    d(2, 2) = kp * c;
    d(2, 3) = -kp * sn;
    d(3, 2) = kp * sn;
    d(3, 3) = kp * c;
    return d;
}

}  // namespace qpt
