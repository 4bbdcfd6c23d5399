#include "qpt/params.hpp"

#include <cmath>

#include "qpt/errors.hpp"

namespace qpt {

double kepler_rate(double gm_sum, double r) {
    if (!(gm_sum > 0) || !(r > 0)) throw ConfigError("kepler_rate: gm_sum and r must be positive");
    return std::sqrt(gm_sum / (r * r * r));
}

double radius_from_rate(double omega, double gm_sum) {
    if (!(gm_sum > 0) || !(omega > 0))
        throw ConfigError("radius_from_rate: gm_sum and omega must be positive");
    return std::cbrt(gm_sum / (omega * omega));
}

void SystemParams::validate() const {
    if (!(mu > 0.0) || !(mu < 1.0)) throw ConfigError("params: mu out of (0,1)");
    if (perturber_ratio() < 0.0) throw ConfigError("params: negative perturbing mass ratio");
    if (frame == Frame::m1m2) {
        if (r12 != 1.0 || omega2 != 1.0) throw ConfigError("params: m1m2 frame requires r12 = omega2 = 1");
    } else {
        if (r13 != 1.0 || omega3 != 1.0) throw ConfigError("params: m1m3 frame requires r13 = omega3 = 1");
    }
    const double rate = perturber_rate();
    const double rad = perturber_radius();
    const double gm = perturber_gm_sum();
    const double resid = std::abs(rate * rate * rad * rad * rad - gm) / gm;
    if (resid > 1e-12) throw ConfigError("params: Kepler consistency violated");
}

SystemParams build_params(const PhysicalConstants& pc, Frame frame) {
    pc.validate();
    SystemParams p;
    p.frame = frame;
    const double m12 = pc.gm_jupiter + pc.gm_europa;
    const double m13 = pc.gm_jupiter + pc.gm_ganymede;
    p.mu = pc.gm_europa / m12;
    p.mu3 = pc.gm_ganymede / m12;
    p.mu_bar = pc.gm_ganymede / m13;
    p.mu2_bar = pc.gm_europa / m13;
    if (frame == Frame::m1m2) {
        p.r12 = 1.0;
        p.omega2 = 1.0;
        p.omega3 = pc.period_europa / pc.period_ganymede;
        p.r13 = radius_from_rate(p.omega3, m13 / m12);
    } else {
        p.r13 = 1.0;
        p.omega3 = 1.0;
        p.omega2 = pc.period_ganymede / pc.period_europa;
        p.r12 = radius_from_rate(p.omega2, m12 / m13);
    }
    return p;
}

SystemParams with_perturber_ratio(const SystemParams& p, double ratio) {
    if (ratio < 0.0) throw ConfigError("with_perturber_ratio: negative ratio");
    SystemParams q = p;
    if (p.frame == Frame::m1m2) {
        q.mu3 = ratio;
        const double gm13 = 1.0 - q.mu + q.mu3;  // G(m1+m3) in m1m2 units
        q.mu_bar = q.mu3 / gm13;
        q.mu2_bar = q.mu / gm13;
        q.r13 = radius_from_rate(q.omega3, gm13);
    } else {
        q.mu2_bar = ratio;
        const double gm12 = 1.0 - q.mu_bar + q.mu2_bar;  // G(m1+m2) in m1m3 units
        q.mu = q.mu2_bar / gm12;
        q.mu3 = q.mu_bar / gm12;
        q.r12 = radius_from_rate(q.omega2, gm12);
    }
    return q;
}

SystemParams params_in_other_frame(const SystemParams& p) {
    SystemParams q = p;
    if (p.frame == Frame::m1m2) {
        q.frame = Frame::m1m3;
        q.r13 = 1.0;
        q.omega3 = 1.0;
        q.omega2 = 1.0 / p.omega3;
        q.r12 = radius_from_rate(q.omega2, 1.0 - q.mu_bar + q.mu2_bar);
    } else {
        q.frame = Frame::m1m2;
        q.r12 = 1.0;
        q.omega2 = 1.0;
        q.omega3 = 1.0 / p.omega2;
        q.r13 = radius_from_rate(q.omega3, 1.0 - q.mu + q.mu3);
    }
    return q;
}

double unit_km(const SystemParams& p, const PhysicalConstants& pc) {
    if (p.frame == Frame::m1m2) return pc.r12_km;
    // m1m3 unit length is the physical m1-m3 separation; derive it from the
    // adopted r12_km anchor and the Kepler ratio at physical masses.
    SystemParams phys = build_params(pc, Frame::m1m2);
    return pc.r12_km * phys.r13;
}

LimitFrequencies laplace_limit_frequencies(const PhysicalConstants& pc) {
    const double omega2 = pc.period_ganymede / pc.period_europa;  // m2 rate in m1m3 units
    LimitFrequencies lf;
    lf.omega1 = 0.25 * omega2;
    lf.omega = two_pi * lf.omega1 / std::abs(omega2 - 1.0);
    return lf;
}

}  // namespace qpt
