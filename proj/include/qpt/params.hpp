#pragma once

#include "qpt/constants.hpp"
#include "qpt/types.hpp"

namespace qpt {

/// Kepler's third law: angular rate of a circular orbit of radius r about a
/// combined gravitational parameter gm_sum (consistent units).
double kepler_rate(double gm_sum, double r);

/// Inverse of kepler_rate: circular-orbit radius for a given angular rate.
double radius_from_rate(double omega, double gm_sum);

/// One normalized instance of the concentric four-body model. In the m1m2
/// frame the units make r12 = 1, G(m1+m2) = 1, Omega2 = 1; in the m1m3 frame
/// r13 = 1, G(m1+m3) = 1, Omega3 = 1. All four mass ratios are
/// frame-independent; r12/r13/omega2/omega3 are expressed in the frame's own
/// units.
struct SystemParams {
    Frame frame = Frame::m1m2;
    double mu = 0.0;       // m2 / (m1 + m2)
    double mu3 = 0.0;      // m3 / (m1 + m2)
    double mu_bar = 0.0;   // m3 / (m1 + m3)
    double mu2_bar = 0.0;  // m2 / (m1 + m3)
    double r12 = 1.0;
    double r13 = 1.0;
    double omega2 = 1.0;
    double omega3 = 1.0;

    // The frame's own primary pair ratio and the perturbing-moon quantities.
    double own_mu() const { return frame == Frame::m1m2 ? mu : mu_bar; }
    double perturber_ratio() const { return frame == Frame::m1m2 ? mu3 : mu2_bar; }
    double perturber_radius() const { return frame == Frame::m1m2 ? r13 : r12; }
    double perturber_rate() const { return frame == Frame::m1m2 ? omega3 : omega2; }

    // Normalized G(m1 + m_perturber) in this frame's units.
    double perturber_gm_sum() const { return 1.0 - own_mu() + perturber_ratio(); }

    // d(perturber radius)/d(perturber ratio) with the perturber rate held
    // fixed (Kepler radius recomputed as the mass varies).
    double perturber_radius_dmu() const { return perturber_radius() / (3.0 * perturber_gm_sum()); }

    // Period of the stroboscopic map in this frame's time units.
    double map_period() const { return two_pi / std::abs(perturber_rate() - 1.0); }

    // Positions of the frame's own primaries on the x-axis.
    double m1_x() const { return -own_mu(); }
    double moon_x() const { return 1.0 - own_mu(); }

    void validate() const;
};

/// Build normalized parameters from physical constants for the given frame,
/// at the physical perturbing-mass ratio.
SystemParams build_params(const PhysicalConstants& pc, Frame frame);

/// Same system with the perturbing-mass ratio replaced (continuation knob).
/// The perturbing moon's angular rate stays at its physical value and its
/// orbit radius is recomputed from Kepler's law; the other frame's ratios are
/// kept consistent with the new mass.
SystemParams with_perturber_ratio(const SystemParams& p, double ratio);

/// Parameters describing the same physical system in the other frame.
SystemParams params_in_other_frame(const SystemParams& p);

/// km per unit length of the frame, anchored at pc.r12_km for the m1-m2 unit.
double unit_km(const SystemParams& p, const PhysicalConstants& pc);

/// Frequency bookkeeping for the exactly-commensurate limit of an exterior
/// 3:4 orbit of the inner moon, expressed in m1m3-frame units: the circle
/// frequency Omega1 and the map rotation number it implies.
struct LimitFrequencies {
    double omega1;
    double omega;
};
LimitFrequencies laplace_limit_frequencies(const PhysicalConstants& pc);

}  // namespace qpt
