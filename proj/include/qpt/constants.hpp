#pragma once

#include <string>

namespace qpt {

/// Physical constants of the Jupiter-Europa-Ganymede system (SI units).
/// Note: the GM values below assign 3.2009998067205903e12 to Europa and
/// 9.8869974284299492e12 to Ganymede, consistent with the published mass
/// ratios used throughout (and with the bodies' physical masses).
struct PhysicalConstants {
    double gm_jupiter = 1.2668653785779600e17;   // m^3/s^2
    double gm_europa = 3.2009998067205903e12;    // m^3/s^2
    double gm_ganymede = 9.8869974284299492e12;  // m^3/s^2
    double period_europa = 3.0689648366400000e5;   // s
    double period_ganymede = 6.1808096312640002e5; // s
    // Adopted Europa orbit radius used only for km-unit reporting of
    // approach distances; the dynamics never consume this.
    double r12_km = 670900.0;

    void validate() const;
};

/// Parse a key = value constants file (# comments allowed). Unknown keys are
/// rejected. Missing keys keep their defaults.
PhysicalConstants load_constants(const std::string& path);

/// Canonical text form (used for hashing and for writing the default file).
std::string constants_text(const PhysicalConstants& pc);

}  // namespace qpt
