#pragma once

#include <stdexcept>
#include <string>

namespace qpt {

/// Base for all structured failures; carries a stable code string used by the
/// CLI to map failures onto exit codes and by continuation drivers to decide
/// whether to halve the step, record a gap, or abort.
class Error : public std::runtime_error {
  public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

  private:
    std::string code_;
};

struct CollisionSingularity : Error {
    CollisionSingularity(int body, double dist, const std::string& what)
        : Error("collision_singularity", what), body_index(body), distance(dist) {}
    int body_index;   // 1-based: 1 -> m1, 2 -> own moon, 3 -> perturbing moon
    double distance;
};

struct StepSizeUnderflow : Error {
    explicit StepSizeUnderflow(const std::string& what) : Error("step_size_underflow", what) {}
};

struct SmallDivisor : Error {
    SmallDivisor(int mode, double div, const std::string& what)
        : Error("small_divisor", what), mode(mode), divisor(div) {}
    int mode;
    double divisor;
};

struct Diverged : Error {
    explicit Diverged(const std::string& what) : Error("diverged", what) {}
};

struct BundleDegenerate : Error {
    explicit BundleDegenerate(const std::string& what) : Error("bundle_degenerate", what) {}
};

struct TwistDegenerate : Error {
    explicit TwistDegenerate(const std::string& what) : Error("twist_degenerate", what) {}
};

struct ResolutionExhausted : Error {
    explicit ResolutionExhausted(const std::string& what) : Error("resolution_exhausted", what) {}
};

struct NoConvergence : Error {
    explicit NoConvergence(const std::string& what) : Error("no_convergence", what) {}
};

struct WrongResonance : Error {
    explicit WrongResonance(const std::string& what) : Error("wrong_resonance", what) {}
};

struct HyperbolicState : Error {
    explicit HyperbolicState(const std::string& what) : Error("hyperbolic_state", what) {}
};

struct InsufficientSamples : Error {
    explicit InsufficientSamples(const std::string& what) : Error("insufficient_samples", what) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error("config_error", what) {}
};

}  // namespace qpt
