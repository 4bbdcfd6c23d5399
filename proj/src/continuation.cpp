#include "qpt/continuation.hpp"

#include <cmath>
#include <limits>

#include "qpt/errors.hpp"

namespace qpt {

const char* run_status_name(RunStatus s) {
    switch (s) {
        case RunStatus::converged: return "converged";
        case RunStatus::diverged: return "diverged";
        case RunStatus::singularity: return "singularity";
        case RunStatus::resonance_gap: return "resonance_gap";
    }
    return "unknown";
}

Rational nearest_rational(double x, int q_max) {
    Rational best{static_cast<int>(std::lround(x)), 1};
    double h_prev = 1.0, k_prev = 0.0;
    double h = std::floor(x), k = 1.0;
    double frac = x - std::floor(x);
    for (int it = 0; it < 64; ++it) {
        if (std::abs(x - h / k) < std::abs(x - double(best.p) / double(best.q)))
            best = Rational{static_cast<int>(h), static_cast<int>(k)};
        if (frac < 1e-15) break;
        const double inv = 1.0 / frac;
        const double a = std::floor(inv);
        frac = inv - a;
        const double h_next = a * h + h_prev;
        const double k_next = a * k + k_prev;
        h_prev = h;
        k_prev = k;
        h = h_next;
        k = k_next;
        if (k > double(q_max)) break;
    }
    return best;
}

namespace {

enum class Mode { mass, omega };

struct RadiusRange {
    double lo, hi;
};

RadiusRange circle_radius_range(const TorusCircle& k, const SystemParams& p) {
    const std::vector<Vec4> dense = oversample_circle(k, 8);
    const double a = p.own_mu();
    RadiusRange rr{std::numeric_limits<double>::infinity(), 0.0};
    for (const auto& v : dense) {
        const double r = std::hypot(v[0] + a, v[1]);
        rr.lo = std::min(rr.lo, r);
        rr.hi = std::max(rr.hi, r);
    }
    return rr;
}

struct Approaches {
    double own, pert;
};

Approaches closest_approaches(const TorusCircle& k, const SystemParams& p) {
    const std::vector<Vec4> dense = oversample_circle(k, 8);
    const double a = p.own_mu();
    const double rp = p.perturber_radius();
    Approaches ap{std::numeric_limits<double>::infinity(),
                  std::numeric_limits<double>::infinity()};
    for (const auto& v : dense) {
        ap.own = std::min(ap.own, std::hypot(v[0] - (1.0 - a), v[1]));
        ap.pert = std::min(ap.pert, std::hypot(v[0] - (-a + rp), v[1]));
    }
    return ap;
}

RunStatus status_for(const Error& e) {
    if (e.code() == "collision_singularity") return RunStatus::singularity;
    if (e.code() == "small_divisor") return RunStatus::resonance_gap;
    return RunStatus::diverged;
}

struct Driver {
    Mode mode;
    SystemParams base;
    ContinuationOptions opts;
    ContinuationRun run;

    TorusCircle k;
    BundleSet b;
    SystemParams params;
    double param = 0.0;

    double current_param(const TorusCircle& c) const {
        return mode == Mode::mass ? c.mu_p : c.omega;
    }

    SystemParams params_for(double value) const {
        return mode == Mode::mass ? with_perturber_ratio(base, value) : base;
    }

    TorusCircle predict(double delta) const {
        if (mode == Mode::mass) {
            TorusCircle pred = lindstedt_predict_mass(k, b, params, delta, opts.newton);
            pred.mu_p = param + delta;
            return pred;
        }
        return lindstedt_predict_omega(k, b, params, delta, opts.newton);
    }

    void record(const NewtonReport& rep) {
        StepEntry e;
        e.param = param;
        e.k = k;
        e.b = b;
        e.report = rep;
        const Approaches ap = closest_approaches(k, params);
        e.closest_own = ap.own;
        e.closest_pert = ap.pert;
        run.history.push_back(std::move(e));
        run.max_modes_used = std::max(run.max_modes_used, k.n());
        if (opts.on_step) opts.on_step(run);
    }

    bool crossing_blocked() const {
        if (!opts.collision_precheck) return false;
        // the perturbing moon's orbit radius intersecting the circle's radial
        // band puts a singularity of the perturbed field on the torus
        if (mode == Mode::mass && params.perturber_ratio() == 0.0 && param == 0.0) {
            // about to switch the perturber on: test the seed itself
        }
        const RadiusRange rr = circle_radius_range(k, params);
        const double rp = params.perturber_radius();
        return rr.lo < rp && rp < rr.hi;
    }

    // Correct a predicted circle at parameter value; applies tail-triggered
    // refinement after success. Throws on failure.
    NewtonReport correct_at(TorusCircle& kt, BundleSet& bt, const SystemParams& pt) {
        NewtonReport rep = newton_correct(kt, bt, pt, opts.newton);
        while (estimate_tail(kt) > opts.tail_tol) {
            if (2 * kt.n() > std::min(opts.max_n, max_modes))
                throw ResolutionExhausted("tail tolerance unreachable at " +
                                          std::to_string(kt.n()) + " modes");
            refine_resolution(kt, bt, std::min(opts.max_n, max_modes));
            rep = newton_correct(kt, bt, pt, opts.newton);
        }
        return rep;
    }

    void finish(RunStatus st, const std::string& msg) {
        run.status = st;
        run.message = msg;
    }

    ContinuationRun go(const TorusCircle& seed, const BundleSet& seed_b, double target) {
        run.parameter = mode == Mode::omega
                            ? "omega"
                            : (base.frame == Frame::m1m2 ? "mu3" : "mu2_bar");
        run.step = opts.step;
        k = seed;
        b = seed_b;
        param = current_param(seed);
        params = params_for(param);

        NewtonReport rep;
        try {
            rep = correct_at(k, b, params);
        } catch (const Error& e) {
            finish(status_for(e), std::string("seed correction failed: ") + e.what());
            return std::move(run);
        }

        const bool perturbed = mode == Mode::mass ? (std::max(param, target) > 0.0)
                                                  : params.perturber_ratio() > 0.0;
        if (perturbed && crossing_blocked()) {
            record(rep);
            finish(RunStatus::singularity,
                   "circle crosses the perturbing moon's orbit radius; the perturbed "
                   "field is singular on the torus");
            return std::move(run);
        }
        record(rep);

        const double range = std::abs(target - param);
        if (range == 0.0) {
            finish(RunStatus::converged, "zero-length range");
            return std::move(run);
        }
        const double min_step = 1e-9 * range;
        const double dir = target > param ? 1.0 : -1.0;
        double step_mag = opts.step;
        int halvings = 0;

        while (std::abs(target - param) > 1e-15 * std::max(1.0, std::abs(target))) {
            const double delta = dir * std::min(step_mag, std::abs(target - param));
            TorusCircle k_try;
            try {
                k_try = predict(delta);
            } catch (const Error& e) {
                finish(status_for(e), std::string("predictor failed: ") + e.what());
                return std::move(run);
            }
            BundleSet b_try = b;
            SystemParams p_try = params_for(param + delta);

            bool ok = false;
            std::string fail_msg;
            RunStatus fail_status = RunStatus::diverged;
            try {
                rep = correct_at(k_try, b_try, p_try);
                ok = true;
            } catch (const Error& e) {
                fail_msg = e.what();
                fail_status = status_for(e);
                // aliasing rescue: refine the converged base and retry the step
                if (estimate_tail(k_try) > opts.tail_tol &&
                    2 * k.n() <= std::min(opts.max_n, max_modes)) {
                    refine_resolution(k, b, std::min(opts.max_n, max_modes));
                    continue;
                }
            }

            if (ok) {
                k = std::move(k_try);
                b = std::move(b_try);
                params = p_try;
                param += delta;
                if (mode == Mode::mass) k.mu_p = param;
                if (crossing_blocked()) {
                    record(rep);
                    finish(RunStatus::singularity,
                           "continued circle crossed the perturbing moon's orbit radius");
                    return std::move(run);
                }
                record(rep);
                halvings = 0;
                step_mag = opts.step;
                continue;
            }

            if (halvings < opts.max_halvings && step_mag / 2.0 >= min_step) {
                step_mag /= 2.0;
                ++halvings;
                continue;
            }

            if (mode == Mode::omega && opts.detect_gaps) {
                if (scan_gap(dir, target)) {
                    halvings = 0;
                    step_mag = opts.step;
                    continue;
                }
                finish(RunStatus::resonance_gap,
                       "could not cross resonance gap past omega = " + std::to_string(param));
                return std::move(run);
            }

            finish(fail_status, "stalled at " + run.parameter + " = " + std::to_string(param) +
                                    " after " + std::to_string(halvings) +
                                    " halvings: " + fail_msg);
            return std::move(run);
        }

        finish(RunStatus::converged, "reached target");
        return std::move(run);
    }

    // Jump across a breakdown interval in full-step multiples; records the
    // gap and resumes on success.
    bool scan_gap(double dir, double target) {
        const double gap_lo = param;
        for (int j = 2; j <= opts.gap_scan_limit; ++j) {
            const double w_try = param + dir * opts.step * double(j);
            if ((dir > 0 && w_try > target) || (dir < 0 && w_try < target)) break;
            TorusCircle k_try;
            try {
                k_try = predict(w_try - param);
            } catch (const Error&) {
                continue;
            }
            BundleSet b_try = b;
            try {
                NewtonReport rep = correct_at(k_try, b_try, params);
                GapInterval gap;
                gap.lo = gap_lo;
                gap.hi = w_try;
                const double mid = 0.5 * (gap_lo + w_try);
                const Rational rat = nearest_rational(mid / two_pi, 64);
                gap.p = rat.p;
                gap.q = rat.q;
                gap.min_divisor = min_center_divisor(mid, k_try.n());
                run.gaps.push_back(gap);
                k = std::move(k_try);
                b = std::move(b_try);
                param = w_try;
                record(rep);
                return true;
            } catch (const Error&) {
                continue;
            }
        }
        run.gaps.push_back(GapInterval{gap_lo,
                                       param + dir * opts.step * double(opts.gap_scan_limit),
                                       nearest_rational(gap_lo / two_pi, 64).p,
                                       nearest_rational(gap_lo / two_pi, 64).q,
                                       min_center_divisor(gap_lo, k.n())});
        return false;
    }
};

}  // namespace

ContinuationRun continue_in_mass(const TorusCircle& seed, const BundleSet& seed_b,
                                 const SystemParams& params, double target_mu,
                                 const ContinuationOptions& opts) {
    if (opts.step <= 0.0) throw ConfigError("continue_in_mass: step must be positive");
    Driver d;
    d.mode = Mode::mass;
    d.base = params;
    d.opts = opts;
    return d.go(seed, seed_b, target_mu);
}

ContinuationRun continue_in_omega(const TorusCircle& seed, const BundleSet& seed_b,
                                  const SystemParams& params, double target_omega,
                                  const ContinuationOptions& opts) {
    if (opts.step <= 0.0) throw ConfigError("continue_in_omega: step must be positive");
    Driver d;
    d.mode = Mode::omega;
    d.base = with_perturber_ratio(params, seed.mu_p);
    d.opts = opts;
    return d.go(seed, seed_b, target_omega);
}

}  // namespace qpt
