#include "qpt/flow.hpp"

#include "qpt/parallel.hpp"

namespace qpt {

namespace {

// Joint right-hand side over raw storage:
//   y[0..3]   state
//   y[4..19]  STM, column-major            (if with_stm)
//   y[s..s+3] mass sensitivity w           (if with_mass; s = 4 or 20)
struct JointRhs {
    const SystemParams& p;
    double theta_p0;
    double phase_rate;
    double floor;
    bool with_stm;
    bool with_mass;

    int dim() const { return 4 + (with_stm ? 16 : 0) + (with_mass ? 4 : 0); }

    void operator()(double t, const double* y, double* dy) const {
        const State s{y[0], y[1], y[2], y[3]};
        const double theta = theta_p0 + phase_rate * t;
        Vec4 f;
        Mat4 a;
        Vec4 dmu;
        const bool need_a = with_stm || with_mass;
        eval_field(s, theta, p, floor, &f, need_a ? &a : nullptr, with_mass ? &dmu : nullptr);
        dy[0] = f[0];
        dy[1] = f[1];
        dy[2] = f[2];
        dy[3] = f[3];
        int off = 4;
        if (with_stm) {
            Eigen::Map<const Mat4> phi(y + 4);
            Eigen::Map<Mat4> dphi(dy + 4);
            dphi = a * phi;
            off = 20;
        }
        if (with_mass) {
            Eigen::Map<const Vec4> w(y + off);
            Eigen::Map<Vec4> dw(dy + off);
            dw = a * w + dmu;
        }
    }
};

}  // namespace

PropagationResult propagate(const ExtendedState& s0, double dt, const SystemParams& p,
                            const PropagationOptions& opts) {
    JointRhs rhs{p, s0.theta_p, p.perturber_rate() - 1.0, opts.collision_floor, opts.with_stm,
                 opts.with_mass};

    double y[24] = {s0.s.x, s0.s.y, s0.s.px, s0.s.py};
    int off = 4;
    if (opts.with_stm) {
        Eigen::Map<Mat4>(y + 4) = Mat4::Identity();
        off = 20;
    }
    // mass sensitivity always starts from w = 0 (already zeroed)

    PropagationResult out;
    if (dt == 0.0) {
        out.final_state = s0;
        if (opts.with_stm) out.stm = Mat4::Identity();
        if (opts.with_mass) out.dstate_dmu = Vec4::Zero();
        return out;
    }

    Dop853<24> stepper;
    stepper.init(rhs.dim(), 0.0, y, opts.integrate_options());
    stepper.integrate_to(rhs, dt);

    const double* yf = stepper.y();
    out.final_state =
        ExtendedState(State{yf[0], yf[1], yf[2], yf[3]}, s0.theta_p + rhs.phase_rate * dt);
    if (opts.with_stm) out.stm = Eigen::Map<const Mat4>(yf + 4);
    if (opts.with_mass) out.dstate_dmu = Eigen::Map<const Vec4>(yf + off);
    out.stats = stepper.stats();
    return out;
}

State stroboscopic_map(const State& s, const SystemParams& p, const PropagationOptions& opts) {
    PropagationResult r = propagate(ExtendedState(s, 0.0), p.map_period(), p, opts);
    return r.final_state.s;
}

MapJacobian stroboscopic_jacobian(const State& s, const SystemParams& p, PropagationOptions opts) {
    opts.with_stm = true;
    PropagationResult r = propagate(ExtendedState(s, 0.0), p.map_period(), p, opts);
    return MapJacobian{r.final_state.s, *r.stm};
}

Vec4 stroboscopic_mass_derivative(const State& s, const SystemParams& p, PropagationOptions opts) {
    opts.with_mass = true;
    PropagationResult r = propagate(ExtendedState(s, 0.0), p.map_period(), p, opts);
    return *r.dstate_dmu;
}

MapBatchResult stroboscopic_map_batch(const std::vector<Vec4>& points, const SystemParams& p,
                                      const PropagationOptions& opts) {
    MapBatchResult out;
    const std::size_t n = points.size();
    out.f.resize(n);
    if (opts.with_stm) out.df.resize(n);
    if (opts.with_mass) out.dfdmu.resize(n);
    parallel_for(n, [&](std::size_t i) {
        PropagationResult r =
            propagate(ExtendedState(State::from_vec(points[i]), 0.0), p.map_period(), p, opts);
        out.f[i] = r.final_state.s.vec();
        if (opts.with_stm) out.df[i] = *r.stm;
        if (opts.with_mass) out.dfdmu[i] = *r.dstate_dmu;
    });
    return out;
}

}  // namespace qpt
