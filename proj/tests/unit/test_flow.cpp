#include <doctest.h>

#include <cmath>
#include <random>

#include "qpt/errors.hpp"
#include "qpt/flow.hpp"
#include "qpt/frames.hpp"
#include "support/kepler_oracle.hpp"

using namespace qpt;

namespace {

SystemParams physical(Frame f = Frame::m1m2) { return build_params(PhysicalConstants{}, f); }

SystemParams kepler_params() {
    SystemParams p = with_perturber_ratio(physical(), 0.0);
    p.mu = 0.0;  // pure rotating Kepler problem about the origin
    return p;
}

State bounded_random_state(std::mt19937_64& rng, const SystemParams& p) {
    // annulus around the primary avoiding both moons, near-circular momenta
    std::uniform_real_distribution<double> ang(0.0, two_pi);
    std::uniform_real_distribution<double> rad(0.6, 1.4);
    std::uniform_real_distribution<double> jit(-0.08, 0.08);
    for (;;) {
        const double th = ang(rng);
        const double r = rad(rng);
        const double x = r * std::cos(th) - p.own_mu();
        const double y = r * std::sin(th);
        const double vx = -std::sin(th) / std::sqrt(r) + jit(rng);
        const double vy = std::cos(th) / std::sqrt(r) + jit(rng);
        // momenta from inertial velocity components in the rotating basis
        State s{x, y, vx, vy};
        const double r2 = std::hypot(s.x - p.moon_x(), s.y);
        const MoonPosition m3 = moon_position(0.0, p);
        const double r3 = std::hypot(s.x - m3.x, s.y - m3.y);
        if (r2 > 0.05 && r3 > 0.05) return s;
    }
}

}  // namespace

TEST_CASE("zero-time propagation returns the state exactly") {
    const SystemParams p = physical();
    const State s{0.5, 0.1, -0.2, 0.9};
    const PropagationResult r = propagate(ExtendedState(s, 0.3), 0.0, p);
    CHECK((r.final_state.s - s).norm() == 0.0);
    CHECK(r.stats.steps == 0);
}

TEST_CASE("propagation matches the closed-form Kepler solution over 10 orbits") {
    const SystemParams p = kepler_params();
    const double a = 0.8, e = 0.2;
    const double ra = a * (1.0 + e);
    const double va = std::sqrt(2.0 / ra - 1.0 / a);
    const State s0{ra, 0.0, 0.0, va};  // apoapsis on the positive x-axis
    const double t_end = 10.0 * two_pi * std::pow(a, 1.5);
    PropagationOptions opts;
    opts.rel_tol = 1e-13;
    opts.abs_tol = 1e-13;
    const PropagationResult r = propagate(ExtendedState(s0, 0.0), t_end, p, opts);
    const State ref = oracle::rotating_state_at(s0, t_end);
    CHECK((r.final_state.s - ref).norm() < 1e-10);
    CHECK(r.stats.steps >= 1);
}

TEST_CASE("Jacobi constant drifts below 1e-10 over a resonant period") {
    const SystemParams p = with_perturber_ratio(physical(), 0.0);
    std::mt19937_64 rng(5);
    const State s0 = bounded_random_state(rng, p);
    const double c0 = jacobi_constant(s0, p);
    const PropagationResult r = propagate(ExtendedState(s0, 0.0), 8.0 * std::numbers::pi, p);
    CHECK(std::abs(jacobi_constant(r.final_state.s, p) - c0) < 1e-10);
}

TEST_CASE("propagation is deterministic") {
    const SystemParams p = physical();
    std::mt19937_64 rng(7);
    const State s0 = bounded_random_state(rng, p);
    const PropagationResult a = propagate(ExtendedState(s0, 0.0), 7.7, p);
    const PropagationResult b = propagate(ExtendedState(s0, 0.0), 7.7, p);
    CHECK((a.final_state.s - b.final_state.s).norm() == 0.0);
    CHECK(a.stats.steps == b.stats.steps);
}

TEST_CASE("time reversal returns within 10x the local tolerance") {
    const SystemParams p = physical();
    std::mt19937_64 rng(11);
    for (int i = 0; i < 5; ++i) {
        const State s0 = bounded_random_state(rng, p);
        const PropagationResult fwd = propagate(ExtendedState(s0, 0.0), 5.0, p);
        const PropagationResult back = propagate(fwd.final_state, -5.0, p);
        CHECK((back.final_state.s - s0).norm() < 1e-10);
    }
}

TEST_CASE("stroboscopic map advances the phase by one full turn") {
    const SystemParams p = physical();
    const PropagationResult r =
        propagate(ExtendedState(State{1.2, 0.0, 0.0, 0.9}, 0.0), p.map_period(), p);
    const double wrapped = r.final_state.theta_p;
    CHECK(std::min(wrapped, two_pi - wrapped) < 1e-9);
}

TEST_CASE("map Jacobian is symplectic and matches finite differences") {
    const SystemParams p = physical();
    std::mt19937_64 rng(13);
    const Mat4 j = symplectic_j();
    for (int i = 0; i < 3; ++i) {
        const State s = bounded_random_state(rng, p);
        const MapJacobian mj = stroboscopic_jacobian(s, p);
        CHECK((mj.df.transpose() * j * mj.df - j).norm() < 1e-9);

        const double h = 1e-7;
        for (int c = 0; c < 4; ++c) {
            Vec4 vp = s.vec(), vm = s.vec();
            vp[c] += h;
            vm[c] -= h;
            const Vec4 diff = (stroboscopic_map(State::from_vec(vp), p).vec() -
                               stroboscopic_map(State::from_vec(vm), p).vec()) /
                              (2.0 * h);
            for (int r2 = 0; r2 < 4; ++r2) CHECK(std::abs(mj.df(r2, c) - diff[r2]) < 1e-6);
        }
    }
}

TEST_CASE("map mass derivative matches a central difference in the mass ratio") {
    const SystemParams base = physical();
    std::mt19937_64 rng(17);
    const State s = bounded_random_state(rng, base);
    for (double mu3 : {0.0, 4e-5}) {
        const SystemParams p = with_perturber_ratio(base, mu3);
        const Vec4 d = stroboscopic_mass_derivative(s, p);
        const double h = 1e-7;
        const SystemParams pp = with_perturber_ratio(base, mu3 + h);
        const SystemParams pm = with_perturber_ratio(base, std::max(0.0, mu3 - h));
        const Vec4 fd = (stroboscopic_map(s, pp).vec() - stroboscopic_map(s, pm).vec()) /
                        (pp.mu3 - pm.mu3);
        CHECK((d - fd).norm() < 1e-5);
    }
}

TEST_CASE("k map applications equal one propagation over k periods") {
    const SystemParams p = physical();
    std::mt19937_64 rng(19);
    const State s0 = bounded_random_state(rng, p);
    State mapped = s0;
    for (int k = 0; k < 3; ++k) mapped = stroboscopic_map(mapped, p);
    const PropagationResult direct = propagate(ExtendedState(s0, 0.0), 3.0 * p.map_period(), p);
    CHECK((direct.final_state.s - mapped).norm() < 1e-9);
}

TEST_CASE("frame conjugacy: transform and map commute") {
    const SystemParams a = physical(Frame::m1m2);
    const SystemParams b = params_in_other_frame(a);
    std::mt19937_64 rng(23);
    for (int i = 0; i < 10; ++i) {
        const State s = bounded_random_state(rng, a);
        const State route1 = phi_transform(stroboscopic_map(s, a), 0.0, a);
        const State route2 = stroboscopic_map(phi_transform(s, 0.0, a), b);
        CHECK((route1.vec() - route2.vec()).norm() < 1e-9);
    }
}

TEST_CASE("time-unit coherence across the frame change") {
    const SystemParams a = physical(Frame::m1m2);
    const SystemParams b = params_in_other_frame(a);
    std::mt19937_64 rng(29);
    const State s = bounded_random_state(rng, a);
    const double t = 3.7;  // m1m2 time units
    const double theta3 = (a.omega3 - 1.0) * t;
    const State route1 =
        phi_transform(propagate(ExtendedState(s, 0.0), t, a).final_state.s, theta3, a);
    const State route2 =
        propagate(ExtendedState(phi_transform(s, 0.0, a), 0.0), a.omega3 * t, b).final_state.s;
    CHECK((route1.vec() - route2.vec()).norm() < 1e-9);
}

TEST_CASE("falling into a moon raises the collision error") {
    SystemParams p = with_perturber_ratio(physical(), 0.0);
    PropagationOptions opts;
    opts.collision_floor = 1e-3;
    // start just off the moon, at rest in the rotating frame
    State s{p.moon_x() + 0.004, 0.0, 0.0, 0.0};
    s.px = -s.y;
    s.py = s.x;
    CHECK_THROWS_AS(propagate(ExtendedState(s, 0.0), 40.0, p, opts), CollisionSingularity);
}
