#include "qpt/seeding.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cmath>
#include <limits>

#include "qpt/dynamics.hpp"
#include "qpt/errors.hpp"

namespace qpt {

namespace {

struct Crossing {
    double t;
    State s;
};

// All y = 0 crossings in (0, t_max], located by chunked marching with
// bisection plus one Newton polish on the crossing time. Chunk boundaries are
// computed multiplicatively so the crossing times carry no summation error.
std::vector<Crossing> scan_crossings(const State& x0, double t_max, const SystemParams& p,
                                     const PropagationOptions& opts) {
    std::vector<Crossing> out;
    const long n_chunks = std::max(2048L, static_cast<long>(t_max / 0.02) + 1);
    const double chunk = t_max / double(n_chunks);
    State s = x0;
    double t = 0.0;
    for (long kk = 1; kk <= n_chunks; ++kk) {
        const double t_next = t_max * double(kk) / double(n_chunks);
        State s_next = propagate(ExtendedState(s, 0.0), t_next - t, p, opts).final_state.s;
        if ((s.y < 0.0) != (s_next.y < 0.0) && t > 1e-6) {
            double lo = 0.0, hi = t_next - t;
            const bool lo_neg = s.y < 0.0;
            for (int it = 0; it < 48; ++it) {
                const double mid = 0.5 * (lo + hi);
                State sm = propagate(ExtendedState(s, 0.0), mid, p, opts).final_state.s;
                if ((sm.y < 0.0) == lo_neg)
                    lo = mid;
                else
                    hi = mid;
            }
            // Newton polish: y(dt + d) ~ y + ydot d
            double dt = 0.5 * (lo + hi);
            State sh = propagate(ExtendedState(s, 0.0), dt, p, opts).final_state.s;
            for (int it = 0; it < 3; ++it) {
                const double ydot = sh.py - sh.x;
                if (ydot == 0.0) break;
                dt -= sh.y / ydot;
                dt = std::clamp(dt, 0.0, t_next - t);
                sh = propagate(ExtendedState(s, 0.0), dt, p, opts).final_state.s;
            }
            out.push_back(Crossing{t + dt, sh});
        }
        s = s_next;
        t = t_next;
    }
    return out;
}

State kepler_guess(int m, int n, const SeedTarget& target, double mu) {
    const double gm1 = 1.0 - mu;
    const double a = std::cbrt(gm1 * (double(n) / double(m)) * (double(n) / double(m)));
    double e = 0.12;
    if (target.kind == SeedTarget::Kind::jacobi) {
        // C ~ gm1/a + 2 sqrt(gm1 a (1 - e^2)) for an orbit about m1
        const double g = target.value - gm1 / a;
        const double e2 = 1.0 - g * g / (4.0 * gm1 * a);
        if (!(g > 0.0) || !(e2 >= 0.0) || !(e2 < 1.0))
            throw NoConvergence("no elliptic Kepler guess for the requested Jacobi constant");
        e = std::sqrt(e2);
    }
    const double ra = a * (1.0 + e);
    const double va = std::sqrt(gm1 * (2.0 / ra - 1.0 / a));
    return State{-mu - ra, 0.0, 0.0, -(va + mu)};
}

Mat4 stm_over(const State& x0, double t, const SystemParams& p, PropagationOptions opts) {
    opts.with_stm = true;
    return *propagate(ExtendedState(x0, 0.0), t, p, opts).stm;
}

}  // namespace

PeriodicOrbit find_resonant_po(int m, int n, SeedTarget target, const SystemParams& params,
                               const PropagationOptions& opts, std::optional<State> guess) {
    if (m <= 0 || n <= 0) throw ConfigError("find_resonant_po: m, n must be positive");
    const SystemParams p = with_perturber_ratio(params, 0.0);
    const double mu = p.own_mu();

    State x0 = guess ? *guess : kepler_guess(m, n, target, mu);
    x0.y = 0.0;
    x0.px = 0.0;  // perpendicular crossing ansatz

    const double t_half = std::numbers::pi * double(n);
    double tau = 0.0;
    State s_half;

    // Period targets go singular as mu -> 0 (the whole family shares one
    // period), so keep the best iterate and stop on stagnation.
    State best_x0 = x0;
    double best_tau = 0.0;
    double best_score = std::numeric_limits<double>::infinity();
    int stagnant = 0;

    for (int iter = 0;; ++iter) {
        if (iter > 60) throw NoConvergence("find_resonant_po: differential correction stalled");
        auto crossings = scan_crossings(x0, 1.35 * t_half, p, opts);
        if (crossings.empty()) throw NoConvergence("find_resonant_po: no axis crossings found");
        std::size_t jidx = 0;
        for (std::size_t i = 1; i < crossings.size(); ++i)
            if (std::abs(crossings[i].t - t_half) < std::abs(crossings[jidx].t - t_half)) jidx = i;
        tau = crossings[jidx].t;
        s_half = crossings[jidx].s;

        const double r1 = s_half.px;
        double r2;
        if (target.kind == SeedTarget::Kind::jacobi)
            r2 = jacobi_constant(x0, p) - target.value;
        else
            r2 = 2.0 * tau - target.value;
        if (std::getenv("QPT_DEBUG_SEED"))
            std::fprintf(stderr, "  it=%d tau=%.15g r1=%.3e r2=%.3e x0=%.15g py0=%.15g\n", iter,
                         tau, r1, r2, x0.x, x0.py);
        if (std::abs(r1) < 1e-12 && std::abs(r2) < 1e-11) break;

        const double score = std::abs(r1) + std::abs(r2);
        if (score < best_score) {
            best_score = score;
            best_x0 = x0;
            best_tau = tau;
            stagnant = 0;
        } else if (++stagnant >= 8) {
            if (best_score < 1e-8) {
                // near-singular target direction; the closure check below is
                // the binding contract
                x0 = best_x0;
                tau = best_tau;
                break;
            }
            throw NoConvergence("find_resonant_po: correction stagnated at residual " +
                                std::to_string(best_score));
        }

        const Mat4 phi = stm_over(x0, tau, p, opts);
        Vec4 f_tau;
        eval_field(s_half, 0.0, p, opts.collision_floor, &f_tau, nullptr, nullptr);
        if (std::abs(f_tau[1]) < 1e-12)
            throw NoConvergence("find_resonant_po: tangential section crossing");

        // section-corrected transition matrix rows
        const Eigen::RowVector4d phi_y = phi.row(1);
        const Eigen::RowVector4d pe_px = phi.row(2) - (f_tau[2] / f_tau[1]) * phi_y;

        double j11 = pe_px[0], j12 = pe_px[3];
        double j21, j22;
        if (target.kind == SeedTarget::Kind::jacobi) {
            Vec4 f0;
            eval_field(x0, 0.0, p, opts.collision_floor, &f0, nullptr, nullptr);
            j21 = 2.0 * f0[2];
            j22 = -2.0 * f0[1];
        } else {
            j21 = -2.0 * phi_y[0] / f_tau[1];
            j22 = -2.0 * phi_y[3] / f_tau[1];
        }

        const double det = j11 * j22 - j12 * j21;
        if (std::abs(det) < 1e-14) throw NoConvergence("find_resonant_po: singular correction");
        double dx = (j22 * r1 - j12 * r2) / det;
        double dpy = (-j21 * r1 + j11 * r2) / det;
        const double mag = std::hypot(dx, dpy);
        const double cap = 0.05;
        if (mag > cap) {
            dx *= cap / mag;
            dpy *= cap / mag;
        }
        x0.x -= dx;
        x0.py -= dpy;
    }

    PeriodicOrbit po;
    po.initial = x0;
    po.period = 2.0 * tau;
    po.jacobi = jacobi_constant(x0, p);
    po.m = m;
    po.n = n;
    po.mu = mu;
    po.frame = p.frame;

    PropagationOptions mopts = opts;
    mopts.with_stm = true;
    PropagationResult full = propagate(ExtendedState(x0, 0.0), po.period, p, mopts);
    po.residual = (full.final_state.s - x0).norm();
    if (po.residual > 1e-10) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3e", po.residual);
        throw NoConvergence(std::string("find_resonant_po: periodicity residual ") + buf);
    }
    po.monodromy = *full.stm;

    Eigen::EigenSolver<Mat4> es(po.monodromy);
    double lu = 0.0, ls = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i) {
        const auto ev = es.eigenvalues()[i];
        const double mag = std::abs(ev);
        if (mag > lu) lu = mag;
        if (mag < ls) ls = mag;
    }
    po.lambda_u = lu;
    po.lambda_s = ls;

    const double winding = rotating_winding(po, p, opts);
    if (std::abs(winding - double(m - n)) > 0.05)
        throw WrongResonance("orbit winds " + std::to_string(winding) +
                             " turns, expected " + std::to_string(m - n));
    return po;
}

double rotating_winding(const PeriodicOrbit& po, const SystemParams& params,
                        const PropagationOptions& opts) {
    const SystemParams p = with_perturber_ratio(params, 0.0);
    const double mu = p.own_mu();
    const std::size_t samples = 4096;
    const double dt = po.period / double(samples);
    State s = po.initial;
    double prev = std::atan2(s.y, s.x + mu);
    double total = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        s = propagate(ExtendedState(s, 0.0), dt, p, opts).final_state.s;
        const double ang = std::atan2(s.y, s.x + mu);
        double d = ang - prev;
        while (d > std::numbers::pi) d -= two_pi;
        while (d < -std::numbers::pi) d += two_pi;
        total += d;
        prev = ang;
    }
    return total / two_pi;
}

RadialRange orbit_radial_range(const PeriodicOrbit& po, const SystemParams& params,
                               std::size_t samples, const PropagationOptions& opts) {
    const SystemParams p = with_perturber_ratio(params, 0.0);
    const double mu = p.own_mu();
    const double dt = po.period / double(samples);
    State s = po.initial;
    RadialRange rr{std::numeric_limits<double>::infinity(), 0.0};
    for (std::size_t i = 0; i < samples; ++i) {
        const double r = std::hypot(s.x + mu, s.y);
        rr.r_min = std::min(rr.r_min, r);
        rr.r_max = std::max(rr.r_max, r);
        s = propagate(ExtendedState(s, 0.0), dt, p, opts).final_state.s;
    }
    return rr;
}

std::vector<FamilyEntry> po_family_sweep(int m, int n, double jacobi_from, double jacobi_to,
                                         int steps, const SystemParams& params,
                                         const PropagationOptions& opts) {
    if (steps < 1) throw ConfigError("po_family_sweep: steps must be >= 1");
    std::vector<FamilyEntry> family;
    std::optional<State> guess;
    const double rp = params.perturber_radius();
    for (int i = 0; i <= steps; ++i) {
        const double c = jacobi_from + (jacobi_to - jacobi_from) * double(i) / double(steps);
        PeriodicOrbit po = find_resonant_po(m, n, SeedTarget::jacobi(c), params, opts, guess);
        FamilyEntry fe;
        fe.po = po;
        fe.radial = orbit_radial_range(po, params, 4096, opts);
        fe.crosses_perturber_radius = fe.radial.r_min < rp && rp < fe.radial.r_max;
        guess = po.initial;
        family.push_back(std::move(fe));
    }
    return family;
}

SeedCircle po_to_circle(const PeriodicOrbit& po, const SystemParams& params, std::size_t n_modes,
                        const PropagationOptions& opts) {
    if (!is_power_of_two(n_modes) || n_modes < min_modes)
        throw ConfigError("po_to_circle: n_modes must be a power of two >= 32");
    const SystemParams p = with_perturber_ratio(params, 0.0);
    const std::size_t n = n_modes;
    const double t_orbit = po.period;
    const double t_map = p.map_period();

    // sample the orbit and accumulate segment transition matrices
    std::vector<Vec4> grid(n);
    std::vector<Vec4> field(n);
    std::vector<Mat4> transport(n);  // Phi(0 -> t_j)
    PropagationOptions so = opts;
    so.with_stm = true;
    State s = po.initial;
    Mat4 acc = Mat4::Identity();
    for (std::size_t j = 0; j < n; ++j) {
        grid[j] = s.vec();
        Vec4 f;
        eval_field(s, 0.0, p, opts.collision_floor, &f, nullptr, nullptr);
        field[j] = f;
        transport[j] = acc;
        PropagationResult r = propagate(ExtendedState(s, 0.0), t_orbit / double(n), p, so);
        acc = *r.stm * acc;
        s = r.final_state.s;
    }
    const Mat4 monodromy = acc;

    Eigen::EigenSolver<Mat4> es(monodromy);
    int iu = -1, is = -1;
    double lu = 1.0, ls = 1.0;
    for (int i = 0; i < 4; ++i) {
        const auto ev = es.eigenvalues()[i];
        if (std::abs(ev.imag()) > 1e-6 * std::max(1.0, std::abs(ev.real()))) continue;
        if (ev.real() > lu) {
            lu = ev.real();
            iu = i;
        }
        if (ev.real() < ls && ev.real() > 0.0) {
            ls = ev.real();
            is = i;
        }
    }
    if (iu < 0 || is < 0 || std::abs(lu - 1.0) < 1e-6)
        throw BundleDegenerate("orbit is not hyperbolic enough to carry a bundle");

    Vec4 vu = es.eigenvectors().col(iu).real();
    Vec4 vs = es.eigenvectors().col(is).real();
    vs.normalize();
    const double su = symplectic_product(vs, vu);
    if (std::abs(su) < 1e-12)
        throw BundleDegenerate("stable/unstable pair symplectically degenerate");
    vu /= su;

    // conjugate-center direction: symplectically orthogonal to the hyperbolic
    // pair, Euclid-orthogonal to the tangent, normalized against it
    const Vec4 f0 = field[0];
    Eigen::Matrix<double, 3, 4> cond;
    const Mat4 jmat = symplectic_j();
    cond.row(0) = (jmat.transpose() * vu).transpose();
    cond.row(1) = (jmat.transpose() * vs).transpose();
    cond.row(2) = f0.transpose();
    Eigen::FullPivLU<Eigen::Matrix<double, 3, 4>> lu_dec(cond);
    lu_dec.setThreshold(1e-10);
    const auto kernel = lu_dec.kernel();
    if (kernel.cols() < 1) throw BundleDegenerate("no conjugate-center direction found");
    Vec4 w0 = kernel.col(0);
    const Vec4 p1_0 = (t_orbit / two_pi) * f0;
    const double norm_c = symplectic_product(p1_0, w0);
    if (std::abs(norm_c) < 1e-12) throw BundleDegenerate("degenerate center normalization");
    w0 /= norm_c;

    // twist of the center block over one orbit period
    const Vec4 jordan = monodromy * w0 - w0;
    const double c_twist = jordan.dot(f0) / f0.squaredNorm();

    SeedCircle out;
    out.k.omega = two_pi * t_map / t_orbit;
    out.k.frame = p.frame;
    out.k.mu_p = 0.0;
    out.k.grid = std::move(grid);
    out.k.meta.res_m = po.m;
    out.k.meta.res_n = po.n;

    out.b.p.resize(n);
    out.b.shear.assign(n, 2.0 * std::numbers::pi * c_twist * t_map / (t_orbit * t_orbit));
    out.b.lambda_s = std::pow(ls, t_map / t_orbit);
    out.b.lambda_u = std::pow(lu, t_map / t_orbit);
    for (std::size_t j = 0; j < n; ++j) {
        const double tj = t_orbit * double(j) / double(n);
        const double frac = tj / t_orbit;
        Mat4& m = out.b.p[j];
        m.col(0) = (t_orbit / two_pi) * field[j];
        m.col(1) = transport[j] * w0 - (c_twist * frac) * field[j];
        m.col(2) = std::pow(ls, -frac) * (transport[j] * vs);
        m.col(3) = std::pow(lu, -frac) * (transport[j] * vu);
    }
    rebalance_bundle(out.b);
    return out;
}

}  // namespace qpt
