#include "qpt/commands.hpp"

#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "qpt/delaunay.hpp"
#include "qpt/dynamics.hpp"
#include "qpt/errors.hpp"
#include "qpt/frames.hpp"
#include "qpt/parallel.hpp"

namespace qpt {

namespace fs = std::filesystem;

PhysicalConstants RunConfig::load() const {
    if (constants_file.empty()) {
        PhysicalConstants pc;
        pc.validate();
        return pc;
    }
    return load_constants(constants_file);
}

Json RunConfig::echo() const {
    return Json{{"constants_file", constants_file},
                {"frame", frame},
                {"resonance", {res_m, res_n}},
                {"target_kind", target_kind},
                {"target_value", target_value},
                {"n_modes", n_modes},
                {"parameter", parameter},
                {"target", target},
                {"step", step},
                {"tail_tol", tail_tol},
                {"max_n", max_n},
                {"newton_tol", newton_tol},
                {"newton_max_iter", newton_max_iter},
                {"collision_precheck", collision_precheck},
                {"detect_gaps", detect_gaps},
                {"checkpoint_every", checkpoint_every},
                {"input", input},
                {"output", output},
                {"n_points", n_points},
                {"horizon_periods", horizon_periods},
                {"substeps", substeps},
                {"circle_points", circle_points},
                {"samples_per_point", samples_per_point},
                {"bins", bins},
                {"rel_tol", rel_tol},
                {"abs_tol", abs_tol},
                {"collision_floor", collision_floor}};
}

PropagationOptions RunConfig::prop() const {
    PropagationOptions o;
    o.rel_tol = rel_tol;
    o.abs_tol = abs_tol;
    o.collision_floor = collision_floor;
    return o;
}

NewtonOptions RunConfig::newton() const {
    NewtonOptions o;
    o.tol = newton_tol;
    o.max_iter = newton_max_iter;
    o.prop = prop();
    return o;
}

void RunConfig::validate_common() const {
    frame_from_name(frame);
    if (res_m <= 0 || res_n <= 0) throw ConfigError("resonance indices must be positive");
    if (!is_power_of_two(n_modes)) throw ConfigError("n_modes must be a power of two");
    if (target_kind != "jacobi" && target_kind != "period")
        throw ConfigError("target_kind must be jacobi or period");
    if (parameter != "mass" && parameter != "omega")
        throw ConfigError("parameter must be mass or omega");
    if (checkpoint_every < 1) throw ConfigError("checkpoint_every must be >= 1");
}

namespace {

struct Provenance {
    std::string config_hash;
    std::string constants_hash;
};

Provenance provenance(const RunConfig& cfg, const PhysicalConstants& pc) {
    return Provenance{content_hash(cfg.echo().dump()), content_hash(constants_text(pc))};
}

void stamp(Json& j, const Provenance& pv) {
    j["config_hash"] = pv.config_hash;
    j["constants_hash"] = pv.constants_hash;
    j["produced_by"] = "qptorus";
}

int guarded(std::ostream& log, const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        log << Json{{"error", "config_error"}, {"what", e.what()}}.dump() << "\n";
        return exit_config;
    } catch (const Error& e) {
        log << Json{{"error", e.code()}, {"what", e.what()}}.dump() << "\n";
        return exit_failure;
    } catch (const std::exception& e) {
        log << Json{{"error", "internal"}, {"what", e.what()}}.dump() << "\n";
        return exit_failure;
    }
}

std::string csv_double(double v) {
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

void write_summary_csv(const fs::path& path, const ContinuationRun& run,
                       const SystemParams& params, const PhysicalConstants& pc,
                       const Provenance& pv) {
    const double km = unit_km(params, pc);
    std::ostringstream csv;
    csv << "# qptorus continuation summary; config " << pv.config_hash << "; constants "
        << pv.constants_hash << "\n";
    csv << "param,residual_k,residual_p,lambda_u,lambda_s,min_su_angle,min_divisor,"
           "closest_own_km,closest_pert_km,n_modes,filtered\n";
    for (const auto& e : run.history) {
        csv << csv_double(e.param) << ',' << csv_double(e.report.residual_k) << ','
            << csv_double(e.report.residual_p) << ',' << csv_double(e.b.lambda_u) << ','
            << csv_double(e.b.lambda_s) << ',' << csv_double(e.report.min_su_angle) << ','
            << csv_double(e.report.min_divisor) << ',' << csv_double(e.closest_own * km) << ','
            << csv_double(e.closest_pert * km) << ',' << e.k.n() << ','
            << (e.report.filtered ? 1 : 0) << "\n";
    }
    atomic_write(path, csv.str());
}

}  // namespace

SeedCircle load_seed(const RunConfig& cfg, const SystemParams& params) {
    const Json j = Json::parse(read_file(cfg.input));
    const std::string type = j.value("type", "");
    if (type == "periodic_orbit") {
        const PeriodicOrbit po = orbit_from_json(j);
        if (po.frame != params.frame) throw ConfigError("orbit frame differs from configured frame");
        SeedCircle sc = po_to_circle(po, params, cfg.n_modes, cfg.prop());
        sc.k.meta.lineage = content_hash(j.dump());
        return sc;
    }
    if (type == "torus") {
        SeedCircle sc;
        torus_from_json(j, sc.k, sc.b);
        if (sc.k.frame != params.frame) throw ConfigError("torus frame differs from configured frame");
        return sc;
    }
    throw ConfigError("input file is neither an orbit nor a torus");
}

int run_seed(const RunConfig& cfg, std::ostream& log) {
    return guarded(log, [&] {
        cfg.validate_common();
        const PhysicalConstants pc = cfg.load();
        const Provenance pv = provenance(cfg, pc);
        const SystemParams params = build_params(pc, frame_from_name(cfg.frame));

        const SeedTarget target = cfg.target_kind == "jacobi"
                                      ? SeedTarget::jacobi(cfg.target_value)
                                      : SeedTarget::period(cfg.target_value);
        const PeriodicOrbit po = find_resonant_po(cfg.res_m, cfg.res_n, target, params, cfg.prop());

        Json j = orbit_to_json(po);
        j["omega"] = two_pi * with_perturber_ratio(params, 0.0).map_period() / po.period;
        stamp(j, pv);
        const fs::path out = cfg.output.empty() ? fs::path("orbit.json") : fs::path(cfg.output);
        atomic_write(out, j.dump(2) + "\n");
        log << "seed: " << cfg.res_m << ":" << cfg.res_n << " C=" << std::setprecision(12)
            << po.jacobi << " period=" << po.period << " residual=" << po.residual
            << " lambda_u=" << po.lambda_u << " -> " << out.string() << "\n";
        return exit_ok;
    });
}

int run_continue(const RunConfig& cfg, std::ostream& log) {
    return guarded(log, [&] {
        cfg.validate_common();
        if (cfg.output.empty()) throw ConfigError("continue: output directory required");
        const PhysicalConstants pc = cfg.load();
        const Provenance pv = provenance(cfg, pc);
        SystemParams params = build_params(pc, frame_from_name(cfg.frame));

        const fs::path dir(cfg.output);
        fs::create_directories(dir / "steps");

        SeedCircle seed;
        if (cfg.resume) {
            // pick up from the newest checkpoint
            int best = -1;
            for (const auto& entry : fs::directory_iterator(dir / "steps")) {
                const std::string name = entry.path().filename().string();
                if (name.rfind("step_", 0) == 0) {
                    const int idx = std::stoi(name.substr(5, 5));
                    best = std::max(best, idx);
                }
            }
            if (best < 0) throw ConfigError("resume: no checkpoints in " + dir.string());
            char buf[32];
            std::snprintf(buf, sizeof buf, "step_%05d.json", best);
            StepEntry e = step_from_json(Json::parse(read_file(dir / "steps" / buf)));
            seed.k = std::move(e.k);
            seed.b = std::move(e.b);
            log << "resuming from checkpoint " << best << " at param " << e.param << "\n";
        } else {
            seed = load_seed(cfg, params);
        }

        ContinuationOptions copts;
        copts.step = cfg.step;
        copts.tail_tol = cfg.tail_tol;
        copts.max_n = cfg.max_n;
        copts.collision_precheck = cfg.collision_precheck;
        copts.detect_gaps = cfg.detect_gaps;
        copts.newton = cfg.newton();
        copts.on_step = [&](const ContinuationRun& so_far) {
            const std::size_t i = so_far.history.size() - 1;
            const StepEntry& e = so_far.history.back();
            if (i % std::size_t(cfg.checkpoint_every) == 0) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "step_%05zu.json", i);
                Json js = step_to_json(e);
                stamp(js, pv);
                atomic_write(dir / "steps" / buf, js.dump() + "\n");
            }
            write_summary_csv(dir / "summary.csv", so_far, params, pc, pv);
            log << "step " << i << ": param=" << std::setprecision(12) << e.param
                << " residual=" << e.report.residual_k << " lambda_u=" << e.b.lambda_u
                << " N=" << e.k.n() << "\n";
        };

        ContinuationRun run = cfg.parameter == "mass"
                                  ? continue_in_mass(seed.k, seed.b, params, cfg.target, copts)
                                  : continue_in_omega(seed.k, seed.b, params, cfg.target, copts);

        // final checkpoint regardless of cadence
        if (!run.history.empty()) {
            const std::size_t last = run.history.size() - 1;
            char buf[32];
            std::snprintf(buf, sizeof buf, "step_%05zu.json", last);
            Json js = step_to_json(run.history.back());
            stamp(js, pv);
            atomic_write(dir / "steps" / buf, js.dump() + "\n");
            write_summary_csv(dir / "summary.csv", run, params, pc, pv);
        }
        Json rj = run_summary_json(run);
        stamp(rj, pv);
        atomic_write(dir / "run.json", rj.dump(2) + "\n");

        log << "run " << run_status_name(run.status) << ": " << run.message << " ("
            << run.history.size() << " steps, max N " << run.max_modes_used << ", "
            << run.gaps.size() << " gaps)\n";

        if (run.status != RunStatus::converged) return exit_failure;
        bool warn = !run.gaps.empty();
        for (const auto& e : run.history)
            warn = warn || e.report.filtered || e.report.lambda_product_drift > 1e-6;
        return warn ? exit_warnings : exit_ok;
    });
}

int run_transform(const RunConfig& cfg, std::ostream& log) {
    return guarded(log, [&] {
        cfg.validate_common();
        const PhysicalConstants pc = cfg.load();
        const Provenance pv = provenance(cfg, pc);
        const Json j = Json::parse(read_file(cfg.input));
        SeedCircle in;
        torus_from_json(j, in.k, in.b);
        SystemParams params =
            with_perturber_ratio(build_params(pc, in.k.frame), in.k.mu_p);

        TransformedTorus tr = transform_torus(in.k, in.b, params);
        const double residual = invariance_error(tr.k, tr.params, cfg.prop()).residual;

        Json out = torus_to_json(tr.k, tr.b);
        out["residual"] = residual;
        out["lineage"] = content_hash(j.dump());
        stamp(out, pv);
        const fs::path path = cfg.output.empty() ? fs::path("transformed.json") : fs::path(cfg.output);
        atomic_write(path, out.dump(2) + "\n");
        log << "transform: -> " << frame_name(tr.k.frame) << " residual=" << residual << "\n";
        return residual <= 10.0 * cfg.newton_tol ? exit_ok : exit_warnings;
    });
}

int run_sample2d(const RunConfig& cfg, std::ostream& log) {
    return guarded(log, [&] {
        cfg.validate_common();
        const PhysicalConstants pc = cfg.load();
        const Provenance pv = provenance(cfg, pc);
        SeedCircle in;
        torus_from_json(Json::parse(read_file(cfg.input)), in.k, in.b);
        const SystemParams params =
            with_perturber_ratio(build_params(pc, in.k.frame), in.k.mu_p);

        const double t_p = params.map_period();
        const double horizon = cfg.horizon_periods * t_p;
        const double dt = t_p / double(cfg.substeps);
        const PropagationOptions prop = cfg.prop();

        std::ostringstream csv;
        csv << "# qptorus sample2d; frame " << frame_name(in.k.frame) << "; config "
            << pv.config_hash << "; constants " << pv.constants_hash << "\n";
        csv << "t,point,x,y,px,py\n";
        for (int i = 0; i < cfg.n_points; ++i) {
            const std::size_t idx = std::size_t(i) * in.k.n() / std::size_t(cfg.n_points);
            State s = State::from_vec(in.k.grid[idx]);
            double theta_p = 0.0;
            double t = 0.0;
            csv << csv_double(t) << ',' << i << ',' << csv_double(s.x) << ',' << csv_double(s.y)
                << ',' << csv_double(s.px) << ',' << csv_double(s.py) << "\n";
            while (t < horizon - 1e-12) {
                PropagationResult r = propagate(ExtendedState(s, theta_p), dt, params, prop);
                s = r.final_state.s;
                theta_p = r.final_state.theta_p;
                t += dt;
                csv << csv_double(t) << ',' << i << ',' << csv_double(s.x) << ','
                    << csv_double(s.y) << ',' << csv_double(s.px) << ',' << csv_double(s.py)
                    << "\n";
            }
        }
        const fs::path path = cfg.output.empty() ? fs::path("trajectory.csv") : fs::path(cfg.output);
        atomic_write(path, csv.str());
        log << "sample2d: " << cfg.n_points << " points over " << cfg.horizon_periods
            << " map periods -> " << path.string() << "\n";
        return exit_ok;
    });
}

int run_delaunay(const RunConfig& cfg, std::ostream& log) {
    return guarded(log, [&] {
        cfg.validate_common();
        if (cfg.output.empty()) throw ConfigError("delaunay: output directory required");
        const PhysicalConstants pc = cfg.load();
        const Provenance pv = provenance(cfg, pc);
        SeedCircle in;
        torus_from_json(Json::parse(read_file(cfg.input)), in.k, in.b);
        const SystemParams params =
            with_perturber_ratio(build_params(pc, in.k.frame), in.k.mu_p);

        const double t_p = params.map_period();
        const double golden = 0.6180339887498949;
        const double dt = golden * t_p;
        const PropagationOptions prop = cfg.prop();

        std::vector<DelaunayState> samples;
        samples.reserve(std::size_t(cfg.circle_points) * std::size_t(cfg.samples_per_point));
        std::vector<std::vector<DelaunayState>> per_point(cfg.circle_points);
        parallel_for(std::size_t(cfg.circle_points), [&](std::size_t i) {
            const std::size_t idx = i * in.k.n() / std::size_t(cfg.circle_points);
            State s = State::from_vec(in.k.grid[idx]);
            double theta_p = 0.0;
            auto& local = per_point[i];
            local.reserve(cfg.samples_per_point);
            local.push_back(state_to_delaunay(s, params));
            for (int j = 1; j < cfg.samples_per_point; ++j) {
                PropagationResult r = propagate(ExtendedState(s, theta_p), dt, params, prop);
                s = r.final_state.s;
                theta_p = r.final_state.theta_p;
                local.push_back(state_to_delaunay(s, params));
            }
        });
        for (auto& v : per_point)
            samples.insert(samples.end(), v.begin(), v.end());

        TopologyOptions topt;
        topt.bins = cfg.bins;
        const TopologyReport rep = torus_topology(samples, topt);

        const fs::path dir(cfg.output);
        std::ostringstream l_csv, g_csv;
        l_csv << "# (ell, g, L) point cloud; config " << pv.config_hash << "\nell,g,L\n";
        g_csv << "# (ell, g, G) point cloud; config " << pv.config_hash << "\nell,g,G\n";
        for (const auto& d : samples) {
            l_csv << csv_double(d.ell) << ',' << csv_double(d.g) << ',' << csv_double(d.l) << "\n";
            g_csv << csv_double(d.ell) << ',' << csv_double(d.g) << ',' << csv_double(d.g_action)
                  << "\n";
        }
        atomic_write(dir / "cloud_L.csv", l_csv.str());
        atomic_write(dir / "cloud_G.csv", g_csv.str());

        Json dj{{"samples", samples.size()},
                {"coverage_fraction", rep.coverage_fraction},
                {"action_spread_L", rep.action_spread_l},
                {"action_spread_G", rep.action_spread_g},
                {"classification", torus_topology_name(rep.classification)},
                {"bins", cfg.bins}};
        stamp(dj, pv);
        atomic_write(dir / "diagnostics.json", dj.dump(2) + "\n");
        log << "delaunay: coverage=" << rep.coverage_fraction
            << " classification=" << torus_topology_name(rep.classification) << "\n";
        return exit_ok;
    });
}

int run_info(const RunConfig& cfg, std::ostream& log) {
    return guarded(log, [&] {
        const PhysicalConstants pc = cfg.load();
        const Provenance pv = provenance(cfg, pc);
        const SystemParams a = build_params(pc, Frame::m1m2);
        const SystemParams b = build_params(pc, Frame::m1m3);
        const LimitFrequencies lf = laplace_limit_frequencies(pc);
        Json j{{"m1m2",
                {{"mu", a.mu},
                 {"mu3", a.mu3},
                 {"r13", a.r13},
                 {"omega3", a.omega3},
                 {"map_period", a.map_period()},
                 {"unit_km", unit_km(a, pc)}}},
               {"m1m3",
                {{"mu_bar", b.mu_bar},
                 {"mu2_bar", b.mu2_bar},
                 {"r12", b.r12},
                 {"omega2", b.omega2},
                 {"map_period", b.map_period()},
                 {"unit_km", unit_km(b, pc)}}},
               {"limit", {{"omega1", lf.omega1}, {"omega", lf.omega}}}};
        stamp(j, pv);
        log << j.dump(2) << "\n";
        return exit_ok;
    });
}

}  // namespace qpt
