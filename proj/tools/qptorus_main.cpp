#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "qpt/commands.hpp"

namespace {

void add_common(CLI::App* sub, qpt::RunConfig& cfg) {
    sub->add_option("--constants", cfg.constants_file,
                    "key=value constants file (default: built-in values)")
        ->envname("QPTORUS_CONSTANTS");
    sub->add_option("--frame", cfg.frame, "rotating frame: m1m2 or m1m3");
    sub->add_option("--rel-tol", cfg.rel_tol, "integrator relative tolerance");
    sub->add_option("--abs-tol", cfg.abs_tol, "integrator absolute tolerance");
    sub->add_option("--collision-floor", cfg.collision_floor, "body-distance floor");
    sub->set_config("--config", "", "read options from a key=value config file");
    sub->allow_config_extras(false);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"resonant invariant circles of periodically perturbed planar three-body models"};
    app.require_subcommand(1);

    qpt::RunConfig cfg;

    auto* seed = app.add_subcommand("seed", "correct a resonant periodic orbit");
    add_common(seed, cfg);
    seed->add_option("-m,--m", cfg.res_m, "spacecraft revolutions");
    seed->add_option("-n,--n", cfg.res_n, "moon revolutions");
    seed->add_option("--target-kind", cfg.target_kind, "jacobi or period");
    seed->add_option("--target-value", cfg.target_value, "Jacobi constant or orbit period");
    seed->add_option("-o,--output", cfg.output, "orbit file to write");

    auto* cont = app.add_subcommand("continue", "continue a circle in mass ratio or rotation number");
    add_common(cont, cfg);
    cont->add_option("-i,--input", cfg.input, "seed orbit or torus file");
    cont->add_option("-o,--output", cfg.output, "run directory")->required();
    cont->add_option("--parameter", cfg.parameter, "mass or omega");
    cont->add_option("--target", cfg.target, "target parameter value")->required();
    cont->add_option("--step", cfg.step, "continuation step size");
    cont->add_option("--n-modes", cfg.n_modes, "grid size when seeding from an orbit");
    cont->add_option("--tail-tol", cfg.tail_tol, "tail threshold triggering mode doubling");
    cont->add_option("--max-n", cfg.max_n, "largest allowed grid size");
    cont->add_option("--newton-tol", cfg.newton_tol, "corrector residual tolerance");
    cont->add_option("--checkpoint-every", cfg.checkpoint_every, "steps between checkpoints");
    cont->add_flag("--resume", cfg.resume, "continue from the newest checkpoint in the run dir");
    cont->add_flag("!--no-collision-precheck", cfg.collision_precheck,
                   "disable the moon-radius crossing check");
    cont->add_flag("--detect-gaps", cfg.detect_gaps, "record resonance gaps in omega sweeps");

    auto* trans = app.add_subcommand("transform", "carry a torus to the other rotating frame");
    add_common(trans, cfg);
    trans->add_option("-i,--input", cfg.input, "torus file")->required();
    trans->add_option("-o,--output", cfg.output, "transformed torus file");
    trans->add_option("--newton-tol", cfg.newton_tol, "residual warning threshold (x10)");

    auto* samp = app.add_subcommand("sample2d", "integrate circle points into flow-torus samples");
    add_common(samp, cfg);
    samp->add_option("-i,--input", cfg.input, "torus file")->required();
    samp->add_option("-o,--output", cfg.output, "trajectory CSV");
    samp->add_option("--points", cfg.n_points, "number of circle points to integrate");
    samp->add_option("--horizon", cfg.horizon_periods, "integration time in map periods");
    samp->add_option("--substeps", cfg.substeps, "samples per map period");

    auto* dela = app.add_subcommand("delaunay", "action-angle diagnostics of a sampled torus");
    add_common(dela, cfg);
    dela->add_option("-i,--input", cfg.input, "torus file")->required();
    dela->add_option("-o,--output", cfg.output, "output directory")->required();
    dela->add_option("--circle-points", cfg.circle_points, "trajectory seeds on the circle");
    dela->add_option("--samples-per-point", cfg.samples_per_point, "samples along each trajectory");
    dela->add_option("--bins", cfg.bins, "angle-grid resolution");

    auto* info = app.add_subcommand("info", "print normalized parameters and frequencies");
    add_common(info, cfg);

    CLI11_PARSE(app, argc, argv);

    if (seed->parsed()) return qpt::run_seed(cfg, std::cout);
    if (cont->parsed()) return qpt::run_continue(cfg, std::cout);
    if (trans->parsed()) return qpt::run_transform(cfg, std::cout);
    if (samp->parsed()) return qpt::run_sample2d(cfg, std::cout);
    if (dela->parsed()) return qpt::run_delaunay(cfg, std::cout);
    if (info->parsed()) return qpt::run_info(cfg, std::cout);
    return qpt::exit_config;
}
