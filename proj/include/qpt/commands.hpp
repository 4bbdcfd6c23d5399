#pragma once

#include <iosfwd>
#include <string>

#include "qpt/continuation.hpp"
#include "qpt/io.hpp"

namespace qpt {

/// Exit-code contract shared by all commands.
inline constexpr int exit_ok = 0;
inline constexpr int exit_warnings = 2;
inline constexpr int exit_failure = 3;
inline constexpr int exit_config = 4;

struct RunConfig {
    std::string constants_file;  // empty: compiled-in defaults
    std::string frame = "m1m2";
    int res_m = 3, res_n = 4;

    // seed
    std::string target_kind = "jacobi";  // jacobi | period
    double target_value = 3.0041;
    std::size_t n_modes = 256;

    // continue
    std::string parameter = "mass";  // mass | omega
    double target = 0.0;
    double step = 8e-6;
    double tail_tol = default_tail_tol;
    std::size_t max_n = 8192;
    double newton_tol = 1e-7;
    int newton_max_iter = 20;
    bool collision_precheck = true;
    bool detect_gaps = false;
    int checkpoint_every = 1;
    bool resume = false;

    std::string input;
    std::string output;  // file (seed/transform) or directory (continue/sample2d/delaunay)

    // sample2d
    int n_points = 16;
    double horizon_periods = 3.0;  // in stroboscopic periods
    int substeps = 128;            // samples per period

    // delaunay
    int circle_points = 32;
    int samples_per_point = 2048;
    int bins = 64;

    // integration
    double rel_tol = 1e-12;
    double abs_tol = 1e-12;
    double collision_floor = 1e-12;

    PhysicalConstants load() const;
    Json echo() const;  // canonical form used for the config hash
    PropagationOptions prop() const;
    NewtonOptions newton() const;
    void validate_common() const;
};

int run_seed(const RunConfig& cfg, std::ostream& log);
int run_continue(const RunConfig& cfg, std::ostream& log);
int run_transform(const RunConfig& cfg, std::ostream& log);
int run_sample2d(const RunConfig& cfg, std::ostream& log);
int run_delaunay(const RunConfig& cfg, std::ostream& log);
int run_info(const RunConfig& cfg, std::ostream& log);

/// Load a seed circle from either an orbit file (converted at cfg.n_modes)
/// or a torus file.
SeedCircle load_seed(const RunConfig& cfg, const SystemParams& params);

}  // namespace qpt
