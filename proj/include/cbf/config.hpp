#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cbf/catalog.hpp"
#include "cbf/inverse.hpp"
#include "cbf/stability.hpp"

namespace cbf {

struct ConfigError {
    int line = 0;  // 0 for cross-key constraint violations
    std::string message;
};

/// Resolved run configuration. Parsed from flat `key = value` text with
/// `#` comments and dotted keys; see README for the key list.
struct RunConfig {
    std::string mode;  // forward | inverse | verify | sweep | manufacture

    int d = 2;
    int n = 32;
    double L = 2.0 * 3.14159265358979323846;
    CbfParams params;  // d/L mirrored from the grid block

    double T = 1.0;
    int nt = 512;
    std::string record = "landmarks";  // landmarks | all | stride
    int record_stride = 1;

    std::string u0_src = "zero";
    std::string f_src = "zero";
    std::string phi_src;
    std::string grad_psi_src;

    std::string g_kind = "constant";  // constant | separable
    double g_value = 1.0;
    std::string g_space = "one";
    std::string g_time = "one";  // one | exp | cos
    double g_lambda = 0.0;
    double g_omega = 1.0;
    double g_offset = 0.0;

    int inv_max_iters = 200;
    double inv_rel_tol = 1e-8;
    double inv_theta = 1.0;
    std::string inv_ball = "apriori";  // apriori | unbounded | user
    double inv_ball_radius = 0.0;
    std::string inv_start = "zero";  // zero | random
    int inv_n = 0;
    int inv_nt = 0;  // 0 = use time.nt

    std::string sweep_target = "u0";  // u0 | phi | grad_psi | g | g_t
    double sweep_delta0 = 1e-1;
    int sweep_rungs = 5;
    double sweep_ratio = 0.5;
    std::uint64_t sweep_seed = 777;
    int threads = 1;

    std::string out_dir = "out";
    std::uint64_t seed = 12345;
};

struct LoadResult {
    RunConfig config;
    std::vector<ConfigError> errors;
    bool ok() const { return errors.empty(); }
};

/// Parses and fully validates; every violated constraint is reported, not
/// just the first.
LoadResult load_config(const std::string& path);
LoadResult parse_config_text(const std::string& text);

/// Deterministic echo of the resolved configuration (provenance record).
std::vector<std::pair<std::string, std::string>> config_echo(const RunConfig& cfg);

// builders gluing a config to the solver objects
GridPtr build_grid(const RunConfig& cfg);
Modulation build_g(const RunConfig& cfg, const GridPtr& grid);
/// src one of: zero | catalog:<name> | path:<file> | random:<kmax>.
/// project selects Leray projection after construction.
VectorField build_field(const std::string& src, const GridPtr& grid, bool project,
                        std::uint64_t seed);
FixedPointConfig build_fp_config(const RunConfig& cfg);
PerturbationSpec build_perturbation(const RunConfig& cfg);
RecordPolicy build_record_policy(const RunConfig& cfg, bool grad_p = false, bool u_t = true);

}  // namespace cbf
