#pragma once

#include "tsh/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>

namespace tsh {

// Exit codes shared by the CLI and the in-process command runner.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInfeasible = 2;
inline constexpr int kExitStageFailure = 3;
inline constexpr int kExitVerifyFailure = 4;

struct RunConfig {
    std::string command; // transship | sssp | embed | spanner | route-demo | verify | gen
    std::string graph_path;
    std::string demand_path;
    std::string flow_path;
    std::string potential_path;
    std::string tree_path;
    std::string output_path;
    std::string format = "json"; // json | tsv
    std::string generator = "random-connected";

    double epsilon = 0.1;
    std::uint64_t seed = 1;
    int source = 0;
    int samples_s = 0;      // routing s; 0 = default
    double grid_base_w = 0; // routing w; 0 = default
    double spanner_k = 0;   // 0 = default
    double kappa_override = 0;
    int base_threshold = 512;
    int jl_dim = 0;
    int verify_cap = 512;
    int gen_n = 16;
    int gen_m = 32;
    double gen_weight_spread = 8.0;
    int gen_demand_max = 0; // >0: also write <output>.demands
    int route_demo_levels = 5;
    bool dump_matrix = false;
    bool with_timings = true;
};

struct CommandResult {
    int exit_code = kExitOk;
    nlohmann::json report;
};

PipelineConfig pipeline_config_from(const RunConfig& rc);

CommandResult run_command(const RunConfig& rc);

// Flat key\tvalue projection of a JSON report for spreadsheets.
std::string report_to_tsv(const nlohmann::json& report);

} // namespace tsh
