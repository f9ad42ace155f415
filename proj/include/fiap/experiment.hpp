#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fiap/model.hpp"
#include "fiap/ph.hpp"
#include "fiap/rmf.hpp"
#include "fiap/stats.hpp"

namespace fiap {

inline constexpr const char* kVersion = "0.1.0";

struct ExperimentConfig {
    std::string mode;
    nlohmann::json raw;  // canonical config, hashed into the manifest
    std::uint64_t seed = 0;
    std::vector<int> m_list;
    int n_paths = 2000;
    int ph_paths = 20000;  // paths per fixed-point iterate
    int grid = 200;
    double tol = 0.1;
    int max_iter = 12;
    std::filesystem::path out_dir = "out";
    double slope_lo = -0.8;
    double slope_hi = -0.2;
    double residual_band = 0.25;

    static ExperimentConfig from_file(const std::filesystem::path& path);
    static ExperimentConfig from_json(const nlohmann::json& j);
    CFIAPSpec model() const;
};

// Raw per-path samples of one RMF sweep point.
struct RmfSweepData {
    int M = 0;
    int node = 0;
    std::vector<double> a_T;        // weighted arrivals to (0, node) at horizon
    std::vector<double> a_half;     // and at horizon / 2
    std::vector<double> lam_T_r0;   // intensity of (0, node) at horizon
    std::vector<double> lam_T_r1;   // intensity of (1, node) at horizon
    std::vector<double> lam_half_r0;
    std::vector<std::vector<double>> counts;  // per path: departures per replica at node
};

// Collects per-path samples; departure-count rows (for the replica-average
// statistics) are kept for at most `count_paths` paths (0 keeps all).
RmfSweepData collect_rmf_samples(const CFIAPSpec& spec, int M, int n_paths,
                                 std::uint64_t seed, int node = 0, int count_paths = 0);

// Comparison statistics between one RMF sweep point and the PH limit.
struct MStats {
    int M = 0;
    Estimate tv_arrival_T;
    Estimate tv_arrival_half;
    BinnedTv tv_intensity_T;
    BinnedTv tv_intensity_half;
    Estimate tlln;
    Estimate chen_stein;
    Estimate replica_pair_gap;
    bool pair_gap_computed = false;  // needs >= 1000 paths and a nondegenerate law
    bool arrival_exact = false;      // exact integer supports vs limit pmf
};

// Exact pmf of the limit weighted arrival count to `node` at time t (integer
// constant weights): convolution of weight-scaled Poisson laws.
Pmf limit_arrival_pmf(const CFIAPSpec& spec, const RateFunction& rates, int node,
                      double t);

MStats compare_m(const RmfSweepData& data, const CFIAPSpec& spec,
                 const RateFunction& rates, const PhBatchResult& ph,
                 std::uint64_t stat_seed);

int run_experiment(const ExperimentConfig& config);

}  // namespace fiap
