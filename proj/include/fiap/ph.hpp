#pragma once

#include <vector>

#include "fiap/model.hpp"
#include "fiap/rng.hpp"

namespace fiap {

// Piecewise-constant nonnegative rate functions on a uniform grid over
// [0, horizon]; one row of cells per node. Integrals are exact left-constant
// Riemann sums.
struct RateFunction {
    int K = 0;
    double horizon = 0.0;
    int cells = 0;
    std::vector<double> values;  // K * cells

    static RateFunction constant(int K, double horizon, int cells, double rate);

    double delta() const { return horizon / cells; }
    double value(int node, double t) const;
    double& cell(int node, int c) {
        return values[static_cast<std::size_t>(node) * static_cast<std::size_t>(cells) +
                      static_cast<std::size_t>(c)];
    }
    double cell(int node, int c) const {
        return values[static_cast<std::size_t>(node) * static_cast<std::size_t>(cells) +
                      static_cast<std::size_t>(c)];
    }
    double integral(int node, double t) const;  // over [0, t]
    double sup_distance(const RateFunction& other) const;
};

// One sampled trajectory of the limit dynamics: arrivals to node i from each
// j != i are independent Poisson streams with the given mean rates; own
// departures are thinned against the node's intensity. Nodes share no
// randomness, so the K intensity paths are independent.
struct PhPathResult {
    std::vector<double> lam_T;          // intensity at horizon, per node
    std::vector<double> lam_half;       // intensity at horizon / 2
    std::vector<double> arrivals_T;     // weighted arrival totals at horizon
    std::vector<double> arrivals_half;  // at horizon / 2
    std::vector<long long> dep_counts;  // own departures on [0, horizon]
};

PhPathResult simulate_ph_path(const CFIAPSpec& spec, const RateFunction& rates,
                              double horizon, std::uint64_t path_seed,
                              std::vector<double>* cell_dep_accum = nullptr);

struct PhBatchResult {
    int n_paths = 0;
    int K = 0;
    // Flat n_paths x K arrays, path-major.
    std::vector<double> lam_T;
    std::vector<double> lam_half;
    std::vector<double> arrivals_T;
    std::vector<double> arrivals_half;

    double at(const std::vector<double>& field, int path, int node) const {
        return field[static_cast<std::size_t>(path) * static_cast<std::size_t>(K) +
                     static_cast<std::size_t>(node)];
    }
    // All paths' values for one node.
    std::vector<double> column(const std::vector<double>& field, int node) const;
};

PhBatchResult simulate_ph(const CFIAPSpec& spec, const RateFunction& rates,
                          int n_paths, double horizon, std::uint64_t seed);

// One application of the mean-rate map: feed Poisson inputs with rates_in,
// return the per-cell Monte-Carlo mean intensity of each node (estimated by
// its departure counts) together with per-cell standard errors.
struct PhiResult {
    RateFunction rates;
    std::vector<double> cell_stderr;  // K * cells
};

PhiResult phi_iterate(const CFIAPSpec& spec, const RateFunction& rates_in,
                      int n_paths, std::uint64_t seed);

struct FixedPointResult {
    RateFunction rates;
    std::vector<double> cell_stderr;
    std::vector<double> sup_deltas;    // per iteration
    std::vector<double> noise_floors;  // 3 * max cell stderr, per iteration
    bool converged = false;
    int iterations = 0;
};

// Iterates phi_iterate from the constant initial guess E[lam(0)] until the
// sup-norm change drops under tol + noise floor, or max_iter. Non-convergence
// is reported through the flag, not an exception.
FixedPointResult solve_fixed_point(const CFIAPSpec& spec, int cells, double tol,
                                   int max_iter, int n_paths, std::uint64_t seed);

}  // namespace fiap
