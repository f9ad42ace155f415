#pragma once

#include <functional>
#include <map>
#include <vector>

#include "fiap/model.hpp"
#include "fiap/rng.hpp"

namespace fiap {

// Finite probability mass function over the integers.
struct Pmf {
    std::map<long long, double> mass;

    double prob(long long v) const {
        const auto it = mass.find(v);
        return it == mass.end() ? 0.0 : it->second;
    }
    double total() const;
    void add(long long v, double p) { mass[v] += p; }
};

// Discrete-time fragmentation-interaction-aggregation process: integer state
// per node, activation probabilities sigma_i (sigma_i(0) = 0, nondecreasing),
// fragmentation maps g1 (activated) / g2 (not activated), and bounded integer
// interaction functions h[j][i] of the source state.
struct DFiapSpec {
    int K = 0;
    std::vector<std::function<long long(long long)>> g1;
    std::vector<std::function<long long(long long)>> g2;
    std::vector<std::vector<std::function<long long(long long)>>> h;  // h[j][i]
    std::vector<std::function<double(long long)>> sigma;
};

// The delta-step Markov chain built from an integer-state GL model: resets
// r_i, integer weights mu[j][i], spike rate map sigma_rate, step length
// delta. Per-step spike probability is 1 - exp(-sigma_rate(state) * delta).
struct DeltaChainSpec {
    int K = 0;
    std::vector<long long> reset;
    std::vector<std::vector<long long>> mu;  // mu[j][i]
    std::function<double(long long)> sigma_rate;
    double delta = 0.0;

    double spike_prob(long long state) const;
    // The corresponding discrete FIAP: g1 = reset, g2 = identity, h = mu,
    // sigma(x) = 1 - exp(-sigma_rate(x) * delta).
    DFiapSpec to_dfiap() const;
};

// Builds the delta chain of an integer-parameter GL spec (requires infinite
// tau, integer reset and weights); the spike rate is the intensity itself.
DeltaChainSpec delta_chain_from_gl(const CFIAPSpec& spec, double delta);

// Synchronous one-step updates. States are K-vectors (single network) or
// M*K replica-major matrices.
std::vector<long long> step_dfiap(const std::vector<long long>& state,
                                  const DFiapSpec& spec, RngStream& rng);
std::vector<long long> step_rmf_dfiap(const std::vector<long long>& state,
                                      const DFiapSpec& spec, int M, RngStream& rng);
std::vector<long long> delta_step(const std::vector<long long>& state,
                                  const DeltaChainSpec& spec, int M, RngStream& rng);

// Exact law of the arrival update A_{m,i} over one delta step. Enumeration
// budget (M-1)(K-1) <= 22; larger instances are refused.
Pmf arrival_pmf_exact(const std::vector<long long>& state, const DeltaChainSpec& spec,
                      int M, int m, int i);
// Exact single-coordinate transition probability from state[m][i] to l.
double transition_prob_exact(const std::vector<long long>& state,
                             const DeltaChainSpec& spec, int M, int m, int i,
                             long long l);
// All reachable targets with their probabilities.
Pmf transition_row_exact(const std::vector<long long>& state, const DeltaChainSpec& spec,
                         int M, int m, int i);

// Same two kernels for a general discrete RMF FIAP; used to check that every
// delta chain is an RMF FIAP with sigma_delta(x) = 1 - exp(-sigma(x) delta).
Pmf rmf_fiap_arrival_pmf(const std::vector<long long>& state, const DFiapSpec& spec,
                         int M, int m, int i);
double rmf_fiap_transition_prob(const std::vector<long long>& state, const DFiapSpec& spec,
                                int M, int m, int i, long long l);

struct GeneratorResidualRow {
    double delta;
    double rate_of_change;    // (P_delta[f] - f) / delta at the state
    double generator_value;   // exact generator applied to f at the state
    double residual;          // |rate_of_change - generator_value|
};

// Exact small-instance comparison of the delta-chain transition operator
// against the continuous-time generator; residuals should shrink linearly
// in delta.
std::vector<GeneratorResidualRow> generator_residual(
    const std::function<double(const std::vector<long long>&)>& test_fn,
    const std::vector<long long>& state, const DeltaChainSpec& base, int M,
    const std::vector<double>& delta_list);

}  // namespace fiap
