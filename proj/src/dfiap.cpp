#include "fiap/dfiap.hpp"

#include <cmath>
#include <stdexcept>

namespace fiap {

namespace {

constexpr int kEnumerationBudget = 22;

std::size_t flat(int m, int i, int K) {
    return static_cast<std::size_t>(m) * static_cast<std::size_t>(K) +
           static_cast<std::size_t>(i);
}

void check_budget(int M, int K) {
    const long long work = static_cast<long long>(M - 1) * (K - 1);
    if (work > kEnumerationBudget) {
        throw std::invalid_argument(
            "exact enumeration refused: (M-1)(K-1) = " + std::to_string(work) +
            " exceeds the budget of " + std::to_string(kEnumerationBudget));
    }
}

// Distribution of a sum of independent two-point variables taking value
// w_k with probability p_k and 0 otherwise.
Pmf convolve_bernoulli_sum(const std::vector<std::pair<long long, double>>& terms) {
    Pmf pmf;
    pmf.mass[0] = 1.0;
    for (const auto& [w, p] : terms) {
        if (p == 0.0 || w == 0) {
            // zero weight contributes nothing; zero probability keeps mass at 0
            continue;
        }
        Pmf next;
        for (const auto& [v, q] : pmf.mass) {
            next.add(v, q * (1.0 - p));
            next.add(v + w, q * p);
        }
        pmf = std::move(next);
    }
    return pmf;
}

}  // namespace

double Pmf::total() const {
    double acc = 0.0;
    for (const auto& [v, p] : mass) {
        (void)v;
        acc += p;
    }
    return acc;
}

double DeltaChainSpec::spike_prob(long long state) const {
    return 1.0 - std::exp(-sigma_rate(state) * delta);
}

DFiapSpec DeltaChainSpec::to_dfiap() const {
    DFiapSpec spec;
    spec.K = K;
    const double d = delta;
    const auto rate = sigma_rate;
    for (int i = 0; i < K; ++i) {
        const long long r = reset[static_cast<std::size_t>(i)];
        spec.g1.push_back([r](long long) { return r; });
        spec.g2.push_back([](long long x) { return x; });
        spec.sigma.push_back([rate, d](long long x) { return 1.0 - std::exp(-rate(x) * d); });
    }
    for (int j = 0; j < K; ++j) {
        std::vector<std::function<long long(long long)>> row;
        for (int i = 0; i < K; ++i) {
            const long long w = mu[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
            row.push_back([w](long long) { return w; });
        }
        spec.h.push_back(std::move(row));
    }
    return spec;
}

DeltaChainSpec delta_chain_from_gl(const CFIAPSpec& spec, double delta) {
    if (spec.builtin_kind() != BuiltinModel::gl_excitatory) {
        throw std::invalid_argument("delta_chain_from_gl requires an excitatory GL spec");
    }
    if (!std::isinf(spec.gl_tau())) {
        throw std::invalid_argument("delta chain requires tau = inf (no exponential decay)");
    }
    const double r = spec.gl_reset();
    if (std::abs(r - std::round(r)) > 1e-12 || r < 1.0) {
        throw std::invalid_argument("delta chain requires integer reset >= 1");
    }
    DeltaChainSpec chain;
    chain.K = spec.K();
    chain.delta = delta;
    chain.reset.assign(static_cast<std::size_t>(spec.K()), std::llround(r));
    for (int j = 0; j < spec.K(); ++j) {
        std::vector<long long> row;
        for (int i = 0; i < spec.K(); ++i) {
            const double w = spec.gl_mu(j, i);
            if (std::abs(w - std::round(w)) > 1e-12 || w < 0.0) {
                throw std::invalid_argument("delta chain requires integer weights >= 0");
            }
            row.push_back(std::llround(w));
        }
        chain.mu.push_back(std::move(row));
    }
    chain.sigma_rate = [](long long x) { return static_cast<double>(x); };
    return chain;
}

std::vector<long long> step_dfiap(const std::vector<long long>& state,
                                  const DFiapSpec& spec, RngStream& rng) {
    const int K = spec.K;
    if (state.size() != static_cast<std::size_t>(K)) {
        throw std::invalid_argument("step_dfiap: state size mismatch");
    }
    // One uniform per node decides both its own fragmentation and its
    // contribution to the others (synchronous update on the pre-step state).
    std::vector<bool> active(static_cast<std::size_t>(K));
    for (int i = 0; i < K; ++i) {
        const double u = rng.uniform01();
        active[static_cast<std::size_t>(i)] =
            u < spec.sigma[static_cast<std::size_t>(i)](state[static_cast<std::size_t>(i)]);
    }
    std::vector<long long> next(static_cast<std::size_t>(K));
    for (int i = 0; i < K; ++i) {
        const long long x = state[static_cast<std::size_t>(i)];
        long long y = active[static_cast<std::size_t>(i)]
                          ? spec.g1[static_cast<std::size_t>(i)](x)
                          : spec.g2[static_cast<std::size_t>(i)](x);
        for (int j = 0; j < K; ++j) {
            if (j != i && active[static_cast<std::size_t>(j)]) {
                y += spec.h[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)](
                    state[static_cast<std::size_t>(j)]);
            }
        }
        next[static_cast<std::size_t>(i)] = y;
    }
    return next;
}

std::vector<long long> step_rmf_dfiap(const std::vector<long long>& state,
                                      const DFiapSpec& spec, int M, RngStream& rng) {
    const int K = spec.K;
    if (M < 2) {
        throw std::invalid_argument("step_rmf_dfiap requires M >= 2");
    }
    if (state.size() != static_cast<std::size_t>(M) * static_cast<std::size_t>(K)) {
        throw std::invalid_argument("step_rmf_dfiap: state size mismatch");
    }
    std::vector<long long> next(state.size());
    std::vector<bool> active(state.size());
    for (int m = 0; m < M; ++m) {
        for (int i = 0; i < K; ++i) {
            const long long x = state[flat(m, i, K)];
            active[flat(m, i, K)] = rng.uniform01() < spec.sigma[static_cast<std::size_t>(i)](x);
            next[flat(m, i, K)] = active[flat(m, i, K)]
                                      ? spec.g1[static_cast<std::size_t>(i)](x)
                                      : spec.g2[static_cast<std::size_t>(i)](x);
        }
    }
    for (int m = 0; m < M; ++m) {
        for (int j = 0; j < K; ++j) {
            if (!active[flat(m, j, K)]) {
                continue;
            }
            const long long x = state[flat(m, j, K)];
            for (int i = 0; i < K; ++i) {
                if (i == j) {
                    continue;
                }
                const int offset = 1 + static_cast<int>(rng.uniform_below(
                                           static_cast<std::uint64_t>(M - 1)));
                const int target = (m + offset) % M;
                next[flat(target, i, K)] +=
                    spec.h[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)](x);
            }
        }
    }
    return next;
}

std::vector<long long> delta_step(const std::vector<long long>& state,
                                  const DeltaChainSpec& spec, int M, RngStream& rng) {
    const int K = spec.K;
    if (M < 2) {
        throw std::invalid_argument("delta_step requires M >= 2");
    }
    if (state.size() != static_cast<std::size_t>(M) * static_cast<std::size_t>(K)) {
        throw std::invalid_argument("delta_step: state size mismatch");
    }
    // Fragmentation half-step: independent resets with the per-step spike
    // probability evaluated on the pre-step state.
    std::vector<long long> next(state.size());
    std::vector<bool> spiked(state.size());
    for (int m = 0; m < M; ++m) {
        for (int i = 0; i < K; ++i) {
            const long long x = state[flat(m, i, K)];
            const bool spike = rng.uniform01() < spec.spike_prob(x);
            spiked[flat(m, i, K)] = spike;
            next[flat(m, i, K)] = spike ? spec.reset[static_cast<std::size_t>(i)] : x;
        }
    }
    // Aggregation half-step: routed increments applied to the post-reset
    // state; a node may both reset and receive within one step.
    for (int m = 0; m < M; ++m) {
        for (int i = 0; i < K; ++i) {
            if (!spiked[flat(m, i, K)]) {
                continue;
            }
            for (int j = 0; j < K; ++j) {
                if (j == i) {
                    continue;
                }
                const int offset = 1 + static_cast<int>(rng.uniform_below(
                                           static_cast<std::uint64_t>(M - 1)));
                const int target = (m + offset) % M;
                next[flat(target, j, K)] +=
                    spec.mu[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            }
        }
    }
    return next;
}

Pmf arrival_pmf_exact(const std::vector<long long>& state, const DeltaChainSpec& spec,
                      int M, int m, int i) {
    const int K = spec.K;
    check_budget(M, K);
    // Sources are nodes (n, j) with n != m and j != i. Each contributes
    // mu[j][i] exactly when it spikes (prob p_{n,j}) and its routing picks
    // replica m (prob 1/(M-1)), independently across sources; the arrival law
    // is the convolution of these thinned Bernoulli terms.
    const double route_p = 1.0 / (M - 1);
    std::vector<std::pair<long long, double>> terms;
    for (int n = 0; n < M; ++n) {
        if (n == m) {
            continue;
        }
        for (int j = 0; j < K; ++j) {
            if (j == i) {
                continue;
            }
            const double p = spec.spike_prob(state[flat(n, j, K)]);
            terms.emplace_back(spec.mu[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)],
                               p * route_p);
        }
    }
    return convolve_bernoulli_sum(terms);
}

double transition_prob_exact(const std::vector<long long>& state,
                             const DeltaChainSpec& spec, int M, int m, int i,
                             long long l) {
    const int K = spec.K;
    const long long k = state[flat(m, i, K)];
    const long long r = spec.reset[static_cast<std::size_t>(i)];
    const double p = spec.spike_prob(k);
    const Pmf arrivals = arrival_pmf_exact(state, spec, M, m, i);
    const double with_spike = l >= r ? arrivals.prob(l - r) : 0.0;
    const double without = l >= k ? arrivals.prob(l - k) : 0.0;
    return p * with_spike + (1.0 - p) * without;
}

Pmf transition_row_exact(const std::vector<long long>& state, const DeltaChainSpec& spec,
                         int M, int m, int i) {
    const int K = spec.K;
    const long long k = state[flat(m, i, K)];
    const long long r = spec.reset[static_cast<std::size_t>(i)];
    const double p = spec.spike_prob(k);
    const Pmf arrivals = arrival_pmf_exact(state, spec, M, m, i);
    Pmf row;
    for (const auto& [a, q] : arrivals.mass) {
        row.add(r + a, p * q);
        row.add(k + a, (1.0 - p) * q);
    }
    return row;
}

Pmf rmf_fiap_arrival_pmf(const std::vector<long long>& state, const DFiapSpec& spec,
                         int M, int m, int i) {
    const int K = spec.K;
    check_budget(M, K);
    const double route_p = 1.0 / (M - 1);
    std::vector<std::pair<long long, double>> terms;
    for (int n = 0; n < M; ++n) {
        if (n == m) {
            continue;
        }
        for (int j = 0; j < K; ++j) {
            if (j == i) {
                continue;
            }
            const long long x = state[flat(n, j, K)];
            const double p = spec.sigma[static_cast<std::size_t>(j)](x);
            terms.emplace_back(
                spec.h[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)](x),
                p * route_p);
        }
    }
    return convolve_bernoulli_sum(terms);
}

double rmf_fiap_transition_prob(const std::vector<long long>& state, const DFiapSpec& spec,
                                int M, int m, int i, long long l) {
    const int K = spec.K;
    const long long k = state[flat(m, i, K)];
    const double p = spec.sigma[static_cast<std::size_t>(i)](k);
    const long long y1 = spec.g1[static_cast<std::size_t>(i)](k);
    const long long y2 = spec.g2[static_cast<std::size_t>(i)](k);
    const Pmf arrivals = rmf_fiap_arrival_pmf(state, spec, M, m, i);
    const double with_act = l >= y1 ? arrivals.prob(l - y1) : 0.0;
    const double without = l >= y2 ? arrivals.prob(l - y2) : 0.0;
    return p * with_act + (1.0 - p) * without;
}

namespace {

// Expectation of test_fn over one full delta step by exact enumeration of all
// spike patterns and routing vectors.
double expect_after_delta_step(
    const std::function<double(const std::vector<long long>&)>& test_fn,
    const std::vector<long long>& state, const DeltaChainSpec& spec, int M) {
    const int K = spec.K;
    const std::size_t n = state.size();
    // Routing vectors per spiker: one choice of replica per target node.
    const long long routings_per_spiker = [&] {
        long long r = 1;
        for (int j = 1; j < K; ++j) {
            r *= (M - 1);
        }
        return r;
    }();
    const double total_work =
        std::pow(1.0 + static_cast<double>(routings_per_spiker), static_cast<double>(n));
    if (total_work > (1 << 24)) {
        throw std::invalid_argument("generator enumeration budget exceeded");
    }

    std::vector<double> spike_p(n);
    for (std::size_t k = 0; k < n; ++k) {
        spike_p[k] = spec.spike_prob(state[k]);
    }

    double acc = 0.0;
    std::vector<long long> work(n);
    // Recursive enumeration over nodes: each either idles or spikes with one
    // of its routing vectors.
    std::function<void(std::size_t, double, std::vector<long long>&)> recurse =
        [&](std::size_t node, double prob, std::vector<long long>& next) {
            if (prob == 0.0) {
                return;
            }
            if (node == n) {
                acc += prob * test_fn(next);
                return;
            }
            const int m = static_cast<int>(node) / K;
            const int i = static_cast<int>(node) % K;
            // no spike
            recurse(node + 1, prob * (1.0 - spike_p[node]), next);
            // spike: reset and route one increment per other node
            const double p_spike = spike_p[node];
            if (p_spike == 0.0) {
                return;
            }
            const double route_w = 1.0 / static_cast<double>(routings_per_spiker);
            std::vector<int> targets(static_cast<std::size_t>(K), 0);
            std::function<void(int)> route = [&](int j) {
                if (j == K) {
                    const long long saved = next[node];
                    std::vector<std::pair<std::size_t, long long>> undo;
                    next[node] = spec.reset[static_cast<std::size_t>(i)] +
                                 (next[node] - state[node]);
                    for (int jj = 0; jj < K; ++jj) {
                        if (jj == i) {
                            continue;
                        }
                        const int tgt_replica = (m + 1 + targets[static_cast<std::size_t>(jj)]) % M;
                        const std::size_t tgt = flat(tgt_replica, jj, K);
                        const long long w =
                            spec.mu[static_cast<std::size_t>(i)][static_cast<std::size_t>(jj)];
                        undo.emplace_back(tgt, w);
                        next[tgt] += w;
                    }
                    recurse(node + 1, prob * p_spike * route_w, next);
                    for (const auto& [tgt, w] : undo) {
                        next[tgt] -= w;
                    }
                    next[node] = saved;
                    return;
                }
                if (j == i) {
                    route(j + 1);
                    return;
                }
                for (int off = 0; off < M - 1; ++off) {
                    targets[static_cast<std::size_t>(j)] = off;
                    route(j + 1);
                }
            };
            route(0);
        };
    std::vector<long long> next = state;
    recurse(0, 1.0, next);
    return acc;
}

}  // namespace

std::vector<GeneratorResidualRow> generator_residual(
    const std::function<double(const std::vector<long long>&)>& test_fn,
    const std::vector<long long>& state, const DeltaChainSpec& base, int M,
    const std::vector<double>& delta_list) {
    const int K = base.K;
    if (state.size() != static_cast<std::size_t>(M) * static_cast<std::size_t>(K)) {
        throw std::invalid_argument("generator_residual: state size mismatch");
    }
    // Exact generator value: each node spikes at rate sigma(state), resets,
    // and sends one weighted increment per other node to a uniformly chosen
    // foreign replica; average over the (M-1)^(K-1) routing vectors.
    double gen = 0.0;
    std::vector<long long> work = state;
    for (int m = 0; m < M; ++m) {
        for (int i = 0; i < K; ++i) {
            const double rate = base.sigma_rate(state[flat(m, i, K)]);
            if (rate == 0.0) {
                continue;
            }
            long long routing_count = 1;
            for (int j = 1; j < K; ++j) {
                routing_count *= (M - 1);
            }
            double avg = 0.0;
            std::vector<int> targets(static_cast<std::size_t>(K), 0);
            std::function<void(int)> route = [&](int j) {
                if (j == K) {
                    const long long saved = work[flat(m, i, K)];
                    work[flat(m, i, K)] = base.reset[static_cast<std::size_t>(i)];
                    std::vector<std::pair<std::size_t, long long>> undo;
                    for (int jj = 0; jj < K; ++jj) {
                        if (jj == i) {
                            continue;
                        }
                        const int tgt_replica = (m + 1 + targets[static_cast<std::size_t>(jj)]) % M;
                        const std::size_t tgt = flat(tgt_replica, jj, K);
                        const long long w =
                            base.mu[static_cast<std::size_t>(i)][static_cast<std::size_t>(jj)];
                        undo.emplace_back(tgt, w);
                        work[tgt] += w;
                    }
                    avg += test_fn(work) - test_fn(state);
                    for (const auto& [tgt, w] : undo) {
                        work[tgt] -= w;
                    }
                    work[flat(m, i, K)] = saved;
                    return;
                }
                if (j == i) {
                    route(j + 1);
                    return;
                }
                for (int off = 0; off < M - 1; ++off) {
                    targets[static_cast<std::size_t>(j)] = off;
                    route(j + 1);
                }
            };
            route(0);
            gen += rate * avg / static_cast<double>(routing_count);
        }
    }

    std::vector<GeneratorResidualRow> rows;
    const double f0 = test_fn(state);
    for (double delta : delta_list) {
        if (!(delta > 0.0)) {
            throw std::invalid_argument("generator_residual: delta must be > 0");
        }
        DeltaChainSpec chain = base;
        chain.delta = delta;
        const double expect = expect_after_delta_step(test_fn, state, chain, M);
        const double rate_of_change = (expect - f0) / delta;
        rows.push_back({delta, rate_of_change, gen, std::abs(rate_of_change - gen)});
    }
    return rows;
}

}  // namespace fiap
