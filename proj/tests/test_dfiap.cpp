#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fiap/dfiap.hpp"
#include "fiap/stats.hpp"

using namespace fiap;

namespace {

DeltaChainSpec desk_chain(double delta = 0.2) {
    // M = 3, K = 2, r = (1,1), mu = 1, sigma(x) = min(x, 5)
    DeltaChainSpec chain;
    chain.K = 2;
    chain.reset = {1, 1};
    chain.mu = {{1, 1}, {1, 1}};
    chain.sigma_rate = [](long long x) { return std::min(static_cast<double>(x), 5.0); };
    chain.delta = delta;
    return chain;
}

const std::vector<long long> kDeskState = {2, 1, 0, 3, 1, 2};  // 3 x 2, replica-major

// Independent oracle: enumerate spike subsets and, per spiker, its routing
// hit/miss for the target coordinate.
Pmf brute_arrival(const std::vector<long long>& state, const DeltaChainSpec& chain,
                  int M, int m, int i) {
    struct Source {
        double p;
        long long w;
    };
    std::vector<Source> sources;
    for (int n = 0; n < M; ++n) {
        if (n == m) {
            continue;
        }
        for (int j = 0; j < chain.K; ++j) {
            if (j == i) {
                continue;
            }
            sources.push_back(
                {chain.spike_prob(state[static_cast<std::size_t>(n * chain.K + j)]),
                 chain.mu[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]});
        }
    }
    const double q = 1.0 / (M - 1);
    Pmf out;
    const std::size_t n_src = sources.size();
    for (std::size_t spikes = 0; spikes < (std::size_t{1} << n_src); ++spikes) {
        double p_spikes = 1.0;
        std::vector<std::size_t> spikers;
        for (std::size_t s = 0; s < n_src; ++s) {
            if (spikes & (std::size_t{1} << s)) {
                p_spikes *= sources[s].p;
                spikers.push_back(s);
            } else {
                p_spikes *= 1.0 - sources[s].p;
            }
        }
        for (std::size_t hits = 0; hits < (std::size_t{1} << spikers.size()); ++hits) {
            double p_route = 1.0;
            long long total = 0;
            for (std::size_t s = 0; s < spikers.size(); ++s) {
                if (hits & (std::size_t{1} << s)) {
                    p_route *= q;
                    total += sources[spikers[s]].w;
                } else {
                    p_route *= 1.0 - q;
                }
            }
            out.add(total, p_spikes * p_route);
        }
    }
    return out;
}

DFiapSpec simple_dfiap(int K, double sigma_value, long long g1_value) {
    DFiapSpec spec;
    spec.K = K;
    for (int i = 0; i < K; ++i) {
        spec.g1.push_back([g1_value](long long) { return g1_value; });
        spec.g2.push_back([](long long x) { return x; });
        spec.sigma.push_back([sigma_value](long long) { return sigma_value; });
    }
    for (int j = 0; j < K; ++j) {
        std::vector<std::function<long long(long long)>> row;
        for (int i = 0; i < K; ++i) {
            row.push_back([](long long) { return 1; });
        }
        spec.h.push_back(std::move(row));
    }
    return spec;
}

}  // namespace

TEST_CASE("no activations leave the pure fragmentation map") {
    const DFiapSpec spec = simple_dfiap(3, 0.0, 7);
    RngStream rng(1, {0, 0, 1});
    const std::vector<long long> state = {4, 9, 2};
    CHECK(step_dfiap(state, spec, rng) == state);  // g2 = identity, no arrivals
}

TEST_CASE("certain activations add every interaction weight") {
    const DFiapSpec spec = simple_dfiap(2, 1.0, 5);
    RngStream rng(2, {0, 0, 1});
    const std::vector<long long> state = {4, 9};
    const auto next = step_dfiap(state, spec, rng);
    CHECK(next == std::vector<long long>{6, 6});  // g1 + 1 arrival each
}

TEST_CASE("one-step pmf matches exhaustive enumeration over activation patterns") {
    // K = 2 with state-dependent activation; enumerate the 4 patterns.
    DFiapSpec spec = simple_dfiap(2, 0.0, 0);
    spec.sigma[0] = [](long long x) { return x >= 2 ? 0.7 : 0.2; };
    spec.sigma[1] = [](long long x) { return x >= 2 ? 0.6 : 0.1; };
    spec.g1[0] = [](long long) { return 1; };
    spec.g1[1] = [](long long) { return 1; };
    const std::vector<long long> state = {2, 1};

    Pmf exact0;  // law of Y_0
    const double p0 = 0.7;
    const double p1 = 0.1;
    // activation pattern (a0, a1): Y_0 = (a0 ? 1 : 2) + a1
    exact0.add(1, p0 * (1 - p1));
    exact0.add(2, p0 * p1 + (1 - p0) * (1 - p1));
    exact0.add(3, (1 - p0) * p1);

    RngStream rng(3, {0, 0, 1});
    EmpiricalPmf emp;
    const int n = 100000;
    for (int k = 0; k < n; ++k) {
        emp.add(step_dfiap(state, spec, rng)[0]);
    }
    double envelope = 0.0;
    for (const auto& [v, p] : exact0.mass) {
        (void)v;
        envelope += 0.5 * std::sqrt(p * (1.0 - p) / n);
    }
    CHECK(tv_discrete(emp, exact0) < 3.0 * envelope);
}

TEST_CASE("replica step at M = 2 routes everything to the opposite replica") {
    const DFiapSpec spec = simple_dfiap(2, 1.0, 0);
    RngStream rng(4, {0, 0, 1});
    const std::vector<long long> state = {3, 4, 5, 6};
    const auto next = step_rmf_dfiap(state, spec, 2, rng);
    // every node activates, resets to 0, and receives exactly one unit from
    // the opposite replica's other node
    CHECK(next == std::vector<long long>{1, 1, 1, 1});
}

TEST_CASE("routed mass is conserved per step") {
    DFiapSpec spec = simple_dfiap(2, 0.0, 0);
    // deterministic activation readable from the state
    for (int i = 0; i < 2; ++i) {
        spec.sigma[static_cast<std::size_t>(i)] = [](long long x) {
            return x >= 2 ? 1.0 : 0.0;
        };
        spec.g1[static_cast<std::size_t>(i)] = [](long long x) { return x; };
    }
    RngStream rng(5, {0, 0, 1});
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<long long> state(6);
        for (auto& v : state) {
            v = static_cast<long long>(rng.uniform_below(4));
        }
        const auto next = step_rmf_dfiap(state, spec, 3, rng);
        for (int i = 0; i < 2; ++i) {
            long long received = 0;
            long long sent = 0;
            for (int m = 0; m < 3; ++m) {
                received += next[static_cast<std::size_t>(m * 2 + i)] -
                            state[static_cast<std::size_t>(m * 2 + i)];
                sent += state[static_cast<std::size_t>(m * 2 + (1 - i))] >= 2 ? 1 : 0;
            }
            CHECK(received == sent);
        }
    }
}

TEST_CASE("joint replica arrival law matches enumeration at K = 2, M = 3") {
    DFiapSpec spec = simple_dfiap(2, 0.0, 0);
    for (int i = 0; i < 2; ++i) {
        spec.g1[static_cast<std::size_t>(i)] = [](long long) { return 0; };
        spec.g2[static_cast<std::size_t>(i)] = [](long long) { return 0; };
        spec.sigma[static_cast<std::size_t>(i)] = [](long long) { return 0.5; };
    }
    const std::vector<long long> state = {1, 1, 1, 1, 1, 1};
    // Y[m][0] equals the arrival count A_{m,0}; enumerate sources (n, 1).
    std::map<std::pair<long long, long long>, double> exact;
    for (int mask = 0; mask < 8; ++mask) {
        const double p_spike = 0.125;  // each source spikes w.p. 1/2
        // routes per spiker: to one of the other two replicas
        std::vector<int> spikers;
        for (int n = 0; n < 3; ++n) {
            if (mask & (1 << n)) {
                spikers.push_back(n);
            }
        }
        std::vector<int> choice(spikers.size(), 0);
        while (true) {
            long long a0 = 0;
            long long a1 = 0;
            double p_route = 1.0;
            for (std::size_t s = 0; s < spikers.size(); ++s) {
                const int target = (spikers[s] + 1 + choice[s]) % 3;
                p_route *= 0.5;
                if (target == 0) {
                    ++a0;
                }
                if (target == 1) {
                    ++a1;
                }
            }
            exact[{a0, a1}] += p_spike * p_route;
            std::size_t s = 0;
            for (; s < choice.size(); ++s) {
                if (++choice[s] < 2) {
                    break;
                }
                choice[s] = 0;
            }
            if (s == choice.size()) {
                break;
            }
        }
    }
    RngStream rng(6, {0, 0, 1});
    std::map<std::pair<long long, long long>, double> freq;
    const int n = 100000;
    for (int k = 0; k < n; ++k) {
        const auto next = step_rmf_dfiap(state, spec, 3, rng);
        freq[{next[0], next[2]}] += 1.0 / n;
    }
    double tv = 0.0;
    double envelope = 0.0;
    for (const auto& [key, p] : exact) {
        tv += std::abs(p - (freq.count(key) ? freq[key] : 0.0));
        envelope += 0.5 * std::sqrt(p * (1.0 - p) / n);
    }
    CHECK(0.5 * tv < 3.0 * envelope);
}

TEST_CASE("delta = 0 freezes the chain") {
    DeltaChainSpec chain = desk_chain(0.0);
    RngStream rng(7, {0, 0, 1});
    CHECK(delta_step(kDeskState, chain, 3, rng) == kDeskState);
}

TEST_CASE("huge delta resets everything and routes deterministically at M = 2") {
    DeltaChainSpec chain = desk_chain(1000.0);
    chain.sigma_rate = [](long long) { return 1.0; };
    RngStream rng(8, {0, 0, 1});
    const std::vector<long long> state = {4, 7, 9, 2};
    const auto next = delta_step(state, chain, 2, rng);
    // all spike (prob 1 - e^-1000), reset to 1, and each node receives the
    // single increment from the opposite replica's other node
    CHECK(next == std::vector<long long>{2, 2, 2, 2});
}

TEST_CASE("arrival pmf: hand evaluation at M = 2, K = 2") {
    DeltaChainSpec chain = desk_chain(0.2);
    const std::vector<long long> state = {2, 3, 1, 4};
    const Pmf pmf = arrival_pmf_exact(state, chain, 2, 0, 0);
    const double p = chain.spike_prob(state[3]);  // source (1, 1), routing prob 1
    CHECK(pmf.prob(0) == doctest::Approx(1.0 - p).epsilon(1e-14));
    CHECK(pmf.prob(1) == doctest::Approx(p).epsilon(1e-14));
}

TEST_CASE("arrival pmf: zero rates give a point mass at zero") {
    DeltaChainSpec chain = desk_chain(0.2);
    chain.sigma_rate = [](long long) { return 0.0; };
    const Pmf pmf = arrival_pmf_exact(kDeskState, chain, 3, 0, 0);
    CHECK(pmf.prob(0) == doctest::Approx(1.0));
    CHECK(pmf.total() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("arrival pmf matches the subset-enumeration oracle") {
    RngStream rng(9, {0, 0, 1});
    for (int trial = 0; trial < 50; ++trial) {
        DeltaChainSpec chain = desk_chain(0.1 + 0.4 * rng.uniform01());
        const int M = 2 + static_cast<int>(rng.uniform_below(3));
        std::vector<long long> state(static_cast<std::size_t>(M * 2));
        for (auto& v : state) {
            v = static_cast<long long>(rng.uniform_below(6));
        }
        const int m = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(M)));
        const int i = static_cast<int>(rng.uniform_below(2));
        const Pmf fast = arrival_pmf_exact(state, chain, M, m, i);
        const Pmf brute = brute_arrival(state, chain, M, m, i);
        CHECK(std::abs(fast.total() - 1.0) <= 1e-12);
        CHECK(tv_discrete(fast, brute) < 1e-12);
    }
}

TEST_CASE("frozen chain transitions to itself with probability one") {
    DeltaChainSpec chain = desk_chain(0.2);
    chain.sigma_rate = [](long long) { return 0.0; };
    CHECK(transition_prob_exact(kDeskState, chain, 3, 0, 0, kDeskState[0]) ==
          doctest::Approx(1.0));
}

TEST_CASE("transition rows are normalized") {
    const DeltaChainSpec chain = desk_chain(0.2);
    for (int m = 0; m < 3; ++m) {
        for (int i = 0; i < 2; ++i) {
            const Pmf row = transition_row_exact(kDeskState, chain, 3, m, i);
            CHECK(std::abs(row.total() - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("two-term closed form at M = 2, K = 2") {
    DeltaChainSpec chain = desk_chain(0.2);
    const std::vector<long long> state = {2, 3, 1, 4};
    const double p_own = chain.spike_prob(2);
    const double p_other = chain.spike_prob(4);  // source (1,1)
    // l = r = 1 requires an own spike and no arrival
    CHECK(transition_prob_exact(state, chain, 2, 0, 0, 1) ==
          doctest::Approx(p_own * (1.0 - p_other)).epsilon(1e-14));
}

TEST_CASE("single-coordinate MC frequencies match the exact kernel") {
    const DeltaChainSpec chain = desk_chain(0.2);
    RngStream rng(10, {0, 0, 1});
    EmpiricalPmf freq;
    const int n = 100000;
    for (int k = 0; k < n; ++k) {
        freq.add(delta_step(kDeskState, chain, 3, rng)[0]);
    }
    const Pmf exact = transition_row_exact(kDeskState, chain, 3, 0, 0);
    for (const auto& [l, p] : exact.mass) {
        const double emp = static_cast<double>(
                               freq.counts.count(l) ? freq.counts.at(l) : 0) /
                           n;
        const double se = std::sqrt(p * (1.0 - p) / n);
        CHECK(std::abs(emp - p) <= 3.0 * se + 1e-9);
    }
}

TEST_CASE("enumeration budget is enforced by an explicit refusal") {
    DeltaChainSpec chain = desk_chain(0.2);
    const std::vector<long long> state(static_cast<std::size_t>(25 * 2), 1);
    CHECK_THROWS_WITH_AS(arrival_pmf_exact(state, chain, 25, 0, 0).total(),
                         doctest::Contains("exceeds the budget"), std::invalid_argument);
}

TEST_CASE("permuting replica rows permutes the exact kernel") {
    const DeltaChainSpec chain = desk_chain(0.2);
    std::vector<long long> swapped = kDeskState;
    std::swap(swapped[0], swapped[2]);
    std::swap(swapped[1], swapped[3]);
    const Pmf a = transition_row_exact(kDeskState, chain, 3, 0, 0);
    const Pmf b = transition_row_exact(swapped, chain, 3, 1, 0);
    CHECK(tv_discrete(a, b) < 1e-15);
}

TEST_CASE("the delta chain is an RMF FIAP") {
    const DeltaChainSpec chain = desk_chain(0.2);
    const DFiapSpec fiap = chain.to_dfiap();
    std::vector<long long> probe = kDeskState;
    for (long long k = 0; k <= 20; ++k) {
        probe[0] = k;
        const Pmf row = transition_row_exact(probe, chain, 3, 0, 0);
        for (const auto& [l, p] : row.mass) {
            CHECK(std::abs(p - rmf_fiap_transition_prob(probe, fiap, 3, 0, 0, l)) <=
                  1e-12);
        }
    }
}

TEST_CASE("generator residuals vanish for constants and frozen chains") {
    DeltaChainSpec chain = desk_chain(0.2);
    const std::vector<long long> state = {2, 1, 0, 3};
    const auto const_rows = generator_residual(
        [](const std::vector<long long>&) { return 1.0; }, state, chain, 2,
        {0.1, 0.05});
    for (const auto& row : const_rows) {
        CHECK(row.residual == doctest::Approx(0.0).epsilon(1e-12));
    }
    DeltaChainSpec frozen = chain;
    frozen.sigma_rate = [](long long) { return 0.0; };
    const auto zero_rows = generator_residual(
        [](const std::vector<long long>& s) { return static_cast<double>(s[0]); }, state,
        frozen, 2, {0.1});
    CHECK(zero_rows[0].rate_of_change == doctest::Approx(0.0));
    CHECK(zero_rows[0].generator_value == doctest::Approx(0.0));
}

TEST_CASE("generator residual halves as delta halves on the GL instance") {
    DeltaChainSpec chain;
    chain.K = 2;
    chain.reset = {1, 1};
    chain.mu = {{1, 1}, {1, 1}};
    chain.sigma_rate = [](long long x) { return static_cast<double>(x); };
    chain.delta = 0.1;
    const std::vector<long long> state = {3, 1, 2, 2};
    const auto rows = generator_residual(
        [](const std::vector<long long>& s) { return static_cast<double>(s[0]); }, state,
        chain, 2, {0.1, 0.05, 0.025});
    REQUIRE(rows.size() == 3);
    for (std::size_t k = 1; k < rows.size(); ++k) {
        const double ratio = rows[k].residual / rows[k - 1].residual;
        CHECK(ratio > 0.3);
        CHECK(ratio < 0.7);
    }
    // first-order rate: residual / delta stays bounded
    for (const auto& row : rows) {
        CHECK(row.residual / row.delta < 10.0);
    }
}

TEST_CASE("hand check of the generator expectation at M = 2, K = 2") {
    // E[Y_00] - X_00 = p00 (r - X_00) + mu * p11'; the generator drops the
    // second-order delta terms.
    DeltaChainSpec chain;
    chain.K = 2;
    chain.reset = {1, 1};
    chain.mu = {{1, 1}, {1, 1}};
    chain.sigma_rate = [](long long x) { return static_cast<double>(x); };
    chain.delta = 0.05;
    const std::vector<long long> state = {2, 1, 3, 2};
    const auto rows = generator_residual(
        [](const std::vector<long long>& s) { return static_cast<double>(s[0]); }, state,
        chain, 2, {0.05});
    const double sigma00 = 2.0;
    const double sigma11 = 2.0;  // state of node (1, 1) is 2
    const double expected_gen = sigma00 * (1.0 - 2.0) + sigma11 * 1.0;
    CHECK(rows[0].generator_value == doctest::Approx(expected_gen).epsilon(1e-12));
    const double p00 = 1.0 - std::exp(-sigma00 * 0.05);
    const double p11 = 1.0 - std::exp(-sigma11 * 0.05);
    const double expected_rate = (p00 * (1.0 - 2.0) + p11 * 1.0) / 0.05;
    CHECK(rows[0].rate_of_change == doctest::Approx(expected_rate).epsilon(1e-12));
}
