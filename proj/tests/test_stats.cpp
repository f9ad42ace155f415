#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "fiap/stats.hpp"

using namespace fiap;

namespace {

Pmf make_pmf(std::initializer_list<std::pair<long long, double>> init) {
    Pmf out;
    for (const auto& [v, p] : init) {
        out.mass[v] = p;
    }
    return out;
}

}  // namespace

TEST_CASE("tv_discrete on the textbook cases") {
    const Pmf p = make_pmf({{0, 0.5}, {1, 0.5}});
    CHECK(tv_discrete(p, p) == doctest::Approx(0.0));
    const Pmf q = make_pmf({{0, 0.75}, {1, 0.25}});
    CHECK(tv_discrete(p, q) == doctest::Approx(0.25));
    const Pmf a = make_pmf({{0, 1.0}});
    const Pmf b = make_pmf({{5, 1.0}});
    CHECK(tv_discrete(a, b) == doctest::Approx(1.0));
}

TEST_CASE("tv_discrete is a metric on random pmf triples") {
    RngStream rng(51, {0, 0, 1});
    for (int trial = 0; trial < 1000; ++trial) {
        auto random_pmf = [&rng]() {
            Pmf out;
            double total = 0.0;
            for (long long v = 0; v < 6; ++v) {
                const double w = rng.uniform01();
                out.mass[v] = w;
                total += w;
            }
            for (auto& [v, p] : out.mass) {
                (void)v;
                p /= total;
            }
            return out;
        };
        const Pmf p = random_pmf();
        const Pmf q = random_pmf();
        const Pmf r = random_pmf();
        const double pq = tv_discrete(p, q);
        CHECK(pq >= 0.0);
        CHECK(pq <= 1.0);
        CHECK(pq == doctest::Approx(tv_discrete(q, p)).epsilon(1e-15));
        CHECK(pq <= tv_discrete(p, r) + tv_discrete(r, q) + 1e-12);
    }
}

TEST_CASE("empirical pmfs normalize and reject empty samples") {
    EmpiricalPmf emp;
    CHECK_THROWS_AS(emp.to_pmf(), std::invalid_argument);
    emp.add(2);
    emp.add(2);
    emp.add(5);
    CHECK(emp.to_pmf().prob(2) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("tv between an empirical exponential sample and a rate-doubled one") {
    // TV(Exp(1), Exp(2)) = 1/4 exactly.
    RngStream rng(52, {0, 0, 1});
    const int n = 100000;
    std::vector<double> a(n);
    std::vector<double> b(n);
    for (int k = 0; k < n; ++k) {
        a[static_cast<std::size_t>(k)] = rng.exponential(1.0);
        b[static_cast<std::size_t>(k)] = rng.exponential(2.0);
    }
    const BinnedTv tv = tv_binned(a, b, 64, 200, 1);
    CHECK(tv.tv == doctest::Approx(0.25).epsilon(0.08));
    CHECK(tv.stderr_ > 0.0);
    CHECK(tv.tv_coarse == doctest::Approx(0.25).epsilon(0.12));
    CHECK(tv.tv_fine == doctest::Approx(0.25).epsilon(0.12));
}

TEST_CASE("tv_binned vanishes on equal distributions up to noise") {
    RngStream rng(53, {0, 0, 1});
    const int n = 50000;
    std::vector<double> a(n);
    std::vector<double> b(n);
    for (int k = 0; k < n; ++k) {
        a[static_cast<std::size_t>(k)] = rng.exponential(1.0);
        b[static_cast<std::size_t>(k)] = rng.exponential(1.0);
    }
    const BinnedTv tv = tv_binned(a, b, 64, 200, 2);
    CHECK(tv.tv < 0.03);
}

TEST_CASE("tv_exact_vs_pmf estimates the true pmf distance") {
    RngStream rng(54, {0, 0, 1});
    const int n = 100000;
    std::vector<long long> sample(n);
    for (auto& v : sample) {
        v = rng.poisson(2.0);
    }
    const Estimate same = tv_exact_vs_pmf(sample, poisson_pmf_truncated(2.0), 300, 3);
    CHECK(same.value < 0.01);  // pure sampling noise
    const double truth = tv_discrete(poisson_pmf_truncated(2.0), poisson_pmf_truncated(3.0));
    const Estimate off = tv_exact_vs_pmf(sample, poisson_pmf_truncated(3.0), 300, 4);
    CHECK(off.value == doctest::Approx(truth).epsilon(0.05));
}

TEST_CASE("tlln deviation is zero for deterministic counts") {
    const std::vector<std::vector<double>> counts(50, std::vector<double>(8, 3.0));
    const Estimate est = tlln_deviation(counts, 100, 5);
    CHECK(est.value == doctest::Approx(0.0));
}

TEST_CASE("tlln deviation matches the folded-normal oracle on iid Poisson counts") {
    const double lam = 4.0;
    const int M = 32;
    const int reps = 4000;
    RngStream rng(55, {0, 0, 1});
    std::vector<std::vector<double>> counts(reps, std::vector<double>(M));
    for (auto& row : counts) {
        for (auto& v : row) {
            v = static_cast<double>(rng.poisson(lam));
        }
    }
    const Estimate est = tlln_deviation(counts, 1000, 6);
    // Direct-sampling oracle with the true mean, independent generator.
    RngStream oracle_rng(56, {0, 0, 1});
    double oracle = 0.0;
    const int oracle_reps = 20000;
    for (int r = 0; r < oracle_reps; ++r) {
        double sum = 0.0;
        for (int n = 0; n < M; ++n) {
            sum += static_cast<double>(oracle_rng.poisson(lam)) - lam;
        }
        oracle += std::abs(sum) / (M - 1);
    }
    oracle /= oracle_reps;
    // Closed-form CLT approximation as a second anchor.
    const double clt = std::sqrt(2.0 * lam / 3.141592653589793) * std::sqrt(static_cast<double>(M)) /
                       (M - 1);
    CHECK(std::abs(est.value - oracle) < 3.0 * est.stderr_ + 0.02);
    CHECK(oracle == doctest::Approx(clt).epsilon(0.05));
}

TEST_CASE("tlln estimates decay like the replica square root on iid counts") {
    RngStream rng(57, {0, 0, 1});
    std::vector<double> values;
    for (const int M : {10, 40, 160}) {
        std::vector<std::vector<double>> counts(2000, std::vector<double>(M));
        for (auto& row : counts) {
            for (auto& v : row) {
                v = static_cast<double>(rng.poisson(3.0));
            }
        }
        values.push_back(tlln_deviation(counts, 50, 7).value);
    }
    for (std::size_t k = 1; k < values.size(); ++k) {
        const double ratio = values[k] / values[k - 1];
        CHECK(ratio > 0.35);
        CHECK(ratio < 0.75);
    }
}

TEST_CASE("chen-stein bound reduces to its second term for deterministic counts") {
    const double c = 7.0;
    const std::vector<std::vector<double>> counts(50, std::vector<double>(9, c));
    const Estimate est = chen_stein_rhs(counts, 100, 8);
    CHECK(est.value == doctest::Approx((1.0 / 8.0) * std::min(1.0, 1.0 / c) * c));
}

TEST_CASE("chen-stein bound scales like the replica square root on iid counts") {
    RngStream rng(58, {0, 0, 1});
    std::vector<double> values;
    for (const int M : {16, 64, 256}) {
        std::vector<std::vector<double>> counts(3000, std::vector<double>(M));
        for (auto& row : counts) {
            for (auto& v : row) {
                v = static_cast<double>(rng.poisson(5.0));
            }
        }
        values.push_back(chen_stein_rhs(counts, 50, 9).value);
    }
    for (std::size_t k = 1; k < values.size(); ++k) {
        const double ratio = values[k] / values[k - 1];
        CHECK(ratio > 0.35);
        CHECK(ratio < 0.75);
    }
}

TEST_CASE("independence gap detects a perfectly dependent pair") {
    RngStream rng(59, {0, 0, 1});
    const int n = 20000;
    std::vector<double> x(n);
    for (auto& v : x) {
        v = rng.uniform01();
    }
    const Estimate dep = independence_gap(x, x, 2, 200, 10);
    // median split: P(B1)(1 - P(B1)) = 1/4
    CHECK(dep.value == doctest::Approx(0.25).epsilon(0.05));
    std::vector<double> y(n);
    for (auto& v : y) {
        v = rng.uniform01();
    }
    const Estimate indep = independence_gap(x, y, 2, 200, 11);
    CHECK(indep.value < 3.0 * indep.stderr_);
}

TEST_CASE("independence gap rejects degenerate binning") {
    const std::vector<double> constant(2000, 1.0);
    CHECK_THROWS_WITH_AS(
        independence_gap(constant, constant, 2, 10, 12).value,
        doctest::Contains("degenerate"), std::invalid_argument);
}

TEST_CASE("loglog_slope recovers exact power laws") {
    const std::vector<double> ms = {4.0, 16.0, 64.0};
    std::vector<double> d_half;
    std::vector<double> d_one;
    for (double m : ms) {
        d_half.push_back(1.0 / std::sqrt(m));
        d_one.push_back(3.0 / m);
    }
    const SlopeFit half = loglog_slope(ms, d_half);
    CHECK(half.slope == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(half.residual_rms == doctest::Approx(0.0).epsilon(1e-12));
    const SlopeFit one = loglog_slope(ms, d_one);
    CHECK(one.slope == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(one.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("loglog_slope drops nonpositive distances and needs three points") {
    const std::vector<double> ms = {4.0, 16.0, 64.0, 256.0};
    const std::vector<double> ds = {0.5, 0.25, 0.0, 0.125};
    const SlopeFit fit = loglog_slope(ms, ds);
    CHECK(fit.dropped == 1);
    CHECK(fit.log_m.size() == 3);
    const std::vector<double> too_few = {0.5, 0.0, 0.0, 0.0};
    CHECK_THROWS_AS(loglog_slope(ms, too_few), std::invalid_argument);
}

TEST_CASE("moment check: the ceiling is tight for K = 1") {
    const std::vector<double> samples(100, 2.0);
    const MomentCheckResult out = moment_check(samples, 2.0, 1, 1.0, 1.0, 1, true);
    CHECK(out.bound == doctest::Approx(2.0));  // exp(0) = 1
    CHECK(out.pass);
}

TEST_CASE("moment check p >= 2 reports without asserting") {
    const std::vector<double> samples = {10.0, 20.0, 30.0};
    const MomentCheckResult out = moment_check(samples, 1.0, 2, 1.0, 1.0, 2, false);
    CHECK(!out.bound_applies);
    CHECK(out.pass);
    CHECK(out.empirical == doctest::Approx((100.0 + 400.0 + 900.0) / 3.0));
}

TEST_CASE("exponential moment stability spot check") {
    RngStream rng(60, {0, 0, 1});
    std::vector<double> samples(20000);
    for (auto& v : samples) {
        v = 2.0 * rng.uniform01();  // bounded, all moments finite
    }
    const ExpMomentCheck out = exp_moment_stability(samples, 0.5);
    CHECK(out.stable);
    // E[e^{x/2}] with x ~ U(0,2): (e - 1) / 1 = e - 1
    CHECK(out.estimate_full == doctest::Approx(std::exp(1.0) - 1.0).epsilon(0.02));
}

TEST_CASE("chi-square tail probabilities match table values") {
    CHECK(chi_square_pvalue(3.841, 1) == doctest::Approx(0.05).epsilon(0.002));
    CHECK(chi_square_pvalue(5.991, 2) == doctest::Approx(0.05).epsilon(0.002));
    CHECK(chi_square_pvalue(18.307, 10) == doctest::Approx(0.05).epsilon(0.002));
    CHECK(regularized_gamma_p(0.5, 0.0) == doctest::Approx(0.0));
}

TEST_CASE("chi-square goodness of fit accepts its own law and rejects another") {
    RngStream rng(61, {0, 0, 1});
    EmpiricalPmf emp;
    for (int k = 0; k < 50000; ++k) {
        emp.add(rng.poisson(2.5));
    }
    CHECK(chi_square_gof_pvalue(emp, poisson_pmf_truncated(2.5)) > 0.01);
    CHECK(chi_square_gof_pvalue(emp, poisson_pmf_truncated(3.2)) < 1e-6);
}

TEST_CASE("two-sample KS statistic separates shifted samples") {
    RngStream rng(62, {0, 0, 1});
    const int n = 5000;
    std::vector<double> a(n);
    std::vector<double> b(n);
    std::vector<double> c(n);
    for (int k = 0; k < n; ++k) {
        a[static_cast<std::size_t>(k)] = rng.uniform01();
        b[static_cast<std::size_t>(k)] = rng.uniform01();
        c[static_cast<std::size_t>(k)] = rng.uniform01() + 0.2;
    }
    const double critical = 1.358 * std::sqrt(2.0 / n);
    CHECK(ks_two_sample(a, b) < critical);
    CHECK(ks_two_sample(a, c) > critical);
}
