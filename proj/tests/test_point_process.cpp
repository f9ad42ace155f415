#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "fiap/point_process.hpp"
#include "fiap/rng.hpp"
#include "fiap/stats.hpp"

using namespace fiap;

TEST_CASE("rng streams replay identically for equal (seed, id)") {
    RngStream a(42, {3, 1, 7});
    RngStream b(42, {3, 1, 7});
    for (int k = 0; k < 1000; ++k) {
        CHECK(a.next_u64() == b.next_u64());
    }
}

TEST_CASE("distinct stream ids are uncorrelated") {
    const int n = 100000;
    const StreamId ids[] = {{0, 0, 1}, {0, 1, 1}, {1, 0, 1}, {0, 0, 2}};
    std::vector<std::vector<double>> draws;
    for (const auto& id : ids) {
        RngStream rng(9001, id);
        std::vector<double> xs(n);
        for (auto& x : xs) {
            x = rng.uniform01();
        }
        draws.push_back(std::move(xs));
    }
    for (std::size_t a = 0; a < draws.size(); ++a) {
        for (std::size_t b = a + 1; b < draws.size(); ++b) {
            double sxy = 0.0;
            for (int k = 0; k < n; ++k) {
                sxy += (draws[a][k] - 0.5) * (draws[b][k] - 0.5);
            }
            const double corr = sxy / n / (1.0 / 12.0);
            CHECK(std::abs(corr) < 4.0 / std::sqrt(static_cast<double>(n)));
        }
    }
}

TEST_CASE("uniform_below is exactly uniform") {
    RngStream rng(7, {0, 0, 1});
    std::vector<int> counts(5, 0);
    const int n = 100000;
    for (int k = 0; k < n; ++k) {
        ++counts[rng.uniform_below(5)];
    }
    for (int c : counts) {
        CHECK(std::abs(c / static_cast<double>(n) - 0.2) < 0.006);
    }
}

TEST_CASE("poisson sampler matches the Poisson law") {
    RngStream rng(11, {0, 0, 1});
    EmpiricalPmf emp;
    for (int k = 0; k < 100000; ++k) {
        emp.add(rng.poisson(3.5));
    }
    CHECK(chi_square_gof_pvalue(emp, poisson_pmf_truncated(3.5)) > 0.01);
}

TEST_CASE("zero intensity produces no points") {
    RngStream rng(1, {0, 0, 1});
    const auto out = next_event_thinning([](double) { return 0.0; }, 0.0, 0.0, 100.0, rng);
    CHECK(!out.has_value());
    const auto out2 = next_event_thinning([](double) { return 0.0; }, 5.0, 0.0, 100.0, rng);
    CHECK(!out2.has_value());
}

TEST_CASE("thinning at the dominating rate reproduces the Poisson count law") {
    const double rate = 4.0;
    const int runs = 100000;
    EmpiricalPmf counts;
    double total = 0.0;
    for (int r = 0; r < runs; ++r) {
        RngStream rng(555, {static_cast<std::uint32_t>(r), 0, 1});
        int count = 0;
        double t = 0.0;
        while (true) {
            const auto next =
                next_event_thinning([rate](double) { return rate; }, rate, t, 1.0, rng);
            if (!next) {
                break;
            }
            t = *next;
            ++count;
        }
        counts.add(count);
        total += count;
    }
    const double mean = total / runs;
    CHECK(std::abs(mean - rate) < 3.0 * std::sqrt(rate / runs));
    CHECK(chi_square_gof_pvalue(counts, poisson_pmf_truncated(rate)) > 0.01);
}

TEST_CASE("thinned process matches direct simulation of the thinned rate") {
    // Inter-event times of rate 1 obtained by thinning under a bound of 2
    // against direct simulation at the target rate.
    const int n = 10000;
    std::vector<double> thinned;
    std::vector<double> direct;
    {
        RngStream rng(77, {0, 0, 1});
        double t = 0.0;
        while (thinned.size() < n) {
            const auto next =
                next_event_thinning([](double) { return 1.0; }, 2.0, t, 1e18, rng);
            thinned.push_back(*next - t);
            t = *next;
        }
    }
    {
        RngStream rng(78, {0, 0, 1});
        double t = 0.0;
        while (direct.size() < n) {
            const auto next =
                next_event_thinning([](double) { return 1.0; }, 1.0, t, 1e18, rng);
            direct.push_back(*next - t);
            t = *next;
        }
    }
    const double d = ks_two_sample(thinned, direct);
    const double critical = 1.358 * std::sqrt(2.0 / n);
    CHECK(d < critical);
}

TEST_CASE("counts on disjoint intervals are independent Poisson") {
    const double rate = 3.0;
    const int runs = 100000;
    EmpiricalPmf first;
    EmpiricalPmf second;
    double cross = 0.0;
    for (int r = 0; r < runs; ++r) {
        RngStream rng(31337, {static_cast<std::uint32_t>(r), 0, 1});
        int c1 = 0;
        int c2 = 0;
        double t = 0.0;
        while (true) {
            const auto next =
                next_event_thinning([rate](double) { return rate; }, rate, t, 2.0, rng);
            if (!next) {
                break;
            }
            t = *next;
            (t <= 1.0 ? c1 : c2) += 1;
        }
        first.add(c1);
        second.add(c2);
        cross += (c1 - rate) * (c2 - rate);
    }
    CHECK(chi_square_gof_pvalue(first, poisson_pmf_truncated(rate)) > 0.01);
    CHECK(chi_square_gof_pvalue(second, poisson_pmf_truncated(rate)) > 0.01);
    // correlation of centered counts: 0 within 4 sigma
    const double corr = cross / runs / rate;
    CHECK(std::abs(corr) < 4.0 / std::sqrt(static_cast<double>(runs)));
}

TEST_CASE("bound violations are hard errors naming the offending time") {
    RngStream rng(5, {0, 0, 1});
    CHECK_THROWS_WITH_AS(
        next_event_thinning([](double) { return 3.0; }, 2.0, 0.0, 10.0, rng).has_value(),
        doctest::Contains("exceeds dominating rate"), std::runtime_error);
    CHECK_THROWS_WITH_AS(
        next_event_thinning([](double) { return 1.0; }, 0.0, 0.0, 10.0, rng).has_value(),
        doctest::Contains("<= 0 with positive intensity"), std::runtime_error);
}

TEST_CASE("identity drift leaves the intensity unchanged") {
    DriftModel identity;  // sigma = lam
    CHECK(integrate_drift(identity, 3.0, 0.0, 7.5) == 3.0);
}

TEST_CASE("constant-target drift follows the exponential relaxation closed form") {
    DriftModel gl;  // sigma = b = 1
    gl.alpha = 1.0;
    gl.beta = 0.0;
    const double out = integrate_drift(gl, 2.0, 0.0, 1.0);
    CHECK(out == doctest::Approx(1.0 + std::exp(-1.0)).epsilon(1e-12));

    DriftModel rk4;
    rk4.affine = false;
    rk4.sigma = [](double, double) { return 1.0; };
    CHECK(integrate_drift(rk4, 2.0, 0.0, 1.0) ==
          doctest::Approx(1.0 + std::exp(-1.0)).epsilon(1e-8));
}

TEST_CASE("drift below the identity never raises the intensity") {
    RngStream rng(99, {0, 0, 1});
    for (int trial = 0; trial < 200; ++trial) {
        const double lam0 = 10.0 * rng.uniform01();
        const double scale = rng.uniform01();  // sigma = scale * lam <= lam
        DriftModel d;
        d.alpha = 0.0;
        d.beta = scale;
        const double t1 = 5.0 * rng.uniform01();
        CHECK(integrate_drift(d, lam0, 0.0, t1) <= lam0 + 1e-12);
    }
}

TEST_CASE("generic drift requires t1 >= t0 and rejects non-finite states") {
    DriftModel d;
    CHECK_THROWS_AS(integrate_drift(d, 1.0, 1.0, 0.5), std::invalid_argument);
    DriftModel blow;
    blow.alpha = 1e308;
    blow.beta = 3.0;
    CHECK_THROWS_AS(integrate_drift(blow, 1e308, 0.0, 10.0), std::runtime_error);
}
