#pragma once

#include <map>
#include <span>
#include <vector>

#include "fiap/dfiap.hpp"
#include "fiap/rng.hpp"

namespace fiap {

// Integer-valued sample counts; normalizes to a Pmf on demand.
struct EmpiricalPmf {
    std::map<long long, long long> counts;
    long long n = 0;

    void add(long long v) {
        ++counts[v];
        ++n;
    }
    Pmf to_pmf() const;
};

// Exact half-L1 distance over the union support.
double tv_discrete(const Pmf& p, const Pmf& q);
double tv_discrete(const EmpiricalPmf& p, const Pmf& q);
double tv_discrete(const EmpiricalPmf& p, const EmpiricalPmf& q);

struct Estimate {
    double value = 0.0;
    double stderr_ = 0.0;
};

// Total variation between two continuous samples on shared equal-mass bins
// of the pooled sample, with a bootstrap standard error and half/double bin
// sensitivity values.
struct BinnedTv {
    double tv = 0.0;
    double stderr_ = 0.0;
    double tv_coarse = 0.0;  // bins / 2
    double tv_fine = 0.0;    // bins * 2
};
BinnedTv tv_binned(std::span<const double> x, std::span<const double> y, int bins = 64,
                   int bootstrap = 1000, std::uint64_t seed = 0);

// Exact-integer-support TV between an empirical sample and a known pmf, with
// a bootstrap standard error for the sampling noise of the empirical side.
Estimate tv_exact_vs_pmf(const std::vector<long long>& samples, const Pmf& expected,
                         int bootstrap = 1000, std::uint64_t seed = 0);

// Plug-in estimate of E| (1/(M-1)) sum_n (N_n - E[N]) | from a replications-
// by-M matrix of per-replica event counts, with bootstrap standard error.
Estimate tlln_deviation(const std::vector<std::vector<double>>& counts,
                        int bootstrap = 1000, std::uint64_t seed = 0);

// Plug-in evaluation of the Poisson-approximation diagnostic bound (the
// multiplicative constant taken as 1): the centered-sum term runs over
// replicas n != m with m the first column.
Estimate chen_stein_rhs(const std::vector<std::vector<double>>& counts,
                        int bootstrap = 1000, std::uint64_t seed = 0);

// Sup over product quantile-bin pairs of |P(X in B1, Y in B2) - P(X in B1)
// P(Y in B2)|, with bootstrap standard error.
Estimate independence_gap(std::span<const double> x, std::span<const double> y,
                          int bins = 2, int bootstrap = 1000, std::uint64_t seed = 0);

struct SlopeFit {
    std::vector<double> log_m;
    std::vector<double> log_d;
    double slope = 0.0;
    double intercept = 0.0;
    double residual_rms = 0.0;
    int dropped = 0;  // nonpositive distances excluded from the fit
};
// Least-squares fit of log distance against log M; throws when fewer than
// three positive distances survive.
SlopeFit loglog_slope(std::span<const double> m_values, std::span<const double> distances);

struct MomentCheckResult {
    double empirical = 0.0;
    double stderr_ = 0.0;
    double bound = 0.0;
    bool bound_applies = false;  // p == 1 on dominated dynamics
    bool pass = true;
};
// First-moment comparison against the interaction-only growth ceiling
// mean0 * exp((K-1) H t); the ceiling is asserted only for p = 1 on
// dominated dynamics (no drift, no resets), otherwise values are reported.
MomentCheckResult moment_check(std::span<const double> samples, double mean0, int K,
                               double H, double t, int p = 1, bool dominated = false);

struct ExpMomentCheck {
    double estimate_half = 0.0;
    double estimate_full = 0.0;
    bool stable = false;
};
// Monte-Carlo stability spot check of E[exp(xi * lam)] across doubled sample
// sizes.
ExpMomentCheck exp_moment_stability(std::span<const double> samples, double xi);

// Probability utilities.
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);
double chi_square_pvalue(double stat, int dof);
// Chi-square goodness of fit of integer samples against a known pmf, pooling
// bins to an expected count of at least `min_expected`.
double chi_square_gof_pvalue(const EmpiricalPmf& sample, const Pmf& expected,
                             double min_expected = 5.0);
Pmf poisson_pmf_truncated(double mean, double tail_eps = 1e-14);
// Two-sample Kolmogorov-Smirnov D statistic.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

double mean_of(std::span<const double> xs);
double stderr_of(std::span<const double> xs);

}  // namespace fiap
