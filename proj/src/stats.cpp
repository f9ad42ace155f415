#include "fiap/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fiap {

namespace {

double sd_of(const std::vector<double>& xs) {
    if (xs.size() < 2) {
        return 0.0;
    }
    double m = 0.0;
    for (double v : xs) {
        m += v;
    }
    m /= static_cast<double>(xs.size());
    double acc = 0.0;
    for (double v : xs) {
        acc += (v - m) * (v - m);
    }
    return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

}  // namespace

double mean_of(std::span<const double> xs) {
    if (xs.empty()) {
        throw std::invalid_argument("mean of empty sample");
    }
    double acc = 0.0;
    for (double v : xs) {
        acc += v;
    }
    return acc / static_cast<double>(xs.size());
}

double stderr_of(std::span<const double> xs) {
    if (xs.size() < 2) {
        return 0.0;
    }
    const double m = mean_of(xs);
    double acc = 0.0;
    for (double v : xs) {
        acc += (v - m) * (v - m);
    }
    const double var = acc / static_cast<double>(xs.size() - 1);
    return std::sqrt(var / static_cast<double>(xs.size()));
}

Pmf EmpiricalPmf::to_pmf() const {
    if (n == 0) {
        throw std::invalid_argument("empty sample has no pmf");
    }
    Pmf out;
    for (const auto& [v, c] : counts) {
        out.mass[v] = static_cast<double>(c) / static_cast<double>(n);
    }
    return out;
}

double tv_discrete(const Pmf& p, const Pmf& q) {
    double acc = 0.0;
    auto it_p = p.mass.begin();
    auto it_q = q.mass.begin();
    while (it_p != p.mass.end() || it_q != q.mass.end()) {
        if (it_q == q.mass.end() || (it_p != p.mass.end() && it_p->first < it_q->first)) {
            acc += std::abs(it_p->second);
            ++it_p;
        } else if (it_p == p.mass.end() || it_q->first < it_p->first) {
            acc += std::abs(it_q->second);
            ++it_q;
        } else {
            acc += std::abs(it_p->second - it_q->second);
            ++it_p;
            ++it_q;
        }
    }
    return 0.5 * acc;
}

double tv_discrete(const EmpiricalPmf& p, const Pmf& q) {
    return tv_discrete(p.to_pmf(), q);
}

double tv_discrete(const EmpiricalPmf& p, const EmpiricalPmf& q) {
    return tv_discrete(p.to_pmf(), q.to_pmf());
}

namespace {

std::vector<double> equal_mass_edges(std::vector<double> pooled, int bins) {
    std::sort(pooled.begin(), pooled.end());
    std::vector<double> edges;
    for (int k = 1; k < bins; ++k) {
        const std::size_t idx = pooled.size() * static_cast<std::size_t>(k) /
                                static_cast<std::size_t>(bins);
        edges.push_back(pooled[std::min(idx, pooled.size() - 1)]);
    }
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

std::vector<double> bin_fractions(std::span<const double> xs,
                                  const std::vector<double>& edges) {
    std::vector<double> counts(edges.size() + 1, 0.0);
    for (double v : xs) {
        const auto it = std::upper_bound(edges.begin(), edges.end(), v);
        counts[static_cast<std::size_t>(it - edges.begin())] += 1.0;
    }
    for (double& c : counts) {
        c /= static_cast<double>(xs.size());
    }
    return counts;
}

std::vector<int> bin_indices(std::span<const double> xs, const std::vector<double>& edges) {
    std::vector<int> out(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) {
        out[k] = static_cast<int>(std::upper_bound(edges.begin(), edges.end(), xs[k]) -
                                  edges.begin());
    }
    return out;
}

double tv_on_edges(std::span<const double> x, std::span<const double> y,
                   const std::vector<double>& edges) {
    const auto px = bin_fractions(x, edges);
    const auto qy = bin_fractions(y, edges);
    double acc = 0.0;
    for (std::size_t k = 0; k < px.size(); ++k) {
        acc += std::abs(px[k] - qy[k]);
    }
    return 0.5 * acc;
}

}  // namespace

BinnedTv tv_binned(std::span<const double> x, std::span<const double> y, int bins,
                   int bootstrap, std::uint64_t seed) {
    if (x.empty() || y.empty()) {
        throw std::invalid_argument("tv_binned: empty sample");
    }
    std::vector<double> pooled(x.begin(), x.end());
    pooled.insert(pooled.end(), y.begin(), y.end());
    const auto edges = equal_mass_edges(pooled, bins);
    BinnedTv out;
    out.tv = tv_on_edges(x, y, edges);
    out.tv_coarse = tv_on_edges(x, y, equal_mass_edges(pooled, std::max(2, bins / 2)));
    out.tv_fine = tv_on_edges(x, y, equal_mass_edges(pooled, bins * 2));
    if (bootstrap > 1) {
        // Bin indices are fixed by the original pooled edges; resampling then
        // only shuffles histogram counts.
        const auto ix = bin_indices(x, edges);
        const auto iy = bin_indices(y, edges);
        const std::size_t nbins = edges.size() + 1;
        RngStream rng(seed, {0, 0, stream_purpose::kStep});
        std::vector<double> stats(static_cast<std::size_t>(bootstrap));
        std::vector<double> hx(nbins);
        std::vector<double> hy(nbins);
        for (int b = 0; b < bootstrap; ++b) {
            std::fill(hx.begin(), hx.end(), 0.0);
            std::fill(hy.begin(), hy.end(), 0.0);
            for (std::size_t k = 0; k < ix.size(); ++k) {
                hx[static_cast<std::size_t>(ix[rng.uniform_below(ix.size())])] += 1.0;
            }
            for (std::size_t k = 0; k < iy.size(); ++k) {
                hy[static_cast<std::size_t>(iy[rng.uniform_below(iy.size())])] += 1.0;
            }
            double acc = 0.0;
            for (std::size_t k = 0; k < nbins; ++k) {
                acc += std::abs(hx[k] / static_cast<double>(ix.size()) -
                                hy[k] / static_cast<double>(iy.size()));
            }
            stats[static_cast<std::size_t>(b)] = 0.5 * acc;
        }
        out.stderr_ = sd_of(stats);
    }
    return out;
}

Estimate tv_exact_vs_pmf(const std::vector<long long>& samples, const Pmf& expected,
                         int bootstrap, std::uint64_t seed) {
    if (samples.empty()) {
        throw std::invalid_argument("tv_exact_vs_pmf: empty sample");
    }
    // Dense union support so resamples reduce to histogram fills.
    std::map<long long, int> index;
    for (long long v : samples) {
        index.emplace(v, 0);
    }
    for (const auto& [v, p] : expected.mass) {
        (void)p;
        index.emplace(v, 0);
    }
    int next = 0;
    for (auto& [v, idx] : index) {
        (void)v;
        idx = next++;
    }
    const std::size_t support = index.size();
    std::vector<double> exp_probs(support, 0.0);
    for (const auto& [v, p] : expected.mass) {
        exp_probs[static_cast<std::size_t>(index[v])] = p;
    }
    std::vector<int> sample_idx(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
        sample_idx[k] = index[samples[k]];
    }
    const double n = static_cast<double>(samples.size());
    std::vector<double> hist(support, 0.0);
    for (int idx : sample_idx) {
        hist[static_cast<std::size_t>(idx)] += 1.0;
    }
    auto tv_of = [&](const std::vector<double>& h) {
        double acc = 0.0;
        for (std::size_t k = 0; k < support; ++k) {
            acc += std::abs(h[k] / n - exp_probs[k]);
        }
        return 0.5 * acc;
    };
    Estimate out;
    out.value = tv_of(hist);
    if (bootstrap > 1) {
        RngStream rng(seed, {0, 0, stream_purpose::kStep});
        std::vector<double> stats(static_cast<std::size_t>(bootstrap));
        std::vector<double> h(support);
        for (int b = 0; b < bootstrap; ++b) {
            std::fill(h.begin(), h.end(), 0.0);
            for (std::size_t k = 0; k < sample_idx.size(); ++k) {
                h[static_cast<std::size_t>(sample_idx[rng.uniform_below(sample_idx.size())])] +=
                    1.0;
            }
            stats[static_cast<std::size_t>(b)] = tv_of(h);
        }
        out.stderr_ = sd_of(stats);
    }
    return out;
}

namespace {

// Both replica-average statistics only need per-row sums, so bootstrap
// resampling works on reduced rows: (full row sum, sum excluding column 0).
struct RowSums {
    std::vector<double> full;
    std::vector<double> tail;  // columns 1..M-1
    std::size_t M = 0;
};

RowSums reduce_rows(const std::vector<std::vector<double>>& rows) {
    RowSums out;
    out.M = rows.front().size();
    out.full.reserve(rows.size());
    out.tail.reserve(rows.size());
    for (const auto& row : rows) {
        if (row.size() != out.M) {
            throw std::invalid_argument("ragged counts matrix");
        }
        double full = 0.0;
        for (double v : row) {
            full += v;
        }
        out.full.push_back(full);
        out.tail.push_back(full - row[0]);
    }
    return out;
}

double tlln_from_sums(const std::vector<double>& full, std::size_t M) {
    double grand = 0.0;
    for (double s : full) {
        grand += s;
    }
    grand /= static_cast<double>(full.size() * M);
    double acc = 0.0;
    for (double s : full) {
        acc += std::abs(s - static_cast<double>(M) * grand);
    }
    return acc / static_cast<double>(full.size() * (M - 1));
}

double chen_stein_from_sums(const std::vector<double>& full,
                            const std::vector<double>& tail, std::size_t M) {
    double grand = 0.0;
    for (double s : full) {
        grand += s;
    }
    grand /= static_cast<double>(full.size() * M);
    double centered = 0.0;
    for (double s : tail) {
        centered += std::abs(static_cast<double>(M - 1) * grand - s);
    }
    centered /= static_cast<double>(full.size());
    const double inv = 1.0 / static_cast<double>(M - 1);
    const double first = std::min(1.0, 0.74 / std::sqrt(grand)) * inv * centered;
    const double second = inv * std::min(1.0, 1.0 / grand) * grand;
    return first + second;
}

}  // namespace

Estimate tlln_deviation(const std::vector<std::vector<double>>& counts, int bootstrap,
                        std::uint64_t seed) {
    if (counts.size() < 2 || counts.front().size() < 2) {
        throw std::invalid_argument("tlln_deviation needs >= 2 replications and M >= 2");
    }
    const RowSums sums = reduce_rows(counts);
    Estimate out;
    out.value = tlln_from_sums(sums.full, sums.M);
    if (bootstrap > 1) {
        RngStream rng(seed, {0, 0, stream_purpose::kStep});
        std::vector<double> stats(static_cast<std::size_t>(bootstrap));
        std::vector<double> work(sums.full.size());
        for (int b = 0; b < bootstrap; ++b) {
            for (auto& v : work) {
                v = sums.full[rng.uniform_below(sums.full.size())];
            }
            stats[static_cast<std::size_t>(b)] = tlln_from_sums(work, sums.M);
        }
        out.stderr_ = sd_of(stats);
    }
    return out;
}

Estimate chen_stein_rhs(const std::vector<std::vector<double>>& counts, int bootstrap,
                        std::uint64_t seed) {
    if (counts.size() < 2 || counts.front().size() < 2) {
        throw std::invalid_argument("chen_stein_rhs needs >= 2 replications and M >= 2");
    }
    const RowSums sums = reduce_rows(counts);
    Estimate out;
    out.value = chen_stein_from_sums(sums.full, sums.tail, sums.M);
    if (bootstrap > 1) {
        RngStream rng(seed, {0, 0, stream_purpose::kStep});
        std::vector<double> stats(static_cast<std::size_t>(bootstrap));
        std::vector<double> wf(sums.full.size());
        std::vector<double> wt(sums.tail.size());
        for (int b = 0; b < bootstrap; ++b) {
            for (std::size_t k = 0; k < wf.size(); ++k) {
                const auto pick = rng.uniform_below(sums.full.size());
                wf[k] = sums.full[pick];
                wt[k] = sums.tail[pick];
            }
            stats[static_cast<std::size_t>(b)] = chen_stein_from_sums(wf, wt, sums.M);
        }
        out.stderr_ = sd_of(stats);
    }
    return out;
}

namespace {

std::vector<double> quantile_edges(std::span<const double> xs, int bins) {
    std::vector<double> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> edges;
    for (int k = 1; k < bins; ++k) {
        edges.push_back(sorted[sorted.size() * static_cast<std::size_t>(k) /
                               static_cast<std::size_t>(bins)]);
    }
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

double gap_statistic(std::span<const double> x, std::span<const double> y,
                     const std::vector<double>& ex, const std::vector<double>& ey) {
    const std::size_t bx = ex.size() + 1;
    const std::size_t by = ey.size() + 1;
    std::vector<double> joint(bx * by, 0.0);
    std::vector<double> mx(bx, 0.0);
    std::vector<double> my(by, 0.0);
    const double inv = 1.0 / static_cast<double>(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        const auto ix = static_cast<std::size_t>(
            std::lower_bound(ex.begin(), ex.end(), x[k]) - ex.begin());
        const auto iy = static_cast<std::size_t>(
            std::lower_bound(ey.begin(), ey.end(), y[k]) - ey.begin());
        joint[ix * by + iy] += inv;
        mx[ix] += inv;
        my[iy] += inv;
    }
    double worst = 0.0;
    for (std::size_t a = 0; a < bx; ++a) {
        for (std::size_t b = 0; b < by; ++b) {
            worst = std::max(worst, std::abs(joint[a * by + b] - mx[a] * my[b]));
        }
    }
    return worst;
}

}  // namespace

Estimate independence_gap(std::span<const double> x, std::span<const double> y, int bins,
                          int bootstrap, std::uint64_t seed) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("independence_gap: sample size mismatch");
    }
    if (x.size() < 1000) {
        throw std::invalid_argument("independence_gap needs >= 1000 samples");
    }
    if (bins < 2) {
        throw std::invalid_argument("independence_gap needs bins >= 2");
    }
    const auto ex = quantile_edges(x, bins);
    const auto ey = quantile_edges(y, bins);
    const auto nonempty_bins = [](std::span<const double> xs,
                                  const std::vector<double>& edges) {
        std::vector<bool> seen(edges.size() + 1, false);
        for (double v : xs) {
            seen[static_cast<std::size_t>(
                std::lower_bound(edges.begin(), edges.end(), v) - edges.begin())] = true;
        }
        int count = 0;
        for (bool b : seen) {
            count += b ? 1 : 0;
        }
        return count;
    };
    if (ex.empty() || ey.empty() || nonempty_bins(x, ex) < 2 || nonempty_bins(y, ey) < 2) {
        throw std::invalid_argument("independence_gap: degenerate binning (empty marginal)");
    }
    Estimate out;
    out.value = gap_statistic(x, y, ex, ey);
    if (bootstrap > 1) {
        // Bins stay fixed; paired resamples shuffle precomputed cell indices.
        const std::size_t bx = ex.size() + 1;
        const std::size_t by = ey.size() + 1;
        std::vector<int> cell_idx(x.size());
        for (std::size_t k = 0; k < x.size(); ++k) {
            const auto ix = static_cast<std::size_t>(
                std::lower_bound(ex.begin(), ex.end(), x[k]) - ex.begin());
            const auto iy = static_cast<std::size_t>(
                std::lower_bound(ey.begin(), ey.end(), y[k]) - ey.begin());
            cell_idx[k] = static_cast<int>(ix * by + iy);
        }
        RngStream rng(seed, {0, 0, stream_purpose::kStep});
        std::vector<double> stats(static_cast<std::size_t>(bootstrap));
        std::vector<double> joint(bx * by);
        const double inv = 1.0 / static_cast<double>(x.size());
        for (int b = 0; b < bootstrap; ++b) {
            std::fill(joint.begin(), joint.end(), 0.0);
            for (std::size_t k = 0; k < cell_idx.size(); ++k) {
                joint[static_cast<std::size_t>(
                    cell_idx[rng.uniform_below(cell_idx.size())])] += inv;
            }
            double worst = 0.0;
            for (std::size_t a = 0; a < bx; ++a) {
                double ma = 0.0;
                for (std::size_t c = 0; c < by; ++c) {
                    ma += joint[a * by + c];
                }
                for (std::size_t c = 0; c < by; ++c) {
                    double mc = 0.0;
                    for (std::size_t aa = 0; aa < bx; ++aa) {
                        mc += joint[aa * by + c];
                    }
                    worst = std::max(worst, std::abs(joint[a * by + c] - ma * mc));
                }
            }
            stats[static_cast<std::size_t>(b)] = worst;
        }
        out.stderr_ = sd_of(stats);
    }
    return out;
}

SlopeFit loglog_slope(std::span<const double> m_values, std::span<const double> distances) {
    if (m_values.size() != distances.size()) {
        throw std::invalid_argument("loglog_slope: size mismatch");
    }
    SlopeFit fit;
    for (std::size_t k = 0; k < m_values.size(); ++k) {
        if (distances[k] > 0.0) {
            fit.log_m.push_back(std::log(m_values[k]));
            fit.log_d.push_back(std::log(distances[k]));
        } else {
            ++fit.dropped;
        }
    }
    if (fit.log_m.size() < 3) {
        throw std::invalid_argument("loglog_slope needs >= 3 positive distances");
    }
    const double n = static_cast<double>(fit.log_m.size());
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t k = 0; k < fit.log_m.size(); ++k) {
        sx += fit.log_m[k];
        sy += fit.log_d[k];
        sxx += fit.log_m[k] * fit.log_m[k];
        sxy += fit.log_m[k] * fit.log_d[k];
    }
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / n;
    double rss = 0.0;
    for (std::size_t k = 0; k < fit.log_m.size(); ++k) {
        const double r = fit.log_d[k] - (fit.intercept + fit.slope * fit.log_m[k]);
        rss += r * r;
    }
    fit.residual_rms = std::sqrt(rss / n);
    return fit;
}

MomentCheckResult moment_check(std::span<const double> samples, double mean0, int K,
                               double H, double t, int p, bool dominated) {
    if (p < 1) {
        throw std::invalid_argument("moment_check requires p >= 1");
    }
    std::vector<double> powered(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
        powered[k] = std::pow(samples[k], p);
    }
    MomentCheckResult out;
    out.empirical = mean_of(powered);
    out.stderr_ = stderr_of(powered);
    out.bound = std::pow(mean0, p) * std::exp(p * (K - 1) * H * t);
    out.bound_applies = (p == 1) && dominated;
    out.pass = !out.bound_applies || out.empirical <= out.bound + 3.0 * out.stderr_;
    return out;
}

ExpMomentCheck exp_moment_stability(std::span<const double> samples, double xi) {
    if (samples.size() < 4) {
        throw std::invalid_argument("exp_moment_stability needs >= 4 samples");
    }
    ExpMomentCheck out;
    const std::size_t half = samples.size() / 2;
    double acc = 0.0;
    for (std::size_t k = 0; k < half; ++k) {
        acc += std::exp(xi * samples[k]);
    }
    out.estimate_half = acc / static_cast<double>(half);
    for (std::size_t k = half; k < samples.size(); ++k) {
        acc += std::exp(xi * samples[k]);
    }
    out.estimate_full = acc / static_cast<double>(samples.size());
    out.stable = std::isfinite(out.estimate_full) && std::isfinite(out.estimate_half) &&
                 std::abs(out.estimate_full - out.estimate_half) <=
                     0.25 * out.estimate_full;
    return out;
}

namespace {

// Regularized incomplete gamma by series (x < a + 1) and continued fraction.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-15) {
            break;
        }
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) {
            d = tiny;
        }
        c = b + an / c;
        if (std::abs(c) < tiny) {
            c = tiny;
        }
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) {
            break;
        }
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) {
        throw std::invalid_argument("regularized_gamma_p domain error");
    }
    if (x == 0.0) {
        return 0.0;
    }
    if (x < a + 1.0) {
        return gamma_p_series(a, x);
    }
    return 1.0 - gamma_q_cf(a, x);
}

double regularized_gamma_q(double a, double x) {
    return 1.0 - regularized_gamma_p(a, x);
}

double chi_square_pvalue(double stat, int dof) {
    if (dof < 1) {
        throw std::invalid_argument("chi_square_pvalue requires dof >= 1");
    }
    return regularized_gamma_q(0.5 * dof, 0.5 * stat);
}

double chi_square_gof_pvalue(const EmpiricalPmf& sample, const Pmf& expected,
                             double min_expected) {
    if (sample.n == 0) {
        throw std::invalid_argument("chi_square_gof_pvalue: empty sample");
    }
    const double n = static_cast<double>(sample.n);
    // Walk the union support in order, pooling cells until the expected count
    // reaches the threshold.
    std::map<long long, std::pair<double, double>> cells;  // value -> (obs, exp)
    for (const auto& [v, c] : sample.counts) {
        cells[v].first = static_cast<double>(c);
    }
    for (const auto& [v, p] : expected.mass) {
        cells[v].second = n * p;
    }
    double obs_pool = 0.0;
    double exp_pool = 0.0;
    double stat = 0.0;
    int bins = 0;
    for (const auto& [v, oe] : cells) {
        (void)v;
        obs_pool += oe.first;
        exp_pool += oe.second;
        if (exp_pool >= min_expected) {
            stat += (obs_pool - exp_pool) * (obs_pool - exp_pool) / exp_pool;
            ++bins;
            obs_pool = 0.0;
            exp_pool = 0.0;
        }
    }
    if (exp_pool > 0.0 || obs_pool > 0.0) {
        if (exp_pool <= 0.0) {
            // observed mass with zero expected mass: fold into the last bin
            stat += obs_pool * obs_pool / std::max(min_expected, 1.0);
        } else {
            stat += (obs_pool - exp_pool) * (obs_pool - exp_pool) / exp_pool;
            ++bins;
        }
    }
    if (bins < 2) {
        throw std::invalid_argument("chi_square_gof_pvalue: fewer than 2 pooled bins");
    }
    return chi_square_pvalue(stat, bins - 1);
}

Pmf poisson_pmf_truncated(double mean, double tail_eps) {
    if (mean < 0.0) {
        throw std::invalid_argument("poisson mean must be >= 0");
    }
    Pmf out;
    if (mean == 0.0) {
        out.mass[0] = 1.0;
        return out;
    }
    double p = std::exp(-mean);
    double cum = 0.0;
    long long k = 0;
    while (true) {
        out.mass[k] = p;
        cum += p;
        if (cum >= 1.0 - tail_eps && static_cast<double>(k) > mean) {
            break;
        }
        ++k;
        p *= mean / static_cast<double>(k);
        if (k > 10000000) {
            throw std::runtime_error("poisson_pmf_truncated: mean too large");
        }
    }
    return out;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("ks_two_sample: empty sample");
    }
    std::vector<double> sa(a.begin(), a.end());
    std::vector<double> sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    double d = 0.0;
    std::size_t ia = 0;
    std::size_t ib = 0;
    while (ia < sa.size() && ib < sb.size()) {
        if (sa[ia] <= sb[ib]) {
            ++ia;
        } else {
            ++ib;
        }
        const double fa = static_cast<double>(ia) / static_cast<double>(sa.size());
        const double fb = static_cast<double>(ib) / static_cast<double>(sb.size());
        d = std::max(d, std::abs(fa - fb));
    }
    return d;
}

}  // namespace fiap
