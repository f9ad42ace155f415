#include "fiap/ph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fiap/point_process.hpp"

namespace fiap {

RateFunction RateFunction::constant(int K, double horizon, int cells, double rate) {
    RateFunction rf;
    rf.K = K;
    rf.horizon = horizon;
    rf.cells = cells;
    rf.values.assign(static_cast<std::size_t>(K) * static_cast<std::size_t>(cells), rate);
    return rf;
}

double RateFunction::value(int node, double t) const {
    int c = static_cast<int>(t / horizon * cells);
    c = std::clamp(c, 0, cells - 1);
    return cell(node, c);
}

double RateFunction::integral(int node, double t) const {
    const double d = delta();
    const int full = std::clamp(static_cast<int>(t / d), 0, cells);
    double acc = 0.0;
    for (int c = 0; c < full; ++c) {
        acc += cell(node, c) * d;
    }
    if (full < cells) {
        const double rem = t - full * d;
        if (rem > 0.0) {
            acc += cell(node, full) * rem;
        }
    }
    return acc;
}

double RateFunction::sup_distance(const RateFunction& other) const {
    if (values.size() != other.values.size()) {
        throw std::invalid_argument("RateFunction::sup_distance: shape mismatch");
    }
    double worst = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        worst = std::max(worst, std::abs(values[k] - other.values[k]));
    }
    return worst;
}

namespace {

struct TimedArrival {
    double time;
    int src_node;
};

// Per-cell homogeneous sampling of the inhomogeneous arrival stream: exact
// for the piecewise-constant representation, no thinning error.
void sample_arrivals(const RateFunction& rates, int src, double horizon,
                     RngStream& rng, std::vector<TimedArrival>& out) {
    const double d = rates.delta();
    const int usable = std::min(rates.cells, static_cast<int>(std::ceil(horizon / d)));
    for (int c = 0; c < usable; ++c) {
        const double cell_start = c * d;
        const double cell_len = std::min(d, horizon - cell_start);
        if (cell_len <= 0.0) {
            break;
        }
        const double mean = rates.cell(src, c) * cell_len;
        const long long count = rng.poisson(mean);
        for (long long k = 0; k < count; ++k) {
            out.push_back({cell_start + cell_len * rng.uniform01(), src});
        }
    }
}

}  // namespace

PhPathResult simulate_ph_path(const CFIAPSpec& spec, const RateFunction& rates,
                              double horizon, std::uint64_t path_seed,
                              std::vector<double>* cell_dep_accum) {
    const int K = spec.K();
    if (K > 1 && (rates.K != K || rates.horizon < horizon - 1e-12)) {
        throw std::invalid_argument("rate grid does not cover the horizon");
    }
    PhPathResult out;
    out.lam_T.assign(static_cast<std::size_t>(K), 0.0);
    out.lam_half.assign(static_cast<std::size_t>(K), 0.0);
    out.arrivals_T.assign(static_cast<std::size_t>(K), 0.0);
    out.arrivals_half.assign(static_cast<std::size_t>(K), 0.0);
    out.dep_counts.assign(static_cast<std::size_t>(K), 0);
    const double half = 0.5 * horizon;
    const int accum_cells =
        cell_dep_accum ? static_cast<int>(cell_dep_accum->size() / static_cast<std::size_t>(K))
                       : 0;

    std::vector<TimedArrival> arrivals;
    for (int i = 0; i < K; ++i) {
        arrivals.clear();
        for (int j = 0; j < K; ++j) {
            if (j == i) {
                continue;
            }
            RngStream arr_rng(path_seed,
                              StreamId{static_cast<std::uint32_t>(j),
                                       static_cast<std::uint32_t>(i),
                                       stream_purpose::kArrivalBase +
                                           static_cast<std::uint32_t>(j)});
            sample_arrivals(rates, j, horizon, arr_rng, arrivals);
        }
        std::sort(arrivals.begin(), arrivals.end(),
                  [](const TimedArrival& a, const TimedArrival& b) {
                      return a.time < b.time || (a.time == b.time && a.src_node < b.src_node);
                  });

        RngStream init_rng(path_seed,
                           StreamId{0, static_cast<std::uint32_t>(i), stream_purpose::kInit});
        RngStream thin_rng(path_seed, StreamId{0, static_cast<std::uint32_t>(i),
                                               stream_purpose::kThinning});
        const DriftModel drift = spec.drift(i);
        double t = 0.0;
        double lam = spec.init(i).sample(init_rng);
        double agg = 0.0;
        double fagg = spec.f(0.0);
        double arr_weight = 0.0;
        bool half_done = false;

        auto advance_through = [&](double target) {
            // departures by thinning on the drift-only path until `target`
            while (t < target) {
                const double bound = spec.rate_bound(i, lam);
                const double t0 = t;
                const double lam0 = lam;
                const auto eval = [&](double s) {
                    return std::max(integrate_drift(drift, lam0, t0, s), 0.0);
                };
                const auto next = detail::thin_next(eval, bound, t0, target, thin_rng);
                const double stop = next ? *next : target;
                if (!half_done && half <= stop && half >= t) {
                    out.lam_half[static_cast<std::size_t>(i)] =
                        integrate_drift(drift, lam, t, half);
                    out.arrivals_half[static_cast<std::size_t>(i)] = arr_weight;
                    half_done = true;
                }
                lam = integrate_drift(drift, lam, t, stop);
                t = stop;
                if (next) {
                    ++out.dep_counts[static_cast<std::size_t>(i)];
                    if (accum_cells > 0) {
                        const int c = std::min(static_cast<int>(t / horizon * accum_cells),
                                               accum_cells - 1);
                        (*cell_dep_accum)[static_cast<std::size_t>(i) *
                                              static_cast<std::size_t>(accum_cells) +
                                          static_cast<std::size_t>(c)] += 1.0;
                    }
                    lam = spec.g(i, t, lam);
                }
            }
        };

        for (const TimedArrival& a : arrivals) {
            if (a.time > horizon) {
                break;
            }
            advance_through(a.time);
            const double w = spec.h(a.src_node, i, a.time);
            agg += w;
            const double fagg_new = spec.f(agg);
            lam += fagg_new - fagg;
            fagg = fagg_new;
            arr_weight += w;
        }
        advance_through(horizon);
        if (!half_done) {
            out.lam_half[static_cast<std::size_t>(i)] = lam;
            out.arrivals_half[static_cast<std::size_t>(i)] = arr_weight;
        }
        out.lam_T[static_cast<std::size_t>(i)] = lam;
        out.arrivals_T[static_cast<std::size_t>(i)] = arr_weight;
    }
    return out;
}

std::vector<double> PhBatchResult::column(const std::vector<double>& field, int node) const {
    std::vector<double> out(static_cast<std::size_t>(n_paths));
    for (int p = 0; p < n_paths; ++p) {
        out[static_cast<std::size_t>(p)] = at(field, p, node);
    }
    return out;
}

PhBatchResult simulate_ph(const CFIAPSpec& spec, const RateFunction& rates,
                          int n_paths, double horizon, std::uint64_t seed) {
    PhBatchResult out;
    out.n_paths = n_paths;
    out.K = spec.K();
    const std::size_t size =
        static_cast<std::size_t>(n_paths) * static_cast<std::size_t>(out.K);
    out.lam_T.reserve(size);
    out.lam_half.reserve(size);
    out.arrivals_T.reserve(size);
    out.arrivals_half.reserve(size);
    for (int p = 0; p < n_paths; ++p) {
        PhPathResult r = simulate_ph_path(spec, rates, horizon,
                                          derive_seed(seed, static_cast<std::uint64_t>(p)));
        out.lam_T.insert(out.lam_T.end(), r.lam_T.begin(), r.lam_T.end());
        out.lam_half.insert(out.lam_half.end(), r.lam_half.begin(), r.lam_half.end());
        out.arrivals_T.insert(out.arrivals_T.end(), r.arrivals_T.begin(), r.arrivals_T.end());
        out.arrivals_half.insert(out.arrivals_half.end(), r.arrivals_half.begin(),
                                 r.arrivals_half.end());
    }
    return out;
}

PhiResult phi_iterate(const CFIAPSpec& spec, const RateFunction& rates_in,
                      int n_paths, std::uint64_t seed) {
    if (n_paths <= 0) {
        throw std::invalid_argument("phi_iterate requires n_paths > 0");
    }
    const int K = spec.K();
    const int cells = rates_in.cells;
    const double horizon = rates_in.horizon;
    const std::size_t size = static_cast<std::size_t>(K) * static_cast<std::size_t>(cells);
    std::vector<double> sum(size, 0.0);
    std::vector<double> sumsq(size, 0.0);
    std::vector<double> path_cells(size);
    for (int p = 0; p < n_paths; ++p) {
        std::fill(path_cells.begin(), path_cells.end(), 0.0);
        simulate_ph_path(spec, rates_in, horizon,
                         derive_seed(seed, static_cast<std::uint64_t>(p)), &path_cells);
        for (std::size_t k = 0; k < size; ++k) {
            sum[k] += path_cells[k];
            sumsq[k] += path_cells[k] * path_cells[k];
        }
    }
    PhiResult out;
    out.rates = rates_in;
    out.cell_stderr.assign(size, 0.0);
    const double d = rates_in.delta();
    for (std::size_t k = 0; k < size; ++k) {
        const double mean = sum[k] / n_paths;
        out.rates.values[k] = mean / d;
        if (n_paths > 1) {
            const double var = std::max(0.0, (sumsq[k] - n_paths * mean * mean) / (n_paths - 1));
            out.cell_stderr[k] = std::sqrt(var / n_paths) / d;
        }
    }
    return out;
}

FixedPointResult solve_fixed_point(const CFIAPSpec& spec, int cells, double tol,
                                   int max_iter, int n_paths, std::uint64_t seed) {
    if (!(tol > 0.0)) {
        throw std::invalid_argument("solve_fixed_point requires tol > 0");
    }
    const int K = spec.K();
    FixedPointResult out;
    RateFunction current = RateFunction::constant(K, spec.horizon(), cells, 0.0);
    for (int i = 0; i < K; ++i) {
        for (int c = 0; c < cells; ++c) {
            current.cell(i, c) = spec.init(i).mean();
        }
    }
    for (int iter = 0; iter < max_iter; ++iter) {
        PhiResult next = phi_iterate(spec, current, n_paths,
                                     derive_seed(seed, 1000 + static_cast<std::uint64_t>(iter)));
        const double delta = current.sup_distance(next.rates);
        double max_se = 0.0;
        for (double se : next.cell_stderr) {
            max_se = std::max(max_se, se);
        }
        const double floor = 3.0 * max_se;
        out.sup_deltas.push_back(delta);
        out.noise_floors.push_back(floor);
        current = std::move(next.rates);
        out.cell_stderr = std::move(next.cell_stderr);
        out.iterations = iter + 1;
        if (delta < tol + floor) {
            out.converged = true;
            break;
        }
    }
    out.rates = std::move(current);
    return out;
}

}  // namespace fiap
