#include "fiap/rmf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <stdexcept>
#include <tuple>

namespace fiap {

int route_excluding(RngStream& rng, int M, int exclude) {
    if (M < 2) {
        throw std::invalid_argument("route_excluding requires M >= 2");
    }
    if (exclude < 0 || exclude >= M) {
        throw std::invalid_argument("route_excluding: exclude out of range");
    }
    const int offset = 1 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(M - 1)));
    return (exclude + offset) % M;
}

namespace {

struct NodeRt {
    double anchor_t = 0.0;
    double lam = 0.0;
    double agg = 0.0;
    double fagg = 0.0;  // cached f(agg); lam - fagg is the base component
    std::uint32_t epoch = 0;
    RngStream thin;
};

// heap entries ordered by (time, node index); epoch invalidates stale entries
using HeapEntry = std::tuple<double, int, std::uint32_t>;

class Engine {
  public:
    Engine(const CFIAPSpec& spec, int M, double horizon, std::uint64_t seed,
           const RmfOptions& opts)
        : spec_(spec), M_(M), K_(spec.K()), horizon_(horizon), opts_(opts) {
        if (M < 2) {
            throw std::invalid_argument("simulate_rmf requires M >= 2");
        }
        if (!(horizon > 0.0) || !std::isfinite(horizon)) {
            throw std::invalid_argument("simulate_rmf requires finite horizon > 0");
        }
        drift_.reserve(static_cast<std::size_t>(K_));
        for (int i = 0; i < K_; ++i) {
            drift_.push_back(spec.drift(i));
        }
        const auto stream_replica = [this](int m) {
            return static_cast<std::uint32_t>((m + opts_.stream_rotation) % M_);
        };
        nodes_.resize(total());
        route_.reserve(total());
        for (int m = 0; m < M_; ++m) {
            for (int i = 0; i < K_; ++i) {
                route_.emplace_back(seed, StreamId{stream_replica(m),
                                                   static_cast<std::uint32_t>(i),
                                                   stream_purpose::kRouting});
            }
        }
        // Initial intensities: one draw per node shared across replicas
        // unless independent initials are requested.
        std::vector<double> shared_init(static_cast<std::size_t>(K_));
        for (int i = 0; i < K_; ++i) {
            RngStream init_rng(seed, StreamId{0, static_cast<std::uint32_t>(i),
                                              stream_purpose::kInit});
            shared_init[static_cast<std::size_t>(i)] = spec.init(i).sample(init_rng);
        }
        const double f0 = spec.f(0.0);
        for (int m = 0; m < M_; ++m) {
            for (int i = 0; i < K_; ++i) {
                NodeRt& nd = nodes_[idx(m, i)];
                if (opts_.independent_initials) {
                    RngStream init_rng(seed, StreamId{stream_replica(m),
                                                      static_cast<std::uint32_t>(i),
                                                      stream_purpose::kInit});
                    nd.lam = spec.init(i).sample(init_rng);
                } else {
                    nd.lam = shared_init[static_cast<std::size_t>(i)];
                }
                nd.agg = 0.0;
                nd.fagg = f0;  // f(0) = 0 for valid specs
                nd.anchor_t = 0.0;
                nd.thin = RngStream(seed, StreamId{stream_replica(m),
                                                   static_cast<std::uint32_t>(i),
                                                   stream_purpose::kThinning});
            }
        }
        if (opts_.rate_cells > 0) {
            result_.cell_dep_counts.assign(
                static_cast<std::size_t>(K_) * static_cast<std::size_t>(opts_.rate_cells), 0.0);
        }
        result_.dep_counts.assign(total(), 0);
        result_.arrivals.assign(total(), 0.0);
    }

    RmfResult run() {
        for (int m = 0; m < M_; ++m) {
            for (int i = 0; i < K_; ++i) {
                schedule(static_cast<int>(idx(m, i)));
            }
        }
        while (!heap_.empty()) {
            const auto [te, flat, epoch] = heap_.top();
            heap_.pop();
            if (epoch != nodes_[static_cast<std::size_t>(flat)].epoch) {
                continue;
            }
            flush_snapshots(te);
            process_departure(flat, te);
        }
        flush_snapshots(horizon_ + 1.0);
        finalize_state();
        return std::move(result_);
    }

  private:
    std::size_t total() const {
        return static_cast<std::size_t>(M_) * static_cast<std::size_t>(K_);
    }
    std::size_t idx(int m, int i) const {
        return static_cast<std::size_t>(m) * static_cast<std::size_t>(K_) +
               static_cast<std::size_t>(i);
    }

    double evolve_lam(int i, double lam0, double t0, double t1) const {
        const DriftModel& d = drift_[static_cast<std::size_t>(i)];
        if (t1 == t0) {
            return lam0;
        }
        if (d.affine) {
            const double c = d.beta - 1.0;
            if (c == 0.0) {
                return lam0 + d.alpha * (t1 - t0);
            }
            const double fixed = -d.alpha / c;
            return fixed + (lam0 - fixed) * std::exp(c * (t1 - t0));
        }
        return integrate_drift(d, lam0, t0, t1);
    }

    void advance(NodeRt& nd, int i, double t) const {
        nd.lam = evolve_lam(i, nd.lam, nd.anchor_t, t);
        nd.anchor_t = t;
        if (!std::isfinite(nd.lam)) {
            char buf[128];
            std::snprintf(buf, sizeof(buf), "non-finite intensity at t=%.9g", t);
            throw std::runtime_error(buf);
        }
    }

    void schedule(int flat) {
        NodeRt& nd = nodes_[static_cast<std::size_t>(flat)];
        const int i = flat % K_;
        const double now = nd.anchor_t;
        const double lam0 = nd.lam;
        const double bound = spec_.rate_bound(i, lam0);
        const auto eval = [this, i, lam0, now](double s) {
            return std::max(evolve_lam(i, lam0, now, s), 0.0);
        };
        const auto next = detail::thin_next(eval, bound, now, horizon_, nd.thin);
        if (next) {
            heap_.emplace(*next, flat, nd.epoch);
        }
    }

    void check_reconstruction(const NodeRt& nd, double t) const {
        const double fresh = spec_.f(nd.agg);
        if (std::abs(fresh - nd.fagg) > 1e-9 * (1.0 + std::abs(fresh))) {
            char buf[160];
            std::snprintf(buf, sizeof(buf),
                          "reconstruction identity violated at t=%.9g: f(agg)=%.12g cached=%.12g",
                          t, fresh, nd.fagg);
            throw std::logic_error(buf);
        }
    }

    void process_departure(int flat, double te) {
        const int n = flat / K_;
        const int j = flat % K_;
        NodeRt& src = nodes_[static_cast<std::size_t>(flat)];
        advance(src, j, te);
        ++result_.dep_counts[static_cast<std::size_t>(flat)];
        if (opts_.rate_cells > 0) {
            const int cell = std::min(static_cast<int>(te / horizon_ * opts_.rate_cells),
                                      opts_.rate_cells - 1);
            result_.cell_dep_counts[static_cast<std::size_t>(j) *
                                        static_cast<std::size_t>(opts_.rate_cells) +
                                    static_cast<std::size_t>(cell)] += 1.0;
        }
        if (opts_.record_log) {
            result_.log.departures.push_back({te, n, j});
        }
        src.lam = spec_.g(j, te, src.lam);
        ++src.epoch;
        check_reconstruction(src, te);

        RngStream& route_rng = route_[static_cast<std::size_t>(flat)];
        for (int i = 0; i < K_; ++i) {
            if (i == j) {
                continue;
            }
            const int v = route_excluding(route_rng, M_, n);
            const double w = spec_.h(j, i, te);
            const std::size_t tgt = idx(v, i);
            NodeRt& dst = nodes_[tgt];
            advance(dst, i, te);
            dst.agg += w;
            const double fagg_new = spec_.f(dst.agg);
            dst.lam += fagg_new - dst.fagg;
            dst.fagg = fagg_new;
            ++dst.epoch;
            result_.arrivals[tgt] += w;
            if (opts_.record_log) {
                result_.log.arrivals.push_back({te, v, i, j, w});
            }
            check_reconstruction(dst, te);
            schedule(static_cast<int>(tgt));
        }
        schedule(flat);
    }

    void flush_snapshots(double upto) {
        while (snap_idx_ < opts_.snapshot_times.size() &&
               opts_.snapshot_times[snap_idx_] < upto) {
            const double ts = opts_.snapshot_times[snap_idx_];
            std::vector<double> lam_row(total());
            std::vector<double> arr_row(result_.arrivals);
            for (int m = 0; m < M_; ++m) {
                for (int i = 0; i < K_; ++i) {
                    const NodeRt& nd = nodes_[idx(m, i)];
                    lam_row[idx(m, i)] = evolve_lam(i, nd.lam, nd.anchor_t, ts);
                }
            }
            result_.snapshots.push_back(std::move(lam_row));
            result_.arrival_snapshots.push_back(std::move(arr_row));
            ++snap_idx_;
        }
    }

    void finalize_state() {
        ReplicaState& st = result_.state;
        st.t = horizon_;
        st.M = M_;
        st.K = K_;
        st.lam.resize(total());
        st.agg.resize(total());
        st.base.resize(total());
        for (int m = 0; m < M_; ++m) {
            for (int i = 0; i < K_; ++i) {
                NodeRt& nd = nodes_[idx(m, i)];
                advance(nd, i, horizon_);
                st.lam[idx(m, i)] = nd.lam;
                st.agg[idx(m, i)] = nd.agg;
                st.base[idx(m, i)] = nd.lam - nd.fagg;
            }
        }
    }

    const CFIAPSpec& spec_;
    int M_;
    int K_;
    double horizon_;
    RmfOptions opts_;
    std::vector<DriftModel> drift_;
    std::vector<NodeRt> nodes_;
    std::vector<RngStream> route_;
    std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<HeapEntry>> heap_;
    std::size_t snap_idx_ = 0;
    RmfResult result_;
};

}  // namespace

RmfResult simulate_rmf(const CFIAPSpec& spec, int M, double horizon,
                       std::uint64_t seed, const RmfOptions& opts) {
    Engine engine(spec, M, horizon, seed, opts);
    return engine.run();
}

std::vector<double> arrival_count_path(const EventLog& log, int m, int i,
                                       std::span<const double> grid) {
    std::vector<std::pair<double, double>> jumps;
    for (const Arrival& a : log.arrivals) {
        if (a.replica == m && a.node == i) {
            jumps.emplace_back(a.time, a.weight);
        }
    }
    std::sort(jumps.begin(), jumps.end());
    std::vector<double> out(grid.size(), 0.0);
    double acc = 0.0;
    std::size_t next_jump = 0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        while (next_jump < jumps.size() && jumps[next_jump].first <= grid[k]) {
            acc += jumps[next_jump].second;
            ++next_jump;
        }
        out[k] = acc;
    }
    return out;
}

}  // namespace fiap
