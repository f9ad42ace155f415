#pragma once

#include <span>
#include <vector>

#include "fiap/model.hpp"
#include "fiap/rng.hpp"

namespace fiap {

struct Departure {
    double time;
    int replica;
    int node;
};

struct Arrival {
    double time;
    int replica;   // target replica
    int node;      // target node
    int src_node;  // departing node
    double weight; // h evaluated at the departure time
};

// Time-ordered record of one trajectory. Departure times are strictly
// increasing; arrivals share the time of their departure (one fan-out of
// K - 1 records per departure), strictly increasing per (replica, node).
struct EventLog {
    std::vector<Departure> departures;
    std::vector<Arrival> arrivals;
};

// Live state of the M x K replica system, row-major over replicas, with the
// reconstruction identity lam = base + f(agg) holding entrywise.
struct ReplicaState {
    double t = 0.0;
    int M = 0;
    int K = 0;
    std::vector<double> lam;
    std::vector<double> agg;
    std::vector<double> base;

    double lam_at(int m, int i) const { return lam[idx(m, i)]; }
    double agg_at(int m, int i) const { return agg[idx(m, i)]; }
    double base_at(int m, int i) const { return base[idx(m, i)]; }
    std::size_t idx(int m, int i) const {
        return static_cast<std::size_t>(m) * static_cast<std::size_t>(K) +
               static_cast<std::size_t>(i);
    }
};

struct RmfOptions {
    // Default couples the initial condition across replicas: one draw per
    // node shared by every replica.
    bool independent_initials = false;
    bool record_log = true;
    std::vector<double> snapshot_times;  // sorted, within [0, horizon]
    // When > 0, accumulate per-(node, cell) departure counts on a uniform
    // grid of this many cells over [0, horizon], summed over replicas.
    int rate_cells = 0;
    // Relabeled-seed runs: replica m draws its streams under the id of
    // replica (m + stream_rotation) mod M. Routing is offset-based, so a
    // rotated run produces the exactly rotated EventLog.
    int stream_rotation = 0;
};

struct RmfResult {
    ReplicaState state;  // at the horizon
    EventLog log;
    // One row per snapshot time: M*K intensities.
    std::vector<std::vector<double>> snapshots;
    // Snapshot of cumulative weighted arrivals A_{m,i} at each snapshot time.
    std::vector<std::vector<double>> arrival_snapshots;
    std::vector<double> arrivals;         // A_{m,i}(horizon), M*K
    std::vector<long long> dep_counts;    // departures per (m, i) on [0, horizon]
    std::vector<double> cell_dep_counts;  // K*rate_cells, summed over replicas
};

// Event-driven simulation of the M-replica dynamics: per-(m, i) thinning
// against the drift-only intensity path, resets through g at own departures,
// and per-departure routing of one weighted arrival to every other node in a
// uniformly chosen foreign replica. Deterministic given (spec, M, seed).
RmfResult simulate_rmf(const CFIAPSpec& spec, int M, double horizon,
                       std::uint64_t seed, const RmfOptions& opts = RmfOptions{});

// Uniform on {0..M-1} \ {exclude} via a cyclic offset from the excluded
// index; replica-rotation equivariant.
int route_excluding(RngStream& rng, int M, int exclude);

// Cumulative weighted arrivals to (m, i) evaluated at the grid times.
std::vector<double> arrival_count_path(const EventLog& log, int m, int i,
                                       std::span<const double> grid);

}  // namespace fiap
