#include "fiap/io.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace fiap {

std::string format_double(double v) {
    char buf[40];
    // Shortest representation that round-trips a double.
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    double parsed = 0.0;
    for (int prec = 15; prec <= 16; ++prec) {
        char probe[40];
        std::snprintf(probe, sizeof(probe), "%.*g", prec, v);
        std::sscanf(probe, "%lf", &parsed);
        if (parsed == v) {
            return probe;
        }
    }
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     const std::vector<std::string>& header)
    : out_(path) {
    if (!out_) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    bool first = true;
    for (const auto& h : header) {
        if (!first) {
            out_ << ",";
        }
        out_ << h;
        first = false;
    }
    out_ << "\n";
}

CsvWriter& CsvWriter::cell(const std::string& v) {
    if (!first_) {
        out_ << ",";
    }
    out_ << v;
    first_ = false;
    return *this;
}

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string() + " for hashing");
    }
    std::uint64_t hash = 0xCBF29CE484222325ULL;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize k = 0; k < in.gcount(); ++k) {
            hash ^= static_cast<unsigned char>(buf[k]);
            hash *= 0x100000001B3ULL;
        }
    }
    return hash;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void write_event_log_csv(const std::filesystem::path& path, const EventLog& log) {
    CsvWriter csv(path, {"time", "kind", "replica", "node", "src_node", "weight"});
    // Merge the two lists back into time order; arrivals follow their
    // departure (equal times), so a simple merge on time with departures
    // first reproduces the generation order.
    std::size_t d = 0;
    std::size_t a = 0;
    while (d < log.departures.size() || a < log.arrivals.size()) {
        const bool take_departure =
            a >= log.arrivals.size() ||
            (d < log.departures.size() && log.departures[d].time <= log.arrivals[a].time);
        csv.begin_row();
        if (take_departure) {
            const Departure& ev = log.departures[d++];
            csv.cell(ev.time).cell(std::string("dep")).cell(ev.replica).cell(ev.node);
            csv.cell(-1).cell(0.0);
        } else {
            const Arrival& ev = log.arrivals[a++];
            csv.cell(ev.time).cell(std::string("arr")).cell(ev.replica).cell(ev.node);
            csv.cell(ev.src_node).cell(ev.weight);
        }
        csv.end_row();
    }
}

void write_trajectory_csv(const std::filesystem::path& path,
                          const std::vector<double>& times,
                          const std::vector<std::vector<double>>& snapshots, int M,
                          int K) {
    CsvWriter csv(path, {"time", "replica", "node", "intensity"});
    for (std::size_t s = 0; s < times.size() && s < snapshots.size(); ++s) {
        for (int m = 0; m < M; ++m) {
            for (int i = 0; i < K; ++i) {
                csv.begin_row();
                csv.cell(times[s]).cell(m).cell(i).cell(
                    snapshots[s][static_cast<std::size_t>(m) * static_cast<std::size_t>(K) +
                                 static_cast<std::size_t>(i)]);
                csv.end_row();
            }
        }
    }
}

void write_rate_function_csv(const std::filesystem::path& path, const RateFunction& rf) {
    CsvWriter csv(path, {"node", "cell_start", "rate"});
    for (int i = 0; i < rf.K; ++i) {
        for (int c = 0; c < rf.cells; ++c) {
            csv.begin_row();
            csv.cell(i).cell(c * rf.delta()).cell(rf.cell(i, c));
            csv.end_row();
        }
    }
}

RateFunction read_rate_function_csv(const std::filesystem::path& path, double horizon) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::string line;
    std::getline(in, line);  // header
    std::vector<std::tuple<int, double, double>> rows;
    int max_node = -1;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        const int node = std::stoi(cell);
        std::getline(ss, cell, ',');
        const double start = std::stod(cell);
        std::getline(ss, cell, ',');
        const double rate = std::stod(cell);
        rows.emplace_back(node, start, rate);
        max_node = std::max(max_node, node);
    }
    if (rows.empty()) {
        throw std::runtime_error("empty rate function file: " + path.string());
    }
    const int K = max_node + 1;
    const int cells = static_cast<int>(rows.size()) / K;
    RateFunction rf = RateFunction::constant(K, horizon, cells, 0.0);
    for (const auto& [node, start, rate] : rows) {
        const int c = std::min(static_cast<int>(start / rf.delta() + 0.5), cells - 1);
        rf.cell(node, c) = rate;
    }
    return rf;
}

void write_diagnostics_csv(const std::filesystem::path& path,
                           const std::vector<double>& sup_deltas,
                           const std::vector<double>& noise_floors) {
    CsvWriter csv(path, {"iteration", "sup_delta", "noise_floor"});
    for (std::size_t k = 0; k < sup_deltas.size(); ++k) {
        csv.begin_row();
        csv.cell(static_cast<long long>(k + 1)).cell(sup_deltas[k]).cell(noise_floors[k]);
        csv.end_row();
    }
}

}  // namespace fiap
