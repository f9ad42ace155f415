#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fiap/ph.hpp"
#include "fiap/rmf.hpp"

namespace fiap {

// Shortest round-trip decimal representation; deterministic across runs.
std::string format_double(double v);

class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

    void begin_row() { first_ = true; }
    CsvWriter& cell(const std::string& v);
    CsvWriter& cell(double v) { return cell(format_double(v)); }
    CsvWriter& cell(long long v) { return cell(std::to_string(v)); }
    CsvWriter& cell(int v) { return cell(std::to_string(v)); }
    void end_row() { out_ << "\n"; }

  private:
    std::ofstream out_;
    bool first_ = true;
};

std::uint64_t fnv1a64_file(const std::filesystem::path& path);
std::string hex64(std::uint64_t v);

void write_event_log_csv(const std::filesystem::path& path, const EventLog& log);
void write_trajectory_csv(const std::filesystem::path& path,
                          const std::vector<double>& times,
                          const std::vector<std::vector<double>>& snapshots, int M, int K);
void write_rate_function_csv(const std::filesystem::path& path, const RateFunction& rf);
RateFunction read_rate_function_csv(const std::filesystem::path& path, double horizon);
void write_diagnostics_csv(const std::filesystem::path& path,
                           const std::vector<double>& sup_deltas,
                           const std::vector<double>& noise_floors);

}  // namespace fiap
