#pragma once

#include <cstdint>

namespace fiap {

// Identifies one randomness stream within a trajectory. Streams with equal
// (seed, id) replay identically; distinct ids are statistically independent.
struct StreamId {
    std::uint32_t replica = 0;
    std::uint32_t node = 0;
    std::uint32_t purpose = 0;
};

namespace stream_purpose {
inline constexpr std::uint32_t kThinning = 1;
inline constexpr std::uint32_t kRouting = 2;
inline constexpr std::uint32_t kInit = 3;
inline constexpr std::uint32_t kStep = 4;
// Arrival streams in the Poisson-Hypothesis engine: one per (source, target)
// pair, encoded as kArrivalBase + source_node.
inline constexpr std::uint32_t kArrivalBase = 16;
}  // namespace stream_purpose

// splitmix64 finalizer; also used to derive per-path seeds.
std::uint64_t mix64(std::uint64_t z) noexcept;
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) noexcept;

// xoshiro256++ keyed by (seed, StreamId). Small state, cheap construction;
// a trajectory owns a few streams per (replica, node).
class RngStream {
  public:
    RngStream() : RngStream(0, StreamId{}) {}
    RngStream(std::uint64_t seed, StreamId id) noexcept;

    std::uint64_t next_u64() noexcept;

    // Uniform on [0, 1), 53-bit mantissa.
    double uniform01() noexcept;

    // Inverse-CDF exponential; rate must be > 0.
    double exponential(double rate);

    // Uniform integer on [0, n), rejection-corrected (no modulo bias).
    std::uint64_t uniform_below(std::uint64_t n);

    // Exact Poisson sample (Knuth multiplication, chunked for large means).
    long long poisson(double mean);

  private:
    std::uint64_t s_[4];
};

}  // namespace fiap
