#include "fiap/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace fiap {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
}

inline std::uint64_t splitmix_next(std::uint64_t& state) noexcept {
    state += kGolden;
    return mix64(state);
}

}  // namespace

std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) noexcept {
    return mix64(seed ^ mix64(salt + kGolden));
}

RngStream::RngStream(std::uint64_t seed, StreamId id) noexcept {
    std::uint64_t h = seed;
    h = mix64(h ^ (kGolden + id.replica));
    h = mix64(h ^ (0xBF58476D1CE4E5B9ULL + id.node));
    h = mix64(h ^ (0x94D049BB133111EBULL + id.purpose));
    for (auto& word : s_) {
        word = splitmix_next(h);
    }
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) {
        s_[0] = 1;  // all-zero is the one forbidden xoshiro state
    }
}

std::uint64_t RngStream::next_u64() noexcept {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double RngStream::uniform01() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::exponential(double rate) {
    if (!(rate > 0.0)) {
        throw std::invalid_argument("RngStream::exponential requires rate > 0");
    }
    // log1p(-u) is finite for u in [0, 1).
    return -std::log1p(-uniform01()) / rate;
}

std::uint64_t RngStream::uniform_below(std::uint64_t n) {
    if (n == 0) {
        throw std::invalid_argument("RngStream::uniform_below requires n > 0");
    }
    const std::uint64_t threshold = (~n + 1) % n;  // 2^64 mod n
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x < threshold);
    return x % n;
}

long long RngStream::poisson(double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) {
        throw std::invalid_argument("RngStream::poisson requires finite mean >= 0");
    }
    long long total = 0;
    // Knuth's product method is exact; chunk so exp(-mean) stays well away
    // from underflow.
    while (mean > 30.0) {
        total += poisson(30.0);
        mean -= 30.0;
    }
    if (mean == 0.0) {
        return total;
    }
    const double limit = std::exp(-mean);
    double prod = 1.0;
    long long k = -1;
    do {
        prod *= uniform01();
        ++k;
    } while (prod > limit);
    return total + k;
}

}  // namespace fiap
