#pragma once

#include <cstdint>

namespace psg {

// splitmix64 finalizer. Used both as a stateless counter-based generator
// (hash of seed + counter, so parallel streams never share state) and as
// the step function of the sequential generator below.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Counter-based stream: value i of stream (seed, stream_id) is pure function
// of its arguments. Identical results independent of evaluation order.
inline std::uint64_t counter_rng(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t counter) {
    std::uint64_t key = splitmix64(seed ^ (0x632be59bd9b4e019ULL * (stream_id + 1)));
    return splitmix64(key + counter * 0x9e3779b97f4a7c15ULL);
}

// Small sequential generator for chains (chaos game, test data). Fully
// specified here so results are reproducible across platforms and stdlibs.
class Rng {
  public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream_id = 0)
        : state_(splitmix64(seed ^ (0x632be59bd9b4e019ULL * (stream_id + 1)))) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    // Uniform in [0, n) by 128-bit multiply; bias is < 2^-64, ignored.
    std::uint32_t next_below(std::uint32_t n) {
        return static_cast<std::uint32_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

  private:
    std::uint64_t state_;
};

}  // namespace psg
