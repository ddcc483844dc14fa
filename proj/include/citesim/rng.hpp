#pragma once

#include <cstdint>
#include <random>

namespace citesim {

// Seeded deterministic generator with cheap independent substreams.
// mt19937_64 is fully specified by the standard, and every variate in
// this project is derived from its raw 64-bit output with fixed
// integer/compare logic, so a given (seed, stream) reproduces the same
// draw sequence on every platform and for any thread count.
class RngState {
public:
    explicit RngState(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream), eng_(engine_seed(seed, stream)) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    // Child generator keyed by (seed, stream, index); independent of any
    // draws already taken from this state.
    RngState substream(std::uint64_t index) const {
        return RngState(seed_, mix(stream_ + 0x9e3779b97f4a7c15ull * (index + 1)));
    }

    std::uint64_t next_u64() { return eng_(); }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // Direct engine access for std:: distributions.
    std::mt19937_64& engine() { return eng_; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ull;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebull;
        z ^= z >> 31;
        return z;
    }

    static std::uint64_t engine_seed(std::uint64_t seed, std::uint64_t stream) {
        return mix(mix(seed + 0x9e3779b97f4a7c15ull) ^ (mix(stream) + 0x2545f4914f6cdd1dull));
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 eng_;
};

}  // namespace citesim
