#pragma once

#include <cstdint>
#include <stdexcept>

namespace icsim {

// Counter-based random stream: the k-th draw of stream s under seed x is a pure
// function of (x, s, k), so trials can run on independent streams in any order
// and still replay bit-for-bit. Core mix is splitmix64.
class CounterRng {
  public:
    explicit CounterRng(uint64_t seed, uint64_t stream = 0)
        : key_(mix(mix(seed) ^ mix(stream ^ 0xD1B54A32D192ED03ULL))) {}

    // Stream that must never be drawn from; trips on first use. Used by the
    // transcript enumerator to catch protocols that claim determinism but draw.
    static CounterRng poisoned() {
        CounterRng r(0);
        r.poisoned_ = true;
        return r;
    }

    uint64_t next_u64() {
        if (poisoned_) throw std::logic_error("randomness drawn from a poisoned stream (deterministic context)");
        return mix(key_ + 0x9E3779B97F4A7C15ULL * ++ctr_);
    }

    // Uniform in [0,1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return next_double() < p; }

    // Uniform in [0,n). Multiply-shift; bias is n/2^64, irrelevant at these scales.
    int64_t uniform_int(int64_t n) {
        return static_cast<int64_t>((static_cast<__uint128_t>(next_u64()) * static_cast<__uint128_t>(n)) >> 64);
    }

    int sign() { return (next_u64() & 1) ? 1 : -1; }

  private:
    static uint64_t mix(uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    uint64_t key_;
    uint64_t ctr_ = 0;
    bool poisoned_ = false;
};

}  // namespace icsim
