#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace teg::rng {

// splitmix64, used to fan a single user seed out into independent streams.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline uint64_t derive_seed(uint64_t seed, uint64_t stream) {
    uint64_t s = seed ^ (0x632be59bd9b4e019ull * (stream + 1));
    splitmix64(s);
    return splitmix64(s);
}

// mt19937_64 engine (bit-exact per the standard) with hand-rolled
// distributions, so sampled values are identical on every platform.
class Stream {
  public:
    explicit Stream(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // unbiased integer in [0, bound)
    uint64_t next_below(uint64_t bound) {
        if (bound <= 1) return 0;
        uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % bound;
    }

    // [0, 1) with 53-bit resolution
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Box-Muller; one value per call, no cached spare (keeps replay trivial)
    double gaussian(double mean = 0.0, double stddev = 1.0) {
        double u1;
        do {
            u1 = next_double();
        } while (u1 <= 0.0);
        double u2 = next_double();
        double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
        return mean + stddev * z;
    }

    // Fisher-Yates with next_below, deterministic across platforms
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    Stream child(uint64_t stream_id) { return Stream(derive_seed(next_u64(), stream_id)); }

  private:
    std::mt19937_64 engine_;
};

}  // namespace teg::rng
