#ifndef KNNLAB_RNG_HPP
#define KNNLAB_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

namespace knnlab {

// splitmix64 finalizer; also used as the stateless per-symbol PRF for lazy points.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Seed splitting: trials/streams get independent reproducible seeds from the
// master seed.  derive(master, a, b, c) = three chained splitmix64 mixes; the
// stream ids are the runners' (schedule index, trial, purpose) triples.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t s = splitmix64(master ^ (0xA0761D6478BD642FULL + a));
    s = splitmix64(s ^ (0xE7037ED1A0B428DBULL + b));
    return splitmix64(s ^ (0x8EBC6AF09C88C6E3ULL + c));
}

// Caller-owned generator state.  All distributions are hand-rolled on top of
// the raw engine so sample streams are identical across standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, n), n >= 1.  Rejection-free threshold method.
    std::uint64_t uniform_index(std::uint64_t n) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit && limit != 0);
        return v % n;
    }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    bool bernoulli(double p) { return uniform01() < p; }

    // Uniformly random k-subset of {0,..,n-1} via partial Fisher-Yates.
    std::vector<std::size_t> subset(std::size_t n, std::size_t k) {
        std::vector<std::size_t> pool(n);
        for (std::size_t i = 0; i < n; ++i) pool[i] = i;
        for (std::size_t i = 0; i < k; ++i) {
            std::size_t j = i + static_cast<std::size_t>(uniform_index(n - i));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(k);
        return pool;
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace knnlab

#endif
