#ifndef KNNLAB_POINT_HPP
#define KNNLAB_POINT_HPP

#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

#include "knnlab/errors.hpp"
#include "knnlab/rng.hpp"

namespace knnlab {

struct Point;

// Point in R^d.
struct EuclideanVector {
    std::vector<double> coords;
};

// Point of a product-of-alphabets space.  Symbols are 1-based values in
// {1..alphabet[i]}.  A finite point is exactly its stored prefix (one level per
// stored symbol).  A lazy-infinite point extends the stored prefix on demand:
// symbol i beyond the prefix is a deterministic function of (seed, i), so
// repeated queries at the same depth always agree.  Alphabet sizes beyond the
// stored list repeat the last entry.
struct SeqPoint {
    std::vector<std::uint32_t> symbols;
    std::vector<std::uint32_t> alphabet;
    bool lazy = false;
    std::uint64_t seed = 0;

    std::size_t level() const { return symbols.size(); }  // finite points only

    std::uint32_t alphabet_at(std::size_t i) const {
        if (alphabet.empty()) throw DomainError("SeqPoint: empty alphabet");
        return i < alphabet.size() ? alphabet[i] : alphabet.back();
    }

    std::uint32_t symbol_at(std::size_t i) const {
        if (i < symbols.size()) return symbols[i];
        if (!lazy) throw DomainError("SeqPoint: symbol index beyond finite level");
        const std::uint32_t n = alphabet_at(i);
        return 1u + static_cast<std::uint32_t>(splitmix64(seed + 0x9E3779B97F4A7C15ULL * (i + 1)) % n);
    }

    // Deterministically materialize the first `depth` symbols from the seed.
    static SeqPoint make_lazy(std::uint64_t seed, std::vector<std::uint32_t> alphabet,
                              std::size_t eager_depth) {
        SeqPoint p;
        p.lazy = true;
        p.seed = seed;
        p.alphabet = std::move(alphabet);
        p.symbols.reserve(eager_depth);
        for (std::size_t i = 0; i < eager_depth; ++i) p.symbols.push_back(p.symbol_at(i));
        return p;
    }
};

// Point of the harmonic/geometric hub spaces, identified by its index.
struct HubIndex {
    std::uint32_t index = 0;
};

// Point of an l1-type direct sum: (base space point, interval coordinate).
struct SumPoint {
    std::shared_ptr<const Point> base;
    double t = 0.0;
};

struct Point {
    std::variant<EuclideanVector, SeqPoint, HubIndex, SumPoint> value;
};

inline Point make_euclidean(std::vector<double> coords) {
    return Point{EuclideanVector{std::move(coords)}};
}
inline Point make_euclidean1(double x) { return make_euclidean({x}); }
inline Point make_seq(std::vector<std::uint32_t> symbols, std::vector<std::uint32_t> alphabet) {
    return Point{SeqPoint{std::move(symbols), std::move(alphabet), false, 0}};
}
inline Point make_hub(std::uint32_t index) { return Point{HubIndex{index}}; }
inline Point make_sum(Point base, double t) {
    return Point{SumPoint{std::make_shared<const Point>(std::move(base)), t}};
}

// Set-theoretic point identity.  Two lazy sequences are the same point iff they
// share seed, stored prefix and alphabet (the seed determines the whole tail).
inline bool point_equal(const Point& a, const Point& b) {
    if (a.value.index() != b.value.index()) return false;
    if (const auto* ea = std::get_if<EuclideanVector>(&a.value)) {
        return ea->coords == std::get<EuclideanVector>(b.value).coords;
    }
    if (const auto* sa = std::get_if<SeqPoint>(&a.value)) {
        const auto& sb = std::get<SeqPoint>(b.value);
        if (sa->lazy != sb.lazy) return false;
        if (sa->lazy) return sa->seed == sb.seed && sa->symbols == sb.symbols && sa->alphabet == sb.alphabet;
        return sa->symbols == sb.symbols;
    }
    if (const auto* ha = std::get_if<HubIndex>(&a.value)) {
        return ha->index == std::get<HubIndex>(b.value).index;
    }
    const auto& ma = std::get<SumPoint>(a.value);
    const auto& mb = std::get<SumPoint>(b.value);
    return ma.t == mb.t && point_equal(*ma.base, *mb.base);
}

}  // namespace knnlab

#endif
