#ifndef KNNLAB_TESTS_HELPERS_HPP
#define KNNLAB_TESTS_HELPERS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "knnlab/knn.hpp"
#include "knnlab/metric_space.hpp"
#include "knnlab/point.hpp"
#include "knnlab/rng.hpp"

namespace knnlab::testing {

// Independent oracle for the atom-vs-Haar metric: embed both sequences as
// truncated coordinate vectors (one basis axis per prefix tuple, coefficient
// 2^{-i} at depth i) and take the Euclidean norm.
inline double preiss_embedding_distance(const Point& pa, const Point& pb, std::size_t depth = 40) {
    const SeqPoint& a = std::get<SeqPoint>(pa.value);
    const SeqPoint& b = std::get<SeqPoint>(pb.value);
    std::map<std::vector<std::uint32_t>, std::array<double, 2>> axes;
    auto add = [&](const SeqPoint& s, int which) {
        const std::size_t levels = s.lazy ? depth : std::min(depth, s.level());
        std::vector<std::uint32_t> prefix;
        prefix.reserve(levels);
        for (std::size_t i = 0; i < levels; ++i) {
            prefix.push_back(s.symbol_at(i));
            axes[prefix][which] = std::ldexp(1.0, -static_cast<int>(i + 1));
        }
    };
    add(a, 0);
    add(b, 1);
    double sum2 = 0.0;
    for (const auto& [axis, coef] : axes) {
        const double d = coef[0] - coef[1];
        sum2 += d * d;
    }
    return std::sqrt(sum2);
}

inline std::vector<std::uint32_t> small_alphabet(std::size_t depth, std::uint32_t size = 3) {
    return std::vector<std::uint32_t>(depth, size);
}

// Random finite product-space points over a shared alphabet; ties abound.
inline std::vector<Point> random_ultrametric_points(Rng& rng, std::size_t n, std::size_t depth = 8,
                                                    std::uint32_t alphabet_size = 3) {
    const auto alphabet = small_alphabet(depth, alphabet_size);
    std::vector<Point> points;
    points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::uint32_t> symbols(depth);
        for (std::size_t d = 0; d < depth; ++d) {
            symbols[d] = 1u + static_cast<std::uint32_t>(rng.uniform_index(alphabet_size));
        }
        points.push_back(make_seq(std::move(symbols), alphabet));
    }
    return points;
}

inline std::vector<Point> random_line_points(Rng& rng, std::size_t n, double lo = 0.0,
                                             double hi = 1.0) {
    std::vector<Point> points;
    points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) points.push_back(make_euclidean1(rng.uniform(lo, hi)));
    return points;
}

inline LabelledSample to_sample(std::vector<Point> points) {
    LabelledSample s;
    s.labels.assign(points.size(), 0);
    s.points = std::move(points);
    return s;
}

inline double harmonic(std::size_t n) {
    double h = 0.0;
    for (std::size_t i = 1; i <= n; ++i) h += 1.0 / static_cast<double>(i);
    return h;
}

struct MeanStderr {
    double mean = 0.0;
    double stderr_value = 0.0;
};

inline MeanStderr mean_stderr(const std::vector<double>& values) {
    MeanStderr out;
    if (values.empty()) return out;
    for (double v : values) out.mean += v;
    out.mean /= static_cast<double>(values.size());
    if (values.size() < 2) return out;
    double var = 0.0;
    for (double v : values) var += (v - out.mean) * (v - out.mean);
    var /= static_cast<double>(values.size() - 1);
    out.stderr_value = std::sqrt(var / static_cast<double>(values.size()));
    return out;
}

// min(eta, 1-eta) integrated over the mixture by midpoint quadrature.
inline double mixture_bayes_quadrature(const MixtureParams& m, std::size_t cells = 2'000'000) {
    const double lo = std::min(m.lo0, m.lo1), hi = std::max(m.hi0, m.hi1);
    const double h = (hi - lo) / static_cast<double>(cells);
    double total = 0.0;
    for (std::size_t i = 0; i < cells; ++i) {
        const double x = lo + (static_cast<double>(i) + 0.5) * h;
        const double f0 = (x >= m.lo0 && x <= m.hi0) ? 1.0 / (m.hi0 - m.lo0) : 0.0;
        const double f1 = (x >= m.lo1 && x <= m.hi1) ? 1.0 / (m.hi1 - m.lo1) : 0.0;
        const double density = (1.0 - m.prior1) * f0 + m.prior1 * f1;
        if (density == 0.0) continue;
        const double eta = m.prior1 * f1 / density;
        total += std::min(eta, 1.0 - eta) * density * h;
    }
    return total;
}

}  // namespace knnlab::testing

#endif
