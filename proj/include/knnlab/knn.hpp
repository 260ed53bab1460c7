#ifndef KNNLAB_KNN_HPP
#define KNNLAB_KNN_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "knnlab/metric_space.hpp"
#include "knnlab/point.hpp"
#include "knnlab/rng.hpp"

namespace knnlab {

// How slots on the tying sphere are filled.
enum class TieBreak { IndexOrder, UniformRandom };

struct LabelledSample {
    std::vector<Point> points;
    std::vector<int> labels;      // in {0,1}, same length as points
    std::uint64_t seed = 0;       // lineage of the draw

    std::size_t size() const { return points.size(); }
};

struct NeighbourSelection {
    std::vector<std::size_t> indices;  // exactly k sample indices, ascending
    double radius = 0.0;               // k-NN radius
    std::size_t sphere_tie_count = 0;  // points at exactly the radius
    std::size_t open_ball_count = 0;   // points strictly inside
};

// Open ball / sphere split of a sample at the k-NN radius of precomputed
// distances.  Sphere membership is exact double equality.
struct BallPartition {
    std::vector<std::size_t> open;
    std::vector<std::size_t> sphere;
    double radius = 0.0;
};

void distances_to(const LabelledSample& sample, const SpaceHandle& space, const Point& x,
                  std::vector<double>& out);

BallPartition knn_partition(std::span<const double> dists, std::size_t k);

// Fill the k slots: every open-ball index, then k - open from the sphere
// (smallest indices under IndexOrder, a uniform random subset otherwise).
NeighbourSelection select_from_partition(const BallPartition& part, std::size_t k, TieBreak policy,
                                         Rng& rng);

// Smallest radius of a closed ball around x containing at least k sample
// points: the k-th smallest distance value.
double knn_radius(const LabelledSample& sample, const SpaceHandle& space, const Point& x,
                  std::size_t k);

NeighbourSelection knn_select(const LabelledSample& sample, const SpaceHandle& space, const Point& x,
                              std::size_t k, TieBreak policy, Rng& rng);

// Mean label over the selected neighbours.
double empirical_regression(const LabelledSample& sample, const SpaceHandle& space, const Point& x,
                            std::size_t k, TieBreak policy, Rng& rng);

// Majority vote; a voting tie resolves to 1 (Heaviside step at 0).
int classify(const LabelledSample& sample, const SpaceHandle& space, const Point& x, std::size_t k,
             TieBreak policy, Rng& rng);

inline int classify_from_eta(double eta) { return eta - 0.5 >= 0.0 ? 1 : 0; }

// k = k(n) schedules: ceil(sqrt(n)), ceil(n^exponent), or a constant,
// clamped to [1, n].
struct KRule {
    enum class Kind { Sqrt, Power, Fixed };
    Kind kind = Kind::Sqrt;
    double exponent = 0.5;
    std::size_t fixed_k = 1;

    static KRule sqrt_rule() { return KRule{Kind::Sqrt, 0.5, 1}; }
    static KRule power(double e) { return KRule{Kind::Power, e, 1}; }
    static KRule fixed(std::size_t k) { return KRule{Kind::Fixed, 0.0, k}; }

    std::size_t k_for(std::size_t n) const;
};

struct CoverHartRow {
    std::size_t n = 0;
    double max_radius = 0.0;
};

// For each n, draw an n-sample from the space's sampler and report the largest
// k(n)-NN radius over the test points.
std::vector<CoverHartRow> cover_hart_curve(const SpaceHandle& space, const KRule& k_rule,
                                           const std::vector<std::size_t>& ns,
                                           const std::vector<Point>& test_points, Rng& rng);

}  // namespace knnlab

#endif
