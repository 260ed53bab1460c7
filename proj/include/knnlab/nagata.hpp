#ifndef KNNLAB_NAGATA_HPP
#define KNNLAB_NAGATA_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "knnlab/knn.hpp"
#include "knnlab/metric_space.hpp"
#include "knnlab/point.hpp"
#include "knnlab/rng.hpp"

namespace knnlab {

enum class Boundary { Open, Closed };

struct BallSpec {
    std::size_t center = 0;  // index into the owning family's point list
    double radius = 0.0;
    Boundary boundary = Boundary::Closed;
};

struct BallFamily {
    std::vector<Point> points;
    SpaceHandle space;
    std::vector<BallSpec> balls;
    double scale = kInfiniteScale;
};

// Membership of `probe` in one ball of the family (boundary flag respected).
bool ball_contains(const BallFamily& family, const BallSpec& ball, const Point& probe);

// Maximum number of family balls containing any single probe.
std::size_t ball_multiplicity(const BallFamily& family, const std::vector<Point>& probes);

// True iff no ball's centre lies in any other ball of the family.
bool is_disconnected(const BallFamily& family);

// Deterministic greedy subfamily: process balls by radius descending (closed
// before open at equal radius, then index), keep a ball iff its centre is not
// yet covered.  The result is disconnected and covers every original centre;
// returned in the original ball order.
BallFamily center_cover_subfamily(const BallFamily& family);

// A violation of the (delta+2)-point characterization: a centre x and points
// x_1..x_{delta+2} in a closed ball of radius < scale around x with
// d(x_i, x_j) > max(d(x, x_i), d(x, x_j)) for every pair.
struct NagataWitness {
    std::size_t center = 0;
    std::vector<std::size_t> ring;
    double radius = 0.0;
};

// Exhaustive search over centres and (delta+2)-subsets; radii range over the
// realized distances (the violation condition is monotone through realized
// ball memberships).  Returns the lexicographically first witness or nullopt.
std::optional<NagataWitness> nagata_violation_witness(const std::vector<Point>& points,
                                                      const SpaceHandle& space, std::size_t delta,
                                                      double scale,
                                                      std::size_t point_cap = 30);

// Placement of x inside the substituted sample (x_1..x_{i-1}, x, x_{i+1}..):
// InPlace keeps x at slot i; Front puts x at index 0, modelling the adversary
// that wins every index-order tie.
enum class StonePlacement { InPlace, Front };

// Number of indices i with x_i != x (as point values) such that x is among the
// k nearest neighbours of x_i inside the substituted sample under `policy`.
std::size_t stone_count(const LabelledSample& sample, const SpaceHandle& space, const Point& x,
                        std::size_t k, TieBreak policy, Rng& rng,
                        StonePlacement placement = StonePlacement::InPlace);

struct BoundCheck {
    std::size_t count = 0;
    double bound = 0.0;
    bool ok = false;
};

// No-ties Stone bound: stone_count <= (k+1)(delta+1).  Preconditions: all
// pairwise distances in (x, x_1..x_n) distinct, and every substituted k-NN
// radius below the scale; violations throw PreconditionError naming the pair.
BoundCheck stone_bound_no_ties_check(const LabelledSample& sample, const SpaceHandle& space,
                                     const Point& x, std::size_t k, std::size_t delta, double scale);

// Counting bound: with one ball per point (B_i centred at x_i, radius < scale)
// and m subset members, the number of i with
// #(B_i cap subset) >= alpha * #(B_i cap points) is at most (delta+1) m / alpha.
BoundCheck hl_count_check(const std::vector<Point>& points, const SpaceHandle& space,
                          const std::vector<bool>& subset_mask, const std::vector<BallSpec>& balls,
                          double alpha, std::size_t delta, double scale);

// Fraction-merge inequality: under t1,t2 in [0,1], t2 <= 1-t1, a1 <= alpha and
// t1*a1 + (1-t1)*a2 <= alpha, returns whether
// (t1*a1 + t2*a2)/(t1+t2) <= alpha.  Comparisons are evaluated error-free in
// extended precision; precondition violations throw.
bool merge_fraction_bound(double t1, double t2, double a1, double a2, double alpha);

// Monte Carlo mean over `trials` uniform tie-breaks of the subset fraction
// among the k selected nearest neighbours of x.
double expected_subset_fraction_in_knn(const LabelledSample& sample, const SpaceHandle& space,
                                       const std::vector<bool>& subset_mask, const Point& x,
                                       std::size_t k, std::size_t trials, Rng& rng);

}  // namespace knnlab

#endif
