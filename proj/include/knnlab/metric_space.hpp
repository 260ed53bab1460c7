#ifndef KNNLAB_METRIC_SPACE_HPP
#define KNNLAB_METRIC_SPACE_HPP

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "knnlab/point.hpp"
#include "knnlab/rng.hpp"

namespace knnlab {

enum class Family { Euclidean, Ultrametric, Preiss, Hub, L1Sum, CantorTies };

constexpr double kInfiniteScale = std::numeric_limits<double>::infinity();

// Comparing two lazy sequences past this depth without disagreement signals a
// seed collision, not a valid state.
constexpr std::size_t kMaxCompareDepth = 1'000'000;

// Two-component 1-D uniform mixture with closed-form regression function and
// Bayes error.  Class i is uniform on [lo_i, hi_i]; prior1 = P(label 1).
struct MixtureParams {
    double lo0 = 0.0, hi0 = 1.0;
    double lo1 = 0.9, hi1 = 1.9;
    double prior1 = 0.5;

    void validate() const;
    double eta(double x) const;         // P(label=1 | x)
    int bayes_label(double x) const;    // threshold at 1/2, Heaviside at the tie
    double bayes_error() const;         // integral of min(class densities)
};

// Product-of-finite-alphabets space with 2^{-first disagreement} metric.
// When eta_first is nonempty, the label of a sampled point is Bernoulli with
// parameter eta_first[first symbol - 1]; otherwise labels are constant 0.
struct UltraParams {
    std::vector<std::uint32_t> alphabet;  // sizes N_1.. (>= 2); repeats last beyond
    std::vector<double> eta_first;        // optional, size alphabet[0]
    std::size_t eager_depth = 16;         // symbols materialized per sampled point

    void validate() const;
    double bayes_error() const;
};

// Truncated parameters of the atom-vs-Haar construction: levels 1..K with
// alphabet sizes N_k, per-atom weights a_k, per-level masses b_k = a_k|Q_k|,
// and total mass Z = 1 + sum b_k (Haar part has mass 1 before normalizing).
struct PreissParams {
    std::size_t levels = 0;
    std::vector<std::uint32_t> alphabet;   // N_1..N_K
    std::vector<double> atom_weight;       // a_1..a_K
    std::vector<double> level_mass;        // b_1..b_K
    double z = 0.0;

    void validate() const;
    double cube_size(std::size_t k) const;        // |Q_k| = N_1...N_k
    double growth(std::size_t k) const;           // b_k * N_{k+1}, 1 <= k <= K
    std::uint32_t alphabet_extended(std::size_t level1based) const;

    // Closed-form unnormalized ball masses around an infinite point at closed
    // radius 2^{-k}/sqrt(3): the ball contains the level-k prefix atom (on the
    // boundary), every atom agreeing to depth >= k+1, and exactly the Haar mass
    // of the depth-(k+1) cylinder.  Valid for 1 <= k <= levels-1.
    double mu1_ball(std::size_t k) const;
    double mu0_ball(std::size_t k) const;
    // The domination bound mu1_ball/a_k = k^2/N_{k+1}.
    double domination_bound(std::size_t k) const;
};

// N_{k+1} = max(2, k^3), a_k = k^{-2}/(N_1...N_k); satisfies summable level
// masses and unbounded b_k N_{k+1}.
PreissParams build_preiss_params(std::size_t levels);

struct HubParams {
    enum class Kind { Pow2, Geometric };
    Kind kind = Kind::Pow2;
    double alpha = 0.0;  // Geometric only, in (0,1)
};

struct SpaceHandle {
    Family family = Family::Euclidean;
    double scale = kInfiniteScale;
    std::optional<MixtureParams> mixture;
    std::optional<UltraParams> ultra;    // Ultrametric and CantorTies
    std::optional<PreissParams> preiss;
    std::optional<HubParams> hub;
    std::shared_ptr<const SpaceHandle> left;  // L1Sum base space
};

SpaceHandle make_euclidean_space(std::optional<MixtureParams> mixture = std::nullopt);
SpaceHandle make_ultrametric_space(UltraParams params);
SpaceHandle make_preiss_space(std::size_t levels);
SpaceHandle make_hub_space(HubParams::Kind kind, double alpha = 0.0);

// l1-type direct sum of `left` with the unit interval (coordinatewise sum of
// the two metrics on SumPoints).
SpaceHandle l1_sum(SpaceHandle left);

// The geometric-hub (x) interval witness sequence: z = (x_0, 0) and
// z_i = (x_i, beta^i), whose pairwise distances exceed both distances to z.
// Requires 0 < beta < alpha < 1 and beta < 1/2.
struct L1Witness {
    SpaceHandle space;
    Point z;
    std::vector<Point> zs;  // z_1..z_count
};
L1Witness l1_witness_points(double alpha, double beta, std::size_t count);

// Recursive schedule for the everpresent-ties space: N_k makes n_k uniform
// draws from [N_k] pairwise distinct with probability > 1-delta_k (birthday
// bound), n_{k+1} makes every depth-k cylinder receive >= n_k draws with
// probability > 1-delta_k (Chernoff lower tail + union bound), with
// delta_k = delta * 2^{-(k+1)} so that 2*sum delta_k = delta.
struct CantorTiesLevel {
    std::uint64_t n = 0;
    std::uint64_t alphabet_size = 0;
    double delta_k = 0.0;
};
struct CantorTiesSpace {
    SpaceHandle space;
    std::vector<CantorTiesLevel> schedule;
};
CantorTiesSpace build_cantor_ties(double delta, const std::vector<std::uint64_t>& base_schedule,
                                  std::uint64_t alphabet_cap = 1'000'000'000ULL);

// Exact metric of the handle's family.  Throws DomainError on family/point
// mismatch and DepthExhaustedError when two lazy sequences agree past
// kMaxCompareDepth.
double distance(const SpaceHandle& space, const Point& p, const Point& q);

struct LabelledDraw {
    Point point;
    int label = 0;
    int bayes_label = 0;
};

bool has_sampler(const SpaceHandle& space);

// Seeded draw from the space's distribution.  Euclidean requires mixture
// params; Ultrametric/CantorTies draw lazy product points; Preiss draws the
// Haar part with probability 1/Z (label 1) and an atom otherwise (label 0).
LabelledDraw sample(const SpaceHandle& space, Rng& rng);

// Closed-form Bayes error of the space's sampler distribution.
double bayes_error(const SpaceHandle& space);

// Space specification config schema (JSON): family tag + parameters + scale.
std::string space_to_json(const SpaceHandle& space);
SpaceHandle space_from_json(const std::string& json_text);

}  // namespace knnlab

#endif
