#ifndef KNNLAB_EXPERIMENTS_HPP
#define KNNLAB_EXPERIMENTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "knnlab/knn.hpp"
#include "knnlab/metric_space.hpp"
#include "knnlab/nagata.hpp"

namespace knnlab {

struct ExperimentConfig {
    SpaceHandle space;
    std::vector<std::size_t> n_schedule;
    KRule k_rule = KRule::sqrt_rule();
    std::size_t trials = 10;
    std::size_t test_size = 500;
    std::uint64_t seed = 0;
    TieBreak policy = TieBreak::UniformRandom;

    void validate() const;
};

struct ErrorCurveRow {
    std::size_t n = 0;
    std::size_t k = 0;
    std::size_t trial = 0;
    double empirical_error = 0.0;
    double bayes_error = 0.0;
    std::string aux_name;
    double aux_value = 0.0;
};

// Per (n, trial): draw an n-sample and test_size fresh labelled points, report
// the test misclassification rate against the drawn labels, the space's
// closed-form Bayes error, and aux max_radius (largest k-NN radius over the
// test queries).  Deterministic in the config seed.
std::vector<ErrorCurveRow> run_error_curve(const ExperimentConfig& config);

// Error curve on the atom-vs-Haar space: bayes_error is identically 0 and aux
// class1_pred0_rate is the fraction of label-1 test points predicted 0.
// Aborts with ResolutionError if any positive k-NN radius falls below the
// truncation resolution 0.5 * 2^{-K}.
std::vector<ErrorCurveRow> run_preiss_inconsistency(const ExperimentConfig& config);

// Smallest positive distance representable at truncation level K is
// 2^{-K}/sqrt(3); radii in (0, 0.5*2^{-K}) can only come from agreement past
// the truncation.  Exact zeros (duplicate atoms) are legitimate.
void check_preiss_resolution(double radius, std::size_t levels);

struct HubGrowthRow {
    std::size_t n = 0;
    double mean_hub_count = 0.0;
    double stderr_value = 0.0;
};

// Monte Carlo mean over trials of #{i in 2..n : x_1 in NN(x_i)} in the pow2
// hub space under uniform tie-breaking at k=1, for every n in 2..n_max.
std::vector<HubGrowthRow> run_hub_growth(std::size_t n_max, std::size_t trials, std::uint64_t seed);

enum class StoneFamily { Line, Simplex };

struct StoneSweepConfig {
    StoneFamily family = StoneFamily::Line;
    std::size_t n = 200;              // Line: sample size; Simplex: total points incl. x
    std::vector<std::size_t> k_list;
    std::size_t trials = 1000;
    TieBreak policy = TieBreak::IndexOrder;
    StonePlacement placement = StonePlacement::InPlace;
    std::uint64_t seed = 0;
};

struct StoneSweepRow {
    std::size_t k = 0;
    std::size_t max_count = 0;
    double mean_count = 0.0;
};

// Per k: stone_count statistics over trials with fresh samples and fresh x
// (Line: i.i.d. uniform on [0,1]; Simplex: the fixed equidistant configuration,
// randomness only in tie-breaking).
std::vector<StoneSweepRow> run_stone_sweep(const StoneSweepConfig& config);

// The n-point simplex instance: a sample of n-1 points plus the query x, all
// pairwise at distance 1/2 (depth-1 product space over an n-symbol alphabet).
struct SimplexInstance {
    SpaceHandle space;
    LabelledSample sample;
    Point x;
};
SimplexInstance make_simplex_instance(std::size_t n);

// CSV emitters: UTF-8, LF line endings, header row, shortest round-trip float
// formatting.  Column layouts are part of the tool contract.
void write_csv(const std::vector<ErrorCurveRow>& rows, const std::string& path);
void write_csv(const std::vector<HubGrowthRow>& rows, const std::string& path);
void write_csv(const std::vector<StoneSweepRow>& rows, const std::string& path);
void write_csv(const std::vector<CoverHartRow>& rows, const std::string& path);

std::string format_double(double v);

}  // namespace knnlab

#endif
