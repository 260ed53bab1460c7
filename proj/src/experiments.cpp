#include "knnlab/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "knnlab/errors.hpp"

namespace knnlab {

void ExperimentConfig::validate() const {
    if (n_schedule.empty()) throw ConfigError("experiment: empty n schedule");
    if (trials < 1) throw ConfigError("experiment: trials must be >= 1");
    if (test_size < 1) throw ConfigError("experiment: test size must be >= 1");
    for (std::size_t n : n_schedule) {
        if (n < 1) throw ConfigError("experiment: sample sizes must be >= 1");
        if (k_rule.k_for(n) > n) throw ConfigError("experiment: k rule exceeds n");
    }
}

namespace {

LabelledSample draw_sample(const SpaceHandle& space, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    LabelledSample out;
    out.seed = seed;
    out.points.reserve(n);
    out.labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        LabelledDraw draw = sample(space, rng);
        out.points.push_back(std::move(draw.point));
        out.labels.push_back(draw.label);
    }
    return out;
}

struct TrialStats {
    double empirical_error = 0.0;
    double max_radius = 0.0;
    double class1_pred0_rate = 0.0;
};

TrialStats run_trial(const ExperimentConfig& config, std::size_t n, std::size_t schedule_index,
                     std::size_t trial, bool preiss_checks) {
    const std::size_t k = config.k_rule.k_for(n);
    const LabelledSample train =
        draw_sample(config.space, n, derive_seed(config.seed, schedule_index, trial, 0));
    Rng test_rng(derive_seed(config.seed, schedule_index, trial, 1));
    Rng tie_rng(derive_seed(config.seed, schedule_index, trial, 2));

    std::size_t errors = 0;
    std::size_t class1 = 0, class1_pred0 = 0;
    double max_radius = 0.0;
    std::vector<double> dists;
    for (std::size_t t = 0; t < config.test_size; ++t) {
        const LabelledDraw test = sample(config.space, test_rng);
        distances_to(train, config.space, test.point, dists);
        const BallPartition part = knn_partition(dists, k);
        if (preiss_checks) check_preiss_resolution(part.radius, config.space.preiss->levels);
        const NeighbourSelection sel = select_from_partition(part, k, config.policy, tie_rng);
        double eta = 0.0;
        for (std::size_t i : sel.indices) eta += train.labels[i];
        eta /= static_cast<double>(k);
        const int predicted = classify_from_eta(eta);
        if (predicted != test.label) ++errors;
        if (test.label == 1) {
            ++class1;
            if (predicted == 0) ++class1_pred0;
        }
        max_radius = std::max(max_radius, sel.radius);
    }

    TrialStats stats;
    stats.empirical_error = static_cast<double>(errors) / static_cast<double>(config.test_size);
    stats.max_radius = max_radius;
    stats.class1_pred0_rate =
        class1 == 0 ? 0.0 : static_cast<double>(class1_pred0) / static_cast<double>(class1);
    return stats;
}

std::vector<ErrorCurveRow> run_curve(const ExperimentConfig& config, bool preiss_checks) {
    config.validate();
    if (!has_sampler(config.space)) throw ConfigError("experiment: space has no sampler");
    const double bayes = bayes_error(config.space);
    std::vector<ErrorCurveRow> rows;
    rows.reserve(config.n_schedule.size() * config.trials);
    for (std::size_t si = 0; si < config.n_schedule.size(); ++si) {
        const std::size_t n = config.n_schedule[si];
        for (std::size_t trial = 0; trial < config.trials; ++trial) {
            const TrialStats stats = run_trial(config, n, si, trial, preiss_checks);
            ErrorCurveRow row;
            row.n = n;
            row.k = config.k_rule.k_for(n);
            row.trial = trial;
            row.empirical_error = stats.empirical_error;
            row.bayes_error = bayes;
            row.aux_name = preiss_checks ? "class1_pred0_rate" : "max_radius";
            row.aux_value = preiss_checks ? stats.class1_pred0_rate : stats.max_radius;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace

std::vector<ErrorCurveRow> run_error_curve(const ExperimentConfig& config) {
    return run_curve(config, false);
}

void check_preiss_resolution(double radius, std::size_t levels) {
    if (radius == 0.0) return;
    const double resolution = 0.5 * std::ldexp(1.0, -static_cast<int>(levels));
    if (radius < resolution) {
        throw ResolutionError("preiss truncation too coarse: observed k-NN radius " +
                              format_double(radius) + " below resolution " +
                              format_double(resolution) + "; increase the level count");
    }
}

std::vector<ErrorCurveRow> run_preiss_inconsistency(const ExperimentConfig& config) {
    if (config.space.family != Family::Preiss || !config.space.preiss) {
        throw ConfigError("preiss run: space must be the preiss family");
    }
    config.space.preiss->validate();
    return run_curve(config, true);
}

std::vector<HubGrowthRow> run_hub_growth(std::size_t n_max, std::size_t trials, std::uint64_t seed) {
    if (n_max < 2) throw DomainError("hub growth: n_max must be >= 2");
    if (trials < 1) throw DomainError("hub growth: trials must be >= 1");
    const SpaceHandle space = make_hub_space(HubParams::Kind::Pow2);

    // counts[n-2][trial] = hub count of sigma_n in that trial.  The nearest
    // neighbours of x_i tie exactly on {x_1..x_{i-1}} in every sigma_n with
    // n >= i (points above index i sit strictly farther), so one uniform draw
    // per i serves the whole growth path of the trial.
    std::vector<std::vector<std::size_t>> counts(n_max - 1, std::vector<std::size_t>(trials, 0));
    for (std::size_t trial = 0; trial < trials; ++trial) {
        Rng rng(derive_seed(seed, trial));
        std::size_t running = 0;
        LabelledSample rest;
        for (std::size_t n = 2; n <= n_max; ++n) {
            rest.points.clear();
            rest.labels.clear();
            for (std::size_t j = 1; j < n; ++j) {
                rest.points.push_back(make_hub(static_cast<std::uint32_t>(j)));
                rest.labels.push_back(0);
            }
            const NeighbourSelection sel = knn_select(rest, space, make_hub(static_cast<std::uint32_t>(n)),
                                                      1, TieBreak::UniformRandom, rng);
            const std::uint32_t picked = std::get<HubIndex>(rest.points[sel.indices[0]].value).index;
            if (picked == 1) ++running;
            counts[n - 2][trial] = running;
        }
    }

    std::vector<HubGrowthRow> rows;
    rows.reserve(n_max - 1);
    for (std::size_t n = 2; n <= n_max; ++n) {
        const std::vector<std::size_t>& c = counts[n - 2];
        double mean = 0.0;
        for (std::size_t v : c) mean += static_cast<double>(v);
        mean /= static_cast<double>(trials);
        double var = 0.0;
        for (std::size_t v : c) {
            const double d = static_cast<double>(v) - mean;
            var += d * d;
        }
        var = trials > 1 ? var / static_cast<double>(trials - 1) : 0.0;
        rows.push_back(HubGrowthRow{n, mean, std::sqrt(var / static_cast<double>(trials))});
    }
    return rows;
}

SimplexInstance make_simplex_instance(std::size_t n) {
    if (n < 2) throw DomainError("simplex: need at least two points");
    // n equidistant points in total: a sample of n-1 plus the query x.
    UltraParams params;
    params.alphabet = {static_cast<std::uint32_t>(n)};
    SimplexInstance inst;
    inst.space = make_ultrametric_space(params);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        inst.sample.points.push_back(make_seq({static_cast<std::uint32_t>(i + 1)}, params.alphabet));
        inst.sample.labels.push_back(0);
    }
    inst.x = make_seq({static_cast<std::uint32_t>(n)}, params.alphabet);
    return inst;
}

std::vector<StoneSweepRow> run_stone_sweep(const StoneSweepConfig& config) {
    if (config.k_list.empty()) throw ConfigError("stone sweep: empty k list");
    if (config.trials < 1) throw ConfigError("stone sweep: trials must be >= 1");
    const std::size_t sample_size = config.family == StoneFamily::Simplex ? config.n - 1 : config.n;
    for (std::size_t k : config.k_list) {
        if (k < 1 || k > sample_size) throw ConfigError("stone sweep: k out of range");
    }

    const SpaceHandle line = make_euclidean_space();
    std::vector<StoneSweepRow> rows;
    for (std::size_t k : config.k_list) {
        std::size_t max_count = 0;
        double total = 0.0;
        for (std::size_t trial = 0; trial < config.trials; ++trial) {
            Rng rng(derive_seed(config.seed, k, trial));
            std::size_t count = 0;
            if (config.family == StoneFamily::Line) {
                LabelledSample sample;
                sample.points.reserve(config.n);
                for (std::size_t i = 0; i < config.n; ++i) {
                    sample.points.push_back(make_euclidean1(rng.uniform01()));
                    sample.labels.push_back(0);
                }
                const Point x = make_euclidean1(rng.uniform01());
                count = stone_count(sample, line, x, k, config.policy, rng, config.placement);
            } else {
                const SimplexInstance inst = make_simplex_instance(config.n);
                count = stone_count(inst.sample, inst.space, inst.x, k, config.policy, rng,
                                    config.placement);
            }
            max_count = std::max(max_count, count);
            total += static_cast<double>(count);
        }
        rows.push_back(StoneSweepRow{k, max_count, total / static_cast<double>(config.trials)});
    }
    return rows;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_csv(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    return out;
}

void finish_csv(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace

void write_csv(const std::vector<ErrorCurveRow>& rows, const std::string& path) {
    std::ofstream out = open_csv(path);
    out << "n,k,trial,empirical_error,bayes_error,aux_name,aux_value\n";
    for (const ErrorCurveRow& r : rows) {
        out << r.n << ',' << r.k << ',' << r.trial << ',' << format_double(r.empirical_error) << ','
            << format_double(r.bayes_error) << ',' << r.aux_name << ',' << format_double(r.aux_value)
            << '\n';
    }
    finish_csv(out, path);
}

void write_csv(const std::vector<HubGrowthRow>& rows, const std::string& path) {
    std::ofstream out = open_csv(path);
    out << "n,mean_hub_count,stderr\n";
    for (const HubGrowthRow& r : rows) {
        out << r.n << ',' << format_double(r.mean_hub_count) << ',' << format_double(r.stderr_value)
            << '\n';
    }
    finish_csv(out, path);
}

void write_csv(const std::vector<StoneSweepRow>& rows, const std::string& path) {
    std::ofstream out = open_csv(path);
    out << "k,max_count,mean_count\n";
    for (const StoneSweepRow& r : rows) {
        out << r.k << ',' << r.max_count << ',' << format_double(r.mean_count) << '\n';
    }
    finish_csv(out, path);
}

void write_csv(const std::vector<CoverHartRow>& rows, const std::string& path) {
    std::ofstream out = open_csv(path);
    out << "n,max_radius\n";
    for (const CoverHartRow& r : rows) {
        out << r.n << ',' << format_double(r.max_radius) << '\n';
    }
    finish_csv(out, path);
}

}  // namespace knnlab
