#include "knnlab/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "knnlab/errors.hpp"
#include "knnlab/experiments.hpp"
#include "knnlab/knn.hpp"
#include "knnlab/metric_space.hpp"
#include "knnlab/nagata.hpp"

namespace knnlab::cli {

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

KRule parse_k_rule(const std::string& text) {
    if (text == "sqrt") return KRule::sqrt_rule();
    const auto colon = text.find(':');
    if (colon != std::string::npos) {
        const std::string kind = text.substr(0, colon);
        const std::string arg = text.substr(colon + 1);
        if (kind == "fixed") return KRule::fixed(static_cast<std::size_t>(std::stoull(arg)));
        if (kind == "power") return KRule::power(std::stod(arg));
    }
    throw ConfigError("unknown k rule '" + text + "' (use sqrt, fixed:K or power:E)");
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(static_cast<std::size_t>(std::stoull(item)));
    }
    if (out.empty()) throw ConfigError("empty size list '" + text + "'");
    return out;
}

TieBreak parse_policy(const std::string& text) {
    if (text == "index") return TieBreak::IndexOrder;
    if (text == "uniform") return TieBreak::UniformRandom;
    throw ConfigError("unknown tie-break policy '" + text + "' (use index or uniform)");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse_json_file(const std::string& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw ConfigError("bad JSON in " + path + ": " + e.what());
    }
}

// Experiment config file schema: space, n_schedule, k_rule, trials, test_size,
// seed, policy.  Flags override file values.
struct ExperimentFlags {
    std::string config_path;
    std::string space_name;
    std::string n_schedule;
    std::string k_rule;
    std::size_t trials = 0;
    std::size_t test_size = 0;
    std::string policy;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

KRule k_rule_from_json(const json& j) {
    if (j.is_string()) return parse_k_rule(j.get<std::string>());
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "sqrt") return KRule::sqrt_rule();
    if (kind == "fixed") return KRule::fixed(j.at("k").get<std::size_t>());
    if (kind == "power") return KRule::power(j.at("exponent").get<double>());
    throw ConfigError("unknown k rule kind '" + kind + "'");
}

SpaceHandle default_space(const std::string& name) {
    if (name == "euclidean") {
        return make_euclidean_space(MixtureParams{0.0, 1.0, 0.9, 1.9, 0.5});
    }
    if (name == "ultrametric") {
        UltraParams params;
        params.alphabet.assign(16, 2);
        params.eta_first = {0.2, 0.8};
        return make_ultrametric_space(std::move(params));
    }
    throw ConfigError("unknown space '" + name + "' (use euclidean or ultrametric, or a config file)");
}

ExperimentConfig build_experiment_config(const ExperimentFlags& flags, bool require_seed = true) {
    ExperimentConfig config;
    bool have_space = false, have_seed = false;
    if (!flags.config_path.empty()) {
        const json j = parse_json_file(flags.config_path);
        if (j.contains("space")) {
            config.space = space_from_json(j.at("space").dump());
            have_space = true;
        }
        if (j.contains("n_schedule")) config.n_schedule = j.at("n_schedule").get<std::vector<std::size_t>>();
        if (j.contains("k_rule")) config.k_rule = k_rule_from_json(j.at("k_rule"));
        if (j.contains("trials")) config.trials = j.at("trials").get<std::size_t>();
        if (j.contains("test_size")) config.test_size = j.at("test_size").get<std::size_t>();
        if (j.contains("policy")) config.policy = parse_policy(j.at("policy").get<std::string>());
        if (j.contains("seed")) {
            config.seed = j.at("seed").get<std::uint64_t>();
            have_seed = true;
        }
    }
    if (!flags.space_name.empty()) {
        config.space = default_space(flags.space_name);
        have_space = true;
    }
    if (!have_space) config.space = default_space("euclidean");
    if (!flags.n_schedule.empty()) config.n_schedule = parse_size_list(flags.n_schedule);
    if (!flags.k_rule.empty()) config.k_rule = parse_k_rule(flags.k_rule);
    if (flags.trials > 0) config.trials = flags.trials;
    if (flags.test_size > 0) config.test_size = flags.test_size;
    if (!flags.policy.empty()) config.policy = parse_policy(flags.policy);
    if (flags.seed_set) {
        config.seed = flags.seed;
        have_seed = true;
    }
    if (require_seed && !have_seed) {
        throw ConfigError("stochastic run refused: pass --seed (or a config file with a seed)");
    }
    if (config.n_schedule.empty()) config.n_schedule = {1000};
    return config;
}

Point point_from_json(const SpaceHandle& space, const json& j) {
    switch (space.family) {
        case Family::Euclidean:
            return make_euclidean(j.get<std::vector<double>>());
        case Family::Ultrametric:
        case Family::CantorTies:
        case Family::Preiss: {
            std::vector<std::uint32_t> symbols = j.get<std::vector<std::uint32_t>>();
            const std::vector<std::uint32_t>& alphabet =
                space.family == Family::Preiss ? space.preiss->alphabet : space.ultra->alphabet;
            return make_seq(std::move(symbols), alphabet);
        }
        case Family::Hub:
            return make_hub(j.get<std::uint32_t>());
        case Family::L1Sum:
            return make_sum(point_from_json(*space.left, j.at("base")), j.at("t").get<double>());
    }
    throw ConfigError("points file: unsupported family");
}

std::string point_to_string(const Point& p) {
    std::ostringstream out;
    if (const auto* e = std::get_if<EuclideanVector>(&p.value)) {
        out << '(';
        for (std::size_t i = 0; i < e->coords.size(); ++i) {
            if (i) out << ", ";
            out << format_double(e->coords[i]);
        }
        out << ')';
    } else if (const auto* s = std::get_if<SeqPoint>(&p.value)) {
        out << '[';
        for (std::size_t i = 0; i < s->symbols.size(); ++i) {
            if (i) out << ' ';
            out << s->symbols[i];
        }
        out << (s->lazy ? " ...]" : "]");
    } else if (const auto* h = std::get_if<HubIndex>(&p.value)) {
        out << "x_" << h->index;
    } else {
        const auto& m = std::get<SumPoint>(p.value);
        out << '(' << point_to_string(*m.base) << ", " << format_double(m.t) << ')';
    }
    return out.str();
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    return out;
}

void note_rows(std::size_t rows, const std::string& path) {
    std::cerr << "wrote " << rows << " rows to " << path << "\n";
}

int cmd_consistency(const ExperimentFlags& flags, const std::string& out_path) {
    const ExperimentConfig config = build_experiment_config(flags);
    const std::vector<ErrorCurveRow> rows = run_error_curve(config);
    write_csv(rows, out_path);
    note_rows(rows.size(), out_path);
    return kExitOk;
}

int cmd_preiss(const ExperimentFlags& flags, std::size_t levels, const std::string& out_path) {
    ExperimentFlags f = flags;
    ExperimentConfig config = build_experiment_config(f);
    if (config.space.family != Family::Preiss) config.space = make_preiss_space(levels);
    const std::vector<ErrorCurveRow> rows = run_preiss_inconsistency(config);
    write_csv(rows, out_path);
    note_rows(rows.size(), out_path);
    return kExitOk;
}

int cmd_hub(std::size_t n, std::size_t trials, std::uint64_t seed, const std::string& out_path) {
    const std::vector<HubGrowthRow> rows = run_hub_growth(n, trials, seed);
    write_csv(rows, out_path);
    note_rows(rows.size(), out_path);
    return kExitOk;
}

int cmd_stone(const std::string& family, std::size_t n, const std::string& k_list,
              std::size_t trials, const std::string& policy, bool adversarial, std::uint64_t seed,
              const std::string& out_path) {
    StoneSweepConfig config;
    if (family == "line") {
        config.family = StoneFamily::Line;
    } else if (family == "simplex") {
        config.family = StoneFamily::Simplex;
    } else {
        throw ConfigError("unknown stone family '" + family + "' (use line or simplex)");
    }
    config.n = n;
    config.k_list = parse_size_list(k_list);
    config.trials = trials;
    config.policy = parse_policy(policy);
    config.placement = adversarial ? StonePlacement::Front : StonePlacement::InPlace;
    config.seed = seed;
    const std::vector<StoneSweepRow> rows = run_stone_sweep(config);
    write_csv(rows, out_path);
    note_rows(rows.size(), out_path);
    return kExitOk;
}

int cmd_dim_witness(const std::string& points_path, std::size_t delta, double scale,
                    std::size_t cap, const std::string& out_path) {
    const json j = parse_json_file(points_path);
    const SpaceHandle space = space_from_json(j.at("space").dump());
    std::vector<Point> points;
    for (const json& pj : j.at("points")) points.push_back(point_from_json(space, pj));

    const auto witness = nagata_violation_witness(points, space, delta, scale, cap);
    std::ofstream out = open_output(out_path);
    if (!witness) {
        out << "witness: none\n";
        out << "delta: " << delta << "\n";
        out << "scale: " << format_double(scale) << "\n";
        out << "points: " << points.size() << "\n";
        std::cerr << "no witness\n";
        return kExitOk;
    }
    const Point& x = points[witness->center];
    out << "witness: found\n";
    out << "delta: " << delta << "\n";
    out << "scale: " << format_double(scale) << "\n";
    out << "center_index: " << witness->center << "\n";
    out << "center: " << point_to_string(x) << "\n";
    out << "radius: " << format_double(witness->radius) << "\n";
    for (std::size_t idx : witness->ring) {
        out << "ring point " << idx << ": " << point_to_string(points[idx])
            << "  d(center)=" << format_double(distance(space, x, points[idx])) << "\n";
    }
    for (std::size_t a = 0; a < witness->ring.size(); ++a) {
        for (std::size_t b = a + 1; b < witness->ring.size(); ++b) {
            const std::size_t i = witness->ring[a], jdx = witness->ring[b];
            out << "violated pair (" << i << "," << jdx
                << "): d=" << format_double(distance(space, points[i], points[jdx]))
                << " > max(" << format_double(distance(space, x, points[i])) << ", "
                << format_double(distance(space, x, points[jdx])) << ")\n";
        }
    }
    std::cerr << "witness found (center " << witness->center << ")\n";
    return kExitCheckFailed;
}

int cmd_hl_check(std::size_t n, double alpha, std::size_t delta, std::size_t k,
                 std::size_t subset_size, std::uint64_t seed, const std::string& out_path) {
    // Seeded ultrametric instance: k-NN balls per point, random subset.
    UltraParams params;
    params.alphabet.assign(8, 3);
    const SpaceHandle space = make_ultrametric_space(params);
    Rng rng(seed);
    LabelledSample inst;
    for (std::size_t i = 0; i < n; ++i) {
        LabelledDraw draw = sample(space, rng);
        inst.points.push_back(std::move(draw.point));
        inst.labels.push_back(draw.label);
    }
    if (k < 1 || k > n) throw ConfigError("hl-check: k out of range");
    if (subset_size > n) throw ConfigError("hl-check: subset size exceeds n");

    std::vector<BallSpec> balls;
    for (std::size_t i = 0; i < n; ++i) {
        balls.push_back(BallSpec{i, knn_radius(inst, space, inst.points[i], k), Boundary::Closed});
    }
    std::vector<bool> mask(n, false);
    for (std::size_t idx : rng.subset(n, subset_size)) mask[idx] = true;

    const BoundCheck check = hl_count_check(inst.points, space, mask, balls, alpha, delta,
                                            kInfiniteScale);
    std::ofstream out = open_output(out_path);
    out << "count: " << check.count << "\n";
    out << "bound: " << format_double(check.bound) << "\n";
    out << "ok: " << (check.ok ? "true" : "false") << "\n";
    out << "n: " << n << "\nalpha: " << format_double(alpha) << "\ndelta: " << delta
        << "\nsubset_size: " << subset_size << "\nseed: " << seed << "\n";
    std::cerr << (check.ok ? "bound holds\n" : "bound violated\n");
    return check.ok ? kExitOk : kExitCheckFailed;
}

int cmd_cover_hart(const std::string& n_schedule, const std::string& k_rule,
                   std::size_t test_points, std::uint64_t seed, const std::string& out_path) {
    const SpaceHandle space = make_euclidean_space(MixtureParams{0.0, 1.0, 0.0, 1.0, 0.5});
    const std::vector<std::size_t> ns = parse_size_list(n_schedule);
    const KRule rule = parse_k_rule(k_rule);
    Rng test_rng(derive_seed(seed, 1));
    std::vector<Point> tests;
    tests.reserve(test_points);
    for (std::size_t i = 0; i < test_points; ++i) tests.push_back(make_euclidean1(test_rng.uniform01()));
    Rng rng(derive_seed(seed, 0));
    const std::vector<CoverHartRow> rows = cover_hart_curve(space, rule, ns, tests, rng);
    write_csv(rows, out_path);
    note_rows(rows.size(), out_path);
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"metric k-NN laboratory: spaces, tie-aware selection, dimension checks, experiments"};
    app.require_subcommand(1);

    ExperimentFlags flags;
    std::string out_path;
    std::size_t levels = 12;
    std::size_t hub_n = 100, hub_trials = 2000;
    std::string stone_family = "line", stone_k = "1,5,25", stone_policy = "index";
    std::size_t stone_n = 200, stone_trials = 1000;
    bool adversarial = false;
    std::string points_path;
    std::size_t delta = 0, witness_cap = 30;
    double scale = kInfiniteScale;
    std::size_t hl_n = 40, hl_k = 3, hl_subset = 10;
    double hl_alpha = 0.3;
    std::string ch_schedule = "100,10000", ch_krule = "sqrt";
    std::size_t ch_test_points = 100;
    std::uint64_t seed = 0;

    auto add_experiment_flags = [&](CLI::App* cmd, bool with_space) {
        cmd->add_option("--config", flags.config_path, "JSON experiment config file");
        if (with_space) cmd->add_option("--space", flags.space_name, "euclidean | ultrametric");
        cmd->add_option("--n-schedule", flags.n_schedule, "comma-separated sample sizes");
        cmd->add_option("--k-rule", flags.k_rule, "sqrt | fixed:K | power:E");
        cmd->add_option("--trials", flags.trials, "trials per n");
        cmd->add_option("--test-size", flags.test_size, "test points per trial");
        cmd->add_option("--policy", flags.policy, "index | uniform");
        cmd->add_option("--seed", flags.seed, "master seed")->each([&flags](const std::string&) {
            flags.seed_set = true;
        });
        cmd->add_option("--out", out_path, "output CSV path")->required();
    };

    CLI::App* consistency = app.add_subcommand("consistency", "error curve on a consistent space");
    add_experiment_flags(consistency, true);

    CLI::App* preiss = app.add_subcommand("preiss", "inconsistency run on the atom-vs-Haar space");
    add_experiment_flags(preiss, false);
    preiss->add_option("--levels", levels, "truncation level count");

    CLI::App* hub = app.add_subcommand("hub", "harmonic hub growth curve");
    hub->add_option("--n", hub_n, "largest sample size")->required();
    hub->add_option("--trials", hub_trials, "Monte Carlo trials");
    hub->add_option("--seed", seed, "master seed")->required();
    hub->add_option("--out", out_path, "output CSV path")->required();

    CLI::App* stone = app.add_subcommand("stone", "stone count sweep over k");
    stone->add_option("--family", stone_family, "line | simplex");
    stone->add_option("--n", stone_n, "sample size");
    stone->add_option("--k", stone_k, "comma-separated k values");
    stone->add_option("--trials", stone_trials, "trials per k");
    stone->add_option("--policy", stone_policy, "index | uniform");
    stone->add_flag("--adversarial", adversarial, "place x first in the substituted sample");
    stone->add_option("--seed", seed, "master seed")->required();
    stone->add_option("--out", out_path, "output CSV path")->required();

    CLI::App* witness = app.add_subcommand("dim-witness", "dimension violation witness search");
    witness->add_option("--points", points_path, "JSON points file {space, points}")->required();
    witness->add_option("--delta", delta, "dimension to refute");
    witness->add_option("--scale", scale, "radius scale bound");
    witness->add_option("--cap", witness_cap, "point count cap for the search");
    witness->add_option("--out", out_path, "report path")->required();

    CLI::App* hl = app.add_subcommand("hl-check", "counting bound check on a seeded instance");
    hl->add_option("--n", hl_n, "instance size");
    hl->add_option("--alpha", hl_alpha, "fraction threshold in (0,1]");
    hl->add_option("--delta", delta, "dimension certificate");
    hl->add_option("--k", hl_k, "ball radius = k-NN distance");
    hl->add_option("--subset-size", hl_subset, "subset cardinality m");
    hl->add_option("--seed", seed, "master seed")->required();
    hl->add_option("--out", out_path, "report path")->required();

    CLI::App* cover = app.add_subcommand("cover-hart", "max k-NN radius curve");
    cover->add_option("--n-schedule", ch_schedule, "comma-separated sample sizes");
    cover->add_option("--k-rule", ch_krule, "sqrt | fixed:K | power:E");
    cover->add_option("--test-points", ch_test_points, "number of test queries");
    cover->add_option("--seed", seed, "master seed")->required();
    cover->add_option("--out", out_path, "output CSV path")->required();

    std::vector<char*> argv;
    std::vector<std::string> storage;
    storage.reserve(args.size() + 1);
    storage.push_back("knnlab");
    for (const std::string& a : args) storage.push_back(a);
    for (std::string& s : storage) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (consistency->parsed()) return cmd_consistency(flags, out_path);
        if (preiss->parsed()) return cmd_preiss(flags, levels, out_path);
        if (hub->parsed()) return cmd_hub(hub_n, hub_trials, seed, out_path);
        if (stone->parsed()) {
            return cmd_stone(stone_family, stone_n, stone_k, stone_trials, stone_policy, adversarial,
                             seed, out_path);
        }
        if (witness->parsed()) return cmd_dim_witness(points_path, delta, scale, witness_cap, out_path);
        if (hl->parsed()) return cmd_hl_check(hl_n, hl_alpha, delta, hl_k, hl_subset, seed, out_path);
        if (cover->parsed()) return cmd_cover_hart(ch_schedule, ch_krule, ch_test_points, seed, out_path);
        std::cerr << "no subcommand given\n";
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

}  // namespace knnlab::cli
