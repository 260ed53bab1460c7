// Acceptance suite: one checked criterion per function, one PASS/FAIL line
// each.  Run all (no args), one (--only N), or list them (--list).
#include <boost/multiprecision/cpp_int.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "knnlab/cli.hpp"
#include "knnlab/experiments.hpp"
#include "knnlab/knn.hpp"
#include "knnlab/metric_space.hpp"
#include "knnlab/nagata.hpp"

using namespace knnlab;
using namespace knnlab::testing;

namespace {

struct Criterion {
    int id;
    std::string name;
    std::function<bool(std::string&)> run;
};

bool expect(bool condition, const std::string& what, std::string& detail) {
    if (!condition) detail += (detail.empty() ? "" : "; ") + what;
    return condition;
}

double mean_of(const std::vector<ErrorCurveRow>& rows,
               double ErrorCurveRow::*field) {
    double total = 0.0;
    for (const auto& r : rows) total += r.*field;
    return total / static_cast<double>(rows.size());
}

// ---- C1: Euclidean consistency --------------------------------------------

bool c01_euclidean_consistency(std::string& detail) {
    ExperimentConfig config;
    config.space = make_euclidean_space(MixtureParams{0.0, 1.0, 0.9, 1.9, 0.5});
    config.n_schedule = {10'000};
    config.k_rule = KRule::sqrt_rule();
    config.trials = 10;
    config.test_size = 500;
    config.seed = 101;
    const auto rows = run_error_curve(config);
    const double bayes = 0.05;
    const double mean_err = mean_of(rows, &ErrorCurveRow::empirical_error);
    std::ostringstream os;
    os << "mean_error=" << mean_err << " bayes=" << bayes;
    detail = os.str();
    return std::abs(mean_err - bayes) <= 0.05;
}

// ---- C2: Ultrametric consistency -------------------------------------------

bool c02_ultrametric_consistency(std::string& detail) {
    UltraParams params;
    params.alphabet.assign(16, 2);
    params.eta_first = {0.2, 0.8};
    ExperimentConfig config;
    config.space = make_ultrametric_space(params);
    config.n_schedule = {10'000};
    config.k_rule = KRule::sqrt_rule();
    config.trials = 10;
    config.test_size = 500;
    config.seed = 102;
    const auto rows = run_error_curve(config);
    const double bayes = bayes_error(config.space);
    const double mean_err = mean_of(rows, &ErrorCurveRow::empirical_error);
    std::ostringstream os;
    os << "mean_error=" << mean_err << " bayes=" << bayes;
    detail = os.str();
    return std::abs(mean_err - bayes) <= 0.05;
}

// ---- C3: Preiss inconsistency ----------------------------------------------

bool c03_preiss_inconsistency(std::string& detail) {
    ExperimentConfig config;
    config.space = make_preiss_space(12);
    config.n_schedule = {4096};
    config.k_rule = KRule::fixed(64);
    config.trials = 10;
    config.test_size = 500;
    config.seed = 103;
    const auto rows = run_preiss_inconsistency(config);
    const double threshold = 0.5 / config.space.preiss->z;
    const double mean_err = mean_of(rows, &ErrorCurveRow::empirical_error);
    const double mean_rate = mean_of(rows, &ErrorCurveRow::aux_value);
    bool ok = true;
    std::string sub;
    for (const auto& r : rows) ok &= expect(r.bayes_error == 0.0, "bayes column nonzero", sub);
    ok &= expect(mean_err >= threshold, "mean error below 0.5/Z", sub);
    ok &= expect(mean_rate >= 0.9, "class-1 -> 0 rate below 0.9", sub);
    std::ostringstream os;
    os << "mean_error=" << mean_err << " (need >= " << threshold << ") class1_pred0_rate="
       << mean_rate << " (need >= 0.9)";
    if (!sub.empty()) os << " [" << sub << "]";
    detail = os.str();
    return ok;
}

// ---- C4: Harmonic hub growth ------------------------------------------------

bool c04_hub_growth(std::string& detail) {
    bool ok = true;

    // Exact expectations by enumerating the tie sphere per index: the k=1
    // selection of x_i is uniform over its minimal-distance set, so
    // P(x_1 chosen) = [x_1 in sphere] * slots / sphere size.
    const SpaceHandle space = make_hub_space(HubParams::Kind::Pow2);
    auto exact_expectation = [&](std::size_t n) {
        double e = 0.0;
        std::vector<double> dists;
        for (std::size_t i = 2; i <= n; ++i) {
            LabelledSample rest;
            for (std::size_t j = 1; j <= n; ++j) {
                if (j == i) continue;
                rest.points.push_back(make_hub(static_cast<std::uint32_t>(j)));
                rest.labels.push_back(0);
            }
            distances_to(rest, space, make_hub(static_cast<std::uint32_t>(i)), dists);
            const BallPartition part = knn_partition(dists, 1);
            bool x1_open = false, x1_sphere = false;
            for (std::size_t idx : part.open) x1_open |= idx == 0;
            for (std::size_t idx : part.sphere) x1_sphere |= idx == 0;
            if (x1_open) {
                e += 1.0;
            } else if (x1_sphere) {
                e += static_cast<double>(1 - part.open.size()) / static_cast<double>(part.sphere.size());
            }
        }
        return e;
    };
    ok &= expect(exact_expectation(2) == 1.0, "enumerated E at n=2 is not 1.0", detail);
    ok &= expect(exact_expectation(3) == 1.5, "enumerated E at n=3 is not 1.5", detail);

    const auto rows = run_hub_growth(100, 2000, 104);
    ok &= expect(rows[0].mean_hub_count == 1.0, "n=2 Monte Carlo row is not exactly 1.0", detail);
    ok &= expect(std::abs(rows[1].mean_hub_count - 1.5) <= 3.0 * rows[1].stderr_value,
                 "n=3 row off 1.5", detail);
    const double h99 = harmonic(99);
    const double gap = std::abs(rows[98].mean_hub_count - h99);
    ok &= expect(gap <= 3.0 * rows[98].stderr_value, "n=100 row off H_99", detail);
    std::ostringstream os;
    os << "mean(100)=" << rows[98].mean_hub_count << " H_99=" << h99 << " gap=" << gap
       << " 3se=" << 3.0 * rows[98].stderr_value;
    detail = detail.empty() ? os.str() : detail + "; " + os.str();
    return ok;
}

// ---- C5: Stone bound on the line -------------------------------------------

bool c05_stone_line(std::string& detail) {
    const SpaceHandle line = make_euclidean_space();
    Rng master(105);
    double worst_ratio = -1.0;
    std::size_t worst = 0, worst_k = 1;
    for (int config_idx = 0; config_idx < 1000; ++config_idx) {
        LabelledSample s;
        Point x = make_euclidean1(0.0);
        // Redraw on the (measure-zero) event of a distance tie.
        for (;;) {
            Rng gen(master.next_u64());
            s = to_sample(random_line_points(gen, 200));
            x = make_euclidean1(gen.uniform01());
            std::vector<double> values;
            for (std::size_t a = 0; a < s.size(); ++a) {
                values.push_back(std::abs(std::get<EuclideanVector>(s.points[a].value).coords[0] -
                                          std::get<EuclideanVector>(x.value).coords[0]));
            }
            std::sort(values.begin(), values.end());
            if (std::adjacent_find(values.begin(), values.end()) == values.end()) break;
        }
        Rng unused(0);
        for (std::size_t k : {1, 5, 25}) {
            const std::size_t count = stone_count(s, line, x, k, TieBreak::IndexOrder, unused);
            if (count > 2 * k) {
                std::ostringstream os;
                os << "count " << count << " exceeds 2k at k=" << k << " (config " << config_idx << ")";
                detail = os.str();
                return false;
            }
            const double ratio = static_cast<double>(count) / static_cast<double>(k);
            if (ratio > worst_ratio) {
                worst_ratio = ratio;
                worst = count;
                worst_k = k;
            }
        }
    }
    std::ostringstream os;
    os << "1000 configs passed; extremal count " << worst << " at k=" << worst_k;
    detail = os.str();
    return true;
}

// ---- C6: Adversarial ties on the simplex ------------------------------------

bool c06_simplex_ties(std::string& detail) {
    bool ok = true;
    const SimplexInstance inst = make_simplex_instance(50);
    Rng unused(0);
    const std::size_t adversarial = stone_count(inst.sample, inst.space, inst.x, 1,
                                                TieBreak::IndexOrder, unused, StonePlacement::Front);
    ok &= expect(adversarial == 49, "adversarial count is not 49", detail);

    Rng rng(106);
    std::vector<double> counts;
    for (int t = 0; t < 1000; ++t) {
        counts.push_back(static_cast<double>(
            stone_count(inst.sample, inst.space, inst.x, 1, TieBreak::UniformRandom, rng)));
    }
    const MeanStderr ms = mean_stderr(counts);
    ok &= expect(std::abs(ms.mean - 1.0) <= 3.0 * ms.stderr_value, "uniform mean off 1", detail);
    std::ostringstream os;
    os << "adversarial=" << adversarial << " uniform_mean=" << ms.mean << " (3se="
       << 3.0 * ms.stderr_value << ")";
    detail = detail.empty() ? os.str() : detail + "; " + os.str();
    return ok;
}

// ---- C7: Witness correctness -------------------------------------------------

bool c07_witness_correctness(std::string& detail) {
    const SpaceHandle ultra = make_ultrametric_space(UltraParams{small_alphabet(6, 3), {}, 8});
    Rng master(107);
    for (int i = 0; i < 100; ++i) {
        Rng gen(master.next_u64());
        const auto points = random_ultrametric_points(gen, 3 + master.uniform_index(28), 6, 3);
        for (double scale : {0.05, 0.2, 1.0, kInfiniteScale}) {
            if (nagata_violation_witness(points, ultra, 0, scale).has_value()) {
                detail = "witness found on an ultrametric sample";
                return false;
            }
        }
    }

    const std::vector<Point> tri = {make_euclidean1(-1.0), make_euclidean1(0.0), make_euclidean1(1.0)};
    const auto witness = nagata_violation_witness(tri, make_euclidean_space(), 0, kInfiniteScale);
    if (!witness || witness->center != 1) {
        detail = "no witness on {-1, 0, 1}";
        return false;
    }

    for (int i = 0; i < 100; ++i) {
        Rng gen(master.next_u64());
        const auto points = random_line_points(gen, 3 + master.uniform_index(18));
        if (nagata_violation_witness(points, make_euclidean_space(), 1, kInfiniteScale).has_value()) {
            detail = "delta-1 witness found on a line sample";
            return false;
        }
    }
    detail = "100 ultrametric (4 scales) none; {-1,0,1} found; 100 line delta-1 none";
    return true;
}

// ---- C8: Prop 6.2 equivalence ------------------------------------------------

bool exists_overloaded_disconnected_family(const std::vector<Point>& points, const SpaceHandle& space,
                                           std::size_t delta, double scale) {
    const std::size_t need = delta + 2;
    const std::size_t n = points.size();
    for (std::size_t p = 0; p < n; ++p) {
        std::vector<std::size_t> cand;
        for (std::size_t i = 0; i < n; ++i) {
            if (!point_equal(points[i], points[p]) && distance(space, points[i], points[p]) < scale) {
                cand.push_back(i);
            }
        }
        if (cand.size() < need) continue;
        std::vector<std::size_t> chosen;
        auto build_and_check = [&]() {
            BallFamily f;
            f.points = points;
            f.space = space;
            f.scale = scale;
            for (std::size_t c : chosen) {
                f.balls.push_back(BallSpec{c, distance(space, points[c], points[p]), Boundary::Closed});
            }
            return is_disconnected(f) && ball_multiplicity(f, {points[p]}) >= need;
        };
        auto rec = [&](auto&& self, std::size_t start) -> bool {
            if (chosen.size() == need) return build_and_check();
            for (std::size_t i = start; i < cand.size(); ++i) {
                chosen.push_back(cand[i]);
                if (self(self, i + 1)) return true;
                chosen.pop_back();
            }
            return false;
        };
        if (rec(rec, 0)) return true;
    }
    return false;
}

bool c08_family_equivalence(std::string& detail) {
    Rng master(108);
    const SpaceHandle line = make_euclidean_space();
    const SpaceHandle ultra = make_ultrametric_space(UltraParams{small_alphabet(4, 2), {}, 8});
    int agreements = 0, witness_sides = 0;
    for (int iter = 0; iter < 50; ++iter) {
        const bool use_ultra = iter % 2 == 0;
        const std::size_t n = 3 + master.uniform_index(10);
        Rng gen(master.next_u64());
        const std::vector<Point> points = use_ultra ? random_ultrametric_points(gen, n, 4, 2)
                                                    : random_line_points(gen, n);
        const SpaceHandle& space = use_ultra ? ultra : line;
        for (std::size_t delta : {std::size_t{0}, std::size_t{1}}) {
            for (double scale : {0.45, kInfiniteScale}) {
                const bool witness = nagata_violation_witness(points, space, delta, scale).has_value();
                const bool family = exists_overloaded_disconnected_family(points, space, delta, scale);
                if (witness != family) {
                    std::ostringstream os;
                    os << "mismatch at iter " << iter << " delta " << delta << " scale " << scale;
                    detail = os.str();
                    return false;
                }
                ++agreements;
                witness_sides += witness ? 1 : 0;
            }
        }
    }
    std::ostringstream os;
    os << agreements << " cross-checks agreed (" << witness_sides << " with a violation)";
    detail = os.str();
    return witness_sides > 0;
}

// ---- C9: counting bound fuzz ---------------------------------------------------

bool c09_hl_counting_bound(std::string& detail) {
    const SpaceHandle space = make_ultrametric_space(UltraParams{small_alphabet(6, 3), {}, 8});
    const double alphas[] = {0.1, 0.3, 0.5, 1.0};
    Rng master(109);
    for (int iter = 0; iter < 10'000; ++iter) {
        const std::size_t n = 5 + master.uniform_index(46);
        Rng gen(master.next_u64());
        const auto points = random_ultrametric_points(gen, n, 6, 3);
        if (nagata_violation_witness(points, space, 0, kInfiniteScale, 50).has_value()) {
            detail = "instance failed its delta-0 certificate";
            return false;
        }
        LabelledSample s = to_sample(points);
        const std::size_t k = 1 + master.uniform_index(n);
        std::vector<BallSpec> balls;
        for (std::size_t i = 0; i < n; ++i) {
            balls.push_back(BallSpec{i, knn_radius(s, space, points[i], k), Boundary::Closed});
        }
        std::vector<bool> mask(n, false);
        for (std::size_t i = 0; i < n; ++i) mask[i] = master.bernoulli(0.25);
        const double alpha = alphas[master.uniform_index(4)];
        const BoundCheck check = hl_count_check(points, space, mask, balls, alpha, 0, kInfiniteScale);
        if (!check.ok) {
            std::ostringstream os;
            os << "bound violated at iter " << iter << ": count " << check.count << " > "
               << check.bound;
            detail = os.str();
            return false;
        }
    }
    detail = "10000 certified instances within the bound";
    return true;
}

// ---- C10: fraction merge grid ----------------------------------------------------

bool c10_merge_fraction_grid(std::string& detail) {
    std::size_t cells = 0;
    for (int it1 = 0; it1 <= 20; ++it1) {
        for (int it2 = 0; it2 <= 20 - it1; ++it2) {
            for (int ia1 = 0; ia1 <= 20; ++ia1) {
                for (int ia2 = 0; ia2 <= 20; ++ia2) {
                    for (int ial = ia1; ial <= 20; ++ial) {
                        // Premise in exact integer arithmetic on the 0.05 grid.
                        if (it1 * ia1 + (20 - it1) * ia2 > 20 * ial) continue;
                        const double t1 = it1 * 0.05, t2 = it2 * 0.05;
                        const double a1 = ia1 * 0.05, a2 = ia2 * 0.05, alpha = ial * 0.05;
                        ++cells;
                        if (!merge_fraction_bound(t1, t2, a1, a2, alpha)) {
                            std::ostringstream os;
                            os << "conclusion failed at t1=" << t1 << " t2=" << t2 << " a1=" << a1
                               << " a2=" << a2 << " alpha=" << alpha;
                            detail = os.str();
                            return false;
                        }
                    }
                }
            }
        }
    }
    std::ostringstream os;
    os << cells << " premise-satisfying cells all hold";
    detail = os.str();
    return true;
}

// ---- C11: expected fraction fuzz --------------------------------------------------

bool c11_expected_fraction(std::string& detail) {
    const SpaceHandle space = make_ultrametric_space(UltraParams{small_alphabet(5, 3), {}, 8});
    Rng master(111);
    double worst_gap = -1.0;
    for (int iter = 0; iter < 1000; ++iter) {
        const std::size_t n = 8 + master.uniform_index(40);
        Rng gen(master.next_u64());
        const auto points = random_ultrametric_points(gen, n, 5, 3);
        LabelledSample s = to_sample(points);
        Rng xgen(master.next_u64());
        const Point x = random_ultrametric_points(xgen, 1, 5, 3)[0];
        const std::size_t k = 1 + master.uniform_index(std::min<std::size_t>(n, 10));
        const double alpha = 0.3;

        std::vector<double> dists;
        distances_to(s, space, x, dists);
        const BallPartition part = knn_partition(dists, k);

        // Fill the subset to the premise quotas: at most floor(alpha*open) in
        // the open ball and floor(alpha*K) in the closed ball.
        const std::size_t K = part.open.size() + part.sphere.size();
        const std::size_t open_quota = static_cast<std::size_t>(alpha * part.open.size());
        const std::size_t closed_quota = static_cast<std::size_t>(alpha * K);
        std::vector<bool> mask(n, false);
        std::size_t s_open = 0;
        for (std::size_t idx : part.open) {
            if (s_open < open_quota && master.bernoulli(0.7)) {
                mask[idx] = true;
                ++s_open;
            }
        }
        std::size_t s_sphere = 0;
        for (std::size_t idx : part.sphere) {
            if (s_open + s_sphere < closed_quota && master.bernoulli(0.5)) {
                mask[idx] = true;
                ++s_sphere;
            }
        }
        for (std::size_t i = 0; i < n; ++i) {  // outside the ball: unconstrained
            if (dists[i] > part.radius && master.bernoulli(0.4)) mask[i] = true;
        }

        Rng trial_rng(master.next_u64());
        const double est = expected_subset_fraction_in_knn(s, space, mask, x, k, 10'000, trial_rng);

        // Hypergeometric standard error of the Monte Carlo mean.
        const std::size_t slots = k - part.open.size();
        const double S = static_cast<double>(part.sphere.size());
        double var = 0.0;
        if (S > 1.0) {
            const double p = static_cast<double>(s_sphere) / S;
            var = static_cast<double>(slots) * p * (1.0 - p) * (S - slots) / (S - 1.0) /
                  (static_cast<double>(k) * k);
        }
        const double se = std::sqrt(var / 10'000.0);
        const double gap = est - alpha;
        worst_gap = std::max(worst_gap, gap - 3.0 * se);
        if (gap > 3.0 * se + 1e-12) {
            std::ostringstream os;
            os << "estimate " << est << " exceeds alpha+3se at iter " << iter;
            detail = os.str();
            return false;
        }
    }
    std::ostringstream os;
    os << "1000 premise instances ok; max(est - alpha - 3se) = " << worst_gap;
    detail = os.str();
    return true;
}

// ---- C12: Cover-Hart radius decay --------------------------------------------------

bool c12_cover_hart(std::string& detail) {
    const SpaceHandle space = make_euclidean_space(MixtureParams{0.0, 1.0, 0.0, 1.0, 0.5});
    Rng test_gen(1121);
    const std::vector<Point> tests = random_line_points(test_gen, 100);
    Rng rng(112);
    const auto rows = cover_hart_curve(space, KRule::sqrt_rule(), {100, 10'000}, tests, rng);
    std::ostringstream os;
    os << "max_radius(100)=" << rows[0].max_radius << " max_radius(10000)=" << rows[1].max_radius;
    detail = os.str();
    return rows[1].max_radius < 0.05 && rows[1].max_radius < rows[0].max_radius;
}

// ---- C13: Preiss closed forms and domination ----------------------------------------

bool c13_preiss_forms(std::string& detail) {
    const SpaceHandle space = make_preiss_space(12);
    const PreissParams& p = *space.preiss;
    Rng master(113);
    double worst = 0.0;
    for (int iter = 0; iter < 1000; ++iter) {
        const Point base = Point{SeqPoint::make_lazy(master.next_u64(), p.alphabet, 16)};
        const SeqPoint& sb = std::get<SeqPoint>(base.value);
        const std::size_t agree = master.uniform_index(11);
        Point other;
        if (master.bernoulli(0.5)) {
            SeqPoint probe;
            probe.alphabet = p.alphabet;
            probe.lazy = true;
            probe.seed = master.next_u64();
            for (std::size_t i = 0; i < agree; ++i) probe.symbols.push_back(sb.symbol_at(i));
            const std::uint32_t nsym = sb.alphabet_at(agree);
            std::uint32_t differing = sb.symbol_at(agree) % nsym + 1;
            if (differing == sb.symbol_at(agree)) differing = differing % nsym + 1;
            probe.symbols.push_back(differing);
            other = Point{probe};
        } else {
            const std::size_t level = std::max<std::size_t>(agree, 1 + master.uniform_index(12));
            std::vector<std::uint32_t> symbols;
            for (std::size_t i = 0; i < agree && i < level; ++i) symbols.push_back(sb.symbol_at(i));
            while (symbols.size() < level) {
                const std::size_t i = symbols.size();
                const std::uint32_t nsym = sb.alphabet_at(i);
                std::uint32_t differing = sb.symbol_at(i) % nsym + 1;
                if (differing == sb.symbol_at(i)) differing = differing % nsym + 1;
                symbols.push_back(differing);
            }
            other = make_seq(std::move(symbols), p.alphabet);
        }
        const double closed = distance(space, base, other);
        const double oracle = preiss_embedding_distance(base, other);
        worst = std::max(worst, std::abs(closed - oracle));
        if (worst >= 1e-9) {
            std::ostringstream os;
            os << "closed form off the embedding oracle by " << worst << " at iter " << iter;
            detail = os.str();
            return false;
        }
    }

    bool ok = true;
    for (std::size_t k = 1; k + 1 <= p.levels; ++k) {
        ok &= expect(p.mu1_ball(k) == 1.0 / p.cube_size(k + 1), "mu1 mass mismatch", detail);
        ok &= expect(p.mu0_ball(k) >= p.atom_weight[k - 1], "mu0 below the atom weight", detail);
    }
    ok &= expect(p.domination_bound(1) >= p.domination_bound(2),
                 "bound rises at the clamped first step", detail);
    for (std::size_t k = 3; k + 1 <= p.levels; ++k) {
        ok &= expect(p.domination_bound(k) < p.domination_bound(k - 1),
                     "domination bound not strictly decreasing", detail);
    }
    std::ostringstream os;
    os << "1000 pairs within " << worst << " of the oracle; bound 1/2,1/2,1/3,...,1/11";
    detail = detail.empty() ? os.str() : detail + "; " + os.str();
    return ok;
}

// ---- C14: l1-sum witness ---------------------------------------------------------------

bool c14_l1_witness(std::string& detail) {
    using boost::multiprecision::cpp_int;
    const std::size_t count = 50;
    const L1Witness w = l1_witness_points(0.9, 0.4, count);

    // Exact scaled-integer distances: alpha = 9/10, beta = 2/5 = 4/10, so
    // 10^50 * d is an integer.  d(z_i, z_j) = sum_{m<=max} alpha^m + |b^i - b^j|.
    auto pow_int = [](cpp_int base, std::size_t e) {
        cpp_int r = 1;
        for (std::size_t i = 0; i < e; ++i) r *= base;
        return r;
    };
    const cpp_int ten50 = pow_int(10, 50);
    auto hub_scaled = [&](std::size_t hi) {
        cpp_int total = 0;
        for (std::size_t m = 1; m <= hi; ++m) total += pow_int(9, m) * pow_int(10, 50 - m);
        return total;
    };
    auto beta_scaled = [&](std::size_t i) { return pow_int(4, i) * pow_int(10, 50 - i); };

    bool ok = true;
    std::size_t exact_strict = 0;
    for (std::size_t i = 1; i <= count; ++i) {
        for (std::size_t j = i + 1; j <= count; ++j) {
            const cpp_int dij = hub_scaled(j) + beta_scaled(i) - beta_scaled(j);
            const cpp_int diz = hub_scaled(i) + beta_scaled(i);
            const cpp_int djz = hub_scaled(j) + beta_scaled(j);
            if (dij > diz && dij > djz) {
                ++exact_strict;
            } else {
                ok = expect(false, "exact comparison failed at (" + std::to_string(i) + "," +
                                       std::to_string(j) + ")", detail);
            }
            // The double-precision metric agrees up to representation ties.
            const double dd = distance(w.space, w.zs[i - 1], w.zs[j - 1]);
            const double dz1 = distance(w.space, w.zs[i - 1], w.z);
            const double dz2 = distance(w.space, w.zs[j - 1], w.z);
            ok &= expect(dd >= std::max(dz1, dz2), "double distances violate the non-strict form",
                         detail);
        }
    }

    // The disconnected family of balls B(z_i, d(z_i, z)) all contain z.
    BallFamily family;
    family.space = w.space;
    family.points = w.zs;
    for (std::size_t i = 0; i < count; ++i) {
        family.balls.push_back(BallSpec{i, distance(w.space, w.zs[i], w.z), Boundary::Closed});
    }
    const std::size_t mult = ball_multiplicity(family, {w.z});
    ok &= expect(mult == count, "witness family multiplicity is not 50", detail);

    std::ostringstream os;
    os << exact_strict << "/" << count * (count - 1) / 2
       << " pairs strictly separated (exact arithmetic); multiplicity at z = " << mult;
    detail = detail.empty() ? os.str() : detail + "; " + os.str();
    return ok;
}

// ---- C15: CSV reproducibility ------------------------------------------------------------

std::string slurp_or_empty(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) return {};
    std::string data;
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, f)) > 0) data.append(buf, got);
    std::fclose(f);
    return data;
}

bool c15_reproducibility(std::string& detail) {
    const std::vector<std::vector<std::string>> invocations = {
        {"consistency", "--n-schedule", "200", "--trials", "2", "--test-size", "50", "--seed", "9"},
        {"preiss", "--levels", "8", "--n-schedule", "128", "--k-rule", "fixed:8", "--trials", "1",
         "--test-size", "30", "--seed", "9"},
        {"hub", "--n", "20", "--trials", "50", "--seed", "9"},
        {"stone", "--family", "simplex", "--n", "20", "--k", "1", "--trials", "20", "--policy",
         "uniform", "--seed", "9"},
        {"cover-hart", "--n-schedule", "50,200", "--test-points", "10", "--seed", "9"},
    };
    for (const auto& base : invocations) {
        const std::string path_a = "/tmp/knnlab_accept_a.csv";
        const std::string path_b = "/tmp/knnlab_accept_b.csv";
        std::vector<std::string> args_a = base;
        args_a.insert(args_a.end(), {"--out", path_a});
        std::vector<std::string> args_b = base;
        args_b.insert(args_b.end(), {"--out", path_b});
        if (knnlab::cli::run(args_a) != 0 || knnlab::cli::run(args_b) != 0) {
            detail = base[0] + " exited nonzero";
            return false;
        }
        const std::string a = slurp_or_empty(path_a);
        if (a.empty() || a != slurp_or_empty(path_b)) {
            detail = base[0] + " is not byte-identical across reruns";
            return false;
        }
        std::remove(path_a.c_str());
        std::remove(path_b.c_str());
    }
    detail = "5 emitters byte-identical across reruns";
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "euclidean consistency (mixture, Bayes 0.05)", c01_euclidean_consistency},
        {2, "ultrametric consistency (product space, closed-form Bayes)", c02_ultrametric_consistency},
        {3, "preiss inconsistency (K=12, n=4096, k=64)", c03_preiss_inconsistency},
        {4, "harmonic hub growth (H_99, exact small cases)", c04_hub_growth},
        {5, "stone bound on the line (count <= 2k)", c05_stone_line},
        {6, "adversarial simplex ties (49 vs mean 1)", c06_simplex_ties},
        {7, "dimension witness correctness", c07_witness_correctness},
        {8, "witness / disconnected-family equivalence", c08_family_equivalence},
        {9, "counting bound on certified instances", c09_hl_counting_bound},
        {10, "fraction merge bound on the 0.05 grid", c10_merge_fraction_grid},
        {11, "expected subset fraction under uniform ties", c11_expected_fraction},
        {12, "cover-hart radius decay", c12_cover_hart},
        {13, "preiss closed forms and measure domination", c13_preiss_forms},
        {14, "l1-sum witness separation (exact arithmetic)", c14_l1_witness},
        {15, "byte-identical CSV reruns", c15_reproducibility},
    };

    int only = 0;
    bool list = false;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--only" && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else if (arg == "--list") {
            list = true;
        } else {
            std::cerr << "usage: acceptance [--only N] [--list]\n";
            return 2;
        }
    }
    if (list) {
        for (const Criterion& c : criteria) std::cout << c.id << ": " << c.name << "\n";
        return 0;
    }

    int failures = 0;
    for (const Criterion& c : criteria) {
        if (only != 0 && c.id != only) continue;
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] C%02d %s (%.1fs) %s\n", ok ? "PASS" : "FAIL", c.id, c.name.c_str(), seconds,
                    detail.c_str());
        std::fflush(stdout);
        failures += ok ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
