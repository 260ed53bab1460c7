#include "knnlab/metric_space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "knnlab/errors.hpp"

namespace knnlab {

namespace {

constexpr std::size_t kInfiniteLevel = static_cast<std::size_t>(-1);

double pow4_neg(std::size_t j) {
    if (j == kInfiniteLevel) return 0.0;
    return std::ldexp(1.0, -2 * static_cast<int>(j));
}

const SeqPoint& as_seq(const Point& p, const char* family) {
    if (const auto* s = std::get_if<SeqPoint>(&p.value)) return *s;
    throw DomainError(std::string(family) + ": point is not a sequence point");
}

std::size_t seq_level(const SeqPoint& p) { return p.lazy ? kInfiniteLevel : p.level(); }

// Length of the common prefix of p and q, walking at most max_level symbols.
// Both points must be defined at every compared depth.
std::size_t common_prefix(const SeqPoint& p, const SeqPoint& q, std::size_t max_level) {
    const std::size_t limit = std::min(max_level, kMaxCompareDepth);
    for (std::size_t i = 0; i < limit; ++i) {
        if (p.symbol_at(i) != q.symbol_at(i)) return i;
    }
    if (max_level > kMaxCompareDepth) {
        throw DepthExhaustedError("lazy sequences agree past max compare depth (seed collision?)");
    }
    return limit;
}

double euclidean_distance(const Point& p, const Point& q) {
    const auto* a = std::get_if<EuclideanVector>(&p.value);
    const auto* b = std::get_if<EuclideanVector>(&q.value);
    if (!a || !b) throw DomainError("euclidean: point is not a coordinate vector");
    if (a->coords.size() != b->coords.size()) throw DomainError("euclidean: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a->coords.size(); ++i) {
        const double d = a->coords[i] - b->coords[i];
        s += d * d;
    }
    return std::sqrt(s);
}

double ultrametric_distance(const Point& p, const Point& q) {
    const SeqPoint& a = as_seq(p, "ultrametric");
    const SeqPoint& b = as_seq(q, "ultrametric");
    if (point_equal(p, q)) return 0.0;
    const std::size_t la = seq_level(a), lb = seq_level(b);
    const std::size_t walk = std::min(la, lb);
    const std::size_t j = common_prefix(a, b, walk);
    if (j == walk) {
        // Distinct points agreeing through the shorter level: one is a proper
        // prefix of the other, which this family cannot compare.
        throw DomainError("ultrametric: one point is a proper prefix of the other");
    }
    return std::ldexp(1.0, -static_cast<int>(j + 1));  // 2^{-(first disagreement, 1-based)}
}

// d^2 = 2(4^{-j} - 4^{-k})/3 + (4^{-k} - 4^{-l})/3 for prefix agreement j and
// levels j <= k <= l (infinite level contributes 0).
double preiss_closed_form(std::size_t j, std::size_t k, std::size_t l) {
    const double d2 = 2.0 * (pow4_neg(j) - pow4_neg(k)) / 3.0 + (pow4_neg(k) - pow4_neg(l)) / 3.0;
    return std::sqrt(d2);
}

double preiss_distance(const Point& p, const Point& q) {
    const SeqPoint& a = as_seq(p, "preiss");
    const SeqPoint& b = as_seq(q, "preiss");
    if (point_equal(p, q)) return 0.0;
    std::size_t k = seq_level(a), l = seq_level(b);
    if (k > l) std::swap(k, l);
    const std::size_t j = common_prefix(a, b, k);
    return preiss_closed_form(j, k, l);
}

double hub_distance(const HubParams& params, const Point& p, const Point& q) {
    const auto* a = std::get_if<HubIndex>(&p.value);
    const auto* b = std::get_if<HubIndex>(&q.value);
    if (!a || !b) throw DomainError("hub: point is not a hub index");
    if (a->index == b->index) return 0.0;
    const std::uint32_t hi = std::max(a->index, b->index);
    if (params.kind == HubParams::Kind::Pow2) {
        if (std::min(a->index, b->index) < 1) throw DomainError("hub: pow2 indices start at 1");
        if (hi == 2) return 1.0;
        return std::ldexp(1.0, static_cast<int>(hi) - 1);
    }
    // Geometric: sum_{m=1}^{hi} alpha^m; ties are exact because the value only
    // depends on hi.
    const double alpha = params.alpha;
    return alpha * (1.0 - std::pow(alpha, static_cast<double>(hi))) / (1.0 - alpha);
}

}  // namespace

void MixtureParams::validate() const {
    if (!(lo0 < hi0) || !(lo1 < hi1)) throw ConfigError("mixture: degenerate class interval");
    if (!(prior1 > 0.0) || !(prior1 < 1.0)) throw ConfigError("mixture: prior1 must be in (0,1)");
}

double MixtureParams::eta(double x) const {
    const double f0 = (x >= lo0 && x <= hi0) ? 1.0 / (hi0 - lo0) : 0.0;
    const double f1 = (x >= lo1 && x <= hi1) ? 1.0 / (hi1 - lo1) : 0.0;
    const double w0 = (1.0 - prior1) * f0, w1 = prior1 * f1;
    if (w0 + w1 == 0.0) throw DomainError("mixture: point outside the support");
    return w1 / (w0 + w1);
}

int MixtureParams::bayes_label(double x) const { return eta(x) >= 0.5 ? 1 : 0; }

double MixtureParams::bayes_error() const {
    const double lo = std::max(lo0, lo1), hi = std::min(hi0, hi1);
    if (lo >= hi) return 0.0;
    const double d0 = (1.0 - prior1) / (hi0 - lo0), d1 = prior1 / (hi1 - lo1);
    return std::min(d0, d1) * (hi - lo);
}

void UltraParams::validate() const {
    if (alphabet.empty()) throw ConfigError("ultrametric: empty alphabet");
    for (auto n : alphabet) {
        if (n < 2) throw ConfigError("ultrametric: alphabet sizes must be >= 2");
    }
    if (!eta_first.empty() && eta_first.size() != alphabet[0]) {
        throw ConfigError("ultrametric: eta_first must have one entry per first-level symbol");
    }
    for (double e : eta_first) {
        if (e < 0.0 || e > 1.0) throw ConfigError("ultrametric: eta values must be in [0,1]");
    }
}

double UltraParams::bayes_error() const {
    if (eta_first.empty()) return 0.0;
    double err = 0.0;
    for (double e : eta_first) err += std::min(e, 1.0 - e);
    return err / static_cast<double>(alphabet[0]);
}

void PreissParams::validate() const {
    if (levels < 2) throw DomainError("preiss: need at least 2 levels");
    if (alphabet.size() != levels || atom_weight.size() != levels || level_mass.size() != levels) {
        throw ConfigError("preiss: inconsistent parameter lengths");
    }
    for (auto n : alphabet) {
        if (n < 2) throw ConfigError("preiss: alphabet sizes must be >= 2");
    }
    if (!(z > 1.0) || !std::isfinite(z)) throw ConfigError("preiss: total mass must be finite and > 1");
    for (std::size_t k = 1; k < levels; ++k) {
        if (growth(k + 1) + 1e-12 < growth(k)) {
            throw ConfigError("preiss: b_k N_{k+1} must be nondecreasing");
        }
    }
}

double PreissParams::cube_size(std::size_t k) const {
    double prod = 1.0;
    for (std::size_t i = 0; i < k; ++i) prod *= alphabet_extended(i + 1);
    return prod;
}

std::uint32_t PreissParams::alphabet_extended(std::size_t level1based) const {
    if (level1based == 0) throw DomainError("preiss: levels are 1-based");
    if (level1based <= alphabet.size()) return alphabet[level1based - 1];
    const std::uint64_t k = level1based - 1;  // N_{k+1} = max(2, k^3)
    const std::uint64_t cube = k * k * k;
    return static_cast<std::uint32_t>(std::max<std::uint64_t>(2, cube));
}

double PreissParams::growth(std::size_t k) const {
    if (k < 1 || k > levels) throw DomainError("preiss: growth level out of range");
    return level_mass[k - 1] * alphabet_extended(k + 1);
}

double PreissParams::mu1_ball(std::size_t k) const {
    if (k < 1 || k + 1 > levels) throw DomainError("preiss: ball level out of range");
    return 1.0 / cube_size(k + 1);
}

double PreissParams::mu0_ball(std::size_t k) const {
    if (k < 1 || k + 1 > levels) throw DomainError("preiss: ball level out of range");
    double descendants = 0.0;
    for (std::size_t l = k + 1; l <= levels; ++l) descendants += level_mass[l - 1];
    return atom_weight[k - 1] + descendants / cube_size(k + 1);
}

double PreissParams::domination_bound(std::size_t k) const {
    return mu1_ball(k) / atom_weight[k - 1];
}

PreissParams build_preiss_params(std::size_t levels) {
    if (levels < 2) throw DomainError("build_preiss_params: levels must be >= 2");
    PreissParams params;
    params.levels = levels;
    params.alphabet.resize(levels);
    params.alphabet[0] = 2;
    for (std::size_t k = 1; k < levels; ++k) {
        const std::uint64_t cube = static_cast<std::uint64_t>(k) * k * k;
        params.alphabet[k] = static_cast<std::uint32_t>(std::max<std::uint64_t>(2, cube));
    }
    double cube = 1.0;
    params.atom_weight.resize(levels);
    params.level_mass.resize(levels);
    params.z = 1.0;
    for (std::size_t k = 1; k <= levels; ++k) {
        cube *= params.alphabet[k - 1];
        const double bk = 1.0 / (static_cast<double>(k) * static_cast<double>(k));
        params.level_mass[k - 1] = bk;
        params.atom_weight[k - 1] = bk / cube;
        params.z += bk;
    }
    params.validate();
    return params;
}

SpaceHandle make_euclidean_space(std::optional<MixtureParams> mixture) {
    SpaceHandle s;
    s.family = Family::Euclidean;
    if (mixture) {
        mixture->validate();
        s.mixture = std::move(mixture);
    }
    return s;
}

SpaceHandle make_ultrametric_space(UltraParams params) {
    params.validate();
    SpaceHandle s;
    s.family = Family::Ultrametric;
    s.ultra = std::move(params);
    return s;
}

SpaceHandle make_preiss_space(std::size_t levels) {
    SpaceHandle s;
    s.family = Family::Preiss;
    s.preiss = build_preiss_params(levels);
    return s;
}

SpaceHandle make_hub_space(HubParams::Kind kind, double alpha) {
    if (kind == HubParams::Kind::Geometric && !(alpha > 0.0 && alpha < 1.0)) {
        throw ConfigError("hub: geometric variant needs alpha in (0,1)");
    }
    SpaceHandle s;
    s.family = Family::Hub;
    s.hub = HubParams{kind, alpha};
    return s;
}

SpaceHandle l1_sum(SpaceHandle left) {
    SpaceHandle s;
    s.family = Family::L1Sum;
    s.left = std::make_shared<const SpaceHandle>(std::move(left));
    return s;
}

L1Witness l1_witness_points(double alpha, double beta, std::size_t count) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("l1 witness: alpha must be in (0,1)");
    if (!(beta > 0.0) || beta >= alpha || beta >= 0.5) {
        throw ConfigError("l1 witness: need 0 < beta < alpha and beta < 1/2");
    }
    L1Witness w;
    w.space = l1_sum(make_hub_space(HubParams::Kind::Geometric, alpha));
    w.z = make_sum(make_hub(0), 0.0);
    w.zs.reserve(count);
    for (std::size_t i = 1; i <= count; ++i) {
        w.zs.push_back(make_sum(make_hub(static_cast<std::uint32_t>(i)),
                                std::pow(beta, static_cast<double>(i))));
    }
    return w;
}

CantorTiesSpace build_cantor_ties(double delta, const std::vector<std::uint64_t>& base_schedule,
                                  std::uint64_t alphabet_cap) {
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("cantor-ties: delta must be in (0,1)");
    if (base_schedule.empty()) throw DomainError("cantor-ties: empty base schedule");
    for (std::size_t i = 1; i < base_schedule.size(); ++i) {
        if (base_schedule[i] <= base_schedule[i - 1]) {
            throw DomainError("cantor-ties: base schedule must be strictly increasing");
        }
    }

    CantorTiesSpace out;
    std::vector<CantorTiesLevel>& levels = out.schedule;
    double cells = 1.0;  // |prod_{i<=k} [N_i]|
    std::uint64_t n_k = base_schedule[0];
    for (std::size_t k = 1; k <= base_schedule.size(); ++k) {
        const double delta_k = delta * std::ldexp(1.0, -static_cast<int>(k) - 1);
        // Birthday bound: collision probability of n draws from [N] is at most
        // n^2/(2N), so N = ceil(n^2/(2 delta_k)) keeps it below delta_k.
        const double n_d = static_cast<double>(n_k);
        const double needed = std::ceil(n_d * n_d / (2.0 * delta_k));
        if (!(needed <= static_cast<double>(alphabet_cap))) {
            throw ResourceError("cantor-ties: alphabet size exceeds cap at level " + std::to_string(k));
        }
        const std::uint64_t big_n = static_cast<std::uint64_t>(needed);
        levels.push_back(CantorTiesLevel{n_k, big_n, delta_k});
        cells *= static_cast<double>(big_n);

        if (k == base_schedule.size()) break;

        // Occupancy: every one of m cylinders sees >= n_k of n draws.  Chernoff
        // lower tail P(Bin(n,1/m) <= t) <= exp(-(mu-t)^2/(2 mu)), mu = n/m,
        // union bound over m cells; smallest such n by doubling + bisection.
        const double m = cells;
        auto occupancy_ok = [&](double n) {
            const double mu = n / m;
            if (mu <= n_d) return false;
            const double gap = mu - n_d;
            return m * std::exp(-gap * gap / (2.0 * mu)) <= delta_k;
        };
        double lo = n_d * m, hi = lo;
        while (!occupancy_ok(hi)) {
            hi *= 2.0;
            if (hi > 1e18) throw ResourceError("cantor-ties: occupancy target out of range at level " +
                                               std::to_string(k));
        }
        while (hi - lo > 1.0) {
            const double mid = std::floor((lo + hi) / 2.0);
            (occupancy_ok(mid) ? hi : lo) = mid;
        }
        n_k = std::max<std::uint64_t>(base_schedule[k], static_cast<std::uint64_t>(hi));
    }

    UltraParams params;
    for (const auto& lvl : levels) params.alphabet.push_back(static_cast<std::uint32_t>(lvl.alphabet_size));
    params.validate();
    out.space.family = Family::CantorTies;
    out.space.ultra = std::move(params);
    return out;
}

double distance(const SpaceHandle& space, const Point& p, const Point& q) {
    switch (space.family) {
        case Family::Euclidean:
            return euclidean_distance(p, q);
        case Family::Ultrametric:
        case Family::CantorTies:
            return ultrametric_distance(p, q);
        case Family::Preiss:
            return preiss_distance(p, q);
        case Family::Hub:
            return hub_distance(*space.hub, p, q);
        case Family::L1Sum: {
            const auto* a = std::get_if<SumPoint>(&p.value);
            const auto* b = std::get_if<SumPoint>(&q.value);
            if (!a || !b) throw DomainError("l1sum: point is not a sum point");
            return distance(*space.left, *a->base, *b->base) + std::abs(a->t - b->t);
        }
    }
    throw DomainError("distance: unknown family");
}

bool has_sampler(const SpaceHandle& space) {
    switch (space.family) {
        case Family::Euclidean:
            return space.mixture.has_value();
        case Family::Ultrametric:
        case Family::CantorTies:
            return space.ultra.has_value();
        case Family::Preiss:
            return space.preiss.has_value();
        default:
            return false;
    }
}

LabelledDraw sample(const SpaceHandle& space, Rng& rng) {
    switch (space.family) {
        case Family::Euclidean: {
            if (!space.mixture) throw ConfigError("sample: euclidean space has no mixture sampler");
            const MixtureParams& m = *space.mixture;
            const int label = rng.bernoulli(m.prior1) ? 1 : 0;
            const double x = label == 1 ? rng.uniform(m.lo1, m.hi1) : rng.uniform(m.lo0, m.hi0);
            return LabelledDraw{make_euclidean1(x), label, m.bayes_label(x)};
        }
        case Family::Ultrametric:
        case Family::CantorTies: {
            if (!space.ultra) throw ConfigError("sample: product space has no parameters");
            const UltraParams& u = *space.ultra;
            Point p{SeqPoint::make_lazy(rng.next_u64(), u.alphabet, u.eager_depth)};
            if (u.eta_first.empty()) return LabelledDraw{std::move(p), 0, 0};
            const double eta = u.eta_first[std::get<SeqPoint>(p.value).symbol_at(0) - 1];
            const int label = rng.bernoulli(eta) ? 1 : 0;
            return LabelledDraw{std::move(p), label, eta >= 0.5 ? 1 : 0};
        }
        case Family::Preiss: {
            if (!space.preiss) throw ConfigError("sample: preiss space has no parameters");
            const PreissParams& pp = *space.preiss;
            if (!(pp.z > 1.0)) throw ConfigError("sample: preiss params not normalizable (Z <= 1)");
            if (rng.uniform01() < 1.0 / pp.z) {
                Point p{SeqPoint::make_lazy(rng.next_u64(), pp.alphabet,
                                            std::min<std::size_t>(pp.levels + 4, 16))};
                return LabelledDraw{std::move(p), 1, 1};
            }
            // Atom: level k with probability b_k/(Z-1), then uniform in Q_k.
            double u = rng.uniform01() * (pp.z - 1.0);
            std::size_t level = pp.levels;
            for (std::size_t k = 1; k <= pp.levels; ++k) {
                u -= pp.level_mass[k - 1];
                if (u < 0.0) {
                    level = k;
                    break;
                }
            }
            SeqPoint atom;
            atom.alphabet = pp.alphabet;
            atom.symbols.reserve(level);
            for (std::size_t i = 0; i < level; ++i) {
                atom.symbols.push_back(1u + static_cast<std::uint32_t>(rng.uniform_index(pp.alphabet[i])));
            }
            return LabelledDraw{Point{std::move(atom)}, 0, 0};
        }
        default:
            throw ConfigError("sample: space family has no sampler");
    }
}

double bayes_error(const SpaceHandle& space) {
    switch (space.family) {
        case Family::Euclidean:
            if (!space.mixture) throw ConfigError("bayes_error: no mixture params");
            return space.mixture->bayes_error();
        case Family::Ultrametric:
        case Family::CantorTies:
            if (!space.ultra) throw ConfigError("bayes_error: no product params");
            return space.ultra->bayes_error();
        case Family::Preiss:
            return 0.0;  // deterministic concept
        default:
            throw ConfigError("bayes_error: space family has no sampler distribution");
    }
}

}  // namespace knnlab
