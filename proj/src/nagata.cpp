#include "knnlab/nagata.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "knnlab/errors.hpp"

namespace knnlab {

namespace {

using f128 = __float128;

void check_family(const BallFamily& family) {
    for (const BallSpec& b : family.balls) {
        if (b.center >= family.points.size()) throw DomainError("ball family: centre index out of range");
        if (b.radius < 0.0) throw DomainError("ball family: negative radius");
        if (!(b.radius < family.scale)) throw DomainError("ball family: radius must be below the scale");
    }
}

}  // namespace

bool ball_contains(const BallFamily& family, const BallSpec& ball, const Point& probe) {
    const double d = distance(family.space, family.points[ball.center], probe);
    return ball.boundary == Boundary::Closed ? d <= ball.radius : d < ball.radius;
}

std::size_t ball_multiplicity(const BallFamily& family, const std::vector<Point>& probes) {
    if (probes.empty()) throw DomainError("ball_multiplicity: no probes");
    check_family(family);
    std::size_t best = 0;
    for (const Point& probe : probes) {
        std::size_t count = 0;
        for (const BallSpec& ball : family.balls) {
            if (ball_contains(family, ball, probe)) ++count;
        }
        best = std::max(best, count);
    }
    return best;
}

bool is_disconnected(const BallFamily& family) {
    check_family(family);
    for (std::size_t i = 0; i < family.balls.size(); ++i) {
        for (std::size_t j = 0; j < family.balls.size(); ++j) {
            if (i == j) continue;
            if (ball_contains(family, family.balls[j], family.points[family.balls[i].center])) {
                return false;
            }
        }
    }
    return true;
}

BallFamily center_cover_subfamily(const BallFamily& family) {
    check_family(family);
    const std::size_t m = family.balls.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const BallSpec& ba = family.balls[a];
        const BallSpec& bb = family.balls[b];
        if (ba.radius != bb.radius) return ba.radius > bb.radius;
        if (ba.boundary != bb.boundary) return ba.boundary == Boundary::Closed;
        return a < b;
    });

    std::vector<bool> kept(m, false);
    std::vector<std::size_t> kept_order;
    for (std::size_t idx : order) {
        const Point& centre = family.points[family.balls[idx].center];
        bool covered = false;
        for (std::size_t kidx : kept_order) {
            if (ball_contains(family, family.balls[kidx], centre)) {
                covered = true;
                break;
            }
        }
        if (!covered) {
            kept[idx] = true;
            kept_order.push_back(idx);
        }
    }

    BallFamily out;
    out.points = family.points;
    out.space = family.space;
    out.scale = family.scale;
    for (std::size_t i = 0; i < m; ++i) {
        if (kept[i]) out.balls.push_back(family.balls[i]);
    }
    return out;
}

std::optional<NagataWitness> nagata_violation_witness(const std::vector<Point>& points,
                                                      const SpaceHandle& space, std::size_t delta,
                                                      double scale, std::size_t point_cap) {
    if (points.size() > point_cap) {
        throw ResourceError("witness search: " + std::to_string(points.size()) +
                            " points exceed the cap " + std::to_string(point_cap));
    }
    const std::size_t n = points.size();
    const std::size_t need = delta + 2;
    if (n < need + 1) return std::nullopt;

    std::vector<double> dc(n);
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t i = 0; i < n; ++i) dc[i] = distance(space, points[c], points[i]);

        std::vector<std::size_t> cand;
        for (std::size_t i = 0; i < n; ++i) {
            if (i != c && dc[i] < scale) cand.push_back(i);
        }
        if (cand.size() < need) continue;

        // viol[a][b]: the pair (cand[a], cand[b]) violates the two-point
        // inequality around centre c.
        const std::size_t cn = cand.size();
        std::vector<bool> viol(cn * cn, false);
        for (std::size_t a = 0; a < cn; ++a) {
            for (std::size_t b = a + 1; b < cn; ++b) {
                const double dab = distance(space, points[cand[a]], points[cand[b]]);
                const bool v = dab > std::max(dc[cand[a]], dc[cand[b]]);
                viol[a * cn + b] = viol[b * cn + a] = v;
            }
        }

        std::vector<std::size_t> chosen;
        auto extend = [&](auto&& self, std::size_t start) -> bool {
            if (chosen.size() == need) return true;
            const std::size_t missing = need - chosen.size();
            for (std::size_t idx = start; idx + missing <= cn; ++idx) {
                bool ok = true;
                for (std::size_t got : chosen) {
                    if (!viol[got * cn + idx]) {
                        ok = false;
                        break;
                    }
                }
                if (!ok) continue;
                chosen.push_back(idx);
                if (self(self, idx + 1)) return true;
                chosen.pop_back();
            }
            return false;
        };
        if (extend(extend, 0)) {
            NagataWitness w;
            w.center = c;
            for (std::size_t idx : chosen) {
                w.ring.push_back(cand[idx]);
                w.radius = std::max(w.radius, dc[cand[idx]]);
            }
            return w;
        }
    }
    return std::nullopt;
}

namespace {

// Distances of the substituted sample (x replacing slot i, or prepended) to
// the query x_i, without materializing the sample.
void substituted_distances(const LabelledSample& sample, const SpaceHandle& space, const Point& x,
                           std::size_t i, StonePlacement placement, std::vector<double>& dists,
                           std::size_t& x_position) {
    const std::size_t n = sample.size();
    dists.clear();
    dists.reserve(n);
    const Point& query = sample.points[i];
    if (placement == StonePlacement::InPlace) {
        for (std::size_t j = 0; j < n; ++j) {
            dists.push_back(j == i ? distance(space, x, query) : distance(space, sample.points[j], query));
        }
        x_position = i;
    } else {
        dists.push_back(distance(space, x, query));
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) dists.push_back(distance(space, sample.points[j], query));
        }
        x_position = 0;
    }
}

}  // namespace

std::size_t stone_count(const LabelledSample& sample, const SpaceHandle& space, const Point& x,
                        std::size_t k, TieBreak policy, Rng& rng, StonePlacement placement) {
    const std::size_t n = sample.size();
    if (k > n) throw DomainError("stone_count: k must be <= n");
    std::size_t count = 0;
    std::vector<double> dists;
    for (std::size_t i = 0; i < n; ++i) {
        if (point_equal(sample.points[i], x)) continue;
        std::size_t x_position = 0;
        substituted_distances(sample, space, x, i, placement, dists, x_position);
        const BallPartition part = knn_partition(dists, k);
        const NeighbourSelection sel = select_from_partition(part, k, policy, rng);
        if (std::binary_search(sel.indices.begin(), sel.indices.end(), x_position)) ++count;
    }
    return count;
}

BoundCheck stone_bound_no_ties_check(const LabelledSample& sample, const SpaceHandle& space,
                                     const Point& x, std::size_t k, std::size_t delta, double scale) {
    const std::size_t n = sample.size();
    if (k > n) throw DomainError("stone_bound_no_ties_check: k must be <= n");

    // All pairwise distances in (x, x_1..x_n) must be distinct.
    std::vector<Point> all;
    all.reserve(n + 1);
    all.push_back(x);
    all.insert(all.end(), sample.points.begin(), sample.points.end());
    struct Entry {
        double d;
        std::size_t a, b;
    };
    std::vector<Entry> entries;
    entries.reserve((n + 1) * n / 2);
    for (std::size_t a = 0; a < all.size(); ++a) {
        for (std::size_t b = a + 1; b < all.size(); ++b) {
            entries.push_back(Entry{distance(space, all[a], all[b]), a, b});
        }
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& l, const Entry& r) { return l.d < r.d; });
    for (std::size_t i = 1; i < entries.size(); ++i) {
        if (entries[i].d == entries[i - 1].d) {
            const Entry& p = entries[i - 1];
            const Entry& q = entries[i];
            throw PreconditionError("stone_bound_no_ties_check: distance tie between pairs (" +
                                    std::to_string(p.a) + "," + std::to_string(p.b) + ") and (" +
                                    std::to_string(q.a) + "," + std::to_string(q.b) +
                                    ") at value " + std::to_string(p.d));
        }
    }

    // Every substituted k-NN radius must stay below the scale.
    std::vector<double> dists;
    for (std::size_t i = 0; i < n; ++i) {
        if (point_equal(sample.points[i], x)) continue;
        std::size_t x_position = 0;
        substituted_distances(sample, space, x, i, StonePlacement::InPlace, dists, x_position);
        const BallPartition part = knn_partition(dists, k);
        if (!(part.radius < scale)) {
            throw PreconditionError("stone_bound_no_ties_check: k-NN radius at index " +
                                    std::to_string(i) + " is not below the scale");
        }
    }

    Rng unused(0);  // no ties, so the policy never consumes randomness
    BoundCheck check;
    check.count = stone_count(sample, space, x, k, TieBreak::IndexOrder, unused);
    check.bound = static_cast<double>((k + 1) * (delta + 1));
    check.ok = static_cast<double>(check.count) <= check.bound;
    return check;
}

BoundCheck hl_count_check(const std::vector<Point>& points, const SpaceHandle& space,
                          const std::vector<bool>& subset_mask, const std::vector<BallSpec>& balls,
                          double alpha, std::size_t delta, double scale) {
    const std::size_t n = points.size();
    if (subset_mask.size() != n) throw DomainError("hl_count_check: mask size mismatch");
    if (balls.size() != n) throw DomainError("hl_count_check: need one ball per point");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("hl_count_check: alpha must be in (0,1]");
    for (std::size_t i = 0; i < n; ++i) {
        if (balls[i].center != i) throw DomainError("hl_count_check: ball i must be centred at point i");
        if (!(balls[i].radius < scale)) throw DomainError("hl_count_check: ball radius must be below the scale");
    }

    std::size_t m = 0;
    for (bool b : subset_mask) m += b ? 1 : 0;

    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t in_ball = 0, in_subset = 0;
        for (std::size_t j = 0; j < n; ++j) {
            const double d = distance(space, points[i], points[j]);
            const bool inside = balls[i].boundary == Boundary::Closed ? d <= balls[i].radius
                                                                      : d < balls[i].radius;
            if (inside) {
                ++in_ball;
                if (subset_mask[j]) ++in_subset;
            }
        }
        // #(B_i cap subset) >= alpha * #(B_i cap sample), exactly.
        if (static_cast<f128>(in_subset) >= static_cast<f128>(alpha) * static_cast<f128>(in_ball)) {
            ++count;
        }
    }

    BoundCheck check;
    check.count = count;
    check.bound = static_cast<double>(delta + 1) * static_cast<double>(m) / alpha;
    check.ok = static_cast<f128>(alpha) * static_cast<f128>(count) <=
               static_cast<f128>(delta + 1) * static_cast<f128>(m);
    return check;
}

bool merge_fraction_bound(double t1, double t2, double a1, double a2, double alpha) {
    // All inequalities in the statement are closed, so inputs are accepted
    // within a closure tolerance: a double tuple within kEdge of a
    // premise-satisfying real tuple counts as satisfying, and the conclusion
    // is granted the same slack.  Arithmetic itself is extended-precision.
    constexpr f128 kEdge = 1e-9;
    if (!(t1 >= -1e-9 && t1 <= 1.0 + 1e-9) || !(t2 >= -1e-9 && t2 <= 1.0 + 1e-9)) {
        throw PreconditionError("merge_fraction_bound: t1, t2 must lie in [0,1]");
    }
    if (!(a1 >= -1e-9 && a2 >= -1e-9 && alpha >= -1e-9)) {
        throw PreconditionError("merge_fraction_bound: fractions must be nonnegative");
    }
    const f128 T1 = t1, T2 = t2, A1 = a1, A2 = a2, AL = alpha;
    if (T1 + T2 > f128(1) + kEdge) throw PreconditionError("merge_fraction_bound: t2 must be <= 1 - t1");
    if (A1 > AL + kEdge) throw PreconditionError("merge_fraction_bound: a1 must be <= alpha");
    if (T1 * A1 + (f128(1) - T1) * A2 > AL + kEdge) {
        throw PreconditionError("merge_fraction_bound: t1*a1 + (1-t1)*a2 must be <= alpha");
    }
    if (T1 + T2 <= kEdge) return true;  // nothing merged
    return T1 * A1 + T2 * A2 <= AL * (T1 + T2) + kEdge;
}

double expected_subset_fraction_in_knn(const LabelledSample& sample, const SpaceHandle& space,
                                       const std::vector<bool>& subset_mask, const Point& x,
                                       std::size_t k, std::size_t trials, Rng& rng) {
    if (trials < 1) throw DomainError("expected_subset_fraction_in_knn: trials must be >= 1");
    if (subset_mask.size() != sample.size()) {
        throw DomainError("expected_subset_fraction_in_knn: mask size mismatch");
    }
    std::vector<double> dists;
    distances_to(sample, space, x, dists);
    const BallPartition part = knn_partition(dists, k);

    std::size_t open_subset = 0;
    for (std::size_t i : part.open) open_subset += subset_mask[i] ? 1 : 0;
    const std::size_t slots = k - part.open.size();

    double total = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        std::size_t hit = open_subset;
        for (std::size_t pi : rng.subset(part.sphere.size(), slots)) {
            hit += subset_mask[part.sphere[pi]] ? 1 : 0;
        }
        total += static_cast<double>(hit) / static_cast<double>(k);
    }
    return total / static_cast<double>(trials);
}

}  // namespace knnlab
