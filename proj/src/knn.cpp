#include "knnlab/knn.hpp"

#include <algorithm>
#include <cmath>

#include "knnlab/errors.hpp"

namespace knnlab {

void distances_to(const LabelledSample& sample, const SpaceHandle& space, const Point& x,
                  std::vector<double>& out) {
    out.resize(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) out[i] = distance(space, sample.points[i], x);
}

namespace {

void check_k(std::size_t k, std::size_t n) {
    if (n == 0) throw DomainError("knn: empty sample");
    if (k < 1 || k > n) throw DomainError("knn: k must satisfy 1 <= k <= n");
}

double kth_smallest(std::span<const double> dists, std::size_t k) {
    std::vector<double> scratch(dists.begin(), dists.end());
    std::nth_element(scratch.begin(), scratch.begin() + (k - 1), scratch.end());
    return scratch[k - 1];
}

}  // namespace

BallPartition knn_partition(std::span<const double> dists, std::size_t k) {
    check_k(k, dists.size());
    BallPartition part;
    part.radius = kth_smallest(dists, k);
    for (std::size_t i = 0; i < dists.size(); ++i) {
        if (dists[i] < part.radius) {
            part.open.push_back(i);
        } else if (dists[i] == part.radius) {
            part.sphere.push_back(i);
        }
    }
    return part;
}

NeighbourSelection select_from_partition(const BallPartition& part, std::size_t k, TieBreak policy,
                                         Rng& rng) {
    if (part.open.size() >= k || part.open.size() + part.sphere.size() < k) {
        throw DomainError("knn: partition inconsistent with k");
    }
    NeighbourSelection sel;
    sel.radius = part.radius;
    sel.open_ball_count = part.open.size();
    sel.sphere_tie_count = part.sphere.size();
    sel.indices = part.open;
    const std::size_t slots = k - part.open.size();
    if (policy == TieBreak::IndexOrder) {
        // The scan built the sphere in ascending index order.
        sel.indices.insert(sel.indices.end(), part.sphere.begin(), part.sphere.begin() + slots);
    } else {
        for (std::size_t pi : rng.subset(part.sphere.size(), slots)) {
            sel.indices.push_back(part.sphere[pi]);
        }
    }
    std::sort(sel.indices.begin(), sel.indices.end());
    return sel;
}

double knn_radius(const LabelledSample& sample, const SpaceHandle& space, const Point& x,
                  std::size_t k) {
    check_k(k, sample.size());
    std::vector<double> dists;
    distances_to(sample, space, x, dists);
    return kth_smallest(dists, k);
}

NeighbourSelection knn_select(const LabelledSample& sample, const SpaceHandle& space, const Point& x,
                              std::size_t k, TieBreak policy, Rng& rng) {
    check_k(k, sample.size());
    std::vector<double> dists;
    distances_to(sample, space, x, dists);
    return select_from_partition(knn_partition(dists, k), k, policy, rng);
}

double empirical_regression(const LabelledSample& sample, const SpaceHandle& space, const Point& x,
                            std::size_t k, TieBreak policy, Rng& rng) {
    const NeighbourSelection sel = knn_select(sample, space, x, k, policy, rng);
    double sum = 0.0;
    for (std::size_t i : sel.indices) sum += sample.labels[i];
    return sum / static_cast<double>(k);
}

int classify(const LabelledSample& sample, const SpaceHandle& space, const Point& x, std::size_t k,
             TieBreak policy, Rng& rng) {
    return classify_from_eta(empirical_regression(sample, space, x, k, policy, rng));
}

std::size_t KRule::k_for(std::size_t n) const {
    if (n == 0) throw DomainError("k rule: empty sample size");
    std::size_t k;
    switch (kind) {
        case Kind::Sqrt:
            k = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
            break;
        case Kind::Power:
            k = static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(n), exponent)));
            break;
        case Kind::Fixed:
            k = fixed_k;
            break;
        default:
            k = 1;
    }
    return std::clamp<std::size_t>(k, 1, n);
}

std::vector<CoverHartRow> cover_hart_curve(const SpaceHandle& space, const KRule& k_rule,
                                           const std::vector<std::size_t>& ns,
                                           const std::vector<Point>& test_points, Rng& rng) {
    std::vector<CoverHartRow> rows;
    rows.reserve(ns.size());
    std::vector<double> dists;
    for (std::size_t n : ns) {
        LabelledSample sample;
        sample.points.reserve(n);
        sample.labels.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            LabelledDraw draw = knnlab::sample(space, rng);
            sample.points.push_back(std::move(draw.point));
            sample.labels.push_back(draw.label);
        }
        const std::size_t k = k_rule.k_for(n);
        double max_radius = 0.0;
        for (const Point& x : test_points) {
            max_radius = std::max(max_radius, knn_radius(sample, space, x, k));
        }
        rows.push_back(CoverHartRow{n, max_radius});
    }
    return rows;
}

}  // namespace knnlab
