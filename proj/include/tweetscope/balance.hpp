#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "tweetscope/error.hpp"
#include "tweetscope/features.hpp"
#include "tweetscope/rng.hpp"

namespace tweetscope {

enum class Origin { Real, Synthetic };

inline double squared_distance(const DenseVector& a, const DenseVector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline double squared_distance(const SparseVector& a, const SparseVector& b) {
    double s = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.entries.size() || j < b.entries.size()) {
        if (j == b.entries.size() || (i < a.entries.size() && a.entries[i].index < b.entries[j].index)) {
            s += a.entries[i].weight * a.entries[i].weight;
            ++i;
        } else if (i == a.entries.size() || b.entries[j].index < a.entries[i].index) {
            s += b.entries[j].weight * b.entries[j].weight;
            ++j;
        } else {
            const double d = a.entries[i].weight - b.entries[j].weight;
            s += d * d;
            ++i;
            ++j;
        }
    }
    return s;
}

namespace detail {

// a + u (b - a), clamped to the segment's bounding box so the convex
// combination property survives rounding.
inline double lerp_clamped(double a, double b, double u) {
    return std::clamp(a + u * (b - a), std::min(a, b), std::max(a, b));
}

}  // namespace detail

inline DenseVector interpolate(const DenseVector& a, const DenseVector& b, double u) {
    DenseVector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = detail::lerp_clamped(a[i], b[i], u);
    return out;
}

/// Interpolation over the union of the two supports; indices outside it stay
/// zero, so no V-length vector is materialized.
inline SparseVector interpolate(const SparseVector& a, const SparseVector& b, double u) {
    SparseVector out;
    out.dim = a.dim;
    std::size_t i = 0, j = 0;
    auto push = [&](std::size_t idx, double w) {
        if (w != 0.0) out.entries.push_back({idx, w});
    };
    while (i < a.entries.size() || j < b.entries.size()) {
        if (j == b.entries.size() || (i < a.entries.size() && a.entries[i].index < b.entries[j].index)) {
            push(a.entries[i].index, detail::lerp_clamped(a.entries[i].weight, 0.0, u));
            ++i;
        } else if (i == a.entries.size() || b.entries[j].index < a.entries[i].index) {
            push(b.entries[j].index, detail::lerp_clamped(0.0, b.entries[j].weight, u));
            ++j;
        } else {
            push(a.entries[i].index, detail::lerp_clamped(a.entries[i].weight, b.entries[j].weight, u));
            ++i;
            ++j;
        }
    }
    return out;
}

/// Indices of the k points nearest to points[query] (Euclidean), excluding
/// the query itself; ties go to the lower index.
template <typename Point>
std::vector<std::size_t> knn_indices(std::span<const Point> points, std::size_t query, std::size_t k) {
    if (query >= points.size()) throw UsageError("knn_indices: query index out of range");
    if (k < 1 || k >= points.size()) {
        throw UsageError(fmt::format("knn_indices: k={} out of range for {} points", k, points.size()));
    }
    std::vector<std::pair<double, std::size_t>> dist;
    dist.reserve(points.size() - 1);
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (i != query) dist.emplace_back(squared_distance(points[query], points[i]), i);
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    std::vector<std::size_t> out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = dist[i].second;
    return out;
}

template <typename Point>
struct SmoteResult {
    std::vector<Point> synthetic;
    /// (base, neighbor) minority indices that generated each synthetic point.
    std::vector<std::pair<std::size_t, std::size_t>> parents;
    std::vector<std::string> warnings;
};

/// Generates target_count - |minority| synthetic points. Base points cycle
/// round-robin through the minority set; for each, a neighbor is drawn
/// uniformly from its k nearest minority neighbors and the new point is
/// placed at base + u (neighbor - base), u ~ U[0, 1). The real points are
/// never modified.
template <typename Point>
SmoteResult<Point> smote(std::span<const Point> minority, std::size_t target_count, std::size_t k,
                         std::uint64_t seed) {
    const std::size_t n = minority.size();
    if (n < 2) throw DataError(fmt::format("smote: need at least 2 minority points, got {}", n));
    if (target_count < n) {
        throw UsageError(fmt::format("smote: target_count {} below minority size {}", target_count, n));
    }
    SmoteResult<Point> result;
    if (k < 1) throw UsageError("smote: k must be positive");
    if (k > n - 1) {
        result.warnings.push_back(fmt::format("smote: k={} clamped to {} (minority size {})", k, n - 1, n));
        k = n - 1;
    }
    const std::size_t n_new = target_count - n;
    if (n_new == 0) return result;

    std::vector<std::vector<std::size_t>> neighbors(std::min(n, n_new));
    for (std::size_t i = 0; i < neighbors.size(); ++i) neighbors[i] = knn_indices(minority, i, k);

    Xoshiro256 rng(seed);
    result.synthetic.reserve(n_new);
    result.parents.reserve(n_new);
    for (std::size_t s = 0; s < n_new; ++s) {
        const std::size_t base = s % n;
        const std::size_t nn = neighbors[base][rng.bounded(k)];
        const double u = rng.uniform();
        result.synthetic.push_back(interpolate(minority[base], minority[nn], u));
        result.parents.emplace_back(base, nn);
    }
    return result;
}

template <typename Point>
std::vector<std::size_t> knn_indices(const std::vector<Point>& points, std::size_t query, std::size_t k) {
    return knn_indices(std::span<const Point>(points), query, k);
}

template <typename Point>
SmoteResult<Point> smote(const std::vector<Point>& minority, std::size_t target_count, std::size_t k,
                         std::uint64_t seed) {
    return smote(std::span<const Point>(minority), target_count, k, seed);
}

}  // namespace tweetscope
