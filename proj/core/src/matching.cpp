#include "attmatch/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "attmatch/error.hpp"

namespace attmatch {

namespace {
constexpr std::size_t kLeafSize = 16;
}

PointSet gather_points(const CovariateTable& covariates, std::span<const std::size_t> positions) {
    PointSet set;
    set.dim = covariates.dim;
    set.data.reserve(positions.size() * covariates.dim);
    set.ids.reserve(positions.size());
    set.rows.assign(positions.begin(), positions.end());
    for (std::size_t pos : positions) {
        const auto row = covariates.row(pos);
        set.data.insert(set.data.end(), row.begin(), row.end());
        set.ids.push_back(covariates.event_ids[pos]);
    }
    return set;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double d2 = 0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double diff = a[d] - b[d];
        d2 += diff * diff;
    }
    return d2;
}

NeighborIndex::NeighborIndex(PointSet controls) : controls_(std::move(controls)) {
    if (controls_.size() == 0) throw Error("neighbor index needs a nonempty control set");
    if (controls_.dim == 0) throw Error("neighbor index needs dimension >= 1");
    order_.resize(controls_.size());
    std::iota(order_.begin(), order_.end(), 0u);
    nodes_.reserve(2 * controls_.size() / kLeafSize + 2);
    build(0, controls_.size());
}

std::uint32_t NeighborIndex::build(std::size_t begin, std::size_t end) {
    const std::uint32_t node_index = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();

    const std::size_t dim = controls_.dim;
    const std::uint32_t bbox_offset = static_cast<std::uint32_t>(bounds_.size());
    bounds_.resize(bounds_.size() + 2 * dim);
    double* lows = bounds_.data() + bbox_offset;
    double* highs = lows + dim;
    for (std::size_t d = 0; d < dim; ++d) {
        lows[d] = highs[d] = controls_.point(order_[begin])[d];
    }
    for (std::size_t i = begin + 1; i < end; ++i) {
        const auto point = controls_.point(order_[i]);
        for (std::size_t d = 0; d < dim; ++d) {
            lows[d] = std::min(lows[d], point[d]);
            highs[d] = std::max(highs[d], point[d]);
        }
    }

    Node& node = nodes_[node_index];
    node.begin = static_cast<std::uint32_t>(begin);
    node.end = static_cast<std::uint32_t>(end);
    node.bbox_offset = bbox_offset;

    if (end - begin <= kLeafSize) return node_index;

    std::size_t split_dim = 0;
    double best_extent = -1;
    for (std::size_t d = 0; d < dim; ++d) {
        const double extent = highs[d] - lows[d];
        if (extent > best_extent) {
            best_extent = extent;
            split_dim = d;
        }
    }

    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                         return controls_.point(a)[split_dim] < controls_.point(b)[split_dim];
                     });

    const std::uint32_t left = build(begin, mid);
    const std::uint32_t right = build(mid, end);
    // nodes_ may have reallocated during recursion.
    nodes_[node_index].child_left = left;
    nodes_[node_index].child_right = right;
    return node_index;
}

double NeighborIndex::min_distance2(std::uint32_t node_index, std::span<const double> query) const {
    const std::size_t dim = controls_.dim;
    const double* lows = bounds_.data() + nodes_[node_index].bbox_offset;
    const double* highs = lows + dim;
    // Same per-dimension shape and accumulation order as squared_distance, so
    // the bound is a true floating-point lower bound for every point inside.
    double d2 = 0;
    for (std::size_t d = 0; d < dim; ++d) {
        double diff = 0;
        if (query[d] < lows[d]) {
            diff = query[d] - lows[d];
        } else if (query[d] > highs[d]) {
            diff = query[d] - highs[d];
        }
        d2 += diff * diff;
    }
    return d2;
}

void NeighborIndex::search(std::uint32_t node_index, std::span<const double> query,
                           std::size_t& best_ordinal, double& best_d2, std::int64_t& best_id) const {
    const Node& node = nodes_[node_index];
    if (node.child_left == 0) {
        for (std::size_t i = node.begin; i < node.end; ++i) {
            const std::uint32_t ordinal = order_[i];
            const double d2 = squared_distance(query, controls_.point(ordinal));
            const std::int64_t id = controls_.ids[ordinal];
            if (d2 < best_d2 || (d2 == best_d2 && id < best_id)) {
                best_d2 = d2;
                best_id = id;
                best_ordinal = ordinal;
            }
        }
        return;
    }

    const std::uint32_t children[2] = {node.child_left, node.child_right};
    const double d_left = min_distance2(node.child_left, query);
    const double d_right = min_distance2(node.child_right, query);
    const int near = d_left <= d_right ? 0 : 1;
    const double near_d2 = near == 0 ? d_left : d_right;
    const double far_d2 = near == 0 ? d_right : d_left;

    // Strictly-greater pruning: a subtree whose bound equals the best distance
    // may still hold an equidistant point with a lower id.
    if (near_d2 <= best_d2) search(children[near], query, best_ordinal, best_d2, best_id);
    if (far_d2 <= best_d2) search(children[1 - near], query, best_ordinal, best_d2, best_id);
}

NeighborIndex::Hit NeighborIndex::nearest(std::span<const double> query) const {
    if (query.size() != controls_.dim) {
        throw Error("query dimension " + std::to_string(query.size()) + " does not match index dimension " +
                    std::to_string(controls_.dim));
    }
    std::size_t best_ordinal = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    std::int64_t best_id = std::numeric_limits<std::int64_t>::max();
    search(0, query, best_ordinal, best_d2, best_id);
    return {best_ordinal, controls_.ids[best_ordinal], std::sqrt(best_d2)};
}

MatchResult match_treated(const NeighborIndex& index, const PointSet& treated, std::size_t n_threads) {
    if (treated.size() == 0) throw Error("match_treated: empty treated set");
    if (treated.dim != index.dimension()) {
        throw Error("treated dimension " + std::to_string(treated.dim) +
                    " does not match index dimension " + std::to_string(index.dimension()));
    }

    MatchResult result;
    result.pairs.resize(treated.size());

    auto worker = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const NeighborIndex::Hit hit = index.nearest(treated.point(i));
            result.pairs[i] = {treated.ids[i], hit.id, hit.distance, i, hit.ordinal};
        }
    };

    std::size_t threads = n_threads == 0 ? std::thread::hardware_concurrency() : n_threads;
    threads = std::max<std::size_t>(1, std::min(threads, treated.size() / 1024 + 1));
    if (threads == 1) {
        worker(0, treated.size());
        return result;
    }

    std::vector<std::thread> pool;
    pool.reserve(threads);
    const std::size_t chunk = (treated.size() + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
        const std::size_t begin = t * chunk;
        const std::size_t end = std::min(treated.size(), begin + chunk);
        if (begin >= end) break;
        pool.emplace_back(worker, begin, end);
    }
    for (auto& thread : pool) thread.join();
    return result;
}

}  // namespace attmatch
