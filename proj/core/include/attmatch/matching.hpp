#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "attmatch/profiles.hpp"

namespace attmatch {

/// A flat set of points with per-point ids, the common currency of the
/// matching layer. `rows` optionally keeps the originating table positions.
struct PointSet {
    std::vector<double> data;  // n x dim, row major
    std::size_t dim = 0;
    std::vector<std::int64_t> ids;
    std::vector<std::size_t> rows;

    std::size_t size() const { return ids.size(); }
    std::span<const double> point(std::size_t i) const { return {data.data() + i * dim, dim}; }
};

/// Gathers the covariate rows at `positions` into a PointSet.
PointSet gather_points(const CovariateTable& covariates, std::span<const std::size_t> positions);

/// Squared Euclidean distance accumulated in ascending dimension order; the
/// single distance definition shared by the index, the matcher and the
/// balance diagnostic so results are reproducible bit for bit.
double squared_distance(std::span<const double> a, std::span<const double> b);

/// Exact nearest-neighbor index over a control point set (k-d tree).
///
/// Exactness is a contract: for any query the reported neighbor has minimal
/// Euclidean distance, and among equidistant controls the one with the lowest
/// id wins, exactly as a linear scan with the same rule would decide. The
/// subtree pruning bound is accumulated in the same dimension order as the
/// distance itself, which guarantees the bound never exceeds the distance of
/// any contained point even in floating-point arithmetic.
class NeighborIndex {
public:
    explicit NeighborIndex(PointSet controls);

    struct Hit {
        std::size_t ordinal = 0;  // position in the control PointSet
        std::int64_t id = 0;
        double distance = 0;  // Euclidean, not squared
    };

    Hit nearest(std::span<const double> query) const;

    std::size_t size() const { return controls_.size(); }
    std::size_t dimension() const { return controls_.dim; }
    const PointSet& controls() const { return controls_; }

private:
    struct Node {
        // Leaf when child_left == 0 (the root is never a leaf's child).
        std::uint32_t child_left = 0;
        std::uint32_t child_right = 0;
        std::uint32_t begin = 0;
        std::uint32_t end = 0;
        std::uint32_t bbox_offset = 0;
    };

    std::uint32_t build(std::size_t begin, std::size_t end);
    void search(std::uint32_t node_index, std::span<const double> query, std::size_t& best_ordinal,
                double& best_d2, std::int64_t& best_id) const;
    double min_distance2(std::uint32_t node_index, std::span<const double> query) const;

    PointSet controls_;
    std::vector<std::uint32_t> order_;  // permutation of control ordinals
    std::vector<Node> nodes_;
    std::vector<double> bounds_;  // per node: dim lows then dim highs
};

struct MatchPair {
    std::int64_t treated_id = 0;
    std::int64_t control_id = 0;
    double distance = 0;
    std::size_t treated_ordinal = 0;  // position in the treated PointSet
    std::size_t control_ordinal = 0;  // position in the control PointSet
};

/// Treated unit -> matched control unit mapping, one pair per treated unit in
/// treated input order. Matching is with replacement.
struct MatchResult {
    std::vector<MatchPair> pairs;
    bool with_replacement = true;
};

/// Matches every treated point to its exact nearest control. Queries are
/// independent, so they are spread over `n_threads` workers (0 = hardware
/// default) with results written by position; the output is identical for
/// every thread count.
MatchResult match_treated(const NeighborIndex& index, const PointSet& treated,
                          std::size_t n_threads = 0);

}  // namespace attmatch
