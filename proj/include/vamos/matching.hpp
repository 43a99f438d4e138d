#pragma once

#include <utility>
#include <vector>

#include "vamos/types.hpp"

namespace vamos {

struct Matching {
    std::vector<std::pair<int, int>> pairs;  // (i, j) with i < j, sorted by i
    double weight = 0.0;
};

/// Sum of the matrix entries selected by `pairs`.
double matching_weight(const RMatrix& w, const std::vector<std::pair<int, int>>& pairs);

/// Exact minimum-weight perfect matching by subset dynamic programming.
/// Ties resolve to the lexicographically smallest pair list. n <= 24.
Matching min_weight_matching_dp(const RMatrix& w);

/// Exact minimum-weight perfect matching via the weighted blossom method
/// (maximum-weight maximum-cardinality matching on transformed weights).
/// Weights are quantised to integers with relative resolution ~1e-12.
Matching min_weight_matching_blossom(const RMatrix& w);

/// Minimum-weight perfect matching of a symmetric cost matrix with an even
/// number of rows. +inf entries mark forbidden pairs; they take part as a
/// large sentinel so a perfect matching always exists when any finite one
/// does. Subset DP up to `dp_limit` vertices, blossom beyond.
/// Throws InfeasibleError when the optimum needs a forbidden pair.
Matching min_weight_perfect_matching(const RMatrix& w, int dp_limit = 12);

/// Maximum-weight matching on an explicit edge list (integer weights).
/// Returns mate[v] or -1. `max_cardinality` restricts to maximum
/// cardinality matchings.
struct WeightedEdge {
    int i = 0;
    int j = 0;
    long long w = 0;
};
std::vector<int> max_weight_matching(int n_vertices, const std::vector<WeightedEdge>& edges,
                                     bool max_cardinality);

}  // namespace vamos
