#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "llamafur/graph.hpp"
#include "llamafur/matrix.hpp"
#include "llamafur/types.hpp"

namespace llamafur {

/// Sparse link counts per ordered category pair plus category sizes: the
/// sufficient statistics for the counting estimator.
struct CategoryPairCounts {
  cat_id dim = 0;
  std::unordered_map<std::uint64_t, std::uint64_t> link_counts;
  std::vector<std::uint64_t> category_sizes;  // |D_c|

  static std::uint64_t key(cat_id c, cat_id cp) {
    return (static_cast<std::uint64_t>(c) << 32) | cp;
  }
  std::uint64_t count(cat_id c, cat_id cp) const {
    auto it = link_counts.find(key(c, cp));
    return it == link_counts.end() ? 0 : it->second;
  }
};

// For every arc (d,d') and every (c,c') in C_d × C_d', bumps the pair count.
// Cost is linear in Σ |C_d|·|C_d'| over arcs. Arcs shard across workers with
// per-worker sparse accumulators; the integer merge is order-independent.
CategoryPairCounts count_pairs(const DocumentGraph& g,
                               const CategoryAssignment& cats,
                               unsigned threads = 1);

// Unsmoothed link probability estimate for inspection; 0 when either
// category is empty.
double pair_probability(const CategoryPairCounts& counts, cat_id c, cat_id cp);

// w_{c,c'} = log((count + 1) / ((|D_c|+1) · (|D_c'|+1))), densified.
CategoryMatrix naive_matrix(const CategoryPairCounts& counts);

}  // namespace llamafur
