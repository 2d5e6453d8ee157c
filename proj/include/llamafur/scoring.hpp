#pragma once

#include <cstdint>
#include <vector>

#include "llamafur/graph.hpp"
#include "llamafur/matrix.hpp"
#include "llamafur/types.hpp"

namespace llamafur {

/// Expectedness of one arc: higher means better explained by the categories.
struct LinkScore {
  node_id source = 0;
  node_id target = 0;
  double score = 0.0;

  bool operator==(const LinkScore&) const = default;
};

/// Existing links split by the strict sign rule: score > 0 is explainable,
/// score ≤ 0 is not. The two lists partition L exactly.
struct ExplainabilityPartition {
  std::vector<LinkScore> explainable;
  std::vector<LinkScore> unexplainable;

  std::uint64_t total() const {
    return explainable.size() + unexplainable.size();
  }
  double explained_ratio() const {
    return total() == 0
               ? 0.0
               : static_cast<double>(explainable.size()) / total();
  }
};

// Σ_{c∈C_d} Σ_{c'∈C_d'} w_{c,c'}; zero when either set is empty.
double score_pair(const CategoryMatrix& w, const CategoryAssignment& cats,
                  node_id d, node_id dp);

ExplainabilityPartition partition_links(const DocumentGraph& g,
                                        const CategoryMatrix& w,
                                        const CategoryAssignment& cats,
                                        unsigned threads = 1);

// Out-links of `query` sorted ascending by score — most unexpected first.
// Ties break by ascending target id.
std::vector<LinkScore> rank_links(const DocumentGraph& g,
                                  const CategoryMatrix& w,
                                  const CategoryAssignment& cats,
                                  node_id query);

// First ⌊alpha·t⌋ entries of rank_links, t = out-degree of the query.
std::vector<LinkScore> top_pool(const DocumentGraph& g, const CategoryMatrix& w,
                                const CategoryAssignment& cats, node_id query,
                                double alpha);

enum class NeighborhoodDirection { outgoing, incoming };

struct CategoryArc {
  cat_id from = 0;
  cat_id to = 0;
  double weight = 0.0;

  bool operator==(const CategoryArc&) const = default;
};

// The k strongest neighbors of category c (excluding c itself) with weight
// strictly above the threshold, in descending weight order (ties to the
// smaller id). Outgoing uses row weights w_{c,·}; incoming uses column
// weights w_{·,c}.
std::vector<CategoryArc> category_neighborhood(
    const CategoryMatrix& w, cat_id c, std::size_t k, double threshold,
    NeighborhoodDirection direction = NeighborhoodDirection::outgoing);

}  // namespace llamafur
