#include "llamafur/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "llamafur/parallel.hpp"

namespace llamafur {

double score_pair(const CategoryMatrix& w, const CategoryAssignment& cats,
                  node_id d, node_id dp) {
  const auto rows = cats.set_of(d);
  const auto cols = cats.set_of(dp);
  if (rows.empty() || cols.empty()) return 0.0;
  return w.block_sum(rows, cols);
}

ExplainabilityPartition partition_links(const DocumentGraph& g,
                                        const CategoryMatrix& w,
                                        const CategoryAssignment& cats,
                                        unsigned threads) {
  if (cats.num_nodes() < g.num_nodes())
    throw std::invalid_argument(
        "category assignment covers fewer nodes than the graph");
  const std::uint64_t m = g.num_arcs();
  std::vector<double> scores(m);
  parallel_chunks(m, threads,
                  [&](unsigned, std::uint64_t begin, std::uint64_t end) {
                    for (std::uint64_t k = begin; k < end; ++k) {
                      auto [s, t] = g.arc_at(k);
                      scores[k] = score_pair(w, cats, s, t);
                    }
                  });

  ExplainabilityPartition part;
  for (std::uint64_t k = 0; k < m; ++k) {
    auto [s, t] = g.arc_at(k);
    LinkScore ls{s, t, scores[k]};
    (scores[k] > 0.0 ? part.explainable : part.unexplainable).push_back(ls);
  }
  return part;
}

std::vector<LinkScore> rank_links(const DocumentGraph& g,
                                  const CategoryMatrix& w,
                                  const CategoryAssignment& cats,
                                  node_id query) {
  std::vector<LinkScore> out;
  out.reserve(g.out_degree(query));
  for (node_id t : g.neighbors(query))
    out.push_back({query, t, score_pair(w, cats, query, t)});
  std::stable_sort(out.begin(), out.end(),
                   [](const LinkScore& a, const LinkScore& b) {
                     if (a.score != b.score) return a.score < b.score;
                     return a.target < b.target;
                   });
  return out;
}

std::vector<LinkScore> top_pool(const DocumentGraph& g, const CategoryMatrix& w,
                                const CategoryAssignment& cats, node_id query,
                                double alpha) {
  if (!(alpha > 0.0) || alpha > 1.0)
    throw std::invalid_argument("alpha must be in (0, 1]");
  auto ranked = rank_links(g, w, cats, query);
  const std::size_t keep = static_cast<std::size_t>(
      std::floor(alpha * static_cast<double>(ranked.size())));
  ranked.resize(keep);
  return ranked;
}

std::vector<CategoryArc> category_neighborhood(
    const CategoryMatrix& w, cat_id c, std::size_t k, double threshold,
    NeighborhoodDirection direction) {
  if (c >= w.dim()) throw std::out_of_range("category id out of range");
  std::vector<CategoryArc> arcs;
  arcs.reserve(w.dim());
  for (cat_id other = 0; other < w.dim(); ++other) {
    if (other == c) continue;
    const double weight = direction == NeighborhoodDirection::outgoing
                              ? w.at(c, other)
                              : w.at(other, c);
    if (weight > threshold) arcs.push_back({c, other, weight});
  }
  std::sort(arcs.begin(), arcs.end(), [](const CategoryArc& a,
                                         const CategoryArc& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.to < b.to;
  });
  if (arcs.size() > k) arcs.resize(k);
  return arcs;
}

}  // namespace llamafur
