#include "llamafur/naive_learner.hpp"

#include <cmath>
#include <stdexcept>

#include "llamafur/parallel.hpp"

namespace llamafur {

CategoryPairCounts count_pairs(const DocumentGraph& g,
                               const CategoryAssignment& cats,
                               unsigned threads) {
  if (cats.num_nodes() < g.num_nodes())
    throw std::invalid_argument(
        "category assignment covers fewer nodes than the graph");
  CategoryPairCounts counts;
  counts.dim = cats.num_categories();
  counts.category_sizes.assign(counts.dim, 0);
  for (node_id d = 0; d < cats.num_nodes(); ++d)
    for (cat_id c : cats.set_of(d)) ++counts.category_sizes[c];

  const unsigned workers = threads <= 1 ? 1 : threads;
  std::vector<std::unordered_map<std::uint64_t, std::uint64_t>> partial(
      workers);
  parallel_chunks(g.num_nodes(), workers,
                  [&](unsigned worker, std::uint64_t begin, std::uint64_t end) {
                    auto& local = partial[worker];
                    for (std::uint64_t d = begin; d < end; ++d) {
                      const auto from =
                          cats.set_of(static_cast<node_id>(d));
                      if (from.empty()) continue;
                      for (node_id dp : g.neighbors(static_cast<node_id>(d)))
                        for (cat_id c : from)
                          for (cat_id cp : cats.set_of(dp))
                            ++local[CategoryPairCounts::key(c, cp)];
                    }
                  });
  for (auto& local : partial)
    for (const auto& [key, count] : local) counts.link_counts[key] += count;
  return counts;
}

double pair_probability(const CategoryPairCounts& counts, cat_id c,
                        cat_id cp) {
  const std::uint64_t denom =
      counts.category_sizes.at(c) * counts.category_sizes.at(cp);
  if (denom == 0) return 0.0;
  return static_cast<double>(counts.count(c, cp)) / static_cast<double>(denom);
}

CategoryMatrix naive_matrix(const CategoryPairCounts& counts) {
  CategoryMatrix w(counts.dim);
  // Default cell: zero links observed.
  for (cat_id c = 0; c < counts.dim; ++c) {
    const double dc = static_cast<double>(counts.category_sizes[c]) + 1.0;
    for (cat_id cp = 0; cp < counts.dim; ++cp) {
      const double dcp = static_cast<double>(counts.category_sizes[cp]) + 1.0;
      w.at(c, cp) = std::log(1.0 / (dc * dcp));
    }
  }
  for (const auto& [key, count] : counts.link_counts) {
    const cat_id c = static_cast<cat_id>(key >> 32);
    const cat_id cp = static_cast<cat_id>(key & 0xFFFFFFFFu);
    const double dc = static_cast<double>(counts.category_sizes[c]) + 1.0;
    const double dcp = static_cast<double>(counts.category_sizes[cp]) + 1.0;
    w.at(c, cp) = std::log((static_cast<double>(count) + 1.0) / (dc * dcp));
  }
  return w;
}

}  // namespace llamafur
