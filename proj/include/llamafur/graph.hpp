#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "llamafur/types.hpp"

namespace llamafur {

/// Immutable directed graph over dense node ids. Adjacency is compressed
/// sparse rows with per-node target lists sorted strictly ascending, so there
/// are no parallel arcs; self-loops are allowed. Safe for concurrent reads.
class DocumentGraph {
 public:
  DocumentGraph() = default;

  // Sorts and deduplicates; throws std::out_of_range on ids >= num_nodes.
  static DocumentGraph from_arcs(node_id num_nodes,
                                 std::vector<std::pair<node_id, node_id>> arcs);

  node_id num_nodes() const {
    return static_cast<node_id>(offsets_.size() - 1);
  }
  std::uint64_t num_arcs() const { return targets_.size(); }

  std::uint64_t out_degree(node_id s) const;
  std::span<const node_id> neighbors(node_id s) const;

  // Membership by binary search over the sorted target list.
  bool has_arc(node_id s, node_id t) const;

  // Index of the k-th arc in global adjacency order, as (source, target).
  std::pair<node_id, node_id> arc_at(std::uint64_t k) const;

  DocumentGraph symmetric_view() const;  // arc set L ∪ Lᵀ
  DocumentGraph transpose() const;

  bool operator==(const DocumentGraph&) const = default;

 private:
  void check_node(node_id v) const;

  std::vector<std::uint64_t> offsets_ = {0};
  std::vector<node_id> targets_;
};

enum class GraphFormat { edge_list, packed_binary };

DocumentGraph load_graph(const std::string& path, GraphFormat format);
// Sniffs the packed-binary magic, falls back to edge-list text.
DocumentGraph load_graph(const std::string& path);
void save_graph(const DocumentGraph& g, const std::string& path,
                GraphFormat format);

/// Per-node sorted, duplicate-free category sets over a fixed universe.
/// Nodes may have empty sets. Immutable once loaded; concurrent reads are fine.
class CategoryAssignment {
 public:
  CategoryAssignment() = default;
  CategoryAssignment(cat_id num_categories, node_id num_nodes)
      : num_categories_(num_categories), sets_(num_nodes) {}

  cat_id num_categories() const { return num_categories_; }
  node_id num_nodes() const { return static_cast<node_id>(sets_.size()); }

  std::span<const cat_id> set_of(node_id d) const;

  // Sorts, deduplicates, and range-checks against the universe.
  void assign(node_id d, std::vector<cat_id> cats);
  // Grows with empty sets; never shrinks.
  void ensure_num_nodes(node_id n);

  bool operator==(const CategoryAssignment&) const = default;

 private:
  cat_id num_categories_ = 0;
  std::vector<std::vector<cat_id>> sets_;
};

// Records are "node-id TAB cat,cat,..."; unlisted nodes get empty sets.
// num_categories == 0 means infer the universe as max id + 1.
CategoryAssignment load_categories(const std::string& path,
                                   cat_id num_categories,
                                   node_id min_nodes = 0);
void save_categories(const CategoryAssignment& cats, const std::string& path);

/// One training example: an ordered node pair labeled +1 iff the arc exists
/// in the graph it was drawn from.
struct PairExample {
  node_id source = 0;
  node_id target = 0;
  int label = 0;  // +1 or -1

  bool operator==(const PairExample&) const = default;
};

}  // namespace llamafur
