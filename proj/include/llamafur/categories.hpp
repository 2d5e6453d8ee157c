#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "llamafur/graph.hpp"
#include "llamafur/types.hpp"

namespace llamafur {

/// The raw, editor-built category hierarchy: a directed child→parent graph
/// that need not be acyclic, connected, or a tree. Kept with its reverse and
/// undirected views since cleansing traverses all three.
class CategoryHierarchy {
 public:
  CategoryHierarchy() = default;
  explicit CategoryHierarchy(DocumentGraph parent_arcs);

  cat_id num_raw_categories() const { return parent_arcs_.num_nodes(); }
  const DocumentGraph& parent_arcs() const { return parent_arcs_; }
  const DocumentGraph& child_arcs() const { return child_arcs_; }
  const DocumentGraph& undirected() const { return undirected_; }

 private:
  DocumentGraph parent_arcs_;  // child -> parent
  DocumentGraph child_arcs_;   // reverse view
  DocumentGraph undirected_;   // symmetric view
};

// Edge-list text, "child parent" per line.
CategoryHierarchy load_hierarchy(const std::string& path);

enum class CentralityDirection {
  undirected,  // distances over the symmetric view (the cleansing default)
  incoming,    // H(x) sums 1/dist(y→x) along parent arcs
  outgoing,    // H(x) sums 1/dist(x→y) along parent arcs
};

// Exact harmonic centrality H(x) = Σ_{y≠x} 1/dist(y,x), unreachable pairs
// contribute zero. One BFS per node; at very large scale plug a sampled set
// of sources via the `sources` overload instead.
std::vector<double> harmonic_centrality(
    const CategoryHierarchy& h,
    CentralityDirection direction = CentralityDirection::undirected,
    unsigned threads = 1);

// Sampled-source estimator: sums only over the given (distinct) sources and
// scales by n/|sources|. With all sources this equals the exact measure.
std::vector<double> harmonic_centrality_sampled(
    const CategoryHierarchy& h, std::span<const cat_id> sources,
    CentralityDirection direction = CentralityDirection::undirected,
    unsigned threads = 1);

// Ids of the k largest scores; ties broken by smaller id. Sorted ascending.
std::vector<cat_id> select_milestones(std::span<const double> scores,
                                      std::size_t k);

/// ι(−): maps every raw category to its nearest milestone (undirected hop
/// distance, ties to the smaller milestone id); categories that reach no
/// milestone stay unmapped and are discarded on remap.
struct MilestoneMap {
  std::vector<cat_id> milestones;       // sorted raw ids; position = index
  std::vector<std::int32_t> remap;      // raw id -> milestone index, -1 unmapped
  std::vector<std::uint32_t> distances; // hops to the milestone, ~0u unmapped

  std::uint32_t num_milestones() const;
  bool operator==(const MilestoneMap&) const = default;
};

MilestoneMap build_remap(const CategoryHierarchy& h,
                         std::span<const cat_id> milestones);

// New sets are the milestone indexes of each surviving category, deduplicated;
// the new universe has num_milestones categories.
CategoryAssignment apply_remap(const CategoryAssignment& assign,
                               const MilestoneMap& map);

// TSV "raw-id TAB milestone-index", mapped categories only. The file does not
// identify which raw id each milestone is, so a loaded map carries remap and
// universe size but an empty `milestones` list.
void save_milestone_map(const MilestoneMap& map, const std::string& path);
MilestoneMap load_milestone_map(const std::string& path);

}  // namespace llamafur
