#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "llamafur/graph.hpp"
#include "llamafur/matrix.hpp"
#include "llamafur/types.hpp"

namespace llamafur {

/// Plant-and-recover model: categories are sampled per node, an arc exists
/// iff its score under the planted matrix is positive, then candidate pairs
/// are flipped against the model with probability noise_rate. Flipped-in
/// arcs are the ground-truth unexpected links.
struct PlantedModel {
  node_id num_nodes = 0;
  cat_id num_categories = 0;
  CategoryMatrix planted_w;
  std::uint32_t categories_per_node = 4;
  double zipf_exponent = 0.0;  // 0 = uniform category popularity
  double noise_rate = 0.0;     // in [0, 1)
  // Above this many nodes generation samples candidate targets per node
  // instead of enumerating all ordered pairs.
  node_id exact_enumeration_limit = 10000;
  std::uint64_t sampled_candidates_per_node = 2000;
};

struct SynthInstance {
  DocumentGraph graph;
  CategoryAssignment cats;
  std::vector<std::pair<node_id, node_id>> unexpected_arcs;  // sorted
  std::uint64_t flipped_in = 0;
  std::uint64_t flipped_out = 0;
  std::uint64_t model_arcs = 0;  // arcs the planted matrix alone would place
  bool density_warning = false;  // model density above 1/2

  bool is_unexpected(node_id s, node_id t) const;
};

// Each cell is +positive_value with probability positive_fraction, else
// -negative_value.
CategoryMatrix random_planted_matrix(cat_id dim, double positive_fraction,
                                     double positive_value,
                                     double negative_value,
                                     std::uint64_t seed);

// Deterministic given (model, seed); self-pairs are never candidates.
SynthInstance generate(const PlantedModel& model, std::uint64_t seed);

struct RecoveryReport {
  double f_measure = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double accuracy = 0.0;
  std::uint64_t eval_pairs = 0;
  // bpref of ranking all arcs by increasing score, with the flipped-in arcs
  // as the relevant set.
  double unexpected_bpref = 0.0;
};

// Pair classification on a balanced sample drawn independently of the
// training stream (positives uniform over arcs, negatives uniform over
// non-arcs), plus the unexpectedness-ranking bpref against the flipped-in
// arcs.
RecoveryReport evaluate_recovery(const CategoryMatrix& trained_w,
                                 const SynthInstance& instance,
                                 const CategoryAssignment& cats,
                                 std::uint64_t seed,
                                 std::uint64_t samples_per_class = 100000);

// bpref of a seeded random permutation of the arcs against the flipped-in
// set; the null model the trained ranking must beat.
double null_ranking_bpref(const SynthInstance& instance, std::uint64_t seed);

// Unexpectedness ranking of all arcs under a matrix: ascending score, ties
// by (source, target). Returns bpref against the flipped-in arcs.
double unexpectedness_bpref(const CategoryMatrix& w,
                            const SynthInstance& instance,
                            const CategoryAssignment& cats);

void save_labels(const SynthInstance& instance, const std::string& path);
std::vector<std::pair<node_id, node_id>> load_labels(const std::string& path);

}  // namespace llamafur
