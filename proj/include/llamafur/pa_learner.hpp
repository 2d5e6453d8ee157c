#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <vector>

#include "llamafur/graph.hpp"
#include "llamafur/matrix.hpp"
#include "llamafur/types.hpp"

namespace llamafur {

struct TrainerConfig {
  double aggressiveness = 1.0;  // K: cap on the per-example step size
  std::uint64_t seed = 1;       // drives negative sampling and fold assignment
  std::uint32_t passes = 1;     // repeated passes reuse the same negatives
};

struct TrainReport {
  std::uint64_t examples_seen = 0;
  std::uint64_t updates_applied = 0;  // examples whose delta was nonzero
  std::uint64_t skipped_empty_category = 0;
  std::uint64_t negative_shortfall = 0;  // negatives that could not be drawn
  std::uint64_t self_loops_skipped = 0;
  // Online sign accuracy: prediction made before each update, over the
  // examples that were actually scored.
  double final_accuracy_on_sequence = 0.0;
  std::chrono::duration<double> wall_time{0};
};

/// Balanced online example stream: nodes in id order, each node's out-arcs as
/// positives followed by the same number of uniformly sampled non-arcs as
/// negatives. Self-loops never enter the stream (neither as positives nor as
/// negative draws). Deterministic given the seed; draws are keyed by
/// (seed, source id, draw index), so every pass replays the same negatives.
class ExampleSequence {
 public:
  ExampleSequence(const DocumentGraph& g, const TrainerConfig& cfg);

  std::optional<PairExample> next();

  std::uint64_t negative_shortfall() const { return shortfall_; }
  std::uint64_t self_loops_skipped() const { return self_loops_; }

 private:
  void enter_node();
  node_id draw_negative();

  const DocumentGraph& graph_;
  TrainerConfig cfg_;
  std::uint32_t pass_ = 0;
  node_id node_ = 0;
  std::size_t pos_idx_ = 0;
  std::uint64_t positives_emitted_ = 0;
  std::uint64_t negatives_left_ = 0;
  std::uint64_t valid_negatives_ = 0;
  std::uint64_t draw_counter_ = 0;
  bool in_negatives_ = false;
  std::uint64_t shortfall_ = 0;
  std::uint64_t self_loops_ = 0;
  bool done_ = false;
};

struct SequenceResult {
  std::vector<PairExample> examples;
  std::uint64_t negative_shortfall = 0;
  std::uint64_t self_loops_skipped = 0;
};

SequenceResult materialize_sequence(const DocumentGraph& g,
                                    const TrainerConfig& cfg);

/// One online step. With ρ = 1/(|C_d|·|C_d'|) and μ the current block sum,
/// the applied per-cell delta is
///     label +1:  δ = ρ · min(K, 1 − μρ)
///     label −1:  δ = −ρ · min(K, 1 + μρ)
/// clamped so a correctly separated example (loss already ≤ 0) leaves W
/// untouched. Note the cap K bounds the raw step before ρ scales it down;
/// the per-cell delta is therefore at most ρ·K, not K.
/// Returns the delta, or nullopt when either endpoint has no categories (the
/// example is skipped). `score_before` receives μ when non-null.
std::optional<double> pa_update(CategoryMatrix& w, const PairExample& ex,
                                const CategoryAssignment& cats,
                                double aggressiveness,
                                double* score_before = nullptr);

// W starts at zero and consumes the example sequence in order. Deterministic
// given (graph, cats, cfg). The update loop is inherently sequential.
std::pair<CategoryMatrix, TrainReport> train(const DocumentGraph& g,
                                             const CategoryAssignment& cats,
                                             const TrainerConfig& cfg);

struct FoldMeasures {
  std::uint64_t held_out = 0;  // scored held-out examples
  double accuracy = 0.0;
  // Absent when the fold has no positive examples (or no positive
  // predictions, for precision).
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f_measure;
};

struct MeasureStats {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
  std::uint64_t count = 0;
};

struct CrossValSummary {
  MeasureStats accuracy, precision, recall, f_measure;
};

// Partitions the balanced pair sample into folds by a seeded hash of the
// pair, trains on the out-of-fold examples in sequence order, and classifies
// held-out pairs by the sign of their score (> 0 predicts a link).
// Folds may run concurrently; each owns its matrix.
std::vector<FoldMeasures> cross_validate(const DocumentGraph& g,
                                         const CategoryAssignment& cats,
                                         const TrainerConfig& cfg,
                                         std::uint32_t folds,
                                         unsigned threads = 1);

CrossValSummary summarize_folds(const std::vector<FoldMeasures>& folds);

}  // namespace llamafur
