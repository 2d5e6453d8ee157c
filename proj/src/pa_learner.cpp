#include "llamafur/pa_learner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "llamafur/parallel.hpp"
#include "llamafur/rng.hpp"

namespace llamafur {

namespace {

// Number of legal negative targets for d: everything except d itself and
// its (non-self) out-neighbors.
std::uint64_t valid_negative_targets(const DocumentGraph& g, node_id d) {
  const auto nbrs = g.neighbors(d);
  const bool self = std::binary_search(nbrs.begin(), nbrs.end(), d);
  const std::uint64_t excluded = nbrs.size() + (self ? 0 : 1);
  return g.num_nodes() - excluded;
}

// The j-th element of [0, n) \ ({d} ∪ neighbors(d)), with the excluded set
// walked in sorted order.
node_id select_non_neighbor(const DocumentGraph& g, node_id d,
                            std::uint64_t j) {
  const auto nbrs = g.neighbors(d);
  std::uint64_t cursor = 0;
  std::size_t i = 0;
  bool self_pending = true;
  while (true) {
    std::uint64_t next_excluded;
    bool have = false;
    if (i < nbrs.size() && (!self_pending || nbrs[i] <= d)) {
      next_excluded = nbrs[i];
      have = true;
      if (nbrs[i] == d) self_pending = false;
      ++i;
    } else if (self_pending) {
      next_excluded = d;
      self_pending = false;
      have = true;
    }
    if (!have) break;
    const std::uint64_t gap = next_excluded - cursor;
    if (j < gap) return static_cast<node_id>(cursor + j);
    j -= gap;
    cursor = next_excluded + 1;
  }
  return static_cast<node_id>(cursor + j);
}

}  // namespace

ExampleSequence::ExampleSequence(const DocumentGraph& g,
                                 const TrainerConfig& cfg)
    : graph_(g), cfg_(cfg) {
  if (cfg.passes < 1) throw std::invalid_argument("passes must be >= 1");
  if (!(cfg.aggressiveness > 0.0))
    throw std::invalid_argument("aggressiveness must be positive");
  done_ = g.num_nodes() == 0 || cfg.passes == 0;
  if (!done_) enter_node();
}

void ExampleSequence::enter_node() {
  pos_idx_ = 0;
  positives_emitted_ = 0;
  negatives_left_ = 0;
  draw_counter_ = 0;
  in_negatives_ = false;
  valid_negatives_ = valid_negative_targets(graph_, node_);
}

node_id ExampleSequence::draw_negative() {
  const std::uint64_t n = graph_.num_nodes();
  for (int attempt = 0; attempt < 64; ++attempt) {
    node_id r = static_cast<node_id>(rng::bounded(
        rng::mix(cfg_.seed, rng::kNegativeSample, node_, draw_counter_++), n));
    if (r != node_ && !graph_.has_arc(node_, r)) return r;
  }
  // Dense adjacency row: rank-select uniformly over the complement instead
  // of rejecting forever.
  std::uint64_t j = rng::bounded(
      rng::mix(cfg_.seed, rng::kNegativeSample, node_, draw_counter_++),
      valid_negatives_);
  return select_non_neighbor(graph_, node_, j);
}

std::optional<PairExample> ExampleSequence::next() {
  while (!done_) {
    if (!in_negatives_) {
      const auto nbrs = graph_.neighbors(node_);
      while (pos_idx_ < nbrs.size()) {
        node_id t = nbrs[pos_idx_++];
        if (t == node_) {
          if (pass_ == 0) ++self_loops_;
          continue;
        }
        ++positives_emitted_;
        return PairExample{node_, t, +1};
      }
      in_negatives_ = true;
      negatives_left_ = positives_emitted_;
      if (valid_negatives_ == 0) {
        shortfall_ += negatives_left_;
        negatives_left_ = 0;
      }
    }
    if (negatives_left_ > 0) {
      --negatives_left_;
      return PairExample{node_, draw_negative(), -1};
    }
    // Node exhausted; move on.
    if (node_ + 1 < graph_.num_nodes()) {
      ++node_;
    } else {
      ++pass_;
      if (pass_ >= cfg_.passes) {
        done_ = true;
        break;
      }
      node_ = 0;
    }
    enter_node();
  }
  return std::nullopt;
}

SequenceResult materialize_sequence(const DocumentGraph& g,
                                    const TrainerConfig& cfg) {
  SequenceResult out;
  ExampleSequence seq(g, cfg);
  while (auto ex = seq.next()) out.examples.push_back(*ex);
  out.negative_shortfall = seq.negative_shortfall();
  out.self_loops_skipped = seq.self_loops_skipped();
  return out;
}

std::optional<double> pa_update(CategoryMatrix& w, const PairExample& ex,
                                const CategoryAssignment& cats,
                                double aggressiveness, double* score_before) {
  const auto rows = cats.set_of(ex.source);
  const auto cols = cats.set_of(ex.target);
  if (rows.empty() || cols.empty()) return std::nullopt;

  const double rho =
      1.0 / (static_cast<double>(rows.size()) * static_cast<double>(cols.size()));
  const double mu = w.block_sum(rows, cols);
  if (score_before) *score_before = mu;

  // Hinge-zero branch: a confidently correct example must stay passive.
  const double loss =
      ex.label > 0 ? 1.0 - mu * rho : 1.0 + mu * rho;
  double delta = 0.0;
  if (loss > 0.0) {
    delta = rho * std::min(aggressiveness, loss);
    if (ex.label < 0) delta = -delta;
  }
  if (delta != 0.0) w.add_to_block(rows, cols, delta);
  return delta;
}

std::pair<CategoryMatrix, TrainReport> train(const DocumentGraph& g,
                                             const CategoryAssignment& cats,
                                             const TrainerConfig& cfg) {
  if (cats.num_nodes() < g.num_nodes())
    throw std::invalid_argument(
        "category assignment covers fewer nodes than the graph");
  const auto start = std::chrono::steady_clock::now();

  CategoryMatrix w(cats.num_categories());
  TrainReport report;
  std::uint64_t correct = 0;

  ExampleSequence seq(g, cfg);
  while (auto ex = seq.next()) {
    ++report.examples_seen;
    double mu = 0.0;
    auto delta = pa_update(w, *ex, cats, cfg.aggressiveness, &mu);
    if (!delta) {
      ++report.skipped_empty_category;
      continue;
    }
    const int predicted = mu > 0.0 ? +1 : -1;
    if (predicted == ex->label) ++correct;
    if (*delta != 0.0) ++report.updates_applied;
  }
  report.negative_shortfall = seq.negative_shortfall();
  report.self_loops_skipped = seq.self_loops_skipped();
  const std::uint64_t scored =
      report.examples_seen - report.skipped_empty_category;
  report.final_accuracy_on_sequence =
      scored == 0 ? 0.0 : static_cast<double>(correct) / scored;
  report.wall_time = std::chrono::steady_clock::now() - start;
  return {std::move(w), report};
}

std::vector<FoldMeasures> cross_validate(const DocumentGraph& g,
                                         const CategoryAssignment& cats,
                                         const TrainerConfig& cfg,
                                         std::uint32_t folds,
                                         unsigned threads) {
  if (folds < 2) throw std::invalid_argument("folds must be >= 2");
  if (cats.num_nodes() < g.num_nodes())
    throw std::invalid_argument(
        "category assignment covers fewer nodes than the graph");

  TrainerConfig single_pass = cfg;
  single_pass.passes = 1;
  SequenceResult seq = materialize_sequence(g, single_pass);

  // The pair space is partitioned by pair, so a pair lands in the same fold
  // regardless of label.
  std::vector<std::uint32_t> fold_of(seq.examples.size());
  for (std::size_t i = 0; i < seq.examples.size(); ++i)
    fold_of[i] = static_cast<std::uint32_t>(rng::bounded(
        rng::mix(cfg.seed, rng::kFoldAssign, seq.examples[i].source,
                 seq.examples[i].target),
        folds));

  std::vector<FoldMeasures> measures(folds);
  parallel_chunks(folds, threads, [&](unsigned, std::uint64_t begin,
                                      std::uint64_t end) {
    for (std::uint64_t f = begin; f < end; ++f) {
      CategoryMatrix w(cats.num_categories());
      for (std::uint32_t pass = 0; pass < cfg.passes; ++pass)
        for (std::size_t i = 0; i < seq.examples.size(); ++i) {
          if (fold_of[i] == f) continue;
          pa_update(w, seq.examples[i], cats, cfg.aggressiveness);
        }

      std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
      for (std::size_t i = 0; i < seq.examples.size(); ++i) {
        if (fold_of[i] != f) continue;
        const PairExample& ex = seq.examples[i];
        const auto rows = cats.set_of(ex.source);
        const auto cols = cats.set_of(ex.target);
        if (rows.empty() || cols.empty()) continue;
        const bool predicted_link = w.block_sum(rows, cols) > 0.0;
        if (ex.label > 0)
          predicted_link ? ++tp : ++fn;
        else
          predicted_link ? ++fp : ++tn;
      }

      FoldMeasures& fm = measures[f];
      fm.held_out = tp + fp + tn + fn;
      fm.accuracy = fm.held_out == 0
                        ? 0.0
                        : static_cast<double>(tp + tn) / fm.held_out;
      if (tp + fn > 0) {
        fm.recall = static_cast<double>(tp) / (tp + fn);
        if (tp + fp > 0)
          fm.precision = static_cast<double>(tp) / (tp + fp);
        if (fm.precision && *fm.precision + *fm.recall > 0.0)
          fm.f_measure = 2.0 * *fm.precision * *fm.recall /
                         (*fm.precision + *fm.recall);
      }
    }
  });
  return measures;
}

namespace {

MeasureStats stats_of(const std::vector<double>& values) {
  MeasureStats s;
  s.count = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / values.size();
  if (values.size() >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / (values.size() - 1));
  }
  return s;
}

}  // namespace

CrossValSummary summarize_folds(const std::vector<FoldMeasures>& folds) {
  std::vector<double> acc, prec, rec, f1;
  for (const auto& fm : folds) {
    acc.push_back(fm.accuracy);
    if (fm.precision) prec.push_back(*fm.precision);
    if (fm.recall) rec.push_back(*fm.recall);
    if (fm.f_measure) f1.push_back(*fm.f_measure);
  }
  return CrossValSummary{stats_of(acc), stats_of(prec), stats_of(rec),
                         stats_of(f1)};
}

}  // namespace llamafur
