#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "llamafur/types.hpp"

namespace llamafur {

// Four-class human expectedness labels. Relevance binarizes the two
// unexpected classes together: an unexpected link is a relevant result.
enum class Judgment : std::uint8_t {
  totally_expected = 0,
  slightly_expected = 1,
  slightly_unexpected = 2,
  totally_unexpected = 3,
};

bool is_relevant(Judgment j);
const char* judgment_token(Judgment j);

/// Human labels for the judged out-links of one query document.
struct JudgedPool {
  node_id query = 0;
  std::vector<std::pair<node_id, Judgment>> judgments;  // sorted by target

  std::size_t num_relevant() const;
  std::size_t num_nonrelevant() const;
  std::optional<Judgment> label_of(node_id target) const;

  bool operator==(const JudgedPool&) const = default;
};

/// Pools retained for evaluation: only queries with at least one relevant and
/// one non-relevant judged result.
struct EvalDataset {
  std::vector<JudgedPool> pools;  // sorted by query
  std::size_t total_queries = 0;  // before filtering
  std::size_t total_judged_links = 0;
};

// TSV "query TAB target TAB label". Labels may be the canonical hyphenated
// tokens, abbreviations (te/se/su/tu), or 0..3; a leading non-numeric header
// row is skipped.
EvalDataset load_judgments(const std::string& path);
void save_judgments(std::span<const JudgedPool> pools, const std::string& path);

// Shared bpref kernel over relevance flags in rank order. Judged-relevant
// entries missing from the ranking simply contribute nothing to the sum.
std::optional<double> bpref_core(std::span<const char> relevance_in_rank_order,
                                 std::uint64_t num_relevant,
                                 std::uint64_t num_nonrelevant);

// bpref = (1/R) Σ_r (1 − min(nonrelevant ranked above r, min(R,N)) / min(R,N))
// over the judged entries of the ranking; unjudged entries are invisible to
// the counters. nullopt when the pool lacks relevant or non-relevant links.
std::optional<double> bpref(std::span<const node_id> ranking,
                            const JudgedPool& pool);

// One ranking per retained query, most unexpected first.
using SystemRankings = std::map<node_id, std::vector<node_id>>;

double mean_bpref(const SystemRankings& rankings, const EvalDataset& dataset);

struct PrPoint {
  double percentile = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

// Cuts each query's judged ranking at ⌈p% of its judged length⌉ (so the 1st
// percentile still keeps one result), computes precision and recall over the
// judged links, and averages across queries. Rankings must cover every
// judged target. Percentiles must lie in (0, 100].
std::vector<PrPoint> precision_recall_at_percentiles(
    const SystemRankings& rankings, const EvalDataset& dataset,
    std::span<const double> percentiles);

}  // namespace llamafur
