#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "llamafur/graph.hpp"
#include "llamafur/types.hpp"

namespace llamafur {

/// Sparse term frequencies of one document; present terms have count ≥ 1.
struct TermDocument {
  node_id doc = 0;
  std::vector<std::pair<term_id, std::uint32_t>> term_freqs;  // sorted by term

  std::uint32_t max_freq() const;
  std::uint32_t freq(term_id t) const;
};

struct TermCorpus {
  std::vector<TermDocument> docs;  // sorted by doc id
  term_id dictionary_size = 0;

  const TermDocument* find(node_id doc) const;
};

// "doc-id TAB term:count,term:count,..." per line.
TermCorpus load_term_documents(const std::string& path);

/// Bag profile of a result set R: pooled term counts (all documents
/// concatenated) and per-term document frequencies.
struct PoolProfile {
  std::vector<std::pair<term_id, std::uint64_t>> bag;       // sorted by term
  std::vector<std::pair<term_id, std::uint32_t>> doc_freq;  // sorted by term
  std::size_t num_docs = 0;

  std::uint64_t max_bag_freq() const;
  std::uint64_t bag_freq(term_id t) const;
  std::uint32_t df(term_id t) const;
};

PoolProfile pool_profile(std::span<const TermDocument* const> docs);

// Σ over common neighbors of 1/ln(degree); callers pass the symmetric view.
// Common neighbors of degree ≤ 1 are skipped (their reciprocal log is
// degenerate). Expectedness measure.
double adamic_adar(const DocumentGraph& g_sym, node_id d, node_id dp);

// Mean over the dictionary of max(0, ntf_d(t) − ntf_R(t)), where ntf is the
// frequency divided by the most frequent term of the same unit (document or
// pooled bag). Unexpectedness measure in [0, 1].
double measure_m2(const TermDocument& d, const PoolProfile& pool,
                  std::size_t dictionary_size);

// max_t ntf_d(t) · ln(|R| / df(t)) over the document's terms that occur in R.
// Unexpectedness measure, ≥ 0.
double measure_m4(const TermDocument& d, const PoolProfile& pool);

struct StudentizedResult {
  std::vector<double> values;
  bool degenerate = false;  // zero sample variance; values forced to 0
};

// (x − mean) / sample standard deviation, per element. Needs length ≥ 2.
StudentizedResult studentize(std::span<const double> values);

enum class Orientation { expectedness, unexpectedness };

struct MeasureSeries {
  std::string name;
  std::vector<double> values;  // scores of one query's link pool, aligned
  double weight = 1.0;
  Orientation orientation = Orientation::expectedness;
};

// Studentizes each series then sums weight · (±1) · studentized, mapping
// unexpectedness measures to the internal expectedness convention via the
// negative sign. All series must describe the same link pool.
std::vector<double> combine(std::span<const MeasureSeries> measures);

}  // namespace llamafur
