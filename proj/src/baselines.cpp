#include "llamafur/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "llamafur/io_util.hpp"

namespace llamafur {

namespace {

template <typename Pairs>
auto lookup(const Pairs& pairs, term_id t) ->
    typename Pairs::value_type::second_type {
  auto it = std::lower_bound(
      pairs.begin(), pairs.end(), t,
      [](const auto& entry, term_id key) { return entry.first < key; });
  if (it == pairs.end() || it->first != t) return 0;
  return it->second;
}

}  // namespace

std::uint32_t TermDocument::max_freq() const {
  std::uint32_t best = 0;
  for (const auto& [t, f] : term_freqs) best = std::max(best, f);
  return best;
}

std::uint32_t TermDocument::freq(term_id t) const {
  return lookup(term_freqs, t);
}

const TermDocument* TermCorpus::find(node_id doc) const {
  auto it = std::lower_bound(
      docs.begin(), docs.end(), doc,
      [](const TermDocument& d, node_id key) { return d.doc < key; });
  if (it == docs.end() || it->doc != doc) return nullptr;
  return &*it;
}

TermCorpus load_term_documents(const std::string& path) {
  std::string content = io::read_file(path);
  TermCorpus corpus;
  std::uint64_t max_term = 0;
  bool any_term = false;

  io::LineScanner scanner(content);
  std::string_view line;
  std::size_t line_no = 0;
  while (scanner.next(line, line_no)) {
    std::string_view data = io::strip_comment(line);
    if (data.empty()) continue;
    std::size_t tab = data.find('\t');
    if (tab == std::string_view::npos)
      io::throw_parse_error(path, line_no,
                            "expected \"doc TAB term:count,...\"");
    TermDocument doc;
    doc.doc = static_cast<node_id>(
        io::parse_uint(data.substr(0, tab), path, line_no, kMaxId));
    for (std::string_view field : io::split(data.substr(tab + 1), ',')) {
      std::size_t colon = field.find(':');
      if (colon == std::string_view::npos)
        io::throw_parse_error(path, line_no, "expected term:count");
      std::uint64_t term =
          io::parse_uint(field.substr(0, colon), path, line_no, kMaxId);
      std::uint64_t count =
          io::parse_uint(field.substr(colon + 1), path, line_no, kMaxId);
      if (count == 0)
        io::throw_parse_error(path, line_no, "term count must be >= 1");
      doc.term_freqs.emplace_back(static_cast<term_id>(term),
                                  static_cast<std::uint32_t>(count));
      max_term = std::max(max_term, term);
      any_term = true;
    }
    std::sort(doc.term_freqs.begin(), doc.term_freqs.end());
    for (std::size_t i = 1; i < doc.term_freqs.size(); ++i)
      if (doc.term_freqs[i].first == doc.term_freqs[i - 1].first)
        io::throw_parse_error(path, line_no, "duplicate term in record");
    corpus.docs.push_back(std::move(doc));
  }
  std::sort(corpus.docs.begin(), corpus.docs.end(),
            [](const TermDocument& a, const TermDocument& b) {
              return a.doc < b.doc;
            });
  for (std::size_t i = 1; i < corpus.docs.size(); ++i)
    if (corpus.docs[i].doc == corpus.docs[i - 1].doc)
      throw std::runtime_error(path + ": duplicate document record " +
                               std::to_string(corpus.docs[i].doc));
  corpus.dictionary_size =
      any_term ? static_cast<term_id>(max_term + 1) : 0;
  return corpus;
}

std::uint64_t PoolProfile::max_bag_freq() const {
  std::uint64_t best = 0;
  for (const auto& [t, f] : bag) best = std::max(best, f);
  return best;
}

std::uint64_t PoolProfile::bag_freq(term_id t) const { return lookup(bag, t); }

std::uint32_t PoolProfile::df(term_id t) const { return lookup(doc_freq, t); }

PoolProfile pool_profile(std::span<const TermDocument* const> docs) {
  PoolProfile pool;
  std::vector<std::pair<term_id, std::uint64_t>> bag;
  std::vector<std::pair<term_id, std::uint32_t>> df;
  for (const TermDocument* doc : docs) {
    ++pool.num_docs;
    if (!doc) continue;  // documents without text contribute nothing
    for (const auto& [t, f] : doc->term_freqs) {
      bag.emplace_back(t, f);
      df.emplace_back(t, 1);
    }
  }
  std::sort(bag.begin(), bag.end());
  std::sort(df.begin(), df.end());
  for (const auto& [t, f] : bag)
    if (!pool.bag.empty() && pool.bag.back().first == t)
      pool.bag.back().second += f;
    else
      pool.bag.emplace_back(t, f);
  for (const auto& [t, one] : df)
    if (!pool.doc_freq.empty() && pool.doc_freq.back().first == t)
      pool.doc_freq.back().second += one;
    else
      pool.doc_freq.emplace_back(t, one);
  return pool;
}

double adamic_adar(const DocumentGraph& g_sym, node_id d, node_id dp) {
  const auto a = g_sym.neighbors(d);
  const auto b = g_sym.neighbors(dp);
  double sum = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      const std::uint64_t degree = g_sym.out_degree(a[i]);
      if (degree > 1) sum += 1.0 / std::log(static_cast<double>(degree));
      ++i, ++j;
    }
  }
  return sum;
}

double measure_m2(const TermDocument& d, const PoolProfile& pool,
                  std::size_t dictionary_size) {
  if (dictionary_size == 0 || d.term_freqs.empty()) return 0.0;
  const double doc_max = static_cast<double>(d.max_freq());
  const double pool_max = static_cast<double>(pool.max_bag_freq());
  double sum = 0.0;
  // Terms absent from the document contribute max(0, 0 - ntf_R) = 0, so the
  // dictionary sum reduces to the document's own terms.
  for (const auto& [t, f] : d.term_freqs) {
    const double ntf_d = static_cast<double>(f) / doc_max;
    const double ntf_r =
        pool_max == 0.0
            ? 0.0
            : static_cast<double>(pool.bag_freq(t)) / pool_max;
    sum += std::max(0.0, ntf_d - ntf_r);
  }
  return sum / static_cast<double>(dictionary_size);
}

double measure_m4(const TermDocument& d, const PoolProfile& pool) {
  if (d.term_freqs.empty() || pool.num_docs == 0) return 0.0;
  const double doc_max = static_cast<double>(d.max_freq());
  double best = 0.0;
  for (const auto& [t, f] : d.term_freqs) {
    const std::uint32_t df = pool.df(t);
    if (df == 0) continue;  // term does not occur in R
    const double ntf = static_cast<double>(f) / doc_max;
    best = std::max(
        best, ntf * std::log(static_cast<double>(pool.num_docs) / df));
  }
  return best;
}

StudentizedResult studentize(std::span<const double> values) {
  if (values.size() < 2)
    throw std::invalid_argument("studentize needs at least two values");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));

  StudentizedResult out;
  out.values.resize(values.size());
  if (sd == 0.0) {
    out.degenerate = true;
    return out;  // all-zero output
  }
  for (std::size_t i = 0; i < values.size(); ++i)
    out.values[i] = (values[i] - mean) / sd;
  return out;
}

std::vector<double> combine(std::span<const MeasureSeries> measures) {
  if (measures.empty())
    throw std::invalid_argument("combine needs at least one measure");
  const std::size_t n = measures.front().values.size();
  for (const auto& m : measures)
    if (m.values.size() != n)
      throw std::invalid_argument("measure \"" + m.name +
                                  "\" has mismatched length");
  std::vector<double> combined(n, 0.0);
  for (const auto& m : measures) {
    const auto stud = studentize(m.values);
    const double sign =
        m.orientation == Orientation::expectedness ? 1.0 : -1.0;
    for (std::size_t i = 0; i < n; ++i)
      combined[i] += m.weight * sign * stud.values[i];
  }
  return combined;
}

}  // namespace llamafur
