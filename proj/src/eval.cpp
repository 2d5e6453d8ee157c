#include "llamafur/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "llamafur/io_util.hpp"

namespace llamafur {

bool is_relevant(Judgment j) {
  return j == Judgment::slightly_unexpected ||
         j == Judgment::totally_unexpected;
}

const char* judgment_token(Judgment j) {
  switch (j) {
    case Judgment::totally_expected:
      return "totally-expected";
    case Judgment::slightly_expected:
      return "slightly-expected";
    case Judgment::slightly_unexpected:
      return "slightly-unexpected";
    case Judgment::totally_unexpected:
      return "totally-unexpected";
  }
  return "?";
}

std::size_t JudgedPool::num_relevant() const {
  std::size_t n = 0;
  for (const auto& [t, j] : judgments) n += is_relevant(j);
  return n;
}

std::size_t JudgedPool::num_nonrelevant() const {
  return judgments.size() - num_relevant();
}

std::optional<Judgment> JudgedPool::label_of(node_id target) const {
  auto it = std::lower_bound(
      judgments.begin(), judgments.end(), target,
      [](const auto& entry, node_id key) { return entry.first < key; });
  if (it == judgments.end() || it->first != target) return std::nullopt;
  return it->second;
}

namespace {

std::string lowered(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (char& c : out)
    if (c == '_' || c == ' ') c = '-';
  return out;
}

std::optional<Judgment> parse_judgment(std::string_view token) {
  const std::string t = lowered(token);
  if (t == "totally-expected" || t == "te" || t == "0")
    return Judgment::totally_expected;
  if (t == "slightly-expected" || t == "se" || t == "1")
    return Judgment::slightly_expected;
  if (t == "slightly-unexpected" || t == "su" || t == "2")
    return Judgment::slightly_unexpected;
  if (t == "totally-unexpected" || t == "tu" || t == "3")
    return Judgment::totally_unexpected;
  return std::nullopt;
}

bool looks_numeric(std::string_view field) {
  if (field.empty()) return false;
  for (char c : field)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

EvalDataset load_judgments(const std::string& path) {
  std::string content = io::read_file(path);
  std::map<node_id, std::vector<std::pair<node_id, Judgment>>> by_query;
  std::size_t total_links = 0;

  io::LineScanner scanner(content);
  std::string_view line;
  std::size_t line_no = 0;
  bool first_data_line = true;
  while (scanner.next(line, line_no)) {
    std::string_view data = io::strip_comment(line);
    if (data.empty()) continue;
    auto fields = io::split(data, '\t');
    if (fields.size() != 3)
      io::throw_parse_error(path, line_no,
                            "expected \"query TAB target TAB label\"");
    if (first_data_line && !looks_numeric(fields[0])) {
      // Header row from an imported file.
      first_data_line = false;
      continue;
    }
    first_data_line = false;
    std::uint64_t query = io::parse_uint(fields[0], path, line_no, kMaxId);
    std::uint64_t target = io::parse_uint(fields[1], path, line_no, kMaxId);
    auto judgment = parse_judgment(fields[2]);
    if (!judgment)
      io::throw_parse_error(path, line_no,
                            "unknown judgment label \"" +
                                std::string(fields[2]) + "\"");
    auto& pool = by_query[static_cast<node_id>(query)];
    for (const auto& [t, j] : pool)
      if (t == static_cast<node_id>(target))
        io::throw_parse_error(path, line_no, "duplicate judgment for target " +
                                                 std::to_string(target));
    pool.emplace_back(static_cast<node_id>(target), *judgment);
    ++total_links;
  }

  EvalDataset dataset;
  dataset.total_queries = by_query.size();
  dataset.total_judged_links = total_links;
  for (auto& [query, judgments] : by_query) {
    JudgedPool pool;
    pool.query = query;
    std::sort(judgments.begin(), judgments.end());
    pool.judgments = std::move(judgments);
    if (pool.num_relevant() >= 1 && pool.num_nonrelevant() >= 1)
      dataset.pools.push_back(std::move(pool));
  }
  return dataset;
}

void save_judgments(std::span<const JudgedPool> pools,
                    const std::string& path) {
  std::string out;
  for (const auto& pool : pools)
    for (const auto& [target, judgment] : pool.judgments) {
      out += std::to_string(pool.query);
      out += '\t';
      out += std::to_string(target);
      out += '\t';
      out += judgment_token(judgment);
      out += '\n';
    }
  io::write_file(path, out);
}

std::optional<double> bpref_core(std::span<const char> relevance_in_rank_order,
                                 std::uint64_t num_relevant,
                                 std::uint64_t num_nonrelevant) {
  if (num_relevant == 0 || num_nonrelevant == 0) return std::nullopt;
  const std::uint64_t cap = std::min(num_relevant, num_nonrelevant);
  std::uint64_t nonrelevant_above = 0;
  double sum = 0.0;
  for (char relevant : relevance_in_rank_order) {
    if (relevant)
      sum += 1.0 - static_cast<double>(std::min(nonrelevant_above, cap)) /
                       static_cast<double>(cap);
    else
      ++nonrelevant_above;
  }
  return sum / static_cast<double>(num_relevant);
}

std::optional<double> bpref(std::span<const node_id> ranking,
                            const JudgedPool& pool) {
  std::vector<char> flags;
  flags.reserve(pool.judgments.size());
  for (node_id target : ranking) {
    auto judgment = pool.label_of(target);
    if (!judgment) continue;  // unjudged entries are invisible
    flags.push_back(is_relevant(*judgment) ? 1 : 0);
  }
  return bpref_core(flags, pool.num_relevant(), pool.num_nonrelevant());
}

double mean_bpref(const SystemRankings& rankings, const EvalDataset& dataset) {
  if (dataset.pools.empty())
    throw std::invalid_argument("dataset has no retained queries");
  double sum = 0.0;
  for (const auto& pool : dataset.pools) {
    auto it = rankings.find(pool.query);
    if (it == rankings.end())
      throw std::invalid_argument("missing ranking for query " +
                                  std::to_string(pool.query));
    auto value = bpref(it->second, pool);
    sum += *value;  // retained pools always have R,N >= 1
  }
  return sum / static_cast<double>(dataset.pools.size());
}

std::vector<PrPoint> precision_recall_at_percentiles(
    const SystemRankings& rankings, const EvalDataset& dataset,
    std::span<const double> percentiles) {
  for (double p : percentiles)
    if (!(p > 0.0) || p > 100.0)
      throw std::invalid_argument("percentiles must lie in (0, 100]");
  if (dataset.pools.empty())
    throw std::invalid_argument("dataset has no retained queries");

  // Judged-only rankings, checked for full coverage.
  std::vector<std::vector<char>> judged_flags;
  judged_flags.reserve(dataset.pools.size());
  for (const auto& pool : dataset.pools) {
    auto it = rankings.find(pool.query);
    if (it == rankings.end())
      throw std::invalid_argument("missing ranking for query " +
                                  std::to_string(pool.query));
    std::vector<char> flags;
    for (node_id target : it->second) {
      auto judgment = pool.label_of(target);
      if (judgment) flags.push_back(is_relevant(*judgment) ? 1 : 0);
    }
    if (flags.size() != pool.judgments.size())
      throw std::invalid_argument(
          "ranking for query " + std::to_string(pool.query) +
          " does not cover all judged links");
    judged_flags.push_back(std::move(flags));
  }

  std::vector<PrPoint> table;
  table.reserve(percentiles.size());
  for (double p : percentiles) {
    double precision_sum = 0.0, recall_sum = 0.0;
    for (std::size_t q = 0; q < dataset.pools.size(); ++q) {
      const auto& flags = judged_flags[q];
      const std::uint64_t relevant = dataset.pools[q].num_relevant();
      std::size_t cut = static_cast<std::size_t>(
          std::ceil(p * static_cast<double>(flags.size()) / 100.0));
      cut = std::min(std::max<std::size_t>(cut, 1), flags.size());
      std::uint64_t found = 0;
      for (std::size_t i = 0; i < cut; ++i) found += flags[i];
      precision_sum += static_cast<double>(found) / static_cast<double>(cut);
      recall_sum += static_cast<double>(found) / static_cast<double>(relevant);
    }
    const double n = static_cast<double>(dataset.pools.size());
    table.push_back({p, precision_sum / n, recall_sum / n});
  }
  return table;
}

}  // namespace llamafur
