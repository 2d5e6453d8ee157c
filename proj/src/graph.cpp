#include "llamafur/graph.hpp"

#include <algorithm>
#include <stdexcept>

#include "llamafur/io_util.hpp"

namespace llamafur {

namespace {
constexpr char kGraphMagic[4] = {'L', 'F', 'G', 'R'};
constexpr std::uint32_t kGraphVersion = 1;
}  // namespace

void DocumentGraph::check_node(node_id v) const {
  if (v >= num_nodes())
    throw std::out_of_range("node id " + std::to_string(v) +
                            " out of range (num_nodes=" +
                            std::to_string(num_nodes()) + ")");
}

DocumentGraph DocumentGraph::from_arcs(
    node_id num_nodes, std::vector<std::pair<node_id, node_id>> arcs) {
  for (const auto& [s, t] : arcs) {
    if (s >= num_nodes || t >= num_nodes)
      throw std::out_of_range("arc (" + std::to_string(s) + "," +
                              std::to_string(t) + ") outside node range " +
                              std::to_string(num_nodes));
  }
  std::sort(arcs.begin(), arcs.end());
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());

  DocumentGraph g;
  g.offsets_.assign(static_cast<std::size_t>(num_nodes) + 1, 0);
  g.targets_.resize(arcs.size());
  for (const auto& [s, t] : arcs) ++g.offsets_[s + 1];
  for (std::size_t i = 1; i < g.offsets_.size(); ++i)
    g.offsets_[i] += g.offsets_[i - 1];
  for (std::size_t i = 0; i < arcs.size(); ++i) g.targets_[i] = arcs[i].second;
  return g;
}

std::uint64_t DocumentGraph::out_degree(node_id s) const {
  check_node(s);
  return offsets_[s + 1] - offsets_[s];
}

std::span<const node_id> DocumentGraph::neighbors(node_id s) const {
  check_node(s);
  return {targets_.data() + offsets_[s],
          static_cast<std::size_t>(offsets_[s + 1] - offsets_[s])};
}

bool DocumentGraph::has_arc(node_id s, node_id t) const {
  check_node(s);
  check_node(t);
  const auto nbrs = neighbors(s);
  return std::binary_search(nbrs.begin(), nbrs.end(), t);
}

std::pair<node_id, node_id> DocumentGraph::arc_at(std::uint64_t k) const {
  if (k >= num_arcs()) throw std::out_of_range("arc index out of range");
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), k);
  node_id s = static_cast<node_id>(it - offsets_.begin() - 1);
  return {s, targets_[k]};
}

DocumentGraph DocumentGraph::symmetric_view() const {
  std::vector<std::pair<node_id, node_id>> arcs;
  arcs.reserve(2 * targets_.size());
  for (node_id s = 0; s < num_nodes(); ++s)
    for (node_id t : neighbors(s)) {
      arcs.emplace_back(s, t);
      arcs.emplace_back(t, s);
    }
  return from_arcs(num_nodes(), std::move(arcs));
}

DocumentGraph DocumentGraph::transpose() const {
  std::vector<std::pair<node_id, node_id>> arcs;
  arcs.reserve(targets_.size());
  for (node_id s = 0; s < num_nodes(); ++s)
    for (node_id t : neighbors(s)) arcs.emplace_back(t, s);
  return from_arcs(num_nodes(), std::move(arcs));
}

namespace {

DocumentGraph load_edge_list(const std::string& path,
                             const std::string& content) {
  std::vector<std::pair<node_id, node_id>> arcs;
  std::uint64_t max_id = 0;
  bool any = false;
  io::LineScanner scanner(content);
  std::string_view line;
  std::size_t line_no = 0;
  while (scanner.next(line, line_no)) {
    std::string_view data = io::strip_comment(line);
    if (data.empty()) continue;
    std::size_t sep = data.find_first_of(" \t");
    if (sep == std::string_view::npos)
      io::throw_parse_error(path, line_no, "expected \"source target\"");
    std::string_view left = data.substr(0, sep);
    std::string_view right = data.substr(sep);
    while (!right.empty() && (right.front() == ' ' || right.front() == '\t'))
      right.remove_prefix(1);
    if (right.find_first_of(" \t") != std::string_view::npos)
      io::throw_parse_error(path, line_no, "trailing tokens after target id");
    std::uint64_t s = io::parse_uint(left, path, line_no, kMaxId);
    std::uint64_t t = io::parse_uint(right, path, line_no, kMaxId);
    arcs.emplace_back(static_cast<node_id>(s), static_cast<node_id>(t));
    max_id = std::max({max_id, s, t});
    any = true;
  }
  node_id num_nodes = any ? static_cast<node_id>(max_id + 1) : 0;
  return DocumentGraph::from_arcs(num_nodes, std::move(arcs));
}

DocumentGraph load_packed(const std::string& path, const std::string& content) {
  const char* p = content.data();
  const char* end = p + content.size();
  if (end - p < 4 || std::string_view(p, 4) != std::string_view(kGraphMagic, 4))
    throw std::runtime_error(path + ": bad graph magic");
  p += 4;
  std::uint32_t version = io::read_u32(p, end, path);
  if (version != kGraphVersion)
    throw std::runtime_error(path + ": unsupported graph version " +
                             std::to_string(version));
  std::uint64_t n = io::read_u64(p, end, path);
  std::uint64_t m = io::read_u64(p, end, path);
  if (n > kMaxId + 1) throw std::out_of_range(path + ": node count overflow");

  std::vector<std::pair<node_id, node_id>> arcs;
  arcs.reserve(m);
  for (std::uint64_t s = 0; s < n; ++s) {
    std::uint64_t degree = io::read_varint(p, end, path);
    std::uint64_t prev = 0;
    for (std::uint64_t i = 0; i < degree; ++i) {
      std::uint64_t t =
          i == 0 ? io::read_varint(p, end, path)
                 : prev + io::read_varint(p, end, path);
      if (t >= n) throw std::out_of_range(path + ": target id overflow");
      arcs.emplace_back(static_cast<node_id>(s), static_cast<node_id>(t));
      prev = t;
    }
  }
  if (arcs.size() != m)
    throw std::runtime_error(path + ": arc count mismatch in header");
  if (p != end) throw std::runtime_error(path + ": trailing bytes");
  return DocumentGraph::from_arcs(static_cast<node_id>(n), std::move(arcs));
}

}  // namespace

DocumentGraph load_graph(const std::string& path, GraphFormat format) {
  std::string content = io::read_file(path);
  return format == GraphFormat::edge_list ? load_edge_list(path, content)
                                          : load_packed(path, content);
}

DocumentGraph load_graph(const std::string& path) {
  std::string content = io::read_file(path);
  if (content.size() >= 4 &&
      std::string_view(content.data(), 4) == std::string_view(kGraphMagic, 4))
    return load_packed(path, content);
  return load_edge_list(path, content);
}

void save_graph(const DocumentGraph& g, const std::string& path,
                GraphFormat format) {
  std::string out;
  if (format == GraphFormat::edge_list) {
    for (node_id s = 0; s < g.num_nodes(); ++s)
      for (node_id t : g.neighbors(s)) {
        out += std::to_string(s);
        out += ' ';
        out += std::to_string(t);
        out += '\n';
      }
  } else {
    out.append(kGraphMagic, 4);
    io::append_u32(out, kGraphVersion);
    io::append_u64(out, g.num_nodes());
    io::append_u64(out, g.num_arcs());
    for (node_id s = 0; s < g.num_nodes(); ++s) {
      const auto nbrs = g.neighbors(s);
      io::append_varint(out, nbrs.size());
      std::uint64_t prev = 0;
      for (std::size_t i = 0; i < nbrs.size(); ++i) {
        io::append_varint(out, i == 0 ? nbrs[i] : nbrs[i] - prev);
        prev = nbrs[i];
      }
    }
  }
  io::write_file(path, out);
}

std::span<const cat_id> CategoryAssignment::set_of(node_id d) const {
  if (d >= num_nodes())
    throw std::out_of_range("node id " + std::to_string(d) +
                            " out of range (num_nodes=" +
                            std::to_string(num_nodes()) + ")");
  return sets_[d];
}

void CategoryAssignment::assign(node_id d, std::vector<cat_id> cats) {
  if (d >= num_nodes())
    throw std::out_of_range("node id " + std::to_string(d) + " out of range");
  for (cat_id c : cats)
    if (c >= num_categories_)
      throw std::out_of_range("category id " + std::to_string(c) +
                              " outside universe " +
                              std::to_string(num_categories_));
  std::sort(cats.begin(), cats.end());
  cats.erase(std::unique(cats.begin(), cats.end()), cats.end());
  sets_[d] = std::move(cats);
}

void CategoryAssignment::ensure_num_nodes(node_id n) {
  if (n > sets_.size()) sets_.resize(n);
}

CategoryAssignment load_categories(const std::string& path,
                                   cat_id num_categories, node_id min_nodes) {
  std::string content = io::read_file(path);
  struct Record {
    node_id node;
    std::vector<cat_id> cats;
  };
  std::vector<Record> records;
  std::uint64_t max_node = 0;
  std::uint64_t max_cat = 0;
  bool any = false;

  io::LineScanner scanner(content);
  std::string_view line;
  std::size_t line_no = 0;
  const std::uint64_t cat_limit =
      num_categories == 0 ? kMaxId : num_categories - 1;
  while (scanner.next(line, line_no)) {
    std::string_view data = io::strip_comment(line);
    if (data.empty()) continue;
    std::size_t tab = data.find('\t');
    if (tab == std::string_view::npos)
      io::throw_parse_error(path, line_no,
                            "expected \"node TAB cat[,cat...]\"");
    std::uint64_t node =
        io::parse_uint(data.substr(0, tab), path, line_no, kMaxId);
    Record rec{static_cast<node_id>(node), {}};
    for (std::string_view field : io::split(data.substr(tab + 1), ',')) {
      std::uint64_t c = io::parse_uint(field, path, line_no, cat_limit);
      max_cat = std::max(max_cat, c);
      rec.cats.push_back(static_cast<cat_id>(c));
    }
    max_node = std::max(max_node, node);
    any = true;
    records.push_back(std::move(rec));
  }

  cat_id universe = num_categories != 0
                        ? num_categories
                        : (any ? static_cast<cat_id>(max_cat + 1) : 0);
  node_id nodes = std::max<node_id>(
      min_nodes, any ? static_cast<node_id>(max_node + 1) : 0);
  CategoryAssignment cats(universe, nodes);
  for (auto& rec : records) {
    // Multiple records for one node merge into a single set.
    std::vector<cat_id> merged(cats.set_of(rec.node).begin(),
                               cats.set_of(rec.node).end());
    merged.insert(merged.end(), rec.cats.begin(), rec.cats.end());
    cats.assign(rec.node, std::move(merged));
  }
  return cats;
}

void save_categories(const CategoryAssignment& cats, const std::string& path) {
  std::string out;
  for (node_id d = 0; d < cats.num_nodes(); ++d) {
    const auto set = cats.set_of(d);
    if (set.empty()) continue;
    out += std::to_string(d);
    out += '\t';
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(set[i]);
    }
    out += '\n';
  }
  io::write_file(path, out);
}

}  // namespace llamafur
