#include "llamafur/categories.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "llamafur/io_util.hpp"
#include "llamafur/parallel.hpp"

namespace llamafur {

namespace {
constexpr std::uint32_t kUnreached = std::numeric_limits<std::uint32_t>::max();
}

CategoryHierarchy::CategoryHierarchy(DocumentGraph parent_arcs)
    : parent_arcs_(std::move(parent_arcs)),
      child_arcs_(parent_arcs_.transpose()),
      undirected_(parent_arcs_.symmetric_view()) {}

CategoryHierarchy load_hierarchy(const std::string& path) {
  return CategoryHierarchy(load_graph(path, GraphFormat::edge_list));
}

namespace {

// BFS from `source`, adding 1/dist into `into` for every node reached.
// Scratch buffers are reused across sources by the caller.
void scatter_harmonic(const DocumentGraph& g, node_id source,
                      std::vector<std::uint32_t>& dist,
                      std::vector<node_id>& queue, std::vector<double>& into) {
  dist.assign(g.num_nodes(), kUnreached);
  queue.clear();
  dist[source] = 0;
  queue.push_back(source);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    node_id u = queue[head];
    for (node_id v : g.neighbors(u)) {
      if (dist[v] != kUnreached) continue;
      dist[v] = dist[u] + 1;
      into[v] += 1.0 / dist[v];
      queue.push_back(v);
    }
  }
}

// Gather flavour for the outgoing direction: one BFS fills H(source).
double gather_harmonic(const DocumentGraph& g, node_id source,
                       std::vector<std::uint32_t>& dist,
                       std::vector<node_id>& queue) {
  dist.assign(g.num_nodes(), kUnreached);
  queue.clear();
  dist[source] = 0;
  queue.push_back(source);
  double sum = 0.0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    node_id u = queue[head];
    for (node_id v : g.neighbors(u)) {
      if (dist[v] != kUnreached) continue;
      dist[v] = dist[u] + 1;
      sum += 1.0 / dist[v];
      queue.push_back(v);
    }
  }
  return sum;
}

const DocumentGraph& view_for(const CategoryHierarchy& h,
                              CentralityDirection direction) {
  switch (direction) {
    case CentralityDirection::incoming:
    case CentralityDirection::outgoing:
      return h.parent_arcs();
    case CentralityDirection::undirected:
    default:
      return h.undirected();
  }
}

}  // namespace

std::vector<double> harmonic_centrality_sampled(
    const CategoryHierarchy& h, std::span<const cat_id> sources,
    CentralityDirection direction, unsigned threads) {
  const DocumentGraph& g = view_for(h, direction);
  const node_id n = g.num_nodes();
  std::vector<double> scores(n, 0.0);
  if (n == 0 || sources.empty()) return scores;

  if (direction == CentralityDirection::outgoing) {
    // H(x) is local to x; only sampled sources get a score here.
    parallel_chunks(sources.size(), threads,
                    [&](unsigned, std::uint64_t begin, std::uint64_t end) {
                      std::vector<std::uint32_t> dist;
                      std::vector<node_id> queue;
                      for (std::uint64_t i = begin; i < end; ++i)
                        scores[sources[i]] =
                            gather_harmonic(g, sources[i], dist, queue);
                    });
    return scores;
  }

  unsigned workers = threads <= 1 ? 1 : threads;
  std::vector<std::vector<double>> partial(
      workers, std::vector<double>(n, 0.0));
  parallel_chunks(sources.size(), workers,
                  [&](unsigned worker, std::uint64_t begin, std::uint64_t end) {
                    std::vector<std::uint32_t> dist;
                    std::vector<node_id> queue;
                    for (std::uint64_t i = begin; i < end; ++i)
                      scatter_harmonic(g, sources[i], dist, queue,
                                       partial[worker]);
                  });
  // Fixed reduction order keeps the result deterministic for a given
  // thread count.
  for (unsigned worker = 0; worker < workers; ++worker)
    for (node_id x = 0; x < n; ++x) scores[x] += partial[worker][x];

  if (sources.size() < n) {
    // Unbiased for a uniform sample of distinct sources; any positive scale
    // leaves the milestone ranking unchanged.
    const double scale =
        static_cast<double>(n) / static_cast<double>(sources.size());
    for (double& s : scores) s *= scale;
  }
  return scores;
}

std::vector<double> harmonic_centrality(const CategoryHierarchy& h,
                                        CentralityDirection direction,
                                        unsigned threads) {
  std::vector<cat_id> all(h.num_raw_categories());
  std::iota(all.begin(), all.end(), 0u);
  return harmonic_centrality_sampled(h, all, direction, threads);
}

std::vector<cat_id> select_milestones(std::span<const double> scores,
                                      std::size_t k) {
  if (k > scores.size())
    throw std::invalid_argument("k exceeds the number of scored categories");
  std::vector<cat_id> ids(scores.size());
  std::iota(ids.begin(), ids.end(), 0u);
  std::partial_sort(ids.begin(), ids.begin() + k, ids.end(),
                    [&](cat_id a, cat_id b) {
                      if (scores[a] != scores[b]) return scores[a] > scores[b];
                      return a < b;
                    });
  ids.resize(k);
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::uint32_t MilestoneMap::num_milestones() const {
  if (!milestones.empty()) return static_cast<std::uint32_t>(milestones.size());
  std::int32_t max_index = -1;
  for (std::int32_t idx : remap) max_index = std::max(max_index, idx);
  return static_cast<std::uint32_t>(max_index + 1);
}

MilestoneMap build_remap(const CategoryHierarchy& h,
                         std::span<const cat_id> milestones) {
  const DocumentGraph& g = h.undirected();
  const cat_id n = g.num_nodes();

  MilestoneMap map;
  map.milestones.assign(milestones.begin(), milestones.end());
  std::sort(map.milestones.begin(), map.milestones.end());
  map.milestones.erase(
      std::unique(map.milestones.begin(), map.milestones.end()),
      map.milestones.end());
  map.remap.assign(n, -1);
  map.distances.assign(n, kUnreached);

  // Level-synchronous multi-source BFS. A node reached at the current level
  // takes the minimum milestone index over all predecessors, which by
  // induction is the smallest milestone id among those at minimal distance.
  std::vector<std::int32_t> candidate(n, -1);
  std::vector<cat_id> frontier;
  for (std::size_t i = 0; i < map.milestones.size(); ++i) {
    cat_id m = map.milestones[i];
    if (m >= n)
      throw std::out_of_range("milestone id " + std::to_string(m) +
                              " outside the hierarchy");
    map.remap[m] = static_cast<std::int32_t>(i);
    map.distances[m] = 0;
    frontier.push_back(m);
  }

  std::vector<cat_id> next;
  std::uint32_t level = 0;
  while (!frontier.empty()) {
    ++level;
    next.clear();
    for (cat_id u : frontier) {
      for (cat_id v : g.neighbors(u)) {
        if (map.distances[v] != kUnreached) continue;
        if (candidate[v] == -1) next.push_back(v);
        if (candidate[v] == -1 || map.remap[u] < candidate[v])
          candidate[v] = map.remap[u];
      }
    }
    for (cat_id v : next) {
      map.remap[v] = candidate[v];
      map.distances[v] = level;
    }
    frontier.swap(next);
  }
  return map;
}

CategoryAssignment apply_remap(const CategoryAssignment& assign,
                               const MilestoneMap& map) {
  const std::uint32_t universe = map.num_milestones();
  CategoryAssignment out(universe, assign.num_nodes());
  std::vector<cat_id> remapped;
  for (node_id d = 0; d < assign.num_nodes(); ++d) {
    remapped.clear();
    for (cat_id c : assign.set_of(d)) {
      if (c >= map.remap.size())
        throw std::out_of_range("raw category id " + std::to_string(c) +
                                " outside the hierarchy id space");
      std::int32_t idx = map.remap[c];
      if (idx >= 0) remapped.push_back(static_cast<cat_id>(idx));
    }
    out.assign(d, remapped);
  }
  return out;
}

void save_milestone_map(const MilestoneMap& map, const std::string& path) {
  std::string out;
  for (std::size_t raw = 0; raw < map.remap.size(); ++raw) {
    if (map.remap[raw] < 0) continue;
    out += std::to_string(raw);
    out += '\t';
    out += std::to_string(map.remap[raw]);
    out += '\n';
  }
  io::write_file(path, out);
}

MilestoneMap load_milestone_map(const std::string& path) {
  std::string content = io::read_file(path);
  MilestoneMap map;
  io::LineScanner scanner(content);
  std::string_view line;
  std::size_t line_no = 0;
  while (scanner.next(line, line_no)) {
    std::string_view data = io::strip_comment(line);
    if (data.empty()) continue;
    std::size_t tab = data.find('\t');
    if (tab == std::string_view::npos)
      io::throw_parse_error(path, line_no, "expected \"raw-id TAB index\"");
    std::uint64_t raw =
        io::parse_uint(data.substr(0, tab), path, line_no, kMaxId);
    std::uint64_t idx =
        io::parse_uint(data.substr(tab + 1), path, line_no, kMaxId);
    if (raw >= map.remap.size()) map.remap.resize(raw + 1, -1);
    map.remap[raw] = static_cast<std::int32_t>(idx);
  }
  return map;
}

}  // namespace llamafur
