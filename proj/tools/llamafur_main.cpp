// Command-line front end wiring the toolkit into a pipeline:
// ingest -> cleanse -> train -> score/rank/partition -> eval, plus the
// synthetic generator and the baseline scorers. Every run writes a manifest
// beside its primary output recording resolved parameters and input digests.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "CLI11.hpp"
#include "llamafur/baselines.hpp"
#include "llamafur/categories.hpp"
#include "llamafur/eval.hpp"
#include "llamafur/graph.hpp"
#include "llamafur/io_util.hpp"
#include "llamafur/matrix.hpp"
#include "llamafur/naive_learner.hpp"
#include "llamafur/pa_learner.hpp"
#include "llamafur/parallel.hpp"
#include "llamafur/rng.hpp"
#include "llamafur/scoring.hpp"
#include "llamafur/synth.hpp"
#include "llamafur/types.hpp"

namespace {

constexpr const char* kToolVersion = "llamafur 0.1.0";

using namespace llamafur;

class Manifest {
 public:
  explicit Manifest(std::string subcommand) {
    start_ = std::chrono::steady_clock::now();
    add("tool", kToolVersion);
    add("subcommand", std::move(subcommand));
  }

  void add(std::string key, std::string value) {
    entries_.emplace_back(std::move(key), std::move(value));
  }
  void add_param(const std::string& key, const std::string& value) {
    add("param:" + key, value);
  }
  void add_param(const std::string& key, double value) {
    add_param(key, io::format_double(value));
  }
  void add_param(const std::string& key, std::uint64_t value) {
    add_param(key, std::to_string(value));
  }
  void add_input(const std::string& label, const std::string& path) {
    char digest[32];
    std::snprintf(digest, sizeof digest, "%016llx",
                  static_cast<unsigned long long>(
                      io::fnv1a64(io::read_file(path))));
    add("input:" + label, path + " fnv1a64=" + digest);
  }
  void add_output(const std::string& label, const std::string& path) {
    add("output:" + label, path);
  }

  // Written as "<primary output>.manifest".
  void write(const std::string& primary_output) {
    const auto wall = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start_);
    std::string out;
    for (const auto& [key, value] : entries_) {
      out += key;
      out += '\t';
      out += value;
      out += '\n';
    }
    out += "wall_ms\t" + std::to_string(wall.count()) + "\n";
    io::write_file(primary_output + ".manifest", out);
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::chrono::steady_clock::time_point start_;
};

GraphFormat parse_graph_format(const std::string& name) {
  if (name == "text") return GraphFormat::edge_list;
  if (name == "binary") return GraphFormat::packed_binary;
  throw std::runtime_error("--format must be 'text' or 'binary'");
}

std::string format_score(double v) { return io::format_double(v); }

CategoryAssignment load_cats_for_graph(const std::string& path,
                                       cat_id num_categories,
                                       const DocumentGraph& g) {
  auto cats = load_categories(path, num_categories, g.num_nodes());
  if (cats.num_nodes() > g.num_nodes())
    throw std::runtime_error(path +
                             ": category records refer to nodes beyond the "
                             "graph (" +
                             std::to_string(cats.num_nodes()) + " > " +
                             std::to_string(g.num_nodes()) + ")");
  return cats;
}

// ---------------------------------------------------------------------------
// ingest: map a string-keyed corpus onto dense ids.

struct IngestArgs {
  std::string edges, cats;
  std::string out_graph, out_nodes, out_cats, out_cat_names;
  std::string format = "binary";
};

void run_ingest(const IngestArgs& args) {
  Manifest manifest("ingest");
  manifest.add_input("edges", args.edges);
  manifest.add_param("format", args.format);

  std::unordered_map<std::string, node_id> node_ids;
  std::vector<std::string> node_names;
  auto intern_node = [&](std::string_view name) {
    auto it = node_ids.find(std::string(name));
    if (it != node_ids.end()) return it->second;
    const node_id id = static_cast<node_id>(node_names.size());
    node_names.emplace_back(name);
    node_ids.emplace(node_names.back(), id);
    return id;
  };

  std::string content = io::read_file(args.edges);
  std::vector<std::pair<node_id, node_id>> arcs;
  std::uint64_t self_loops = 0;
  io::LineScanner scanner(content);
  std::string_view line;
  std::size_t line_no = 0;
  while (scanner.next(line, line_no)) {
    if (line.empty() || line.front() == '#') continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos)
      io::throw_parse_error(args.edges, line_no,
                            "expected \"source TAB target\"");
    node_id s = intern_node(line.substr(0, tab));
    node_id t = intern_node(line.substr(tab + 1));
    if (s == t) {
      ++self_loops;  // normalized away at ingestion
      continue;
    }
    arcs.emplace_back(s, t);
  }

  // Category records may introduce pages that have no links.
  std::vector<std::pair<node_id, std::vector<cat_id>>> cat_records;
  std::unordered_map<std::string, cat_id> cat_ids;
  std::vector<std::string> cat_names;
  if (!args.cats.empty()) {
    manifest.add_input("cats", args.cats);
    auto intern_cat = [&](std::string_view name) {
      auto it = cat_ids.find(std::string(name));
      if (it != cat_ids.end()) return it->second;
      const cat_id id = static_cast<cat_id>(cat_names.size());
      cat_names.emplace_back(name);
      cat_ids.emplace(cat_names.back(), id);
      return id;
    };
    std::string cat_content = io::read_file(args.cats);
    io::LineScanner cat_scanner(cat_content);
    while (cat_scanner.next(line, line_no)) {
      if (line.empty() || line.front() == '#') continue;
      auto fields = io::split(line, '\t');
      if (fields.size() < 2)
        io::throw_parse_error(args.cats, line_no,
                              "expected \"page TAB cat [TAB cat...]\"");
      node_id d = intern_node(fields[0]);
      std::vector<cat_id> set;
      for (std::size_t i = 1; i < fields.size(); ++i)
        if (!fields[i].empty()) set.push_back(intern_cat(fields[i]));
      cat_records.emplace_back(d, std::move(set));
    }
  }

  const node_id num_nodes = static_cast<node_id>(node_names.size());
  auto g = DocumentGraph::from_arcs(num_nodes, std::move(arcs));
  save_graph(g, args.out_graph, parse_graph_format(args.format));
  manifest.add_output("graph", args.out_graph);
  std::fprintf(stderr,
               "ingest: %u nodes, %llu arcs (%llu self-loops dropped)\n",
               g.num_nodes(), static_cast<unsigned long long>(g.num_arcs()),
               static_cast<unsigned long long>(self_loops));

  if (!args.out_nodes.empty()) {
    std::string out;
    for (node_id d = 0; d < num_nodes; ++d) {
      out += std::to_string(d);
      out += '\t';
      out += node_names[d];
      out += '\n';
    }
    io::write_file(args.out_nodes, out);
    manifest.add_output("nodes", args.out_nodes);
  }
  if (!args.cats.empty()) {
    if (args.out_cats.empty())
      throw std::runtime_error("--cats requires --out-cats");
    CategoryAssignment assignment(static_cast<cat_id>(cat_names.size()),
                                  num_nodes);
    for (auto& [d, set] : cat_records) {
      std::vector<cat_id> merged(assignment.set_of(d).begin(),
                                 assignment.set_of(d).end());
      merged.insert(merged.end(), set.begin(), set.end());
      assignment.assign(d, std::move(merged));
    }
    save_categories(assignment, args.out_cats);
    manifest.add_output("cats", args.out_cats);
    if (!args.out_cat_names.empty()) {
      std::string out;
      for (cat_id c = 0; c < cat_names.size(); ++c) {
        out += std::to_string(c);
        out += '\t';
        out += cat_names[c];
        out += '\n';
      }
      io::write_file(args.out_cat_names, out);
      manifest.add_output("cat-names", args.out_cat_names);
    }
  }
  manifest.write(args.out_graph);
}

// ---------------------------------------------------------------------------
// cleanse: milestones by harmonic centrality, then the nearest-milestone map.

struct CleanseArgs {
  std::string hierarchy, out_map, in_cats, out_cats;
  std::uint64_t k = 20000;
  std::string centrality = "undirected";
  unsigned threads = 1;
};

void run_cleanse(const CleanseArgs& args) {
  Manifest manifest("cleanse");
  manifest.add_input("hierarchy", args.hierarchy);
  manifest.add_param("k", args.k);
  manifest.add_param("centrality", args.centrality);

  CentralityDirection direction;
  if (args.centrality == "undirected")
    direction = CentralityDirection::undirected;
  else if (args.centrality == "in")
    direction = CentralityDirection::incoming;
  else if (args.centrality == "out")
    direction = CentralityDirection::outgoing;
  else
    throw std::runtime_error("--centrality must be undirected, in or out");

  auto hierarchy = load_hierarchy(args.hierarchy);
  auto scores = harmonic_centrality(hierarchy, direction, args.threads);
  auto milestones = select_milestones(scores, args.k);
  auto map = build_remap(hierarchy, milestones);
  save_milestone_map(map, args.out_map);
  manifest.add_output("map", args.out_map);

  std::uint64_t mapped = 0;
  for (std::int32_t idx : map.remap) mapped += idx >= 0 ? 1 : 0;
  std::fprintf(stderr,
               "cleanse: %zu milestones, %llu of %u categories mapped\n",
               map.milestones.size(), static_cast<unsigned long long>(mapped),
               hierarchy.num_raw_categories());

  if (!args.in_cats.empty()) {
    if (args.out_cats.empty())
      throw std::runtime_error("--in-cats requires --out-cats");
    manifest.add_input("in-cats", args.in_cats);
    auto raw = load_categories(args.in_cats, hierarchy.num_raw_categories());
    save_categories(apply_remap(raw, map), args.out_cats);
    manifest.add_output("cats", args.out_cats);
  }
  manifest.write(args.out_map);
}

// ---------------------------------------------------------------------------
// train / train-naive / crossval

struct TrainArgs {
  std::string graph, cats, out;
  cat_id num_categories = 0;
  double k_aggr = 1.0;
  std::uint64_t seed = 1;
  std::uint32_t passes = 1;
  unsigned save_width = 8;
};

void run_train(const TrainArgs& args) {
  Manifest manifest("train");
  manifest.add_input("graph", args.graph);
  manifest.add_input("cats", args.cats);
  manifest.add_param("k-aggr", args.k_aggr);
  manifest.add_param("seed", args.seed);
  manifest.add_param("passes", static_cast<std::uint64_t>(args.passes));
  manifest.add_param("save-width",
                     static_cast<std::uint64_t>(args.save_width));

  auto g = load_graph(args.graph);
  auto cats = load_cats_for_graph(args.cats, args.num_categories, g);
  TrainerConfig cfg{args.k_aggr, args.seed, args.passes};
  auto [w, report] = train(g, cats, cfg);
  save_matrix(w, args.out, args.save_width);
  manifest.add_output("matrix", args.out);
  std::fprintf(stderr,
               "train: %llu examples (%llu updates, %llu skipped, shortfall "
               "%llu), online accuracy %.4f, %.2fs\n",
               static_cast<unsigned long long>(report.examples_seen),
               static_cast<unsigned long long>(report.updates_applied),
               static_cast<unsigned long long>(report.skipped_empty_category),
               static_cast<unsigned long long>(report.negative_shortfall),
               report.final_accuracy_on_sequence,
               std::chrono::duration<double>(report.wall_time).count());
  manifest.write(args.out);
}

struct TrainNaiveArgs {
  std::string graph, cats, out;
  cat_id num_categories = 0;
  unsigned save_width = 8;
  unsigned threads = 1;
};

void run_train_naive(const TrainNaiveArgs& args) {
  Manifest manifest("train-naive");
  manifest.add_input("graph", args.graph);
  manifest.add_input("cats", args.cats);
  auto g = load_graph(args.graph);
  auto cats = load_cats_for_graph(args.cats, args.num_categories, g);
  auto w = naive_matrix(count_pairs(g, cats, args.threads));
  save_matrix(w, args.out, args.save_width);
  manifest.add_output("matrix", args.out);
  manifest.write(args.out);
}

struct CrossvalArgs {
  std::string graph, cats, out;
  cat_id num_categories = 0;
  std::uint32_t folds = 10;
  double k_aggr = 1.0;
  std::uint64_t seed = 1;
  std::uint32_t passes = 1;
  unsigned threads = 1;
};

std::string measure_or_na(const std::optional<double>& v) {
  return v ? format_score(*v) : "NA";
}

void run_crossval(const CrossvalArgs& args) {
  Manifest manifest("crossval");
  manifest.add_input("graph", args.graph);
  manifest.add_input("cats", args.cats);
  manifest.add_param("folds", static_cast<std::uint64_t>(args.folds));
  manifest.add_param("k-aggr", args.k_aggr);
  manifest.add_param("seed", args.seed);
  manifest.add_param("passes", static_cast<std::uint64_t>(args.passes));

  auto g = load_graph(args.graph);
  auto cats = load_cats_for_graph(args.cats, args.num_categories, g);
  TrainerConfig cfg{args.k_aggr, args.seed, args.passes};
  auto folds = cross_validate(g, cats, cfg, args.folds, args.threads);
  auto summary = summarize_folds(folds);

  std::string out = "fold\taccuracy\tprecision\trecall\tf_measure\n";
  for (std::size_t f = 0; f < folds.size(); ++f) {
    out += std::to_string(f);
    out += '\t' + format_score(folds[f].accuracy);
    out += '\t' + measure_or_na(folds[f].precision);
    out += '\t' + measure_or_na(folds[f].recall);
    out += '\t' + measure_or_na(folds[f].f_measure);
    out += '\n';
  }
  auto stat_row = [&](const char* name, auto pick) {
    out += name;
    out += '\t' + format_score(pick(summary.accuracy));
    out += '\t' + format_score(pick(summary.precision));
    out += '\t' + format_score(pick(summary.recall));
    out += '\t' + format_score(pick(summary.f_measure));
    out += '\n';
  };
  stat_row("mean", [](const MeasureStats& s) { return s.mean; });
  stat_row("stddev", [](const MeasureStats& s) { return s.stddev; });
  io::write_file(args.out, out);
  manifest.add_output("table", args.out);
  manifest.write(args.out);
}

// ---------------------------------------------------------------------------
// score / rank / partition / neighborhood

struct ScoreArgs {
  std::string graph, cats, matrix, out;
  cat_id num_categories = 0;
  unsigned threads = 1;
};

void run_score(const ScoreArgs& args) {
  Manifest manifest("score");
  manifest.add_input("graph", args.graph);
  manifest.add_input("cats", args.cats);
  manifest.add_input("matrix", args.matrix);
  auto g = load_graph(args.graph);
  auto cats = load_cats_for_graph(args.cats, args.num_categories, g);
  auto w = load_matrix(args.matrix);

  const std::uint64_t m = g.num_arcs();
  std::vector<double> scores(m);
  parallel_chunks(m, args.threads,
                  [&](unsigned, std::uint64_t begin, std::uint64_t end) {
                    for (std::uint64_t k = begin; k < end; ++k) {
                      auto [s, t] = g.arc_at(k);
                      scores[k] = score_pair(w, cats, s, t);
                    }
                  });
  std::string out;
  for (std::uint64_t k = 0; k < m; ++k) {
    auto [s, t] = g.arc_at(k);
    out += std::to_string(s);
    out += '\t';
    out += std::to_string(t);
    out += '\t';
    out += format_score(scores[k]);
    out += '\n';
  }
  io::write_file(args.out, out);
  manifest.add_output("scores", args.out);
  manifest.write(args.out);
}

struct RankArgs {
  std::string graph, cats, matrix, out;
  cat_id num_categories = 0;
  std::vector<std::uint64_t> queries;
  bool all_queries = false;
  double alpha = 1.0;
};

void run_rank(const RankArgs& args) {
  Manifest manifest("rank");
  manifest.add_input("graph", args.graph);
  manifest.add_input("cats", args.cats);
  manifest.add_input("matrix", args.matrix);
  manifest.add_param("alpha", args.alpha);

  auto g = load_graph(args.graph);
  auto cats = load_cats_for_graph(args.cats, args.num_categories, g);
  auto w = load_matrix(args.matrix);

  std::vector<node_id> queries;
  if (args.all_queries) {
    for (node_id d = 0; d < g.num_nodes(); ++d)
      if (g.out_degree(d) > 0) queries.push_back(d);
  } else {
    if (args.queries.empty())
      throw std::runtime_error("rank needs --query or --all-queries");
    for (std::uint64_t q : args.queries)
      queries.push_back(static_cast<node_id>(q));
  }

  std::string out;
  for (node_id q : queries)
    for (const auto& ls : top_pool(g, w, cats, q, args.alpha)) {
      out += std::to_string(ls.source);
      out += '\t';
      out += std::to_string(ls.target);
      out += '\t';
      out += format_score(ls.score);
      out += '\n';
    }
  io::write_file(args.out, out);
  manifest.add_output("ranking", args.out);
  manifest.write(args.out);
}

struct PartitionArgs {
  std::string graph, cats, matrix, out;
  std::string out_explainable, out_unexplainable;
  cat_id num_categories = 0;
  unsigned threads = 1;
};

void write_link_scores(const std::vector<LinkScore>& links,
                       const std::string& path) {
  std::string out;
  for (const auto& ls : links) {
    out += std::to_string(ls.source);
    out += '\t';
    out += std::to_string(ls.target);
    out += '\t';
    out += format_score(ls.score);
    out += '\n';
  }
  io::write_file(path, out);
}

void run_partition(const PartitionArgs& args) {
  Manifest manifest("partition");
  manifest.add_input("graph", args.graph);
  manifest.add_input("cats", args.cats);
  manifest.add_input("matrix", args.matrix);

  auto g = load_graph(args.graph);
  auto cats = load_cats_for_graph(args.cats, args.num_categories, g);
  auto w = load_matrix(args.matrix);
  auto part = partition_links(g, w, cats, args.threads);

  std::string report;
  report += "explainable\t" + std::to_string(part.explainable.size()) + "\n";
  report +=
      "unexplainable\t" + std::to_string(part.unexplainable.size()) + "\n";
  report += "ratio\t" + format_score(part.explained_ratio()) + "\n";
  io::write_file(args.out, report);
  std::fputs(report.c_str(), stdout);
  manifest.add_output("report", args.out);

  if (!args.out_explainable.empty()) {
    write_link_scores(part.explainable, args.out_explainable);
    manifest.add_output("explainable", args.out_explainable);
  }
  if (!args.out_unexplainable.empty()) {
    write_link_scores(part.unexplainable, args.out_unexplainable);
    manifest.add_output("unexplainable", args.out_unexplainable);
  }
  manifest.write(args.out);
}

struct NeighborhoodArgs {
  std::string matrix, out;
  std::uint64_t category = 0;
  std::uint64_t k = 18;
  double threshold = 1.0;
  std::string direction = "out";
};

void run_neighborhood(const NeighborhoodArgs& args) {
  Manifest manifest("neighborhood");
  manifest.add_input("matrix", args.matrix);
  manifest.add_param("category", args.category);
  manifest.add_param("k", args.k);
  manifest.add_param("threshold", args.threshold);
  manifest.add_param("direction", args.direction);

  auto w = load_matrix(args.matrix);
  NeighborhoodDirection direction;
  if (args.direction == "out")
    direction = NeighborhoodDirection::outgoing;
  else if (args.direction == "in")
    direction = NeighborhoodDirection::incoming;
  else
    throw std::runtime_error("--direction must be out or in");

  auto arcs = category_neighborhood(w, static_cast<cat_id>(args.category),
                                    args.k, args.threshold, direction);
  std::string out;
  for (const auto& arc : arcs) {
    out += std::to_string(arc.from);
    out += '\t';
    out += std::to_string(arc.to);
    out += '\t';
    out += format_score(arc.weight);
    out += '\n';
  }
  io::write_file(args.out, out);
  manifest.add_output("arcs", args.out);
  manifest.write(args.out);
}

// ---------------------------------------------------------------------------
// baseline / combine / eval

struct BaselineArgs {
  std::string method, graph, terms, out;
  std::vector<std::uint64_t> queries;
  bool all_queries = false;
};

void run_baseline(const BaselineArgs& args) {
  Manifest manifest("baseline");
  manifest.add_param("method", args.method);
  manifest.add_input("graph", args.graph);

  auto g = load_graph(args.graph);
  std::vector<node_id> queries;
  if (args.all_queries) {
    for (node_id d = 0; d < g.num_nodes(); ++d)
      if (g.out_degree(d) > 0) queries.push_back(d);
  } else {
    if (args.queries.empty())
      throw std::runtime_error("baseline needs --query or --all-queries");
    for (std::uint64_t q : args.queries)
      queries.push_back(static_cast<node_id>(q));
  }

  struct Scored {
    node_id target;
    double score;
  };
  std::string out;
  auto emit = [&](node_id q, std::vector<Scored> scored, bool ascending) {
    // Most unexpected first; ties by target id.
    std::sort(scored.begin(), scored.end(),
              [&](const Scored& a, const Scored& b) {
                if (a.score != b.score)
                  return ascending ? a.score < b.score : a.score > b.score;
                return a.target < b.target;
              });
    for (const auto& s : scored) {
      out += std::to_string(q);
      out += '\t';
      out += std::to_string(s.target);
      out += '\t';
      out += format_score(s.score);
      out += '\n';
    }
  };

  if (args.method == "aa") {
    auto sym = g.symmetric_view();
    for (node_id q : queries) {
      std::vector<Scored> scored;
      for (node_id t : g.neighbors(q))
        scored.push_back({t, adamic_adar(sym, q, t)});
      emit(q, std::move(scored), /*ascending=*/true);  // expectedness
    }
  } else if (args.method == "m2" || args.method == "m4") {
    if (args.terms.empty()) throw std::runtime_error("m2/m4 need --terms");
    manifest.add_input("terms", args.terms);
    auto corpus = load_term_documents(args.terms);
    static const TermDocument kEmptyDoc{};
    for (node_id q : queries) {
      const auto result_set = g.neighbors(q);
      std::vector<const TermDocument*> docs;
      docs.reserve(result_set.size());
      for (node_id t : result_set) docs.push_back(corpus.find(t));
      auto pool = pool_profile(docs);
      std::vector<Scored> scored;
      for (node_id t : result_set) {
        const TermDocument* doc = corpus.find(t);
        const TermDocument& d = doc ? *doc : kEmptyDoc;
        const double value = args.method == "m2"
                                 ? measure_m2(d, pool, corpus.dictionary_size)
                                 : measure_m4(d, pool);
        scored.push_back({t, value});
      }
      emit(q, std::move(scored), /*ascending=*/false);  // unexpectedness
    }
  } else {
    throw std::runtime_error("--method must be aa, m2 or m4");
  }

  io::write_file(args.out, out);
  manifest.add_output("scores", args.out);
  manifest.write(args.out);
}

struct CombineArgs {
  std::string spec, out;
  std::vector<std::string> inputs;  // name=path
};

void run_combine(const CombineArgs& args) {
  Manifest manifest("combine");
  manifest.add_param("spec", args.spec);

  struct SpecEntry {
    std::string name;
    double weight;
    Orientation orientation;
  };
  std::vector<SpecEntry> spec;
  for (std::string_view token : io::split(args.spec, ',')) {
    auto parts = io::split(token, ':');
    if (parts.size() != 3)
      throw std::runtime_error(
          "combine spec entries look like name:weight:exp|unexp");
    SpecEntry entry;
    entry.name = std::string(parts[0]);
    entry.weight = io::parse_real(parts[1], "--spec", 1);
    std::string orient(parts[2]);
    if (orient == "exp" || orient == "expectedness")
      entry.orientation = Orientation::expectedness;
    else if (orient == "unexp" || orient == "unexpectedness")
      entry.orientation = Orientation::unexpectedness;
    else
      throw std::runtime_error("orientation must be exp or unexp");
    spec.push_back(std::move(entry));
  }

  std::map<std::string, std::string> input_paths;
  for (const std::string& kv : args.inputs) {
    std::size_t eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("--input entries look like name=path");
    input_paths[kv.substr(0, eq)] = kv.substr(eq + 1);
  }

  // Per measure: query -> target -> score.
  using QueryScores = std::map<node_id, std::map<node_id, double>>;
  std::map<std::string, QueryScores> loaded;
  for (const auto& entry : spec) {
    auto it = input_paths.find(entry.name);
    if (it == input_paths.end())
      throw std::runtime_error("no --input provided for measure \"" +
                               entry.name + "\"");
    manifest.add_input(entry.name, it->second);
    std::string content = io::read_file(it->second);
    QueryScores& scores = loaded[entry.name];
    io::LineScanner scanner(content);
    std::string_view line;
    std::size_t line_no = 0;
    while (scanner.next(line, line_no)) {
      std::string_view data = io::strip_comment(line);
      if (data.empty()) continue;
      auto fields = io::split(data, '\t');
      if (fields.size() != 3)
        io::throw_parse_error(it->second, line_no,
                              "expected \"query TAB target TAB score\"");
      auto q = static_cast<node_id>(
          io::parse_uint(fields[0], it->second, line_no, kMaxId));
      auto t = static_cast<node_id>(
          io::parse_uint(fields[1], it->second, line_no, kMaxId));
      scores[q][t] = io::parse_real(fields[2], it->second, line_no);
    }
  }

  const QueryScores& reference = loaded[spec.front().name];
  for (const auto& entry : spec)
    if (loaded[entry.name].size() != reference.size())
      throw std::runtime_error("measure \"" + entry.name +
                               "\" covers a different query set");

  std::string out;
  std::uint64_t skipped_small = 0;
  for (const auto& [query, target_scores] : reference) {
    std::vector<node_id> targets;
    for (const auto& [t, s] : target_scores) targets.push_back(t);
    if (targets.size() < 2) {
      ++skipped_small;  // studentization needs at least two links
      continue;
    }
    std::vector<MeasureSeries> series;
    for (const auto& entry : spec) {
      auto qit = loaded[entry.name].find(query);
      if (qit == loaded[entry.name].end() ||
          qit->second.size() != targets.size())
        throw std::runtime_error("measure \"" + entry.name +
                                 "\" disagrees on the link pool of query " +
                                 std::to_string(query));
      MeasureSeries m;
      m.name = entry.name;
      m.weight = entry.weight;
      m.orientation = entry.orientation;
      for (node_id t : targets) {
        auto tit = qit->second.find(t);
        if (tit == qit->second.end())
          throw std::runtime_error("measure \"" + entry.name +
                                   "\" misses target " + std::to_string(t) +
                                   " of query " + std::to_string(query));
        m.values.push_back(tit->second);
      }
      series.push_back(std::move(m));
    }
    auto combined = combine(series);
    // Ascending combined expectedness: most unexpected first.
    std::vector<std::size_t> order(targets.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (combined[a] != combined[b]) return combined[a] < combined[b];
      return targets[a] < targets[b];
    });
    for (std::size_t i : order) {
      out += std::to_string(query);
      out += '\t';
      out += std::to_string(targets[i]);
      out += '\t';
      out += format_score(combined[i]);
      out += '\n';
    }
  }
  if (skipped_small > 0)
    std::fprintf(stderr, "combine: skipped %llu single-link queries\n",
                 static_cast<unsigned long long>(skipped_small));
  io::write_file(args.out, out);
  manifest.add_output("combined", args.out);
  manifest.write(args.out);
}

struct EvalArgs {
  std::string rankings_dir, judgments, out;
  std::string metric = "bpref";
  std::string percentiles = "1,2,5,8,10,15,25,50,100";
};

SystemRankings load_ranking_file(const std::string& path) {
  SystemRankings rankings;
  std::string content = io::read_file(path);
  io::LineScanner scanner(content);
  std::string_view line;
  std::size_t line_no = 0;
  while (scanner.next(line, line_no)) {
    std::string_view data = io::strip_comment(line);
    if (data.empty()) continue;
    auto fields = io::split(data, '\t');
    if (fields.size() < 2)
      io::throw_parse_error(path, line_no,
                            "expected \"query TAB target [TAB score]\"");
    auto q = static_cast<node_id>(
        io::parse_uint(fields[0], path, line_no, kMaxId));
    auto t = static_cast<node_id>(
        io::parse_uint(fields[1], path, line_no, kMaxId));
    rankings[q].push_back(t);  // line order is the ranking
  }
  return rankings;
}

void run_eval(const EvalArgs& args) {
  Manifest manifest("eval");
  manifest.add_input("judgments", args.judgments);
  manifest.add_param("metric", args.metric);

  auto dataset = load_judgments(args.judgments);
  std::fprintf(stderr,
               "eval: %zu of %zu queries retained (%zu judged links)\n",
               dataset.pools.size(), dataset.total_queries,
               dataset.total_judged_links);

  std::vector<std::pair<std::string, std::string>> systems;  // name, path
  for (const auto& entry :
       std::filesystem::directory_iterator(args.rankings_dir)) {
    if (!entry.is_regular_file()) continue;
    if (entry.path().extension() == ".manifest") continue;
    systems.emplace_back(entry.path().stem().string(), entry.path().string());
  }
  std::sort(systems.begin(), systems.end());
  if (systems.empty())
    throw std::runtime_error(args.rankings_dir + ": no ranking files");

  std::string out;
  if (args.metric == "bpref") {
    out += "system\tmean_bpref\tqueries\n";
    for (const auto& [name, path] : systems) {
      manifest.add_input("rankings:" + name, path);
      auto rankings = load_ranking_file(path);
      out += name;
      out += '\t' + format_score(mean_bpref(rankings, dataset));
      out += '\t' + std::to_string(dataset.pools.size());
      out += '\n';
    }
  } else if (args.metric == "pr") {
    std::vector<double> percentiles;
    for (std::string_view field : io::split(args.percentiles, ','))
      percentiles.push_back(io::parse_real(field, "--percentiles", 1));
    manifest.add_param("percentiles", args.percentiles);
    out += "system\tpercentile\tprecision\trecall\n";
    for (const auto& [name, path] : systems) {
      manifest.add_input("rankings:" + name, path);
      auto rankings = load_ranking_file(path);
      for (const auto& point :
           precision_recall_at_percentiles(rankings, dataset, percentiles)) {
        out += name;
        out += '\t' + format_score(point.percentile);
        out += '\t' + format_score(point.precision);
        out += '\t' + format_score(point.recall);
        out += '\n';
      }
    }
  } else {
    throw std::runtime_error("--metric must be bpref or pr");
  }
  io::write_file(args.out, out);
  manifest.add_output("table", args.out);
  manifest.write(args.out);
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  std::string out_prefix;
  std::uint64_t nodes = 5000;
  std::uint64_t cats = 100;
  std::uint32_t cats_per_node = 4;
  double noise = 0.0;
  std::uint64_t seed = 1;
  double positive_fraction = 0.42;
  double positive_value = 1.0;
  double negative_value = 1.0;
  double zipf = 0.0;
  std::string format = "binary";
};

void run_synth(const SynthArgs& args) {
  Manifest manifest("synth");
  manifest.add_param("nodes", args.nodes);
  manifest.add_param("categories", args.cats);
  manifest.add_param("cats-per-node",
                     static_cast<std::uint64_t>(args.cats_per_node));
  manifest.add_param("noise", args.noise);
  manifest.add_param("seed", args.seed);
  manifest.add_param("positive-fraction", args.positive_fraction);
  manifest.add_param("positive-value", args.positive_value);
  manifest.add_param("negative-value", args.negative_value);
  manifest.add_param("zipf", args.zipf);

  PlantedModel model;
  model.num_nodes = static_cast<node_id>(args.nodes);
  model.num_categories = static_cast<cat_id>(args.cats);
  model.categories_per_node = args.cats_per_node;
  model.noise_rate = args.noise;
  model.zipf_exponent = args.zipf;
  model.planted_w = random_planted_matrix(
      model.num_categories, args.positive_fraction, args.positive_value,
      args.negative_value, rng::mix(args.seed, rng::kSynthPlanted, 0));
  auto inst = generate(model, args.seed);

  const auto format = parse_graph_format(args.format);
  const std::string graph_path =
      args.out_prefix +
      (format == GraphFormat::packed_binary ? ".graph.bin" : ".graph.txt");
  save_graph(inst.graph, graph_path, format);
  save_categories(inst.cats, args.out_prefix + ".cats.tsv");
  save_matrix(model.planted_w, args.out_prefix + ".planted.bin");
  save_labels(inst, args.out_prefix + ".labels.tsv");
  manifest.add_output("graph", graph_path);
  manifest.add_output("cats", args.out_prefix + ".cats.tsv");
  manifest.add_output("planted", args.out_prefix + ".planted.bin");
  manifest.add_output("labels", args.out_prefix + ".labels.tsv");

  const double density =
      static_cast<double>(inst.graph.num_arcs()) /
      (static_cast<double>(model.num_nodes) * (model.num_nodes - 1));
  std::fprintf(stderr,
               "synth: %llu arcs (density %.4f), %llu flipped in, %llu "
               "flipped out%s\n",
               static_cast<unsigned long long>(inst.graph.num_arcs()),
               density, static_cast<unsigned long long>(inst.flipped_in),
               static_cast<unsigned long long>(inst.flipped_out),
               inst.density_warning
                   ? " (warning: model density above 1/2; negative sampling "
                     "will crawl)"
                   : "");
  manifest.write(args.out_prefix);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latent category-matrix toolkit for mining unexpected links"};
  app.set_version_flag("--version", kToolVersion);
  // Flags beat config-file values beat defaults; manifests record the
  // resolved result either way.
  app.set_config("--config", "",
                 "Read options from an INI/TOML file ([subcommand] sections)");
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* ingest_cmd =
      app.add_subcommand("ingest", "Map a string-keyed corpus to dense ids");
  ingest_cmd->add_option("--edges", ingest.edges, "Name-pair edge file (TSV)")
      ->required();
  ingest_cmd->add_option("--cats", ingest.cats,
                         "Page categories, \"page TAB cat [TAB cat...]\"");
  ingest_cmd->add_option("--out-graph", ingest.out_graph)->required();
  ingest_cmd->add_option("--out-nodes", ingest.out_nodes,
                         "Sidecar id-to-name table");
  ingest_cmd->add_option("--out-cats", ingest.out_cats);
  ingest_cmd->add_option("--out-cat-names", ingest.out_cat_names);
  ingest_cmd->add_option("--format", ingest.format, "text|binary")
      ->check(CLI::IsMember({"text", "binary"}));

  CleanseArgs cleanse;
  auto* cleanse_cmd = app.add_subcommand(
      "cleanse", "Select milestone categories and build the remap");
  cleanse_cmd->add_option("--hierarchy", cleanse.hierarchy)->required();
  cleanse_cmd->add_option("--k", cleanse.k, "Number of milestones");
  cleanse_cmd->add_option("--out-map", cleanse.out_map)->required();
  cleanse_cmd->add_option("--centrality", cleanse.centrality,
                          "undirected|in|out")
      ->check(CLI::IsMember({"undirected", "in", "out"}));
  cleanse_cmd->add_option("--in-cats", cleanse.in_cats,
                          "Raw categories to remap");
  cleanse_cmd->add_option("--out-cats", cleanse.out_cats);
  cleanse_cmd->add_option("--threads", cleanse.threads);

  TrainArgs train_args;
  auto* train_cmd =
      app.add_subcommand("train", "Learn the category matrix online");
  train_cmd->add_option("--graph", train_args.graph)->required();
  train_cmd->add_option("--cats", train_args.cats)->required();
  train_cmd->add_option("--num-categories", train_args.num_categories,
                        "Universe size (0 = infer)");
  train_cmd->add_option("--k-aggr", train_args.k_aggr, "Aggressiveness cap");
  train_cmd->add_option("--seed", train_args.seed);
  train_cmd->add_option("--passes", train_args.passes);
  train_cmd->add_option("--out", train_args.out)->required();
  train_cmd->add_option("--save-width", train_args.save_width, "8 or 4 bytes");

  TrainNaiveArgs naive_args;
  auto* naive_cmd = app.add_subcommand(
      "train-naive", "Counting estimator with add-one smoothing");
  naive_cmd->add_option("--graph", naive_args.graph)->required();
  naive_cmd->add_option("--cats", naive_args.cats)->required();
  naive_cmd->add_option("--num-categories", naive_args.num_categories);
  naive_cmd->add_option("--out", naive_args.out)->required();
  naive_cmd->add_option("--save-width", naive_args.save_width);
  naive_cmd->add_option("--threads", naive_args.threads);

  CrossvalArgs crossval_args;
  auto* crossval_cmd =
      app.add_subcommand("crossval", "K-fold validation of the learner");
  crossval_cmd->add_option("--graph", crossval_args.graph)->required();
  crossval_cmd->add_option("--cats", crossval_args.cats)->required();
  crossval_cmd->add_option("--num-categories", crossval_args.num_categories);
  crossval_cmd->add_option("--folds", crossval_args.folds);
  crossval_cmd->add_option("--k-aggr", crossval_args.k_aggr);
  crossval_cmd->add_option("--seed", crossval_args.seed);
  crossval_cmd->add_option("--passes", crossval_args.passes);
  crossval_cmd->add_option("--threads", crossval_args.threads);
  crossval_cmd->add_option("--out", crossval_args.out)->required();

  ScoreArgs score_args;
  auto* score_cmd =
      app.add_subcommand("score", "Score every arc of the graph");
  score_cmd->add_option("--graph", score_args.graph)->required();
  score_cmd->add_option("--cats", score_args.cats)->required();
  score_cmd->add_option("--num-categories", score_args.num_categories);
  score_cmd->add_option("--matrix", score_args.matrix)->required();
  score_cmd->add_option("--threads", score_args.threads);
  score_cmd->add_option("--out", score_args.out)->required();

  RankArgs rank_args;
  auto* rank_cmd = app.add_subcommand(
      "rank", "Rank a query's out-links, most unexpected first");
  rank_cmd->add_option("--graph", rank_args.graph)->required();
  rank_cmd->add_option("--cats", rank_args.cats)->required();
  rank_cmd->add_option("--num-categories", rank_args.num_categories);
  rank_cmd->add_option("--matrix", rank_args.matrix)->required();
  rank_cmd->add_option("--query", rank_args.queries, "Query node id")
      ->take_all();
  rank_cmd->add_flag("--all-queries", rank_args.all_queries);
  rank_cmd->add_option("--alpha", rank_args.alpha,
                       "Keep the floor(alpha*t) most unexpected links");
  rank_cmd->add_option("--out", rank_args.out)->required();

  PartitionArgs partition_args;
  auto* partition_cmd = app.add_subcommand(
      "partition", "Split links into explainable and unexplainable");
  partition_cmd->add_option("--graph", partition_args.graph)->required();
  partition_cmd->add_option("--cats", partition_args.cats)->required();
  partition_cmd->add_option("--num-categories", partition_args.num_categories);
  partition_cmd->add_option("--matrix", partition_args.matrix)->required();
  partition_cmd->add_option("--threads", partition_args.threads);
  partition_cmd->add_option("--out", partition_args.out, "Counts report")
      ->required();
  partition_cmd->add_option("--out-explainable",
                            partition_args.out_explainable);
  partition_cmd->add_option("--out-unexplainable",
                            partition_args.out_unexplainable);

  NeighborhoodArgs neighborhood_args;
  auto* neighborhood_cmd = app.add_subcommand(
      "neighborhood", "Strongest category neighbors of one category");
  neighborhood_cmd->add_option("--matrix", neighborhood_args.matrix)
      ->required();
  neighborhood_cmd->add_option("--category", neighborhood_args.category)
      ->required();
  neighborhood_cmd->add_option("--k", neighborhood_args.k);
  neighborhood_cmd->add_option("--threshold", neighborhood_args.threshold);
  neighborhood_cmd->add_option("--direction", neighborhood_args.direction,
                               "out|in")
      ->check(CLI::IsMember({"out", "in"}));
  neighborhood_cmd->add_option("--out", neighborhood_args.out)->required();

  BaselineArgs baseline_args;
  auto* baseline_cmd = app.add_subcommand(
      "baseline", "Competing (un)expectedness measures per query");
  baseline_cmd->add_option("--method", baseline_args.method, "aa|m2|m4")
      ->required()
      ->check(CLI::IsMember({"aa", "m2", "m4"}));
  baseline_cmd->add_option("--graph", baseline_args.graph)->required();
  baseline_cmd->add_option("--terms", baseline_args.terms,
                           "Term-document file (m2/m4)");
  baseline_cmd->add_option("--query", baseline_args.queries)->take_all();
  baseline_cmd->add_flag("--all-queries", baseline_args.all_queries);
  baseline_cmd->add_option("--out", baseline_args.out)->required();

  CombineArgs combine_args;
  auto* combine_cmd = app.add_subcommand(
      "combine", "Linear combination of studentized measures");
  combine_cmd
      ->add_option("--spec", combine_args.spec,
                   "e.g. \"llamafur:0.5:exp,aa:0.5:exp\"")
      ->required();
  combine_cmd
      ->add_option("--input", combine_args.inputs,
                   "name=path of a per-query score file")
      ->take_all();
  combine_cmd->add_option("--out", combine_args.out)->required();

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand(
      "eval", "Score system rankings against human judgments");
  eval_cmd
      ->add_option("--rankings", eval_args.rankings_dir,
                   "Directory with one ranking file per system")
      ->required();
  eval_cmd->add_option("--judgments", eval_args.judgments)->required();
  eval_cmd->add_option("--metric", eval_args.metric, "bpref|pr")
      ->check(CLI::IsMember({"bpref", "pr"}));
  eval_cmd->add_option("--percentiles", eval_args.percentiles);
  eval_cmd->add_option("--out", eval_args.out)->required();

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand(
      "synth", "Planted-matrix synthetic instance generator");
  synth_cmd->add_option("--nodes", synth_args.nodes);
  synth_cmd->add_option("--cats", synth_args.cats);
  synth_cmd->add_option("--cats-per-node", synth_args.cats_per_node);
  synth_cmd->add_option("--noise", synth_args.noise);
  synth_cmd->add_option("--seed", synth_args.seed);
  synth_cmd->add_option("--positive-fraction", synth_args.positive_fraction);
  synth_cmd->add_option("--positive-value", synth_args.positive_value);
  synth_cmd->add_option("--negative-value", synth_args.negative_value);
  synth_cmd->add_option("--zipf", synth_args.zipf,
                        "Zipf exponent for category popularity (0 = uniform)");
  synth_cmd->add_option("--out-prefix", synth_args.out_prefix)->required();
  synth_cmd->add_option("--format", synth_args.format, "text|binary")
      ->check(CLI::IsMember({"text", "binary"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // usage error
  }

  try {
    if (*ingest_cmd) run_ingest(ingest);
    if (*cleanse_cmd) run_cleanse(cleanse);
    if (*train_cmd) run_train(train_args);
    if (*naive_cmd) run_train_naive(naive_args);
    if (*crossval_cmd) run_crossval(crossval_args);
    if (*score_cmd) run_score(score_args);
    if (*rank_cmd) run_rank(rank_args);
    if (*partition_cmd) run_partition(partition_args);
    if (*neighborhood_cmd) run_neighborhood(neighborhood_args);
    if (*baseline_cmd) run_baseline(baseline_args);
    if (*combine_cmd) run_combine(combine_args);
    if (*eval_cmd) run_eval(eval_args);
    if (*synth_cmd) run_synth(synth_args);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;  // data error
  }
  return 0;
}
