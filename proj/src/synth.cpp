#include "llamafur/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "llamafur/eval.hpp"
#include "llamafur/io_util.hpp"
#include "llamafur/rng.hpp"
#include "llamafur/scoring.hpp"

namespace llamafur {

bool SynthInstance::is_unexpected(node_id s, node_id t) const {
  return std::binary_search(unexpected_arcs.begin(), unexpected_arcs.end(),
                            std::make_pair(s, t));
}

CategoryMatrix random_planted_matrix(cat_id dim, double positive_fraction,
                                     double positive_value,
                                     double negative_value,
                                     std::uint64_t seed) {
  CategoryMatrix w(dim);
  for (cat_id c = 0; c < dim; ++c)
    for (cat_id cp = 0; cp < dim; ++cp) {
      const double u =
          rng::unit_real(rng::mix(seed, rng::kSynthPlanted, c, cp));
      w.at(c, cp) = u < positive_fraction ? positive_value : -negative_value;
    }
  return w;
}

namespace {

std::vector<cat_id> sample_categories(const PlantedModel& model,
                                      std::uint64_t seed, node_id d,
                                      const std::vector<double>& zipf_cdf) {
  std::vector<cat_id> cats;
  cats.reserve(model.categories_per_node);
  std::uint64_t counter = 0;
  while (cats.size() < model.categories_per_node) {
    const std::uint64_t draw =
        rng::mix(seed, rng::kSynthCategories, d, counter++);
    cat_id c;
    if (zipf_cdf.empty()) {
      c = static_cast<cat_id>(rng::bounded(draw, model.num_categories));
    } else {
      const double u = rng::unit_real(draw);
      c = static_cast<cat_id>(
          std::lower_bound(zipf_cdf.begin(), zipf_cdf.end(), u) -
          zipf_cdf.begin());
      if (c >= model.num_categories) c = model.num_categories - 1;
    }
    if (std::find(cats.begin(), cats.end(), c) == cats.end()) cats.push_back(c);
  }
  std::sort(cats.begin(), cats.end());
  return cats;
}

}  // namespace

SynthInstance generate(const PlantedModel& model, std::uint64_t seed) {
  if (model.num_nodes == 0 || model.num_categories == 0)
    throw std::invalid_argument("model needs nodes and categories");
  if (model.categories_per_node == 0 ||
      model.categories_per_node > model.num_categories)
    throw std::invalid_argument("categories_per_node out of range");
  if (model.planted_w.dim() != model.num_categories)
    throw std::invalid_argument("planted matrix dimension mismatch");
  if (model.noise_rate < 0.0 || model.noise_rate >= 1.0)
    throw std::invalid_argument("noise_rate must be in [0, 1)");

  std::vector<double> zipf_cdf;
  if (model.zipf_exponent > 0.0) {
    zipf_cdf.resize(model.num_categories);
    double total = 0.0;
    for (cat_id c = 0; c < model.num_categories; ++c) {
      total += 1.0 / std::pow(static_cast<double>(c) + 1.0,
                              model.zipf_exponent);
      zipf_cdf[c] = total;
    }
    for (double& v : zipf_cdf) v /= total;
  }

  SynthInstance inst;
  CategoryAssignment cats(model.num_categories, model.num_nodes);
  for (node_id d = 0; d < model.num_nodes; ++d)
    cats.assign(d, sample_categories(model, seed, d, zipf_cdf));

  const bool exact = model.num_nodes <= model.exact_enumeration_limit;
  std::vector<std::pair<node_id, node_id>> arcs;
  std::vector<node_id> candidates;

  for (node_id d = 0; d < model.num_nodes; ++d) {
    const auto rows = cats.set_of(d);
    candidates.clear();
    if (exact) {
      for (node_id t = 0; t < model.num_nodes; ++t)
        if (t != d) candidates.push_back(t);
    } else {
      std::uint64_t counter = 0;
      while (candidates.size() < model.sampled_candidates_per_node &&
             counter < 4 * model.sampled_candidates_per_node) {
        node_id t = static_cast<node_id>(rng::bounded(
            rng::mix(seed, rng::kSynthCategories ^ 0xA5A5u, d, counter++),
            model.num_nodes));
        if (t != d) candidates.push_back(t);
      }
      std::sort(candidates.begin(), candidates.end());
      candidates.erase(std::unique(candidates.begin(), candidates.end()),
                       candidates.end());
    }
    for (node_id t : candidates) {
      const double score = model.planted_w.block_sum(rows, cats.set_of(t));
      const bool model_arc = score > 0.0;
      if (model_arc) ++inst.model_arcs;
      bool present = model_arc;
      if (model.noise_rate > 0.0) {
        const double u =
            rng::unit_real(rng::mix(seed, rng::kSynthFlip, d, t));
        if (u < model.noise_rate) present = !present;
      }
      if (present) {
        arcs.emplace_back(d, t);
        if (!model_arc) {
          inst.unexpected_arcs.emplace_back(d, t);
          ++inst.flipped_in;
        }
      } else if (model_arc) {
        ++inst.flipped_out;
      }
    }
  }

  const std::uint64_t candidate_pairs =
      exact ? static_cast<std::uint64_t>(model.num_nodes) *
                  (model.num_nodes - 1)
            : 0;
  if (candidate_pairs > 0 &&
      inst.model_arcs * 2 > candidate_pairs)
    inst.density_warning = true;

  inst.graph = DocumentGraph::from_arcs(model.num_nodes, std::move(arcs));
  inst.cats = std::move(cats);
  std::sort(inst.unexpected_arcs.begin(), inst.unexpected_arcs.end());
  return inst;
}

namespace {

struct ConfusionCounts {
  std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
};

RecoveryReport report_from(const ConfusionCounts& c, double bpref_value) {
  RecoveryReport r;
  r.eval_pairs = c.tp + c.fp + c.tn + c.fn;
  r.accuracy = r.eval_pairs == 0
                   ? 0.0
                   : static_cast<double>(c.tp + c.tn) / r.eval_pairs;
  r.precision =
      c.tp + c.fp == 0 ? 0.0 : static_cast<double>(c.tp) / (c.tp + c.fp);
  r.recall =
      c.tp + c.fn == 0 ? 0.0 : static_cast<double>(c.tp) / (c.tp + c.fn);
  r.f_measure = r.precision + r.recall == 0.0
                    ? 0.0
                    : 2.0 * r.precision * r.recall / (r.precision + r.recall);
  r.unexpected_bpref = bpref_value;
  return r;
}

// Per-arc relevance flags in adjacency order, shared by both rankings.
std::vector<char> relevance_flags(const SynthInstance& instance) {
  std::vector<char> flags;
  flags.reserve(instance.graph.num_arcs());
  for (node_id s = 0; s < instance.graph.num_nodes(); ++s)
    for (node_id t : instance.graph.neighbors(s))
      flags.push_back(instance.is_unexpected(s, t) ? 1 : 0);
  return flags;
}

double permuted_bpref(const SynthInstance& instance,
                      const std::vector<char>& flags,
                      const std::vector<std::uint64_t>& order) {
  std::vector<char> ranked(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) ranked[i] = flags[order[i]];
  const std::uint64_t relevant = instance.unexpected_arcs.size();
  auto value =
      bpref_core(ranked, relevant, instance.graph.num_arcs() - relevant);
  return value ? *value : 0.0;
}

}  // namespace

double unexpectedness_bpref(const CategoryMatrix& w,
                            const SynthInstance& instance,
                            const CategoryAssignment& cats) {
  const std::uint64_t m = instance.graph.num_arcs();
  std::vector<double> scores;
  scores.reserve(m);
  for (node_id s = 0; s < instance.graph.num_nodes(); ++s) {
    const auto rows = cats.set_of(s);
    for (node_id t : instance.graph.neighbors(s))
      scores.push_back(rows.empty() || cats.set_of(t).empty()
                           ? 0.0
                           : w.block_sum(rows, cats.set_of(t)));
  }
  std::vector<std::uint64_t> order(m);
  for (std::uint64_t k = 0; k < m; ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::uint64_t a, std::uint64_t b) {
    if (scores[a] != scores[b]) return scores[a] < scores[b];
    return a < b;  // adjacency order breaks score ties
  });
  return permuted_bpref(instance, relevance_flags(instance), order);
}

double null_ranking_bpref(const SynthInstance& instance, std::uint64_t seed) {
  const std::uint64_t m = instance.graph.num_arcs();
  std::vector<std::uint64_t> keys;
  keys.reserve(m);
  for (node_id s = 0; s < instance.graph.num_nodes(); ++s)
    for (node_id t : instance.graph.neighbors(s))
      keys.push_back(rng::mix(seed, rng::kNullRanking, s, t));
  std::vector<std::uint64_t> order(m);
  for (std::uint64_t k = 0; k < m; ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::uint64_t a, std::uint64_t b) {
    if (keys[a] != keys[b]) return keys[a] < keys[b];
    return a < b;
  });
  return permuted_bpref(instance, relevance_flags(instance), order);
}

RecoveryReport evaluate_recovery(const CategoryMatrix& trained_w,
                                 const SynthInstance& instance,
                                 const CategoryAssignment& cats,
                                 std::uint64_t seed,
                                 std::uint64_t samples_per_class) {
  const DocumentGraph& g = instance.graph;
  if (g.num_arcs() == 0)
    throw std::invalid_argument("instance has no arcs to evaluate");
  if (g.num_arcs() >=
      static_cast<std::uint64_t>(g.num_nodes()) * (g.num_nodes() - 1))
    throw std::invalid_argument("instance has no non-arc pairs to sample");

  ConfusionCounts counts;
  std::uint64_t counter = 0;
  for (std::uint64_t i = 0; i < samples_per_class; ++i) {
    const std::uint64_t k = rng::bounded(
        rng::mix(seed, rng::kRecoverySample, 0, counter++), g.num_arcs());
    auto [s, t] = g.arc_at(k);
    const bool predicted = score_pair(trained_w, cats, s, t) > 0.0;
    predicted ? ++counts.tp : ++counts.fn;
  }
  for (std::uint64_t i = 0; i < samples_per_class; ++i) {
    node_id s, t;
    do {
      s = static_cast<node_id>(rng::bounded(
          rng::mix(seed, rng::kRecoverySample, 1, counter++), g.num_nodes()));
      t = static_cast<node_id>(rng::bounded(
          rng::mix(seed, rng::kRecoverySample, 1, counter++), g.num_nodes()));
    } while (s == t || g.has_arc(s, t));
    const bool predicted = score_pair(trained_w, cats, s, t) > 0.0;
    predicted ? ++counts.fp : ++counts.tn;
  }

  return report_from(counts,
                     unexpectedness_bpref(trained_w, instance, cats));
}

void save_labels(const SynthInstance& instance, const std::string& path) {
  std::string out;
  for (std::uint64_t k = 0; k < instance.graph.num_arcs(); ++k) {
    auto [s, t] = instance.graph.arc_at(k);
    out += std::to_string(s);
    out += '\t';
    out += std::to_string(t);
    out += '\t';
    out += instance.is_unexpected(s, t) ? '1' : '0';
    out += '\n';
  }
  io::write_file(path, out);
}

std::vector<std::pair<node_id, node_id>> load_labels(const std::string& path) {
  std::string content = io::read_file(path);
  std::vector<std::pair<node_id, node_id>> unexpected;
  io::LineScanner scanner(content);
  std::string_view line;
  std::size_t line_no = 0;
  while (scanner.next(line, line_no)) {
    std::string_view data = io::strip_comment(line);
    if (data.empty()) continue;
    auto fields = io::split(data, '\t');
    if (fields.size() != 3)
      io::throw_parse_error(path, line_no,
                            "expected \"source TAB target TAB flag\"");
    std::uint64_t s = io::parse_uint(fields[0], path, line_no, kMaxId);
    std::uint64_t t = io::parse_uint(fields[1], path, line_no, kMaxId);
    std::uint64_t flag = io::parse_uint(fields[2], path, line_no, 1);
    if (flag)
      unexpected.emplace_back(static_cast<node_id>(s),
                              static_cast<node_id>(t));
  }
  std::sort(unexpected.begin(), unexpected.end());
  return unexpected;
}

}  // namespace llamafur
