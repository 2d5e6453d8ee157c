#include <cmath>
#include <map>

#include "doctest.h"
#include "llamafur/naive_learner.hpp"
#include "llamafur/rng.hpp"
#include "test_util.hpp"

using namespace llamafur;

namespace {

// Quadratic oracle: loops over all document pairs in D_c × D_c'.
std::map<std::pair<cat_id, cat_id>, std::uint64_t> brute_force_counts(
    const DocumentGraph& g, const CategoryAssignment& cats) {
  std::map<std::pair<cat_id, cat_id>, std::uint64_t> counts;
  for (cat_id c = 0; c < cats.num_categories(); ++c)
    for (cat_id cp = 0; cp < cats.num_categories(); ++cp)
      for (node_id d = 0; d < g.num_nodes(); ++d)
        for (node_id dp = 0; dp < g.num_nodes(); ++dp) {
          const auto cd = cats.set_of(d);
          const auto cdp = cats.set_of(dp);
          if (std::find(cd.begin(), cd.end(), c) == cd.end()) continue;
          if (std::find(cdp.begin(), cdp.end(), cp) == cdp.end()) continue;
          if (g.has_arc(d, dp)) ++counts[{c, cp}];
        }
  return counts;
}

}  // namespace

TEST_CASE("single arc with single categories counts one cell") {
  auto g = DocumentGraph::from_arcs(2, {{0, 1}});
  CategoryAssignment cats(2, 2);
  cats.assign(0, {0});
  cats.assign(1, {1});
  auto counts = count_pairs(g, cats);
  CHECK(counts.count(0, 1) == 1);
  CHECK(counts.count(1, 0) == 0);
  CHECK(counts.link_counts.size() == 1);
  CHECK(counts.category_sizes[0] == 1);
  CHECK(counts.category_sizes[1] == 1);
}

TEST_CASE("an arc increments the full outer product of categories") {
  auto g = DocumentGraph::from_arcs(2, {{0, 1}});
  CategoryAssignment cats(5, 2);
  cats.assign(0, {0, 1});
  cats.assign(1, {2, 3, 4});
  auto counts = count_pairs(g, cats);
  CHECK(counts.link_counts.size() == 6);
  for (cat_id c : {0u, 1u})
    for (cat_id cp : {2u, 3u, 4u}) CHECK(counts.count(c, cp) == 1);
}

TEST_CASE("count_pairs matches the quadratic oracle on random instances") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    auto g = testutil::random_graph(60, 300, seed + 200,
                                    /*allow_self_loops=*/true);
    auto cats = testutil::random_categories(60, 8, 3, seed + 300);
    auto fast = count_pairs(g, cats);
    auto slow = brute_force_counts(g, cats);
    for (cat_id c = 0; c < 8; ++c)
      for (cat_id cp = 0; cp < 8; ++cp) {
        auto it = slow.find({c, cp});
        const std::uint64_t expected = it == slow.end() ? 0 : it->second;
        CHECK(fast.count(c, cp) == expected);
      }
  }
}

TEST_CASE("naive weights follow the smoothed log formula") {
  auto g = DocumentGraph::from_arcs(2, {{0, 1}});
  CategoryAssignment cats(2, 2);
  cats.assign(0, {0});
  cats.assign(1, {1});
  auto w = naive_matrix(count_pairs(g, cats));
  // one link, |D_c| = |D_c'| = 1
  CHECK(w.at(0, 1) == doctest::Approx(std::log(0.5)).epsilon(1e-12));
  // zero links
  CHECK(w.at(1, 0) == doctest::Approx(std::log(0.25)).epsilon(1e-12));
  CHECK(w.all_finite());
}

TEST_CASE("adding a link strictly increases the cell weight") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    auto cats = testutil::random_categories(30, 6, 2, seed + 400);
    auto g1 = testutil::random_graph(30, 80, seed + 500);
    auto w1 = naive_matrix(count_pairs(g1, cats));

    // Add one more arc and compare the touched cells.
    std::vector<std::pair<node_id, node_id>> arcs;
    for (node_id s = 0; s < 30; ++s)
      for (node_id t : g1.neighbors(s)) arcs.emplace_back(s, t);
    node_id extra_s = 0, extra_t = 0;
    bool found = false;
    for (node_id s = 0; s < 30 && !found; ++s)
      for (node_id t = 0; t < 30 && !found; ++t)
        if (s != t && !g1.has_arc(s, t) && !cats.set_of(s).empty() &&
            !cats.set_of(t).empty()) {
          extra_s = s, extra_t = t;
          found = true;
        }
    REQUIRE(found);
    arcs.emplace_back(extra_s, extra_t);
    auto w2 = naive_matrix(
        count_pairs(DocumentGraph::from_arcs(30, std::move(arcs)), cats));
    for (cat_id c : cats.set_of(extra_s))
      for (cat_id cp : cats.set_of(extra_t)) CHECK(w2.at(c, cp) > w1.at(c, cp));
  }
}

TEST_CASE("log weights rank document pairs like the probability product") {
  // Small enough to compare every ordered document pair against every other.
  auto g = testutil::random_graph(8, 20, 600);
  auto cats = testutil::random_categories(8, 4, 2, 601);
  auto counts = count_pairs(g, cats);
  auto w = naive_matrix(counts);

  auto smoothed = [&](cat_id c, cat_id cp) {
    return (static_cast<double>(counts.count(c, cp)) + 1.0) /
           ((static_cast<double>(counts.category_sizes[c]) + 1.0) *
            (static_cast<double>(counts.category_sizes[cp]) + 1.0));
  };
  auto log_score = [&](node_id d, node_id dp) {
    double s = 0.0;
    for (cat_id c : cats.set_of(d))
      for (cat_id cp : cats.set_of(dp)) s += w.at(c, cp);
    return s;
  };
  auto product_score = [&](node_id d, node_id dp) {
    double p = 1.0;
    for (cat_id c : cats.set_of(d))
      for (cat_id cp : cats.set_of(dp)) p *= smoothed(c, cp);
    return p;
  };

  std::vector<std::pair<node_id, node_id>> pairs;
  for (node_id a = 0; a < 8; ++a)
    for (node_id b = 0; b < 8; ++b) pairs.emplace_back(a, b);
  for (const auto& [a, b] : pairs)
    for (const auto& [c, d] : pairs) {
      const double lhs = log_score(a, b) - log_score(c, d);
      const double rhs = product_score(a, b) - product_score(c, d);
      if (std::abs(rhs) > 1e-12) CHECK(lhs * rhs > 0.0);
    }
}

TEST_CASE("weights of non-empty categories are strictly negative") {
  auto g = testutil::random_graph(40, 150, 700);
  auto cats = testutil::random_categories(40, 6, 3, 701);
  auto counts = count_pairs(g, cats);
  auto w = naive_matrix(counts);
  for (cat_id c = 0; c < 6; ++c)
    for (cat_id cp = 0; cp < 6; ++cp) {
      const double numer = static_cast<double>(counts.count(c, cp)) + 1.0;
      const double denom =
          (static_cast<double>(counts.category_sizes[c]) + 1.0) *
          (static_cast<double>(counts.category_sizes[cp]) + 1.0);
      if (numer < denom) CHECK(w.at(c, cp) < 0.0);
      CHECK(std::isfinite(w.at(c, cp)));
    }
}

TEST_CASE("sharded counting matches the single-threaded result") {
  auto g = testutil::random_graph(80, 400, 800, /*allow_self_loops=*/true);
  auto cats = testutil::random_categories(80, 10, 3, 801);
  auto one = count_pairs(g, cats, 1);
  auto four = count_pairs(g, cats, 4);
  CHECK(one.category_sizes == four.category_sizes);
  CHECK(one.link_counts.size() == four.link_counts.size());
  for (cat_id c = 0; c < 10; ++c)
    for (cat_id cp = 0; cp < 10; ++cp)
      CHECK(one.count(c, cp) == four.count(c, cp));
}

TEST_CASE("pair probability is exposed and guarded") {
  auto g = DocumentGraph::from_arcs(3, {{0, 1}, {0, 2}});
  CategoryAssignment cats(3, 3);
  cats.assign(0, {0});
  cats.assign(1, {1});
  cats.assign(2, {1});
  auto counts = count_pairs(g, cats);
  CHECK(pair_probability(counts, 0, 1) == doctest::Approx(1.0));
  CHECK(pair_probability(counts, 2, 0) == 0.0);  // empty category
}
