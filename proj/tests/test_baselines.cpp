#include <cmath>
#include <unordered_set>

#include "doctest.h"
#include "llamafur/baselines.hpp"
#include "llamafur/io_util.hpp"
#include "llamafur/rng.hpp"
#include "test_util.hpp"

using namespace llamafur;

TEST_CASE("adamic-adar basics on hand-built graphs") {
  // No common neighbors.
  auto g0 = DocumentGraph::from_arcs(4, {{0, 1}, {2, 3}}).symmetric_view();
  CHECK(adamic_adar(g0, 0, 2) == 0.0);

  // One common neighbor (node 2) with symmetric degree 3.
  auto g1 = DocumentGraph::from_arcs(5, {{0, 2}, {1, 2}, {2, 4}})
                .symmetric_view();
  CHECK(g1.out_degree(2) == 3);
  CHECK(adamic_adar(g1, 0, 1) ==
        doctest::Approx(1.0 / std::log(3.0)).epsilon(1e-12));

  // Degree-1 common neighbors are skipped instead of dividing by log 1.
  auto g2 = DocumentGraph::from_arcs(3, {{0, 2}, {1, 2}});
  // Directed view: node 2 has out-degree 0; use a hand-made symmetric graph
  // where the common neighbor has degree exactly 2.
  auto g3 = g2.symmetric_view();
  CHECK(g3.out_degree(2) == 2);
  CHECK(adamic_adar(g3, 0, 1) ==
        doctest::Approx(1.0 / std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("adamic-adar matches a brute-force oracle and is symmetric") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto g = testutil::random_graph(100, 500, seed + 900).symmetric_view();
    for (std::uint64_t q = 0; q < 100; ++q) {
      auto d = static_cast<node_id>(rng::bounded(rng::mix(seed, 1, q), 100));
      auto dp = static_cast<node_id>(rng::bounded(rng::mix(seed, 2, q), 100));
      std::unordered_set<node_id> first(g.neighbors(d).begin(),
                                        g.neighbors(d).end());
      double expected = 0.0;
      for (node_id x : g.neighbors(dp))
        if (first.count(x) && g.out_degree(x) > 1)
          expected += 1.0 / std::log(static_cast<double>(g.out_degree(x)));
      CHECK(adamic_adar(g, d, dp) ==
            doctest::Approx(expected).epsilon(1e-12));
      CHECK(adamic_adar(g, d, dp) ==
            doctest::Approx(adamic_adar(g, dp, d)).epsilon(1e-12));
    }
  }
}

namespace {

TermDocument make_doc(node_id id,
                      std::vector<std::pair<term_id, std::uint32_t>> tf) {
  TermDocument d;
  d.doc = id;
  d.term_freqs = std::move(tf);
  std::sort(d.term_freqs.begin(), d.term_freqs.end());
  return d;
}

}  // namespace

TEST_CASE("m2 is zero on an identical profile and clamps overrepresented terms") {
  auto d = make_doc(0, {{0, 2}, {1, 4}});
  const TermDocument* pool_docs[] = {&d};
  auto pool = pool_profile(pool_docs);
  CHECK(measure_m2(d, pool, 10) == 0.0);

  // Term 1 overrepresented in the pool contributes 0, never negative.
  auto other = make_doc(1, {{1, 40}});
  const TermDocument* docs2[] = {&d, &other};
  auto pool2 = pool_profile(docs2);
  const double m2 = measure_m2(d, pool2, 10);
  // term 0: ntf_d = 0.5, ntf_R = 2/44; term 1: ntf_d = 1, ntf_R = 1 -> 0
  CHECK(m2 == doctest::Approx((0.5 - 2.0 / 44.0) / 10.0).epsilon(1e-12));
}

TEST_CASE("m2 of a term absent from the pool spends its full ntf") {
  auto d = make_doc(0, {{5, 3}});
  auto r1 = make_doc(1, {{0, 1}});
  auto r2 = make_doc(2, {{1, 2}});
  const TermDocument* docs[] = {&r1, &r2};
  auto pool = pool_profile(docs);
  // ntf_d(5) = 1.0, absent from R, m = 10 -> 0.1
  CHECK(measure_m2(d, pool, 10) == doctest::Approx(0.1).epsilon(1e-12));

  TermDocument empty;
  CHECK(measure_m2(empty, pool, 10) == 0.0);
}

TEST_CASE("m2 stays within [0, 1] on random fixtures") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::vector<TermDocument> docs;
    for (node_id i = 0; i < 5; ++i) {
      std::vector<std::pair<term_id, std::uint32_t>> tf;
      for (term_id t = 0; t < 12; ++t)
        if (rng::bounded(rng::mix(seed, i, t), 3) == 0)
          tf.emplace_back(
              t, 1 + static_cast<std::uint32_t>(
                         rng::bounded(rng::mix(seed, i, t + 100), 9)));
      docs.push_back(make_doc(i, std::move(tf)));
    }
    std::vector<const TermDocument*> ptrs;
    for (const auto& d : docs) ptrs.push_back(&d);
    auto pool = pool_profile(ptrs);
    for (const auto& d : docs) {
      const double m2 = measure_m2(d, pool, 12);
      CHECK(m2 >= 0.0);
      CHECK(m2 <= 1.0);
    }
  }
}

TEST_CASE("m4 peaks on rare terms and vanishes on ubiquitous ones") {
  // Pool of 10 docs; term 7 occurs in exactly one of them.
  std::vector<TermDocument> docs;
  for (node_id i = 0; i < 10; ++i)
    docs.push_back(make_doc(i, {{0, 1}, {1, 2}}));
  docs[3].term_freqs.emplace_back(7, 1);
  std::sort(docs[3].term_freqs.begin(), docs[3].term_freqs.end());
  std::vector<const TermDocument*> ptrs;
  for (const auto& d : docs) ptrs.push_back(&d);
  auto pool = pool_profile(ptrs);

  auto q = make_doc(99, {{7, 5}});
  // ntf = 1.0, |R| = 10, df = 1 -> ln 10
  CHECK(measure_m4(q, pool) == doctest::Approx(std::log(10.0)).epsilon(1e-12));

  auto common = make_doc(98, {{0, 3}, {1, 3}});
  CHECK(measure_m4(common, pool) == 0.0);  // df = |R| for both terms

  TermDocument empty;
  CHECK(measure_m4(empty, pool) == 0.0);
}

TEST_CASE("m4 agrees with an exhaustive max oracle") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::vector<TermDocument> docs;
    for (node_id i = 0; i < 6; ++i) {
      std::vector<std::pair<term_id, std::uint32_t>> tf;
      for (term_id t = 0; t < 9; ++t)
        if (rng::bounded(rng::mix(seed + 40, i, t), 2) == 0)
          tf.emplace_back(
              t, 1 + static_cast<std::uint32_t>(
                         rng::bounded(rng::mix(seed + 41, i, t), 5)));
      docs.push_back(make_doc(i, std::move(tf)));
    }
    std::vector<const TermDocument*> ptrs;
    for (const auto& d : docs) ptrs.push_back(&d);
    auto pool = pool_profile(ptrs);

    for (const auto& d : docs) {
      double expected = 0.0;
      for (const auto& [t, f] : d.term_freqs) {
        std::uint32_t df = 0;
        for (const auto& other : docs) df += other.freq(t) > 0 ? 1 : 0;
        if (df == 0) continue;
        expected = std::max(expected,
                            (static_cast<double>(f) / d.max_freq()) *
                                std::log(6.0 / df));
      }
      CHECK(measure_m4(d, pool) == doctest::Approx(expected).epsilon(1e-12));
      CHECK(measure_m4(d, pool) >= 0.0);
    }
  }
}

TEST_CASE("studentize normalizes to zero mean and unit sample deviation") {
  std::vector<double> v{1, 2, 3};
  auto r = studentize(v);
  CHECK_FALSE(r.degenerate);
  CHECK(r.values == std::vector<double>{-1, 0, 1});

  std::vector<double> constant{4, 4, 4, 4};
  auto flat = studentize(constant);
  CHECK(flat.degenerate);
  for (double x : flat.values) CHECK(x == 0.0);

  CHECK_THROWS(studentize(std::vector<double>{1.0}));

  std::vector<double> random;
  for (int i = 0; i < 200; ++i)
    random.push_back(rng::unit_real(rng::mix(7, 0, i)) * 10 - 5);
  auto stud = studentize(random);
  double mean = 0.0;
  for (double x : stud.values) mean += x;
  mean /= stud.values.size();
  double ss = 0.0;
  for (double x : stud.values) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (stud.values.size() - 1));
  CHECK(mean == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(sd == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("studentize is invariant to positive affine transforms") {
  std::vector<double> v;
  for (int i = 0; i < 50; ++i)
    v.push_back(rng::unit_real(rng::mix(8, 0, i)) * 3);
  std::vector<double> scaled;
  for (double x : v) scaled.push_back(2.5 * x + 7.0);
  auto a = studentize(v);
  auto b = studentize(scaled);
  for (std::size_t i = 0; i < v.size(); ++i)
    CHECK(b.values[i] == doctest::Approx(a.values[i]).epsilon(1e-9));
}

TEST_CASE("combine with one measure is its studentized copy") {
  MeasureSeries m{"aa", {3, 1, 2, 5}, 1.0, Orientation::expectedness};
  auto combined = combine(std::vector<MeasureSeries>{m});
  auto stud = studentize(m.values);
  for (std::size_t i = 0; i < combined.size(); ++i)
    CHECK(combined[i] == doctest::Approx(stud.values[i]).epsilon(1e-12));
}

TEST_CASE("combining two copies of a measure keeps its ranking") {
  std::vector<double> values{0.3, 2.0, -1.0, 0.9, 4.0};
  std::vector<MeasureSeries> both{
      {"a", values, 0.5, Orientation::expectedness},
      {"b", values, 0.5, Orientation::expectedness}};
  auto combined = combine(both);
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t j = 0; j < values.size(); ++j)
      if (values[i] < values[j]) CHECK(combined[i] < combined[j]);
}

TEST_CASE("unexpectedness measures flip sign under the internal convention") {
  std::vector<double> values{1, 2, 3};
  std::vector<MeasureSeries> flipped{
      {"m2", values, 1.0, Orientation::unexpectedness}};
  auto combined = combine(flipped);
  CHECK(combined == std::vector<double>{1, 0, -1});

  std::vector<MeasureSeries> mismatched{
      {"a", {1, 2, 3}, 1.0, Orientation::expectedness},
      {"b", {1, 2}, 1.0, Orientation::expectedness}};
  CHECK_THROWS(combine(mismatched));
}

TEST_CASE("term-document file loads and reports dictionary size") {
  testutil::TempDir tmp("terms");
  io::write_file(tmp.path("t.tsv"), "0\t3:2,1:5\n4\t7:1\n");
  auto corpus = load_term_documents(tmp.path("t.tsv"));
  CHECK(corpus.dictionary_size == 8);
  REQUIRE(corpus.find(0) != nullptr);
  CHECK(corpus.find(0)->freq(1) == 5);
  CHECK(corpus.find(0)->freq(3) == 2);
  CHECK(corpus.find(0)->max_freq() == 5);
  CHECK(corpus.find(4)->freq(7) == 1);
  CHECK(corpus.find(2) == nullptr);

  io::write_file(tmp.path("bad.tsv"), "0\t3:0\n");
  CHECK_THROWS(load_term_documents(tmp.path("bad.tsv")));
}
