#include <cmath>

#include "doctest.h"
#include "llamafur/io_util.hpp"
#include "llamafur/pa_learner.hpp"
#include "llamafur/rng.hpp"
#include "llamafur/scoring.hpp"
#include "llamafur/synth.hpp"
#include "test_util.hpp"

using namespace llamafur;

namespace {

PlantedModel small_model(double noise, std::uint64_t matrix_seed) {
  PlantedModel model;
  model.num_nodes = 300;
  model.num_categories = 20;
  model.categories_per_node = 3;
  model.noise_rate = noise;
  model.planted_w =
      random_planted_matrix(20, 0.42, 1.0, 1.0, matrix_seed);
  return model;
}

}  // namespace

TEST_CASE("generation is deterministic given model and seed") {
  auto model = small_model(0.05, 1);
  auto a = generate(model, 123);
  auto b = generate(model, 123);
  CHECK(a.graph == b.graph);
  CHECK(a.cats == b.cats);
  CHECK(a.unexpected_arcs == b.unexpected_arcs);
  auto c = generate(model, 124);
  CHECK(a.graph != c.graph);
}

TEST_CASE("all-negative planted matrix yields an empty graph at zero noise") {
  PlantedModel model;
  model.num_nodes = 50;
  model.num_categories = 5;
  model.categories_per_node = 2;
  model.planted_w = CategoryMatrix(5);
  for (cat_id c = 0; c < 5; ++c)
    for (cat_id cp = 0; cp < 5; ++cp) model.planted_w.at(c, cp) = -1.0;
  auto inst = generate(model, 9);
  CHECK(inst.graph.num_arcs() == 0);
  CHECK(inst.model_arcs == 0);
}

TEST_CASE("a single strong positive cell produces exactly its block arcs") {
  PlantedModel model;
  model.num_nodes = 60;
  model.num_categories = 4;
  model.categories_per_node = 1;
  model.planted_w = CategoryMatrix(4);
  for (cat_id c = 0; c < 4; ++c)
    for (cat_id cp = 0; cp < 4; ++cp) model.planted_w.at(c, cp) = -1.0;
  model.planted_w.at(1, 2) = 10.0;
  auto inst = generate(model, 17);

  for (node_id s = 0; s < 60; ++s)
    for (node_id t = 0; t < 60; ++t) {
      if (s == t) continue;
      const bool in_block = inst.cats.set_of(s)[0] == 1 &&
                            inst.cats.set_of(t)[0] == 2;
      CHECK(inst.graph.has_arc(s, t) == in_block);
    }
}

TEST_CASE("every node draws the configured number of categories") {
  auto model = small_model(0.0, 2);
  auto inst = generate(model, 5);
  for (node_id d = 0; d < model.num_nodes; ++d)
    CHECK(inst.cats.set_of(d).size() == model.categories_per_node);

  model.zipf_exponent = 1.2;
  auto skewed = generate(model, 5);
  std::vector<std::uint64_t> popularity(model.num_categories, 0);
  for (node_id d = 0; d < model.num_nodes; ++d) {
    CHECK(skewed.cats.set_of(d).size() == model.categories_per_node);
    for (cat_id c : skewed.cats.set_of(d)) ++popularity[c];
  }
  // Zipf sampling concentrates on the low ids.
  CHECK(popularity[0] > popularity[model.num_categories - 1]);
}

TEST_CASE("noise bookkeeping matches an independent recount") {
  auto model = small_model(0.03, 3);
  auto inst = generate(model, 31);
  CHECK(inst.flipped_in == inst.unexpected_arcs.size());

  // Recount: an arc is unexpected iff its planted score is <= 0.
  std::uint64_t recount = 0;
  for (std::uint64_t k = 0; k < inst.graph.num_arcs(); ++k) {
    auto [s, t] = inst.graph.arc_at(k);
    const double planted =
        score_pair(model.planted_w, inst.cats, s, t);
    if (planted <= 0.0) {
      ++recount;
      CHECK(inst.is_unexpected(s, t));
    } else {
      CHECK_FALSE(inst.is_unexpected(s, t));
    }
  }
  CHECK(recount == inst.flipped_in);
  CHECK(inst.graph.num_arcs() ==
        inst.model_arcs - inst.flipped_out + inst.flipped_in);

  // Flip rate should be near the configured noise.
  const double candidates =
      static_cast<double>(model.num_nodes) * (model.num_nodes - 1);
  const double observed =
      static_cast<double>(inst.flipped_in + inst.flipped_out) / candidates;
  CHECK(observed == doctest::Approx(model.noise_rate).epsilon(0.25));
}

TEST_CASE("noiseless instances are perfectly explained by the planted matrix") {
  auto model = small_model(0.0, 4);
  auto inst = generate(model, 77);
  REQUIRE(inst.graph.num_arcs() > 0);
  CHECK(inst.unexpected_arcs.empty());
  auto part = partition_links(inst.graph, model.planted_w, inst.cats);
  CHECK(part.explained_ratio() == 1.0);
}

TEST_CASE("flipped-in arcs score at most zero under the planted matrix") {
  auto model = small_model(0.08, 5);
  auto inst = generate(model, 13);
  REQUIRE(inst.flipped_in > 0);
  for (const auto& [s, t] : inst.unexpected_arcs)
    CHECK(score_pair(model.planted_w, inst.cats, s, t) <= 0.0);
}

TEST_CASE("recovery with the planted matrix itself is perfect at zero noise") {
  auto model = small_model(0.0, 6);
  auto inst = generate(model, 21);
  auto report = evaluate_recovery(model.planted_w, inst, inst.cats, 5, 5000);
  CHECK(report.f_measure == doctest::Approx(1.0));
  CHECK(report.accuracy == doctest::Approx(1.0));
}

TEST_CASE("unexpectedness bpref: planted matrix high, random matrix near null") {
  auto model = small_model(0.05, 7);
  auto inst = generate(model, 33);
  REQUIRE(inst.flipped_in > 0);

  const double planted_bpref =
      unexpectedness_bpref(model.planted_w, inst, inst.cats);
  CHECK(planted_bpref > 0.9);  // flipped-in arcs all score <= 0

  double null_mean = 0.0;
  for (std::uint64_t s = 0; s < 10; ++s)
    null_mean += null_ranking_bpref(inst, s);
  null_mean /= 10;

  CategoryMatrix random_w(model.num_categories);
  for (cat_id c = 0; c < model.num_categories; ++c)
    for (cat_id cp = 0; cp < model.num_categories; ++cp)
      random_w.at(c, cp) = rng::unit_real(rng::mix(90, c, cp)) - 0.5;
  const double random_bpref =
      unexpectedness_bpref(random_w, inst, inst.cats);
  CHECK(std::abs(random_bpref - null_mean) < 0.25);
  CHECK(planted_bpref > random_bpref);
}

TEST_CASE("overdense planted models raise the density warning") {
  PlantedModel model;
  model.num_nodes = 40;
  model.num_categories = 4;
  model.categories_per_node = 2;
  model.planted_w = CategoryMatrix(4);
  for (cat_id c = 0; c < 4; ++c)
    for (cat_id cp = 0; cp < 4; ++cp) model.planted_w.at(c, cp) = 1.0;
  auto dense = generate(model, 2);
  CHECK(dense.density_warning);
  CHECK(dense.graph.num_arcs() ==
        static_cast<std::uint64_t>(40) * 39);  // complete minus self-pairs

  auto sparse = small_model(0.0, 11);
  CHECK_FALSE(generate(sparse, 2).density_warning);
}

TEST_CASE("labels file round-trips the unexpected arc set") {
  testutil::TempDir tmp("synth");
  auto model = small_model(0.05, 8);
  auto inst = generate(model, 3);
  save_labels(inst, tmp.path("labels.tsv"));
  auto loaded = load_labels(tmp.path("labels.tsv"));
  CHECK(loaded == inst.unexpected_arcs);
}

TEST_CASE("sampled candidate generation stays deterministic above the limit") {
  PlantedModel model = small_model(0.0, 9);
  model.exact_enumeration_limit = 100;  // force the sampled path
  model.sampled_candidates_per_node = 50;
  auto a = generate(model, 55);
  auto b = generate(model, 55);
  CHECK(a.graph == b.graph);
  CHECK(a.graph.num_arcs() > 0);
}
