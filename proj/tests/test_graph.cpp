#include <stdexcept>
#include <unordered_set>

#include "doctest.h"
#include "llamafur/graph.hpp"
#include "llamafur/io_util.hpp"
#include "llamafur/rng.hpp"
#include "test_util.hpp"

using namespace llamafur;

TEST_CASE("edge list text loads with dedup and sorted adjacency") {
  testutil::TempDir tmp("graph");
  io::write_file(tmp.path("a.txt"), "0 1\n0 2\n1 2\n");
  auto g = load_graph(tmp.path("a.txt"), GraphFormat::edge_list);
  CHECK(g.num_nodes() == 3);
  CHECK(g.num_arcs() == 3);
  CHECK(g.has_arc(0, 1));
  CHECK(g.has_arc(0, 2));
  CHECK(g.has_arc(1, 2));

  io::write_file(tmp.path("dup.txt"), "0 1\n0 1\n");
  auto dup = load_graph(tmp.path("dup.txt"), GraphFormat::edge_list);
  CHECK(dup.num_nodes() == 2);
  CHECK(dup.num_arcs() == 1);
}

TEST_CASE("edge list accepts comments and tabs, reports line numbers") {
  testutil::TempDir tmp("graph");
  io::write_file(tmp.path("c.txt"), "# header\n0\t1\n\n2 0 # trailing\n");
  auto g = load_graph(tmp.path("c.txt"), GraphFormat::edge_list);
  CHECK(g.num_arcs() == 2);
  CHECK(g.has_arc(2, 0));

  io::write_file(tmp.path("bad.txt"), "0 1\nnope\n");
  try {
    load_graph(tmp.path("bad.txt"), GraphFormat::edge_list);
    FAIL("expected parse error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }

  io::write_file(tmp.path("huge.txt"), "0 99999999999999\n");
  CHECK_THROWS_AS(load_graph(tmp.path("huge.txt"), GraphFormat::edge_list),
                  std::out_of_range);
}

TEST_CASE("has_arc agrees with a hash-set oracle and is directed") {
  auto g = DocumentGraph::from_arcs(2, {{0, 1}});
  CHECK(g.has_arc(0, 1));
  CHECK_FALSE(g.has_arc(1, 0));
  CHECK_THROWS_AS(g.has_arc(0, 2), std::out_of_range);

  auto r = testutil::random_graph(64, 400, 11);
  std::unordered_set<std::uint64_t> oracle;
  for (node_id s = 0; s < r.num_nodes(); ++s)
    for (node_id t : r.neighbors(s))
      oracle.insert((static_cast<std::uint64_t>(s) << 32) | t);
  for (std::uint64_t q = 0; q < 1000; ++q) {
    auto s = static_cast<node_id>(rng::bounded(rng::mix(5, 0, q), 64));
    auto t = static_cast<node_id>(rng::bounded(rng::mix(5, 1, q), 64));
    const bool expected =
        oracle.count((static_cast<std::uint64_t>(s) << 32) | t) > 0;
    CHECK(r.has_arc(s, t) == expected);
  }
}

TEST_CASE("symmetric view unions the transpose and is idempotent") {
  auto g = DocumentGraph::from_arcs(2, {{0, 1}});
  auto sym = g.symmetric_view();
  CHECK(sym.num_arcs() == 2);
  CHECK(sym.has_arc(1, 0));

  auto already = DocumentGraph::from_arcs(2, {{0, 1}, {1, 0}});
  CHECK(already.symmetric_view() == already);

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto r = testutil::random_graph(50, 300, seed);
    auto once = r.symmetric_view();
    CHECK(once.symmetric_view() == once);
    CHECK(once.num_arcs() >= r.num_arcs());
    CHECK(once.num_arcs() <= 2 * r.num_arcs());
  }
}

TEST_CASE("packed binary round-trip is identical on a random 1e4-arc graph") {
  testutil::TempDir tmp("graph");
  auto g = testutil::random_graph(2000, 10000, 3, /*allow_self_loops=*/true);
  save_graph(g, tmp.path("g.bin"), GraphFormat::packed_binary);
  auto back = load_graph(tmp.path("g.bin"), GraphFormat::packed_binary);
  CHECK(back == g);

  // Bit-exact: saving the reloaded graph reproduces the file.
  save_graph(back, tmp.path("g2.bin"), GraphFormat::packed_binary);
  CHECK(io::read_file(tmp.path("g.bin")) == io::read_file(tmp.path("g2.bin")));

  save_graph(g, tmp.path("g.txt"), GraphFormat::edge_list);
  CHECK(load_graph(tmp.path("g.txt"), GraphFormat::edge_list) == g);

  // Format sniffing picks the right loader for both.
  CHECK(load_graph(tmp.path("g.bin")) == g);
  CHECK(load_graph(tmp.path("g.txt")) == g);
}

TEST_CASE("loading is deterministic") {
  testutil::TempDir tmp("graph");
  auto g = testutil::random_graph(100, 500, 17);
  save_graph(g, tmp.path("g.txt"), GraphFormat::edge_list);
  CHECK(load_graph(tmp.path("g.txt"), GraphFormat::edge_list) ==
        load_graph(tmp.path("g.txt"), GraphFormat::edge_list));
}

TEST_CASE("category assignment loads, dedups and round-trips") {
  testutil::TempDir tmp("cats");
  io::write_file(tmp.path("c.tsv"), "0\t3,1,3\n");
  auto cats = load_categories(tmp.path("c.tsv"), 4);
  REQUIRE(cats.num_nodes() == 1);
  REQUIRE(cats.set_of(0).size() == 2);
  CHECK(cats.set_of(0)[0] == 1);
  CHECK(cats.set_of(0)[1] == 3);

  io::write_file(tmp.path("empty.tsv"), "");
  auto empty = load_categories(tmp.path("empty.tsv"), 4, 3);
  CHECK(empty.num_nodes() == 3);
  for (node_id d = 0; d < 3; ++d) CHECK(empty.set_of(d).empty());

  io::write_file(tmp.path("range.tsv"), "0\t4\n");
  CHECK_THROWS_AS(load_categories(tmp.path("range.tsv"), 4),
                  std::out_of_range);

  auto random = testutil::random_categories(60, 12, 3, 9);
  save_categories(random, tmp.path("r.tsv"));
  CHECK(load_categories(tmp.path("r.tsv"), 12, 60) == random);

  // Repeated records for the same node merge into one set.
  io::write_file(tmp.path("m.tsv"), "0\t2\n0\t1,2\n");
  auto merged = load_categories(tmp.path("m.tsv"), 4);
  REQUIRE(merged.set_of(0).size() == 2);
  CHECK(merged.set_of(0)[0] == 1);
  CHECK(merged.set_of(0)[1] == 2);
}
