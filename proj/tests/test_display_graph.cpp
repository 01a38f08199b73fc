#include <numeric>
#include <random>

#include "doctest.h"
#include "phylomso/display_graph.hpp"
#include "phylomso/enumerate.hpp"

using namespace phylomso;

namespace {

// Union-find reachability, independent of the DFS in the library.
bool reachable(const DisplayGraph& d, const std::vector<char>& zone, int a, int b, const std::vector<char>& cuts) {
  std::vector<int> up(d.vertex_count());
  std::iota(up.begin(), up.end(), 0);
  auto find = [&](int x) {
    while (up[x] != x) x = up[x] = up[up[x]];
    return x;
  };
  for (int e = 0; e < d.edge_count(); ++e) {
    auto [u, v] = d.edge(e);
    if (cuts[e] || !zone[u] || !zone[v]) continue;
    up[find(u)] = find(v);
  }
  return find(a) == find(b);
}

void check_counts(const DisplayGraph& d) {
  int x = d.taxon_count() + (d.rho() >= 0 ? 1 : 0);
  CHECK(d.vertex_count() == 3 * x - 4);
  CHECK(d.edge_count() == 4 * x - 6);
}

}  // namespace

TEST_CASE("figure pair gives 8 vertices and 10 edges") {
  auto d = DisplayGraph::build(parse_newick("((u,v),w,y);"), parse_newick("((u,w),v,y);"));
  CHECK(d.vertex_count() == 8);
  CHECK(d.edge_count() == 10);
  CHECK(d.rho() == -1);
  CHECK(d.taxon_count() == 4);
  CHECK(d.label(0) == "u");
  CHECK(d.vertex_tag(4) == VertexTag::internal1);
  CHECK(d.vertex_tag(7) == VertexTag::internal2);
  auto gr = emit_gr(d);
  CHECK(gr.find("p tw 8 10\n") != std::string::npos);
  auto g = parse_gr(gr);
  CHECK(g.n == 8);
  CHECK(g.edges.size() == 10);
  CHECK(emit_dot(d).find("graph") != std::string::npos);
}

TEST_CASE("vertex and edge counts over all small pairs") {
  for (int n = 3; n <= 6; ++n) {
    auto trees = all_unrooted_trees(letter_taxa(n));
    std::size_t step = n == 6 ? 7 : 1;
    for (std::size_t i = 0; i < trees.size(); i += step)
      for (std::size_t j = 0; j < trees.size(); j += step) check_counts(DisplayGraph::build(trees[i], trees[j]));
  }
  for (int n = 2; n <= 5; ++n) {
    auto trees = all_rooted_trees(letter_taxa(n));
    for (auto& a : trees)
      for (auto& b : trees) {
        auto d = DisplayGraph::build(a, b);
        CHECK(d.rho() == n);
        check_counts(d);
      }
  }
}

TEST_CASE("subdivide rooting shares the root vertex") {
  auto t1 = parse_newick("((a,b),c,(d,e));");
  auto t2 = parse_newick("((a,c),b,(d,e));");
  auto d = DisplayGraph::build(t1, t2, RootHandling::subdivide);
  REQUIRE(d.rho() >= 0);
  CHECK(d.vertex_tag(d.rho()) == VertexTag::rho);
  CHECK(d.taxon_count() == 5);
  CHECK(d.vertex_of(1, d.tree(1).root()) == d.rho());
  CHECK(d.vertex_of(2, d.tree(2).root()) == d.rho());
  // ρ has a neighbour in each tree, one of them the smallest taxon.
  CHECK(d.neighbors(d.rho()).size() == 4);
  CHECK(d.adjacent(d.rho(), d.taxon_vertex("a")));
}

TEST_CASE("tree membership and edge maps") {
  auto t1 = parse_newick("((a,b),(c,d));");
  auto t2 = parse_newick("((a,c),(b,d));");
  auto d = DisplayGraph::build(t1, t2);
  for (int i = 1; i <= 2; ++i) {
    const auto& t = d.tree(i);
    for (int e = 0; e < t.edge_count(); ++e) {
      int g = d.edge_of(i, e);
      CHECK(d.edge_in_tree(i, g));
      CHECK(d.edge(g).a == d.vertex_of(i, t.edge(e).a));
      CHECK(d.edge(g).b == d.vertex_of(i, t.edge(e).b));
    }
    for (int v = 0; v < t.vertex_count(); ++v) CHECK(d.in_tree(i, d.vertex_of(i, v)));
  }
}

TEST_CASE("path_avoiding_cuts agrees with union-find") {
  std::mt19937_64 rng(7);
  for (int n = 4; n <= 6; ++n) {
    auto x = letter_taxa(n);
    for (int rep = 0; rep < 30; ++rep) {
      auto d = DisplayGraph::build(random_unrooted_tree(x, rng), random_unrooted_tree(x, rng));
      for (int trial = 0; trial < 20; ++trial) {
        std::vector<char> zone(d.vertex_count()), cuts(d.edge_count());
        for (auto& z : zone) z = rng() % 4 != 0;
        for (auto& c : cuts) c = rng() % 3 == 0;
        int a = rng() % d.vertex_count(), b = rng() % d.vertex_count();
        zone[a] = zone[b] = 1;
        CHECK(path_avoiding_cuts(d, zone, a, b, cuts) == reachable(d, zone, a, b, cuts));
        int u = rng() % d.vertex_count();
        bool expect = false;
        if (u != a && u != b) {
          auto z2 = zone;
          z2[u] = 0;
          expect = reachable(d, z2, a, b, std::vector<char>(d.edge_count()));
        }
        CHECK(path_survives_vertex_cut(d, zone, a, b, u) == expect);
      }
    }
  }
}

TEST_CASE("cutting one tree edge separates exactly its split") {
  auto trees = all_unrooted_trees(letter_taxa(5));
  for (std::size_t i = 0; i < trees.size(); i += 3) {
    auto d = DisplayGraph::build(trees[i], trees[0]);
    const auto& t = d.tree(1);
    TaxonIndex index(t.taxa());
    auto sides = edge_side_masks(t, index);
    std::vector<char> zone(d.vertex_count());
    for (int v = 0; v < d.vertex_count(); ++v) zone[v] = d.in_v1(v);
    for (int e = 0; e < t.edge_count(); ++e) {
      std::vector<char> cuts(d.edge_count());
      cuts[d.edge_of(1, e)] = 1;
      for (int p = 0; p < 5; ++p)
        for (int q = 0; q < 5; ++q) {
          bool same = (sides[e] >> p & 1) == (sides[e] >> q & 1);
          CHECK(path_avoiding_cuts(d, zone, p, q, cuts) == same);
        }
    }
  }
}

TEST_CASE("endpoints outside the zone are rejected") {
  auto d = DisplayGraph::build(parse_newick("((a,b),c,d);"), parse_newick("((a,c),b,d);"));
  std::vector<char> zone(d.vertex_count(), 1), cuts(d.edge_count());
  zone[0] = 0;
  CHECK_THROWS_AS(path_avoiding_cuts(d, zone, 0, 1, cuts), InputError);
}
