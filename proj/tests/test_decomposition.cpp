#include <algorithm>
#include <numeric>
#include <random>

#include "doctest.h"
#include "phylomso/decomposition.hpp"
#include "phylomso/display_graph.hpp"
#include "phylomso/enumerate.hpp"
#include "phylomso/forests.hpp"

using namespace phylomso;

namespace {

Graph cycle(int n) {
  Graph g{n, {}};
  for (int i = 0; i < n; ++i) g.edges.push_back({i, (i + 1) % n});
  return g;
}

Graph random_graph(int n, double p, std::mt19937_64& rng) {
  Graph g{n, {}};
  std::bernoulli_distribution coin(p);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (coin(rng)) g.edges.push_back({u, v});
  return g;
}

// Minimum width over every elimination order.
int permutation_treewidth(const Graph& g) {
  std::vector<int> order(g.n);
  std::iota(order.begin(), order.end(), 0);
  int best = g.n;
  do best = std::min(best, elimination_width(g, order));
  while (std::next_permutation(order.begin(), order.end()));
  return best;
}

void check_width_bound(const PhyloTree& a, const PhyloTree& b) {
  auto d = DisplayGraph::build(a, b);
  auto f = umaf(a, b);
  auto td = decomposition_from_forest(d, f);
  auto g = d.graph();
  auto bad = validate(td, g);
  CHECK_MESSAGE(!bad, bad.message, " ", write_newick(a), " ", write_newick(b));
  CHECK(td.width() <= f.size() + 1);
  CHECK(exact_treewidth(g).width <= f.size() + 1);
}

}  // namespace

TEST_CASE("validator catches each kind of defect") {
  Graph g = cycle(4);
  TreeDecomposition ok;
  ok.add_bag({0, 1, 2});
  ok.add_bag({0, 2, 3});
  ok.tree_edges = {{0, 1}};
  CHECK(!validate(ok, g));
  CHECK(ok.width() == 2);

  auto missing = ok;
  missing.bags[1] = {0, 2};
  CHECK(validate(missing, g).kind == Violation::Kind::vertex_uncovered);

  auto uncovered = ok;
  uncovered.bags[1] = {2, 3};
  uncovered.bags.push_back({0, 3});
  uncovered.tree_edges.push_back({1, 2});
  uncovered.bags[0] = {0, 1, 2};
  CHECK(validate(uncovered, g).kind == Violation::Kind::not_connected);

  TreeDecomposition edge_missing;
  edge_missing.add_bag({0, 1, 2});
  edge_missing.add_bag({2, 3});
  edge_missing.tree_edges = {{0, 1}};
  CHECK(validate(edge_missing, g).kind == Violation::Kind::edge_uncovered);

  auto forest = ok;
  forest.tree_edges.clear();
  CHECK(validate(forest, g).kind == Violation::Kind::not_a_tree);

  auto outside = ok;
  outside.bags[0] = {0, 1, 2, 9};
  CHECK(validate(outside, g).kind == Violation::Kind::bad_vertex);
}

TEST_CASE("exact treewidth on named graphs") {
  CHECK(exact_treewidth(cycle(5)).width == 2);
  Graph k5{5, {}};
  for (int u = 0; u < 5; ++u)
    for (int v = u + 1; v < 5; ++v) k5.edges.push_back({u, v});
  CHECK(exact_treewidth(k5).width == 4);
  Graph path{4, {{0, 1}, {1, 2}, {2, 3}}};
  CHECK(exact_treewidth(path).width == 1);
  Graph grid{9, {}};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      if (c < 2) grid.edges.push_back({3 * r + c, 3 * r + c + 1});
      if (r < 2) grid.edges.push_back({3 * r + c, 3 * r + c + 3});
    }
  auto res = exact_treewidth(grid);
  CHECK(res.width == 3);
  CHECK(!validate(res.decomposition, grid));
  CHECK(res.decomposition.width() == 3);
  CHECK(elimination_width(grid, res.order) == 3);
  CHECK_THROWS_AS(exact_treewidth(Graph{25, {}}), SizeGuardError);
}

TEST_CASE("exact treewidth matches all elimination orders") {
  std::mt19937_64 rng(19);
  for (int rep = 0; rep < 60; ++rep) {
    int n = 4 + rep % 5;
    auto g = random_graph(n, 0.25 + 0.1 * (rep % 5), rng);
    auto res = exact_treewidth(g);
    CHECK(res.width == permutation_treewidth(g));
    CHECK(!validate(res.decomposition, g));
    CHECK(res.decomposition.width() == res.width);
  }
}

TEST_CASE("tight display graph") {
  auto a = parse_newick("((u,v),w,x);"), b = parse_newick("((u,x),v,w);");
  CHECK(umaf(a, b).size() == 2);
  auto d = DisplayGraph::build(a, b);
  CHECK(exact_treewidth(d.graph()).width == 3);
  check_width_bound(a, b);
}

TEST_CASE("forest decompositions on all small pairs") {
  for (int n = 3; n <= 5; ++n) {
    auto trees = all_unrooted_trees(letter_taxa(n));
    for (auto& a : trees)
      for (auto& b : trees) check_width_bound(a, b);
  }
  std::mt19937_64 rng(23);
  auto x = letter_taxa(6);
  for (int rep = 0; rep < 15; ++rep) check_width_bound(random_unrooted_tree(x, rng), random_unrooted_tree(x, rng));
}

TEST_CASE("decompositions of the identical pair have width two") {
  auto t = caterpillar(letter_taxa(6), TreeKind::unrooted);
  auto d = DisplayGraph::build(t, t);
  auto td = decomposition_from_forest(d, umaf(t, t));
  CHECK(!validate(td, d.graph()));
  CHECK(td.width() <= 2);
}

TEST_CASE("td text round trip") {
  auto a = parse_newick("((u,v),w,x);"), b = parse_newick("((u,x),v,w);");
  auto d = DisplayGraph::build(a, b);
  auto td = decomposition_from_forest(d, umaf(a, b));
  auto text = emit_td(td, d.vertex_count());
  CHECK(text.find("s td " + std::to_string(td.bags.size()) + " " + std::to_string(td.max_bag_size()) + " 8") !=
        std::string::npos);
  int nv = 0;
  auto back = parse_td(text, &nv);
  CHECK(nv == 8);
  CHECK(back.bags == td.bags);
  CHECK(back.tree_edges.size() == td.tree_edges.size());
  CHECK(!validate(back, d.graph()));
  CHECK_THROWS_AS(parse_td("s td 1 1 1\nb 1 2\n"), ParseError);
}
