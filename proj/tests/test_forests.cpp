#include <algorithm>
#include <functional>
#include <random>
#include <set>

#include "doctest.h"
#include "phylomso/enumerate.hpp"
#include "phylomso/forests.hpp"

using namespace phylomso;

namespace {

using Block = std::vector<std::string>;
using Partition = std::vector<Block>;

void for_each_partition(const std::vector<std::string>& xs, const std::function<void(const Partition&)>& fn) {
  Partition cur;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == xs.size()) {
      fn(cur);
      return;
    }
    for (std::size_t b = 0; b < cur.size(); ++b) {
      cur[b].push_back(xs[i]);
      rec(i + 1);
      cur[b].pop_back();
    }
    cur.push_back({xs[i]});
    rec(i + 1);
    cur.pop_back();
  };
  rec(0);
}

// Vertices on paths between members of `block`.
std::set<int> span(const PhyloTree& t, const Block& block) {
  std::set<int> out;
  int src = t.leaf(block[0]);
  std::vector<int> par(t.vertex_count(), -2);
  std::vector<int> stack{src};
  par[src] = -1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w : t.neighbors(v))
      if (par[w] == -2) par[w] = v, stack.push_back(w);
  }
  out.insert(src);
  for (auto& x : block)
    for (int v = t.leaf(x); v != -1; v = par[v]) out.insert(v);
  return out;
}

bool disjoint_spans(const PhyloTree& t, const Partition& p) {
  std::set<int> used;
  for (auto& b : p)
    for (int v : span(t, b))
      if (!used.insert(v).second) return false;
  return true;
}

Block without_rho(Block b) {
  b.erase(std::remove(b.begin(), b.end(), kRho), b.end());
  return b;
}

// Agreement forest test straight from the definition. For rooted inputs the
// spans are taken in the augmented trees and blocks compared as rooted trees.
bool is_af(const PhyloTree& t1, const PhyloTree& t2, const Partition& p) {
  bool rooted = t1.rooted();
  const PhyloTree a1 = rooted ? augment_root(t1) : t1;
  const PhyloTree a2 = rooted ? augment_root(t2) : t2;
  if (!disjoint_spans(a1, p) || !disjoint_spans(a2, p)) return false;
  for (auto& b : p) {
    Block keep = rooted ? without_rho(b) : b;
    if (keep.empty()) continue;
    if (!is_isomorphic(restrict_to(t1, keep), restrict_to(t2, keep))) return false;
  }
  return true;
}

int lca(const PhyloTree& t, const Block& b) {
  std::vector<int> anc;
  for (int v = t.leaf(b[0]); v != -1; v = t.parent(v)) anc.push_back(v);
  std::size_t best = 0;
  for (auto& x : b) {
    std::set<int> up;
    for (int v = t.leaf(x); v != -1; v = t.parent(v)) up.insert(v);
    while (!up.count(anc[best])) ++best;
  }
  return anc[best];
}

bool strict_ancestor(const PhyloTree& t, int a, int v) {
  for (v = t.parent(v); v != -1; v = t.parent(v))
    if (v == a) return true;
  return false;
}

bool acyclic_ag(const PhyloTree& t1, const PhyloTree& t2, const Partition& p) {
  int k = static_cast<int>(p.size());
  std::vector<std::vector<int>> out(k);
  for (const PhyloTree* t : {&t1, &t2}) {
    std::vector<int> root(k);
    for (int i = 0; i < k; ++i) {
      Block b = without_rho(p[i]);
      root[i] = b.size() == p[i].size() ? lca(*t, b) : -1;
    }
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        if (i == j || root[j] == -1) continue;
        if (root[i] == -1 || strict_ancestor(*t, root[i], root[j])) out[i].push_back(j);
      }
  }
  std::vector<int> state(k);
  std::function<bool(int)> cyc = [&](int v) {
    state[v] = 1;
    for (int w : out[v])
      if (state[w] == 1 || (state[w] == 0 && cyc(w))) return true;
    state[v] = 2;
    return false;
  };
  for (int v = 0; v < k; ++v)
    if (state[v] == 0 && cyc(v)) return false;
  return true;
}

struct Oracle {
  int af = 1 << 20, aaf = 1 << 20;
};

Oracle brute(const PhyloTree& t1, const PhyloTree& t2) {
  auto xs = t1.taxa();
  if (t1.rooted()) xs.push_back(kRho);
  Oracle o;
  for_each_partition(xs, [&](const Partition& p) {
    int k = static_cast<int>(p.size());
    if (k >= o.aaf || !is_af(t1, t2, p)) return;
    o.af = std::min(o.af, k);
    if (!t1.rooted() || acyclic_ag(t1, t2, p)) o.aaf = std::min(o.aaf, k);
  });
  return o;
}

void check_certificate(const PhyloTree& t1, const PhyloTree& t2, const AgreementForest& f) {
  CHECK(static_cast<int>(f.cuts1.size()) == f.size() - 1);
  CHECK(static_cast<int>(f.cuts2.size()) == f.size() - 1);
  auto again = is_agreement_forest(t1, t2, f.cuts1, f.cuts2);
  REQUIRE(again.has_value());
  CHECK(again->size() == f.size());
  for (int i = 0; i < f.size(); ++i) {
    CHECK(again->components[i].taxa == f.components[i].taxa);
    CHECK(write_newick(again->components[i].tree) == write_newick(f.components[i].tree));
  }
}

const PhyloTree kFigLeft = parse_newick("((u,v),w,y);");
const PhyloTree kFigRight = parse_newick("((u,w),v,y);");

}  // namespace

TEST_CASE("apply_cuts examples") {
  auto none = apply_cuts(kFigLeft, {});
  REQUIRE(none.components.size() == 1);
  CHECK(write_newick(none.components[0]) == write_newick(kFigLeft));
  // the pendant edge of y
  int ey = kFigLeft.incident_edges(kFigLeft.leaf("y"))[0];
  auto two = apply_cuts(kFigLeft, {ey});
  REQUIRE(two.components.size() == 2);
  CHECK(two.components[1].leaf_count() == 1);
  CHECK(two.dropped == 0);
  // cut the vertex next to w off from w and from the cherry; y keeps it
  int w = kFigLeft.leaf("w");
  int centre = kFigLeft.neighbors(w)[0];
  std::vector<int> cuts;
  for (int e : kFigLeft.incident_edges(centre)) {
    auto [a, b] = kFigLeft.edge(e);
    int other = a == centre ? b : a;
    if (kFigLeft.label(other) != "y") cuts.push_back(e);
  }
  REQUIRE(cuts.size() == 2);
  auto three = apply_cuts(kFigLeft, cuts);
  CHECK(three.components.size() == 3);
  CHECK(three.dropped == 0);
}

TEST_CASE("taxa-free component is dropped") {
  // all three edges at one internal vertex
  auto t = parse_newick("((a,b),(c,d));");
  int a = t.leaf("a");
  int mid = t.neighbors(a)[0];
  std::vector<int> all(t.incident_edges(mid).begin(), t.incident_edges(mid).end());
  auto r = apply_cuts(t, all);
  CHECK(r.dropped == 1);
  CHECK(r.components.size() == 3);
}

TEST_CASE("is_agreement_forest examples") {
  auto same = is_agreement_forest(kFigLeft, kFigLeft, {}, {});
  REQUIRE(same);
  CHECK(same->size() == 1);
  CHECK_FALSE(is_agreement_forest(kFigLeft, kFigRight, {}, {}));
  int e1 = kFigLeft.incident_edges(kFigLeft.leaf("y"))[0];
  int e2 = kFigRight.incident_edges(kFigRight.leaf("y"))[0];
  auto f = is_agreement_forest(kFigLeft, kFigRight, {e1}, {e2});
  REQUIRE(f);
  CHECK(f->size() == 2);
}

TEST_CASE("figure pair has a two component forest") {
  auto f = umaf(kFigLeft, kFigRight);
  CHECK(f.size() == 2);
  check_certificate(kFigLeft, kFigRight, f);
  CHECK(umaf(kFigLeft, kFigLeft).size() == 1);
}

TEST_CASE("umaf matches partition brute force and is symmetric") {
  for (int n = 4; n <= 5; ++n) {
    auto trees = all_unrooted_trees(letter_taxa(n));
    for (std::size_t i = 0; i < trees.size(); ++i)
      for (std::size_t j = 0; j < trees.size(); j += (n == 5 ? 4 : 1)) {
        auto f = umaf(trees[i], trees[j]);
        CHECK(f.size() == brute(trees[i], trees[j]).af);
        CHECK(f.size() == umaf(trees[j], trees[i]).size());
        CHECK((f.size() == 1) == is_isomorphic(trees[i], trees[j]));
        check_certificate(trees[i], trees[j], f);
      }
  }
  std::mt19937_64 rng(11);
  auto x = letter_taxa(6);
  for (int rep = 0; rep < 20; ++rep) {
    auto a = random_unrooted_tree(x, rng), b = random_unrooted_tree(x, rng);
    auto f = umaf(a, b);
    CHECK(f.size() == brute(a, b).af);
    check_certificate(a, b, f);
  }
}

TEST_CASE("rooted forests against brute force") {
  for (int n = 2; n <= 4; ++n) {
    auto trees = all_rooted_trees(letter_taxa(n));
    for (auto& a : trees)
      for (auto& b : trees) {
        auto o = brute(a, b);
        auto m = maf_rooted(a, b);
        auto h = maaf(a, b);
        CHECK(m.size() == o.af);
        CHECK(h.size() == o.aaf);
        CHECK(h.size() >= m.size());
        CHECK(m.size() >= umaf(augment_root(a), augment_root(b)).size());
        CHECK(inheritance_graph(a, b, h).acyclic());
        CHECK(min_tree_sequence(a, b).length() == h.size() - 1);
        check_certificate(a, b, m);
        check_certificate(a, b, h);
      }
  }
  std::mt19937_64 rng(5);
  auto x = letter_taxa(5);
  for (int rep = 0; rep < 25; ++rep) {
    auto a = random_rooted_tree(x, rng), b = random_rooted_tree(x, rng);
    auto o = brute(a, b);
    CHECK(maf_rooted(a, b).size() == o.af);
    CHECK(maaf(a, b).size() == o.aaf);
  }
}

TEST_CASE("triplet conflict") {
  auto a = parse_newick("((a,b),c);"), b = parse_newick("((b,c),a);");
  CHECK(maf_rooted(a, b).size() == 2);
  CHECK(maaf(a, b).size() == 2);
  auto seq = min_tree_sequence(a, b);
  CHECK(seq.length() == 1);
  CHECK(min_tree_sequence(a, a).length() == 0);
}

TEST_CASE("a two-cycle in the inheritance graph exists at four taxa") {
  bool found = false;
  auto trees = all_rooted_trees(letter_taxa(4));
  for (auto& a : trees) {
    for (auto& b : trees) {
      int m = maf_rooted(a, b).size();
      for (auto& f : enumerate_agreement_forests(a, b, m)) {
        auto ag = inheritance_graph(a, b, f);
        std::set<std::pair<int, int>> arcs(ag.arcs.begin(), ag.arcs.end());
        for (auto [u, v] : ag.arcs)
          if (arcs.count({v, u})) found = true;
        if (found) {
          CHECK_FALSE(ag.acyclic());
          break;
        }
      }
      if (found) break;
    }
    if (found) break;
  }
  CHECK(found);
}

TEST_CASE("inheritance graph of a single component") {
  auto t = parse_newick("((a,b),(c,d));");
  auto f = maf_rooted(t, t);
  auto ag = inheritance_graph(t, t, f);
  CHECK(ag.nodes == 1);
  CHECK(ag.arcs.empty());
}

TEST_CASE("rho component points at every other component") {
  auto a = parse_newick("((a,b),(c,d));"), b = parse_newick("((a,c),(b,d));");
  auto f = maf_rooted(a, b);
  auto ag = inheritance_graph(a, b, f);
  int rho_comp = -1;
  for (int i = 0; i < f.size(); ++i)
    for (auto& x : f.components[i].taxa)
      if (x == kRho) rho_comp = i;
  REQUIRE(rho_comp >= 0);
  for (int j = 0; j < f.size(); ++j)
    if (j != rho_comp)
      CHECK(std::find(ag.arcs.begin(), ag.arcs.end(), std::pair{rho_comp, j}) != ag.arcs.end());
}

TEST_CASE("common pendant subtrees") {
  auto t = parse_newick("((a,b),(c,d));");
  auto same = common_pendant_subtrees(t, t, {});
  CHECK(same.size() == 7);  // four singletons, two cherries, everything
  CHECK(same.back() == std::vector<std::string>{"a", "b", "c", "d"});
  auto u = parse_newick("((a,c),(b,d));");
  auto mixed = common_pendant_subtrees(t, u, {});
  for (auto& c : mixed) CHECK(c.size() == 1);
  auto v = parse_newick("((a,b),(c,d));");
  auto w = parse_newick("(((a,b),c),d);");
  auto shared = common_pendant_subtrees(v, w, {});
  CHECK(shared.size() == 5);
  CHECK(shared[4] == std::vector<std::string>{"a", "b"});
  auto pruned = common_pendant_subtrees(v, w, {{"d"}});
  CHECK(std::find(pruned.begin(), pruned.end(), std::vector<std::string>{"a", "b", "c"}) != pruned.end());
}

TEST_CASE("json certificates") {
  auto f = umaf(kFigLeft, kFigRight);
  auto js = forest_json(f);
  CHECK(js.find("\"components\"") != std::string::npos);
  CHECK(js.find("\"cuts1\"") != std::string::npos);
  auto s = sequence_json(min_tree_sequence(parse_newick("((a,b),c);"), parse_newick("((b,c),a);")));
  CHECK(s.find("\"remainder\"") != std::string::npos);
}
