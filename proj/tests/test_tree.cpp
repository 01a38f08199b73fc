#include <algorithm>
#include <set>

#include "doctest.h"
#include "phylomso/enumerate.hpp"
#include "phylomso/tree.hpp"

using namespace phylomso;

namespace {

std::vector<std::vector<std::string>> subsets(const std::vector<std::string>& xs) {
  std::vector<std::vector<std::string>> out;
  for (unsigned m = 1; m < (1u << xs.size()); ++m) {
    std::vector<std::string> s;
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (m >> i & 1) s.push_back(xs[i]);
    out.push_back(s);
  }
  return out;
}

bool is_subset(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

// Quartet set by brute force over restrictions.
std::set<std::string> quartets(const PhyloTree& t) {
  std::set<std::string> out;
  auto x = t.taxa();
  for (auto& s : subsets(x))
    if (s.size() == 4) out.insert(quartet_topology(t, {s[0], s[1], s[2], s[3]}).str());
  return out;
}

void check_counts(const PhyloTree& t) {
  int n = t.leaf_count();
  if (t.rooted()) {
    CHECK(t.vertex_count() == 2 * n - 1);
    CHECK(t.edge_count() == 2 * n - 2);
  } else if (n >= 2) {
    CHECK(t.vertex_count() == 2 * n - 2);
    CHECK(t.edge_count() == 2 * n - 3);
  }
}

}  // namespace

TEST_CASE("parse quartet and triplet") {
  auto q = parse_newick("(u,v,(w,y));");
  CHECK_FALSE(q.rooted());
  CHECK(q.vertex_count() == 6);
  CHECK(q.edge_count() == 5);
  CHECK(quartet_topology(q, {"u", "v", "w", "y"}).str() == "u,v|w,y");
  auto t = parse_newick("((a,b),c);");
  CHECK(t.rooted());
  CHECK(triplet_topology(t, {"a", "b", "c"}).str() == "a,b|c");
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse_newick("(a,(b));"), ParseError);
  CHECK_THROWS_AS(parse_newick("(a,b,c,d);"), ParseError);
  CHECK_THROWS_AS(parse_newick("((a,b,c),d);"), ParseError);
  CHECK_THROWS_AS(parse_newick("(a,a,b);"), ParseError);
  CHECK_THROWS_AS(parse_newick("(a,b,\xCF\x81);"), ParseError);
  CHECK_THROWS_AS(parse_newick("(a,b,c)"), ParseError);
  CHECK_THROWS_AS(parse_newick("(a,,c);"), ParseError);
  CHECK_THROWS_AS(parse_newick("(a,b));"), ParseError);
}

TEST_CASE("branch lengths and comments are discarded") {
  auto t = parse_newick("(u:0.1,v:2,[note](w:1e-3,y)inner:4);");
  CHECK(write_newick(t) == "(u,v,(w,y));");
  auto r = parse_newick("('a b',c);");
  CHECK(r.has_taxon("a b"));
  CHECK(write_newick(r) == "('a b',c);");
}

TEST_CASE("canonical output") {
  CHECK(write_newick(parse_newick("((y,w),v,u);")) == "(u,v,(w,y));");
  CHECK(write_newick(parse_newick("(b,a);")) == "(a,b);");
  CHECK(write_newick(parse_newick("(c,(b,a));")) == "((a,b),c);");
}

TEST_CASE("round trip is a fixed point up to six taxa") {
  for (int n = 2; n <= 6; ++n) {
    for (const auto& t : all_unrooted_trees(letter_taxa(n))) {
      check_counts(t);
      auto s = write_newick(t);
      auto back = parse_newick(s);
      CHECK(is_isomorphic(t, back));
      CHECK(write_newick(back) == s);
    }
    for (const auto& t : all_rooted_trees(letter_taxa(n))) {
      check_counts(t);
      auto s = write_newick(t);
      CHECK(write_newick(parse_newick(s)) == s);
    }
  }
}

TEST_CASE("enumeration counts are double factorials") {
  CHECK(all_unrooted_trees(letter_taxa(4)).size() == 3);
  CHECK(all_unrooted_trees(letter_taxa(5)).size() == 15);
  CHECK(all_unrooted_trees(letter_taxa(6)).size() == 105);
  CHECK(all_rooted_trees(letter_taxa(3)).size() == 3);
  CHECK(all_rooted_trees(letter_taxa(4)).size() == 15);
  CHECK(all_rooted_trees(letter_taxa(5)).size() == 105);
  std::set<std::string> distinct;
  for (auto& t : all_rooted_trees(letter_taxa(5))) distinct.insert(write_newick(t));
  CHECK(distinct.size() == 105);
}

TEST_CASE("augment_root") {
  auto q = augment_root(parse_newick("((a,b),c);"));
  CHECK_FALSE(q.rooted());
  CHECK(q.has_taxon(kRho));
  CHECK(quartet_topology(q, {"a", "b", "c", kRho}).str() == "a,b|c," + kRho);
  auto star = augment_root(parse_newick("(a,b);"));
  CHECK(star.vertex_count() == 4);
  CHECK(star.edge_count() == 3);
  CHECK_THROWS_AS(augment_root(q), InputError);
  CHECK_THROWS_AS(augment_root(parse_newick("(a,b,c);")), InputError);
}

TEST_CASE("restrict and remove") {
  auto q = parse_newick("(u,v,(w,y));");
  std::vector<std::string> uwy{"u", "w", "y"};
  auto s = restrict_to(q, uwy);
  CHECK(s.vertex_count() == 4);
  CHECK(write_newick(s) == "(u,w,y);");
  auto r = parse_newick("((a,b),(c,d));");
  std::vector<std::string> ac{"a", "c"};
  CHECK(write_newick(restrict_to(r, ac)) == "(a,c);");
  CHECK(restrict_to(r, ac).rooted());
  CHECK(is_isomorphic(restrict_to(r, r.taxa()), r));
  std::vector<std::string> y{"y"};
  CHECK(write_newick(remove_taxa(q, y)) == "(u,v,w);");
  CHECK(is_isomorphic(remove_taxa(q, {}), q));
  std::vector<std::string> bad{"zz"};
  CHECK_THROWS_AS(restrict_to(q, bad), InputError);
  CHECK_THROWS_AS(restrict_to(q, {}), InputError);
  CHECK_THROWS_AS(remove_taxa(q, q.taxa()), InputError);

  auto cat = caterpillar(letter_taxa(6), TreeKind::unrooted);
  std::vector<std::string> drop{"b", "e"}, keep{"a", "c", "d", "f"};
  CHECK(write_newick(remove_taxa(cat, drop)) == write_newick(restrict_to(cat, keep)));
}

TEST_CASE("restriction composes") {
  for (int n = 3; n <= 5; ++n) {
    auto x = letter_taxa(n);
    auto subs = subsets(x);
    for (const auto& t : all_unrooted_trees(x))
      for (const auto& y : subs)
        for (const auto& z : subs) {
          if (!is_subset(z, y)) continue;
          auto a = restrict_to(restrict_to(t, y), z);
          auto b = restrict_to(t, z);
          check_counts(a);
          CHECK(write_newick(a) == write_newick(b));
        }
    for (const auto& t : all_rooted_trees(x))
      for (const auto& y : subs)
        for (const auto& z : subs)
          if (is_subset(z, y)) CHECK(write_newick(restrict_to(restrict_to(t, y), z)) == write_newick(restrict_to(t, z)));
  }
}

TEST_CASE("quartet extraction") {
  auto left = parse_newick("(u,v,(w,y));");
  auto right = parse_newick("(u,w,(v,y));");
  CHECK(quartet_topology(right, {"u", "v", "w", "y"}).str() == "u,w|v,y");
  CHECK_FALSE(is_isomorphic(left, right));
  auto cat = caterpillar(letter_taxa(5), TreeKind::unrooted);
  CHECK(quartet_topology(cat, {"a", "b", "d", "e"}).str() == "a,b|d,e");
  CHECK_THROWS_AS(quartet_topology(cat, {"a", "a", "d", "e"}), InputError);
  CHECK_THROWS_AS(quartet_topology(cat, {"a", "q", "d", "e"}), InputError);
}

TEST_CASE("isomorphism agrees with quartet sets and canonical strings") {
  auto x5 = letter_taxa(5);
  auto un = all_unrooted_trees(x5);
  for (std::size_t i = 0; i < un.size(); ++i)
    for (std::size_t j = 0; j < un.size(); ++j) {
      bool iso = is_isomorphic(un[i], un[j]);
      CHECK(iso == (quartets(un[i]) == quartets(un[j])));
      CHECK(iso == (i == j));
    }
  auto ro = all_rooted_trees(x5);
  for (std::size_t i = 0; i < ro.size(); ++i)
    for (std::size_t j = 0; j < ro.size(); ++j)
      CHECK(is_isomorphic(ro[i], ro[j]) == (write_newick(ro[i]) == write_newick(ro[j])));
  CHECK(is_isomorphic(parse_newick("(a,b,c);"), parse_newick("(c,a,b);")));
  CHECK_THROWS_AS(is_isomorphic(parse_newick("(a,b,c);"), parse_newick("(a,b,d);")), InputError);
}

TEST_CASE("one TBR move is visible in a quartet") {
  auto t1 = parse_newick("((a,b),c,(d,(e,f)));");
  auto t2 = parse_newick("((a,e),c,(d,(b,f)));");
  CHECK_FALSE(is_isomorphic(t1, t2));
  CHECK(quartets(t1) != quartets(t2));
}

TEST_CASE("random trees are valid") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 50; ++i) {
    auto t = random_unrooted_tree(letter_taxa(9), rng);
    check_counts(t);
    auto r = random_rooted_tree(letter_taxa(9), rng);
    check_counts(r);
    CHECK(r.rooted());
  }
}
