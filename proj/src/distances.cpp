#include "phylomso/distances.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <unordered_map>

#include "json.hpp"

namespace phylomso {

ForestDistance d_tbr(const PhyloTree& t1, const PhyloTree& t2) {
  if (t1.rooted() || t2.rooted()) throw InputError("d_tbr needs unrooted trees");
  auto f = umaf(t1, t2);
  return {f.size() - 1, std::move(f)};
}

ForestDistance d_rspr(const PhyloTree& t1, const PhyloTree& t2) {
  if (!t1.rooted() || !t2.rooted()) throw InputError("d_rspr needs rooted trees");
  auto f = maf_rooted(t1, t2);
  return {f.size() - 1, std::move(f)};
}

HybridizationResult hyb_number(const PhyloTree& t1, const PhyloTree& t2, bool dual_certify) {
  if (!t1.rooted() || !t2.rooted()) throw InputError("hyb_number needs rooted trees");
  HybridizationResult r;
  r.forest = maaf(t1, t2);
  r.value = r.forest.size() - 1;
  if (dual_certify) {
    r.sequence = min_tree_sequence(t1, t2);
    if (r.sequence->length() != r.value)
      throw CertificationError("acyclic forest gives " + std::to_string(r.value) + " but the shortest tree sequence has length " +
                               std::to_string(r.sequence->length()));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Rearrangement neighbourhoods

namespace {

// One side of a tree after deleting an edge, in local vertex ids.
struct Piece {
  std::vector<std::string> labels;
  std::vector<Edge> edges;
  int anchor = -1;  // local id of the cut endpoint, or -1 once suppressed
};

Piece piece_of(const PhyloTree& t, int cut, int start, bool suppress_start) {
  const int n = t.vertex_count();
  std::vector<char> in(n, 0);
  std::vector<int> stack{start};
  in[start] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int e : t.incident_edges(v)) {
      if (e == cut) continue;
      int w = t.edge(e).a == v ? t.edge(e).b : t.edge(e).a;
      if (!in[w]) {
        in[w] = 1;
        stack.push_back(w);
      }
    }
  }
  int deg = 0;
  for (int e : t.incident_edges(start))
    if (e != cut) ++deg;
  bool drop = suppress_start && deg == 2;
  Piece p;
  std::vector<int> local(n, -1);
  for (int v = 0; v < n; ++v)
    if (in[v] && !(drop && v == start)) {
      local[v] = static_cast<int>(p.labels.size());
      p.labels.push_back(t.label(v));
    }
  std::vector<int> ends;
  for (int e = 0; e < t.edge_count(); ++e) {
    if (e == cut) continue;
    auto [a, b] = t.edge(e);
    if (!in[a]) continue;
    if (drop && (a == start || b == start)) {
      ends.push_back(a == start ? b : a);
      continue;
    }
    p.edges.push_back({local[a], local[b]});
  }
  if (drop) p.edges.push_back({local[ends[0]], local[ends[1]]});
  p.anchor = drop ? -1 : local[start];
  return p;
}

// Attach point: a vertex (when `vertex` >= 0) or the edge to subdivide.
struct Attach {
  int vertex = -1;
  int edge = -1;
};

std::vector<Attach> edge_attachments(const Piece& p) {
  std::vector<Attach> out;
  if (p.edges.empty()) {
    out.push_back({0, -1});
    return out;
  }
  for (int e = 0; e < static_cast<int>(p.edges.size()); ++e) out.push_back({-1, e});
  return out;
}

PhyloTree join(const Piece& x, Attach ax, const Piece& y, Attach ay) {
  std::vector<std::string> labels = x.labels;
  std::vector<Edge> edges = x.edges;
  const int off = static_cast<int>(labels.size());
  labels.insert(labels.end(), y.labels.begin(), y.labels.end());
  for (auto e : y.edges) edges.push_back({e.a + off, e.b + off});
  auto point = [&](const Attach& at, int shift, int edge_shift) {
    if (at.vertex >= 0) return at.vertex + shift;
    int mid = static_cast<int>(labels.size());
    labels.emplace_back();
    Edge old = edges[at.edge + edge_shift];
    edges[at.edge + edge_shift] = {old.a, mid};
    edges.push_back({mid, old.b});
    return mid;
  };
  int p = point(ax, 0, 0);
  int q = point(ay, off, static_cast<int>(x.edges.size()));
  edges.push_back({p, q});
  return PhyloTree::from_edges(TreeKind::unrooted, std::move(labels), std::move(edges));
}

}  // namespace

std::vector<std::string> tbr_neighbours(const PhyloTree& t) {
  if (t.rooted()) throw InputError("TBR moves act on unrooted trees");
  std::set<std::string> out;
  const std::string self = write_newick(t);
  for (int e = 0; e < t.edge_count(); ++e) {
    auto [u, v] = t.edge(e);
    Piece pu = piece_of(t, e, u, true), pv = piece_of(t, e, v, true);
    for (auto au : edge_attachments(pu))
      for (auto av : edge_attachments(pv)) {
        auto s = write_newick(join(pu, au, pv, av));
        if (s != self) out.insert(s);
      }
  }
  return {out.begin(), out.end()};
}

std::vector<std::string> rspr_neighbours(const PhyloTree& t) {
  if (!t.rooted()) throw InputError("rSPR moves act on rooted trees");
  std::set<std::string> out;
  const std::string self = write_newick(t);
  auto a = augment_root(t);
  // The original edges keep their (parent, child) orientation in `a`.
  for (int e = 0; e < t.edge_count(); ++e) {
    auto [parent, child] = a.edge(e);
    Piece pruned = piece_of(a, e, child, false);
    Piece rest = piece_of(a, e, parent, true);
    for (auto at : edge_attachments(rest)) {
      auto s = write_newick(strip_root(join(pruned, {pruned.anchor, -1}, rest, at)));
      if (s != self) out.insert(s);
    }
  }
  return {out.begin(), out.end()};
}

namespace {

int bfs(const PhyloTree& t1, const PhyloTree& t2, std::vector<std::string> (*step)(const PhyloTree&)) {
  const std::string target = write_newick(t2);
  std::string start = write_newick(t1);
  if (start == target) return 0;
  std::unordered_map<std::string, int> dist{{start, 0}};
  std::deque<std::string> queue{start};
  while (!queue.empty()) {
    auto cur = queue.front();
    queue.pop_front();
    for (auto& nb : step(parse_newick(cur))) {
      if (dist.count(nb)) continue;
      int d = dist[cur] + 1;
      if (nb == target) return d;
      dist.emplace(nb, d);
      queue.push_back(nb);
    }
  }
  throw std::logic_error("rearrangement space is disconnected");
}

void guard(const PhyloTree& t, int limit, const char* what) {
  if (t.leaf_count() > limit)
    throw SizeGuardError(std::string(what) + " is limited to " + std::to_string(limit) + " taxa");
}

}  // namespace

int tbr_move_bfs(const PhyloTree& t1, const PhyloTree& t2, int limit) {
  require_same_taxa(t1, t2);
  if (t1.rooted()) throw InputError("TBR moves act on unrooted trees");
  guard(t1, limit, "TBR search");
  if (t1.leaf_count() <= 3) return 0;
  return bfs(t1, t2, &tbr_neighbours);
}

int rspr_move_bfs(const PhyloTree& t1, const PhyloTree& t2, int limit) {
  require_same_taxa(t1, t2);
  if (!t1.rooted()) throw InputError("rSPR moves act on rooted trees");
  guard(t1, limit, "rSPR search");
  if (t1.leaf_count() <= 2) return 0;
  return bfs(t1, t2, &rspr_neighbours);
}

// ---------------------------------------------------------------------------
// Parsimony

namespace {

void check_character(const PhyloTree& t, const Character& f) {
  for (const auto& x : t.taxa())
    if (!f.count(x)) throw InputError("character does not colour taxon '" + x + "'");
  if (f.size() != static_cast<std::size_t>(t.leaf_count())) throw InputError("character colours unknown taxa");
}

unsigned colour_set(FitchState s) {
  switch (s) {
    case FitchState::R: return 1;
    case FitchState::B: return 2;
    default: return 3;
  }
}

FitchLabeling run_fitch(PhyloTree rooted, const Character& f) {
  FitchLabeling out;
  const int n = rooted.vertex_count();
  out.states.assign(n, FitchState::R);
  std::vector<int> order{rooted.root()};
  for (std::size_t i = 0; i < order.size(); ++i)
    for (int c : rooted.children(order[i])) order.push_back(c);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int v = *it;
    if (rooted.is_leaf(v)) {
      out.states[v] = f.at(rooted.label(v)) == Colour::red ? FitchState::R : FitchState::B;
      continue;
    }
    auto kids = rooted.children(v);
    unsigned a = colour_set(out.states[kids[0]]), b = colour_set(out.states[kids[1]]);
    unsigned both = a & b;
    if (both == 0) {
      out.states[v] = FitchState::RB_U;
      ++out.score;
    } else {
      out.states[v] = both == 1 ? FitchState::R : both == 2 ? FitchState::B : FitchState::RB_I;
    }
  }
  out.rooted = std::move(rooted);
  return out;
}

}  // namespace

FitchLabeling fitch_score(const PhyloTree& tree, const Character& f) {
  check_character(tree, f);
  if (tree.rooted()) return run_fitch(tree, f);
  if (tree.leaf_count() == 1) return run_fitch(parse_newick(tree.label(0) + ";"), f);
  return run_fitch(root_at_edge(tree, smallest_taxon_edge(tree)), f);
}

FitchLabeling fitch_score(const PhyloTree& tree, const Character& f, int rooting_edge) {
  check_character(tree, f);
  return run_fitch(root_at_edge(tree, rooting_edge), f);
}

int fitch_bruteforce(const PhyloTree& tree, const Character& f, int limit) {
  check_character(tree, f);
  guard(tree, limit, "brute-force parsimony");
  std::vector<int> internal;
  for (int v = 0; v < tree.vertex_count(); ++v)
    if (!tree.is_leaf(v)) internal.push_back(v);
  std::vector<int> colour(tree.vertex_count(), 0);
  for (int v = 0; v < tree.vertex_count(); ++v)
    if (tree.is_leaf(v)) colour[v] = f.at(tree.label(v)) == Colour::red ? 0 : 1;
  int best = tree.edge_count();
  for (unsigned m = 0; m < (1u << internal.size()); ++m) {
    for (std::size_t i = 0; i < internal.size(); ++i) colour[internal[i]] = m >> i & 1;
    int cost = 0;
    for (const auto& e : tree.edges()) cost += colour[e.a] != colour[e.b];
    best = std::min(best, cost);
  }
  return best;
}

std::vector<Character> half_characters(const std::vector<std::string>& taxa) {
  std::vector<Character> out;
  const int n = static_cast<int>(taxa.size());
  if (n == 0) return out;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << (n - 1)); ++m) {
    Character f;
    f[taxa[0]] = Colour::red;
    for (int i = 1; i < n; ++i) f[taxa[i]] = (m >> (n - 1 - i) & 1) ? Colour::blue : Colour::red;
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<Character> all_characters(const std::vector<std::string>& taxa) {
  std::vector<Character> out;
  const int n = static_cast<int>(taxa.size());
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    Character f;
    for (int i = 0; i < n; ++i) f[taxa[i]] = (m >> (n - 1 - i) & 1) ? Colour::blue : Colour::red;
    out.push_back(std::move(f));
  }
  return out;
}

namespace {

// Characters come in lexicographic colour order, so the first strict
// improvement is the lexicographically smallest witness.
D2mpResult best_character(const PhyloTree& t1, const PhyloTree& t2, int limit, bool both_directions) {
  require_same_taxa(t1, t2);
  if (t1.rooted()) throw InputError("d2mp needs unrooted trees");
  guard(t1, limit, "d2mp");
  D2mpResult best;
  bool have = false;
  for (auto& f : half_characters(t1.taxa())) {
    int a = fitch_score(t1, f).score, b = fitch_score(t2, f).score;
    int v = both_directions ? std::abs(a - b) : a - b;
    if (!have || v > best.value) {
      best = {v, f, a, b};
      have = true;
    }
  }
  return best;
}

}  // namespace

D2mpResult d2mp(const PhyloTree& t1, const PhyloTree& t2, int limit) { return best_character(t1, t2, limit, true); }

D2mpResult d2mp_directional(const PhyloTree& t1, const PhyloTree& t2, int limit) {
  return best_character(t1, t2, limit, false);
}

std::string colour_name(Colour c) { return c == Colour::red ? "red" : "blue"; }

std::string character_json(const Character& f) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [x, c] : f) j[x] = colour_name(c);
  return j.dump();
}

}  // namespace phylomso
