#include "phylomso/decomposition.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "phylomso/display_graph.hpp"
#include "phylomso/forests.hpp"

namespace phylomso {

int TreeDecomposition::max_bag_size() const {
  std::size_t m = 0;
  for (const auto& b : bags) m = std::max(m, b.size());
  return static_cast<int>(m);
}

int TreeDecomposition::width() const { return max_bag_size() - 1; }

int TreeDecomposition::add_bag(std::vector<int> bag) {
  std::sort(bag.begin(), bag.end());
  bag.erase(std::unique(bag.begin(), bag.end()), bag.end());
  bags.push_back(std::move(bag));
  return static_cast<int>(bags.size()) - 1;
}

Violation validate(const TreeDecomposition& td, const Graph& g) {
  const int nb = static_cast<int>(td.bags.size());
  auto fail = [](Violation::Kind k, std::string msg) { return Violation{k, std::move(msg)}; };
  for (int i = 0; i < nb; ++i)
    for (int v : td.bags[i])
      if (v < 0 || v >= g.n) return fail(Violation::Kind::bad_vertex, "bag " + std::to_string(i) + " names vertex " + std::to_string(v));
  if (nb == 0) {
    if (g.n == 0) return {};
    return fail(Violation::Kind::not_a_tree, "no bags");
  }
  std::vector<std::vector<int>> adj(nb);
  for (auto [a, b] : td.tree_edges) {
    if (a < 0 || b < 0 || a >= nb || b >= nb || a == b)
      return fail(Violation::Kind::not_a_tree, "bad decomposition edge " + std::to_string(a) + "-" + std::to_string(b));
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  if (static_cast<int>(td.tree_edges.size()) != nb - 1)
    return fail(Violation::Kind::not_a_tree, std::to_string(td.tree_edges.size()) + " edges on " + std::to_string(nb) + " bags");
  {
    std::vector<char> seen(nb, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      int b = stack.back();
      stack.pop_back();
      for (int c : adj[b])
        if (!seen[c]) {
          seen[c] = 1;
          ++count;
          stack.push_back(c);
        }
    }
    if (count != nb) return fail(Violation::Kind::not_a_tree, "decomposition tree is disconnected");
  }
  std::vector<std::vector<int>> holding(g.n);
  for (int i = 0; i < nb; ++i)
    for (int v : td.bags[i]) holding[v].push_back(i);
  for (int v = 0; v < g.n; ++v)
    if (holding[v].empty()) return fail(Violation::Kind::vertex_uncovered, "vertex " + std::to_string(v) + " is in no bag");
  for (auto [u, v] : g.edges) {
    bool ok = std::any_of(holding[u].begin(), holding[u].end(), [&](int b) {
      return std::binary_search(td.bags[b].begin(), td.bags[b].end(), v) ||
             std::find(td.bags[b].begin(), td.bags[b].end(), v) != td.bags[b].end();
    });
    if (!ok) return fail(Violation::Kind::edge_uncovered, "edge " + std::to_string(u) + "-" + std::to_string(v) + " is in no bag");
  }
  for (int v = 0; v < g.n; ++v) {
    std::vector<char> has(nb, 0), seen(nb, 0);
    for (int b : holding[v]) has[b] = 1;
    std::vector<int> stack{holding[v][0]};
    seen[holding[v][0]] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      int b = stack.back();
      stack.pop_back();
      for (int c : adj[b])
        if (has[c] && !seen[c]) {
          seen[c] = 1;
          ++count;
          stack.push_back(c);
        }
    }
    if (count != holding[v].size())
      return fail(Violation::Kind::not_connected, "bags holding vertex " + std::to_string(v) + " are not connected");
  }
  return {};
}

// ---------------------------------------------------------------------------
// Construction from an agreement forest

namespace {

// One component of T_i - K_i, described in tree-vertex ids.
struct Part {
  std::vector<int> verts;
  TaxonMask labels = 0;
  int root = -1;                  // smallest taxon of the component
  std::vector<int> up;            // core parent towards root, per tree vertex
  std::vector<char> core, branch;
  std::vector<std::pair<int, int>> dangling;  // (vertex, neighbour towards core), inner first
};

struct Split {
  std::vector<Part> parts;
  std::vector<int> part_of;  // per tree vertex
};

Split split_tree(const PhyloTree& t, const std::vector<int>& cuts, const TaxonIndex& index) {
  const int n = t.vertex_count();
  std::vector<char> cut(t.edge_count(), 0);
  for (int e : cuts) cut[e] = 1;
  std::vector<std::vector<int>> adj(n);
  for (int e = 0; e < t.edge_count(); ++e)
    if (!cut[e]) {
      adj[t.edge(e).a].push_back(t.edge(e).b);
      adj[t.edge(e).b].push_back(t.edge(e).a);
    }
  Split s;
  s.part_of.assign(n, -1);
  for (int start = 0; start < n; ++start) {
    if (s.part_of[start] >= 0) continue;
    Part p;
    std::vector<int> stack{start};
    int id = static_cast<int>(s.parts.size());
    s.part_of[start] = id;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      p.verts.push_back(v);
      for (int w : adj[v])
        if (s.part_of[w] < 0) {
          s.part_of[w] = id;
          stack.push_back(w);
        }
    }
    std::sort(p.verts.begin(), p.verts.end());
    p.core.assign(n, 0);
    p.branch.assign(n, 0);
    p.up.assign(n, -1);
    for (int v : p.verts)
      if (t.is_leaf(v)) {
        int bit = index.index(t.label(v));
        p.labels |= TaxonMask{1} << bit;
        if (p.root < 0 || t.label(v) < t.label(p.root)) p.root = v;
      }
    if (p.labels) {
      // Peel unlabelled leaves; what is left is the minimal subtree spanning the taxa.
      std::vector<int> deg(n, 0);
      for (int v : p.verts) {
        deg[v] = static_cast<int>(adj[v].size());
        p.core[v] = 1;
      }
      std::deque<int> peel;
      for (int v : p.verts)
        if (!t.is_leaf(v) && deg[v] <= 1) peel.push_back(v);
      std::vector<std::pair<int, int>> peeled;
      while (!peel.empty()) {
        int v = peel.front();
        peel.pop_front();
        if (!p.core[v]) continue;
        p.core[v] = 0;
        int anchor = -1;
        for (int w : adj[v])
          if (p.core[w]) {
            anchor = w;
            if (--deg[w] <= 1 && !t.is_leaf(w)) peel.push_back(w);
          }
        peeled.push_back({v, anchor});
      }
      std::reverse(peeled.begin(), peeled.end());
      p.dangling = std::move(peeled);
      for (int v : p.verts) {
        if (!p.core[v]) continue;
        int core_deg = 0;
        for (int w : adj[v]) core_deg += p.core[w];
        p.branch[v] = t.is_leaf(v) || core_deg >= 3;
      }
      std::vector<int> order{p.root};
      std::vector<char> seen(n, 0);
      seen[p.root] = 1;
      for (std::size_t i = 0; i < order.size(); ++i)
        for (int w : adj[order[i]])
          if (p.core[w] && !seen[w]) {
            seen[w] = 1;
            p.up[w] = order[i];
            order.push_back(w);
          }
    } else {
      // Taxa-free: hang everything from the smallest vertex.
      p.root = p.verts.front();
      std::vector<int> order{p.root};
      std::vector<char> seen(n, 0);
      seen[p.root] = 1;
      for (std::size_t i = 0; i < order.size(); ++i)
        for (int w : adj[order[i]])
          if (!seen[w]) {
            seen[w] = 1;
            p.dangling.push_back({w, order[i]});
            order.push_back(w);
          }
    }
    s.parts.push_back(std::move(p));
  }
  return s;
}

// Branch vertices of a part keyed by the taxa below them (hanging from the root),
// together with each one's branch-level parent and the path vertices between.
struct BranchInfo {
  int vertex;
  int parent = -1;         // branch-level parent vertex, -1 for the root
  std::vector<int> inner;  // path vertices, ordered from the parent down
};

std::map<TaxonMask, BranchInfo> branches(const PhyloTree& t, const Part& p, const TaxonIndex& index) {
  const int n = t.vertex_count();
  std::vector<TaxonMask> below(n, 0);
  std::vector<int> order;
  for (int v : p.verts)
    if (p.core[v]) order.push_back(v);
  // Deeper vertices first: sort by distance from the root.
  std::vector<int> depth(n, 0);
  std::function<int(int)> dep = [&](int v) { return p.up[v] < 0 ? 0 : 1 + dep(p.up[v]); };
  for (int v : order) depth[v] = dep(v);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return depth[a] > depth[b]; });
  for (int v : order) {
    if (t.is_leaf(v)) below[v] |= TaxonMask{1} << index.index(t.label(v));
    if (p.up[v] >= 0 && v != p.root) below[p.up[v]] |= below[v];
  }
  std::map<TaxonMask, BranchInfo> out;
  for (int v : order) {
    if (!p.branch[v]) continue;
    BranchInfo info{v, -1, {}};
    if (v != p.root) {
      int w = p.up[v];
      while (!p.branch[w]) {
        info.inner.push_back(w);
        w = p.up[w];
      }
      info.parent = w;
      std::reverse(info.inner.begin(), info.inner.end());
    }
    // The root is a leaf, so its own mask is just its taxon; key it apart.
    out[v == p.root ? 0 : below[v]] = info;
  }
  return out;
}

class Builder {
 public:
  explicit Builder(int vertices) : home_(vertices, -1) {}

  int bag(std::vector<int> verts, int attach = -1) {
    int id = td_.add_bag(std::move(verts));
    adj_.emplace_back();
    for (int v : td_.bags[id])
      if (home_[v] < 0) home_[v] = id;
    if (attach >= 0) link(attach, id);
    return id;
  }

  void link(int a, int b) {
    td_.tree_edges.push_back({a, b});
    adj_[a].push_back(b);
    adj_[b].push_back(a);
  }

  int home(int v) const { return home_[v]; }

  bool contains(int b, int v) const { return std::binary_search(td_.bags[b].begin(), td_.bags[b].end(), v); }

  // Shortest bag path from a bag holding u to a bag holding v; ties go to
  // lower bag indices. Empty when no such path exists.
  std::vector<int> shortest_path(int u, int v) const {
    const int nb = static_cast<int>(td_.bags.size());
    std::vector<int> prev(nb, -2);
    std::deque<int> queue;
    for (int b = 0; b < nb; ++b)
      if (contains(b, u)) {
        prev[b] = -1;
        queue.push_back(b);
      }
    while (!queue.empty()) {
      int b = queue.front();
      queue.pop_front();
      if (contains(b, v)) {
        std::vector<int> path;
        for (int c = b; c >= 0; c = prev[c]) path.push_back(c);
        std::reverse(path.begin(), path.end());
        return path;
      }
      auto next = adj_[b];
      std::sort(next.begin(), next.end());
      for (int c : next)
        if (prev[c] == -2) {
          prev[c] = b;
          queue.push_back(c);
        }
    }
    return {};
  }

  void add_vertex(int b, int v) {
    auto& bag = td_.bags[b];
    bag.insert(std::lower_bound(bag.begin(), bag.end(), v), v);
  }

  TreeDecomposition finish() {
    // Join any remaining pieces (only possible for degenerate certificates).
    const int nb = static_cast<int>(td_.bags.size());
    std::vector<int> comp(nb, -1);
    int first_root = -1;
    for (int s = 0; s < nb; ++s) {
      if (comp[s] >= 0) continue;
      std::vector<int> stack{s};
      comp[s] = s;
      while (!stack.empty()) {
        int b = stack.back();
        stack.pop_back();
        for (int c : adj_[b])
          if (comp[c] < 0) {
            comp[c] = s;
            stack.push_back(c);
          }
      }
      if (first_root < 0)
        first_root = s;
      else
        link(first_root, s);
    }
    return std::move(td_);
  }

 private:
  TreeDecomposition td_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> home_;
};

}  // namespace

TreeDecomposition decomposition_from_forest(const DisplayGraph& d, const AgreementForest& forest) {
  const PhyloTree& t1 = d.tree(1);
  const PhyloTree& t2 = d.tree(2);
  auto index = TaxonIndex::of(t1);
  for (int e : forest.cuts1)
    if (e < 0 || e >= t1.edge_count()) throw InputError("forest certificate names an unknown edge of T1");
  for (int e : forest.cuts2)
    if (e < 0 || e >= t2.edge_count()) throw InputError("forest certificate names an unknown edge of T2");
  Split s1 = split_tree(t1, forest.cuts1, index);
  Split s2 = split_tree(t2, forest.cuts2, index);

  std::map<TaxonMask, int> part2;
  for (int j = 0; j < static_cast<int>(s2.parts.size()); ++j)
    if (s2.parts[j].labels) part2[s2.parts[j].labels] = j;

  Builder b(d.vertex_count());
  auto dv1 = [&](int v) { return d.vertex_of(1, v); };
  auto dv2 = [&](int v) { return d.vertex_of(2, v); };

  // (i) width-2 decomposition of the two copies of each forest component.
  struct Pending {
    int tree;
    BranchInfo info;
    int bag;
  };
  std::vector<Pending> paths;
  for (const Part& p1 : s1.parts) {
    if (!p1.labels) continue;
    auto it = part2.find(p1.labels);
    if (it == part2.end()) throw InputError("forest certificate: the cuts induce different taxon partitions");
    const Part& p2 = s2.parts[it->second];
    auto br1 = branches(t1, p1, index);
    auto br2 = branches(t2, p2, index);
    if (br1.size() != br2.size()) throw InputError("forest certificate: components differ in topology");
    std::map<int, TaxonMask> key1;  // T1 branch vertex -> key
    for (auto& [k, info] : br1) key1[info.vertex] = k;
    int root_bag = b.bag({dv1(p1.root)});
    std::map<TaxonMask, int> lower_bag;  // B bag of each branch vertex, root -> root bag
    lower_bag[0] = root_bag;
    // Parents before children: process in order of the key's subset size, largest first.
    std::vector<TaxonMask> keys;
    for (auto& [k, info] : br1)
      if (k) keys.push_back(k);
    std::sort(keys.begin(), keys.end(), [](TaxonMask x, TaxonMask y) {
      return std::popcount(x) != std::popcount(y) ? std::popcount(x) > std::popcount(y) : x < y;
    });
    for (TaxonMask k : keys) {
      auto f2 = br2.find(k);
      if (f2 == br2.end()) throw InputError("forest certificate: components differ in topology");
      const BranchInfo& w1 = br1.at(k);
      const BranchInfo& w2 = f2->second;
      TaxonMask pk = key1.at(w1.parent);
      auto p2b = br2.find(pk);
      if (p2b == br2.end() || p2b->second.vertex != w2.parent)
        throw InputError("forest certificate: components differ in topology");
      int a = b.bag({dv1(w1.parent), dv2(w2.parent), dv1(w1.vertex)}, lower_bag.at(pk));
      int lo = b.bag({dv2(w2.parent), dv1(w1.vertex), dv2(w2.vertex)}, a);
      lower_bag[k] = lo;
      paths.push_back({1, w1, a});
      paths.push_back({2, w2, lo});
    }
  }

  // (ii) suppressed paths as bag chains, then dangling unlabelled vertices.
  for (const auto& pend : paths) {
    if (pend.info.inner.empty()) continue;
    auto dv = [&](int x) { return d.vertex_of(pend.tree, x); };
    int u = dv(pend.info.parent), v = dv(pend.info.vertex);
    int prev_x = u, attach = pend.bag;
    for (int x : pend.info.inner) {
      attach = b.bag({prev_x, dv(x), v}, attach);
      prev_x = dv(x);
    }
  }
  for (int i = 1; i <= 2; ++i) {
    const Split& s = i == 1 ? s1 : s2;
    auto dv = [&](int x) { return d.vertex_of(i, x); };
    for (const Part& p : s.parts) {
      if (!p.labels) b.bag({dv(p.root)});
      for (auto [y, q] : p.dangling) b.bag({dv(y), dv(q)}, b.home(dv(q)));
    }
  }

  // (iii) K1 edges bridge two separate pieces; (iv) K2 edges widen a path.
  auto same_piece = [&](int u, int v) { return !b.shortest_path(u, v).empty(); };
  for (int e : forest.cuts1) {
    int u = dv1(t1.edge(e).a), v = dv1(t1.edge(e).b);
    if (same_piece(u, v)) throw InputError("forest certificate: a T1 cut does not separate components");
    int mid = b.bag({u, v}, b.home(u));
    b.link(mid, b.home(v));
  }
  for (int e : forest.cuts2) {
    int u = dv2(t2.edge(e).a), v = dv2(t2.edge(e).b);
    auto path = b.shortest_path(u, v);
    if (path.empty()) {
      int mid = b.bag({u, v}, b.home(u));
      b.link(mid, b.home(v));
      continue;
    }
    for (int bag : path)
      if (!b.contains(bag, u)) b.add_vertex(bag, u);
  }
  return b.finish();
}

// ---------------------------------------------------------------------------
// Elimination orders and exact treewidth

int elimination_width(const Graph& g, const std::vector<int>& order) {
  auto adj = g.adjacency();
  std::vector<std::vector<char>> m(g.n, std::vector<char>(g.n, 0));
  for (auto [u, v] : g.edges) m[u][v] = m[v][u] = 1;
  std::vector<char> gone(g.n, 0);
  int width = 0;
  for (int v : order) {
    std::vector<int> nb;
    for (int w = 0; w < g.n; ++w)
      if (!gone[w] && w != v && m[v][w]) nb.push_back(w);
    width = std::max(width, static_cast<int>(nb.size()));
    for (int a : nb)
      for (int c : nb)
        if (a != c) m[a][c] = 1;
    gone[v] = 1;
  }
  return width;
}

TreeDecomposition decomposition_from_order(const Graph& g, const std::vector<int>& order) {
  if (static_cast<int>(order.size()) != g.n) throw InputError("elimination order must list every vertex once");
  std::vector<int> pos(g.n, -1);
  for (int i = 0; i < g.n; ++i) {
    if (order[i] < 0 || order[i] >= g.n || pos[order[i]] >= 0) throw InputError("elimination order must list every vertex once");
    pos[order[i]] = i;
  }
  std::vector<std::vector<char>> m(g.n, std::vector<char>(g.n, 0));
  for (auto [u, v] : g.edges) m[u][v] = m[v][u] = 1;
  TreeDecomposition td;
  std::vector<int> later(g.n, -1);  // earliest-eliminated later neighbour
  for (int i = 0; i < g.n; ++i) {
    int v = order[i];
    std::vector<int> nb;
    for (int w = 0; w < g.n; ++w)
      if (w != v && m[v][w] && pos[w] > i) nb.push_back(w);
    for (int a : nb)
      for (int c : nb)
        if (a != c) m[a][c] = 1;
    std::vector<int> bag = nb;
    bag.push_back(v);
    td.add_bag(bag);
    for (int w : nb)
      if (later[v] < 0 || pos[w] < pos[later[v]]) later[v] = w;
  }
  int last_root = -1;
  for (int i = 0; i < g.n; ++i) {
    int v = order[i];
    if (later[v] >= 0) {
      td.tree_edges.push_back({i, pos[later[v]]});
    } else {
      if (last_root >= 0) td.tree_edges.push_back({last_root, i});
      last_root = i;
    }
  }
  return td;
}

namespace {

using Mask = std::uint32_t;

// Decides treewidth <= k by search over sets of eliminated vertices, keeping
// the elimination graph as adjacency bitmasks. Failed sets are memoised.
class TwSearch {
 public:
  TwSearch(const Graph& g) : n_(g.n), full_(n_ == 32 ? ~Mask{0} : (Mask{1} << n_) - 1), base_(n_, 0) {
    for (auto [u, v] : g.edges) {
      base_[u] |= Mask{1} << v;
      base_[v] |= Mask{1} << u;
    }
  }

  bool decide(int k, std::vector<int>& order) {
    k_ = k;
    failed_.clear();
    order.clear();
    return dfs(base_, 0, order);
  }

 private:
  bool dfs(const std::vector<Mask>& adj, Mask gone, std::vector<int>& order) {
    Mask left = full_ & ~gone;
    if (std::popcount(left) <= k_ + 1) {
      for (int v = 0; v < n_; ++v)
        if (left >> v & 1) order.push_back(v);
      return true;
    }
    if (failed_.count(gone)) return false;
    // A simplicial vertex of small enough degree can always go first.
    int forced = -1;
    for (int v = 0; v < n_ && forced < 0; ++v) {
      if (!(left >> v & 1) || std::popcount(adj[v]) > k_) continue;
      bool clique = true;
      for (Mask rest = adj[v]; rest && clique; rest &= rest - 1) {
        int w = std::countr_zero(rest);
        if ((adj[v] & ~(Mask{1} << w) & ~adj[w]) != 0) clique = false;
      }
      if (clique) forced = v;
    }
    for (int v = 0; v < n_; ++v) {
      if (forced >= 0 && v != forced) continue;
      if (!(left >> v & 1) || std::popcount(adj[v]) > k_) continue;
      std::vector<Mask> next = adj;
      Mask nb = adj[v];
      for (Mask rest = nb; rest; rest &= rest - 1) {
        int w = std::countr_zero(rest);
        next[w] = (next[w] | nb) & ~(Mask{1} << w) & ~(Mask{1} << v);
      }
      next[v] = 0;
      order.push_back(v);
      if (dfs(next, gone | Mask{1} << v, order)) return true;
      order.pop_back();
    }
    failed_.insert(gone);
    return false;
  }

  int n_;
  Mask full_;
  std::vector<Mask> base_;
  int k_ = 0;
  std::unordered_set<Mask> failed_;
};

// Greedy min-degree order, used as an upper bound.
std::vector<int> min_degree_order(const Graph& g) {
  std::vector<std::vector<char>> m(g.n, std::vector<char>(g.n, 0));
  for (auto [u, v] : g.edges) m[u][v] = m[v][u] = 1;
  std::vector<char> gone(g.n, 0);
  std::vector<int> order;
  for (int step = 0; step < g.n; ++step) {
    int best = -1, best_deg = g.n + 1;
    for (int v = 0; v < g.n; ++v) {
      if (gone[v]) continue;
      int deg = 0;
      for (int w = 0; w < g.n; ++w) deg += !gone[w] && m[v][w];
      if (deg < best_deg) {
        best = v;
        best_deg = deg;
      }
    }
    for (int a = 0; a < g.n; ++a)
      for (int c = 0; c < g.n; ++c)
        if (a != c && !gone[a] && !gone[c] && m[best][a] && m[best][c]) m[a][c] = 1;
    gone[best] = 1;
    order.push_back(best);
  }
  return order;
}

}  // namespace

TreewidthResult exact_treewidth(const Graph& g, int limit) {
  if (g.n > limit || g.n > 32)
    throw SizeGuardError("exact treewidth is limited to " + std::to_string(std::min(limit, 32)) + " vertices");
  TreewidthResult r;
  auto upper = min_degree_order(g);
  int ub = elimination_width(g, upper);
  int lb = g.edges.empty() ? 0 : 1;
  TwSearch search(g);
  r.order = upper;
  r.width = ub;
  for (int k = lb; k < ub; ++k) {
    std::vector<int> order;
    if (search.decide(k, order)) {
      r.order = order;
      r.width = k;
      break;
    }
  }
  if (g.n == 0) r.width = 0;
  r.decomposition = decomposition_from_order(g, r.order);
  return r;
}

// ---------------------------------------------------------------------------
// .td text

std::string emit_td(const TreeDecomposition& td, int vertex_count) {
  std::ostringstream out;
  out << "c width convention: the header's third field is the largest bag size (treewidth + 1)\n";
  out << "s td " << td.bags.size() << " " << td.max_bag_size() << " " << vertex_count << "\n";
  for (std::size_t i = 0; i < td.bags.size(); ++i) {
    out << "b " << i + 1;
    for (int v : td.bags[i]) out << " " << v + 1;
    out << "\n";
  }
  for (auto [a, b] : td.tree_edges) out << a + 1 << " " << b + 1 << "\n";
  return out.str();
}

TreeDecomposition parse_td(const std::string& text, int* vertex_count) {
  std::istringstream in(text);
  std::string line;
  TreeDecomposition td;
  int nbags = -1, maxbag = -1, nverts = -1;
  std::vector<char> filled;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == 'c') continue;
    std::istringstream ls(line);
    if (nbags < 0) {
      std::string s, kind;
      ls >> s >> kind >> nbags >> maxbag >> nverts;
      if (!ls || s != "s" || kind != "td" || nbags < 0 || nverts < 0) throw ParseError(".td: bad header '" + line + "'");
      td.bags.assign(nbags, {});
      filled.assign(nbags, 0);
      continue;
    }
    if (line[0] == 'b') {
      std::string b;
      int id;
      ls >> b >> id;
      if (!ls || id < 1 || id > nbags) throw ParseError(".td: bad bag line '" + line + "'");
      if (filled[id - 1]) throw ParseError(".td: bag " + std::to_string(id) + " listed twice");
      filled[id - 1] = 1;
      int v;
      std::vector<int> bag;
      while (ls >> v) {
        if (v < 1 || v > nverts) throw ParseError(".td: vertex out of range in '" + line + "'");
        bag.push_back(v - 1);
      }
      std::sort(bag.begin(), bag.end());
      bag.erase(std::unique(bag.begin(), bag.end()), bag.end());
      td.bags[id - 1] = std::move(bag);
      continue;
    }
    int a, c;
    if (!(ls >> a >> c) || a < 1 || c < 1 || a > nbags || c > nbags) throw ParseError(".td: bad edge line '" + line + "'");
    td.tree_edges.push_back({a - 1, c - 1});
  }
  if (nbags < 0) throw ParseError(".td: missing header");
  if (std::find(filled.begin(), filled.end(), 0) != filled.end()) throw ParseError(".td: a bag is missing");
  if (td.max_bag_size() != maxbag && nbags > 0) throw ParseError(".td: header bag size does not match the bags");
  if (vertex_count) *vertex_count = nverts;
  return td;
}

}  // namespace phylomso
