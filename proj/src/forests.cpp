#include "phylomso/forests.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <map>
#include <numeric>
#include <set>

#include "json.hpp"
#include "phylomso/detail/mutable_tree.hpp"

namespace phylomso {

CutResult apply_cuts(const PhyloTree& tree, const std::vector<int>& cuts) {
  detail::MutableTree m(tree);
  for (int e : cuts) {
    if (e < 0 || e >= tree.edge_count()) throw InputError("cut edge id out of range");
    m.remove_edge(tree.edge(e).a, tree.edge(e).b);
  }
  CutResult out;
  for (const auto& comp : m.components())
    if (std::none_of(comp.begin(), comp.end(), [&](int v) { return !m.labels[v].empty(); })) ++out.dropped;
  m.clean();
  for (const auto& comp : m.components()) out.components.push_back(m.component_tree(comp));
  std::sort(out.components.begin(), out.components.end(),
            [](const PhyloTree& a, const PhyloTree& b) { return a.taxa().front() < b.taxa().front(); });
  return out;
}

namespace {

struct Dsu {
  std::vector<int> p;
  explicit Dsu(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
  }
  void unite(int a, int b) { p[find(a)] = find(b); }
};

// Everything the cut search needs about one ordered pair of trees.
struct Pair {
  PhyloTree orig1, orig2;  // as given
  PhyloTree a, b;          // search trees (ρ-augmented when rooted)
  bool rooted = false;
  TaxonIndex index;
  TaxonMask rho_bit = 0;
  std::vector<int> leaf_bit_a, leaf_bit_b;  // per vertex, -1 for internal
  std::vector<TaxonMask> sides_a, sides_b;  // unrooted comparison
  std::vector<TaxonMask> clades1, clades2;  // rooted comparison

  Pair(const PhyloTree& t1, const PhyloTree& t2) : orig1(t1), orig2(t2) {
    require_same_taxa(t1, t2);
    rooted = t1.rooted();
    a = rooted ? augment_root(t1) : t1;
    b = rooted ? augment_root(t2) : t2;
    index = TaxonIndex::of(a);
    if (rooted) {
      rho_bit = TaxonMask{1} << index.index(kRho);
      clades1 = subtree_masks(t1, index);
      clades2 = subtree_masks(t2, index);
    } else {
      sides_a = edge_side_masks(a, index);
      sides_b = edge_side_masks(b, index);
    }
    auto bits = [&](const PhyloTree& t) {
      std::vector<int> out(t.vertex_count(), -1);
      for (int v = 0; v < t.vertex_count(); ++v)
        if (t.is_leaf(v)) out[v] = index.index(t.label(v));
      return out;
    };
    leaf_bit_a = bits(a);
    leaf_bit_b = bits(b);
  }

  int taxa() const { return index.size(); }

  // Labelled blocks of t - cuts, sorted. Taxa-free components are ignored;
  // `unlabelled` receives how many there were.
  static std::vector<TaxonMask> partition(const PhyloTree& t, const std::vector<int>& leaf_bit,
                                          const std::vector<int>& cuts, int* unlabelled = nullptr) {
    const int n = t.vertex_count();
    std::vector<char> cut(t.edge_count(), 0);
    for (int e : cuts) cut[e] = 1;
    Dsu dsu(n);
    for (int e = 0; e < t.edge_count(); ++e)
      if (!cut[e]) dsu.unite(t.edge(e).a, t.edge(e).b);
    std::vector<TaxonMask> block(n, 0);
    std::vector<char> is_root(n, 0);
    for (int v = 0; v < n; ++v) {
      int r = dsu.find(v);
      is_root[r] = 1;
      if (leaf_bit[v] >= 0) block[r] |= TaxonMask{1} << leaf_bit[v];
    }
    std::vector<TaxonMask> out;
    int empty = 0;
    for (int v = 0; v < n; ++v)
      if (is_root[v]) {
        if (block[v])
          out.push_back(block[v]);
        else
          ++empty;
      }
    if (unlabelled) *unlabelled = empty;
    std::sort(out.begin(), out.end());
    return out;
  }

  bool same_topologies(const std::vector<TaxonMask>& blocks) const {
    for (TaxonMask blk : blocks) {
      if (rooted) {
        TaxonMask r = blk & ~rho_bit;
        if (std::popcount(r) >= 3 && restricted_clusters(clades1, r) != restricted_clusters(clades2, r)) return false;
      } else if (std::popcount(blk) >= 4 && restricted_splits(sides_a, blk) != restricted_splits(sides_b, blk)) {
        return false;
      }
    }
    return true;
  }

  static TaxonMask lowest_first(TaxonMask a) { return a & (~a + 1); }

  AgreementForest forest(const std::vector<TaxonMask>& blocks, std::vector<int> cuts1, std::vector<int> cuts2) const {
    AgreementForest f;
    f.rooted = rooted;
    auto ordered = blocks;
    std::sort(ordered.begin(), ordered.end(), [](TaxonMask x, TaxonMask y) { return lowest_first(x) < lowest_first(y); });
    for (TaxonMask blk : ordered) {
      auto labels = index.labels_of(blk);
      ForestComponent c;
      c.taxa = labels;
      if (rooted && !(blk & rho_bit))
        c.tree = restrict_to(orig1, labels);
      else
        c.tree = restrict_to(a, labels);
      f.components.push_back(std::move(c));
    }
    std::sort(cuts1.begin(), cuts1.end());
    std::sort(cuts2.begin(), cuts2.end());
    f.cuts1 = std::move(cuts1);
    f.cuts2 = std::move(cuts2);
    return f;
  }
};

// Calls fn(combo) for every m-subset of {0..n-1} in lexicographic order until fn returns true.
bool for_each_combination(int n, int m, const std::function<bool(const std::vector<int>&)>& fn) {
  if (m > n) return false;
  std::vector<int> c(m);
  std::iota(c.begin(), c.end(), 0);
  while (true) {
    if (fn(c)) return true;
    int i = m - 1;
    while (i >= 0 && c[i] == n - m + i) --i;
    if (i < 0) return false;
    ++c[i];
    for (int j = i + 1; j < m; ++j) c[j] = c[j - 1] + 1;
  }
}

// Partitions of b reachable with size-1 cuts and exactly `size` labelled
// blocks, mapped to the lexicographically first cut set producing them.
std::map<std::vector<TaxonMask>, std::vector<int>> partitions_of(const Pair& p, int size) {
  std::map<std::vector<TaxonMask>, std::vector<int>> out;
  for_each_combination(p.b.edge_count(), size - 1, [&](const std::vector<int>& cuts) {
    auto blocks = Pair::partition(p.b, p.leaf_bit_b, cuts);
    if (static_cast<int>(blocks.size()) == size) out.emplace(blocks, cuts);
    return false;
  });
  return out;
}

using Filter = std::function<bool(const Pair&, const std::vector<TaxonMask>&)>;

// Scans cut sets of a in lexicographic order; for each agreeing partition
// calls accept, stopping when it returns true.
bool scan_size(const Pair& p, int size, const Filter& filter,
               const std::function<bool(const std::vector<TaxonMask>&, const std::vector<int>&, const std::vector<int>&)>& accept) {
  auto targets = partitions_of(p, size);
  if (targets.empty()) return false;
  std::set<std::vector<TaxonMask>> seen;
  return for_each_combination(p.a.edge_count(), size - 1, [&](const std::vector<int>& cuts) {
    auto blocks = Pair::partition(p.a, p.leaf_bit_a, cuts);
    if (static_cast<int>(blocks.size()) != size) return false;
    auto it = targets.find(blocks);
    if (it == targets.end() || !seen.insert(blocks).second) return false;
    if (!p.same_topologies(blocks)) return false;
    if (filter && !filter(p, blocks)) return false;
    return accept(blocks, cuts, it->second);
  });
}

AgreementForest minimum_forest(const Pair& p, const Filter& filter) {
  for (int size = 1; size <= p.taxa(); ++size) {
    std::optional<AgreementForest> found;
    scan_size(p, size, filter, [&](const auto& blocks, const auto& c1, const auto& c2) {
      found = p.forest(blocks, c1, c2);
      return true;
    });
    if (found) return *found;
  }
  throw std::logic_error("no agreement forest found");  // the all-singletons forest always agrees
}

// Inheritance arcs from the block masks directly.
InheritanceGraph inheritance_of(const Pair& p, const std::vector<TaxonMask>& blocks) {
  InheritanceGraph g;
  g.nodes = static_cast<int>(blocks.size());
  for (const PhyloTree* t : {&p.orig1, &p.orig2}) {
    // Preorder intervals for ancestor tests, clade masks for LCAs.
    const int n = t->vertex_count();
    std::vector<int> tin(n), tout(n);
    int clock = 0;
    std::function<void(int)> dfs = [&](int v) {
      tin[v] = clock++;
      for (int c : t->children(v)) dfs(c);
      tout[v] = clock;
    };
    dfs(t->root());
    auto masks = subtree_masks(*t, p.index);
    std::vector<int> root_of(blocks.size(), -1);  // -1: the virtual ρ top
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      if (blocks[i] & p.rho_bit) continue;
      int best = t->root();
      for (int v = 0; v < n; ++v)
        if ((masks[v] & blocks[i]) == blocks[i] && std::popcount(masks[v]) < std::popcount(masks[best])) best = v;
      root_of[i] = best;
    }
    for (std::size_t i = 0; i < blocks.size(); ++i)
      for (std::size_t j = 0; j < blocks.size(); ++j) {
        if (i == j || root_of[j] < 0) continue;
        int u = root_of[i], v = root_of[j];
        bool anc = u < 0 || (u != v && tin[u] <= tin[v] && tout[v] <= tout[u]);
        if (anc) g.arcs.push_back({static_cast<int>(i), static_cast<int>(j)});
      }
  }
  std::sort(g.arcs.begin(), g.arcs.end());
  g.arcs.erase(std::unique(g.arcs.begin(), g.arcs.end()), g.arcs.end());
  return g;
}

std::vector<TaxonMask> masks_of(const Pair& p, const AgreementForest& f) {
  std::vector<TaxonMask> out;
  for (const auto& c : f.components) out.push_back(p.index.mask_of(c.taxa));
  return out;
}

}  // namespace

bool InheritanceGraph::acyclic() const {
  std::vector<int> indeg(nodes, 0);
  std::vector<std::vector<int>> out(nodes);
  for (auto [a, b] : arcs) {
    out[a].push_back(b);
    ++indeg[b];
  }
  std::vector<int> ready;
  for (int v = 0; v < nodes; ++v)
    if (!indeg[v]) ready.push_back(v);
  int done = 0;
  while (!ready.empty()) {
    int v = ready.back();
    ready.pop_back();
    ++done;
    for (int w : out[v])
      if (--indeg[w] == 0) ready.push_back(w);
  }
  return done == nodes;
}

std::optional<AgreementForest> is_agreement_forest(const PhyloTree& t1, const PhyloTree& t2,
                                                   const std::vector<int>& cuts1, const std::vector<int>& cuts2) {
  Pair p(t1, t2);
  auto check = [](const PhyloTree& t, const std::vector<int>& cuts) {
    std::set<int> s(cuts.begin(), cuts.end());
    if (s.size() != cuts.size()) throw InputError("repeated cut edge");
    for (int e : cuts)
      if (e < 0 || e >= t.edge_count()) throw InputError("cut edge id out of range");
  };
  check(p.a, cuts1);
  check(p.b, cuts2);
  auto b1 = Pair::partition(p.a, p.leaf_bit_a, cuts1);
  auto b2 = Pair::partition(p.b, p.leaf_bit_b, cuts2);
  if (b1 != b2 || !p.same_topologies(b1)) return std::nullopt;
  return p.forest(b1, cuts1, cuts2);
}

AgreementForest umaf(const PhyloTree& t1, const PhyloTree& t2) {
  if (t1.rooted() || t2.rooted()) throw InputError("umaf needs unrooted trees");
  return minimum_forest(Pair(t1, t2), nullptr);
}

AgreementForest maf_rooted(const PhyloTree& t1, const PhyloTree& t2) {
  if (!t1.rooted() || !t2.rooted()) throw InputError("maf_rooted needs rooted trees");
  return minimum_forest(Pair(t1, t2), nullptr);
}

AgreementForest maaf(const PhyloTree& t1, const PhyloTree& t2) {
  if (!t1.rooted() || !t2.rooted()) throw InputError("maaf needs rooted trees");
  return minimum_forest(Pair(t1, t2), [](const Pair& p, const std::vector<TaxonMask>& blocks) {
    return inheritance_of(p, blocks).acyclic();
  });
}

std::vector<AgreementForest> enumerate_agreement_forests(const PhyloTree& t1, const PhyloTree& t2, int size) {
  Pair p(t1, t2);
  std::vector<AgreementForest> out;
  if (size < 1) return out;
  scan_size(p, size, nullptr, [&](const auto& blocks, const auto& c1, const auto& c2) {
    out.push_back(p.forest(blocks, c1, c2));
    return false;
  });
  return out;
}

InheritanceGraph inheritance_graph(const PhyloTree& t1, const PhyloTree& t2, const AgreementForest& forest) {
  if (!t1.rooted()) throw InputError("inheritance graphs need rooted trees");
  if (!is_agreement_forest(t1, t2, forest.cuts1, forest.cuts2)) throw InputError("not an agreement forest");
  Pair p(t1, t2);
  return inheritance_of(p, masks_of(p, forest));
}

namespace {

struct Pruning {
  TaxonIndex index;
  std::vector<TaxonMask> clades1, clades2;

  Pruning(const PhyloTree& t1, const PhyloTree& t2) {
    require_same_taxa(t1, t2);
    if (!t1.rooted()) throw InputError("common pendant subtrees need rooted trees");
    index = TaxonIndex::of(t1);
    clades1 = subtree_masks(t1, index);
    clades2 = subtree_masks(t2, index);
  }

  bool same_topology(TaxonMask c) const {
    return std::popcount(c) < 3 || restricted_clusters(clades1, c) == restricted_clusters(clades2, c);
  }

  // Common pendant subtrees of both trees restricted to `remaining`.
  std::vector<TaxonMask> common(TaxonMask remaining) const {
    auto a = restricted_clusters(clades1, remaining);
    auto b = restricted_clusters(clades2, remaining);
    std::vector<TaxonMask> both;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
    std::vector<TaxonMask> out;
    for (TaxonMask c : both)
      if (same_topology(c)) out.push_back(c);
    std::stable_sort(out.begin(), out.end(), [](TaxonMask x, TaxonMask y) {
      return std::popcount(x) != std::popcount(y) ? std::popcount(x) < std::popcount(y) : x < y;
    });
    return out;
  }
};

}  // namespace

std::vector<std::vector<std::string>> common_pendant_subtrees(const PhyloTree& t1, const PhyloTree& t2,
                                                              const std::vector<std::vector<std::string>>& pruned) {
  Pruning pr(t1, t2);
  TaxonMask gone = 0;
  for (const auto& z : pruned) {
    TaxonMask m = pr.index.mask_of(z);
    if (m & gone) throw InputError("pruned taxon sets overlap");
    gone |= m;
  }
  TaxonMask remaining = pr.index.all() & ~gone;
  if (!remaining) throw InputError("pruning removes every taxon");
  std::vector<std::vector<std::string>> out;
  for (TaxonMask c : pr.common(remaining)) out.push_back(pr.index.labels_of(c));
  return out;
}

TreeSequence min_tree_sequence(const PhyloTree& t1, const PhyloTree& t2) {
  Pruning pr(t1, t2);
  std::set<std::pair<TaxonMask, int>> failed;
  std::vector<TaxonMask> path;
  std::function<bool(TaxonMask, int)> dfs = [&](TaxonMask remaining, int budget) {
    if (pr.same_topology(remaining)) return true;
    if (budget == 0 || failed.count({remaining, budget})) return false;
    for (TaxonMask c : pr.common(remaining)) {
      if (c == remaining) continue;
      path.push_back(c);
      if (dfs(remaining & ~c, budget - 1)) return true;
      path.pop_back();
    }
    failed.insert({remaining, budget});
    return false;
  };
  for (int p = 0;; ++p) {
    path.clear();
    if (dfs(pr.index.all(), p)) {
      TreeSequence seq;
      TaxonMask rest = pr.index.all();
      for (TaxonMask c : path) {
        seq.steps.push_back(pr.index.labels_of(c));
        rest &= ~c;
      }
      seq.remainder = pr.index.labels_of(rest);
      return seq;
    }
  }
}

std::string forest_json(const AgreementForest& forest) {
  nlohmann::json j;
  j["size"] = forest.size();
  j["rooted"] = forest.rooted;
  j["cuts1"] = forest.cuts1;
  j["cuts2"] = forest.cuts2;
  j["components"] = nlohmann::json::array();
  for (const auto& c : forest.components) j["components"].push_back({{"taxa", c.taxa}, {"newick", write_newick(c.tree)}});
  return j.dump();
}

std::string sequence_json(const TreeSequence& seq) {
  nlohmann::json j;
  j["length"] = seq.length();
  j["steps"] = seq.steps;
  j["remainder"] = seq.remainder;
  return j.dump();
}

}  // namespace phylomso
