#include "phylomso/tree.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <functional>
#include <set>

#include "phylomso/detail/mutable_tree.hpp"

namespace phylomso {

// ---------------------------------------------------------------------------
// PhyloTree

PhyloTree PhyloTree::from_edges(TreeKind kind, std::vector<std::string> labels, std::vector<Edge> edges, int root) {
  PhyloTree t;
  t.kind_ = kind;
  t.labels_ = std::move(labels);
  t.edges_ = std::move(edges);
  const int n = static_cast<int>(t.labels_.size());
  if (n == 0) throw InputError("tree has no vertices");
  if (static_cast<int>(t.edges_.size()) != n - 1) throw InputError("tree must have exactly |V|-1 edges");
  t.adjacency_.assign(n, {});
  t.incidence_.assign(n, {});
  t.parent_.assign(n, -1);
  for (int e = 0; e < static_cast<int>(t.edges_.size()); ++e) {
    auto [a, b] = t.edges_[e];
    if (a < 0 || b < 0 || a >= n || b >= n || a == b) throw InputError("edge endpoint out of range");
    t.adjacency_[a].push_back(b);
    t.adjacency_[b].push_back(a);
    t.incidence_[a].push_back(e);
    t.incidence_[b].push_back(e);
    if (kind == TreeKind::rooted) {
      if (t.parent_[b] != -1) throw InputError("vertex with indegree 2");
      t.parent_[b] = a;
    }
  }
  // Connectivity (with |E| = |V|-1 this also rules out cycles).
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 0;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    ++reached;
    for (int w : t.adjacency_[v])
      if (!seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
  }
  if (reached != n) throw InputError("tree is not connected");

  for (int v = 0; v < n; ++v) {
    const auto& lab = t.labels_[v];
    if (!lab.empty() && !t.leaf_by_label_.emplace(lab, v).second) throw InputError("duplicate taxon label '" + lab + "'");
  }
  if (kind == TreeKind::rooted) {
    if (root < 0 || root >= n || t.parent_[root] != -1) throw InputError("rooted tree needs a root with indegree 0");
    t.root_ = root;
    for (int v = 0; v < n; ++v) {
      int out = t.degree(v) - (v == root ? 0 : 1);
      if (v != root && t.parent_[v] == -1) throw InputError("rooted tree has several sources");
      bool leaf = !t.labels_[v].empty();
      if (leaf && out != 0) throw InputError("labelled vertex '" + t.labels_[v] + "' is not a leaf");
      if (!leaf && out != 2) throw InputError(out == 1 ? "internal degree-2 vertex" : "non-binary vertex");
    }
  } else {
    for (int v = 0; v < n; ++v) {
      bool leaf = !t.labels_[v].empty();
      int d = t.degree(v);
      if (leaf && d > 1) throw InputError("labelled vertex '" + t.labels_[v] + "' is not a leaf");
      if (!leaf && d != 3) throw InputError(d == 2 ? "internal degree-2 vertex" : "non-binary vertex");
    }
  }
  return t;
}

int PhyloTree::leaf(std::string_view taxon) const {
  auto it = leaf_by_label_.find(std::string(taxon));
  return it == leaf_by_label_.end() ? -1 : it->second;
}

std::vector<std::string> PhyloTree::taxa() const {
  std::vector<std::string> out;
  out.reserve(leaf_by_label_.size());
  for (const auto& [lab, v] : leaf_by_label_) out.push_back(lab);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> PhyloTree::children(int v) const {
  std::vector<int> out;
  for (int w : adjacency_[v])
    if (parent_[w] == v) out.push_back(w);
  return out;
}

int PhyloTree::edge_between(int u, int v) const {
  for (int e : incidence_[u]) {
    const auto& ed = edges_[e];
    if ((ed.a == u && ed.b == v) || (ed.a == v && ed.b == u)) return e;
  }
  return -1;
}

// ---------------------------------------------------------------------------
// Newick

namespace {

struct NewickNode {
  std::string label;
  std::vector<int> children;
};

class NewickParser {
 public:
  explicit NewickParser(std::string_view text) : s_(text) {}

  PhyloTree parse() {
    skip();
    int top = subtree();
    skip();
    if (pos_ >= s_.size() || s_[pos_] != ';') fail("expected ';'");
    ++pos_;
    skip();
    if (pos_ != s_.size()) fail("trailing characters after ';'");
    return build(top);
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  std::vector<NewickNode> nodes_;

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("newick: " + what + " at offset " + std::to_string(pos_));
  }

  void skip() {
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '[') {
        auto close = s_.find(']', pos_);
        if (close == std::string_view::npos) fail("unterminated comment");
        pos_ = close + 1;
      } else {
        break;
      }
    }
  }

  std::string label() {
    skip();
    std::string out;
    if (pos_ < s_.size() && s_[pos_] == '\'') {
      ++pos_;
      while (true) {
        if (pos_ >= s_.size()) fail("unterminated quoted label");
        if (s_[pos_] == '\'') {
          if (pos_ + 1 < s_.size() && s_[pos_ + 1] == '\'') {
            out += '\'';
            pos_ += 2;
            continue;
          }
          ++pos_;
          break;
        }
        out += s_[pos_++];
      }
      return out;
    }
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (c == '(' || c == ')' || c == ',' || c == ':' || c == ';' || c == '[' ||
          std::isspace(static_cast<unsigned char>(c)))
        break;
      out += c;
      ++pos_;
    }
    return out;
  }

  void branch_length() {
    skip();
    if (pos_ < s_.size() && s_[pos_] == ':') {
      ++pos_;
      skip();
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.' ||
                                  s_[pos_] == '-' || s_[pos_] == '+' || s_[pos_] == 'e' || s_[pos_] == 'E'))
        ++pos_;
      if (start == pos_) fail("missing branch length");
    }
  }

  int subtree() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    if (s_[pos_] == '(') {
      ++pos_;
      std::vector<int> kids;
      while (true) {
        kids.push_back(subtree());
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        if (s_[pos_] == ',') {
          ++pos_;
          continue;
        }
        if (s_[pos_] == ')') {
          ++pos_;
          break;
        }
        fail(std::string("unexpected '") + s_[pos_] + "'");
      }
      nodes_[id].children = std::move(kids);
      label();  // internal labels (support values) are discarded
    } else {
      auto lab = label();
      if (lab.empty()) fail("empty leaf label");
      if (lab == kRho) throw ParseError("newick: label '" + kRho + "' is reserved");
      nodes_[id].label = std::move(lab);
    }
    branch_length();
    return id;
  }

  PhyloTree build(int top) {
    auto arity = nodes_[top].children.size();
    TreeKind kind = arity == 3 ? TreeKind::unrooted : TreeKind::rooted;
    if (arity > 3) throw ParseError("newick: non-binary vertex (top-level arity " + std::to_string(arity) + ")");
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      auto k = nodes_[i].children.size();
      if (static_cast<int>(i) == top) {
        if (k == 1) throw ParseError("newick: internal degree-2 vertex");
        continue;
      }
      if (k == 1) throw ParseError("newick: internal degree-2 vertex");
      if (k > 2) throw ParseError("newick: non-binary vertex");
    }
    std::vector<std::string> labels;
    std::vector<Edge> edges;
    std::set<std::string> seen;
    labels.reserve(nodes_.size());
    for (const auto& n : nodes_) {
      if (!n.label.empty() && !seen.insert(n.label).second) throw ParseError("newick: duplicate label '" + n.label + "'");
      labels.push_back(n.label);
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      for (int c : nodes_[i].children) edges.push_back({static_cast<int>(i), c});
    return PhyloTree::from_edges(kind, std::move(labels), std::move(edges), top);
  }
};

std::pair<std::string, std::string> render(const PhyloTree& t, int v, int from) {
  // returns (min label, newick)
  if (t.is_leaf(v) && (from != -1 || t.degree(v) == 0 || t.rooted())) {
    const auto& lab = t.label(v);
    bool plain = std::none_of(lab.begin(), lab.end(), [](char c) {
      return c == '(' || c == ')' || c == ',' || c == ':' || c == ';' || c == '[' || c == ']' || c == '\'' ||
             std::isspace(static_cast<unsigned char>(c));
    });
    if (plain) return {lab, lab};
    std::string q = "'";
    for (char c : lab) q += (c == '\'') ? std::string("''") : std::string(1, c);
    return {lab, q + "'"};
  }
  std::vector<std::pair<std::string, std::string>> parts;
  for (int w : t.neighbors(v)) {
    if (w == from) continue;
    if (t.rooted() && t.parent(v) == w) continue;
    parts.push_back(render(t, w, v));
  }
  std::sort(parts.begin(), parts.end());
  std::string out = "(";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ',';
    out += parts[i].second;
  }
  out += ')';
  return {parts.front().first, out};
}

}  // namespace

PhyloTree parse_newick(std::string_view text) { return NewickParser(text).parse(); }

std::vector<PhyloTree> parse_newick_lines(std::string_view text) {
  std::vector<PhyloTree> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) out.push_back(parse_newick(line));
    start = end + 1;
  }
  return out;
}

std::string write_newick(const PhyloTree& tree) {
  if (tree.rooted()) return render(tree, tree.root(), -1).second + ";";
  if (tree.vertex_count() == 1) return render(tree, 0, -1).second + ";";
  if (tree.vertex_count() == 2) {
    auto a = render(tree, 0, 1), b = render(tree, 1, 0);
    if (b < a) std::swap(a, b);
    return "(" + a.second + "," + b.second + ");";
  }
  // Hang the tree from the neighbour of the smallest taxon.
  auto taxa = tree.taxa();
  int first = tree.leaf(taxa.front());
  int centre = tree.neighbors(first)[0];
  return render(tree, centre, -1).second + ";";
}

// ---------------------------------------------------------------------------
// Transformations

PhyloTree augment_root(const PhyloTree& tree) {
  if (!tree.rooted()) throw InputError("augment_root needs a rooted tree");
  if (tree.has_taxon(kRho)) throw InputError("tree already carries the root taxon");
  std::vector<std::string> labels;
  for (int v = 0; v < tree.vertex_count(); ++v) labels.push_back(tree.label(v));
  std::vector<Edge> edges = tree.edges();
  labels.push_back(kRho);
  edges.push_back({tree.root(), tree.vertex_count()});
  return PhyloTree::from_edges(TreeKind::unrooted, std::move(labels), std::move(edges));
}

PhyloTree strip_root(const PhyloTree& augmented) {
  if (augmented.rooted()) throw InputError("strip_root needs an unrooted tree");
  int mark = augmented.leaf(kRho);
  if (mark < 0) throw InputError("tree has no root taxon");
  const int n = augmented.vertex_count();
  int top = augmented.neighbors(mark)[0];
  std::vector<int> local(n, -1);
  std::vector<std::string> labels;
  for (int v = 0; v < n; ++v)
    if (v != mark) {
      local[v] = static_cast<int>(labels.size());
      labels.push_back(augmented.label(v));
    }
  std::vector<Edge> edges;
  std::vector<int> stack{top};
  std::vector<char> seen(n, 0);
  seen[top] = seen[mark] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w : augmented.neighbors(v))
      if (!seen[w]) {
        seen[w] = 1;
        edges.push_back({local[v], local[w]});
        stack.push_back(w);
      }
  }
  return PhyloTree::from_edges(TreeKind::rooted, std::move(labels), std::move(edges), local[top]);
}

PhyloTree root_at_edge(const PhyloTree& tree, int edge) {
  if (tree.rooted()) throw InputError("root_at_edge needs an unrooted tree");
  if (edge < 0 || edge >= tree.edge_count()) throw InputError("rooting edge out of range");
  const int n = tree.vertex_count();
  std::vector<std::string> labels;
  for (int v = 0; v < n; ++v) labels.push_back(tree.label(v));
  labels.emplace_back();
  const int top = n;
  auto [a, b] = tree.edge(edge);
  std::vector<Edge> edges{{top, a}, {top, b}};
  std::vector<int> stack{a, b};
  std::vector<char> seen(n, 0);
  seen[a] = seen[b] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w : tree.neighbors(v))
      if (!seen[w]) {
        seen[w] = 1;
        edges.push_back({v, w});
        stack.push_back(w);
      }
  }
  return PhyloTree::from_edges(TreeKind::rooted, std::move(labels), std::move(edges), top);
}

int smallest_taxon_edge(const PhyloTree& tree) {
  return tree.incident_edges(tree.leaf(tree.taxa().front()))[0];
}

PhyloTree restrict_to(const PhyloTree& tree, std::span<const std::string> keep) {
  if (keep.empty()) throw InputError("restriction to an empty taxon set");
  std::set<std::string> wanted(keep.begin(), keep.end());
  for (const auto& x : wanted)
    if (!tree.has_taxon(x)) throw InputError("unknown taxon '" + x + "'");
  detail::MutableTree m(tree);
  for (int v = 0; v < tree.vertex_count(); ++v)
    if (tree.is_leaf(v) && !wanted.count(tree.label(v))) m.labels[v].clear();
  m.clean();
  return m.to_tree();
}

PhyloTree remove_taxa(const PhyloTree& tree, std::span<const std::string> drop) {
  std::set<std::string> gone(drop.begin(), drop.end());
  for (const auto& x : gone)
    if (!tree.has_taxon(x)) throw InputError("unknown taxon '" + x + "'");
  std::vector<std::string> keep;
  for (auto& x : tree.taxa())
    if (!gone.count(x)) keep.push_back(x);
  if (keep.empty()) throw InputError("removal would leave no taxa");
  return restrict_to(tree, keep);
}

// ---------------------------------------------------------------------------
// Quartets, triplets, isomorphism

std::string QuartetTopology::str() const { return left[0] + "," + left[1] + "|" + right[0] + "," + right[1]; }
std::string TripletTopology::str() const { return cherry[0] + "," + cherry[1] + "|" + outgroup; }

QuartetTopology make_quartet(std::string a, std::string b, std::string c, std::string d) {
  std::array<std::string, 2> l{std::move(a), std::move(b)}, r{std::move(c), std::move(d)};
  std::sort(l.begin(), l.end());
  std::sort(r.begin(), r.end());
  if (r[0] < l[0]) std::swap(l, r);
  return {l, r};
}

TripletTopology make_triplet(std::string a, std::string b, std::string c) {
  std::array<std::string, 2> ch{std::move(a), std::move(b)};
  std::sort(ch.begin(), ch.end());
  return {ch, std::move(c)};
}

namespace {
template <std::size_t N>
void check_distinct(const PhyloTree& tree, const std::array<std::string, N>& taxa) {
  for (std::size_t i = 0; i < N; ++i) {
    if (!tree.has_taxon(taxa[i])) throw InputError("unknown taxon '" + taxa[i] + "'");
    for (std::size_t j = 0; j < i; ++j)
      if (taxa[i] == taxa[j]) throw InputError("duplicate taxon '" + taxa[i] + "'");
  }
}
}  // namespace

QuartetTopology quartet_topology(const PhyloTree& tree, const std::array<std::string, 4>& taxa) {
  if (tree.rooted()) throw InputError("quartet_topology needs an unrooted tree");
  check_distinct(tree, taxa);
  auto small = restrict_to(tree, taxa);
  // Two internal vertices joined by the central edge; each carries a cherry.
  std::vector<std::string> side;
  for (int v = 0; v < small.vertex_count(); ++v) {
    if (small.is_leaf(v)) continue;
    for (int w : small.neighbors(v))
      if (small.is_leaf(w)) side.push_back(small.label(w));
    break;
  }
  std::vector<std::string> other;
  for (const auto& x : taxa)
    if (std::find(side.begin(), side.end(), x) == side.end()) other.push_back(x);
  return make_quartet(side[0], side[1], other[0], other[1]);
}

TripletTopology triplet_topology(const PhyloTree& tree, const std::array<std::string, 3>& taxa) {
  if (!tree.rooted()) throw InputError("triplet_topology needs a rooted tree");
  check_distinct(tree, taxa);
  auto small = restrict_to(tree, taxa);
  for (int c : small.children(small.root()))
    if (small.is_leaf(c)) {
      std::vector<std::string> rest;
      for (const auto& x : taxa)
        if (x != small.label(c)) rest.push_back(x);
      return make_triplet(rest[0], rest[1], small.label(c));
    }
  throw InputError("malformed triplet");
}

void require_same_taxa(const PhyloTree& t1, const PhyloTree& t2) {
  if (t1.kind() != t2.kind()) throw InputError("trees differ in kind (rooted vs unrooted)");
  if (t1.taxa() != t2.taxa()) throw InputError("trees have different taxon sets");
}

bool is_isomorphic(const PhyloTree& t1, const PhyloTree& t2) {
  require_same_taxa(t1, t2);
  auto index = TaxonIndex::of(t1);
  if (t1.rooted()) {
    auto a = subtree_masks(t1, index), b = subtree_masks(t2, index);
    return restricted_clusters(a, index.all()) == restricted_clusters(b, index.all());
  }
  auto a = edge_side_masks(t1, index), b = edge_side_masks(t2, index);
  return restricted_splits(a, index.all()) == restricted_splits(b, index.all());
}

// ---------------------------------------------------------------------------
// TaxonIndex and masks

TaxonIndex::TaxonIndex(std::vector<std::string> sorted_labels) : labels_(std::move(sorted_labels)) {
  if (labels_.size() > 64) throw SizeGuardError("at most 64 taxa are supported by the pairwise algorithms");
  for (int i = 0; i < static_cast<int>(labels_.size()); ++i) index_[labels_[i]] = i;
}

TaxonIndex TaxonIndex::of(const PhyloTree& tree) { return TaxonIndex(tree.taxa()); }

int TaxonIndex::index(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) throw InputError("unknown taxon '" + std::string(label) + "'");
  return it->second;
}

TaxonMask TaxonIndex::all() const {
  return labels_.size() == 64 ? ~TaxonMask{0} : ((TaxonMask{1} << labels_.size()) - 1);
}

TaxonMask TaxonIndex::mask_of(std::span<const std::string> labels) const {
  TaxonMask m = 0;
  for (const auto& l : labels) m |= TaxonMask{1} << index(l);
  return m;
}

std::vector<std::string> TaxonIndex::labels_of(TaxonMask mask) const {
  std::vector<std::string> out;
  for (int i = 0; i < size(); ++i)
    if (mask >> i & 1) out.push_back(labels_[i]);
  return out;
}

namespace {
// Masks of the subtree under each vertex when hanging from `top`.
std::vector<TaxonMask> hanging_masks(const PhyloTree& t, const TaxonIndex& index, int top, std::vector<int>& parent) {
  const int n = t.vertex_count();
  std::vector<TaxonMask> mask(n, 0);
  parent.assign(n, -1);
  std::vector<int> order{top};
  std::vector<char> seen(n, 0);
  seen[top] = 1;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (int w : t.neighbors(order[i]))
      if (!seen[w]) {
        seen[w] = 1;
        parent[w] = order[i];
        order.push_back(w);
      }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int v = *it;
    if (t.is_leaf(v)) mask[v] |= TaxonMask{1} << index.index(t.label(v));
    if (parent[v] >= 0) mask[parent[v]] |= mask[v];
  }
  return mask;
}
}  // namespace

std::vector<TaxonMask> subtree_masks(const PhyloTree& tree, const TaxonIndex& index) {
  std::vector<int> parent;
  return hanging_masks(tree, index, tree.rooted() ? tree.root() : 0, parent);
}

std::vector<TaxonMask> edge_side_masks(const PhyloTree& tree, const TaxonIndex& index) {
  std::vector<int> parent;
  int top = tree.rooted() ? tree.root() : 0;
  auto mask = hanging_masks(tree, index, top, parent);
  TaxonMask all = mask[top];
  std::vector<TaxonMask> out;
  out.reserve(tree.edge_count());
  for (const auto& e : tree.edges()) out.push_back(parent[e.b] == e.a ? mask[e.b] : (all & ~mask[e.a]));
  return out;
}

std::vector<TaxonMask> restricted_splits(std::span<const TaxonMask> edge_sides, TaxonMask restrict) {
  std::vector<TaxonMask> out;
  if (restrict == 0) return out;
  TaxonMask low = restrict & (~restrict + 1);
  for (TaxonMask s : edge_sides) {
    TaxonMask in = s & restrict;
    if (in & low) in = restrict & ~in;
    if (std::popcount(in) >= 2 && std::popcount(restrict & ~in) >= 2) out.push_back(in);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<TaxonMask> restricted_clusters(std::span<const TaxonMask> vertex_masks, TaxonMask restrict) {
  std::vector<TaxonMask> out;
  for (TaxonMask c : vertex_masks)
    if (c & restrict) out.push_back(c & restrict);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace phylomso
