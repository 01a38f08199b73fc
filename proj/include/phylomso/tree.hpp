#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace phylomso {

/// Label reserved for the artificial root taxon added by augment_root().
inline const std::string kRho = "\xCF\x81";  // "ρ"

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public InputError {
 public:
  using InputError::InputError;
};

class SizeGuardError : public InputError {
 public:
  using InputError::InputError;
};

enum class TreeKind { rooted, unrooted };

struct Edge {
  int a = -1;  // parent when the tree is rooted
  int b = -1;  // child when the tree is rooted
  friend bool operator==(const Edge&, const Edge&) = default;
};

// Binary leaf-labelled phylogenetic tree. Immutable once built; every
// constructor path goes through the invariant checks in from_edges().
class PhyloTree {
 public:
  PhyloTree() = default;

  // Builds and validates a tree. For rooted trees every edge must be given
  // as (parent, child) and `root` must be set; unrooted trees ignore `root`.
  static PhyloTree from_edges(TreeKind kind, std::vector<std::string> labels,
                              std::vector<Edge> edges, int root = -1);

  TreeKind kind() const { return kind_; }
  bool rooted() const { return kind_ == TreeKind::rooted; }
  int vertex_count() const { return static_cast<int>(labels_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int leaf_count() const { return static_cast<int>(leaf_by_label_.size()); }
  int root() const { return root_; }

  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_.at(e); }
  std::span<const int> neighbors(int v) const { return adjacency_[v]; }
  std::span<const int> incident_edges(int v) const { return incidence_[v]; }
  int degree(int v) const { return static_cast<int>(adjacency_[v].size()); }

  const std::string& label(int v) const { return labels_[v]; }
  bool is_leaf(int v) const { return !labels_[v].empty(); }
  // Vertex carrying `taxon`, or -1.
  int leaf(std::string_view taxon) const;
  bool has_taxon(std::string_view taxon) const { return leaf(taxon) >= 0; }
  // Taxa in lexicographic order.
  std::vector<std::string> taxa() const;

  // Rooted trees only.
  int parent(int v) const { return parent_[v]; }
  std::vector<int> children(int v) const;

  // Index of the edge joining u and v, or -1.
  int edge_between(int u, int v) const;

 private:
  TreeKind kind_ = TreeKind::unrooted;
  int root_ = -1;
  std::vector<std::string> labels_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<std::vector<int>> incidence_;
  std::vector<int> parent_;
  std::unordered_map<std::string, int> leaf_by_label_;
};

PhyloTree parse_newick(std::string_view text);
// Reads one tree per non-empty line.
std::vector<PhyloTree> parse_newick_lines(std::string_view text);
// Canonical Newick: children ordered by their smallest descendant label.
std::string write_newick(const PhyloTree& tree);

PhyloTree augment_root(const PhyloTree& tree);
// Inverse of augment_root: drops the ρ leaf and roots at its neighbour.
PhyloTree strip_root(const PhyloTree& augmented);
// Roots an unrooted tree by subdividing `edge`; the new vertex is the root.
PhyloTree root_at_edge(const PhyloTree& tree, int edge);
// The edge incident to the lexicographically smallest taxon.
int smallest_taxon_edge(const PhyloTree& tree);
PhyloTree restrict_to(const PhyloTree& tree, std::span<const std::string> keep);
PhyloTree remove_taxa(const PhyloTree& tree, std::span<const std::string> drop);

struct QuartetTopology {
  std::array<std::string, 2> left;   // side holding the smallest taxon
  std::array<std::string, 2> right;
  std::string str() const;
  friend bool operator==(const QuartetTopology&, const QuartetTopology&) = default;
};

struct TripletTopology {
  std::array<std::string, 2> cherry;
  std::string outgroup;
  std::string str() const;
  friend bool operator==(const TripletTopology&, const TripletTopology&) = default;
};

QuartetTopology make_quartet(std::string a, std::string b, std::string c, std::string d);
TripletTopology make_triplet(std::string a, std::string b, std::string c);

QuartetTopology quartet_topology(const PhyloTree& tree, const std::array<std::string, 4>& taxa);
TripletTopology triplet_topology(const PhyloTree& tree, const std::array<std::string, 3>& taxa);

// Topological equality on the same taxon set: equal split sets (unrooted) or
// equal cluster sets (rooted), which is the same as equal quartet / triplet sets.
bool is_isomorphic(const PhyloTree& t1, const PhyloTree& t2);

// ---------------------------------------------------------------------------
// Bitmask view of taxa, used by the pairwise algorithms (at most 64 taxa).

using TaxonMask = std::uint64_t;

class TaxonIndex {
 public:
  TaxonIndex() = default;
  explicit TaxonIndex(std::vector<std::string> sorted_labels);
  static TaxonIndex of(const PhyloTree& tree);

  int size() const { return static_cast<int>(labels_.size()); }
  int index(std::string_view label) const;  // throws InputError if unknown
  const std::string& label(int i) const { return labels_[i]; }
  const std::vector<std::string>& labels() const { return labels_; }
  TaxonMask all() const;
  TaxonMask mask_of(std::span<const std::string> labels) const;
  std::vector<std::string> labels_of(TaxonMask mask) const;

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, int> index_;
};

// Taxa below each vertex (rooted), or on the far side of each edge's child
// end (edge.b) for any tree.
std::vector<TaxonMask> subtree_masks(const PhyloTree& tree, const TaxonIndex& index);
std::vector<TaxonMask> edge_side_masks(const PhyloTree& tree, const TaxonIndex& index);

// Nontrivial splits of tree|_restrict, normalised to the side without the
// lowest taxon of `restrict`, sorted and deduplicated.
std::vector<TaxonMask> restricted_splits(std::span<const TaxonMask> edge_sides, TaxonMask restrict);
// Clusters of tree|_restrict (rooted), sorted and deduplicated.
std::vector<TaxonMask> restricted_clusters(std::span<const TaxonMask> vertex_masks, TaxonMask restrict);

void require_same_taxa(const PhyloTree& t1, const PhyloTree& t2);

}  // namespace phylomso
