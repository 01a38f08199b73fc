#pragma once

#include <span>
#include <string>
#include <vector>

#include "phylomso/graph.hpp"
#include "phylomso/tree.hpp"

namespace phylomso {

enum class VertexTag { taxon, rho, internal1, internal2 };
enum class EdgeTag { e1, e2 };

enum class RootHandling {
  // Rooted inputs get a pendant ρ leaf above their root (the usual augmentation).
  pendant,
  // Unrooted inputs are rooted by subdividing the edge incident to the smallest
  // taxon; the subdividing vertex of both trees is the shared vertex ρ. Used by
  // the parsimony formulation, where ρ has to carry a Fitch state.
  subdivide,
};

// Union of two trees with equally labelled leaves identified. Vertex ids:
// taxa in lexicographic order (ρ last when present), then the internal
// vertices of T1, then those of T2. Edge ids: E1 in T1's edge order, then E2.
class DisplayGraph {
 public:
  static DisplayGraph build(const PhyloTree& t1, const PhyloTree& t2, RootHandling roots = RootHandling::pendant);

  int vertex_count() const { return static_cast<int>(vtag_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  VertexTag vertex_tag(int v) const { return vtag_[v]; }
  EdgeTag edge_tag(int e) const { return etag_[e]; }
  const std::string& label(int v) const { return labels_[v]; }
  const Edge& edge(int e) const { return edges_[e]; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::span<const int> neighbors(int v) const { return adj_[v]; }
  std::span<const int> incident_edges(int v) const { return inc_[v]; }
  bool adjacent(int u, int v) const;

  bool in_v1(int v) const { return vtag_[v] != VertexTag::internal2; }
  bool in_v2(int v) const { return vtag_[v] != VertexTag::internal1; }
  bool in_x(int v) const { return vtag_[v] == VertexTag::taxon; }
  bool in_tree(int i, int v) const { return i == 1 ? in_v1(v) : in_v2(v); }
  bool edge_in_tree(int i, int e) const { return etag_[e] == (i == 1 ? EdgeTag::e1 : EdgeTag::e2); }

  int taxon_count() const { return taxon_count_; }  // |X|, ρ excluded
  int rho() const { return rho_; }                  // -1 when absent
  int taxon_vertex(const std::string& label) const;

  // The (possibly augmented) trees the graph was built from, and the maps
  // between their vertices / edges and the graph's.
  const PhyloTree& tree(int i) const { return i == 1 ? tree1_ : tree2_; }
  int vertex_of(int i, int tree_vertex) const { return (i == 1 ? vmap1_ : vmap2_)[tree_vertex]; }
  int edge_of(int i, int tree_edge) const { return i == 1 ? tree_edge : tree1_.edge_count() + tree_edge; }
  bool rooted_inputs() const { return rooted_inputs_; }

  Graph graph() const;

 private:
  std::vector<VertexTag> vtag_;
  std::vector<std::string> labels_;
  std::vector<Edge> edges_;
  std::vector<EdgeTag> etag_;
  std::vector<std::vector<int>> adj_, inc_;
  std::vector<int> vmap1_, vmap2_;
  PhyloTree tree1_, tree2_;
  int taxon_count_ = 0;
  int rho_ = -1;
  bool rooted_inputs_ = false;
};

// Is there an x1-x2 path using only vertices in `zone` and no edge in `cuts`?
// Both masks are indexed by vertex / edge id. Endpoints must lie in the zone.
bool path_avoiding_cuts(const DisplayGraph& d, const std::vector<char>& zone, int x1, int x2,
                        const std::vector<char>& cuts);
// Is there an x1-x2 path inside `zone` that avoids vertex u (with u not an endpoint)?
bool path_survives_vertex_cut(const DisplayGraph& d, const std::vector<char>& zone, int x1, int x2, int u);

std::string emit_dot(const DisplayGraph& d);
std::string emit_gr(const DisplayGraph& d);

}  // namespace phylomso
