#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "phylomso/graph.hpp"

namespace phylomso {
class DisplayGraph;
}

namespace phylomso::msol {

using Mask = std::uint64_t;
inline constexpr int kMaxUniverse = 64;

inline Mask bit(int x) { return Mask{1} << x; }

// Unary predicates of the structure. taxa_rho is X ∪ {ρ}.
enum class NamedSet { universe, V, E, V1, V2, E1, E2, X, taxa_rho, empty };

std::string set_name(NamedSet s);

// Relational structure over the elements of a graph: vertices get ids
// 0..n-1 and edges n..n+m-1. R^D(e, v) holds when v is an end of e.
class Structure {
 public:
  static Structure from_display(const DisplayGraph& d);
  // Plain graph: V1 = V2 = V, E1 = E2 = E, X empty, no ρ.
  static Structure from_graph(const Graph& g);

  int size() const { return nv_ + ne_; }
  int vertex_count() const { return nv_; }
  int edge_count() const { return ne_; }
  bool is_vertex(int x) const { return x < nv_; }
  int edge_element(int e) const { return nv_ + e; }
  const std::pair<int, int>& ends(int x) const { return ends_[x - nv_]; }

  Mask set(NamedSet s) const;
  Mask tree_vertices(int i) const { return i == 1 ? v1_ : v2_; }
  Mask tree_edges(int i) const { return i == 1 ? e1_ : e2_; }
  bool has_rho() const { return rho_ >= 0; }
  int rho() const;

  bool incident(int e, int v) const;
  // adj(p, q) := ∃e R(e, p) ∧ R(e, q), so a vertex with an edge is adjacent to itself.
  bool adjacent(int p, int q) const {
    return p < nv_ && q < nv_ && (p == q ? inc_[p] != 0 : (adj_[p] >> q & 1) != 0);
  }
  Mask neighbours(int v) const { return adj_[v]; }
  // Edge elements incident to vertex v.
  Mask incident_edges(int v) const { return inc_[v]; }

  const std::string& name(int x) const { return names_[x]; }
  int element(const std::string& name) const;  // -1 if unknown
  std::string json() const;

 private:
  int nv_ = 0, ne_ = 0;
  std::vector<std::pair<int, int>> ends_;
  std::vector<Mask> adj_, inc_;
  std::vector<std::string> names_;
  Mask v1_ = 0, v2_ = 0, e1_ = 0, e2_ = 0, x_ = 0;
  int rho_ = -1;
};

}  // namespace phylomso::msol
