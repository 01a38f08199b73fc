#pragma once

#include <string>
#include <vector>

#include "phylomso/tree.hpp"

namespace phylomso::detail {

// Editable undirected copy of a PhyloTree used for cuts, pruning and
// rearrangement moves. Rooted trees keep each vertex's depth so that
// orientation survives edits (children are the deeper neighbours).
class MutableTree {
 public:
  explicit MutableTree(const PhyloTree& tree);
  MutableTree(TreeKind kind, int vertex_count);

  TreeKind kind;
  std::vector<std::vector<int>> adj;
  std::vector<std::string> labels;
  std::vector<char> alive;
  std::vector<int> depth;  // rooted only
  int root = -1;           // rooted only; -1 once the tree has been split

  int add_vertex(const std::string& label = {}, int vertex_depth = 0);
  void add_edge(int u, int v);
  void remove_edge(int u, int v);
  void remove_vertex(int v);
  bool has_edge(int u, int v) const;
  int degree(int v) const { return static_cast<int>(adj[v].size()); }

  // Deletes unlabelled leaves (and unlabelled isolated vertices) until none
  // remain, then suppresses degree-2 vertices. In rooted mode the top vertex
  // of each component keeps outdegree 2: if it has one child it is removed.
  void clean();
  void prune_unlabelled_leaves();
  void suppress_degree_two();

  // Alive vertices grouped by connected component, each sorted ascending;
  // components ordered by their smallest vertex.
  std::vector<std::vector<int>> components() const;
  // Builds a PhyloTree from one component. In rooted mode the component's
  // root is its minimum-depth vertex.
  PhyloTree component_tree(const std::vector<int>& component) const;
  PhyloTree to_tree() const;

 private:
  bool is_top(int v) const;
  int child_count(int v) const;
};

}  // namespace phylomso::detail
