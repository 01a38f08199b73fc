#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "phylomso/graph.hpp"

namespace phylomso {

class DisplayGraph;
struct AgreementForest;

struct TreeDecomposition {
  std::vector<std::vector<int>> bags;  // each sorted
  std::vector<std::pair<int, int>> tree_edges;

  int width() const;          // max bag size - 1
  int max_bag_size() const;
  int add_bag(std::vector<int> bag);
};

struct Violation {
  enum class Kind { none, bad_vertex, not_a_tree, vertex_uncovered, edge_uncovered, not_connected };
  Kind kind = Kind::none;
  std::string message;
  explicit operator bool() const { return kind != Kind::none; }
};

// Checks the three decomposition conditions (and that the bag graph is a
// tree). Returns the first violation found, with a witness in the message.
Violation validate(const TreeDecomposition& td, const Graph& g);

// Builds a decomposition of the display graph of (t1, t2) from an agreement
// forest and its cut certificate. Width is at most size + 1.
TreeDecomposition decomposition_from_forest(const DisplayGraph& d, const AgreementForest& forest);

struct TreewidthResult {
  int width = 0;
  std::vector<int> order;  // optimal elimination order
  TreeDecomposition decomposition;
};

inline constexpr int kExactTreewidthLimit = 20;

// Exact treewidth by dynamic programming over vertex subsets with an
// upper-bound cutoff. Throws SizeGuardError above `limit` vertices.
TreewidthResult exact_treewidth(const Graph& g, int limit = kExactTreewidthLimit);
// Decomposition induced by an elimination order; its width is the order's width.
TreeDecomposition decomposition_from_order(const Graph& g, const std::vector<int>& order);
int elimination_width(const Graph& g, const std::vector<int>& order);

// PACE .td text. Header "s td <bags> <max bag size> <vertices>".
std::string emit_td(const TreeDecomposition& td, int vertex_count);
TreeDecomposition parse_td(const std::string& text, int* vertex_count = nullptr);

}  // namespace phylomso
