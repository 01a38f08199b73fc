#pragma once

#include <string>
#include <utility>
#include <vector>

namespace phylomso {

// Plain undirected simple graph on vertices 0..n-1.
struct Graph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;

  std::vector<std::vector<int>> adjacency() const;
};

// PACE .gr text: "p tw n m" header then 1-indexed edge lines; 'c' lines are comments.
Graph parse_gr(const std::string& text);
std::string write_gr(const Graph& g, const std::vector<std::string>& comments = {});

}  // namespace phylomso
