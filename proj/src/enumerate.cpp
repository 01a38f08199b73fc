#include "phylomso/enumerate.hpp"

#include <functional>

namespace phylomso {

namespace {

// Unrooted shape under construction: labels per vertex plus an edge list.
struct Shape {
  std::vector<std::string> labels;
  std::vector<Edge> edges;

  Shape insert(int edge, const std::string& taxon) const {
    Shape s = *this;
    auto [a, b] = s.edges[edge];
    int mid = static_cast<int>(s.labels.size());
    s.labels.emplace_back();
    int leaf = static_cast<int>(s.labels.size());
    s.labels.push_back(taxon);
    s.edges[edge] = {a, mid};
    s.edges.push_back({mid, b});
    s.edges.push_back({mid, leaf});
    return s;
  }
};

Shape seed(const std::vector<std::string>& taxa, std::size_t count) {
  Shape s;
  if (count == 1) {
    s.labels = {taxa[0]};
  } else if (count == 2) {
    s.labels = {taxa[0], taxa[1]};
    s.edges = {{0, 1}};
  } else {
    s.labels = {"", taxa[0], taxa[1], taxa[2]};
    s.edges = {{0, 1}, {0, 2}, {0, 3}};
  }
  return s;
}

PhyloTree normalise(const PhyloTree& t) { return parse_newick(write_newick(t)); }

PhyloTree unrooted_of(const Shape& s) {
  return normalise(PhyloTree::from_edges(TreeKind::unrooted, s.labels, s.edges));
}

// Removes the marker leaf and roots the tree at its neighbour.
PhyloTree rooted_of(const Shape& s, const std::string& marker) {
  const int n = static_cast<int>(s.labels.size());
  std::vector<std::vector<int>> adj(n);
  for (auto [a, b] : s.edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  int mark = -1;
  for (int v = 0; v < n; ++v)
    if (s.labels[v] == marker) mark = v;
  int top = adj[mark][0];
  std::vector<int> local(n, -1);
  std::vector<std::string> labels;
  for (int v = 0; v < n; ++v)
    if (v != mark) {
      local[v] = static_cast<int>(labels.size());
      labels.push_back(s.labels[v]);
    }
  std::vector<Edge> edges;
  std::vector<int> stack{top};
  std::vector<char> seen(n, 0);
  seen[top] = seen[mark] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w : adj[v])
      if (!seen[w]) {
        seen[w] = 1;
        edges.push_back({local[v], local[w]});
        stack.push_back(w);
      }
  }
  return normalise(PhyloTree::from_edges(TreeKind::rooted, labels, edges, local[top]));
}

void grow_all(const std::vector<std::string>& taxa, std::vector<Shape>& out) {
  std::function<void(const Shape&, std::size_t)> rec = [&](const Shape& s, std::size_t next) {
    if (next == taxa.size()) {
      out.push_back(s);
      return;
    }
    for (int e = 0; e < static_cast<int>(s.edges.size()); ++e) rec(s.insert(e, taxa[next]), next + 1);
  };
  std::size_t start = std::min<std::size_t>(3, taxa.size());
  rec(seed(taxa, start), start);
}

Shape grow_random(const std::vector<std::string>& taxa, std::mt19937_64& rng) {
  std::size_t start = std::min<std::size_t>(3, taxa.size());
  Shape s = seed(taxa, start);
  for (std::size_t i = start; i < taxa.size(); ++i) {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(s.edges.size()) - 1);
    s = s.insert(pick(rng), taxa[i]);
  }
  return s;
}

const std::string kMarker = "\x01root";

}  // namespace

std::vector<std::string> letter_taxa(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(i < 26 ? std::string(1, static_cast<char>('a' + i)) : "t" + std::to_string(i));
  return out;
}

std::vector<PhyloTree> all_unrooted_trees(const std::vector<std::string>& taxa) {
  if (taxa.empty()) throw InputError("no taxa");
  std::vector<Shape> shapes;
  grow_all(taxa, shapes);
  std::vector<PhyloTree> out;
  for (const auto& s : shapes) out.push_back(unrooted_of(s));
  return out;
}

std::vector<PhyloTree> all_rooted_trees(const std::vector<std::string>& taxa) {
  if (taxa.empty()) throw InputError("no taxa");
  auto with = taxa;
  with.insert(with.begin(), kMarker);
  std::vector<Shape> shapes;
  grow_all(with, shapes);
  std::vector<PhyloTree> out;
  for (const auto& s : shapes) out.push_back(rooted_of(s, kMarker));
  return out;
}

PhyloTree random_unrooted_tree(const std::vector<std::string>& taxa, std::mt19937_64& rng) {
  return unrooted_of(grow_random(taxa, rng));
}

PhyloTree random_rooted_tree(const std::vector<std::string>& taxa, std::mt19937_64& rng) {
  auto with = taxa;
  with.insert(with.begin(), kMarker);
  return rooted_of(grow_random(with, rng), kMarker);
}

PhyloTree caterpillar(const std::vector<std::string>& taxa, TreeKind kind) {
  if (taxa.empty()) throw InputError("no taxa");
  std::string nw = taxa[0];
  for (std::size_t i = 1; i < taxa.size(); ++i) {
    bool last = i + 1 == taxa.size();
    if (kind == TreeKind::unrooted && last && taxa.size() >= 3) {
      // Open the outermost pair into a trifurcation.
      nw = nw.substr(1, nw.size() - 2);
      nw = "(" + nw + "," + taxa[i] + ")";
    } else {
      nw = "(" + nw + "," + taxa[i] + ")";
    }
  }
  return parse_newick(nw + ";");
}

}  // namespace phylomso
