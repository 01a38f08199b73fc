#include "phylomso/detail/mutable_tree.hpp"

#include <algorithm>
#include <queue>

namespace phylomso::detail {

MutableTree::MutableTree(const PhyloTree& tree)
    : kind(tree.kind()),
      adj(tree.vertex_count()),
      labels(tree.vertex_count()),
      alive(tree.vertex_count(), 1),
      depth(tree.vertex_count(), 0),
      root(tree.root()) {
  for (int v = 0; v < tree.vertex_count(); ++v) {
    labels[v] = tree.label(v);
    auto nb = tree.neighbors(v);
    adj[v].assign(nb.begin(), nb.end());
  }
  if (tree.rooted()) {
    std::vector<int> stack{tree.root()};
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int c : tree.children(v)) {
        depth[c] = depth[v] + 1;
        stack.push_back(c);
      }
    }
  }
}

MutableTree::MutableTree(TreeKind k, int vertex_count)
    : kind(k), adj(vertex_count), labels(vertex_count), alive(vertex_count, 1), depth(vertex_count, 0) {}

int MutableTree::add_vertex(const std::string& label, int vertex_depth) {
  adj.emplace_back();
  labels.push_back(label);
  alive.push_back(1);
  depth.push_back(vertex_depth);
  return static_cast<int>(adj.size()) - 1;
}

void MutableTree::add_edge(int u, int v) {
  adj[u].push_back(v);
  adj[v].push_back(u);
}

void MutableTree::remove_edge(int u, int v) {
  std::erase(adj[u], v);
  std::erase(adj[v], u);
}

void MutableTree::remove_vertex(int v) {
  for (int w : adj[v]) std::erase(adj[w], v);
  adj[v].clear();
  alive[v] = 0;
  if (v == root) root = -1;
}

bool MutableTree::has_edge(int u, int v) const {
  return std::find(adj[u].begin(), adj[u].end(), v) != adj[u].end();
}

bool MutableTree::is_top(int v) const {
  return std::none_of(adj[v].begin(), adj[v].end(), [&](int w) { return depth[w] < depth[v]; });
}

int MutableTree::child_count(int v) const {
  return static_cast<int>(std::count_if(adj[v].begin(), adj[v].end(), [&](int w) { return depth[w] > depth[v]; }));
}

void MutableTree::prune_unlabelled_leaves() {
  std::queue<int> work;
  for (int v = 0; v < static_cast<int>(adj.size()); ++v)
    if (alive[v] && labels[v].empty()) work.push(v);
  while (!work.empty()) {
    int v = work.front();
    work.pop();
    if (!alive[v] || !labels[v].empty()) continue;
    bool leafish = kind == TreeKind::rooted ? child_count(v) == 0 : degree(v) <= 1;
    if (!leafish) continue;
    auto nb = adj[v];
    remove_vertex(v);
    for (int w : nb) work.push(w);
  }
}

void MutableTree::suppress_degree_two() {
  bool changed = true;
  while (changed) {
    changed = false;
    for (int v = 0; v < static_cast<int>(adj.size()); ++v) {
      if (!alive[v] || !labels[v].empty()) continue;
      if (kind == TreeKind::rooted) {
        if (is_top(v)) {
          if (child_count(v) == 1) {
            remove_vertex(v);
            changed = true;
          }
          continue;
        }
        if (degree(v) != 2) continue;
      } else if (degree(v) != 2) {
        continue;
      }
      int a = adj[v][0];
      int b = adj[v][1];
      remove_vertex(v);
      add_edge(a, b);
      changed = true;
    }
  }
}

void MutableTree::clean() {
  prune_unlabelled_leaves();
  suppress_degree_two();
}

std::vector<std::vector<int>> MutableTree::components() const {
  std::vector<std::vector<int>> out;
  std::vector<char> seen(adj.size(), 0);
  for (int s = 0; s < static_cast<int>(adj.size()); ++s) {
    if (!alive[s] || seen[s]) continue;
    std::vector<int> comp;
    std::vector<int> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      comp.push_back(v);
      for (int w : adj[v])
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

PhyloTree MutableTree::component_tree(const std::vector<int>& component) const {
  std::vector<int> local(adj.size(), -1);
  std::vector<std::string> out_labels;
  for (int v : component) {
    local[v] = static_cast<int>(out_labels.size());
    out_labels.push_back(labels[v]);
  }
  std::vector<Edge> edges;
  int top = -1;
  if (kind == TreeKind::rooted) {
    top = component.front();
    for (int v : component)
      if (depth[v] < depth[top]) top = v;
    // Preorder from the top so parents precede children.
    std::vector<int> stack{top};
    std::vector<char> seen(adj.size(), 0);
    seen[top] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      std::vector<int> kids;
      for (int w : adj[v])
        if (!seen[w]) kids.push_back(w);
      std::sort(kids.begin(), kids.end());
      for (int w : kids) {
        seen[w] = 1;
        edges.push_back({local[v], local[w]});
      }
      for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
    }
    return PhyloTree::from_edges(TreeKind::rooted, std::move(out_labels), std::move(edges), local[top]);
  }
  for (int v : component)
    for (int w : adj[v])
      if (v < w) edges.push_back({local[v], local[w]});
  return PhyloTree::from_edges(TreeKind::unrooted, std::move(out_labels), std::move(edges));
}

PhyloTree MutableTree::to_tree() const {
  auto comps = components();
  if (comps.size() != 1) throw InputError("tree edit produced " + std::to_string(comps.size()) + " components");
  return component_tree(comps.front());
}

}  // namespace phylomso::detail
