#include "phylomso/display_graph.hpp"

#include <algorithm>
#include <sstream>

namespace phylomso {

std::vector<std::vector<int>> Graph::adjacency() const {
  std::vector<std::vector<int>> adj(n);
  for (auto [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  return adj;
}

Graph parse_gr(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Graph g;
  int m = -1;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == 'c') continue;
    std::istringstream ls(line);
    if (!header) {
      std::string p, tw;
      ls >> p >> tw >> g.n >> m;
      if (!ls || p != "p" || tw != "tw" || g.n < 0 || m < 0) throw ParseError(".gr: bad header '" + line + "'");
      header = true;
      continue;
    }
    int u, v;
    if (!(ls >> u >> v)) throw ParseError(".gr: bad edge line '" + line + "'");
    if (u < 1 || v < 1 || u > g.n || v > g.n) throw ParseError(".gr: vertex out of range in '" + line + "'");
    g.edges.push_back({u - 1, v - 1});
  }
  if (!header) throw ParseError(".gr: missing header");
  if (static_cast<int>(g.edges.size()) != m) throw ParseError(".gr: edge count does not match header");
  return g;
}

std::string write_gr(const Graph& g, const std::vector<std::string>& comments) {
  std::ostringstream out;
  for (const auto& c : comments) out << "c " << c << "\n";
  out << "p tw " << g.n << " " << g.edges.size() << "\n";
  for (auto [u, v] : g.edges) out << u + 1 << " " << v + 1 << "\n";
  return out.str();
}

DisplayGraph DisplayGraph::build(const PhyloTree& a, const PhyloTree& b, RootHandling roots) {
  require_same_taxa(a, b);
  DisplayGraph d;
  d.rooted_inputs_ = a.rooted();
  if (roots == RootHandling::subdivide) {
    if (a.rooted()) throw InputError("subdivided rooting needs unrooted inputs");
    if (a.leaf_count() < 2) throw InputError("subdivided rooting needs at least two taxa");
    d.tree1_ = root_at_edge(a, smallest_taxon_edge(a));
    d.tree2_ = root_at_edge(b, smallest_taxon_edge(b));
  } else if (a.rooted()) {
    d.tree1_ = augment_root(a);
    d.tree2_ = augment_root(b);
  } else {
    d.tree1_ = a;
    d.tree2_ = b;
  }
  const auto taxa = a.taxa();
  d.taxon_count_ = static_cast<int>(taxa.size());
  for (const auto& x : taxa) {
    d.vtag_.push_back(VertexTag::taxon);
    d.labels_.push_back(x);
  }
  bool has_rho = roots == RootHandling::subdivide || a.rooted();
  if (has_rho) {
    d.rho_ = static_cast<int>(d.vtag_.size());
    d.vtag_.push_back(VertexTag::rho);
    d.labels_.push_back(kRho);
  }
  auto place = [&](const PhyloTree& t, std::vector<int>& vmap, VertexTag internal) {
    vmap.assign(t.vertex_count(), -1);
    for (int v = 0; v < t.vertex_count(); ++v) {
      if (t.is_leaf(v)) {
        vmap[v] = t.label(v) == kRho ? d.rho_ : static_cast<int>(std::lower_bound(taxa.begin(), taxa.end(), t.label(v)) - taxa.begin());
      } else if (roots == RootHandling::subdivide && v == t.root()) {
        vmap[v] = d.rho_;
      } else {
        vmap[v] = static_cast<int>(d.vtag_.size());
        d.vtag_.push_back(internal);
        d.labels_.emplace_back();
      }
    }
  };
  place(d.tree1_, d.vmap1_, VertexTag::internal1);
  place(d.tree2_, d.vmap2_, VertexTag::internal2);
  d.adj_.resize(d.vtag_.size());
  d.inc_.resize(d.vtag_.size());
  auto add_edges = [&](const PhyloTree& t, const std::vector<int>& vmap, EdgeTag tag) {
    for (const auto& e : t.edges()) {
      int u = vmap[e.a], v = vmap[e.b];
      int id = static_cast<int>(d.edges_.size());
      d.edges_.push_back({u, v});
      d.etag_.push_back(tag);
      d.adj_[u].push_back(v);
      d.adj_[v].push_back(u);
      d.inc_[u].push_back(id);
      d.inc_[v].push_back(id);
    }
  };
  add_edges(d.tree1_, d.vmap1_, EdgeTag::e1);
  add_edges(d.tree2_, d.vmap2_, EdgeTag::e2);
  return d;
}

bool DisplayGraph::adjacent(int u, int v) const {
  return std::find(adj_[u].begin(), adj_[u].end(), v) != adj_[u].end();
}

int DisplayGraph::taxon_vertex(const std::string& label) const {
  if (label == kRho && rho_ >= 0) return rho_;
  for (int v = 0; v < taxon_count_; ++v)
    if (labels_[v] == label) return v;
  throw InputError("unknown taxon '" + label + "'");
}

Graph DisplayGraph::graph() const {
  Graph g;
  g.n = vertex_count();
  for (const auto& e : edges_) g.edges.push_back({e.a, e.b});
  return g;
}

namespace {

bool search(const DisplayGraph& d, const std::vector<char>& zone, int from, int to, const std::vector<char>* cuts,
            int banned) {
  std::vector<char> seen(d.vertex_count(), 0);
  std::vector<int> stack{from};
  seen[from] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    if (v == to) return true;
    for (int e : d.incident_edges(v)) {
      if (cuts && (*cuts)[e]) continue;
      int w = d.edge(e).a == v ? d.edge(e).b : d.edge(e).a;
      if (seen[w] || !zone[w] || w == banned) continue;
      seen[w] = 1;
      stack.push_back(w);
    }
  }
  return false;
}

void check_endpoints(const std::vector<char>& zone, int x1, int x2) {
  if (x1 < 0 || x2 < 0 || x1 >= static_cast<int>(zone.size()) || x2 >= static_cast<int>(zone.size()) || !zone[x1] ||
      !zone[x2])
    throw InputError("path endpoints must lie in the zone");
}

}  // namespace

bool path_avoiding_cuts(const DisplayGraph& d, const std::vector<char>& zone, int x1, int x2,
                        const std::vector<char>& cuts) {
  check_endpoints(zone, x1, x2);
  return x1 == x2 || search(d, zone, x1, x2, &cuts, -1);
}

bool path_survives_vertex_cut(const DisplayGraph& d, const std::vector<char>& zone, int x1, int x2, int u) {
  check_endpoints(zone, x1, x2);
  if (u == x1 || u == x2) return false;
  return x1 == x2 || search(d, zone, x1, x2, nullptr, u);
}

namespace {
std::string vertex_name(const DisplayGraph& d, int v) {
  switch (d.vertex_tag(v)) {
    case VertexTag::taxon:
    case VertexTag::rho:
      return d.label(v);
    case VertexTag::internal1:
      return "T1." + std::to_string(v);
    case VertexTag::internal2:
      return "T2." + std::to_string(v);
  }
  return {};
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}
}  // namespace

std::string emit_dot(const DisplayGraph& d) {
  std::ostringstream out;
  out << "graph display {\n";
  for (int v = 0; v < d.vertex_count(); ++v) {
    out << "  " << v << " [label=\"" << dot_escape(vertex_name(d, v)) << "\"";
    switch (d.vertex_tag(v)) {
      case VertexTag::taxon: out << ", shape=box"; break;
      case VertexTag::rho: out << ", shape=box, style=bold"; break;
      case VertexTag::internal1: out << ", shape=point, color=red"; break;
      case VertexTag::internal2: out << ", shape=point, color=blue"; break;
    }
    out << "];\n";
  }
  for (int e = 0; e < d.edge_count(); ++e)
    out << "  " << d.edge(e).a << " -- " << d.edge(e).b << " [color=" << (d.edge_tag(e) == EdgeTag::e1 ? "red" : "blue")
        << "];\n";
  out << "}\n";
  return out.str();
}

std::string emit_gr(const DisplayGraph& d) {
  std::vector<std::string> comments;
  comments.push_back("display graph; E1 = edges 1.." + std::to_string(d.tree(1).edge_count()) + ", E2 = the rest");
  for (int v = 0; v < d.vertex_count(); ++v) {
    std::string tag;
    switch (d.vertex_tag(v)) {
      case VertexTag::taxon: tag = "X " + d.label(v); break;
      case VertexTag::rho: tag = "rho"; break;
      case VertexTag::internal1: tag = "V1"; break;
      case VertexTag::internal2: tag = "V2"; break;
    }
    comments.push_back("v " + std::to_string(v + 1) + " " + tag);
  }
  return write_gr(d.graph(), comments);
}

}  // namespace phylomso
