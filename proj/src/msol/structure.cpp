#include "phylomso/msol/structure.hpp"

#include "json.hpp"

#include "phylomso/display_graph.hpp"
#include "phylomso/tree.hpp"

namespace phylomso::msol {

std::string set_name(NamedSet s) {
  switch (s) {
    case NamedSet::universe: return "U";
    case NamedSet::V: return "V";
    case NamedSet::E: return "E";
    case NamedSet::V1: return "V1";
    case NamedSet::V2: return "V2";
    case NamedSet::E1: return "E1";
    case NamedSet::E2: return "E2";
    case NamedSet::X: return "X";
    case NamedSet::taxa_rho: return "X+rho";
    case NamedSet::empty: return "{}";
  }
  return "?";
}

namespace {

void check_size(int n) {
  if (n > kMaxUniverse)
    throw SizeGuardError("structure has " + std::to_string(n) + " elements; the evaluator handles at most " +
                         std::to_string(kMaxUniverse));
}

}  // namespace

Structure Structure::from_graph(const Graph& g) {
  Structure s;
  s.nv_ = g.n;
  s.ne_ = static_cast<int>(g.edges.size());
  check_size(s.size());
  s.adj_.assign(s.nv_, 0);
  s.inc_.assign(s.nv_, 0);
  for (int v = 0; v < s.nv_; ++v) s.names_.push_back("v" + std::to_string(v));
  for (int e = 0; e < s.ne_; ++e) {
    auto [a, b] = g.edges[e];
    if (a < 0 || b < 0 || a >= s.nv_ || b >= s.nv_) throw InputError("edge endpoint out of range");
    s.ends_.push_back({a, b});
    s.adj_[a] |= bit(b);
    s.adj_[b] |= bit(a);
    s.inc_[a] |= bit(s.nv_ + e);
    s.inc_[b] |= bit(s.nv_ + e);
    s.names_.push_back("e" + std::to_string(e));
  }
  Mask v = s.nv_ == 64 ? ~Mask{0} : bit(s.nv_) - 1;
  s.v1_ = s.v2_ = v;
  s.e1_ = s.e2_ = s.set(NamedSet::universe) & ~v;
  return s;
}

Structure Structure::from_display(const DisplayGraph& d) {
  Structure s = from_graph(d.graph());
  s.v1_ = s.v2_ = s.e1_ = s.e2_ = 0;
  for (int v = 0; v < s.nv_; ++v) {
    if (d.in_v1(v)) s.v1_ |= bit(v);
    if (d.in_v2(v)) s.v2_ |= bit(v);
    if (d.in_x(v)) s.x_ |= bit(v);
    if (d.vertex_tag(v) == VertexTag::taxon || d.vertex_tag(v) == VertexTag::rho) s.names_[v] = d.label(v);
  }
  for (int e = 0; e < s.ne_; ++e) (d.edge_in_tree(1, e) ? s.e1_ : s.e2_) |= bit(s.nv_ + e);
  s.rho_ = d.rho();
  return s;
}

Mask Structure::set(NamedSet which) const {
  Mask all = size() == 64 ? ~Mask{0} : bit(size()) - 1;
  Mask v = nv_ == 64 ? ~Mask{0} : bit(nv_) - 1;
  switch (which) {
    case NamedSet::universe: return all;
    case NamedSet::V: return v;
    case NamedSet::E: return all & ~v;
    case NamedSet::V1: return v1_;
    case NamedSet::V2: return v2_;
    case NamedSet::E1: return e1_;
    case NamedSet::E2: return e2_;
    case NamedSet::X: return x_;
    case NamedSet::taxa_rho: return x_ | (rho_ >= 0 ? bit(rho_) : 0);
    case NamedSet::empty: return 0;
  }
  return 0;
}

int Structure::rho() const {
  if (rho_ < 0) throw InputError("formula mentions rho but the structure has none");
  return rho_;
}

bool Structure::incident(int e, int v) const {
  if (e < nv_ || e >= size() || v >= nv_) return false;
  auto [a, b] = ends(e);
  return a == v || b == v;
}

int Structure::element(const std::string& n) const {
  for (int x = 0; x < size(); ++x)
    if (names_[x] == n) return x;
  return -1;
}

std::string Structure::json() const {
  nlohmann::json j;
  j["vertices"] = nv_;
  j["edges"] = ne_;
  j["universe"] = size();
  j["names"] = names_;
  nlohmann::json ends = nlohmann::json::array();
  for (auto [a, b] : ends_) ends.push_back({a, b});
  j["ends"] = ends;
  auto members = [&](Mask m) {
    std::vector<int> out;
    for (int x = 0; x < size(); ++x)
      if (m >> x & 1) out.push_back(x);
    return out;
  };
  j["V1"] = members(v1_);
  j["V2"] = members(v2_);
  j["E1"] = members(e1_);
  j["E2"] = members(e2_);
  j["X"] = members(x_);
  if (rho_ >= 0) j["rho"] = rho_;
  return j.dump();
}

}  // namespace phylomso::msol
