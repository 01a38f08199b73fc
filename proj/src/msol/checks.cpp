#include "phylomso/msol/checks.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <set>

#include "json.hpp"
#include "phylomso/distances.hpp"
#include "phylomso/enumerate.hpp"
#include "phylomso/msol/library.hpp"

namespace phylomso::msol {

namespace {

void guard_taxa(const PhyloTree& t, int max_taxa, const char* what) {
  if (t.leaf_count() > max_taxa)
    throw SizeGuardError(std::string(what) + ": " + std::to_string(t.leaf_count()) + " taxa exceed the limit of " +
                         std::to_string(max_taxa));
}

// Submasks of `m` with exactly c bits.
std::vector<Mask> subsets_of_size(Mask m, int c) {
  std::vector<Mask> out;
  if (c < 0) return out;
  for (Mask s = 0;; s = (s - m) & m) {
    if (std::popcount(s) == c) out.push_back(s);
    if (s == m) break;
  }
  return out;
}

struct PhiCache {
  std::mutex mu;
  std::map<std::pair<bool, int>, std::tuple<Var, Var, Formula>> phis;
  std::map<int, Formula> hyb;
};
PhiCache& cache() {
  static PhiCache* c = new PhiCache();
  return *c;
}

std::tuple<Var, Var, Formula> phi(bool rooted, int k) {
  auto& c = cache();
  std::lock_guard<std::mutex> lock(c.mu);
  auto it = c.phis.find({rooted, k});
  if (it != c.phis.end()) return it->second;
  auto k1 = set_var("K1"), k2 = set_var("K2");
  Formula f = rooted ? rspr_phi(k1, k2, k) : umaf_phi(k1, k2, k);
  return c.phis[{rooted, k}] = {k1, k2, f};
}

bool check_cut_formula(const PhyloTree& t1, const PhyloTree& t2, int k, const EvalOptions& opt, bool rooted) {
  if (k < 1) return false;
  auto d = DisplayGraph::build(t1, t2);
  Structure s = Structure::from_display(d);
  auto [k1, k2, f] = phi(rooted, k);
  Evaluator ev(s, opt);
  auto c1 = subsets_of_size(s.tree_edges(1), k - 1), c2 = subsets_of_size(s.tree_edges(2), k - 1);
  for (Mask a : c1)
    for (Mask b : c2) {
      ev.bind(k1, a);
      ev.bind(k2, b);
      if (ev.holds(f)) return true;
    }
  return false;
}

}  // namespace

bool check_umaf_formula(const PhyloTree& t1, const PhyloTree& t2, int k, const EvalOptions& opt, int max_taxa) {
  require_same_taxa(t1, t2);
  if (t1.rooted()) throw InputError("check_umaf_formula needs unrooted trees");
  guard_taxa(t1, max_taxa, "check_umaf_formula");
  return check_cut_formula(t1, t2, k, opt, false);
}

bool check_rspr_formula(const PhyloTree& t1, const PhyloTree& t2, int k, const EvalOptions& opt, int max_taxa) {
  require_same_taxa(t1, t2);
  if (!t1.rooted()) throw InputError("check_rspr_formula needs rooted trees");
  guard_taxa(t1, max_taxa, "check_rspr_formula");
  return check_cut_formula(t1, t2, k, opt, true);
}

namespace {

Formula hybnum_cached(int k) {
  auto& c = cache();
  {
    std::lock_guard<std::mutex> lock(c.mu);
    auto it = c.hyb.find(k);
    if (it != c.hyb.end()) return it->second;
  }
  Formula f = hybnum(k);  // takes the library lock, so build outside ours
  std::lock_guard<std::mutex> lock(c.mu);
  return c.hyb.emplace(k, f).first->second;
}

int expanded(const Node& n, std::map<int, int>& defs) {
  int size = 1;
  if (n.op == Op::call) {
    auto it = defs.find(n.def->id);
    if (it == defs.end()) it = defs.emplace(n.def->id, expanded(*n.def->body, defs)).first;
    return size + it->second;
  }
  for (auto& k : n.kids) size += expanded(*k, defs);
  return size;
}

}  // namespace

bool check_hybnum_formula(const PhyloTree& t1, const PhyloTree& t2, int k, const EvalOptions& opt, int max_taxa) {
  require_same_taxa(t1, t2);
  if (!t1.rooted()) throw InputError("check_hybnum_formula needs rooted trees");
  guard_taxa(t1, max_taxa, "check_hybnum_formula");
  if (k < 0) return false;
  if (k == 0) return is_isomorphic(t1, t2);
  auto d = DisplayGraph::build(t1, t2);
  Structure s = Structure::from_display(d);
  Evaluator ev(s, opt);
  return ev.holds(hybnum_cached(k));
}

int hybnum_expanded_size(int k) {
  std::map<int, int> defs;
  return expanded(*hybnum_cached(k), defs);
}

// ---------------------------------------------------------------------------
// Parsimony

namespace {

struct FitchVars {
  Var r[3], b[3], rbi[3], rbu[3];
  Formula both;       // blocks of both trees and the shared character
  Formula single[3];  // block of one tree
};

const FitchVars& fitch_vars() {
  static const FitchVars* v = [] {
    auto* out = new FitchVars();
    for (int i = 1; i <= 2; ++i) {
      std::string n = std::to_string(i);
      out->r[i] = set_var("R" + n);
      out->b[i] = set_var("B" + n);
      out->rbi[i] = set_var("RBI" + n);
      out->rbu[i] = set_var("RBU" + n);
      out->single[i] = fitch_block(i, out->r[i], out->b[i], out->rbi[i], out->rbu[i]);
    }
    out->both = land({out->single[1], out->single[2], same_character(out->r[1], out->b[1], out->r[2], out->b[2])});
    return out;
  }();
  return *v;
}

// Fitch's partition of tree i's vertices, as masks R, B, RB_I, RB_U.
std::array<Mask, 4> fitch_masks(const DisplayGraph& d, int i, const Character& f) {
  auto lab = fitch_score(d.tree(i), f);
  std::array<Mask, 4> m{};
  for (int v = 0; v < lab.rooted.vertex_count(); ++v)
    m[static_cast<int>(lab.states[v])] |= bit(d.vertex_of(i, v));
  return m;
}

Character character_of(const std::vector<std::string>& taxa, std::uint32_t red) {
  Character f;
  for (std::size_t j = 0; j < taxa.size(); ++j) f[taxa[j]] = red >> j & 1 ? Colour::red : Colour::blue;
  return f;
}

void bind_masks(Evaluator& ev, const FitchVars& fv, int i, const std::array<Mask, 4>& m) {
  ev.bind(fv.r[i], m[0]);
  ev.bind(fv.b[i], m[1]);
  ev.bind(fv.rbi[i], m[2]);
  ev.bind(fv.rbu[i], m[3]);
}

}  // namespace

FitchMsoResult fitch_mso_optimum(const PhyloTree& t1, const PhyloTree& t2, const EvalOptions& opt, int max_taxa) {
  require_same_taxa(t1, t2);
  if (t1.rooted()) throw InputError("fitch_mso_optimum needs unrooted trees");
  guard_taxa(t1, max_taxa, "fitch_mso_optimum");
  if (t1.leaf_count() < 3) return {};
  auto d = DisplayGraph::build(t1, t2, RootHandling::subdivide);
  Structure s = Structure::from_display(d);
  const auto& fv = fitch_vars();
  Evaluator ev(s, opt);
  auto taxa = t1.taxa();
  FitchMsoResult out;
  bool first = true;
  const std::size_t n = taxa.size();
  // Lexicographic order of colour strings, red before blue.
  for (std::uint32_t idx = 0; idx < (1u << n); ++idx) {
    std::uint32_t red = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (!(idx >> (n - 1 - j) & 1)) red |= 1u << j;
    Character f = character_of(taxa, red);
    auto m1 = fitch_masks(d, 1, f), m2 = fitch_masks(d, 2, f);
    bind_masks(ev, fv, 1, m1);
    bind_masks(ev, fv, 2, m2);
    if (!ev.holds(fv.both)) throw std::logic_error("Fitch partition violates the constraint blocks");
    ++out.characters;
    int value = std::popcount(m1[3]) - std::popcount(m2[3]);
    if (first || value > out.value) {
      out.value = value;
      out.witness.clear();
      for (std::size_t j = 0; j < taxa.size(); ++j) out.witness += red >> j & 1 ? 'r' : 'b';
      first = false;
    }
  }
  return out;
}

FitchUniqueness fitch_assignment_count(const PhyloTree& t1, const PhyloTree& t2, int i, std::uint32_t red,
                                       const EvalOptions& opt) {
  require_same_taxa(t1, t2);
  guard_taxa(t1, kGenericMaxTaxa, "fitch_assignment_count");
  auto d = DisplayGraph::build(t1, t2, RootHandling::subdivide);
  Structure s = Structure::from_display(d);
  const auto& fv = fitch_vars();
  auto taxa = t1.taxa();
  Character f = character_of(taxa, red);
  auto want = fitch_masks(d, i, f);
  Mask x = s.set(NamedSet::X);
  std::vector<int> inner;
  for (Mask m = s.tree_vertices(i) & ~x; m; m &= m - 1) inner.push_back(std::countr_zero(m));
  Mask taxa_red = 0, taxa_blue = 0;
  for (std::size_t j = 0; j < taxa.size(); ++j) (red >> j & 1 ? taxa_red : taxa_blue) |= bit(d.taxon_vertex(taxa[j]));

  Evaluator ev(s, opt);
  FitchUniqueness out;
  std::vector<int> state(inner.size(), 0);
  for (;;) {
    std::array<Mask, 4> m{taxa_red, taxa_blue, 0, 0};
    for (std::size_t j = 0; j < inner.size(); ++j) m[state[j]] |= bit(inner[j]);
    bind_masks(ev, fv, i, m);
    if (ev.holds(fv.single[i])) {
      ++out.satisfying;
      out.matches_fitch = m == want;
    }
    std::size_t j = 0;
    while (j < state.size() && state[j] == 3) state[j++] = 0;
    if (j == state.size()) break;
    ++state[j];
  }
  if (out.satisfying != 1) out.matches_fitch = false;
  return out;
}

// ---------------------------------------------------------------------------
// Structure families

namespace {

PhyloTree relabel(const PhyloTree& t, const std::map<std::string, std::string>& to) {
  std::vector<std::string> labels;
  for (int v = 0; v < t.vertex_count(); ++v) {
    auto it = to.find(t.label(v));
    labels.push_back(it == to.end() ? t.label(v) : it->second);
  }
  return PhyloTree::from_edges(t.kind(), std::move(labels), t.edges(), t.root());
}

}  // namespace

std::vector<DisplayGraph> display_family(Family f, int n) {
  auto taxa = letter_taxa(n);
  auto trees = f == Family::rooted ? all_rooted_trees(taxa) : all_unrooted_trees(taxa);
  std::vector<std::map<std::string, std::string>> perms;
  auto p = taxa;
  do {
    std::map<std::string, std::string> m;
    for (int j = 0; j < n; ++j) m[taxa[j]] = p[j];
    perms.push_back(std::move(m));
  } while (std::next_permutation(p.begin(), p.end()));

  std::set<std::pair<std::string, std::string>> seen;
  std::vector<DisplayGraph> out;
  for (const auto& a : trees)
    for (const auto& b : trees) {
      std::pair<std::string, std::string> key;
      bool first = true;
      for (const auto& m : perms) {
        std::pair<std::string, std::string> k{write_newick(relabel(a, m)), write_newick(relabel(b, m))};
        if (first || k < key) key = k, first = false;
      }
      if (!seen.insert(key).second) continue;
      out.push_back(DisplayGraph::build(a, b, f == Family::subdivide ? RootHandling::subdivide : RootHandling::pendant));
    }
  return out;
}

std::vector<Graph> connected_graphs(int n) {
  std::vector<Graph> out;
  for (int k = 1; k <= n; ++k) {
    std::vector<std::pair<int, int>> slots;
    for (int a = 0; a < k; ++a)
      for (int b = a + 1; b < k; ++b) slots.emplace_back(a, b);
    std::vector<std::vector<int>> perms;
    std::vector<int> p(k);
    std::iota(p.begin(), p.end(), 0);
    do perms.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    auto slot_of = [&](int a, int b) {
      if (a > b) std::swap(a, b);
      return static_cast<int>(std::find(slots.begin(), slots.end(), std::make_pair(a, b)) - slots.begin());
    };
    std::vector<std::vector<int>> remap(perms.size(), std::vector<int>(slots.size()));
    for (std::size_t q = 0; q < perms.size(); ++q)
      for (std::size_t e = 0; e < slots.size(); ++e)
        remap[q][e] = slot_of(perms[q][slots[e].first], perms[q][slots[e].second]);
    std::set<std::uint32_t> seen;
    for (std::uint32_t m = 0; m < (1u << slots.size()); ++m) {
      // connected?
      std::uint32_t reached = 1, grow = 1;
      while (grow) {
        grow = 0;
        for (std::size_t e = 0; e < slots.size(); ++e)
          if (m >> e & 1) {
            auto [a, b] = slots[e];
            if ((reached >> a & 1) != (reached >> b & 1)) reached |= 1u << a | 1u << b, grow = 1;
          }
      }
      if (reached != (1u << k) - 1) continue;
      std::uint32_t canon = m;
      for (auto& r : remap) {
        std::uint32_t c = 0;
        for (std::size_t e = 0; e < slots.size(); ++e)
          if (m >> e & 1) c |= 1u << r[e];
        canon = std::min(canon, c);
      }
      if (!seen.insert(canon).second) continue;
      Graph g;
      g.n = k;
      for (std::size_t e = 0; e < slots.size(); ++e)
        if (canon >> e & 1) g.edges.push_back(slots[e]);
      out.push_back(std::move(g));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

std::vector<int> elements(Mask m) {
  std::vector<int> out;
  for (; m; m &= m - 1) out.push_back(std::countr_zero(m));
  return out;
}

// Submasks of m with at most c bits (all of them when c < 0).
std::vector<Mask> small_subsets(Mask m, int c) {
  std::vector<Mask> out;
  for (Mask s = 0;; s = (s - m) & m) {
    if (c < 0 || std::popcount(s) <= c) out.push_back(s);
    if (s == m) break;
  }
  return out;
}

// Parent of each vertex of tree i when hung from ρ; -1 at ρ, -2 outside V_i.
std::vector<int> parents_from_rho(const Structure& s, int i) {
  std::vector<int> par(s.vertex_count(), -2);
  std::vector<int> queue{s.rho()};
  par[s.rho()] = -1;
  for (std::size_t h = 0; h < queue.size(); ++h) {
    int v = queue[h];
    for (int e : elements(s.incident_edges(v) & s.tree_edges(i))) {
      auto [a, b] = s.ends(e);
      int w = a == v ? b : a;
      if (par[w] == -2) par[w] = v, queue.push_back(w);
    }
  }
  return par;
}

bool at_or_below(const std::vector<int>& par, int u, int x) {
  for (int v = x; v >= 0; v = par[v])
    if (v == u) return true;
  return false;
}

std::string describe_call(const Structure& s, const Definition& d, const std::vector<Mask>& a) {
  std::string out = d.name + "(";
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (j) out += ", ";
    if (d.params[j].sort == Sort::element) {
      out += s.name(static_cast<int>(a[j]));
    } else {
      out += "{";
      bool first = true;
      for (int x : elements(a[j])) out += (first ? "" : ",") + s.name(x), first = false;
      out += "}";
    }
  }
  return out + ")";
}

std::string describe_structure(const DisplayGraph& d) {
  std::string mode = d.rho() < 0 ? "unrooted" : d.rooted_inputs() ? "rooted" : "subdivided";
  auto t1 = d.rooted_inputs() ? strip_root(d.tree(1)) : d.tree(1);
  auto t2 = d.rooted_inputs() ? strip_root(d.tree(2)) : d.tree(2);
  if (mode == "subdivided") t1 = d.tree(1), t2 = d.tree(2);
  return write_newick(t1) + " " + write_newick(t2) + " [" + mode + "]";
}

std::string describe_graph(const Graph& g) {
  std::string out = "graph n=" + std::to_string(g.n);
  for (auto [a, b] : g.edges) out += " " + std::to_string(a) + "-" + std::to_string(b);
  return out;
}

class Harness {
 public:
  explicit Harness(ValidationReport& rep) : rep_(rep) {}

  void start(const Structure& s, std::string name) {
    s_ = &s;
    name_ = std::move(name);
    ev_.emplace(s);
    ++rep_.structures;
  }

  void check(const DefPtr& def, std::vector<Mask> args, std::optional<bool> oracle = {},
             const char* oracle_name = "oracle") {
    bool g = ev_->call(def, args);
    bool c = def->compiled(*s_, args);
    ++rep_.tuples;
    if (g != c) record(*def, args, g, c, "compiled");
    if (oracle) {
      ++rep_.oracle_checks;
      if (g != *oracle) record(*def, args, g, *oracle, oracle_name);
    }
  }

 private:
  void record(const Definition& def, const std::vector<Mask>& args, bool g, bool want, const char* against) {
    ++rep_.mismatches;
    if (rep_.examples.size() < 8) rep_.examples.push_back({name_, describe_call(*s_, def, args), g, want, against});
  }

  ValidationReport& rep_;
  const Structure* s_ = nullptr;
  std::string name_;
  std::optional<Evaluator> ev_;
};

std::vector<char> zone_vector(const Structure& s, Mask z) {
  std::vector<char> out(s.vertex_count(), 0);
  for (int v : elements(z)) if (v < s.vertex_count()) out[v] = 1;
  return out;
}

std::vector<char> cut_vector(const Structure& s, Mask k) {
  std::vector<char> out(s.edge_count(), 0);
  for (int e : elements(k)) out[e - s.vertex_count()] = 1;
  return out;
}

// Vertices plus one edge element, so that element arguments outside V are seen.
std::vector<int> vertex_args(const Structure& s) {
  auto out = elements(s.set(NamedSet::V));
  if (s.edge_count()) out.push_back(s.vertex_count());
  return out;
}

void run_pac(Harness& h, const Structure& s, const DisplayGraph* d, bool path_only, const Library& lib) {
  auto xs = vertex_args(s);
  std::vector<std::pair<Mask, std::vector<Mask>>> zones;
  if (d) {
    for (int i = 1; i <= 2; ++i) zones.push_back({s.tree_vertices(i), small_subsets(s.tree_edges(i), 2)});
    std::vector<Mask> ks{0};
    for (int e : elements(s.set(NamedSet::E))) ks.push_back(bit(e));
    zones.push_back({s.set(NamedSet::V), ks});
  } else {
    // Small graphs: every zone, with cut sets of up to two edges inside it.
    for (Mask z : small_subsets(s.set(NamedSet::V), -1)) {
      Mask inside = 0;
      for (int e : elements(s.set(NamedSet::E)))
        if (z >> s.ends(e).first & 1 && z >> s.ends(e).second & 1) inside |= bit(e);
      zones.push_back({z, small_subsets(inside, 2)});
    }
  }
  for (auto& [z, ks] : zones) {
    if (!d) {
      // endpoints: the zone, one vertex outside it, one edge element
      xs = elements(z);
      if (Mask out = s.set(NamedSet::V) & ~z) xs.push_back(std::countr_zero(out));
      if (s.edge_count()) xs.push_back(s.vertex_count());
    }
    for (int a : xs)
      for (int b : xs) {
        bool verts = a < s.vertex_count() && b < s.vertex_count() && (z >> a & 1) && (z >> b & 1);
        if (path_only) {
          std::optional<bool> o;
          if (d && verts) o = path_avoiding_cuts(*d, zone_vector(s, z), a, b, cut_vector(s, 0));
          h.check(lib.path, {z, Mask(a), Mask(b)}, o, "path_avoiding_cuts");
          continue;
        }
        for (Mask k : ks) {
          std::optional<bool> o;
          if (d && verts) o = path_avoiding_cuts(*d, zone_vector(s, z), a, b, cut_vector(s, k));
          h.check(lib.pac, {z, Mask(a), Mask(b), k}, o, "path_avoiding_cuts");
        }
      }
  }
}

void run_survives(Harness& h, const Structure& s, const DisplayGraph& d, const Library& lib) {
  auto xs = vertex_args(s);
  for (Mask z : {s.tree_vertices(1), s.tree_vertices(2), s.set(NamedSet::V)})
    for (int a : xs)
      for (int b : xs)
        for (int u : xs) {
          std::optional<bool> o;
          int nv = s.vertex_count();
          if (a < nv && b < nv && u < nv && a != b && u != a && u != b && (z >> a & 1) && (z >> b & 1))
            o = path_survives_vertex_cut(d, zone_vector(s, z), a, b, u);
          h.check(lib.survives, {z, Mask(a), Mask(b), Mask(u)}, o, "path_survives_vertex_cut");
        }
}

// Element tuples for the quartet-like predicates: every vertex tuple of tree i
// when it has at most six vertices, otherwise tuples over the leaves.
std::vector<int> tuple_domain(const Structure& s, int i) {
  Mask vi = s.tree_vertices(i);
  if (std::popcount(vi) <= 6) return elements(vi);
  Mask leaves = s.set(NamedSet::X) | (s.has_rho() ? bit(s.rho()) : 0);
  return elements(leaves);
}

bool is_leaf_label(const Structure& s, int x) { return s.set(NamedSet::X) >> x & 1 || (s.has_rho() && x == s.rho()); }

}  // namespace

namespace {

// Which component of T_i - K holds each taxon label (ρ included).
std::map<std::string, int> component_of(const DisplayGraph& d, const Structure& s, int i, Mask k) {
  std::vector<int> cuts;
  int offset = i == 1 ? 0 : d.tree(1).edge_count();
  for (int e : elements(k)) cuts.push_back(e - s.vertex_count() - offset);
  auto parts = apply_cuts(d.tree(i), cuts);
  std::map<std::string, int> out;
  for (std::size_t c = 0; c < parts.components.size(); ++c)
    for (const auto& x : parts.components[c].taxa()) out[x] = static_cast<int>(c);
  return out;
}

struct RootedView {
  std::vector<int> par;
  std::vector<Mask> cluster;  // taxa at or below each vertex
};

RootedView rooted_view(const Structure& s, int i) {
  RootedView r{parents_from_rho(s, i), std::vector<Mask>(s.vertex_count(), 0)};
  for (int x : elements(s.set(NamedSet::X)))
    for (int v = x; v >= 0; v = r.par[v]) r.cluster[v] |= bit(x);
  return r;
}

bool oracle_clade(const Structure& s, const RootedView& r, int i, Mask c, Mask pruned) {
  if (c & pruned) return false;
  Mask x = s.set(NamedSet::X);
  for (int u : elements(s.tree_vertices(i)))
    if ((c & x & ~r.cluster[u]) == 0 && (r.cluster[u] & ~(c | pruned)) == 0) return true;
  return false;
}

bool same_restriction(const DisplayGraph& d, const Structure& s, Mask c) {
  std::vector<std::string> keep;
  for (int x : elements(c)) keep.push_back(s.name(x));
  if (keep.size() < 3) return true;
  return is_isomorphic(restrict_to(strip_root(d.tree(1)), keep), restrict_to(strip_root(d.tree(2)), keep));
}

using Runner = std::function<void(Harness&, const Structure&, const DisplayGraph&, const std::vector<int>& trees)>;

struct PredicateSpec {
  std::string name;
  bool unrooted = false, rooted = false, subdivided = false, graphs = false;
  Runner run;
};

std::vector<PredicateSpec> specs() {
  const auto& lib = Library::get();
  std::vector<PredicateSpec> out;
  out.push_back({"PAC", true, true, false, true,
                 [&lib](Harness& h, const Structure& s, const DisplayGraph& d, const std::vector<int>&) {
                   run_pac(h, s, &d, false, lib);
                 }});
  out.push_back({"path", true, true, false, true,
                 [&lib](Harness& h, const Structure& s, const DisplayGraph& d, const std::vector<int>&) {
                   run_pac(h, s, &d, true, lib);
                 }});
  out.push_back({"pathSurvivesVertexCut", true, true, false, false,
                 [&lib](Harness& h, const Structure& s, const DisplayGraph& d, const std::vector<int>&) {
                   run_survives(h, s, d, lib);
                 }});
  out.push_back({"Quartet", true, true, false, false,
                 [&lib](Harness& h, const Structure& s, const DisplayGraph& d, const std::vector<int>& trees) {
                   for (int i : trees) {
                     auto dom = tuple_domain(s, i);
                     for (int a : dom)
                       for (int b : dom)
                         for (int c : dom)
                           for (int e : dom) {
                             std::optional<bool> o;
                             std::set<int> distinct{a, b, c, e};
                             if (distinct.size() == 4 && is_leaf_label(s, a) && is_leaf_label(s, b) &&
                                 is_leaf_label(s, c) && is_leaf_label(s, e))
                               o = quartet_topology(d.tree(i), {s.name(a), s.name(b), s.name(c), s.name(e)}) ==
                                   make_quartet(s.name(a), s.name(b), s.name(c), s.name(e));
                             h.check(lib.quartet[i], {Mask(a), Mask(b), Mask(c), Mask(e)}, o, "quartet_topology");
                           }
                   }
                 }});
  out.push_back({"QAC", true, false, false, false,
                 [&lib](Harness& h, const Structure& s, const DisplayGraph& d, const std::vector<int>& trees) {
                   auto xs = elements(s.set(NamedSet::X));
                   for (int i : trees)
                     for (Mask k : small_subsets(s.tree_edges(i), 1)) {
                       auto comp = component_of(d, s, i, k);
                       for (int a : xs)
                         for (int b : xs)
                           for (int c : xs)
                             for (int e : xs) {
                               if (std::set<int>{a, b, c, e}.size() < 4) continue;
                               std::array<std::string, 4> n{s.name(a), s.name(b), s.name(c), s.name(e)};
                               bool together = comp[n[0]] == comp[n[1]] && comp[n[0]] == comp[n[2]] &&
                                               comp[n[0]] == comp[n[3]];
                               bool o = together && quartet_topology(d.tree(i), n) == make_quartet(n[0], n[1], n[2], n[3]);
                               h.check(lib.qac[i], {Mask(a), Mask(b), Mask(c), Mask(e), k}, o, "cut forest quartets");
                             }
                     }
                 }});
  out.push_back({"Triplet", false, true, false, false,
                 [&lib](Harness& h, const Structure& s, const DisplayGraph& d, const std::vector<int>& trees) {
                   Mask x = s.set(NamedSet::X);
                   for (int i : trees) {
                     auto dom = tuple_domain(s, i);
                     auto rooted = strip_root(d.tree(i));
                     for (int a : dom)
                       for (int b : dom)
                         for (int c : dom) {
                           std::optional<bool> o;
                           if (std::set<int>{a, b, c}.size() == 3 && (x >> a & 1) && (x >> b & 1) && (x >> c & 1))
                             o = triplet_topology(rooted, {s.name(a), s.name(b), s.name(c)}) ==
                                 make_triplet(s.name(a), s.name(b), s.name(c));
                           h.check(lib.triplet[i], {Mask(a), Mask(b), Mask(c)}, o, "triplet_topology");
                         }
                   }
                 }});
  out.push_back({"TAC", false, true, false, false,
                 [&lib](Harness& h, const Structure& s, const DisplayGraph& d, const std::vector<int>& trees) {
                   auto xs = elements(s.set(NamedSet::X));
                   for (int i : trees) {
                     auto rooted = strip_root(d.tree(i));
                     for (Mask k : small_subsets(s.tree_edges(i), 1)) {
                       auto comp = component_of(d, s, i, k);
                       for (int a : xs)
                         for (int b : xs)
                           for (int c : xs) {
                             if (std::set<int>{a, b, c}.size() < 3) continue;
                             std::string na = s.name(a), nb = s.name(b), nc = s.name(c);
                             bool o = comp[na] == comp[nb] && comp[na] == comp[nc] &&
                                      triplet_topology(rooted, {na, nb, nc}) == make_triplet(na, nb, nc);
                             h.check(lib.tac[i], {Mask(a), Mask(b), Mask(c), k}, o, "cut forest triplets");
                           }
                     }
                   }
                 }});
  out.push_back({"InCladeUnder", false, true, false, false,
                 [&lib](Harness& h, const Structure& s, const DisplayGraph&, const std::vector<int>& trees) {
                   auto xs = vertex_args(s);
                   for (int i : trees) {
                     auto r = rooted_view(s, i);
                     for (int u : xs)
                       for (int x : xs) {
                         bool o = u == x || u == s.rho() ||
                                  (x < s.vertex_count() && r.par[x] != -2 && u < s.vertex_count() &&
                                   r.par[u] != -2 && at_or_below(r.par, u, x));
                         h.check(lib.in_clade_under[i], {Mask(u), Mask(x)}, o, "ancestry from rho");
                       }
                   }
                 }});
  out.push_back({"Clade", false, true, false, false,
                 [&lib](Harness& h, const Structure& s, const DisplayGraph&, const std::vector<int>& trees) {
                   Mask x = s.set(NamedSet::X);
                   for (int i : trees) {
                     auto r = rooted_view(s, i);
                     for (Mask c : small_subsets(x | bit(s.rho()), -1))
                       h.check(lib.clade[i], {c}, oracle_clade(s, r, i, c, 0), "clusters");
                     auto pruned = lib.clade_macro(i, 1);
                     for (Mask c : small_subsets(x, -1))
                       for (Mask z : small_subsets(x, -1))
                         h.check(pruned, {c, z}, oracle_clade(s, r, i, c, z), "clusters");
                   }
                 }});
  out.push_back({"child", false, true, true, false,
                 [&lib](Harness& h, const Structure& s, const DisplayGraph&, const std::vector<int>& trees) {
                   auto xs = vertex_args(s);
                   for (int i : trees) {
                     auto r = rooted_view(s, i);
                     for (int u : xs)
                       for (int v : xs) {
                         bool o = v < s.vertex_count() && r.par[v] >= 0 && r.par[v] == u;
                         h.check(lib.child[i], {Mask(u), Mask(v)}, o, "parent from rho");
                       }
                   }
                 }});
  out.push_back({"CPS", false, true, false, false,
                 [&lib](Harness& h, const Structure& s, const DisplayGraph& d, const std::vector<int>&) {
                   Mask x = s.set(NamedSet::X);
                   auto r1 = rooted_view(s, 1), r2 = rooted_view(s, 2);
                   for (Mask c : small_subsets(x | bit(s.rho()), -1)) {
                     std::optional<bool> o;
                     if ((c & ~x) == 0)
                       o = oracle_clade(s, r1, 1, c, 0) && oracle_clade(s, r2, 2, c, 0) && same_restriction(d, s, c);
                     h.check(lib.cps, {c}, o, "common pendant subtree");
                   }
                   auto pruned = lib.cps_macro(1);
                   for (Mask c : small_subsets(x, -1))
                     for (Mask z : small_subsets(x, -1)) {
                       bool o = oracle_clade(s, r1, 1, c, z) && oracle_clade(s, r2, 2, c, z) && same_restriction(d, s, c);
                       h.check(pruned, {c, z}, o, "pruned common pendant subtree");
                     }
                 }});
  return out;
}

}  // namespace

std::vector<std::string> validated_predicates() {
  std::vector<std::string> out;
  for (auto& p : specs()) out.push_back(p.name);
  return out;
}

std::string ValidationReport::json() const {
  nlohmann::json j;
  j["predicate"] = predicate;
  j["structures"] = structures;
  j["tuples"] = tuples;
  j["oracle_checks"] = oracle_checks;
  j["mismatches"] = mismatches;
  j["examples"] = nlohmann::json::array();
  for (auto& m : examples)
    j["examples"].push_back({{"structure", m.structure}, {"call", m.call}, {"generic", m.generic},
                             {"expected", m.expected}, {"against", m.against}});
  j["elapsed_ms"] = elapsed_ms;
  return j.dump();
}

ValidationReport validate_predicate(const std::string& name, const ValidationScope& scope) {
  auto t0 = std::chrono::steady_clock::now();
  std::string base = name;
  std::vector<int> trees{1, 2};
  if (auto hat = name.find('^'); hat != std::string::npos) {
    base = name.substr(0, hat);
    int i = std::stoi(name.substr(hat + 1));
    if (i != 1 && i != 2) throw std::invalid_argument("tree index must be 1 or 2");
    trees = {i};
  }
  auto all = specs();
  auto it = std::find_if(all.begin(), all.end(), [&](const PredicateSpec& p) { return p.name == base; });
  if (it == all.end()) throw std::invalid_argument("no validated predicate named " + name);

  ValidationReport rep;
  rep.predicate = name;
  Harness h(rep);
  auto sweep = [&](Family f, int lo) {
    for (int n = lo; n <= scope.max_taxa; ++n)
      for (const auto& d : display_family(f, n)) {
        Structure s = Structure::from_display(d);
        h.start(s, describe_structure(d));
        it->run(h, s, d, trees);
      }
  };
  // Two-taxon unrooted and one-taxon rooted inputs give parallel edges.
  if (it->unrooted) sweep(Family::unrooted, 3);
  if (it->rooted) sweep(Family::rooted, 2);
  if (it->subdivided) sweep(Family::subdivide, 3);
  if (it->graphs && scope.small_graphs) {
    const auto& lib = Library::get();
    for (const auto& g : connected_graphs(scope.graph_vertices)) {
      Structure s = Structure::from_graph(g);
      h.start(s, describe_graph(g));
      run_pac(h, s, nullptr, base == "path", lib);
    }
  }
  rep.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace phylomso::msol
