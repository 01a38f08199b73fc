#include "phylomso/msol/library.hpp"

#include <bit>
#include <stdexcept>

namespace phylomso::msol {

// ---------------------------------------------------------------------------
// Light predicates

Formula set_union_is(const Term& p, const Term& q, const Term& z) {
  auto a = elem_var("z"), b = elem_var("z"), c = elem_var("z");
  return land({forall(a, implies(member(t(a), z), lor({member(t(a), p), member(t(a), q)}))),
               forall(b, implies(member(t(b), p), member(t(b), z))),
               forall(c, implies(member(t(c), q), member(t(c), z)))});
}

Formula no_intersect(const Term& p, const Term& q) {
  auto u = elem_var("u");
  return forall_in(u, p, non_member(t(u), q));
}

Formula intersect(const Term& p, const Term& q, const Term& v) {
  auto u = elem_var("u");
  return land({member(v, p), member(v, q), forall_in(u, p, implies(member(t(u), q), eq(t(u), v)))});
}

Formula bipartition(const Term& z, const Term& p, const Term& q) {
  return land({set_union_is(p, q, z), no_intersect(p, q)});
}

Formula all_diff(const std::vector<Term>& xs) {
  std::vector<Formula> out;
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j) out.push_back(neq(xs[i], xs[j]));
  return land(std::move(out));
}

Formula partition(const Term& z, const std::vector<Term>& parts) {
  std::vector<Formula> out;
  for (std::size_t i = 0; i < parts.size(); ++i)
    for (std::size_t j = 0; j < parts.size(); ++j)
      if (i != j) out.push_back(no_intersect(parts[i], parts[j]));
  auto u = elem_var("u");
  std::vector<Formula> in_some;
  for (auto& c : parts) in_some.push_back(member(t(u), c));
  out.push_back(forall(u, iff(member(t(u), z), lor(std::move(in_some)))));
  return land(std::move(out));
}

Formula adj_by_incidence(const Term& p, const Term& q) {
  auto e = elem_var("e");
  return exists_in(e, named(NamedSet::E), land({inc(t(e), p), inc(t(e), q)}));
}

namespace {

Formula subset_of(const Term& k, const Term& e) {
  auto x = elem_var("e");
  return forall(x, implies(member(t(x), k), member(t(x), e)));
}

// ---------------------------------------------------------------------------
// Direct procedures

int at(std::span<const Mask> a, std::size_t i) { return static_cast<int>(a[i]); }
bool has(Mask m, int x) { return m >> x & 1; }

// An adjacency counts as cut when any edge of `cuts` joins the two vertices,
// even if a parallel edge survives.
bool blocked(const Structure& s, int v, int w, Mask cuts) {
  return (s.incident_edges(v) & s.incident_edges(w) & cuts) != 0;
}

// Vertices reachable from `from` inside `zone` without using an edge in `cuts`.
Mask reach(const Structure& s, int from, Mask zone, Mask cuts) {
  if (!s.is_vertex(from)) return bit(from) & zone;
  Mask seen = bit(from), todo = seen;
  while (todo) {
    int v = std::countr_zero(todo);
    todo &= todo - 1;
    for (Mask ws = s.neighbours(v) & zone & ~seen; ws; ws &= ws - 1) {
      int w = std::countr_zero(ws);
      if (!blocked(s, v, w, cuts)) seen |= bit(w), todo |= bit(w);
    }
  }
  return seen;
}

// Vertex set of a shortest a-b path inside zone avoiding cuts; 0 if none.
Mask path_mask(const Structure& s, int a, int b, Mask zone, Mask cuts) {
  if (!has(zone, a) || !has(zone, b)) return 0;
  if (a == b) return bit(a);
  if (!s.is_vertex(a) || !s.is_vertex(b)) return 0;
  std::vector<int> parent(s.vertex_count(), -1);
  std::vector<int> queue{a};
  parent[a] = a;
  for (std::size_t h = 0; h < queue.size() && parent[b] < 0; ++h) {
    int v = queue[h];
    for (Mask ws = s.neighbours(v) & zone; ws; ws &= ws - 1) {
      int w = std::countr_zero(ws);
      if (parent[w] < 0 && !blocked(s, v, w, cuts)) parent[w] = v, queue.push_back(w);
    }
  }
  if (parent[b] < 0) return 0;
  Mask m = bit(a);
  for (int v = b; v != a; v = parent[v]) m |= bit(v);
  return m;
}

bool pac_direct(const Structure& s, Mask z, int x1, int x2, Mask k) {
  if (x1 == x2) return true;
  if (!has(z, x1) || !has(z, x2)) return true;  // no bipartition of Z can separate them
  return has(reach(s, x1, z, k), x2);
}

bool survives_direct(const Structure& s, Mask z, int x1, int x2, int u) {
  if (u == x1 || u == x2) return false;
  if (x1 == x2) return true;
  if (!has(z, x1) || !has(z, x2)) return true;
  return has(reach(s, x1, z & ~bit(u), 0), x2);
}

// Embedding of the quartet xa xb | xc xd inside zone: arms A, B at u, C, D
// at v, centre P. Arms avoid `cuts` except D, which avoids `cuts_d`.
bool embedding(const Structure& s, Mask zone, int xa, int xb, int xc, int xd, Mask cuts, Mask cuts_d) {
  for (int x : {xa, xb, xc, xd})
    if (!has(zone, x)) return false;
  for (Mask us = zone; us; us &= us - 1) {
    int u = std::countr_zero(us);
    Mask a = path_mask(s, u, xa, zone, cuts), b = path_mask(s, u, xb, zone, cuts);
    if (!a || !b || (a & b) != bit(u)) continue;
    for (Mask vs = zone & ~bit(u); vs; vs &= vs - 1) {
      int v = std::countr_zero(vs);
      Mask c = path_mask(s, v, xc, zone, cuts), d = path_mask(s, v, xd, zone, cuts_d);
      Mask p = path_mask(s, u, v, zone, cuts);
      if (!c || !d || !p) continue;
      if ((a & p) != bit(u) || (b & p) != bit(u)) continue;
      if ((c & d) != bit(v) || (c & p) != bit(v) || (d & p) != bit(v)) continue;
      if ((a & c) || (b & c) || (a & d) || (b & d)) continue;
      return true;
    }
  }
  return false;
}

bool triplet_direct(const Structure& s, int i, int xa, int xb, int xc) {
  return embedding(s, s.tree_vertices(i), xa, xb, xc, s.rho(), 0, 0);
}

bool icu_direct(const Structure& s, int i, int u, int x) {
  return u == x || !survives_direct(s, s.tree_vertices(i), s.rho(), x, u);
}

bool clade_direct(const Structure& s, int i, Mask c, std::span<const Mask> z) {
  Mask pruned = 0;
  for (Mask zj : z) {
    if (c & zj) return false;
    pruned |= zj;
  }
  Mask x = s.set(NamedSet::X);
  for (Mask us = s.tree_vertices(i); us; us &= us - 1) {
    int u = std::countr_zero(us);
    Mask under = 0;
    for (Mask xs = x; xs; xs &= xs - 1) {
      int y = std::countr_zero(xs);
      if (icu_direct(s, i, u, y)) under |= bit(y);
    }
    if ((c & x & ~under) == 0 && (under & ~(c | pruned)) == 0) return true;
  }
  return false;
}

bool cps_direct(const Structure& s, std::span<const Mask> a) {
  Mask c = a[0];
  auto z = a.subspan(1);
  if (!clade_direct(s, 1, c, z) || !clade_direct(s, 2, c, z)) return false;
  for (Mask xs = c; xs; xs &= xs - 1)
    for (Mask ys = c; ys; ys &= ys - 1)
      for (Mask zs = c; zs; zs &= zs - 1) {
        int x = std::countr_zero(xs), y = std::countr_zero(ys), w = std::countr_zero(zs);
        if (x == y || x == w || y == w) continue;
        if (triplet_direct(s, 1, x, y, w) != triplet_direct(s, 2, x, y, w)) return false;
      }
  return true;
}

bool child_direct(const Structure& s, int i, int u, int v) {
  if (u == v) return false;
  for (Mask es = s.tree_edges(i); es; es &= es - 1) {
    int e = std::countr_zero(es);
    if (s.incident(e, u) && s.incident(e, v) && !pac_direct(s, s.tree_vertices(i), s.rho(), v, bit(e)))
      return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Generic bodies

using Arm = std::function<Formula(const Term& zone, const Term& from, const Term& to, bool d_arm)>;

Formula embedding_formula(int i, const Term& xa, const Term& xb, const Term& xc, const Term& xd, const Arm& arm) {
  auto u = elem_var("u"), v = elem_var("v");
  auto A = set_var("A"), B = set_var("B"), C = set_var("C"), D = set_var("D"), P = set_var("P");
  Term a = t(A), b = t(B), c = t(C), d = t(D), p = t(P), tu = t(u), tv = t(v);
  Formula inner = land({member(xa, a), member(tu, a), member(xb, b), member(tu, b), member(xc, c), member(tv, c),
                        member(xd, d), member(tv, d), member(tu, p), member(tv, p), intersect(a, b, tu),
                        intersect(a, p, tu), intersect(b, p, tu), intersect(c, d, tv), intersect(c, p, tv),
                        intersect(d, p, tv), no_intersect(a, c), no_intersect(b, c), no_intersect(a, d),
                        no_intersect(b, d), arm(a, tu, xa, false), arm(b, tu, xb, false), arm(c, tv, xc, false),
                        arm(d, tv, xd, true), arm(p, tu, tv, false)});
  Term vi = vset(i);
  Formula sets =
      exists_in(A, vi, exists_in(B, vi, exists_in(C, vi, exists_in(D, vi, exists_in(P, vi, inner)))));
  return exists_in(u, vi, exists_in(v, vi, land({neq(tu, tv), sets})));
}

std::string sup(const std::string& name, int i) { return name + "^" + std::to_string(i); }

}  // namespace

// ---------------------------------------------------------------------------

Library::Library() {
  {
    auto z = set_var("Z"), x1 = elem_var("x1"), x2 = elem_var("x2"), k = set_var("K");
    auto P = set_var("P"), Q = set_var("Q"), p = elem_var("p"), q = elem_var("q"), g = elem_var("g");
    Formula cut_ok = lor({lnot(adj(t(p), t(q))), exists_in(g, t(k), land({inc(t(g), t(p)), inc(t(g), t(q))}))});
    Formula body = lor(
        {eq(t(x1), t(x2)),
         lnot(exists(P, exists(Q, land({bipartition(t(z), t(P), t(Q)), member(t(x1), t(P)), member(t(x2), t(Q)),
                                        forall(p, forall(q, implies(land({member(t(p), t(P)), member(t(q), t(Q))}),
                                                                    cut_ok)))}))))});
    pac = define("PAC", {z, x1, x2, k}, body, [](const Structure& s, std::span<const Mask> a) {
      return pac_direct(s, a[0], at(a, 1), at(a, 2), a[3]);
    });
  }
  {
    auto z = set_var("Z"), x1 = elem_var("x1"), x2 = elem_var("x2");
    auto P = set_var("P"), Q = set_var("Q"), p = elem_var("p"), q = elem_var("q");
    Formula body = lor(
        {eq(t(x1), t(x2)),
         lnot(exists(P, exists(Q, land({bipartition(t(z), t(P), t(Q)), member(t(x1), t(P)), member(t(x2), t(Q)),
                                        forall(p, forall(q, implies(land({member(t(p), t(P)), member(t(q), t(Q))}),
                                                                    lnot(adj(t(p), t(q))))))}))))});
    path = define("path", {z, x1, x2}, body, [](const Structure& s, std::span<const Mask> a) {
      return pac_direct(s, a[0], at(a, 1), at(a, 2), 0);
    });
  }
  {
    auto z = set_var("Z"), x1 = elem_var("x1"), x2 = elem_var("x2"), u = elem_var("u");
    auto P = set_var("P"), Q = set_var("Q"), p = elem_var("p"), q = elem_var("q");
    Formula crossing = lor({lnot(adj(t(p), t(q))), eq(t(p), t(u)), eq(t(q), t(u))});
    Formula body = land(
        {neq(t(u), t(x1)), neq(t(u), t(x2)),
         lor({eq(t(x1), t(x2)),
              lnot(exists(P, exists(Q, land({bipartition(t(z), t(P), t(Q)), member(t(x1), t(P)),
                                             member(t(x2), t(Q)),
                                             forall(p, forall(q, implies(land({member(t(p), t(P)),
                                                                               member(t(q), t(Q))}),
                                                                         crossing)))}))))})});
    survives = define("pathSurvivesVertexCut", {z, x1, x2, u}, body, [](const Structure& s, std::span<const Mask> a) {
      return survives_direct(s, a[0], at(a, 1), at(a, 2), at(a, 3));
    });
  }

  auto path_arm = [this](const Term& z, const Term& a, const Term& b, bool) { return call(path, {z, a, b}); };

  for (int i = 1; i <= 2; ++i) {
    {
      auto xa = elem_var("xa"), xb = elem_var("xb"), xc = elem_var("xc"), xd = elem_var("xd");
      quartet[i] = define(sup("Quartet", i), {xa, xb, xc, xd},
                          embedding_formula(i, t(xa), t(xb), t(xc), t(xd), path_arm),
                          [i](const Structure& s, std::span<const Mask> a) {
                            return embedding(s, s.tree_vertices(i), at(a, 0), at(a, 1), at(a, 2), at(a, 3), 0, 0);
                          });
    }
    {
      auto xa = elem_var("xa"), xb = elem_var("xb"), xc = elem_var("xc"), xd = elem_var("xd"), k = set_var("K");
      Arm arm = [this, k](const Term& z, const Term& a, const Term& b, bool) { return call(pac, {z, a, b, t(k)}); };
      qac[i] = define(sup("QAC", i), {xa, xb, xc, xd, k}, embedding_formula(i, t(xa), t(xb), t(xc), t(xd), arm),
                      [i](const Structure& s, std::span<const Mask> a) {
                        return embedding(s, s.tree_vertices(i), at(a, 0), at(a, 1), at(a, 2), at(a, 3), a[4], a[4]);
                      });
    }
    {
      auto xa = elem_var("xa"), xb = elem_var("xb"), xc = elem_var("xc");
      triplet[i] = define(sup("Triplet", i), {xa, xb, xc}, call(quartet[i], {t(xa), t(xb), t(xc), rho()}),
                          [i](const Structure& s, std::span<const Mask> a) {
                            return triplet_direct(s, i, at(a, 0), at(a, 1), at(a, 2));
                          });
    }
    {
      // The ρ arm uses path with three arguments: cutting it does not matter.
      auto xa = elem_var("xa"), xb = elem_var("xb"), xc = elem_var("xc"), k = set_var("K");
      Arm arm = [this, k](const Term& z, const Term& a, const Term& b, bool d_arm) {
        return d_arm ? call(path, {z, a, b}) : call(pac, {z, a, b, t(k)});
      };
      Formula body = land({call(triplet[i], {t(xa), t(xb), t(xc)}),
                           embedding_formula(i, t(xa), t(xb), t(xc), rho(), arm)});
      tac[i] = define(sup("TAC", i), {xa, xb, xc, k}, body, [i](const Structure& s, std::span<const Mask> a) {
        return triplet_direct(s, i, at(a, 0), at(a, 1), at(a, 2)) &&
               embedding(s, s.tree_vertices(i), at(a, 0), at(a, 1), at(a, 2), s.rho(), a[3], 0);
      });
    }
    {
      auto u = elem_var("u"), x = elem_var("x");
      Formula body = lor({eq(t(u), t(x)), lnot(call(survives, {vset(i), rho(), t(x), t(u)}))});
      in_clade_under[i] = define(sup("InCladeUnder", i), {u, x}, body,
                                 [i](const Structure& s, std::span<const Mask> a) {
                                   return icu_direct(s, i, at(a, 0), at(a, 1));
                                 });
    }
    {
      // x ranges over X: internal vertices under u would otherwise have to
      // belong to C as well.
      auto c = set_var("C"), u = elem_var("u"), x = elem_var("x");
      Formula body = exists_in(
          u, vset(i),
          forall_in(x, msol::named(NamedSet::X), iff(member(t(x), t(c)), call(in_clade_under[i], {t(u), t(x)}))));
      clade[i] = define(sup("Clade", i), {c}, body, [i](const Structure& s, std::span<const Mask> a) {
        return clade_direct(s, i, a[0], {});
      });
    }
    {
      auto u = elem_var("u"), v = elem_var("v"), e = elem_var("e");
      Formula body =
          land({neq(t(u), t(v)),
                exists_in(e, eset(i),
                          land({inc(t(e), t(u)), inc(t(e), t(v)),
                                lnot(call(pac, {vset(i), rho(), t(v), singleton(e)}))}))});
      child[i] = define(sup("child", i), {u, v}, body, [i](const Structure& s, std::span<const Mask> a) {
        return child_direct(s, i, at(a, 0), at(a, 1));
      });
    }
  }
  {
    auto c = set_var("C"), x = elem_var("x"), y = elem_var("y"), z = elem_var("z");
    Formula body = land(
        {call(clade[1], {t(c)}), call(clade[2], {t(c)}),
         forall(x, forall(y, forall(z, implies(land({member(t(x), t(c)), member(t(y), t(c)), member(t(z), t(c)),
                                                     all_diff({t(x), t(y), t(z)})}),
                                               iff(call(triplet[1], {t(x), t(y), t(z)}),
                                                   call(triplet[2], {t(x), t(y), t(z)}))))))});
    cps = define("CPS", {c}, body, [](const Structure& s, std::span<const Mask> a) { return cps_direct(s, a); });
  }
}

const Library& Library::get() {
  static const Library* lib = new Library();
  return *lib;
}

DefPtr Library::clade_macro(int i, int t_count) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto& slot = clades_[{i, t_count}];
  if (slot) return slot;
  auto c = set_var("C");
  std::vector<Var> params{c};
  std::vector<Formula> parts;
  for (int j = 1; j <= t_count; ++j) params.push_back(set_var("Z" + std::to_string(j)));
  for (int j = 1; j <= t_count; ++j) parts.push_back(no_intersect(t(c), t(params[j])));
  auto u = elem_var("u"), x = elem_var("x"), y = elem_var("x");
  std::vector<Formula> allowed{member(t(y), t(c))};
  for (int j = 1; j <= t_count; ++j) allowed.push_back(member(t(y), t(params[j])));
  parts.push_back(exists_in(
      u, vset(i),
      land({forall_in(x, msol::named(NamedSet::X), implies(member(t(x), t(c)), call(in_clade_under[i], {t(u), t(x)}))),
            forall_in(y, msol::named(NamedSet::X), implies(call(in_clade_under[i], {t(u), t(y)}), lor(allowed)))})));
  slot = define(sup("Clade", i) + "[" + std::to_string(t_count) + "]", params, land(parts),
                [i](const Structure& s, std::span<const Mask> a) { return clade_direct(s, i, a[0], a.subspan(1)); });
  return slot;
}

DefPtr Library::cps_macro(int t_count) const {
  DefPtr c1 = clade_macro(1, t_count), c2 = clade_macro(2, t_count);
  std::lock_guard<std::mutex> lock(mu_);
  auto& slot = cpss_[t_count];
  if (slot) return slot;
  auto c = set_var("C"), x = elem_var("x"), y = elem_var("y"), z = elem_var("z");
  std::vector<Var> params{c};
  for (int j = 1; j <= t_count; ++j) params.push_back(set_var("Z" + std::to_string(j)));
  std::vector<Term> args;
  for (auto& p : params) args.push_back(t(p));
  Formula body = land(
      {call(c1, args), call(c2, args),
       forall(x, forall(y, forall(z, implies(land({member(t(x), t(c)), member(t(y), t(c)), member(t(z), t(c)),
                                                   all_diff({t(x), t(y), t(z)})}),
                                             iff(call(triplet[1], {t(x), t(y), t(z)}),
                                                 call(triplet[2], {t(x), t(y), t(z)}))))))});
  slot = define("CPS[" + std::to_string(t_count) + "]", params, body,
                [](const Structure& s, std::span<const Mask> a) { return cps_direct(s, a); });
  return slot;
}

std::vector<DefPtr> Library::named() const {
  std::vector<DefPtr> out{pac, path, survives};
  for (int i = 1; i <= 2; ++i)
    for (auto& d : {quartet[i], qac[i], triplet[i], tac[i], in_clade_under[i], clade[i], child[i]}) out.push_back(d);
  out.push_back(cps);
  return out;
}

DefPtr Library::by_name(const std::string& name) const {
  for (auto& d : named())
    if (d->name == name) return d;
  throw std::out_of_range("unknown predicate " + name);
}

// ---------------------------------------------------------------------------

Formula umaf_phi(const Var& k1, const Var& k2, int k) {
  const auto& lib = Library::get();
  Term X = named(NamedSet::X);
  auto a = elem_var("x1"), b = elem_var("x2");
  Formula pairs = forall_in(a, X, forall_in(b, X, iff(call(lib.pac, {vset(1), t(a), t(b), t(k1)}),
                                                      call(lib.pac, {vset(2), t(a), t(b), t(k2)}))));
  auto x1 = elem_var("x1"), x2 = elem_var("x2"), x3 = elem_var("x3"), x4 = elem_var("x4");
  auto same = [&](const Var& p, const Var& q, const Var& r, const Var& s) {
    return iff(call(lib.qac[1], {t(p), t(q), t(r), t(s), t(k1)}), call(lib.qac[2], {t(p), t(q), t(r), t(s), t(k2)}));
  };
  Formula quartets = forall_in(
      x1, X,
      forall_in(x2, X,
                forall_in(x3, X,
                          forall_in(x4, X,
                                    implies(all_diff({t(x1), t(x2), t(x3), t(x4)}),
                                            land({same(x1, x2, x3, x4), same(x1, x3, x2, x4), same(x1, x4, x2, x3)}))))));
  return land({card_eq(t(k1), k - 1), card_eq(t(k2), k - 1), subset_of(t(k1), eset(1)), subset_of(t(k2), eset(2)),
               pairs, quartets});
}

Formula rspr_phi(const Var& k1, const Var& k2, int k) {
  const auto& lib = Library::get();
  Term X = named(NamedSet::X), XR = named(NamedSet::taxa_rho);
  auto a = elem_var("x1"), b = elem_var("x2");
  Formula pairs = forall_in(a, XR, forall_in(b, XR, iff(call(lib.pac, {vset(1), t(a), t(b), t(k1)}),
                                                        call(lib.pac, {vset(2), t(a), t(b), t(k2)}))));
  auto x1 = elem_var("x1"), x2 = elem_var("x2"), x3 = elem_var("x3");
  auto same = [&](const Var& p, const Var& q, const Var& r) {
    return iff(call(lib.tac[1], {t(p), t(q), t(r), t(k1)}), call(lib.tac[2], {t(p), t(q), t(r), t(k2)}));
  };
  Formula triplets = forall_in(
      x1, X,
      forall_in(x2, X,
                forall_in(x3, X,
                          implies(all_diff({t(x1), t(x2), t(x3)}),
                                  land({same(x1, x2, x3), same(x1, x3, x2), same(x2, x3, x1)})))));
  return land({card_eq(t(k1), k - 1), card_eq(t(k2), k - 1), subset_of(t(k1), eset(1)), subset_of(t(k2), eset(2)),
               pairs, triplets});
}

Formula hybnum(int k) {
  if (k < 1) throw std::invalid_argument("HybNum needs k >= 1");
  const auto& lib = Library::get();
  std::vector<Var> cs;
  for (int j = 1; j <= k + 1; ++j) cs.push_back(set_var("C" + std::to_string(j)));
  std::vector<Term> terms;
  for (auto& c : cs) terms.push_back(t(c));
  std::vector<Formula> body{partition(named(NamedSet::X), terms)};
  for (int j = 0; j <= k; ++j) {
    std::vector<Term> args{terms[j]};
    for (int l = 0; l < j; ++l) args.push_back(terms[l]);
    body.push_back(call(lib.cps_macro(j), args));
  }
  // The C_j are declared as subsets of X, which Partition(X, ...) forces anyway.
  Formula f = land(std::move(body));
  for (int j = k; j >= 0; --j) f = exists_in(cs[j], named(NamedSet::X), f);
  return f;
}

Formula fitch_block(int i, const Var& r, const Var& b, const Var& rbi, const Var& rbu) {
  const auto& lib = Library::get();
  Term vi = vset(i), X = named(NamedSet::X);
  auto rule = [&](const Var& target, const std::function<Formula(const Term&, const Term&)>& cond) {
    auto u = elem_var("u"), c1 = elem_var("c1"), c2 = elem_var("c2");
    Formula kids = exists_in(
        c1, vi,
        exists_in(c2, vi,
                  land({neq(t(c1), t(c2)), call(lib.child[i], {t(u), t(c1)}), call(lib.child[i], {t(u), t(c2)}),
                        cond(t(c1), t(c2))})));
    return forall_in(u, vi, implies(non_member(t(u), X), iff(member(t(u), t(target)), kids)));
  };
  auto x = elem_var("x");
  return land(
      {partition(vi, {t(r), t(b), t(rbi), t(rbu)}),
       forall_in(x, X, land({non_member(t(x), t(rbi)), non_member(t(x), t(rbu))})),
       rule(r, [&](const Term& c1, const Term& c2) { return land({member(c1, t(r)), non_member(c2, t(b))}); }),
       rule(b, [&](const Term& c1, const Term& c2) { return land({member(c1, t(b)), non_member(c2, t(r))}); }),
       rule(rbi,
            [&](const Term& c1, const Term& c2) {
              return land({non_member(c1, t(r)), non_member(c1, t(b)), non_member(c2, t(r)), non_member(c2, t(b))});
            }),
       rule(rbu, [&](const Term& c1, const Term& c2) { return land({member(c1, t(r)), member(c2, t(b))}); })});
}

Formula same_character(const Var& r1, const Var& b1, const Var& r2, const Var& b2) {
  auto x = elem_var("x");
  return forall_in(x, msol::named(NamedSet::X), land({iff(member(t(x), t(r1)), member(t(x), t(r2))),
                                               iff(member(t(x), t(b1)), member(t(x), t(b2)))}));
}

}  // namespace phylomso::msol
