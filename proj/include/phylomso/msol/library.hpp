#pragma once

#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "phylomso/msol/formula.hpp"

namespace phylomso::msol {

// Light predicates: expanded in place with fresh bound variables.
Formula set_union_is(const Term& p, const Term& q, const Term& z);  // P ∪ Q = Z
Formula no_intersect(const Term& p, const Term& q);
Formula intersect(const Term& p, const Term& q, const Term& v);
Formula bipartition(const Term& z, const Term& p, const Term& q);
Formula all_diff(const std::vector<Term>& xs);
Formula partition(const Term& z, const std::vector<Term>& parts);
// adj spelled out through the incidence relation.
Formula adj_by_incidence(const Term& p, const Term& q);

// Named predicates with their direct procedures. Tree-indexed predicates
// are stored at index 1 and 2.
class Library {
 public:
  static const Library& get();

  DefPtr pac, path, survives;  // survives = pathSurvivesVertexCut
  DefPtr quartet[3], qac[3], triplet[3], tac[3], in_clade_under[3], clade[3], child[3];
  DefPtr cps;  // plain, no prune list

  // Clade^i(C, [Z1..Zt]) and CPS(C, [Z1..Zt]); instances are cached.
  DefPtr clade_macro(int i, int t) const;
  DefPtr cps_macro(int t) const;

  // Predicates with a fixed signature, by name ("PAC", "Quartet^1", ...).
  DefPtr by_name(const std::string& name) const;
  std::vector<DefPtr> named() const;

 private:
  Library();
  mutable std::mutex mu_;
  mutable std::map<std::pair<int, int>, DefPtr> clades_;
  mutable std::map<int, DefPtr> cpss_;
};

// Φ(K1, K2) for unrooted pairs and its rooted variant; K1, K2 stay free.
Formula umaf_phi(const Var& k1, const Var& k2, int k);
Formula rspr_phi(const Var& k1, const Var& k2, int k);
// HybNum[k] for k >= 1, a closed formula.
Formula hybnum(int k);
// The Fitch constraints for tree i, with free sets R, B, RB_I, RB_U.
Formula fitch_block(int i, const Var& r, const Var& b, const Var& rbi, const Var& rbu);
// Both trees see the same character.
Formula same_character(const Var& r1, const Var& b1, const Var& r2, const Var& b2);

}  // namespace phylomso::msol
