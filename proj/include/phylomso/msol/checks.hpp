#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phylomso/display_graph.hpp"
#include "phylomso/msol/evaluator.hpp"
#include "phylomso/tree.hpp"

namespace phylomso::msol {

// Default guard for generic (uncompiled) evaluation.
inline constexpr int kGenericMaxTaxa = 4;

// ∃K1 ⊆ E1, K2 ⊆ E2 with |Ki| = k'-1 and G ⊨ Φ(K1, K2). The cut pairs are
// enumerated explicitly; Φ itself is evaluated with `opt`.
bool check_umaf_formula(const PhyloTree& t1, const PhyloTree& t2, int k, const EvalOptions& opt = {},
                        int max_taxa = kGenericMaxTaxa);
bool check_rspr_formula(const PhyloTree& t1, const PhyloTree& t2, int k, const EvalOptions& opt = {},
                        int max_taxa = kGenericMaxTaxa);
// k' = 0 is an isomorphism test; k' >= 1 evaluates HybNum[k'].
bool check_hybnum_formula(const PhyloTree& t1, const PhyloTree& t2, int k, const EvalOptions& opt = {},
                          int max_taxa = kGenericMaxTaxa);
// Node count of HybNum[k'] with every macro call expanded once.
int hybnum_expanded_size(int k);

// Maximum of |RB_U^1| - |RB_U^2| over assignments satisfying the Fitch
// constraint blocks of both trees and the shared-character constraint.
struct FitchMsoResult {
  int value = 0;
  std::string witness;  // colours in taxon order, 'r' / 'b'
  int characters = 0;
};
FitchMsoResult fitch_mso_optimum(const PhyloTree& t1, const PhyloTree& t2, const EvalOptions& opt = {},
                                 int max_taxa = kGenericMaxTaxa);
// Number of assignments of tree i's non-taxon vertices satisfying the Fitch
// block for the character given by `red` (a mask over X in taxon order), and
// whether the unique one, if any, is the one Fitch's algorithm produces.
struct FitchUniqueness {
  int satisfying = 0;
  bool matches_fitch = false;
};
FitchUniqueness fitch_assignment_count(const PhyloTree& t1, const PhyloTree& t2, int i, std::uint32_t red,
                                       const EvalOptions& opt = {});

// Structure families for validation.
enum class Family { unrooted, rooted, subdivide };
// Display graphs of all pairs on |X| = n taxa, one per class of pairs equal up
// to relabelling taxa.
std::vector<DisplayGraph> display_family(Family f, int n);
// All connected simple graphs on 1..n vertices, up to isomorphism.
std::vector<Graph> connected_graphs(int n);

struct ValidationScope {
  int max_taxa = kGenericMaxTaxa;
  bool small_graphs = false;  // PAC/path also on connected graphs
  int graph_vertices = 6;
};

struct Mismatch {
  std::string structure;
  std::string call;
  bool generic = false, expected = false;
  std::string against;  // "compiled" or the name of an independent oracle
};

struct ValidationReport {
  std::string predicate;
  int structures = 0;
  std::uint64_t tuples = 0;
  std::uint64_t mismatches = 0;
  std::uint64_t oracle_checks = 0;
  std::vector<Mismatch> examples;  // at most a handful
  double elapsed_ms = 0;
  std::string json() const;
};

// Predicate names without the tree index ("Quartet") check both trees.
std::vector<std::string> validated_predicates();
ValidationReport validate_predicate(const std::string& name, const ValidationScope& scope = {});

}  // namespace phylomso::msol
