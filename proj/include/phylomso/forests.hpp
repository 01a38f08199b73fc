#pragma once

#include <optional>
#include <string>
#include <vector>

#include "phylomso/tree.hpp"

namespace phylomso {

// One component of an agreement forest: its taxa (sorted) and topology. In the
// rooted setting the component holding ρ is kept as an unrooted tree.
struct ForestComponent {
  std::vector<std::string> taxa;
  PhyloTree tree;
};

// Components are ordered by their smallest taxon. cuts1/cuts2 are edge ids of
// the trees the search ran on: the inputs for unrooted pairs, the
// ρ-augmented trees for rooted pairs.
struct AgreementForest {
  std::vector<ForestComponent> components;
  std::vector<int> cuts1, cuts2;
  bool rooted = false;
  int size() const { return static_cast<int>(components.size()); }
};

struct CutResult {
  std::vector<PhyloTree> components;  // ordered by smallest taxon
  int dropped = 0;                    // taxa-free components discarded
};

// Deletes the edges, prunes unlabelled leaves, suppresses degree-2 vertices.
CutResult apply_cuts(const PhyloTree& tree, const std::vector<int>& cuts);

// Unrooted pair: compares the partitions and component quartet sets.
// Rooted pair: t1, t2 are the original rooted trees and the cut ids refer to
// their ρ-augmented versions.
std::optional<AgreementForest> is_agreement_forest(const PhyloTree& t1, const PhyloTree& t2,
                                                   const std::vector<int>& cuts1, const std::vector<int>& cuts2);

AgreementForest umaf(const PhyloTree& t1, const PhyloTree& t2);
AgreementForest maf_rooted(const PhyloTree& t1, const PhyloTree& t2);
AgreementForest maaf(const PhyloTree& t1, const PhyloTree& t2);

// Every agreement forest of the given size, one per distinct partition, in
// search order. Used by tests and the inheritance-graph checks.
std::vector<AgreementForest> enumerate_agreement_forests(const PhyloTree& t1, const PhyloTree& t2, int size);

struct InheritanceGraph {
  int nodes = 0;
  std::vector<std::pair<int, int>> arcs;  // sorted
  bool acyclic() const;
};

// Rooted forests only. The ρ component's root is the global root.
InheritanceGraph inheritance_graph(const PhyloTree& t1, const PhyloTree& t2, const AgreementForest& forest);

// Taxon sets C of the trees with `pruned` removed that are clades of both and
// induce the same rooted topology. Sorted by (size, mask order).
std::vector<std::vector<std::string>> common_pendant_subtrees(const PhyloTree& t1, const PhyloTree& t2,
                                                              const std::vector<std::vector<std::string>>& pruned);

struct TreeSequence {
  std::vector<std::vector<std::string>> steps;  // S_1..S_p
  std::vector<std::string> remainder;
  int length() const { return static_cast<int>(steps.size()); }
};

TreeSequence min_tree_sequence(const PhyloTree& t1, const PhyloTree& t2);

std::string forest_json(const AgreementForest& forest);
std::string sequence_json(const TreeSequence& seq);

}  // namespace phylomso
