#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "phylomso/tree.hpp"

namespace phylomso {

// Labels "a", "b", ... used by the sweep suites.
std::vector<std::string> letter_taxa(int n);

// Every binary topology on the given taxa, built by stepwise addition, in a
// deterministic order. (2n-5)!! unrooted / (2n-3)!! rooted trees.
std::vector<PhyloTree> all_unrooted_trees(const std::vector<std::string>& taxa);
std::vector<PhyloTree> all_rooted_trees(const std::vector<std::string>& taxa);

// Uniform over topologies (random stepwise addition is uniform for binary trees).
PhyloTree random_unrooted_tree(const std::vector<std::string>& taxa, std::mt19937_64& rng);
PhyloTree random_rooted_tree(const std::vector<std::string>& taxa, std::mt19937_64& rng);

PhyloTree caterpillar(const std::vector<std::string>& taxa, TreeKind kind);

}  // namespace phylomso
