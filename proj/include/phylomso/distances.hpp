#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "phylomso/forests.hpp"
#include "phylomso/tree.hpp"

namespace phylomso {

enum class Colour : unsigned char { red, blue };
// Total map taxon -> colour.
using Character = std::map<std::string, Colour>;

enum class FitchState : unsigned char { R, B, RB_I, RB_U };

struct FitchLabeling {
  PhyloTree rooted;                 // the tree Fitch ran on
  std::vector<FitchState> states;   // per vertex of `rooted`
  int score = 0;                    // union vertices
};

struct ForestDistance {
  int value = 0;
  AgreementForest forest;
};

ForestDistance d_tbr(const PhyloTree& t1, const PhyloTree& t2);
ForestDistance d_rspr(const PhyloTree& t1, const PhyloTree& t2);

struct HybridizationResult {
  int value = 0;
  AgreementForest forest;
  std::optional<TreeSequence> sequence;  // set when dual certification ran
};
// With dual_certify the tree-sequence characterisation is computed too and a
// CertificationError is thrown if the two disagree.
HybridizationResult hyb_number(const PhyloTree& t1, const PhyloTree& t2, bool dual_certify = false);

class CertificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kTbrBfsLimit = 6;
inline constexpr int kRsprBfsLimit = 5;
inline constexpr int kFitchBruteLimit = 8;
inline constexpr int kD2mpLimit = 16;

// Breadth-first search over single moves; trees compared by canonical Newick.
int tbr_move_bfs(const PhyloTree& t1, const PhyloTree& t2, int limit = kTbrBfsLimit);
int rspr_move_bfs(const PhyloTree& t1, const PhyloTree& t2, int limit = kRsprBfsLimit);
// Distinct trees one move away (canonical Newick, sorted).
std::vector<std::string> tbr_neighbours(const PhyloTree& t);
std::vector<std::string> rspr_neighbours(const PhyloTree& t);

// Unrooted trees are rooted by subdividing the edge incident to the smallest
// taxon unless an explicit edge is given.
FitchLabeling fitch_score(const PhyloTree& tree, const Character& f);
FitchLabeling fitch_score(const PhyloTree& tree, const Character& f, int rooting_edge);
int fitch_bruteforce(const PhyloTree& tree, const Character& f, int limit = kFitchBruteLimit);

struct D2mpResult {
  int value = 0;
  Character witness;
  int score1 = 0, score2 = 0;
};
// max |l_f(T1) - l_f(T2)| with the lexicographically smallest optimal
// character (red < blue, taxa in sorted order).
D2mpResult d2mp(const PhyloTree& t1, const PhyloTree& t2, int limit = kD2mpLimit);
// max over f of l_f(T1) - l_f(T2) alone.
D2mpResult d2mp_directional(const PhyloTree& t1, const PhyloTree& t2, int limit = kD2mpLimit);

// Characters with the first taxon red, in the order used by d2mp.
std::vector<Character> half_characters(const std::vector<std::string>& taxa);
std::vector<Character> all_characters(const std::vector<std::string>& taxa);

std::string colour_name(Colour c);
std::string character_json(const Character& f);

}  // namespace phylomso
