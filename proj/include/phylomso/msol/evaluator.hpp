#pragma once

#include <cstdint>
#include <iosfwd>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "phylomso/msol/formula.hpp"
#include "phylomso/msol/structure.hpp"

namespace phylomso::msol {

struct EvalOptions {
  // Predicates answered by their direct procedure instead of their body.
  std::set<std::string> compiled;
  bool all_compiled = false;
  bool reorder = true;
  std::uint64_t budget = 0;  // node visits; 0 means unlimited
};

class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& what, int depth) : std::runtime_error(what), depth(depth) {}
  int depth;
};

// Direct semantic evaluation over one structure. Call results are memoised
// for the lifetime of the evaluator, so one evaluator serves one structure.
class Evaluator {
 public:
  explicit Evaluator(const Structure& s, EvalOptions opt = {});

  // Element variables take an element id, set variables a mask.
  void bind(const Var& v, Mask value);
  bool holds(const Formula& f);
  bool call(const DefPtr& def, std::span<const Mask> args);

  std::uint64_t steps() const { return steps_; }
  // Writes one line per quantifier or call whose nesting depth is <= depth.
  void trace_to(std::ostream* out, int depth) {
    trace_ = out;
    trace_depth_ = depth;
  }
  const Structure& structure() const { return s_; }

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<Mask>& k) const;
  };

  bool eval(const Node& n);
  bool eval_exists_set(const Node& n);
  bool eval_forall_set(const Node& n);
  bool eval_call(const Node& n);
  bool run_call(const Definition& d, const std::vector<Mask>& args);
  bool uses_compiled(const Definition& d);
  int elem(const Term& x) const;
  Mask set(const Term& x) const;
  void tick();
  void ensure_env();
  void trace_line(const std::string& what, bool value);
  std::string describe(const Node& n) const;

  const Structure& s_;
  EvalOptions opt_;
  std::vector<Mask> env_;
  // While a set quantifier is narrowed, "element ∈ var" is answered by value.
  struct Probe {
    int var, element;
    bool value;
  };
  std::vector<Probe> probes_;
  std::vector<std::unordered_map<std::vector<Mask>, bool, KeyHash>> memo_;
  std::vector<signed char> compiled_flag_;
  std::unordered_map<const Node*, Formula> prepared_;
  std::uint64_t steps_ = 0;
  int depth_ = 0;
  std::ostream* trace_ = nullptr;
  int trace_depth_ = -1;
};

}  // namespace phylomso::msol
