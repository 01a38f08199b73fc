#pragma once

#include <functional>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "phylomso/msol/structure.hpp"

namespace phylomso::msol {

enum class Sort { element, set };

// Variables are identified by a process-wide id, so a formula never needs
// renaming; the name is for printing only.
struct Var {
  int id = -1;
  Sort sort = Sort::element;
  std::string name;
};

Var elem_var(std::string name);
Var set_var(std::string name);
// One more than the largest id handed out so far.
int variable_count();

struct Term {
  enum class Kind { var, rho, named, singleton };
  Kind kind = Kind::named;
  int var = -1;
  Sort sort = Sort::set;
  NamedSet set = NamedSet::empty;
  std::string name;
};

Term t(const Var& v);
Term rho();
Term named(NamedSet s);
Term singleton(const Var& v);
inline Term vset(int i) { return named(i == 1 ? NamedSet::V1 : NamedSet::V2); }
inline Term eset(int i) { return named(i == 1 ? NamedSet::E1 : NamedSet::E2); }

enum class Op { top, bottom, not_, and_, or_, implies, iff, exists, forall, member, eq, inc, adj, card, call };

struct Node;
using Formula = std::shared_ptr<const Node>;

struct Definition;
using DefPtr = std::shared_ptr<const Definition>;

// How a conjunct under a set quantifier constrains the quantified set.
enum class Rule : unsigned char { none, member, non_member, probe };

struct Node {
  Op op = Op::top;
  std::vector<Formula> kids;
  // Quantifiers: bound variable and optional domain (u ∈ D, S ⊆ D).
  Var var;
  bool has_domain = false;
  Term domain;
  // Atoms: member(a ∈ b), eq(a = b), inc(R^D(a, b)), adj(a, b), card(|a| = value).
  Term a, b;
  int value = 0;
  // Calls.
  DefPtr def;
  std::vector<Term> args;
  // Filled in by prepare() for set quantifiers whose body is a conjunction.
  std::vector<Rule> rules;
};

using Compiled = std::function<bool(const Structure&, std::span<const Mask>)>;

// A named predicate. Its body may only mention its parameters; calls to it
// are the evaluator's memoisation boundary.
struct Definition {
  int id = -1;
  std::string name;
  std::vector<Var> params;
  Formula body;
  Formula prepared;            // prepare(body, true)
  Formula prepared_in_order;   // prepare(body, false)
  Compiled compiled;           // optional direct procedure
};

DefPtr define(std::string name, std::vector<Var> params, Formula body, Compiled compiled = {});
int definition_count();

Formula top();
Formula bottom();
Formula lnot(Formula f);
Formula land(std::vector<Formula> fs);
Formula lor(std::vector<Formula> fs);
Formula implies(Formula a, Formula b);
Formula iff(Formula a, Formula b);
Formula exists(const Var& v, Formula body);
Formula exists_in(const Var& v, Term domain, Formula body);
Formula forall(const Var& v, Formula body);
Formula forall_in(const Var& v, Term domain, Formula body);
Formula member(Term x, Term s);
Formula non_member(Term x, Term s);
Formula eq(Term a, Term b);
Formula neq(Term a, Term b);
Formula inc(Term e, Term v);
Formula adj(Term p, Term q);
Formula card_eq(Term s, int c);
Formula call(DefPtr def, std::vector<Term> args);

// Free variable ids.
std::set<int> free_vars(const Formula& f);
// Node count, counting each call as one node.
int formula_size(const Formula& f);
std::string to_string(const Formula& f);
std::string to_string(const Definition& d);

// Evaluation-ready form: flattening, guard extraction (∀w(w ∈ T ⇒ φ) becomes
// ∀w ∈ T φ), miniscoping of ∃ over ∧, optional cheap-first reordering of
// conjunctions and disjunctions, and rule tagging for set quantifiers.
// Truth value is unchanged.
Formula prepare(const Formula& f, bool reorder = true);

}  // namespace phylomso::msol
