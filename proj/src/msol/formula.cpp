#include "phylomso/msol/formula.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>
#include <stdexcept>

namespace phylomso::msol {

namespace {

std::atomic<int> next_var{0};
std::atomic<int> next_def{0};

std::shared_ptr<Node> node(Op op) {
  auto n = std::make_shared<Node>();
  n->op = op;
  return n;
}

void require_element(const Term& x) {
  if (x.sort != Sort::element) throw std::logic_error("expected an element term");
}
void require_set(const Term& s) {
  if (s.sort != Sort::set) throw std::logic_error("expected a set term");
}

}  // namespace

Var elem_var(std::string name) { return Var{next_var++, Sort::element, std::move(name)}; }
Var set_var(std::string name) { return Var{next_var++, Sort::set, std::move(name)}; }

int variable_count() { return next_var.load(); }

Term t(const Var& v) {
  Term x;
  x.kind = Term::Kind::var;
  x.var = v.id;
  x.sort = v.sort;
  x.name = v.name;
  return x;
}

Term rho() {
  Term x;
  x.kind = Term::Kind::rho;
  x.sort = Sort::element;
  x.name = "rho";
  return x;
}

Term named(NamedSet s) {
  Term x;
  x.kind = Term::Kind::named;
  x.sort = Sort::set;
  x.set = s;
  x.name = set_name(s);
  return x;
}

Term singleton(const Var& v) {
  if (v.sort != Sort::element) throw std::logic_error("singleton of a set variable");
  Term x;
  x.kind = Term::Kind::singleton;
  x.sort = Sort::set;
  x.var = v.id;
  x.name = "{" + v.name + "}";
  return x;
}

Formula top() {
  static const Formula f = node(Op::top);
  return f;
}

Formula bottom() {
  static const Formula f = node(Op::bottom);
  return f;
}

Formula lnot(Formula f) {
  auto n = node(Op::not_);
  n->kids = {std::move(f)};
  return n;
}

Formula land(std::vector<Formula> fs) {
  if (fs.empty()) return top();
  if (fs.size() == 1) return fs[0];
  auto n = node(Op::and_);
  n->kids = std::move(fs);
  return n;
}

Formula lor(std::vector<Formula> fs) {
  if (fs.empty()) return bottom();
  if (fs.size() == 1) return fs[0];
  auto n = node(Op::or_);
  n->kids = std::move(fs);
  return n;
}

Formula implies(Formula a, Formula b) {
  auto n = node(Op::implies);
  n->kids = {std::move(a), std::move(b)};
  return n;
}

Formula iff(Formula a, Formula b) {
  auto n = node(Op::iff);
  n->kids = {std::move(a), std::move(b)};
  return n;
}

namespace {

Formula quant(Op op, const Var& v, const Term* domain, Formula body) {
  auto n = node(op);
  n->var = v;
  if (domain) {
    require_set(*domain);
    n->has_domain = true;
    n->domain = *domain;
  }
  n->kids = {std::move(body)};
  return n;
}

}  // namespace

Formula exists(const Var& v, Formula body) { return quant(Op::exists, v, nullptr, std::move(body)); }
Formula exists_in(const Var& v, Term domain, Formula body) { return quant(Op::exists, v, &domain, std::move(body)); }
Formula forall(const Var& v, Formula body) { return quant(Op::forall, v, nullptr, std::move(body)); }
Formula forall_in(const Var& v, Term domain, Formula body) { return quant(Op::forall, v, &domain, std::move(body)); }

Formula member(Term x, Term s) {
  require_element(x);
  require_set(s);
  auto n = node(Op::member);
  n->a = std::move(x);
  n->b = std::move(s);
  return n;
}

Formula non_member(Term x, Term s) { return lnot(member(std::move(x), std::move(s))); }

Formula eq(Term a, Term b) {
  require_element(a);
  require_element(b);
  auto n = node(Op::eq);
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

Formula neq(Term a, Term b) { return lnot(eq(std::move(a), std::move(b))); }

Formula inc(Term e, Term v) {
  require_element(e);
  require_element(v);
  auto n = node(Op::inc);
  n->a = std::move(e);
  n->b = std::move(v);
  return n;
}

Formula adj(Term p, Term q) {
  require_element(p);
  require_element(q);
  auto n = node(Op::adj);
  n->a = std::move(p);
  n->b = std::move(q);
  return n;
}

Formula card_eq(Term s, int c) {
  require_set(s);
  auto n = node(Op::card);
  n->a = std::move(s);
  n->value = c;
  return n;
}

Formula call(DefPtr def, std::vector<Term> args) {
  if (args.size() != def->params.size())
    throw std::logic_error(def->name + ": expected " + std::to_string(def->params.size()) + " arguments");
  for (std::size_t i = 0; i < args.size(); ++i)
    if (args[i].sort != def->params[i].sort) throw std::logic_error(def->name + ": argument sort mismatch");
  auto n = node(Op::call);
  n->def = std::move(def);
  n->args = std::move(args);
  return n;
}

// ---------------------------------------------------------------------------

namespace {

void term_vars(const Term& x, std::set<int>& out) {
  if (x.kind == Term::Kind::var || x.kind == Term::Kind::singleton) out.insert(x.var);
}

void collect_free(const Node& n, std::set<int>& out) {
  switch (n.op) {
    case Op::exists:
    case Op::forall: {
      std::set<int> inner;
      collect_free(*n.kids[0], inner);
      inner.erase(n.var.id);
      out.insert(inner.begin(), inner.end());
      if (n.has_domain) term_vars(n.domain, out);
      return;
    }
    case Op::member:
    case Op::eq:
    case Op::inc:
    case Op::adj:
      term_vars(n.a, out);
      term_vars(n.b, out);
      return;
    case Op::card:
      term_vars(n.a, out);
      return;
    case Op::call:
      for (auto& x : n.args) term_vars(x, out);
      return;
    default:
      for (auto& k : n.kids) collect_free(*k, out);
  }
}

bool mentions(const Formula& f, int var) { return free_vars(f).count(var) > 0; }

bool term_is(const Term& x, int var) { return x.kind == Term::Kind::var && x.var == var; }

}  // namespace

std::set<int> free_vars(const Formula& f) {
  std::set<int> out;
  collect_free(*f, out);
  return out;
}

int formula_size(const Formula& f) {
  int n = 1;
  for (auto& k : f->kids) n += formula_size(k);
  return n;
}

DefPtr define(std::string name, std::vector<Var> params, Formula body, Compiled compiled) {
  auto fv = free_vars(body);
  for (auto& p : params) fv.erase(p.id);
  if (!fv.empty()) throw std::logic_error(name + ": body has free variables that are not parameters");
  auto d = std::make_shared<Definition>();
  d->id = next_def++;
  d->name = std::move(name);
  d->params = std::move(params);
  d->body = std::move(body);
  d->prepared = prepare(d->body, true);
  d->prepared_in_order = prepare(d->body, false);
  d->compiled = std::move(compiled);
  return d;
}

int definition_count() { return next_def.load(); }

// ---------------------------------------------------------------------------

namespace {

void print(const Node& n, std::ostream& os) {
  auto list = [&](const char* sep) {
    os << '(';
    for (std::size_t i = 0; i < n.kids.size(); ++i) {
      if (i) os << sep;
      print(*n.kids[i], os);
    }
    os << ')';
  };
  switch (n.op) {
    case Op::top: os << "true"; break;
    case Op::bottom: os << "false"; break;
    case Op::not_:
      os << '~';
      print(*n.kids[0], os);
      break;
    case Op::and_: list(" & "); break;
    case Op::or_: list(" | "); break;
    case Op::implies: list(" -> "); break;
    case Op::iff: list(" <-> "); break;
    case Op::exists:
    case Op::forall:
      os << (n.op == Op::exists ? "exists " : "forall ") << n.var.name;
      if (n.has_domain) os << (n.var.sort == Sort::set ? " sub " : " in ") << n.domain.name;
      os << ". ";
      print(*n.kids[0], os);
      break;
    case Op::member: os << n.a.name << " in " << n.b.name; break;
    case Op::eq: os << n.a.name << " = " << n.b.name; break;
    case Op::inc: os << "R(" << n.a.name << ", " << n.b.name << ')'; break;
    case Op::adj: os << "adj(" << n.a.name << ", " << n.b.name << ')'; break;
    case Op::card: os << '|' << n.a.name << "| = " << n.value; break;
    case Op::call:
      os << n.def->name << '(';
      for (std::size_t i = 0; i < n.args.size(); ++i) os << (i ? ", " : "") << n.args[i].name;
      os << ')';
      break;
  }
}

}  // namespace

std::string to_string(const Formula& f) {
  std::ostringstream os;
  print(*f, os);
  return os.str();
}

std::string to_string(const Definition& d) {
  std::ostringstream os;
  os << d.name << '(';
  for (std::size_t i = 0; i < d.params.size(); ++i) os << (i ? ", " : "") << d.params[i].name;
  os << ") := ";
  print(*d.body, os);
  return os.str();
}

// ---------------------------------------------------------------------------

namespace {

std::vector<Formula> conjuncts(const Formula& f) {
  if (f->op == Op::and_) return f->kids;
  if (f->op == Op::top) return {};
  return {f};
}

// 0: quantifier- and call-free, 1: calls but no quantifiers, 2: quantifiers.
int cost(const Node& n) {
  if (n.op == Op::exists || n.op == Op::forall) return 2;
  int c = n.op == Op::call ? 1 : 0;
  for (auto& k : n.kids) c = std::max(c, cost(*k));
  return c;
}

// Does `f` use set variable s only in atoms "w ∈ s"?
bool only_probe_uses(const Node& n, int s, int w) {
  switch (n.op) {
    case Op::member:
      return !term_is(n.b, s) || term_is(n.a, w);
    case Op::card:
      return !term_is(n.a, s);
    case Op::call:
      for (auto& x : n.args)
        if (term_is(x, s)) return false;
      return true;
    case Op::exists:
    case Op::forall:
      if (n.has_domain && term_is(n.domain, s)) return false;
      return only_probe_uses(*n.kids[0], s, w);
    default:
      for (auto& k : n.kids)
        if (!only_probe_uses(*k, s, w)) return false;
      return true;
  }
}

Rule classify(const Formula& c, int s) {
  if (c->op == Op::member && term_is(c->b, s)) return Rule::member;
  if (c->op == Op::not_ && c->kids[0]->op == Op::member && term_is(c->kids[0]->b, s)) return Rule::non_member;
  // the domain is either s itself or does not mention it
  if (c->op == Op::forall && c->var.sort == Sort::element && only_probe_uses(*c->kids[0], s, c->var.id))
    return Rule::probe;
  return Rule::none;
}

class Preparer {
 public:
  explicit Preparer(bool reorder) : reorder_(reorder) {}

  Formula run(const Formula& f) {
    switch (f->op) {
      case Op::not_: {
        auto k = run(f->kids[0]);
        if (k->op == Op::top) return bottom();
        if (k->op == Op::bottom) return top();
        if (k->op == Op::not_) return k->kids[0];
        return lnot(k);
      }
      case Op::and_:
      case Op::or_: return junction(f);
      case Op::implies: {
        auto a = run(f->kids[0]), b = run(f->kids[1]);
        if (a->op == Op::bottom || b->op == Op::top) return top();
        if (a->op == Op::top) return b;
        return implies(a, b);
      }
      case Op::iff: return iff(run(f->kids[0]), run(f->kids[1]));
      case Op::exists: return quantify_exists(f);
      case Op::forall: return quantify_forall(f);
      default: return f;
    }
  }

 private:
  bool reorder_;

  Formula junction(const Formula& f) {
    bool is_and = f->op == Op::and_;
    std::vector<Formula> out;
    for (auto& k : f->kids) {
      auto p = run(k);
      if (p->op == f->op) {
        out.insert(out.end(), p->kids.begin(), p->kids.end());
        continue;
      }
      if (p->op == (is_and ? Op::top : Op::bottom)) continue;
      if (p->op == (is_and ? Op::bottom : Op::top)) return p;
      out.push_back(p);
    }
    if (reorder_)
      std::stable_sort(out.begin(), out.end(), [](const Formula& a, const Formula& b) { return cost(*a) < cost(*b); });
    return is_and ? land(std::move(out)) : lor(std::move(out));
  }

  static const Term* guard_for(const Formula& c, int v) {
    if (c->op == Op::member && term_is(c->a, v) && !(c->b.kind == Term::Kind::singleton && c->b.var == v))
      return &c->b;
    return nullptr;
  }

  Formula quantify_exists(const Formula& f) {
    const Var& v = f->var;
    auto body = run(f->kids[0]);
    std::vector<Formula> lifted, keep;
    for (auto& c : conjuncts(body)) (mentions(c, v.id) ? keep : lifted).push_back(c);
    if (body->op == Op::bottom) return bottom();
    bool has_domain = f->has_domain;
    Term domain = f->domain;
    if (v.sort == Sort::element && !has_domain) {
      for (std::size_t i = 0; i < keep.size(); ++i)
        if (auto g = guard_for(keep[i], v.id)) {
          has_domain = true;
          domain = *g;
          keep.erase(keep.begin() + static_cast<long>(i));
          break;
        }
    }
    if (keep.empty() && v.sort == Sort::set) {
      // ∃S ⊆ D true always holds; the empty set is a witness.
    } else {
      if (reorder_)
        std::stable_sort(keep.begin(), keep.end(),
                         [](const Formula& a, const Formula& b) { return cost(*a) < cost(*b); });
      auto n = std::make_shared<Node>();
      n->op = Op::exists;
      n->var = v;
      n->has_domain = has_domain;
      n->domain = domain;
      n->kids = {land(keep)};
      if (v.sort == Sort::set)
        for (auto& c : keep) n->rules.push_back(classify(c, v.id));
      lifted.push_back(n);
    }
    return land(std::move(lifted));
  }

  Formula quantify_forall(const Formula& f) {
    const Var& v = f->var;
    auto body = run(f->kids[0]);
    if (body->op == Op::top) return top();
    std::vector<Formula> outer;
    bool has_domain = f->has_domain;
    Term domain = f->domain;
    if (body->op == Op::implies) {
      std::vector<Formula> keep;
      for (auto& a : conjuncts(body->kids[0])) (mentions(a, v.id) ? keep : outer).push_back(a);
      if (v.sort == Sort::element && !has_domain) {
        for (std::size_t i = 0; i < keep.size(); ++i)
          if (auto g = guard_for(keep[i], v.id)) {
            has_domain = true;
            domain = *g;
            keep.erase(keep.begin() + static_cast<long>(i));
            break;
          }
      }
      body = keep.empty() ? body->kids[1] : implies(land(keep), body->kids[1]);
    }
    auto n = std::make_shared<Node>();
    n->op = Op::forall;
    n->var = v;
    n->has_domain = has_domain;
    n->domain = domain;
    n->kids = {body};
    if (outer.empty()) return n;
    return implies(land(std::move(outer)), n);
  }
};

}  // namespace

Formula prepare(const Formula& f, bool reorder) { return Preparer(reorder).run(f); }

}  // namespace phylomso::msol
