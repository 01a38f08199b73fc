#include "phylomso/msol/evaluator.hpp"

#include <bit>
#include <ostream>
#include <sstream>

namespace phylomso::msol {

namespace {

bool is_var(const Term& x, int var) { return x.kind == Term::Kind::var && x.var == var; }

const std::vector<Formula>& conjuncts_of(const Node& body, std::vector<Formula>& single, const Formula& self) {
  if (body.op == Op::and_) return body.kids;
  single = {self};
  return single;
}

}  // namespace

std::size_t Evaluator::KeyHash::operator()(const std::vector<Mask>& k) const {
  std::size_t h = k.size();
  for (Mask m : k) h ^= std::hash<Mask>{}(m) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

Evaluator::Evaluator(const Structure& s, EvalOptions opt) : s_(s), opt_(std::move(opt)) { ensure_env(); }

void Evaluator::ensure_env() {
  auto n = static_cast<std::size_t>(variable_count());
  if (env_.size() < n) env_.resize(n, 0);
}

void Evaluator::bind(const Var& v, Mask value) {
  ensure_env();
  if (v.sort == Sort::element && static_cast<int>(value) >= s_.size())
    throw std::out_of_range("element id outside the universe");
  env_[v.id] = value;
}

bool Evaluator::holds(const Formula& f) {
  ensure_env();
  auto it = prepared_.find(f.get());
  if (it == prepared_.end()) it = prepared_.emplace(f.get(), prepare(f, opt_.reorder)).first;
  return eval(*it->second);
}

bool Evaluator::call(const DefPtr& def, std::span<const Mask> args) {
  ensure_env();
  std::vector<Mask> a(args.begin(), args.end());
  if (uses_compiled(*def)) return def->compiled(s_, a);
  return run_call(*def, a);
}

void Evaluator::tick() {
  ++steps_;
  if (opt_.budget && steps_ > opt_.budget)
    throw BudgetExceeded("evaluation budget of " + std::to_string(opt_.budget) + " steps exceeded at quantifier depth " +
                             std::to_string(depth_),
                         depth_);
}

int Evaluator::elem(const Term& x) const {
  switch (x.kind) {
    case Term::Kind::var: return static_cast<int>(env_[x.var]);
    case Term::Kind::rho: return s_.rho();
    default: throw std::logic_error("set term used as an element");
  }
}

Mask Evaluator::set(const Term& x) const {
  switch (x.kind) {
    case Term::Kind::var: return env_[x.var];
    case Term::Kind::named: return s_.set(x.set);
    case Term::Kind::singleton: return bit(static_cast<int>(env_[x.var]));
    default: throw std::logic_error("element term used as a set");
  }
}

bool Evaluator::uses_compiled(const Definition& d) {
  if (compiled_flag_.size() <= static_cast<std::size_t>(d.id)) compiled_flag_.resize(d.id + 1, -1);
  auto& f = compiled_flag_[d.id];
  if (f < 0) f = d.compiled && (opt_.all_compiled || opt_.compiled.count(d.name)) ? 1 : 0;
  return f == 1;
}

std::string Evaluator::describe(const Node& n) const {
  std::ostringstream os;
  if (n.op == Op::call) {
    os << n.def->name << '(';
    for (std::size_t i = 0; i < n.args.size(); ++i) {
      if (i) os << ", ";
      if (n.args[i].sort == Sort::element) {
        os << s_.name(elem(n.args[i]));
      } else {
        Mask m = set(n.args[i]);
        os << '{';
        bool first = true;
        for (int x = 0; x < s_.size(); ++x)
          if (m >> x & 1) os << (first ? "" : ",") << s_.name(x), first = false;
        os << '}';
      }
    }
    os << ')';
  } else {
    os << (n.op == Op::exists ? "exists " : "forall ") << n.var.name;
    if (n.has_domain) os << (n.var.sort == Sort::set ? " sub " : " in ") << n.domain.name;
  }
  return os.str();
}

void Evaluator::trace_line(const std::string& what, bool value) {
  *trace_ << std::string(2 * static_cast<std::size_t>(depth_), ' ') << what << " = " << (value ? "true" : "false")
          << '\n';
}

bool Evaluator::eval(const Node& n) {
  tick();
  switch (n.op) {
    case Op::top: return true;
    case Op::bottom: return false;
    case Op::not_: return !eval(*n.kids[0]);
    case Op::and_:
      for (auto& k : n.kids)
        if (!eval(*k)) return false;
      return true;
    case Op::or_:
      for (auto& k : n.kids)
        if (eval(*k)) return true;
      return false;
    case Op::implies: return !eval(*n.kids[0]) || eval(*n.kids[1]);
    case Op::iff: return eval(*n.kids[0]) == eval(*n.kids[1]);
    case Op::member: {
      int x = elem(n.a);
      if (n.b.kind == Term::Kind::var)
        for (auto it = probes_.rbegin(); it != probes_.rend(); ++it)
          if (it->var == n.b.var) {
            if (it->element != x) throw std::logic_error("probe consulted for another element");
            return it->value;
          }
      return set(n.b) >> x & 1;
    }
    case Op::eq: return elem(n.a) == elem(n.b);
    case Op::inc: return s_.incident(elem(n.a), elem(n.b));
    case Op::adj: return s_.adjacent(elem(n.a), elem(n.b));
    case Op::card: return std::popcount(set(n.a)) == n.value;
    case Op::call: return eval_call(n);
    case Op::exists:
    case Op::forall: break;
  }

  bool value;
  ++depth_;
  if (n.var.sort == Sort::set) {
    value = n.op == Op::exists ? eval_exists_set(n) : eval_forall_set(n);
  } else {
    Mask dom = n.has_domain ? set(n.domain) : s_.set(NamedSet::universe);
    Mask old = env_[n.var.id];
    bool want = n.op == Op::exists;
    value = !want;
    for (Mask m = dom; m; m &= m - 1) {
      env_[n.var.id] = static_cast<Mask>(std::countr_zero(m));
      if (eval(*n.kids[0]) == want) {
        value = want;
        break;
      }
    }
    env_[n.var.id] = old;
  }
  --depth_;
  if (trace_ && depth_ < trace_depth_) trace_line(describe(n), value);
  return value;
}

bool Evaluator::eval_forall_set(const Node& n) {
  Mask dom = n.has_domain ? set(n.domain) : s_.set(NamedSet::universe);
  Mask old = env_[n.var.id];
  bool value = true;
  for (Mask sub = 0;; sub = (sub - dom) & dom) {
    env_[n.var.id] = sub;
    if (!eval(*n.kids[0])) {
      value = false;
      break;
    }
    if (sub == dom) break;
  }
  env_[n.var.id] = old;
  return value;
}

bool Evaluator::eval_exists_set(const Node& n) {
  const int s = n.var.id;
  Mask dom = n.has_domain ? set(n.domain) : s_.set(NamedSet::universe);
  std::vector<Formula> single;
  const auto& cs = conjuncts_of(*n.kids[0], single, n.kids[0]);
  Mask forced = 0, forbidden = 0;
  std::vector<char> done(cs.size(), 0);

  for (std::size_t i = 0; i < cs.size() && i < n.rules.size(); ++i) {
    const Node& c = *cs[i];
    switch (n.rules[i]) {
      case Rule::none: break;
      case Rule::member:
        forced |= bit(elem(c.a));
        done[i] = 1;
        break;
      case Rule::non_member:
        forbidden |= bit(elem(c.kids[0]->a));
        done[i] = 1;
        break;
      case Rule::probe: {
        // ∀w ∈ D φ where S appears in φ only as "w ∈ S": each element's
        // membership is decided on its own.
        const int w = c.var.id;
        bool over_s = c.has_domain && is_var(c.domain, s);
        Mask cand = over_s ? dom : (c.has_domain ? set(c.domain) : s_.set(NamedSet::universe));
        Mask old_w = env_[w];
        for (Mask m = cand; m; m &= m - 1) {
          int x = std::countr_zero(m);
          env_[w] = static_cast<Mask>(x);
          probes_.push_back({s, x, true});
          bool in_ok = eval(*c.kids[0]);
          probes_.back().value = false;
          bool out_ok = over_s || eval(*c.kids[0]);
          probes_.pop_back();
          if (!in_ok && !out_ok) {
            env_[w] = old_w;
            return false;
          }
          if (!out_ok) forced |= bit(x);
          if (!in_ok) forbidden |= bit(x);
        }
        env_[w] = old_w;
        done[i] = 1;
        break;
      }
    }
  }
  if ((forced & ~dom) || (forced & forbidden)) return false;

  Mask free = dom & ~forced & ~forbidden;
  Mask old = env_[s];
  bool value = false;
  for (Mask sub = 0;; sub = (sub - free) & free) {
    env_[s] = forced | sub;
    bool ok = true;
    for (std::size_t i = 0; i < cs.size() && ok; ++i)
      if (!done[i]) ok = eval(*cs[i]);
    if (ok) {
      value = true;
      break;
    }
    if (sub == free) break;
  }
  env_[s] = old;
  return value;
}

bool Evaluator::eval_call(const Node& n) {
  std::vector<Mask> args(n.args.size());
  for (std::size_t i = 0; i < args.size(); ++i)
    args[i] = n.args[i].sort == Sort::element ? static_cast<Mask>(elem(n.args[i])) : set(n.args[i]);
  bool value;
  if (uses_compiled(*n.def)) {
    value = n.def->compiled(s_, args);
  } else {
    value = run_call(*n.def, args);
  }
  if (trace_ && depth_ < trace_depth_) trace_line(describe(n), value);
  return value;
}

bool Evaluator::run_call(const Definition& d, const std::vector<Mask>& args) {
  if (memo_.size() <= static_cast<std::size_t>(d.id)) memo_.resize(d.id + 1);
  auto& memo = memo_[d.id];
  if (auto it = memo.find(args); it != memo.end()) return it->second;
  std::vector<Mask> saved(d.params.size());
  for (std::size_t i = 0; i < args.size(); ++i) {
    saved[i] = env_[d.params[i].id];
    env_[d.params[i].id] = args[i];
  }
  auto probes = std::move(probes_);
  probes_.clear();
  ++depth_;
  bool value;
  try {
    value = eval(opt_.reorder ? *d.prepared : *d.prepared_in_order);
  } catch (...) {
    --depth_;
    probes_ = std::move(probes);
    throw;
  }
  --depth_;
  probes_ = std::move(probes);
  for (std::size_t i = 0; i < args.size(); ++i) env_[d.params[i].id] = saved[i];
  memo.emplace(args, value);
  return value;
}

}  // namespace phylomso::msol
