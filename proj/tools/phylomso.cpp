#include <chrono>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "phylomso/decomposition.hpp"
#include "phylomso/display_graph.hpp"
#include "phylomso/distances.hpp"
#include "phylomso/enumerate.hpp"
#include "phylomso/forests.hpp"
#include "phylomso/msol/checks.hpp"
#include "phylomso/msol/library.hpp"

using namespace phylomso;
using json = nlohmann::json;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitCertify = 3;

// Validation or certification failure, reported with exit status 3.
struct Disagreement : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// One file with two trees, or two files with one tree each.
std::pair<PhyloTree, PhyloTree> read_pair(const std::vector<std::string>& paths) {
  std::vector<PhyloTree> trees;
  for (const auto& p : paths)
    for (auto& t : parse_newick_lines(slurp(p))) trees.push_back(std::move(t));
  if (trees.size() != 2) throw InputError("expected two trees, got " + std::to_string(trees.size()));
  require_same_taxa(trees[0], trees[1]);
  if (trees[0].kind() != trees[1].kind()) throw InputError("trees mix rooted and unrooted");
  return {trees[0], trees[1]};
}

int thread_count() {
  if (const char* env = std::getenv("PHYLOMSO_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw InputError("cannot write " + path);
    }
  }
  std::ostream& out() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

struct DistArgs {
  std::string measure;
  std::vector<std::string> inputs;
  bool json = false, dual = false, emit_forest = false;
  std::string out;
};

int cmd_dist(const DistArgs& a) {
  auto t0 = std::chrono::steady_clock::now();
  auto [t1, t2] = read_pair(a.inputs);
  json j;
  j["measure"] = a.measure;
  std::string text;
  if (a.measure == "tbr") {
    if (t1.rooted()) throw InputError("tbr needs unrooted trees");
    auto r = d_tbr(t1, t2);
    j["value"] = r.value;
    j["forest_size"] = r.forest.size();
    j["forest"] = json::parse(forest_json(r.forest));
    if (a.dual) {
      int bfs = tbr_move_bfs(t1, t2);
      j["certificate"] = {{"tbr_move_bfs", bfs}, {"agree", bfs == r.value}};
      if (bfs != r.value) throw Disagreement("tbr: forest gives " + std::to_string(r.value) + ", move search " +
                                             std::to_string(bfs));
    }
    text = "tbr " + std::to_string(r.value) + " (forest of " + std::to_string(r.forest.size()) + ")";
  } else if (a.measure == "rspr") {
    if (!t1.rooted()) throw InputError("rspr needs rooted trees");
    auto r = d_rspr(t1, t2);
    j["value"] = r.value;
    j["forest_size"] = r.forest.size();
    j["forest"] = json::parse(forest_json(r.forest));
    if (a.dual) {
      int bfs = rspr_move_bfs(t1, t2);
      j["certificate"] = {{"rspr_move_bfs", bfs}, {"agree", bfs == r.value}};
      if (bfs != r.value) throw Disagreement("rspr: forest gives " + std::to_string(r.value) + ", move search " +
                                             std::to_string(bfs));
    }
    text = "rspr " + std::to_string(r.value) + " (forest of " + std::to_string(r.forest.size()) + ")";
  } else if (a.measure == "hn") {
    if (!t1.rooted()) throw InputError("hn needs rooted trees");
    HybridizationResult r;
    try {
      r = hyb_number(t1, t2, a.dual);
    } catch (const CertificationError& e) {
      throw Disagreement(e.what());
    }
    j["value"] = r.value;
    j["forest_size"] = r.forest.size();
    j["forest"] = json::parse(forest_json(r.forest));
    if (r.sequence) j["certificate"] = {{"tree_sequence", json::parse(sequence_json(*r.sequence))}, {"agree", true}};
    text = "hn " + std::to_string(r.value);
  } else if (a.measure == "mp2") {
    if (t1.rooted()) throw InputError("mp2 needs unrooted trees");
    auto r = d2mp(t1, t2);
    j["value"] = r.value;
    j["witness"] = json::parse(character_json(r.witness));
    j["scores"] = {r.score1, r.score2};
    if (a.dual) {
      int b1 = fitch_bruteforce(t1, r.witness), b2 = fitch_bruteforce(t2, r.witness);
      int tbr = d_tbr(t1, t2).value;
      bool ok = b1 == r.score1 && b2 == r.score2 && r.value <= tbr;
      j["certificate"] = {{"brute_scores", {b1, b2}}, {"tbr", tbr}, {"agree", ok}};
      if (!ok) throw Disagreement("mp2 certification failed");
    }
    text = "mp2 " + std::to_string(r.value) + " (scores " + std::to_string(r.score1) + ", " +
           std::to_string(r.score2) + ")";
  } else {
    throw InputError("unknown measure " + a.measure);
  }
  Output o(a.out);
  if (a.json) {
    j["elapsed_ms"] = ms_since(t0);
    o.out() << j.dump() << '\n';
  } else {
    o.out() << text << '\n';
    if (a.emit_forest && j.contains("forest")) o.out() << j["forest"].dump() << '\n';
  }
  return 0;
}

// Runs f(0..n-1) on the configured number of threads; results keep index order.
template <class F>
auto parallel_map(std::size_t n, F f) -> std::vector<decltype(f(std::size_t{}))> {
  using R = decltype(f(std::size_t{}));
  std::vector<R> out(n);
  std::atomic<std::size_t> next{0};
  std::vector<std::future<void>> workers;
  std::exception_ptr failure;
  std::mutex mu;
  int threads = std::min<int>(thread_count(), static_cast<int>(std::max<std::size_t>(n, 1)));
  for (int w = 0; w < threads; ++w)
    workers.push_back(std::async(std::launch::async, [&] {
      for (std::size_t i; (i = next++) < n;) {
        try {
          out[i] = f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!failure) failure = std::current_exception();
        }
      }
    }));
  for (auto& w : workers) w.get();
  if (failure) std::rethrow_exception(failure);
  return out;
}

// ---------------------------------------------------------------------------

struct DisplayArgs {
  std::vector<std::string> inputs;
  std::string format = "gr";
  bool subdivide = false;
  std::string out;
};

int cmd_display(const DisplayArgs& a) {
  auto [t1, t2] = read_pair(a.inputs);
  auto d = DisplayGraph::build(t1, t2, a.subdivide ? RootHandling::subdivide : RootHandling::pendant);
  Output o(a.out);
  if (a.format == "dot") {
    o.out() << emit_dot(d);
  } else if (a.format == "json") {
    o.out() << msol::Structure::from_display(d).json() << '\n';
  } else {
    o.out() << emit_gr(d);
  }
  return 0;
}

struct TdArgs {
  std::vector<std::string> inputs;
  bool from_forest = false, validate_only = false, exact = false, json = false;
  std::string out;
};

int cmd_td(const TdArgs& a) {
  auto t0 = std::chrono::steady_clock::now();
  Output o(a.out);
  if (a.validate_only) {
    if (a.inputs.size() != 2) throw InputError("--validate takes a .gr file and a .td file");
    Graph g = parse_gr(slurp(a.inputs[0]));
    int n = 0;
    auto td = parse_td(slurp(a.inputs[1]), &n);
    if (n != g.n) throw InputError(".td vertex count differs from the graph");
    auto v = validate(td, g);
    if (a.json) {
      json j{{"valid", !v}, {"width", td.width()}, {"message", v.message}, {"elapsed_ms", ms_since(t0)}};
      o.out() << j.dump() << '\n';
    } else {
      o.out() << (v ? "invalid: " + v.message : "valid width " + std::to_string(td.width())) << '\n';
    }
    return v ? kExitCertify : 0;
  }
  if (!a.from_forest) throw InputError("td needs --from-forest or --validate");
  auto [t1, t2] = read_pair(a.inputs);
  if (t1.rooted()) throw InputError("--from-forest needs unrooted trees");
  auto forest = umaf(t1, t2);
  auto d = DisplayGraph::build(t1, t2);
  auto td = decomposition_from_forest(d, forest);
  Graph g = d.graph();
  auto v = validate(td, g);
  int bound = forest.size() + 1;
  json j{{"forest_size", forest.size()}, {"width", td.width()}, {"bound", bound}, {"valid", !v}};
  if (a.exact) j["exact_treewidth"] = exact_treewidth(g).width;
  bool ok = !v && td.width() <= bound && (!a.exact || j["exact_treewidth"].get<int>() <= bound);
  if (a.json) {
    j["td"] = emit_td(td, g.n);
    j["elapsed_ms"] = ms_since(t0);
    o.out() << j.dump() << '\n';
  } else {
    o.out() << "c forest size " << forest.size() << ", width " << td.width() << ", bound " << bound << '\n'
            << emit_td(td, g.n);
  }
  if (v) throw Disagreement("decomposition invalid: " + v.message);
  if (!ok) throw Disagreement("width exceeds the forest bound");
  return 0;
}

}  // namespace

namespace {

struct MsolArgs {
  std::string suite, inspect, trace, predicate;
  std::vector<std::string> inputs, call_args;
  bool structure = false, compiled = false, json = false;
  int max_taxa = msol::kGenericMaxTaxa, size_guard = msol::kGenericMaxTaxa, graph_vertices = 6, k = 1, depth = 2;
  std::string out;
};

struct SuiteLine {
  std::string name;
  std::uint64_t cases = 0, mismatches = 0;
  json detail;
};

std::vector<std::pair<PhyloTree, PhyloTree>> all_pairs(bool rooted, int lo, int hi) {
  std::vector<std::pair<PhyloTree, PhyloTree>> out;
  for (int n = lo; n <= hi; ++n) {
    auto taxa = letter_taxa(n);
    auto trees = rooted ? all_rooted_trees(taxa) : all_unrooted_trees(taxa);
    for (auto& a : trees)
      for (auto& b : trees) out.emplace_back(a, b);
  }
  return out;
}

std::vector<SuiteLine> run_suite(const MsolArgs& a) {
  msol::EvalOptions opt;
  opt.all_compiled = a.compiled;
  std::vector<SuiteLine> lines;
  if (a.suite == "predicates") {
    std::vector<std::string> names = a.predicate.empty() ? msol::validated_predicates()
                                                         : std::vector<std::string>{a.predicate};
    msol::ValidationScope scope;
    scope.max_taxa = a.max_taxa;
    scope.small_graphs = a.graph_vertices > 0;
    scope.graph_vertices = a.graph_vertices;
    auto reps = parallel_map(names.size(), [&](std::size_t i) { return msol::validate_predicate(names[i], scope); });
    for (auto& r : reps) lines.push_back({r.predicate, r.tuples, r.mismatches, json::parse(r.json())});
    return lines;
  }
  // formula suites: one line per pair, folded into one summary line
  struct Case {
    std::uint64_t cases = 0, bad = 0;
    std::string first_bad;
  };
  std::vector<std::pair<PhyloTree, PhyloTree>> pairs;
  std::function<Case(const PhyloTree&, const PhyloTree&)> run;
  auto label = [](const PhyloTree& x, const PhyloTree& y, int k) {
    return write_newick(x) + " " + write_newick(y) + (k >= 0 ? " k=" + std::to_string(k) : "");
  };
  if (a.suite == "umaf") {
    pairs = all_pairs(false, 3, a.max_taxa);
    run = [&](const PhyloTree& x, const PhyloTree& y) {
      Case c;
      int m = umaf(x, y).size();
      for (int k = 1; k <= 3; ++k, ++c.cases)
        if (msol::check_umaf_formula(x, y, k, opt, a.size_guard) != (m <= k) && !c.bad++) c.first_bad = label(x, y, k);
      return c;
    };
  } else if (a.suite == "rspr") {
    pairs = all_pairs(true, 2, a.max_taxa);
    run = [&](const PhyloTree& x, const PhyloTree& y) {
      Case c;
      int m = maf_rooted(x, y).size();
      for (int k = 1; k <= 3; ++k, ++c.cases)
        if (msol::check_rspr_formula(x, y, k, opt, a.size_guard) != (m <= k) && !c.bad++) c.first_bad = label(x, y, k);
      return c;
    };
  } else if (a.suite == "hybnum") {
    pairs = all_pairs(true, 2, a.max_taxa);
    run = [&](const PhyloTree& x, const PhyloTree& y) {
      Case c;
      int h = hyb_number(x, y).value;
      for (int k = 0; k <= 3; ++k, ++c.cases)
        if (msol::check_hybnum_formula(x, y, k, opt, a.size_guard) != (h <= k) && !c.bad++)
          c.first_bad = label(x, y, k);
      return c;
    };
  } else if (a.suite == "fitch") {
    pairs = all_pairs(false, 3, a.max_taxa);
    run = [&](const PhyloTree& x, const PhyloTree& y) {
      Case c{1, 0, ""};
      if (msol::fitch_mso_optimum(x, y, opt, a.size_guard).value != d2mp_directional(x, y).value) {
        c.bad = 1;
        c.first_bad = label(x, y, -1);
      }
      return c;
    };
  } else {
    throw InputError("unknown suite " + a.suite);
  }
  auto results = parallel_map(pairs.size(), [&](std::size_t i) { return run(pairs[i].first, pairs[i].second); });
  SuiteLine line{a.suite, 0, 0, json::object()};
  json bad = json::array();
  for (auto& r : results) {
    line.cases += r.cases;
    line.mismatches += r.bad;
    if (r.bad && bad.size() < 8) bad.push_back(r.first_bad);
  }
  line.detail = {{"suite", a.suite}, {"pairs", pairs.size()}, {"cases", line.cases}, {"mismatches", line.mismatches},
                 {"examples", bad}};
  lines.push_back(line);
  return lines;
}

msol::DefPtr find_definition(const std::string& name, int k) {
  const auto& lib = msol::Library::get();
  // Clade^i[t] and CPS[t] name the prune-list macros
  auto open = name.find('[');
  if (open != std::string::npos) {
    int t = std::stoi(name.substr(open + 1));
    std::string base = name.substr(0, open);
    if (base == "CPS") return lib.cps_macro(t);
    if (base == "Clade^1" || base == "Clade^2") return lib.clade_macro(base.back() - '0', t);
  }
  (void)k;
  try {
    return lib.by_name(name);
  } catch (const std::out_of_range&) {
    throw InputError("unknown predicate " + name);
  }
}

int cmd_msol(const MsolArgs& a) {
  auto t0 = std::chrono::steady_clock::now();
  Output o(a.out);
  if (!a.suite.empty()) {
    if (a.max_taxa > a.size_guard)
      throw SizeGuardError("--max-taxa " + std::to_string(a.max_taxa) + " exceeds the size guard " +
                           std::to_string(a.size_guard) + "; raise it with --size-guard");
    auto lines = run_suite(a);
    std::uint64_t total = 0;
    for (auto& l : lines) total += l.mismatches;
    if (a.json) {
      json j{{"suite", a.suite}, {"max_taxa", a.max_taxa}, {"mismatches", total}, {"reports", json::array()}};
      for (auto& l : lines) j["reports"].push_back(l.detail);
      j["elapsed_ms"] = ms_since(t0);
      o.out() << j.dump() << '\n';
    } else {
      for (auto& l : lines) o.out() << l.name << ": " << l.cases << " cases, " << l.mismatches << " mismatches\n";
      o.out() << total << " mismatches\n";
    }
    if (total) throw Disagreement(std::to_string(total) + " mismatches");
    return 0;
  }
  if (!a.inspect.empty()) {
    if (a.inspect == "HybNum") {
      o.out() << "HybNum[" << a.k << "] := " << msol::to_string(msol::hybnum(a.k)) << '\n';
    } else if (a.inspect == "all") {
      for (auto& d : msol::Library::get().named()) o.out() << msol::to_string(*d) << '\n';
    } else {
      o.out() << msol::to_string(*find_definition(a.inspect, a.k)) << '\n';
    }
    return 0;
  }
  auto [t1, t2] = read_pair(a.inputs);
  auto d = DisplayGraph::build(t1, t2);
  auto s = msol::Structure::from_display(d);
  if (a.structure) {
    o.out() << s.json() << '\n';
    return 0;
  }
  if (!a.trace.empty()) {
    if (t1.leaf_count() > a.size_guard) throw SizeGuardError("structure exceeds the size guard");
    auto def = find_definition(a.trace, a.k);
    if (a.call_args.size() != def->params.size())
      throw InputError(def->name + " takes " + std::to_string(def->params.size()) + " arguments");
    std::vector<msol::Mask> vals;
    for (std::size_t i = 0; i < a.call_args.size(); ++i) {
      // element names, or sets written as a+b+c ({} for the empty set)
      msol::Mask m = 0;
      std::stringstream ss(a.call_args[i]);
      for (std::string part; std::getline(ss, part, '+');) {
        if (part.empty() || part == "{}") continue;
        int x = s.element(part);
        if (x < 0) throw InputError("no element named " + part);
        m |= def->params[i].sort == msol::Sort::element ? msol::Mask(x) : msol::bit(x);
      }
      vals.push_back(m);
    }
    msol::EvalOptions opt;
    opt.all_compiled = a.compiled;
    msol::Evaluator ev(s, opt);
    ev.trace_to(&o.out(), a.depth);
    bool v = ev.call(def, vals);
    o.out() << def->name << " = " << (v ? "true" : "false") << " (" << ev.steps() << " steps)\n";
    return 0;
  }
  throw InputError("msol needs --suite, --inspect, --trace or --structure");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phylogenetic incongruence measures, display-graph decompositions and MSO checks"};
  app.require_subcommand(1);
  std::string out;
  app.add_option("-o,--output", out, "write to this file instead of stdout");
  auto output_option = [&out](CLI::App* c) { c->add_option("-o,--output", out, "write to this file instead of stdout"); };

  DistArgs dist;
  auto* c_dist = app.add_subcommand("dist", "distance between two trees");
  output_option(c_dist);
  c_dist->add_option("--measure", dist.measure, "tbr, rspr, hn or mp2")->required()
      ->check(CLI::IsMember({"tbr", "rspr", "hn", "mp2"}));
  c_dist->add_option("inputs", dist.inputs, "Newick files")->required()->check(CLI::ExistingFile);
  c_dist->add_flag("--json", dist.json, "JSON record");
  c_dist->add_flag("--dual-certify", dist.dual, "check against the second characterisation");
  c_dist->add_flag("--emit-forest", dist.emit_forest, "include the agreement forest");

  DisplayArgs disp;
  auto* c_disp = app.add_subcommand("display", "display graph of two trees");
  output_option(c_disp);
  c_disp->add_option("inputs", disp.inputs, "Newick files")->required()->check(CLI::ExistingFile);
  auto* gr = c_disp->add_flag("--gr", "PACE .gr output (default)");
  auto* dot = c_disp->add_flag("--dot", "Graphviz output");
  auto* js = c_disp->add_flag("--json", "MSO structure as JSON");
  gr->excludes(dot)->excludes(js);
  dot->excludes(js);
  c_disp->add_flag("--subdivide", disp.subdivide, "root unrooted inputs at a shared subdividing vertex");

  TdArgs td;
  auto* c_td = app.add_subcommand("td", "tree decompositions");
  output_option(c_td);
  c_td->add_option("inputs", td.inputs, "Newick files, or a .gr and a .td with --validate")->required()->check(CLI::ExistingFile);
  c_td->add_flag("--from-forest", td.from_forest, "decomposition from a maximum agreement forest");
  c_td->add_flag("--validate", td.validate_only, "check a .td against a .gr");
  c_td->add_flag("--exact", td.exact, "also compute the exact treewidth");
  c_td->add_flag("--json", td.json, "JSON record");

  MsolArgs ms;
  auto* c_ms = app.add_subcommand("msol", "MSO formulation checks");
  output_option(c_ms);
  c_ms->add_option("--suite", ms.suite, "predicates, umaf, rspr, hybnum or fitch")
      ->check(CLI::IsMember({"predicates", "umaf", "rspr", "hybnum", "fitch"}));
  c_ms->add_option("--predicate", ms.predicate, "restrict the predicates suite");
  c_ms->add_option("--max-taxa", ms.max_taxa, "largest |X| swept by --suite")->check(CLI::Range(2, 8));
  c_ms->add_option("--size-guard", ms.size_guard, "largest |X| for generic evaluation")->check(CLI::Range(1, 8));
  c_ms->add_option("--graph-vertices", ms.graph_vertices, "PAC/path also on connected graphs up to this size")
      ->check(CLI::Range(0, 7));
  c_ms->add_flag("--compiled", ms.compiled, "answer library predicates by their direct procedures");
  c_ms->add_option("--inspect", ms.inspect, "print a definition (a name, HybNum or all)");
  c_ms->add_option("--trace", ms.trace, "evaluate a predicate with a trace");
  c_ms->add_option("--args", ms.call_args, "arguments for --trace")->delimiter(',');
  c_ms->add_option("--depth", ms.depth, "trace depth")->check(CLI::Range(0, 64));
  c_ms->add_option("--k", ms.k, "k' for HybNum")->check(CLI::Range(1, 16));
  c_ms->add_flag("--structure", ms.structure, "dump the structure as JSON");
  c_ms->add_flag("--json", ms.json, "JSON record");
  c_ms->add_option("inputs", ms.inputs, "Newick files for --trace and --structure")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*c_dist) return dist.out = out, cmd_dist(dist);
    if (*c_disp) {
      disp.out = out;
      disp.format = *dot ? "dot" : *js ? "json" : "gr";
      return cmd_display(disp);
    }
    if (*c_td) return td.out = out, cmd_td(td);
    if (*c_ms) return ms.out = out, cmd_msol(ms);
  } catch (const Disagreement& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCertify;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const msol::BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return 0;
}
