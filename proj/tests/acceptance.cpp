#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "phylomso/decomposition.hpp"
#include "phylomso/display_graph.hpp"
#include "phylomso/distances.hpp"
#include "phylomso/enumerate.hpp"
#include "phylomso/forests.hpp"
#include "phylomso/msol/checks.hpp"
#include "phylomso/tree.hpp"

using namespace phylomso;

namespace {

using Clock = std::chrono::steady_clock;
using Pair = std::pair<PhyloTree, PhyloTree>;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

unsigned thread_count() {
  if (const char* s = std::getenv("PHYLOMSO_THREADS")) return std::max(1, std::atoi(s));
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs f(0..n-1) on a pool; f must only touch its own slot.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f) {
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::min<std::size_t>(thread_count(), n); ++t)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < n;) f(i);
    });
  for (auto& th : pool) th.join();
}

// Counts failures; keeps the first few messages.
struct Tally {
  std::atomic<long> checks{0}, failures{0};
  std::mutex m;
  std::vector<std::string> notes;
  void check(bool ok, const std::string& what) {
    ++checks;
    if (ok) return;
    ++failures;
    std::lock_guard lock(m);
    if (notes.size() < 5) notes.push_back(what);
  }
};

std::vector<Pair> all_pairs(const std::vector<PhyloTree>& trees) {
  std::vector<Pair> out;
  for (auto& a : trees)
    for (auto& b : trees) out.emplace_back(a, b);
  return out;
}

std::string show(const Pair& p) { return write_newick(p.first) + " " + write_newick(p.second); }

// Every display graph built anywhere in the suites goes through here.
std::atomic<long> displays_built{0}, count_violations{0};
std::mutex count_mutex;
std::string count_example;

DisplayGraph display(const PhyloTree& a, const PhyloTree& b) {
  auto d = DisplayGraph::build(a, b);
  int x = d.taxon_count() + (d.rho() >= 0 ? 1 : 0);
  ++displays_built;
  if (d.vertex_count() != 3 * x - 4 || d.edge_count() != 4 * x - 6) {
    ++count_violations;
    std::lock_guard lock(count_mutex);
    count_example = write_newick(a) + " " + write_newick(b);
  }
  return d;
}

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("%s %d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string summary(const Tally& t, double secs) {
  std::ostringstream s;
  s << t.checks << " checks, " << t.failures << " failures, " << static_cast<int>(secs * 1000) / 1000.0 << " s";
  for (auto& n : t.notes) s << "\n    " << n;
  return s.str();
}


void figure_instance() {
  auto t0 = Clock::now();
  auto a = parse_newick("((u,v),w,y);"), b = parse_newick("((u,w),v,y);");
  int forest = umaf(a, b).size();
  int tbr = d_tbr(a, b).value;
  display(a, b);
  double s = seconds_since(t0);
  std::ostringstream o;
  o << "umaf " << forest << ", d_tbr " << tbr << ", " << s << " s";
  report(1, forest == 2 && tbr == 1 && s < 1.0, o.str());
}

void width_bound() {
  auto t0 = Clock::now();
  std::vector<Pair> pairs;
  for (int n : {4, 5}) {
    auto p = all_pairs(all_unrooted_trees(letter_taxa(n)));
    pairs.insert(pairs.end(), p.begin(), p.end());
  }
  std::mt19937_64 rng(20240611);
  for (int n : {6, 7}) {
    auto taxa = letter_taxa(n);
    for (int i = 0; i < 100; ++i) {
      auto a = random_unrooted_tree(taxa, rng);
      pairs.emplace_back(a, random_unrooted_tree(taxa, rng));
    }
  }
  Tally t;
  parallel_for(pairs.size(), [&](std::size_t i) {
    auto& [a, b] = pairs[i];
    auto d = display(a, b);
    auto forest = umaf(a, b);
    auto td = decomposition_from_forest(d, forest);
    auto g = d.graph();
    auto v = validate(td, g);
    t.check(!v, show(pairs[i]) + ": " + v.message);
    t.check(td.width() <= forest.size() + 1, show(pairs[i]) + ": width " + std::to_string(td.width()));
    int tw = exact_treewidth(g).width;
    t.check(tw <= forest.size() + 1, show(pairs[i]) + ": treewidth " + std::to_string(tw));
  });
  double s = seconds_since(t0);
  report(2, t.failures == 0 && s < 300, std::to_string(pairs.size()) + " pairs, " + summary(t, s));
}

void tightness() {
  auto a = parse_newick("((u,v),w,x);"), b = parse_newick("((u,x),v,w);");
  int tw = exact_treewidth(display(a, b).graph()).width;
  int forest = umaf(a, b).size();
  report(3, tw == 3 && forest == 2, "treewidth " + std::to_string(tw) + ", umaf " + std::to_string(forest));
}

// Pairs shared by the TBR oracle check and the d2mp bound.
std::vector<Pair> tbr_pairs() {
  auto pairs = all_pairs(all_unrooted_trees(letter_taxa(5)));
  std::mt19937_64 rng(7);
  auto taxa = letter_taxa(6);
  for (int i = 0; i < 50; ++i) {
    auto a = random_unrooted_tree(taxa, rng);
    pairs.emplace_back(a, random_unrooted_tree(taxa, rng));
  }
  return pairs;
}

void tbr_oracle(const std::vector<Pair>& pairs, std::vector<int>& tbr) {
  auto t0 = Clock::now();
  Tally t;
  tbr.assign(pairs.size(), 0);
  parallel_for(pairs.size(), [&](std::size_t i) {
    auto& [a, b] = pairs[i];
    display(a, b);
    tbr[i] = d_tbr(a, b).value;
    int bfs = tbr_move_bfs(a, b);
    t.check(tbr[i] == bfs, show(pairs[i]) + ": d_tbr " + std::to_string(tbr[i]) + " bfs " + std::to_string(bfs));
  });
  report(4, t.failures == 0, std::to_string(pairs.size()) + " pairs, " + summary(t, seconds_since(t0)));
}

std::vector<Pair> rooted_pairs(int max_n) {
  std::vector<Pair> pairs;
  for (int n = 2; n <= max_n; ++n) {
    auto p = all_pairs(all_rooted_trees(letter_taxa(n)));
    pairs.insert(pairs.end(), p.begin(), p.end());
  }
  return pairs;
}

void rspr_oracle() {
  auto t0 = Clock::now();
  auto pairs = rooted_pairs(5);
  Tally t;
  parallel_for(pairs.size(), [&](std::size_t i) {
    auto& [a, b] = pairs[i];
    display(a, b);
    int d = d_rspr(a, b).value, bfs = rspr_move_bfs(a, b);
    t.check(d == bfs, show(pairs[i]) + ": d_rspr " + std::to_string(d) + " bfs " + std::to_string(bfs));
  });
  report(5, t.failures == 0, std::to_string(pairs.size()) + " pairs, " + summary(t, seconds_since(t0)));
}

void hybridization_dual() {
  auto t0 = Clock::now();
  auto pairs = rooted_pairs(5);
  Tally t;
  parallel_for(pairs.size(), [&](std::size_t i) {
    auto& [a, b] = pairs[i];
    display(a, b);
    int forest = maaf(a, b).size() - 1, seq = min_tree_sequence(a, b).length();
    t.check(forest == seq, show(pairs[i]) + ": maaf-1 " + std::to_string(forest) + " sequence " + std::to_string(seq));
  });
  report(6, t.failures == 0, std::to_string(pairs.size()) + " pairs, " + summary(t, seconds_since(t0)));
}

void fitch_rootings() {
  auto t0 = Clock::now();
  std::vector<PhyloTree> trees;
  for (int n = 3; n <= 6; ++n) {
    auto t = all_unrooted_trees(letter_taxa(n));
    trees.insert(trees.end(), t.begin(), t.end());
  }
  Tally t;
  parallel_for(trees.size(), [&](std::size_t i) {
    auto& tree = trees[i];
    for (auto& f : all_characters(tree.taxa())) {
      int brute = fitch_bruteforce(tree, f);
      t.check(fitch_score(tree, f).score == brute, write_newick(tree) + " " + character_json(f));
      for (int e = 0; e < tree.edge_count(); ++e)
        t.check(fitch_score(tree, f, e).score == brute,
                write_newick(tree) + " " + character_json(f) + " edge " + std::to_string(e));
    }
  });
  report(7, t.failures == 0, std::to_string(trees.size()) + " trees, " + summary(t, seconds_since(t0)));
}

void parsimony_bound(const std::vector<Pair>& pairs, const std::vector<int>& tbr) {
  auto t0 = Clock::now();
  Tally t;
  parallel_for(pairs.size(), [&](std::size_t i) {
    int v = d2mp(pairs[i].first, pairs[i].second).value;
    t.check(v <= tbr[i], show(pairs[i]) + ": d2mp " + std::to_string(v) + " d_tbr " + std::to_string(tbr[i]));
  });
  std::vector<PhyloTree> same;
  for (int n = 3; n <= 6; ++n) {
    auto ts = all_unrooted_trees(letter_taxa(n));
    same.insert(same.end(), ts.begin(), ts.end());
  }
  parallel_for(same.size(), [&](std::size_t i) {
    t.check(d2mp(same[i], same[i]).value == 0, write_newick(same[i]) + " with itself");
  });
  report(8, t.failures == 0, summary(t, seconds_since(t0)));
}

void msol_equivalence() {
  auto t0 = Clock::now();
  Tally t;
  std::ostringstream parts;

  // (a) run the slowest predicates first so the pool drains evenly
  auto names = msol::validated_predicates();
  std::vector<msol::ValidationReport> reports(names.size());
  parallel_for(names.size(), [&](std::size_t i) {
    msol::ValidationScope scope;
    scope.max_taxa = 4;
    scope.small_graphs = true;
    reports[i] = msol::validate_predicate(names[i], scope);
  });
  std::uint64_t tuples = 0, mismatches = 0;
  for (auto& r : reports) {
    tuples += r.tuples;
    mismatches += r.mismatches;
    t.check(r.mismatches == 0 && r.tuples > 0, r.predicate + ": " + std::to_string(r.mismatches) + " mismatches");
  }
  parts << "(a) " << names.size() << " predicates, " << tuples << " tuples, " << mismatches << " mismatches, "
        << seconds_since(t0) << " s";

  // (b)
  auto t1 = Clock::now();
  auto unrooted4 = all_pairs(all_unrooted_trees(letter_taxa(4)));
  parallel_for(unrooted4.size(), [&](std::size_t i) {
    auto& [a, b] = unrooted4[i];
    int size = umaf(a, b).size();
    for (int k = 1; k <= 3; ++k)
      t.check(msol::check_umaf_formula(a, b, k) == (size <= k), show(unrooted4[i]) + ": umaf k=" + std::to_string(k));
  });
  parts << "; (b) " << unrooted4.size() << " pairs, " << seconds_since(t1) << " s";

  // (c)
  auto t2 = Clock::now();
  auto rooted = rooted_pairs(4);
  parallel_for(rooted.size(), [&](std::size_t i) {
    auto& [a, b] = rooted[i];
    int h = hyb_number(a, b).value;
    for (int k = 1; k <= 3; ++k)
      t.check(msol::check_hybnum_formula(a, b, k) == (h <= k), show(rooted[i]) + ": hybnum k=" + std::to_string(k));
  });
  parts << "; (c) " << rooted.size() << " pairs, " << seconds_since(t2) << " s";

  // (d)
  auto t3 = Clock::now();
  auto unrooted = all_pairs(all_unrooted_trees(letter_taxa(3)));
  unrooted.insert(unrooted.end(), unrooted4.begin(), unrooted4.end());
  parallel_for(unrooted.size(), [&](std::size_t i) {
    auto& [a, b] = unrooted[i];
    int mso = msol::fitch_mso_optimum(a, b).value, direct = d2mp_directional(a, b).value;
    t.check(mso == direct, show(unrooted[i]) + ": mso " + std::to_string(mso) + " direct " + std::to_string(direct));
  });
  parts << "; (d) " << unrooted.size() << " pairs, " << seconds_since(t3) << " s";

  double s = seconds_since(t0);
  report(10, t.failures == 0 && s < 1800, parts.str() + "\n  " + summary(t, s));
}

}  // namespace

int main() {
  auto t0 = Clock::now();
  figure_instance();
  width_bound();
  tightness();
  auto pairs = tbr_pairs();
  std::vector<int> tbr;
  tbr_oracle(pairs, tbr);
  rspr_oracle();
  hybridization_dual();
  fitch_rootings();
  parsimony_bound(pairs, tbr);
  // every suite above builds its display graphs through display()
  std::string nine = std::to_string(displays_built.load()) + " display graphs, " +
                     std::to_string(count_violations.load()) + " violations";
  if (count_violations) nine += " e.g. " + count_example;
  report(9, count_violations == 0 && displays_built > 0, nine);
  msol_equivalence();
  std::printf("%d failed, %.1f s total\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
