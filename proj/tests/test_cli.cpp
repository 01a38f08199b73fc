#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  std::string cmd = env + (env.empty() ? "" : " ") + PHYLOMSO_CLI + std::string(" ") + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) r.out.append(buf, n);
  int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string file(const std::string& name, const std::string& text) {
  auto dir = fs::temp_directory_path() / "phylomso_cli_test";
  fs::create_directories(dir);
  auto path = dir / name;
  std::ofstream(path) << text;
  return path.string();
}

std::string without_timing(std::string s) { return std::regex_replace(s, std::regex("\"elapsed_ms\":[0-9.e+-]+,?"), ""); }

const std::string fig_a = file("fig_a.nwk", "((u,v),w,y);\n");
const std::string fig_b = file("fig_b.nwk", "((u,w),v,y);\n");

}  // namespace

TEST_CASE("dist on the figure pair") {
  auto r = run("dist --measure tbr " + fig_a + " " + fig_b + " --json");
  REQUIRE(r.status == 0);
  auto j = json::parse(r.out);
  CHECK(j["value"] == 1);
  CHECK(j["forest_size"] == 2);
  CHECK(j.contains("elapsed_ms"));
  auto text = run("dist --measure tbr --dual-certify " + fig_a + " " + fig_b);
  CHECK(text.status == 0);
  CHECK(text.out.find("tbr 1") == 0);
}

TEST_CASE("dist with other measures") {
  auto t1 = file("r1.nwk", "((a,b),(c,d));\n");
  auto hn = run("dist --measure hn --json --dual-certify " + t1 + " " + t1);
  REQUIRE(hn.status == 0);
  CHECK(json::parse(hn.out)["value"] == 0);
  auto pair = file("r2.nwk", "((a,b),(c,d));\n(((a,c),b),d);\n");
  auto rspr = run("dist --measure rspr --dual-certify --json " + pair);
  REQUIRE(rspr.status == 0);
  auto hn2 = run("dist --measure hn --dual-certify --json " + pair);
  REQUIRE(hn2.status == 0);
  CHECK(json::parse(hn2.out)["value"] >= json::parse(rspr.out)["value"]);

  auto six = file("six.nwk", "(((a,b),c),(d,e),f);\n((a,(d,f)),(b,e),c);\n");
  auto mp = run("dist --measure mp2 --dual-certify --json " + six);
  auto tbr = run("dist --measure tbr --json " + six);
  REQUIRE(mp.status == 0);
  REQUIRE(tbr.status == 0);
  CHECK(json::parse(mp.out)["value"] <= json::parse(tbr.out)["value"]);
}

TEST_CASE("output is deterministic apart from timing") {
  std::string args = "dist --measure mp2 --json " + fig_a + " " + fig_b;
  auto a = run(args), b = run(args, "PHYLOMSO_THREADS=1");
  CHECK(without_timing(a.out) == without_timing(b.out));
  auto s1 = run("msol --suite fitch --max-taxa 4 --json"), s2 = run("msol --suite fitch --max-taxa 4 --json",
                                                                      "PHYLOMSO_THREADS=1");
  CHECK(s1.status == 0);
  CHECK(without_timing(s1.out) == without_timing(s2.out));
}

TEST_CASE("display graph formats") {
  auto gr = run("display --gr " + fig_a + " " + fig_b);
  REQUIRE(gr.status == 0);
  CHECK(gr.out.find("p tw 8 10") != std::string::npos);
  auto dot = run("display --dot " + fig_a + " " + fig_b);
  CHECK(dot.out.find("graph") != std::string::npos);
  auto js = run("display --json " + fig_a + " " + fig_b);
  CHECK(json::parse(js.out)["universe"] == 18);
  auto path = (fs::temp_directory_path() / "phylomso_cli_test" / "out.gr").string();
  CHECK(run("display -o " + path + " " + fig_a + " " + fig_b).status == 0);
  std::ifstream in(path);
  std::string first;
  std::getline(in, first);
  while (first.rfind("c", 0) == 0) std::getline(in, first);
  CHECK(first == "p tw 8 10");
}

TEST_CASE("decompositions from forests and their validation") {
  auto r = run("td --from-forest --json --exact " + fig_a + " " + fig_b);
  REQUIRE(r.status == 0);
  auto j = json::parse(r.out);
  CHECK(j["width"].get<int>() <= 3);
  CHECK(j["bound"] == 3);
  CHECK(j["exact_treewidth"] <= 3);
  auto gr = file("fig.gr", run("display --gr " + fig_a + " " + fig_b).out);
  auto td = file("fig.td", j["td"].get<std::string>());
  CHECK(run("td --validate " + gr + " " + td).status == 0);
  // one bag holding everything is valid, one bag per vertex is not
  auto whole = file("whole.td", "s td 1 8 8\nb 1 1 2 3 4 5 6 7 8\n");
  CHECK(run("td --validate " + gr + " " + whole).out.find("valid width 7") == 0);
  std::string lone = "s td 8 1 8\n";
  for (int i = 1; i <= 8; ++i) lone += "b " + std::to_string(i) + " " + std::to_string(i) + "\n";
  for (int i = 1; i < 8; ++i) lone += std::to_string(i) + " " + std::to_string(i + 1) + "\n";
  CHECK(run("td --validate " + gr + " " + file("lone.td", lone)).status == 3);
}

TEST_CASE("msol modes") {
  auto r = run("msol --suite predicates --max-taxa 3 --graph-vertices 4");
  REQUIRE(r.status == 0);
  CHECK(r.out.find("\n0 mismatches") != std::string::npos);
  auto child = run("msol --suite predicates --predicate child --max-taxa 4 --json");
  REQUIRE(child.status == 0);
  CHECK(json::parse(child.out)["mismatches"] == 0);
  auto umaf = run("msol --suite umaf --max-taxa 4");
  CHECK(std::regex_search(umaf.out, std::regex("^umaf: [0-9]+ cases, 0 mismatches\n0 mismatches")));

  auto ins = run("msol --inspect PAC");
  CHECK(ins.out.find("PAC(") == 0);
  CHECK(run("msol --inspect HybNum --k 2").out.find("HybNum[2]") == 0);
  CHECK(run("msol --inspect CPS[1]").status == 0);
  auto tr = run("msol --trace Quartet^1 --args u,v,w,y --depth 1 " + fig_a + " " + fig_b);
  REQUIRE(tr.status == 0);
  CHECK(tr.out.find("Quartet^1 = true") != std::string::npos);
  auto tr2 = run("msol --trace PAC --args u+v+w,u,w,{} --compiled " + fig_a + " " + fig_b);
  CHECK(tr2.status == 0);
  auto st = run("msol --structure " + fig_a + " " + fig_b);
  CHECK(json::parse(st.out)["universe"] == 18);
}

TEST_CASE("exit statuses") {
  auto bad = file("bad.nwk", "((a,b),c\n");
  CHECK(run("dist --measure tbr " + bad + " " + fig_a).status == 2);
  auto other = file("other.nwk", "((a,b),c,d);\n");
  CHECK(run("dist --measure tbr " + fig_a + " " + other).status == 2);
  CHECK(run("dist --measure tbr " + fig_a).status == 2);
  CHECK(run("dist " + fig_a + " " + fig_b).status == 2);
  CHECK(run("dist --measure rspr " + fig_a + " " + fig_b).status == 2);
  CHECK(run("msol --suite umaf --max-taxa 5").status == 2);
  CHECK(run("msol --trace Nope --args a " + fig_a + " " + fig_b).status == 2);
  CHECK(run("").status == 2);
  CHECK(run("--help").status == 0);
}
