#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "stellar/cli.hpp"

using namespace stellar;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run_cli(std::vector<std::string> args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  int code = cli::run(std::move(args), in, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("stellar_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("gen is deterministic and well formed") {
  auto a = run_cli({"gen", "--n", "12", "--seed", "7"});
  auto b = run_cli({"gen", "--n", "12", "--seed", "7"});
  REQUIRE(a.code == 0);
  REQUIRE(a.out == b.out);
  std::istringstream in(a.out);
  Tournament t = io::read_tournament(in);
  REQUIRE(t.size() == 12);
  REQUIRE(t.check_invariants());

  auto c = run_cli({"gen", "--n", "12", "--seed", "8"});
  REQUIRE(a.out != c.out);
}

TEST_CASE("pipeline: gen, color, verify") {
  TempDir tmp;
  auto g = run_cli({"gen", "--n", "3", "--seed", "1", "--out", tmp.file("t.tour")});
  REQUIRE(g.code == 0);

  // c5 is not a constellation; the CLI still colors through the fallback
  // ladder so scripted pipelines stay total
  auto c = run_cli({"color", "--pattern", "c5", "--mode", "relaxed", tmp.file("t.tour"), "--out",
                    tmp.file("t.col")});
  REQUIRE(c.code == 0);
  REQUIRE(c.out.find("classes:") != std::string::npos);

  auto v = run_cli({"verify", tmp.file("t.tour"), tmp.file("t.col")});
  REQUIRE(v.code == 0);
  REQUIRE(v.out == "proper\n");

  // a constellation pattern drives the engine path
  auto c2 = run_cli({"color", "--pattern", "fig3", tmp.file("t.tour"), "--out", tmp.file("f.col")});
  REQUIRE(c2.code == 0);
  auto v2 = run_cli({"verify", tmp.file("t.tour"), tmp.file("f.col")});
  REQUIRE(v2.code == 0);

  // determinism across reruns
  auto c3 = run_cli({"color", "--pattern", "fig3", tmp.file("t.tour"), "--out", tmp.file("g.col")});
  REQUIRE(c3.code == 0);
  std::ifstream f1(tmp.file("f.col")), f2(tmp.file("g.col"));
  std::stringstream s1, s2;
  s1 << f1.rdbuf();
  s2 << f2.rdbuf();
  REQUIRE(s1.str() == s2.str());
}

TEST_CASE("verify rejects improper colorings") {
  TempDir tmp;
  {
    std::ofstream t(tmp.file("cyc.tour"));
    t << "3\n010\n001\n100\n";
    std::ofstream c(tmp.file("mono.col"));
    c << "0 1\n1 1\n2 1\n";
  }
  auto v = run_cli({"verify", tmp.file("cyc.tour"), tmp.file("mono.col")});
  REQUIRE(v.code == 1);
  REQUIRE(v.out == "improper\n");
}

TEST_CASE("recognize catalog patterns") {
  auto fig3 = run_cli({"recognize", "--pattern", "fig3"});
  REQUIRE(fig3.code == 0);
  REQUIRE(fig3.out.find("constellation: yes") != std::string::npos);
  REQUIRE(fig3.out.find("ordering: 0 1 2 3 4 5 6 7") != std::string::npos);
  REQUIRE(fig3.out.find("galaxy: yes") != std::string::npos);

  auto fig2 = run_cli({"recognize", "--pattern", "fig2"});
  REQUIRE(fig2.code == 0);
  REQUIRE(fig2.out.find("constellation: yes") != std::string::npos);
  REQUIRE(fig2.out.find("galaxy: no") != std::string::npos);

  auto c5 = run_cli({"recognize", "--pattern", "c5"});
  REQUIRE(c5.code == 0);
  REQUIRE(c5.out.find("constellation: no") != std::string::npos);

  // byte-identical reruns
  auto again = run_cli({"recognize", "--pattern", "fig3"});
  REQUIRE(again.out == fig3.out);
}

TEST_CASE("explicit ordering flags") {
  TempDir tmp;
  {
    std::ofstream f(tmp.file("t.tour"));
    io::write_tournament(random_tournament(30, 8), f);
    std::ofstream o(tmp.file("fig1.ord"));
    o << "0 1 2 3 4 5 6 7 8 9 10\n";
    std::ofstream p(tmp.file("fig1.tour"));
    io::write_tournament(pat::catalog("fig1").h, p);
  }
  // fig1 has 11 vertices, past the search cap; the file pattern only works
  // with an explicit ordering
  auto no_ord = run_cli({"recognize", "--pattern", tmp.file("fig1.tour")});
  REQUIRE(no_ord.code == 3);
  auto with_ord = run_cli({"recognize", "--pattern", tmp.file("fig1.tour"), "--ordering",
                           tmp.file("fig1.ord")});
  REQUIRE(with_ord.code == 0);
  REQUIRE(with_ord.out.find("constellation: yes") != std::string::npos);

  auto colored = run_cli({"color", "--pattern", tmp.file("fig1.tour"), "--ordering",
                          tmp.file("fig1.ord"), tmp.file("t.tour"), "--out", tmp.file("t.col")});
  REQUIRE(colored.code == 0);
  REQUIRE(run_cli({"verify", tmp.file("t.tour"), tmp.file("t.col")}).code == 0);

  auto ext = run_cli({"transitive", "--pattern", tmp.file("fig1.tour"), "--ordering",
                      tmp.file("fig1.ord"), tmp.file("t.tour")});
  REQUIRE(ext.code == 0);

  // malformed ordering file
  {
    std::ofstream o(tmp.file("short.ord"));
    o << "0 1 2\n";
  }
  auto bad = run_cli({"recognize", "--pattern", tmp.file("fig1.tour"), "--ordering",
                      tmp.file("short.ord")});
  REQUIRE(bad.code == 1);
}

TEST_CASE("recognize a pattern file with an ordering line") {
  TempDir tmp;
  {
    std::ofstream f(tmp.file("pat.tour"));
    auto p = pat::catalog("fig3");
    io::write_tournament(p.h, f);
    f << "0 1 2 3 4 5 6 7\n";
  }
  auto r = run_cli({"recognize", "--pattern", tmp.file("pat.tour")});
  REQUIRE(r.code == 0);
  REQUIRE(r.out.find("constellation: yes") != std::string::npos);
}

TEST_CASE("transitive extraction") {
  TempDir tmp;
  {
    std::ofstream f(tmp.file("c5.tour"));
    io::write_tournament(pat::catalog("c5").h, f);
  }
  auto r = run_cli({"transitive", "--oracle", tmp.file("c5.tour")});
  REQUIRE(r.code == 0);
  REQUIRE(r.out == "0 1 2\n");

  auto g = run_cli({"gen", "--n", "30", "--seed", "4", "--out", tmp.file("r.tour")});
  REQUIRE(g.code == 0);
  auto e = run_cli({"transitive", "--pattern", "fig3", tmp.file("r.tour")});
  REQUIRE(e.code == 0);
  std::istringstream vs(e.out);
  std::vector<std::size_t> verts;
  long long v;
  while (vs >> v) verts.push_back(static_cast<std::size_t>(v));
  REQUIRE(verts.size() >= 2);

  // over-budget oracle
  auto big = run_cli({"gen", "--n", "30", "--seed", "4", "--out", tmp.file("big.tour")});
  auto o = run_cli({"transitive", "--oracle", tmp.file("big.tour")});
  REQUIRE(o.code == 3);
}

TEST_CASE("verify-seq") {
  TempDir tmp;
  {
    std::ofstream f(tmp.file("t.tour"));
    io::write_tournament(Tournament::transitive(12), f);
    std::ofstream s(tmp.file("good.seq"));
    s << "m 3\nL 4 0 1 2 3\nT 4 4 5 6 7\nL 4 8 9 10 11\n";
    std::ofstream b(tmp.file("bad.seq"));
    b << "l 2\nL 4 0 1 2 3\nL 4 0 1 4 5\n";  // overlapping elements
  }
  auto ok = run_cli({"verify-seq", tmp.file("t.tour"), tmp.file("good.seq"), "--c", "1/3",
                     "--lambda", "0", "--epsilon", "1", "--smooth", "--strong", "1", "--M", "4"});
  REQUIRE(ok.code == 0);
  REQUIRE(ok.out.find("valid") != std::string::npos);

  auto bad = run_cli({"verify-seq", tmp.file("t.tour"), tmp.file("bad.seq"), "--c", "1/4",
                      "--lambda", "1/2"});
  REQUIRE(bad.code == 1);
  REQUIRE(bad.out.find("violation") != std::string::npos);
  REQUIRE(bad.out.find("invalid") != std::string::npos);
}

TEST_CASE("strict mode colors through the fallback ladder") {
  TempDir tmp;
  auto g = run_cli({"gen", "--n", "20", "--seed", "6", "--out", tmp.file("t.tour")});
  REQUIRE(g.code == 0);
  auto c = run_cli({"color", "--pattern", "fig3", "--mode", "strict", tmp.file("t.tour"), "--out",
                    tmp.file("t.col")});
  REQUIRE(c.code == 0);
  REQUIRE(run_cli({"verify", tmp.file("t.tour"), tmp.file("t.col")}).code == 0);
}

TEST_CASE("empty tournament round trip") {
  TempDir tmp;
  auto g = run_cli({"gen", "--n", "0", "--seed", "1", "--out", tmp.file("e.tour")});
  REQUIRE(g.code == 0);
  auto c = run_cli({"color", "--pattern", "fig3", tmp.file("e.tour"), "--out", tmp.file("e.col")});
  REQUIRE(c.code == 0);
  REQUIRE(c.out.find("classes: 0") != std::string::npos);
  REQUIRE(run_cli({"verify", tmp.file("e.tour"), tmp.file("e.col")}).code == 0);
}

TEST_CASE("usage errors") {
  auto r = run_cli({"frobnicate"});
  REQUIRE(r.code == 1);
  REQUIRE_FALSE(r.err.empty());

  auto r2 = run_cli({"gen"});
  REQUIRE(r2.code == 1);  // --n is required

  auto r3 = run_cli({"gen", "--n", "4", "--bogus-flag"});
  REQUIRE(r3.code == 1);

  auto help = run_cli({"--help"});
  REQUIRE(help.code == 0);
  REQUIRE(help.out.find("gen") != std::string::npos);
}

TEST_CASE("parse errors carry line numbers") {
  TempDir tmp;
  {
    std::ofstream f(tmp.file("broken.tour"));
    f << "3\n010\n00\n100\n";
  }
  auto r = run_cli({"verify", tmp.file("broken.tour"), tmp.file("broken.tour")});
  REQUIRE(r.code == 1);
  REQUIRE(r.err.find("line 3") != std::string::npos);
}

TEST_CASE("config file keys") {
  TempDir tmp;
  {
    std::ofstream f(tmp.file("cfg"));
    f << "mode=relaxed\nlambda=1/8\nk=1\nLambda=1/8\nepsilon=1/2\noracle_cap=12\nfallback=greedy\n";
    std::ofstream t(tmp.file("t.tour"));
    io::write_tournament(random_tournament(20, 9), t);
  }
  auto r = run_cli({"color", "--pattern", "fig3", "--config", tmp.file("cfg"), tmp.file("t.tour"),
                    "--out", tmp.file("out.col")});
  REQUIRE(r.code == 0);
  auto v = run_cli({"verify", tmp.file("t.tour"), tmp.file("out.col")});
  REQUIRE(v.code == 0);

  {
    std::ofstream f(tmp.file("badcfg"));
    f << "nonsense=1\n";
  }
  auto bad = run_cli({"color", "--pattern", "fig3", "--config", tmp.file("badcfg"), tmp.file("t.tour")});
  REQUIRE(bad.code == 1);
}

TEST_CASE("bench runs its stages") {
  auto r = run_cli({"bench", "--n", "24", "--seed", "2", "--pattern", "fig3"});
  REQUIRE(r.code == 0);
  REQUIRE(r.out.find("gen ok") != std::string::npos);
  REQUIRE(r.out.find("find-l-sequence") != std::string::npos);
  REQUIRE(r.out.find("color ok") != std::string::npos);
  REQUIRE(r.err.find("ms") != std::string::npos);

  // a small pattern lets the l-stage genuinely run
  auto r2 = run_cli({"bench", "--n", "64", "--seed", "2", "--pattern", "c5", "--k", "1"});
  REQUIRE(r2.code == 0);
  REQUIRE(r2.out.find("find-l-sequence ok") != std::string::npos);
}
