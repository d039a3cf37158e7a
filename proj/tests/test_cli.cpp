#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "eqdec/cli.hpp"

using namespace eqdec;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& f) { return std::string(EQDEC_DATA_DIR) + "/" + f; }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool has(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

class EnvGuard {
 public:
  ~EnvGuard() {
    unsetenv("EQDEC_SEED");
    unsetenv("EQDEC_OUT");
  }
};

}  // namespace

TEST(Cli, TransportExample) {
  auto r = run({"transport", "--u", "[1,1;0]", "--v", "[2;0]", "--bound", "4"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_TRUE(has(r.out, "[pass] marginals"));
  EXPECT_TRUE(has(r.out, "col 0: marginal 2, exact sum 2"));
}

TEST(Cli, EnumerateQuotientExample) {
  auto r = run({"top", "enumerate", "--max-points", "3", "--suite", "quotient"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(has(r.out, "pairs = 125"));
}

TEST(Cli, HornCancellationFails) {
  auto r = run({"horn", "check", "--file", data("axioms.horn"), "--algebra", "extreal"});
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(has(r.out, "[fail] cancel"));
  EXPECT_TRUE(has(r.out, "counterexample = a=0, b=1/3, c=inf"));
  EXPECT_TRUE(has(r.out, "[pass] comm"));
}

TEST(Cli, HornCatalogWithoutInvalidAxiomsPasses) {
  std::string valid;
  std::istringstream in(slurp(data("axioms.horn")));
  for (std::string line; std::getline(in, line);)
    if (!has(line, "invalid")) valid += line + "\n";
  const std::string path = testing::TempDir() + "valid.horn";
  std::ofstream(path) << valid;
  EXPECT_EQ(run({"horn", "check", "--file", path, "--trials", "100"}).code, 0);
  EXPECT_EQ(run({"horn", "check", "--file", path, "--algebra", "lelem", "--model", data("mixed.rel"), "--trials", "100"}).code, 0);
  EXPECT_EQ(run({"horn", "check", "--file", path, "--algebra", "kelem", "--trials", "100"}).code, 0);
}

TEST(Cli, JsonIsByteIdenticalForSameArgvAndSeed) {
  std::vector<std::string> args{"--format", "json", "--seed", "5", "horn", "check", "--file", data("axioms.horn"),
                                "--algebra", "lelem", "--trials", "60"};
  auto a = run(args), b = run(args);
  EXPECT_EQ(a.code, b.code);
  EXPECT_EQ(a.out, b.out);
  auto c = run({"--format", "json", "accept", "--only", "2,11", "--seed", "3"});
  auto d = run({"--format", "json", "accept", "--only", "2,11", "--seed", "3"});
  EXPECT_EQ(c.code, 0) << c.out;
  EXPECT_EQ(c.out, d.out);
}

TEST(Cli, JsonRoundTripsThroughTheReport) {
  for (auto args : std::vector<std::vector<std::string>>{
           {"--format", "json", "top", "tower", "--space", data("tower.space")},
           {"--format", "json", "top", "quotient", "--space", data("bad_saturation.space")},
           {"--format", "json", "measure", "extend", "--model", data("mixed.rel"), "--set", "s", "--window", "5"}}) {
    auto r = run(args);
    auto rep = RunReport::from_json(nlohmann::ordered_json::parse(r.out));
    EXPECT_EQ(rep.json_text(), r.out);
    EXPECT_EQ(rep.command, args);
    EXPECT_EQ(r.code, rep.ok() ? 0 : 1);
  }
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run({"transport", "--u", "[1;0]"}).code, kExitUsage);
  EXPECT_EQ(run({"top", "enumerate", "--max-points", "9"}).code, kExitUsage);
  EXPECT_EQ(run({"--format", "xml", "top", "enumerate"}).code, kExitUsage);
  EXPECT_EQ(run({"horn", "check", "--file", data("axioms.horn"), "--algebra", "reals"}).code, kExitUsage);
  EXPECT_EQ(run({"accept", "--only", "12"}).code, kExitUsage);
  EXPECT_EQ(run({"--help"}).code, kExitOk);
}

TEST(Cli, FileErrorsExitThree) {
  EXPECT_EQ(run({"kl", "meet", "--model", "no/such.rel", "a", "b"}).code, kExitInput);
  const std::string bad = testing::TempDir() + "bad.rel";
  std::ofstream(bad) << "class A size omega\nset x in Q: finite{1}\n";
  auto r = run({"kl", "chi", "--model", bad, "x"});
  EXPECT_EQ(r.code, kExitInput);
  EXPECT_TRUE(has(r.err, "model line 2")) << r.err;
  EXPECT_EQ(run({"kl", "meet", "--model", data("omega2.rel"), "evens", "nosuch"}).code, kExitInput);
  EXPECT_EQ(run({"transport", "--u", "[1,x]", "--v", "[1]"}).code, kExitInput);
  const std::string badhorn = testing::TempDir() + "bad.horn";
  std::ofstream(badhorn) << "comm: forall a b. a + = b\n";
  auto h = run({"horn", "check", "--file", badhorn});
  EXPECT_EQ(h.code, kExitInput);
  EXPECT_TRUE(has(h.err, "column")) << h.err;
  EXPECT_EQ(run({"top", "quotient", "--space", data("rotation.space"), "--stage", "4"}).code, kExitInput);
  EXPECT_EQ(run({"--out", "/no/such/dir/r.txt", "top", "enumerate", "--max-points", "1"}).code, kExitInput);
}

TEST(Cli, CheckFailuresExitOne) {
  auto s = run({"top", "quotient", "--space", data("bad_saturation.space")});
  EXPECT_EQ(s.code, 1);
  EXPECT_TRUE(has(s.out, "open = {a}"));
  auto b = run({"measure", "separate", "--model", data("omega2.rel"), "first3", "evens"});
  EXPECT_EQ(b.code, 1);
  EXPECT_TRUE(has(b.out, "AlreadyBelow"));
  EXPECT_EQ(run({"transport", "--u", "[1]", "--v", "[2]"}).code, 1);
  EXPECT_EQ(run({"kl", "divide", "--model", data("omega2.rel"), "first3", "--by", "2", "--in", "k"}).code, 1);
}

TEST(Cli, KlPrintsBothRoutes) {
  auto m = run({"kl", "meet", "--model", data("omega2.rel"), "evens", "first3"});
  EXPECT_EQ(m.code, 0);
  EXPECT_TRUE(has(m.out, "formula route: (3,1)"));
  EXPECT_TRUE(has(m.out, "pointwise route: (3,1)"));
  auto j = run({"kl", "join", "--model", data("mixed.rel"), "s", "h"});
  EXPECT_EQ(j.code, 0);
  EXPECT_TRUE(has(j.out, "four-way route: (7/2,inf)")) << j.out;
  auto d = run({"kl", "divide", "--model", data("omega2.rel"), "evens", "--by", "3"});
  EXPECT_EQ(d.code, 0);
  EXPECT_TRUE(has(d.out, "transversal 2: A=pattern[;(0,0,1)]")) << d.out;
  auto s = run({"kl", "sum", "--model", data("omega2.rel"), "first3", "--rep", "first3"});
  EXPECT_TRUE(has(s.out, "family route: (omega,omega)"));
  auto c = run({"kl", "chi", "--model", data("omega2.rel"), "first3"});
  EXPECT_TRUE(has(c.out, "chi route: (3,1)"));
}

TEST(Cli, MeasureCommands) {
  auto e = run({"measure", "eval", "--model", data("omega2.rel"), "--measure", "countA", "first3", "w"});
  EXPECT_EQ(e.code, 0);
  EXPECT_TRUE(has(e.out, "countA(first3) = 3"));
  EXPECT_TRUE(has(e.out, "countA(w) = 1/2"));
  auto x = run({"measure", "extend", "--model", data("omega2.rel"), "--set", "evens", "--trunc", "8", "--window", "6"});
  EXPECT_EQ(x.code, 0);
  EXPECT_TRUE(has(x.out, "B_1 (g = 1): A{1} B{1}"));
  auto d = run({"measure", "dual", "--model", data("omega2.rel"), "w"});
  EXPECT_EQ(d.code, 0);
  EXPECT_TRUE(has(d.out, "reconstructed: (1/2,inf)"));
}

TEST(Cli, EnvOverridesSeedAndOut) {
  EnvGuard guard;
  const std::string path = testing::TempDir() + "env_report.json";
  setenv("EQDEC_SEED", "77", 1);
  setenv("EQDEC_OUT", path.c_str(), 1);
  auto r = run({"--format", "json", "top", "enumerate", "--max-points", "1"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(slurp(path), r.out);
  EXPECT_EQ(RunReport::from_json(nlohmann::ordered_json::parse(r.out)).seed, 77u);
  auto f = run({"--format", "json", "--seed", "3", "top", "enumerate", "--max-points", "1"});
  EXPECT_EQ(RunReport::from_json(nlohmann::ordered_json::parse(f.out)).seed, 3u);
}

// Model files ---------------------------------------------------------------

TEST(Model, ParsesShippedModels) {
  auto m = parse_model(slurp(data("omega2.rel")));
  EXPECT_EQ(m.table.size(), 2u);
  EXPECT_EQ(m.kelem("evens"), KElem::parse(m.table, "(omega,omega)"));
  EXPECT_EQ(m.kelem("odds"), KElem::parse(m.table, "(omega,0)"));  // B not mentioned: empty there
  EXPECT_EQ(m.kelem("first3"), KElem::parse(m.table, "(3,1)"));
  EXPECT_EQ(m.kelem("tailB"), KElem::parse(m.table, "(0,omega)"));
  EXPECT_EQ(m.lelem("w"), LElem::parse(m.table, "(1/2,inf)"));
  EXPECT_EQ(m.lelem("third"), LElem::parse(m.table, "(inf,0)"));
  EXPECT_EQ(m.measure("both").at(1), ExtReal(2));
  auto mixed = parse_model(slurp(data("mixed.rel")));
  EXPECT_FALSE(mixed.table.all_omega());
  EXPECT_EQ(mixed.lelem("h"), LElem::parse(mixed.table, "(7/2,inf)"));
  EXPECT_EQ(mixed.lelem("t"), LElem::parse(mixed.table, "(1,2)"));
}

TEST(Model, ErrorsNameTheLine) {
  auto expect_line = [](const std::string& text, const std::string& where) {
    try {
      parse_model(text);
      ADD_FAILURE() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::ParseError);
      EXPECT_TRUE(has(e.what(), where)) << e.what();
    }
  };
  expect_line("class A size omega\n\nbogus x\n", "model line 3");
  expect_line("class A size 2\nset s in A: finite{5}\n", "model line 2");
  expect_line("class A size omega\nfn f: A -> [1,2\n", "model line 2");
  expect_line("class A size omega\nmeasure m: (1,2)\n", "model line 2");
  expect_line("class A sized omega\n", "model line 1");
  EXPECT_THROW(parse_model("class A size omega\n").set("nope"), Error);
}

// Reports -------------------------------------------------------------------

TEST(Report, TextAndJson) {
  RunReport r;
  r.command = {"x", "--y"};
  r.seed = 4;
  r.output = {"line"};
  r.add("a", true, "fine").detail("k", "v");
  EXPECT_TRUE(r.ok());
  EXPECT_TRUE(has(r.text(), "[pass] a: fine\n    k = v\nOK\n"));
  r.checks.push_back({"b", Status::Skip, "n/a", {}});
  EXPECT_TRUE(r.ok());
  r.add("c", false);
  EXPECT_FALSE(r.ok());
  EXPECT_TRUE(has(r.text(), "FAILED"));
  auto j = nlohmann::ordered_json::parse(r.json_text());
  EXPECT_EQ(j.begin().key(), "command");
  EXPECT_EQ(j["checks"][1]["status"], "skip");
  EXPECT_EQ(j["ok"], false);
  EXPECT_EQ(RunReport::from_json(j), r);
}

TEST(Report, RandomRoundTrip) {
  Rng rng(19);
  const char* words[] = {"", "a", "b c", "\"q\"", "tab\tnl\n", "{a,b}", "1/3"};
  for (int k = 0; k < 200; ++k) {
    RunReport r;
    r.seed = rng.next();
    for (std::size_t i = rng.below(4); i-- > 0;) r.command.push_back(words[rng.below(7)]);
    for (std::size_t i = rng.below(4); i-- > 0;) r.output.push_back(words[rng.below(7)]);
    for (std::size_t i = rng.below(4); i-- > 0;) {
      CheckResult c{words[rng.below(7)], static_cast<Status>(rng.below(3)), words[rng.below(7)], {}};
      for (std::size_t d = rng.below(3); d-- > 0;) c.detail(words[rng.below(7)], words[rng.below(7)]);
      r.checks.push_back(c);
    }
    auto text = r.json_text();
    auto back = RunReport::from_json(nlohmann::ordered_json::parse(text));
    EXPECT_EQ(back, r);
    EXPECT_EQ(back.json_text(), text);
  }
}

TEST(Report, MalformedJsonIsAParseError) {
  try {
    RunReport::from_json(nlohmann::ordered_json::parse(R"({"command": [], "seed": 1})"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ParseError);
  }
  EXPECT_THROW(parse_status("maybe"), Error);
}
