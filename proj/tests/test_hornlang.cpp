#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "eqdec/hornlang.hpp"
#include "eqdec/measures.hpp"

using namespace eqdec;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<CatalogEntry> catalog() { return parse_catalog(slurp(std::string(EQDEC_DATA_DIR) + "/axioms.horn")); }

std::vector<ClassTable> test_tables() {
  return {ClassTable({{"A", Card::omega()}}), ClassTable({{"A", Card(3)}, {"B", Card::omega()}}),
          ClassTable({{"A", Card::omega()}, {"B", Card::omega()}, {"C", Card(1)}})};
}

Term v(const char* n) { return Term::var(n); }

}  // namespace

TEST(Parse, Examples) {
  auto comm = parse_axiom("forall a b. a + b = b + a");
  EXPECT_TRUE(comm.hypotheses.empty());
  EXPECT_EQ(comm.conclusion.lhs, Term::node(Term::Kind::Sum, {v("a"), v("b")}));

  auto cancel = parse_axiom("forall a b c. a + c = b + c => a = b");
  ASSERT_EQ(cancel.hypotheses.size(), 1u);
  EXPECT_EQ(cancel.hypotheses[0].rhs, Term::node(Term::Kind::Sum, {v("b"), v("c")}));
  EXPECT_EQ(cancel.conclusion.lhs, v("a"));
  EXPECT_EQ(cancel.variables, (std::vector<std::string>{"a", "b", "c"}));

  auto h = parse_axiom("forall a b. a + b = meet(a,b) + join(a,b)");
  EXPECT_EQ(h.conclusion.rhs,
            Term::node(Term::Kind::Sum, {Term::node(Term::Kind::Meet, {v("a"), v("b")}),
                                         Term::node(Term::Kind::Join, {v("a"), v("b")})}));

  // Free hypothesis variables are bound implicitly.
  auto implicit = parse_axiom("forall a b. a + c = b + c => a = b");
  EXPECT_EQ(implicit.variables, (std::vector<std::string>{"a", "b", "c"}));
}

TEST(Parse, Whitespace) {
  EXPECT_EQ(parse_axiom("forall a b.a+b=b+a"), parse_axiom("  forall  a  b .\n a +\tb = b + a "));
  auto s = parse_axiom("sum(a, b; rep 1/2 * c) = x + 2*y => x = y");
  EXPECT_EQ(s.hypotheses[0].lhs.args.back(), Term::scale(ExtReal(1, 2), v("c")));
  EXPECT_TRUE(s.hypotheses[0].lhs.tail);
}

TEST(Parse, ErrorsCarryPosition) {
  auto expect_at = [](const char* src, const char* where) {
    try {
      parse_axiom(src);
      ADD_FAILURE() << src;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::SyntaxError);
      EXPECT_NE(std::string(e.what()).find(where), std::string::npos) << e.what();
    }
  };
  expect_at("forall a. a + = a", "line 1, column 15");
  expect_at("forall a.\n meet(a) = a", "line 2, column 8");
  expect_at("forall a. a = b", "not bound");
  expect_at("forall a. a = a a", "trailing");
  expect_at("forall a. 1/0 * a = a", "line 1, column 11");
  expect_at("forall sum. a = a", "not a variable");
}

TEST(Parse, CatalogRoundTrip) {
  auto cat = catalog();
  std::size_t valid = 0, invalid = 0;
  for (const auto& e : cat) {
    EXPECT_EQ(parse_axiom(print(e.axiom)), e.axiom) << e.name << ": " << print(e.axiom);
    (e.expect_valid ? valid : invalid)++;
  }
  EXPECT_GE(valid, 12u);
  EXPECT_GE(invalid, 3u);
  EXPECT_TRUE(std::any_of(cat.begin(), cat.end(), [](const auto& e) { return e.name == "cancel" && !e.expect_valid; }));
}

TEST(Parse, PrinterParenthesizesNestedSums) {
  Term nested = Term::node(Term::Kind::Sum, {v("a"), Term::node(Term::Kind::Sum, {v("b"), v("c")})});
  EXPECT_EQ(print(nested), "a + (b + c)");
  Term sc = Term::scale(ExtReal(1, 3), Term::node(Term::Kind::Sum, {v("a"), v("b")}));
  EXPECT_EQ(print(sc), "1/3 * (a + b)");
  Term single = Term::node(Term::Kind::Sum, {v("a")});
  EXPECT_EQ(print(single), "sum(a)");
  for (const auto& t : {nested, sc, single, Term::node(Term::Kind::Join, {v("a")}, true)}) {
    auto ax = parse_axiom(print(t) + " = x");
    EXPECT_EQ(ax.conclusion.lhs, t);
  }
}

TEST(Evaluate, Examples) {
  ExtRealAlgebra R;
  Valuation<ExtRealAlgebra> val{{"x", ExtReal(1, 2)}, {"y", ExtReal(1, 3)}, {"z", ExtReal(2)}, {"w", ExtReal::infinity()}};
  EXPECT_EQ(evaluate(parse_axiom("x + y = x").conclusion.lhs, val, R), ExtReal(5, 6));
  EXPECT_EQ(evaluate(parse_axiom("meet(z, w) = x").conclusion.lhs, val, R), ExtReal(2));
  EXPECT_EQ(evaluate(parse_axiom("sum(x; rep y) = x").conclusion.lhs, val, R), ExtReal::infinity());
  EXPECT_EQ(evaluate(parse_axiom("sum(x; rep 0 * y) = x").conclusion.lhs, val, R), ExtReal(1, 2));
  EXPECT_THROW(evaluate(Term::var("q"), val, R), Error);

  ClassTable t({{"A", Card(2)}, {"B", Card::omega()}});
  LElemAlgebra L{{t}};
  Valuation<LElemAlgebra> lv{{"a", LElem::parse(t, "(3,inf)")}};
  EXPECT_EQ(evaluate(Term::scale(ExtReal(1, 2), v("a")), lv, L), LElem::parse(t, "(3/2,inf)"));
}

TEST(Evaluate, KElemScaleIsPartial) {
  auto t = ClassTable::omega(2);
  KElemAlgebra K{{t}};
  Valuation<KElemAlgebra> kv{{"a", KElem::parse(t, "(3,omega)")}, {"b", KElem::parse(t, "(omega,0)")}};
  try {
    evaluate(Term::scale(ExtReal(1, 2), v("a")), kv, K);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ScaleUndefined);
  }
  EXPECT_EQ(evaluate(Term::scale(ExtReal(2, 3), v("a")), kv, K), KElem::parse(t, "(2,omega)"));
  EXPECT_EQ(evaluate(Term::scale(ExtReal(1, 5), v("b")), kv, K), KElem::parse(t, "(omega,0)"));
  EXPECT_EQ(evaluate(Term::scale(ExtReal::infinity(), v("a")), kv, K), KElem::parse(t, "(omega,omega)"));
  EXPECT_EQ(evaluate(Term::scale(ExtReal(0), v("a")), kv, K), KElem::zero(t));
}

TEST(Check, CancellationFailsOverReals) {
  auto ax = parse_axiom("forall a b c. a + c = b + c => a = b");
  auto grid = check_exhaustive(ax, ExtRealAlgebra{}, small_ext_grid());
  EXPECT_FALSE(grid.pass);
  EXPECT_EQ(grid.counterexample,
            (std::vector<std::pair<std::string, std::string>>{{"a", "0"}, {"b", "1/3"}, {"c", "inf"}}));
  auto random = check(ax, ExtRealAlgebra{}, Rng(7), 2000);
  ASSERT_FALSE(random.pass);
  EXPECT_EQ(random.counterexample.back().second, "inf");
}

TEST(Check, DeterministicUnderSeed) {
  auto ax = parse_axiom("forall a b. a + a = b + b => a = b");
  LElemAlgebra L{{test_tables()[1]}};
  auto v1 = check(ax, L, Rng(3), 300), v2 = check(ax, L, Rng(3), 300);
  EXPECT_EQ(v1.trials, v2.trials);
  EXPECT_EQ(v1.vacuous, v2.vacuous);
  EXPECT_TRUE(v1.pass);
}

TEST(Check, LatticeSumAndUnfold) {
  for (const char* src : {"forall a b. a + b = meet(a,b) + join(a,b)", "forall a b c. sum(a, b; rep c) = a + sum(b; rep c)"}) {
    auto ax = parse_axiom(src);
    EXPECT_TRUE(check(ax, ExtRealAlgebra{}, Rng(1), 500).pass);
    for (const auto& t : test_tables()) EXPECT_TRUE(check(ax, LElemAlgebra{{t}}, Rng(2), 500).pass) << t.size();
  }
}

// Anything valid on the grid must stay valid on L(E) and K(E) samples.
TEST(Check, TransferSoundness) {
  for (const auto& e : catalog()) {
    auto grid = check_exhaustive(e.axiom, ExtRealAlgebra{}, small_ext_grid());
    EXPECT_EQ(grid.pass, e.expect_valid) << e.name;
    if (!grid.pass) continue;
    EXPECT_TRUE(check(e.axiom, ExtRealAlgebra{}, Rng(11), 400).pass) << e.name;
    for (const auto& t : test_tables()) {
      auto l = check(e.axiom, LElemAlgebra{{t}}, Rng(12), 400);
      EXPECT_TRUE(l.pass) << e.name << " over " << t.size() << " classes" << " at " << l.lhs << " vs " << l.rhs;
    }
    for (std::size_t n = 1; n <= 3; ++n) {
      auto k = check(e.axiom, KElemAlgebra{{ClassTable::omega(n)}}, Rng(13), 400);
      EXPECT_TRUE(k.pass) << e.name << " over K with " << n << " classes";
    }
  }
}

TEST(Check, InvalidAxiomsFailOnReals) {
  for (const auto& e : catalog()) {
    if (e.expect_valid) continue;
    auto v = check(e.axiom, ExtRealAlgebra{}, Rng(5), 2000);
    EXPECT_FALSE(v.pass) << e.name;
    EXPECT_EQ(v.counterexample.size(), e.axiom.variables.size());
  }
}

// Evaluating in L(E) and then measuring equals evaluating the measured
// valuation over the reals: for lattice-free terms with any measure, for
// all terms with ergodic ones.
TEST(Homomorphism, MeasureImage) {
  Rng r(77);
  std::vector<Term> terms;
  for (const auto& e : catalog()) {
    terms.push_back(e.axiom.conclusion.lhs);
    terms.push_back(e.axiom.conclusion.rhs);
  }
  for (int it = 0; it < 200; ++it) {
    auto t = sample_table(r);
    LElemAlgebra L{{t}};
    std::vector<ExtReal> wts;
    for (std::size_t c = 0; c < t.size(); ++c) wts.push_back(r.coin() ? sample_ext(r) : ExtReal(0));
    InvMeasure mu(t, wts);
    bool ergodic = is_ergodic(mu).ergodic && mu.sigma_finite();
    Valuation<LElemAlgebra> lv;
    Valuation<ExtRealAlgebra> rv;
    for (const char* name : {"a", "b", "c"}) {
      auto x = L.sample(r);
      lv.emplace(name, x);
      rv.emplace(name, evaluate(mu, x));
    }
    for (const auto& term : terms) {
      if (!lattice_free(term) && !ergodic) continue;
      if (term.kind == Term::Kind::Var && !lv.count(term.name)) continue;
      EXPECT_EQ(evaluate(mu, evaluate(term, lv, L)), evaluate(term, rv, ExtRealAlgebra{})) << print(term);
    }
  }
}
