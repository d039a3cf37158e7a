#include <gtest/gtest.h>

#include <random>

#include "eqdec/extnum.hpp"

using namespace eqdec;

namespace {

const ExtReal kInf = ExtReal::infinity();

std::vector<ExtReal> grid() {
  std::vector<ExtReal> g;
  for (int p = 0; p <= 4; ++p)
    for (int q = 1; q <= 3; ++q) g.push_back(ExtReal(p, q));
  g.push_back(kInf);
  return g;
}

}  // namespace

TEST(ExtReal, AddExamples) {
  EXPECT_EQ(ExtReal(1, 2) + ExtReal(1, 3), ExtReal(5, 6));
  EXPECT_EQ(kInf + ExtReal(0), kInf);
  EXPECT_EQ(ExtReal(0) + ExtReal(0), ExtReal(0));
}

TEST(ExtReal, ScaleExamples) {
  EXPECT_EQ(ext_scale(ExtReal(0), kInf), ExtReal(0));
  EXPECT_EQ(ext_scale(ExtReal(2, 3), ExtReal(3, 4)), ExtReal(1, 2));
  EXPECT_EQ(ext_scale(ExtReal(5), kInf), kInf);
}

TEST(ExtReal, LowestTerms) {
  ExtReal x(6, 8);
  EXPECT_EQ(x.str(), "3/4");
  EXPECT_EQ(boost::multiprecision::denominator(x.value()), 4);
}

TEST(ExtReal, MonoidLawsOnGrid) {
  auto g = grid();
  for (const auto& a : g) {
    EXPECT_EQ(a + ExtReal(0), a);
    for (const auto& b : g) {
      EXPECT_EQ(a + b, b + a);
      for (const auto& c : g) EXPECT_EQ((a + b) + c, a + (b + c));
    }
  }
}

TEST(ExtReal, ParseAndPrint) {
  EXPECT_EQ(ExtReal::parse("3/6"), ExtReal(1, 2));
  EXPECT_EQ(ExtReal::parse(" inf "), kInf);
  EXPECT_EQ(ExtReal::parse("12"), ExtReal(12));
  EXPECT_THROW(ExtReal::parse("-1"), Error);
  EXPECT_THROW(ExtReal::parse("1/0"), Error);
  for (const auto& a : grid()) EXPECT_EQ(ExtReal::parse(a.str()), a);
}

TEST(ExtReal, Minus) {
  EXPECT_EQ(ExtReal(3).minus(ExtReal(1, 2)), ExtReal(5, 2));
  EXPECT_EQ(kInf.minus(ExtReal(7)), kInf);
  EXPECT_THROW(kInf.minus(kInf), Error);
  EXPECT_THROW(ExtReal(1).minus(ExtReal(2)), Error);
}

TEST(TailSeq, SumExamples) {
  EXPECT_EQ(seq_sum(TailSeq({ExtReal(1, 2), ExtReal(1, 3)})), ExtReal(5, 6));
  EXPECT_EQ(seq_sum(TailSeq::constant(ExtReal(1))), kInf);
  EXPECT_EQ(seq_sum(TailSeq({kInf})), kInf);
  EXPECT_EQ(seq_sum(TailSeq({ExtReal(1)}, ExtReal(0))), ExtReal(1));
}

TEST(TailSeq, SumUnfoldsOnce) {
  std::mt19937_64 rng(7);
  auto g = grid();
  for (int t = 0; t < 300; ++t) {
    std::vector<ExtReal> pre(rng() % 5);
    for (auto& x : pre) x = g[rng() % g.size()];
    std::vector<ExtReal> cyc(1 + rng() % 3);
    for (auto& x : cyc) x = rng() % 2 ? ExtReal(0) : g[rng() % g.size()];
    TailSeq u(pre, cyc);
    EXPECT_EQ(seq_sum(u), u.at(0) + seq_sum(u.shifted(1)));
    auto perm = pre;
    std::shuffle(perm.begin(), perm.end(), rng);
    EXPECT_EQ(seq_sum(u), seq_sum(TailSeq(perm, cyc)));
    TailSeq v(std::vector<ExtReal>(rng() % 4, g[rng() % g.size()]), g[rng() % g.size()]);
    EXPECT_EQ(seq_sum(u + v), seq_sum(u) + seq_sum(v));
  }
}

TEST(TailSeq, ParseFormatRoundTrip) {
  for (std::string s : {"[1,1;0]", "[;1]", "[inf,0;1/2]", "[1;(0,1)]"}) {
    auto u = parse_seq(s);
    EXPECT_EQ(parse_seq(format_seq(u)), u) << s;
  }
  EXPECT_EQ(parse_seq("[2]"), TailSeq({ExtReal(2)}));
  EXPECT_THROW(parse_seq("1,2"), Error);
}

TEST(TailSeq, NormalizedKeepsEntries) {
  TailSeq u({ExtReal(1), ExtReal(0), ExtReal(1)}, std::vector<ExtReal>{ExtReal(0), ExtReal(1), ExtReal(0), ExtReal(1)});
  auto n = u.normalized();
  EXPECT_EQ(n.period(), 2u);
  EXPECT_EQ(n.tail_start(), 0u);
  for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(n.at(i), u.at(i));
}

TEST(Dyadic, Examples) {
  EXPECT_EQ(dyadic_bits(ExtReal(5, 4)), (DyadicBits{1, {0, 1}}));
  EXPECT_EQ(dyadic_bits(ExtReal(3)), (DyadicBits{3, {}}));
  try {
    dyadic_bits(ExtReal(1, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NonDyadic);
  }
  try {
    dyadic_bits(kInf);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InfiniteInput);
  }
}

TEST(Dyadic, RoundTrip) {
  for (int p = 0; p < 200; ++p)
    for (int k = 0; k < 7; ++k) {
      ExtReal a(p, 1LL << k);
      auto d = dyadic_bits(a);
      EXPECT_EQ(from_dyadic_bits(d), a);
      if (!d.bits.empty()) {
        EXPECT_EQ(d.bits.back(), 1);
      }
    }
}

TEST(Card, Arithmetic) {
  EXPECT_EQ(Card(2) + Card(3), Card(5));
  EXPECT_EQ(Card(2) + Card::omega(), Card::omega());
  EXPECT_EQ(Card(0) * Card::omega(), Card(0));
  EXPECT_LT(Card(1000), Card::omega());
  EXPECT_EQ(Card::parse("omega").to_ext(), kInf);
}
