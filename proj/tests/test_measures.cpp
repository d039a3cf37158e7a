#include <gtest/gtest.h>

#include "eqdec/measures.hpp"
#include "eqdec/sampling.hpp"

using namespace eqdec;

namespace {

const ExtReal kInf = ExtReal::infinity();
const Card W = Card::omega();

ExtReal q(long long p, long long d = 1) { return ExtReal(Rational(p, d)); }

LElem l(std::vector<ExtReal> v) {
  auto t = ClassTable::omega(v.size());
  return LElem(t, std::move(v));
}
KElem k(std::vector<Card> v) {
  auto t = ClassTable::omega(v.size());
  return KElem(t, std::move(v));
}
InvMeasure m(std::vector<ExtReal> v) {
  auto t = ClassTable::omega(v.size());
  return InvMeasure(t, std::move(v));
}

RestrictedMeasure restricted(const ClassTable& t, std::vector<IndexSet> A, std::vector<TailSeq> w) {
  return {BorelSet(t, std::move(A)), WeightedFn(t, std::move(w))};
}

}  // namespace

TEST(Evaluate, Examples) {
  EXPECT_EQ(evaluate(m({1, 0}), l({q(3, 2), q(7)})), q(3, 2));
  EXPECT_EQ(evaluate(InvMeasure::zero(ClassTable::omega(2)), l({kInf, q(7)})), q(0));
  EXPECT_EQ(evaluate(m({1, 1}), k({W, 2})), kInf);
  EXPECT_EQ(evaluate(m({kInf, 0}), l({0, kInf})), q(0));
}

TEST(Ergodic, Examples) {
  EXPECT_TRUE(is_ergodic(m({1, 0, 0})).ergodic);
  auto two = is_ergodic(m({1, 1}));
  ASSERT_FALSE(two.ergodic);
  auto [a, b] = *two.counterexample;
  auto mu = m({1, 1});
  EXPECT_EQ(evaluate(mu, meet(a, b)), q(0));
  EXPECT_EQ(ext_min(evaluate(mu, a), evaluate(mu, b)), q(1));
  auto z = is_ergodic(InvMeasure::zero(ClassTable::omega(2)));
  ASSERT_FALSE(z.ergodic);
  EXPECT_EQ(evaluate(InvMeasure::zero(ClassTable::omega(2)), z.counterexample->first), q(0));
  EXPECT_EQ(z.counterexample->first, l({kInf, kInf}));
}

TEST(Extend, CountingFromTwoPoints) {
  auto t = ClassTable::omega(1);
  auto rm = restricted(t, {finite_index_set({0, 1})}, {parse_seq("[1,1]")});
  EXPECT_EQ(extend_measure(rm), m({1}));
  auto v = extend_formula(rm, {{0, 5}, {0, 6}, {0, 7}});
  EXPECT_TRUE(v.exact());
  EXPECT_EQ(v.value, q(3));
}

TEST(Extend, MissedClassVanishes) {
  auto t = ClassTable::omega(2);
  auto rm = restricted(t, {finite_index_set({3}), IndexSet({}, false)}, {parse_seq("[0,0,0,5/2]"), parse_seq("[]")});
  EXPECT_EQ(extend_measure(rm), m({q(5, 2), 0}));
  auto v = extend_formula(rm, {{1, 0}, {1, 9}, {0, 2}});
  EXPECT_TRUE(v.exact());
  EXPECT_EQ(v.value, q(5, 2));
}

TEST(Extend, RestrictsToA) {
  auto t = ClassTable::omega(1);
  auto rm = restricted(t, {IndexSet({}, {false, true})}, {TailSeq({}, {q(0), q(2)})});
  for (std::size_t x = 1; x < 30; x += 2) EXPECT_EQ(extend_formula(rm, {{0, x}}).value, q(2));
  EXPECT_EQ(extend_measure(rm), m({2}));
}

TEST(Extend, UnequalWeights) {
  auto t = ClassTable::omega(1);
  try {
    extend_measure(restricted(t, {finite_index_set({0, 2})}, {parse_seq("[1,0,2]")}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotInvariantOnA);
    EXPECT_NE(std::string(e.what()).find("c0[2]"), std::string::npos);
  }
}

TEST(Extend, FiniteClassRotation) {
  ClassTable t({{"f", Card(5)}});
  auto rm = restricted(t, {finite_index_set({2})}, {parse_seq("[0,0,1/3]")});
  auto v = extend_formula(rm, {{0, 0}, {0, 1}, {0, 4}});
  EXPECT_TRUE(v.exact());
  EXPECT_EQ(v.value, q(1));
}

TEST(Extend, ZigzagIsBijective) {
  for (std::size_t i = 0; i < 200; ++i) EXPECT_EQ(unzigzag(zigzag(i)), i);
  EXPECT_EQ(zigzag_enumeration(5), (std::vector<long long>{0, 1, -1, 2, -2}));
}

TEST(Extend, OrderChangesPiecesNotMeasure) {
  auto t = ClassTable::omega(1);
  auto rm = restricted(t, {finite_index_set({0, 1, 4})}, {parse_seq("[2,2,0,0,2]")});
  std::vector<long long> other;
  for (long long i = 0; i < 64; ++i) other.push_back(i % 2 ? -(i + 1) / 2 : i / 2);
  auto p1 = extend_partition(rm.A, 64, 16), p2 = extend_partition(rm.A, 64, 16, other);
  EXPECT_NE(p1, p2);
  std::vector<std::pair<std::size_t, std::size_t>> B;
  for (std::size_t x = 0; x < 16; ++x) B.emplace_back(0, x);
  auto v1 = extend_formula(rm, B), v2 = extend_formula(rm, B, 64, other);
  EXPECT_EQ(v1.value, q(32));
  EXPECT_EQ(v2.value, q(32));
}

TEST(Extend, PartitionOracle) {
  Rng r(21);
  for (int it = 0; it < 100; ++it) {
    auto t = sample_table(r);
    auto A = sample_section(r, sample_fn(r, t));
    auto parts = extend_partition(A, 64, 20);
    for (std::size_t c = 0; c < t.size(); ++c) {
      std::size_t n = t[c].size.is_omega() ? 20 : t[c].size.finite();
      std::vector<int> hits(n, 0);
      for (std::size_t i = 0; i < parts.size(); ++i)
        for (auto x : parts[i][c]) {
          ++hits[x];
          // Direct definition: x in g_i A and in no earlier translate.
          auto g = zigzag_enumeration(64);
          EXPECT_TRUE(A.contains(c, act(t[c].size, -g[i], x)));
          for (std::size_t j = 0; j < i; ++j) EXPECT_FALSE(A.contains(c, act(t[c].size, -g[j], x)));
        }
      for (auto h : hits) EXPECT_EQ(h, 1);
    }
  }
}

TEST(Separate, Examples) {
  auto s1 = separate(k({1, 0}), k({0, W}));
  EXPECT_EQ(s1.mu, m({1, 0}));
  EXPECT_TRUE(s1.atomic_branch);
  auto s2 = separate(k({W, 4}), k({3, 4}));
  EXPECT_EQ(s2.mu, m({1, 0}));
  EXPECT_EQ(evaluate(s2.mu, k({W, 4})), kInf);
  EXPECT_EQ(evaluate(s2.mu, k({3, 4})), q(3));
  auto s3 = separate(k({5}), k({2}));
  EXPECT_GT(evaluate(s3.mu, k({5})), evaluate(s3.mu, k({2})));
  try {
    separate(k({2, 1}), k({2, W}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::AlreadyBelow);
  }
}

TEST(Duality, Examples) {
  auto x = l({q(3, 2), kInf});
  EXPECT_EQ(iota(x).c, (std::vector<ExtReal>{q(3, 2), kInf}));
  EXPECT_EQ(dual_reconstruct(iota(x)).alpha, x);
  auto t = ClassTable::omega(2);
  EXPECT_EQ(dual_reconstruct(DualFn{t, {0, 0}, {}}).alpha, LElem::zero(t));

  auto f = from_presentation(t, {{ThresholdAtom{l({1, 0}), q(1)}}});
  auto mu = InvMeasure::counting(t, 0, q(2));
  EXPECT_GT(f.at(mu), q(1));
  auto rec = dual_reconstruct(f, {q(1, 2), q(2), q(5)});
  EXPECT_EQ(rec.alpha, l({1, 0}));
  EXPECT_TRUE(rec.ok());
  EXPECT_EQ(f.at(mu), evaluate(mu, rec.alpha));
}

TEST(Duality, SingularBranch) {
  auto t = ClassTable::omega(2);
  // Atom sets are infinite on c0 and empty on c1, so both classes fall in
  // the singular branch.
  auto f = from_presentation(t, {{ThresholdAtom{l({kInf, 0}), q(3)}, ThresholdAtom{l({kInf, 0}), q(1)}}});
  auto rec = dual_reconstruct(f, {q(1, 3), q(4)});
  EXPECT_EQ(rec.alpha, l({kInf, 0}));
  EXPECT_TRUE(rec.ok());
  for (const auto& ch : rec.checks) EXPECT_TRUE(ch.singular);
}

TEST(Compressible, Examples) {
  EXPECT_TRUE(is_compressible(ClassTable::omega(3)).compressible);
  auto c = is_compressible(ClassTable({{"a", W}, {"b", Card(3)}}));
  ASSERT_FALSE(c.compressible);
  EXPECT_EQ(c.probability->at(1), q(1, 3));
  EXPECT_EQ(evaluate(*c.probability, LElem(c.probability->table(), {0, q(3)})), q(1));
  EXPECT_TRUE(is_compressible(ClassTable{}).compressible);
}

// ---------------------------------------------------------------------------
// Sampled properties.

TEST(Sampled, EquidecomposedFunctionsHaveEqualMeasure) {
  Rng r(31);
  for (int it = 0; it < 200; ++it) {
    auto s = sample_witness_pair(r);
    auto mu = InvMeasure(s.alpha.table(), sample_lelem(r, s.alpha.table()).values());
    EXPECT_EQ(evaluate(mu, s.alpha), evaluate(mu, s.beta));
    EXPECT_EQ(evaluate(mu, s.beta), evaluate(mu, s.gamma));
  }
}

TEST(Sampled, ErgodicIffMeetPreserving) {
  Rng r(32);
  for (int it = 0; it < 300; ++it) {
    auto t = ClassTable::omega(r.between(1, 3));
    std::vector<ExtReal> v;
    for (std::size_t c = 0; c < t.size(); ++c) v.push_back(r.coin() ? ExtReal(0) : sample_ext(r));
    InvMeasure mu(t, v);
    auto e = is_ergodic(mu);
    if (e.ergodic) {
      for (int j = 0; j < 20; ++j) {
        auto a = sample_lelem(r, t), b = sample_lelem(r, t);
        EXPECT_EQ(evaluate(mu, meet(a, b)), ext_min(evaluate(mu, a), evaluate(mu, b)));
      }
      LElem top(t, std::vector<ExtReal>(t.size(), kInf));
      EXPECT_EQ(evaluate(mu, top), kInf);
    } else {
      auto [a, b] = *e.counterexample;
      bool top_fails = a == b && evaluate(mu, a).is_zero();
      bool meet_fails = !(evaluate(mu, meet(a, b)) == ext_min(evaluate(mu, a), evaluate(mu, b)));
      EXPECT_TRUE(top_fails || meet_fails);
    }
  }
}

TEST(Sampled, HomomorphismLaws) {
  Rng r(33);
  for (int it = 0; it < 300; ++it) {
    auto t = ClassTable::omega(r.between(1, 3));
    InvMeasure mu(t, sample_lelem(r, t).values());
    auto a = sample_lelem(r, t), b = sample_lelem(r, t);
    EXPECT_EQ(evaluate(mu, a + b), evaluate(mu, a) + evaluate(mu, b));
    auto x = sample_ext(r);
    EXPECT_EQ(evaluate(mu, real_multiple(x, a)), x * evaluate(mu, a));
    // Increasing chain a, a + b, a + 2b, ...: the join maps to the sup.
    Family<LElem> chain{{a}, a + b, b};
    auto j = countable_join(chain);
    ExtReal sup = evaluate(mu, a);
    if (!evaluate(mu, b).is_zero()) sup = kInf;
    EXPECT_EQ(evaluate(mu, j), sup);
  }
}

TEST(Sampled, SeparationAndDistinction) {
  Rng r(34);
  int separated = 0;
  for (int it = 0; it < 300; ++it) {
    auto t = ClassTable::omega(r.between(1, 3));
    auto a = sample_kelem(r, t), b = sample_kelem(r, t);
    if (!leq(a, b)) {
      auto s = separate(a, b);
      EXPECT_GT(evaluate(s.mu, a), evaluate(s.mu, b));
      EXPECT_TRUE(is_ergodic(s.mu).ergodic);
      EXPECT_TRUE(s.mu.sigma_finite());
      ++separated;
    }
    auto x = sample_lelem(r, t), y = sample_lelem(r, t);
    if (!(x == y)) {
      auto mu = distinguish(x, y);
      EXPECT_NE(evaluate(mu, x), evaluate(mu, y));
    }
  }
  EXPECT_GT(separated, 50);
}

TEST(Sampled, DualityRoundTrip) {
  Rng r(35);
  for (int it = 0; it < 200; ++it) {
    auto t = ClassTable::omega(r.between(1, 4));
    auto x = sample_lelem(r, t);
    EXPECT_EQ(dual_reconstruct(iota(x)).alpha, x);
    DualFn f{t, sample_lelem(r, t).values(), {}};
    auto back = iota(dual_reconstruct(f).alpha);
    EXPECT_EQ(back.c, f.c);
  }
}
