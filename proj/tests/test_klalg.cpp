#include <gtest/gtest.h>

#include <optional>

#include "eqdec/klalg.hpp"
#include "eqdec/sampling.hpp"

using namespace eqdec;

namespace {

const Card W = Card::omega();
const ExtReal kInf = ExtReal::infinity();

KElem k(std::vector<Card> v) {
  auto t = ClassTable::omega(v.size());
  return KElem(t, std::move(v));
}
LElem l(std::vector<ExtReal> v) {
  auto t = ClassTable::omega(v.size());
  return LElem(t, std::move(v));
}
ExtReal q(long long p, long long d = 1) { return ExtReal(Rational(p, d)); }

// Counts as optional<uint64>, nullopt standing for omega.
using Cnt = std::optional<std::uint64_t>;
Cnt cnt(Card c) { return c.is_omega() ? Cnt{} : Cnt{c.finite()}; }
Cnt cadd(Cnt a, Cnt b) { return a && b ? Cnt{*a + *b} : Cnt{}; }
bool cle(Cnt a, Cnt b) { return !b || (a && *a <= *b); }

}  // namespace

TEST(KSum, Examples) {
  EXPECT_EQ(k_sum(std::vector<KElem>{k({2, W}), k({3, 1})}), k({5, W}));
  EXPECT_EQ(k_sum(Family<KElem>{{}, k({1, 0}), std::nullopt}), k({W, 0}));
  EXPECT_EQ(k({4, W}) + KElem::zero(ClassTable::omega(2)), k({4, W}));
}

TEST(KSum, TableMismatch) {
  try {
    (void)(k({1}) + k({1, 2}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::TableMismatch);
  }
}

TEST(Compare, Examples) {
  EXPECT_EQ(compare_bk(k({2, W, 3}), k({5, 1, 3})), (Partition{{0, 2}, {1}}));
  EXPECT_EQ(compare_bk(k({2, W}), k({2, W})), (Partition{{0, 1}, {}}));
  EXPECT_EQ(compare_bk(k({W}), k({1})), (Partition{{}, {0}}));
}

TEST(MeetJoin, Examples) {
  auto a = k({2, W, 3}), b = k({5, 1, 3});
  EXPECT_EQ(meet(a, b), k({2, 1, 3}));
  EXPECT_EQ(join(a, b), k({5, W, 3}));
  EXPECT_EQ(meet(a, a), a);
  EXPECT_EQ(meet(l({q(1, 2), kInf, kInf}), l({q(3), q(2), kInf})), l({q(1, 2), q(2), kInf}));
  EXPECT_EQ(join(l({q(1, 2), kInf, 0}), l({q(3), q(2), 0})), l({q(3), kInf, 0}));
}

TEST(CountableJoin, Examples) {
  Family<KElem> chain{{k({1, 0})}, k({2, 0}), k({1, 0})};
  EXPECT_EQ(countable_join(chain), k({W, 0}));
  EXPECT_EQ(chain_join(chain), k({W, 0}));
  EXPECT_EQ(countable_join(Family<KElem>{{k({3, W})}, {}, {}}), k({3, W}));
  auto pj = partition_join(Family<KElem>{{k({1, 0}), k({0, 1})}, {}, {}});
  EXPECT_EQ(pj.value, k({1, 1}));
  EXPECT_EQ(pj.records, (std::vector<std::size_t>{0, 1}));
}

TEST(CountableJoin, RecordsAreLeastSubsequence) {
  auto pj = partition_join(Family<KElem>{{k({1}), k({1}), k({3}), k({2}), k({4})}, k({4}), std::nullopt});
  EXPECT_EQ(pj.records, (std::vector<std::size_t>{0, 2, 4}));
  EXPECT_FALSE(pj.continuation_record);
  EXPECT_EQ(pj.value, k({4}));
}

TEST(Divide, Examples) {
  auto d = divide(k({W, 0}), 3);
  EXPECT_EQ(d.quotient, k({W, 0}));
  ASSERT_EQ(d.transversals.size(), 3u);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t i = 0; i < 30; ++i) {
      EXPECT_EQ(d.transversals[r].contains(0, i), i % 3 == r);
      EXPECT_FALSE(d.transversals[r].contains(1, i));
    }
  EXPECT_EQ(divide(KElem::zero(ClassTable::omega(2)), 5).quotient, KElem::zero(ClassTable::omega(2)));
  auto h = divide(k({W, W}), 2).quotient;
  EXPECT_EQ(h + h, k({W, W}));
}

TEST(Divide, RejectsFiniteCounts) {
  try {
    divide(k({W, 3}), 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotAperiodic);
    EXPECT_NE(std::string(e.what()).find("c1=3"), std::string::npos);
  }
}

TEST(RealMultiple, Examples) {
  EXPECT_EQ(real_multiple(q(1, 2), l({q(3), kInf})), l({q(3, 2), kInf}));
  EXPECT_EQ(real_multiple(q(0), l({q(3), kInf})), l({0, 0}));
  auto a = l({q(7, 3), q(1)});
  EXPECT_EQ(real_multiple(q(2), real_multiple(q(1, 2), a)), a);
}

TEST(Chi, Examples) {
  EXPECT_EQ(chi(k({2, W})), l({q(2), kInf}));
  EXPECT_EQ(chi(KElem::zero(ClassTable::omega(3))), LElem::zero(ClassTable::omega(3)));
}

TEST(Parse, Tuples) {
  auto t = ClassTable::omega(3);
  EXPECT_EQ(KElem::parse(t, "(2, omega, 0)"), k({2, W, 0}));
  EXPECT_EQ(LElem::parse(t, "(1/2,inf,0)"), l({q(1, 2), kInf, 0}));
  EXPECT_THROW(KElem::parse(t, "(1,2)"), Error);
  EXPECT_THROW(KElem::parse(t, "1,2,3"), Error);
}

TEST(KElem, NeedsCompressible) {
  ClassTable t({{"a", Card(3)}});
  EXPECT_THROW(KElem(t, {Card(1)}), Error);
}

// ---------------------------------------------------------------------------
// Sampled laws.

TEST(Laws, SumMatchesCountOracle) {
  Rng r(1);
  for (int it = 0; it < 300; ++it) {
    auto t = ClassTable::omega(r.between(1, 3));
    auto f = sample_family<KElem>(r, [&] { return sample_kelem(r, t); });
    auto s = k_sum(f);
    for (std::size_t c = 0; c < t.size(); ++c) {
      Cnt acc{0};
      for (const auto& x : f.items) acc = cadd(acc, cnt(x.at(c)));
      bool cont = f.tail && (!f.tail->at(c).is_zero() || (f.step && !f.step->at(c).is_zero()));
      if (cont) acc = Cnt{};
      EXPECT_EQ(cnt(s.at(c)), acc);
    }
  }
}

TEST(Laws, MeetJoinAgainstOracle) {
  Rng r(2);
  for (int it = 0; it < 500; ++it) {
    auto t = ClassTable::omega(r.between(1, 4));
    auto a = sample_kelem(r, t), b = sample_kelem(r, t);
    auto m = meet(a, b), j = join(a, b);
    for (std::size_t c = 0; c < t.size(); ++c) {
      auto x = cnt(a.at(c)), y = cnt(b.at(c));
      EXPECT_EQ(cnt(m.at(c)), cle(x, y) ? x : y);
      EXPECT_EQ(cnt(j.at(c)), cle(x, y) ? y : x);
    }
    EXPECT_EQ(a + b, m + j);
    auto la = sample_lelem(r, t), lb = sample_lelem(r, t);
    EXPECT_EQ(la + lb, meet(la, lb) + join(la, lb));
  }
}

TEST(Laws, Monotone) {
  Rng r(3);
  for (int it = 0; it < 300; ++it) {
    auto t = ClassTable::omega(r.between(1, 3));
    auto f = sample_family<LElem>(r, [&] { return sample_lelem(r, t); }, false);
    Family<LElem> g = f;
    for (auto& x : g.items) x = x + sample_lelem(r, t);
    if (g.tail) g.tail = *g.tail + sample_lelem(r, t);
    EXPECT_TRUE(leq(k_sum(f), k_sum(g)));
  }
}

TEST(Laws, SumIsJoinOfPartialSums) {
  Rng r(4);
  for (int it = 0; it < 300; ++it) {
    auto t = ClassTable::omega(r.between(1, 3));
    auto f = sample_family<LElem>(r, [&] { return sample_lelem(r, t); }, false);
    Family<LElem> partial;
    LElem acc = LElem::zero(t);
    for (const auto& x : f.items) partial.items.push_back(acc = acc + x);
    if (f.tail) {
      partial.tail = acc + *f.tail;
      partial.step = *f.tail;
    }
    if (partial.items.empty() && !partial.tail) continue;
    EXPECT_EQ(k_sum(f), countable_join(partial));
    EXPECT_EQ(k_sum(f), chain_join(partial));
  }
}

TEST(Laws, ChiEmbeds) {
  Rng r(5);
  for (int it = 0; it < 300; ++it) {
    auto t = ClassTable::omega(r.between(1, 3));
    auto a = sample_kelem(r, t), b = sample_kelem(r, t);
    EXPECT_EQ(leq(a, b), leq(chi(a), chi(b)));
    auto f = sample_family<KElem>(r, [&] { return sample_kelem(r, t); });
    Family<LElem> g;
    for (const auto& x : f.items) g.items.push_back(chi(x));
    if (f.tail) g.tail = chi(*f.tail);
    if (f.step) g.step = chi(*f.step);
    EXPECT_EQ(chi(k_sum(f)), k_sum(g));
  }
}

TEST(Laws, DivisionUnique) {
  Rng r(6);
  for (int it = 0; it < 200; ++it) {
    auto t = ClassTable::omega(r.between(1, 3));
    auto a = sample_kelem(r, t, true);
    std::size_t n = r.between(1, 8);
    auto d = divide(a, n);
    EXPECT_EQ(n_times(d.quotient, n), a);
    for (std::size_t c = 0; c < t.size(); ++c) {
      Card total = 0;
      for (const auto& tr : d.transversals) {
        EXPECT_EQ(KElem::of(tr), d.quotient);
        total = total + tr.count(c);
      }
      EXPECT_EQ(total, a.at(c));
      for (std::size_t i = 0; i < 40; ++i) {
        int hits = 0;
        for (const auto& tr : d.transversals) hits += tr.contains(c, i);
        EXPECT_EQ(hits, a.at(c).is_zero() ? 0 : 1);
      }
    }
    auto b = sample_kelem(r, t);
    EXPECT_EQ(n_times(b, n) == a, b == d.quotient);
  }
}

TEST(Laws, RealMultipleBothRoutes) {
  Rng r(7);
  for (int it = 0; it < 300; ++it) {
    auto t = ClassTable::omega(r.between(1, 3));
    auto a = sample_lelem(r, t);
    auto x = sample_ext(r);
    EXPECT_EQ(real_multiple(x, a), real_multiple_by_division(x, a)) << x << " " << a.str();
  }
}

TEST(Laws, AperiodicClosed) {
  Rng r(8);
  auto ap = [](const KElem& x) {
    for (const auto& c : x.values())
      if (!c.is_zero() && !c.is_omega()) return false;
    return true;
  };
  for (int it = 0; it < 200; ++it) {
    auto t = ClassTable::omega(r.between(1, 3));
    auto a = sample_kelem(r, t, true), b = sample_kelem(r, t, true);
    EXPECT_TRUE(ap(a + b));
    EXPECT_TRUE(ap(meet(a, b)));
    EXPECT_TRUE(ap(join(a, b)));
    EXPECT_TRUE(ap(divide(a, r.between(1, 5)).quotient));
    auto f = sample_family<KElem>(r, [&] { return sample_kelem(r, t, true); });
    EXPECT_TRUE(ap(k_sum(f)));
    EXPECT_TRUE(ap(countable_join(f)));
  }
}

TEST(Laws, Refinement) {
  Rng r(9);
  for (int it = 0; it < 300; ++it) {
    auto t = ClassTable::omega(r.between(1, 3));
    auto cs = sample_family<LElem>(r, [&] { return sample_lelem(r, t); }, false);
    auto total = k_sum(cs);
    // Split the total into a + b independently of the family.
    std::vector<ExtReal> av, bv;
    for (const auto& s : total.values()) {
      if (s.is_finite()) {
        auto parts = sample_split(r, s, 2);
        av.push_back(parts[0]);
        bv.push_back(parts[1]);
        continue;
      }
      auto pick = r.below(3);
      av.push_back(pick == 1 ? sample_finite(r) : kInf);
      bv.push_back(pick == 2 ? sample_finite(r) : kInf);
    }
    LElem a(t, av), b(t, bv);
    auto ref = refine(a, b, cs);
    EXPECT_EQ(k_sum(ref.as), a);
    EXPECT_EQ(k_sum(ref.bs), b);
    EXPECT_EQ(k_sum(ref.cs), total);
    for (std::size_t i = 0; i < ref.cs.items.size(); ++i) {
      EXPECT_EQ(ref.as.items[i] + ref.bs.items[i], ref.cs.items[i]);
      EXPECT_EQ(ref.cs.items[i], cs.at(i));
    }
    if (cs.tail) {
      EXPECT_EQ(*ref.as.tail + *ref.bs.tail, *cs.tail);
    }
  }
}

TEST(Laws, Remainder) {
  Rng r(10);
  for (int it = 0; it < 300; ++it) {
    auto t = ClassTable::omega(r.between(1, 3));
    auto c = sample_lelem(r, t);
    auto bs = sample_family<LElem>(r, [&] { return sample_lelem(r, t); }, false);
    // a_n = c + sum_{i >= n} b_i, listed explicitly up to the b tail.
    auto tail_sum = [&](std::size_t n) {
      Family<LElem> rest{{}, bs.tail, std::nullopt};
      for (std::size_t i = n; i < bs.items.size(); ++i) rest.items.push_back(bs.items[i]);
      return rest.items.empty() && !rest.tail ? LElem::zero(t) : k_sum(rest);
    };
    Family<LElem> as;
    for (std::size_t n = 0; n < bs.items.size(); ++n) as.items.push_back(c + tail_sum(n));
    as.tail = c + tail_sum(bs.items.size());
    for (std::size_t n = 0; n < bs.items.size(); ++n) EXPECT_EQ(as.items[n], bs.items[n] + as.at(n + 1));
    auto rem = remainder(as);
    for (std::size_t n = 0; n <= bs.items.size(); ++n) EXPECT_EQ(as.at(n), rem + tail_sum(n));
  }
}

TEST(Laws, Associativity) {
  Rng r(11);
  for (int it = 0; it < 300; ++it) {
    auto t = ClassTable::omega(r.between(1, 3));
    auto f = sample_family<LElem>(r, [&] { return sample_lelem(r, t); });
    auto g = sample_family<LElem>(r, [&] { return sample_lelem(r, t); });
    if (f.items.empty()) continue;
    Family<LElem> rest = f;
    rest.items.erase(rest.items.begin());
    auto s_rest = rest.items.empty() && !rest.tail ? LElem::zero(t) : k_sum(rest);
    EXPECT_EQ(k_sum(f), f.items[0] + s_rest);
    // Termwise sum of two finite families.
    std::vector<LElem> fx = f.items, gx = g.items, h;
    std::size_t n = std::max(fx.size(), gx.size());
    fx.resize(n, LElem::zero(t));
    gx.resize(n, LElem::zero(t));
    for (std::size_t i = 0; i < n; ++i) h.push_back(fx[i] + gx[i]);
    EXPECT_EQ(k_sum(h), k_sum(fx) + k_sum(gx));
  }
}
