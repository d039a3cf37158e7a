#pragma once

// The eleven acceptance criteria as seeded, exact checks.  Shared by the
// acceptance binary and `eqdec accept`.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "eqdec/eqrel.hpp"
#include "eqdec/hornlang.hpp"
#include "eqdec/klalg.hpp"
#include "eqdec/measures.hpp"
#include "eqdec/report.hpp"
#include "eqdec/sampling.hpp"
#include "eqdec/topdec.hpp"
#include "eqdec/transport.hpp"

namespace eqdec {

namespace accept {

/// Counts failures and keeps the first message.
struct Tally {
  std::size_t cases = 0, failures = 0;
  std::string first;

  void expect(bool ok, const std::function<std::string()>& msg) {
    if (ok) return;
    if (failures++ == 0) first = msg();
  }
  CheckResult result(std::string name, std::string summary) const {
    CheckResult c{std::move(name), failures ? Status::Fail : Status::Pass, std::move(summary), {}};
    c.detail("cases", std::to_string(cases));
    c.detail("failures", std::to_string(failures));
    if (failures) c.detail("first failure", first);
    return c;
  }
};

template <class F>
void guarded(Tally& t, F&& body) {
  try {
    body();
  } catch (const Error& e) {
    t.expect(false, [&] { return std::string("exception: ") + e.what(); });
  }
}

inline LElem sum_or_zero(const Family<LElem>& f, const ClassTable& t) {
  return f.items.empty() && !f.tail ? LElem::zero(t) : k_sum(f);
}

// 1 ------------------------------------------------------------------------

inline CheckResult transport_marginals(std::uint64_t seed) {
  Tally t;
  Rng root(seed);
  std::map<std::string, std::size_t> per_case;
  std::size_t exact_lines = 0, certified_lines = 0;
  for (std::size_t k = 0; k < 1000; ++k) {
    Rng r = root.fork(k);
    auto c = static_cast<TransportCase>(k % 6);
    auto s = sample_transport(r, c);
    ++t.cases;
    guarded(t, [&] {
      auto p = transport(s.u, s.v);
      t.expect(p.kind() == c, [&] { return "case mismatch for " + format_seq(s.u) + " " + format_seq(s.v); });
      ++per_case[std::string(case_name(p.kind()))];
      // Finitely supported pairs are checked on every line that can be
      // nonzero (plus one beyond); the others on a 12 x 12 window.
      std::size_t bound = 12;
      if (s.finitely_supported) bound = std::max(s.u.support_end(), s.v.support_end()) + 1;
      auto rep = verify_marginals(p, bound);
      for (const auto* g : {&rep.rows, &rep.cols})
        for (const auto& line : *g) (line.divergence_certificate ? certified_lines : exact_lines)++;
    });
  }
  auto res = t.result("1 transport marginals", "row and column sums of d(u,v) equal u and v");
  for (const auto& [name, n] : per_case) res.detail("case " + name, std::to_string(n));
  res.detail("exact lines", std::to_string(exact_lines));
  res.detail("divergent lines certified", std::to_string(certified_lines));
  return res;
}

// 2 ------------------------------------------------------------------------

inline CheckResult witness_calculus(std::uint64_t seed) {
  Tally t;
  Rng root(seed);
  for (std::size_t k = 0; k < 500; ++k) {
    Rng r = root.fork(k);
    ++t.cases;
    guarded(t, [&] {
      auto s = sample_witness_pair(r);
      auto theta = compose(s.phi, s.psi);
      auto [a, g] = dom_rng(theta);
      t.expect(a == s.alpha && g == s.gamma, [&] { return "compose ends differ for " + s.phi.str(); });

      std::vector<std::set<std::size_t>> whole;
      for (const auto& cw : s.phi.per_class()) whole.push_back(cw.fanout_sources());
      auto [a1, a2] = sample_split(r, s.alpha, whole);
      auto [p1, p2] = split_witness(s.phi, a1, a2);
      auto d1 = dom_rng(p1), d2 = dom_rng(p2);
      t.expect(d1.first == a1 && d2.first == a2 && d1.second + d2.second == s.beta,
               [&] { return "split parts have wrong ends for " + s.phi.str(); });
      for (std::size_t c = 0; c < s.phi.table().size(); ++c)
        for (std::size_t x = 0; x < 12; ++x)
          for (std::size_t y = 0; y < 12; ++y)
            t.expect(ext_add(p1.entry(c, x, y), p2.entry(c, x, y)) == s.phi.entry(c, x, y), [&] {
              return "phi1 + phi2 != phi at class " + std::to_string(c) + " (" + std::to_string(x) + "," +
                     std::to_string(y) + ")";
            });
    });
  }
  return t.result("2 witness calculus", "compose keeps dom and rng; split parts add back on a 12 x 12 window");
}

// 3 ------------------------------------------------------------------------

inline CheckResult cardinal_axioms(std::uint64_t seed) {
  Tally t;
  Rng root(seed);
  std::map<std::string, std::size_t> per_law;
  auto law = [&](const std::string& name, std::size_t salt, const std::function<void(Rng&, const ClassTable&)>& body) {
    Rng base = root.fork(salt);
    for (std::size_t k = 0; k < 500; ++k) {
      Rng r = base.fork(k);
      auto tab = ClassTable::omega(r.between(1, 3));
      ++t.cases;
      ++per_law[name];
      guarded(t, [&] { body(r, tab); });
    }
  };
  auto fam = [](Rng& r, const ClassTable& tab) {
    return sample_family<LElem>(r, [&] { return sample_lelem(r, tab); }, false);
  };

  law("A", 1, [&](Rng& r, const ClassTable& tab) {
    auto f = fam(r, tab);
    if (f.items.empty()) f.items.push_back(sample_lelem(r, tab));
    Family<LElem> rest = f;
    rest.items.erase(rest.items.begin());
    t.expect(k_sum(f) == f.items[0] + sum_or_zero(rest, tab), [] { return "(A) unfolding fails"; });
  });
  law("B", 2, [&](Rng& r, const ClassTable& tab) {
    auto f = fam(r, tab), g = fam(r, tab);
    Family<LElem> h;
    std::size_t n = std::max(f.items.size(), g.items.size());
    auto at = [&](const Family<LElem>& x, std::size_t i) {
      return i < x.items.size() || x.tail ? x.at(i) : LElem::zero(tab);
    };
    for (std::size_t i = 0; i < n; ++i) h.items.push_back(at(f, i) + at(g, i));
    if (f.tail || g.tail) h.tail = (f.tail ? *f.tail : LElem::zero(tab)) + (g.tail ? *g.tail : LElem::zero(tab));
    t.expect(sum_or_zero(h, tab) == k_sum(f) + k_sum(g), [] { return "(B) termwise sum fails"; });
  });
  law("C", 3, [&](Rng& r, const ClassTable& tab) {
    auto cs = fam(r, tab);
    auto total = k_sum(cs);
    std::vector<ExtReal> av, bv;
    for (const auto& s : total.values()) {
      if (s.is_finite()) {
        auto parts = sample_split(r, s, 2);
        av.push_back(parts[0]);
        bv.push_back(parts[1]);
        continue;
      }
      auto pick = r.below(3);
      av.push_back(pick == 1 ? sample_finite(r) : ExtReal::infinity());
      bv.push_back(pick == 2 ? sample_finite(r) : ExtReal::infinity());
    }
    LElem a(tab, av), b(tab, bv);
    auto ref = refine(a, b, cs);
    bool ok = k_sum(ref.as) == a && k_sum(ref.bs) == b && k_sum(ref.cs) == total;
    for (std::size_t i = 0; i < ref.cs.items.size(); ++i)
      ok = ok && ref.as.items[i] + ref.bs.items[i] == ref.cs.items[i] && ref.cs.items[i] == cs.at(i);
    if (cs.tail) ok = ok && *ref.as.tail + *ref.bs.tail == *cs.tail;
    t.expect(ok, [&] { return "(C) refinement fails for a = " + a.str() + ", b = " + b.str(); });
  });
  law("D", 4, [&](Rng& r, const ClassTable& tab) {
    auto c = sample_lelem(r, tab);
    auto bs = fam(r, tab);
    auto tail_sum = [&](std::size_t n) {
      Family<LElem> rest{{}, bs.tail, std::nullopt};
      for (std::size_t i = n; i < bs.items.size(); ++i) rest.items.push_back(bs.items[i]);
      return sum_or_zero(rest, tab);
    };
    Family<LElem> as;
    for (std::size_t n = 0; n < bs.items.size(); ++n) as.items.push_back(c + tail_sum(n));
    as.tail = c + tail_sum(bs.items.size());
    auto rem = remainder(as);
    bool ok = true;
    for (std::size_t n = 0; n <= bs.items.size(); ++n) ok = ok && as.at(n) == rem + tail_sum(n);
    t.expect(ok, [] { return "(D) remainder fails"; });
  });
  law("E", 5, [&](Rng& r, const ClassTable& tab) {
    auto f = fam(r, tab);
    auto g = f;
    std::shuffle(g.items.begin(), g.items.end(), r.engine());
    bool ok = k_sum(f) == k_sum(g);
    if (!f.items.empty()) {
      Family<LElem> padded{f.items, LElem::zero(tab), std::nullopt};
      LElem fin = LElem::zero(tab);
      for (const auto& x : f.items) fin = fin + x;
      ok = ok && k_sum(f.items) == fin && k_sum(padded) == fin;
    }
    t.expect(ok, [] { return "(E) finite sums are not order independent"; });
  });
  law("F", 6, [&](Rng& r, const ClassTable& tab) {
    auto a = sample_lelem(r, tab), c = sample_lelem(r, tab);
    auto f = fam(r, tab);
    Family<LElem> g = f;
    for (auto& x : g.items) x = x + sample_lelem(r, tab);
    if (g.tail) g.tail = *g.tail + sample_lelem(r, tab);
    t.expect(leq(LElem::zero(tab), a) && leq(a, a + c) && leq(k_sum(f), k_sum(g)),
             [] { return "(F) order is not compatible with sums"; });
  });
  law("H", 7, [&](Rng& r, const ClassTable& tab) {
    auto a = sample_lelem(r, tab), b = sample_lelem(r, tab);
    t.expect(a + b == meet(a, b) + join(a, b), [&] { return "(H) fails at " + a.str() + ", " + b.str(); });
  });
  law("J", 8, [&](Rng& r, const ClassTable& tab) {
    auto b = sample_lelem(r, tab);
    std::size_t n = r.between(1, 8);
    auto a = n_times(b, n);
    t.expect(divide_l(a, n) == b && n_times(divide_l(a, n), n) == a,
             [&] { return "(J) division not unique at " + b.str() + " / " + std::to_string(n); });
  });

  auto res = t.result("3 cardinal algebra axioms", "(A)-(D), (E), (F), (H), (J) on L(E) samples");
  for (const auto& [name, n] : per_law) res.detail("law " + name, std::to_string(n));
  return res;
}

// 4 ------------------------------------------------------------------------

inline CheckResult horn_transfer(std::uint64_t seed, const std::string& catalog_text) {
  Tally t;
  Rng root(seed);
  std::size_t valid = 0, invalid = 0;
  std::vector<std::pair<std::string, std::string>> cex;
  std::vector<CatalogEntry> cat;
  guarded(t, [&] { cat = parse_catalog(catalog_text); });
  const std::vector<ClassTable> tables = {ClassTable::omega(1), ClassTable::omega(2),
                                          ClassTable({{"f", Card(3)}, {"w", Card::omega()}}),
                                          ClassTable({{"a", Card::omega()}, {"b", Card(1)}, {"c", Card::omega()}})};
  for (std::size_t k = 0; k < cat.size(); ++k) {
    const auto& e = cat[k];
    ++t.cases;
    guarded(t, [&] {
      Rng r = root.fork(k);
      if (e.expect_valid) {
        ++valid;
        auto grid = check_exhaustive(e.axiom, ExtRealAlgebra{}, small_ext_grid());
        auto real = check(e.axiom, ExtRealAlgebra{}, r.fork(0), 300);
        t.expect(grid.pass && real.pass, [&] { return e.name + " fails over the reals"; });
        for (std::size_t i = 0; i < tables.size(); ++i) {
          auto l = check(e.axiom, LElemAlgebra{{tables[i]}}, r.fork(i + 1), 300);
          t.expect(l.pass, [&] { return e.name + " fails over L(E): " + l.lhs + " vs " + l.rhs; });
        }
      } else {
        ++invalid;
        auto v = check(e.axiom, ExtRealAlgebra{}, r.fork(0), 2000);
        if (v.pass) v = check_exhaustive(e.axiom, ExtRealAlgebra{}, small_ext_grid());
        t.expect(!v.pass && v.counterexample.size() == e.axiom.variables.size(),
                 [&] { return e.name + " found no counterexample"; });
        std::string s;
        for (const auto& [name, val] : v.counterexample) s += (s.empty() ? "" : ", ") + name + "=" + val;
        cex.emplace_back(e.name, s);
      }
    });
  }
  t.expect(valid >= 12 && invalid >= 3, [&] { return "catalog too small"; });
  bool has_cancel = std::any_of(cat.begin(), cat.end(), [](const CatalogEntry& e) {
    return e.axiom == parse_axiom("forall a b c. a + c = b + c => a = b");
  });
  t.expect(has_cancel, [] { return "catalog lacks cancellation"; });
  auto res = t.result("4 horn transfer", "valid axioms pass on reals and L(E); invalid ones fail on reals");
  res.detail("valid", std::to_string(valid));
  res.detail("invalid", std::to_string(invalid));
  for (const auto& [n, s] : cex) res.detail("counterexample " + n, s);
  return res;
}

// 5 ------------------------------------------------------------------------

inline CheckResult measure_correspondence(std::uint64_t seed) {
  Tally t;
  Rng root(seed);
  std::size_t ergodic = 0, separated = 0;
  for (std::size_t k = 0; k < 500; ++k) {
    Rng r = root.fork(k);
    ++t.cases;
    guarded(t, [&] {
      auto s = sample_witness_pair(r);
      const auto& tab = s.alpha.table();
      std::vector<ExtReal> w;
      for (std::size_t c = 0; c < tab.size(); ++c) w.push_back(r.coin(1, 3) ? ExtReal(0) : sample_ext(r));
      InvMeasure mu(tab, w);
      t.expect(evaluate(mu, s.alpha) == evaluate(mu, s.beta) && evaluate(mu, s.beta) == evaluate(mu, s.gamma),
               [&] { return "equidecomposable functions measured differently under " + mu.str(); });

      // Ergodicity against meet preservation.
      auto e = is_ergodic(mu);
      if (e.ergodic) {
        ++ergodic;
        LElem top(tab, std::vector<ExtReal>(tab.size(), ExtReal::infinity()));
        bool ok = !evaluate(mu, top).is_zero();
        for (int j = 0; j < 10; ++j) {
          auto a = sample_lelem(r, tab), b = sample_lelem(r, tab);
          ok = ok && evaluate(mu, meet(a, b)) == ext_min(evaluate(mu, a), evaluate(mu, b));
        }
        t.expect(ok, [&] { return "ergodic " + mu.str() + " does not preserve meets"; });
      } else {
        const auto& [a, b] = *e.counterexample;
        bool top_fails = a == b && evaluate(mu, a).is_zero();
        bool meet_fails = !(evaluate(mu, meet(a, b)) == ext_min(evaluate(mu, a), evaluate(mu, b)));
        t.expect(top_fails || meet_fails, [&] { return "bad ergodicity certificate for " + mu.str(); });
      }

      // Separation over a compressible table.
      auto kt = ClassTable::omega(r.between(1, 3));
      for (int tries = 0; tries < 50; ++tries) {
        auto a = sample_kelem(r, kt), b = sample_kelem(r, kt);
        if (leq(a, b)) continue;
        auto sep = separate(a, b);
        ++separated;
        t.expect(evaluate(sep.mu, a) > evaluate(sep.mu, b) && sep.mu.sigma_finite() && is_ergodic(sep.mu).ergodic,
                 [&] { return "separate(" + a.str() + ", " + b.str() + ") failed"; });
        break;
      }
    });
  }
  auto res = t.result("5 measure correspondence", "invariance, ergodicity, separation");
  res.detail("ergodic measures", std::to_string(ergodic));
  res.detail("separations", std::to_string(separated));
  return res;
}

// 6 ------------------------------------------------------------------------

inline CheckResult extension_formula(std::uint64_t seed) {
  Tally t;
  Rng root(seed);
  std::size_t queries = 0;
  for (std::size_t k = 0; k < 200; ++k) {
    Rng r = root.fork(k);
    ++t.cases;
    guarded(t, [&] {
      auto tab = sample_table(r);
      auto A0 = sample_section(r, sample_fn(r, tab));
      // Drop A on some classes so that the saturation misses them.
      std::vector<IndexSet> per;
      std::vector<TailSeq> wts;
      for (std::size_t c = 0; c < tab.size(); ++c) {
        bool keep = r.coin(3, 4);
        per.push_back(keep ? A0.on(c) : IndexSet({}, false));
        ExtReal w = sample_positive_finite(r);
        wts.push_back(per.back().map([&](bool b) { return b ? w : ExtReal(0); }));
      }
      RestrictedMeasure rm{BorelSet(tab, per), WeightedFn(tab, wts)};
      auto closed = extend_measure(rm);
      for (std::size_t c = 0; c < tab.size(); ++c) {
        if (!first_member(rm.A.on(c)))
          t.expect(closed.at(c).is_zero(), [&] { return "extension does not vanish off the saturation"; });
        std::size_t n = tab[c].size.is_omega() ? 24 : tab[c].size.finite();
        for (std::size_t x = 0; x < n; ++x)
          if (rm.A.contains(c, x)) {
            auto v = extend_formula(rm, {{c, x}});
            t.expect(v.exact() && v.value == rm.weight.at(c, x), [&] { return "extension does not restrict to A"; });
          }
      }
      for (int q = 0; q < 50; ++q) {
        std::vector<std::pair<std::size_t, std::size_t>> B;
        std::vector<std::vector<std::size_t>> idx(tab.size());
        std::size_t m = r.between(0, 6);
        for (std::size_t i = 0; i < m; ++i) {
          std::size_t c = r.below(tab.size());
          std::size_t n = tab[c].size.is_omega() ? 24 : tab[c].size.finite();
          std::size_t x = r.below(n);
          B.emplace_back(c, x);
          if (std::find(idx[c].begin(), idx[c].end(), x) == idx[c].end()) idx[c].push_back(x);
        }
        std::vector<IndexSet> bper;
        for (const auto& v : idx) bper.push_back(finite_index_set(v));
        auto v = extend_formula(rm, B, 64);
        ++queries;
        t.expect(v.exact() && v.value == evaluate(closed, BorelSet(tab, bper)),
                 [&] { return "formula " + v.value.str() + " differs from closed form on A = " + rm.A.str(); });
      }
    });
  }
  auto res = t.result("6 extension formula", "truncated formula (64 translates) equals the intensity measure");
  res.detail("queries", std::to_string(queries));
  return res;
}

// 7 ------------------------------------------------------------------------

inline CheckResult duality_round_trip(std::uint64_t seed) {
  Tally t;
  Rng root(seed);
  for (std::size_t k = 0; k < 200; ++k) {
    Rng r = root.fork(k);
    ++t.cases;
    guarded(t, [&] {
      auto tab = ClassTable::omega(r.between(1, 4));
      auto x = sample_lelem(r, tab);
      auto back = dual_reconstruct(iota(x), {ExtReal(1, 2), ExtReal(1), ExtReal(3)});
      t.expect(back.alpha == x && back.ok(), [&] { return "reconstruct(iota x) != x for " + x.str(); });
      DualFn f{tab, sample_lelem(r, tab).values(), {}};
      t.expect(iota(dual_reconstruct(f).alpha).c == f.c, [&] { return "iota(reconstruct f) != f"; });
    });
  }
  return t.result("7 duality round trip", "both composites are the identity");
}

// 8 ------------------------------------------------------------------------

inline CheckResult topological_decomposition(std::uint64_t seed) {
  Tally t;
  Rng r(seed);
  std::vector<std::size_t> counts, brute;
  for (std::size_t n = 0; n <= 4; ++n) {
    counts.push_back(all_topologies(n).size());
    brute.push_back(count_topologies_brute(n));
  }
  t.expect(counts == brute, [] { return "topology counts differ from the closure oracle"; });
  std::size_t exhaustive = 0, sampled = 0;
  auto run = [&](const FinSpace& X, const std::vector<std::size_t>& p) {
    SpaceRel sr(X, p);
    if (saturation_check(sr)) return false;
    ++t.cases;
    guarded(t, [&] {
      auto q = t0_quotient(sr);
      t.expect(q.ok(), [&] { return "quotient postcondition fails on " + X.str() + " / " + sr.partition_str(); });
    });
    return true;
  };
  for (std::size_t n = 0; n <= 3; ++n)
    for (const auto& X : all_topologies(n))
      for (const auto& p : all_partitions(n)) exhaustive += run(X, p);
  auto tops4 = all_topologies(4);
  auto parts4 = all_partitions(4);
  for (int k = 0; k < 400; ++k) sampled += run(r.pick(tops4), r.pick(parts4));
  auto res = t.result("8 topological decomposition", "quotient postconditions; topology counts");
  std::string cs;
  for (auto c : counts) cs += (cs.empty() ? "" : ",") + std::to_string(c);
  res.detail("topologies n=0..4", cs);
  res.detail("saturated pairs n<=3", std::to_string(exhaustive));
  res.detail("saturated sampled pairs n=4", std::to_string(sampled));
  return res;
}

// 9 ------------------------------------------------------------------------

inline CheckResult stably_compact(std::uint64_t) {
  Tally t;
  for (std::size_t n = 0; n <= 4; ++n)
    for (const auto& X : all_topologies(n)) {
      if (!X.is_t0()) continue;
      ++t.cases;
      guarded(t, [&] {
        auto s = stably_compact_roundtrip(X);
        t.expect(s.identity && s.patch_hausdorff && s.order_closed && s.partial_order && s.inverse,
                 [&] { return "round trip fails on " + X.str(); });
      });
    }
  return t.result("9 stably compact round trip", "identity on every T0 space with <= 4 points");
}

// 10 -----------------------------------------------------------------------

inline CheckResult towers(std::uint64_t seed) {
  Tally t;
  Rng root(seed);
  std::size_t bc_open = 0;
  for (std::size_t k = 0; k < 100; ++k) {
    Rng r = root.fork(k);
    ++t.cases;
    guarded(t, [&] {
      auto stages = sample_increasing_tower(r);
      auto c = compare_tower(stages);
      t.expect(c.bijective && c.homeomorphism, [&] { return "h is not a homeomorphism"; });
      auto bc = beck_chevalley(quotient_ladder(stages));
      t.expect(bc.star, [] { return "Beck-Chevalley fails on a quotient ladder"; });
      if (bc.h0_surjective) {
        ++bc_open;
        t.expect(bc.h_open && bc.h_surjective, [] { return "limit map not an open surjection"; });
      }
    });
  }
  for (std::size_t k = 0; k < 100; ++k) {
    Rng r = root.fork(1000 + k);
    ++t.cases;
    guarded(t, [&] {
      auto l = lax_colimit_density(sample_dense_tower(r));
      t.expect(l.projections_dense && l.stages_dense && l.limit_dense, [] { return "lax colimit density fails"; });
    });
  }
  auto res = t.result("10 towers", "h homeomorphism, Beck-Chevalley, lax colimit density");
  res.detail("open surjective limit maps", std::to_string(bc_open));
  return res;
}

// 11 -----------------------------------------------------------------------

inline CheckResult division(std::uint64_t seed) {
  Tally t;
  Rng root(seed);
  std::size_t hits = 0;
  for (std::size_t k = 0; k < 200; ++k) {
    Rng r = root.fork(k);
    ++t.cases;
    guarded(t, [&] {
      auto tab = ClassTable::omega(r.between(1, 3));
      auto a = sample_kelem(r, tab, true);
      std::size_t n = r.between(1, 8);
      auto d = divide(a, n);
      t.expect(n_times(d.quotient, n) == a, [&] { return "n (a / n) != a for " + a.str(); });
      for (int j = 0; j < 30; ++j) {
        auto b = sample_kelem(r, tab);
        if (!(n_times(b, n) == a)) continue;
        ++hits;
        t.expect(b == d.quotient, [&] { return "second solution " + b.str() + " of n b = " + a.str(); });
      }
    });
  }
  auto res = t.result("11 division", "n-fold sum of a / n is a; solutions of n b = a are unique");
  res.detail("independent solutions checked", std::to_string(hits));
  return res;
}

}  // namespace accept

inline constexpr int kCriteria = 11;

/// Runs the criteria in `only` (all when empty), in order.
inline std::vector<CheckResult> run_acceptance(std::uint64_t seed, const std::string& catalog_text,
                                               const std::set<int>& only = {}) {
  using namespace accept;
  std::vector<CheckResult> out;
  auto want = [&](int i) { return only.empty() || only.count(i); };
  // Each criterion draws from its own stream so that subsets reproduce.
  auto s = [&](int i) { return Rng(seed).fork(static_cast<std::uint64_t>(i)).next(); };
  if (want(1)) out.push_back(transport_marginals(s(1)));
  if (want(2)) out.push_back(witness_calculus(s(2)));
  if (want(3)) out.push_back(cardinal_axioms(s(3)));
  if (want(4)) out.push_back(horn_transfer(s(4), catalog_text));
  if (want(5)) out.push_back(measure_correspondence(s(5)));
  if (want(6)) out.push_back(extension_formula(s(6)));
  if (want(7)) out.push_back(duality_round_trip(s(7)));
  if (want(8)) out.push_back(topological_decomposition(s(8)));
  if (want(9)) out.push_back(stably_compact(s(9)));
  if (want(10)) out.push_back(towers(s(10)));
  if (want(11)) out.push_back(division(s(11)));
  return out;
}

}  // namespace eqdec
