#pragma once

// Seeded samplers shared by the test suites and the CLI.  Integer draws use
// plain modulo reduction of mt19937_64 output so that a seed yields the same
// stream with every standard library.

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "eqdec/eqrel.hpp"
#include "eqdec/extnum.hpp"
#include "eqdec/klalg.hpp"
#include "eqdec/topdec.hpp"
#include "eqdec/transport.hpp"

namespace eqdec {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }
  /// Uniform-ish draw from [0, n).
  std::size_t below(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(gen_() % n); }
  std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }
  bool coin(unsigned num = 1, unsigned den = 2) { return gen_() % den < num; }

  template <class T>
  const T& pick(const std::vector<T>& xs) {
    return xs[below(xs.size())];
  }

  /// Derived stream for trial k, independent of how many draws came before.
  Rng fork(std::uint64_t k) const {
    std::seed_seq seq{static_cast<std::uint32_t>(seed_base_ >> 32), static_cast<std::uint32_t>(seed_base_),
                      static_cast<std::uint32_t>(k >> 32), static_cast<std::uint32_t>(k)};
    std::mt19937_64 g(seq);
    return Rng(g());
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
  std::uint64_t seed_base_ = gen_();
};

/// The values where absorption and zero behaviour shows up, plus a few
/// small fractions.
inline ExtReal sample_ext(Rng& r) {
  static const std::vector<ExtReal> grid = {ExtReal(0),    ExtReal(1, 3), ExtReal(1, 2),
                                            ExtReal(1),    ExtReal(2),    ExtReal::infinity()};
  if (r.coin(3, 4)) return r.pick(grid);
  return ExtReal(static_cast<long long>(r.below(7)), static_cast<long long>(1 + r.below(6)));
}

inline ExtReal sample_finite(Rng& r) {
  for (;;) {
    auto x = sample_ext(r);
    if (x.is_finite()) return x;
  }
}

inline ExtReal sample_positive_finite(Rng& r) {
  for (;;) {
    auto x = sample_finite(r);
    if (!x.is_zero()) return x;
  }
}

/// Splits `total` (finite) into n nonnegative rationals with random weights.
inline std::vector<ExtReal> sample_split(Rng& r, const ExtReal& total, std::size_t n) {
  std::vector<long long> w(n);
  long long sum = 0;
  for (auto& x : w) {
    x = static_cast<long long>(r.below(4));
    sum += x;
  }
  if (sum == 0) {
    w[r.below(n)] = 1;
    sum = 1;
  }
  std::vector<ExtReal> out;
  for (auto x : w) out.push_back(ExtReal(total.value() * Rational(x, sum)));
  return out;
}

struct TransportSample {
  TailSeq u, v;
  TransportCase expected;
  bool finitely_supported;
};

/// Draws an equal-sum pair whose case is `c`.  Cases I and III use finitely
/// supported inputs.  Cases II and IV (and their transposes) force a finite
/// v with infinite sum, so v carries a periodic tail.
inline TransportSample sample_transport(Rng& r, TransportCase c) {
  auto finite_list = [&](std::size_t n) {
    std::vector<ExtReal> xs(n);
    for (auto& x : xs) x = sample_finite(r);
    return xs;
  };
  auto finite_tail = [&]() {
    std::vector<ExtReal> cyc(r.between(1, 3));
    for (auto& x : cyc) x = sample_finite(r);
    cyc[r.below(cyc.size())] = sample_positive_finite(r);
    return TailSeq(finite_list(r.below(5)), cyc);
  };
  TransportSample s{{}, {}, c, true};
  switch (c) {
    case TransportCase::I: {
      auto a = finite_list(r.between(1, 6));
      auto b = finite_list(r.between(1, 6));
      a[r.below(a.size())] = ExtReal::infinity();
      b[r.below(b.size())] = ExtReal::infinity();
      if (r.coin()) a[r.below(a.size())] = ExtReal::infinity();
      s.u = TailSeq(a);
      s.v = TailSeq(b);
      break;
    }
    case TransportCase::III: {
      auto a = finite_list(r.between(1, 7));
      a[r.below(a.size())] = sample_positive_finite(r);
      ExtReal tot;
      for (auto& x : a) tot += x;
      s.u = TailSeq(a);
      s.v = TailSeq(sample_split(r, tot, r.between(1, 7)));
      break;
    }
    case TransportCase::II:
    case TransportCase::IISym: {
      s.finitely_supported = false;
      std::vector<ExtReal> a(r.between(1, 5));
      for (auto& x : a) x = r.coin() ? ExtReal::infinity() : ExtReal(0);
      a[r.below(a.size())] = ExtReal::infinity();
      // Sometimes infinitely many inf rows.
      s.u = r.coin(1, 3) ? TailSeq(a, std::vector<ExtReal>{ExtReal(0), ExtReal::infinity()}) : TailSeq(a);
      s.v = finite_tail();
      break;
    }
    case TransportCase::IV:
    case TransportCase::IVSym: {
      s.finitely_supported = false;
      auto a = finite_list(r.between(2, 6));
      a[0] = sample_positive_finite(r);
      a[r.between(1, a.size() - 1)] = ExtReal::infinity();
      std::rotate(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(r.below(a.size())), a.end());
      if (r.coin()) {
        s.u = TailSeq(a);  // finite sum of the finite part
      } else {
        s.u = TailSeq(a, std::vector<ExtReal>{sample_positive_finite(r), r.coin() ? ExtReal::infinity() : ExtReal(0)});
      }
      s.v = finite_tail();
      break;
    }
  }
  if (c == TransportCase::IISym || c == TransportCase::IVSym) std::swap(s.u, s.v);
  return s;
}

/// A mixed-case zero plan (u = v = 0), which the case analysis files under II.
inline TransportSample sample_zero_transport(Rng& r) {
  return {TailSeq(std::vector<ExtReal>(r.below(4), ExtReal(0))), TailSeq(std::vector<ExtReal>(r.below(4), ExtReal(0))),
          TransportCase::II, true};
}

// ---------------------------------------------------------------------------
// Relations, functions and witnesses.

/// 1-3 classes, mostly of size omega, occasionally finite.
inline ClassTable sample_table(Rng& r, bool all_omega = false) {
  std::vector<ClassInfo> cs;
  std::size_t n = r.between(1, 3);
  for (std::size_t i = 0; i < n; ++i) {
    Card size = (all_omega || r.coin(3, 4)) ? Card::omega() : Card(r.between(1, 5));
    cs.push_back({"c" + std::to_string(i), size});
  }
  return ClassTable(std::move(cs));
}

inline TailSeq sample_class_seq(Rng& r, const Card& size) {
  if (!size.is_omega()) {
    std::vector<ExtReal> pre(r.below(size.finite() + 1));
    for (auto& x : pre) x = sample_finite(r);
    return TailSeq(std::move(pre));
  }
  std::vector<ExtReal> pre(r.below(4)), cyc(r.between(1, 3));
  for (auto& x : pre) x = sample_ext(r);
  bool zero_tail = r.coin(1, 3);
  for (auto& x : cyc) x = zero_tail ? ExtReal(0) : sample_ext(r);
  return TailSeq(std::move(pre), std::move(cyc));
}

inline WeightedFn sample_fn(Rng& r, const ClassTable& t) {
  std::vector<TailSeq> per;
  for (const auto& c : t.classes()) per.push_back(sample_class_seq(r, c.size));
  return WeightedFn(t, std::move(per));
}

namespace detail {

/// v split into k nonzero pieces (inf splits into inf pieces).
inline std::vector<ExtReal> split_value(Rng& r, const ExtReal& v, std::size_t k) {
  if (v.is_zero()) return {};
  if (v.is_inf()) return std::vector<ExtReal>(k, ExtReal::infinity());
  std::vector<long long> w(k);
  long long sum = 0;
  for (auto& x : w) sum += (x = 1 + static_cast<long long>(r.below(3)));
  std::vector<ExtReal> out;
  for (auto x : w) out.push_back(ExtReal(v.value() * Rational(x, sum)));
  return out;
}

}  // namespace detail

/// A band witness with dom = alpha: every row spreads its mass over a few
/// nearby columns.  Rows listed in `single` keep a single target.
inline Witness sample_band_witness(Rng& r, const WeightedFn& alpha,
                                   const std::vector<std::set<std::size_t>>& single = {}) {
  const auto& t = alpha.table();
  std::vector<ClassWitness> per;
  for (std::size_t c = 0; c < t.size(); ++c) {
    const auto& a = alpha.on(c);
    auto keep_single = [&](std::size_t x) { return c < single.size() && single[c].contains(x); };
    ClassWitness::Sparse sp;
    if (!t[c].size.is_omega()) {
      std::size_t n = t[c].size.finite();
      for (std::size_t x = 0; x < a.support_end(); ++x) {
        auto pieces = detail::split_value(r, a.at(x), keep_single(x) ? 1 : r.between(1, 3));
        for (const auto& w : pieces) sp[{x, r.below(n)}] += w;
      }
      per.emplace_back(std::move(sp));
      continue;
    }
    std::size_t t0 = a.tail_start();
    for (std::size_t x = 0; x < t0; ++x) {
      auto pieces = detail::split_value(r, a.at(x), keep_single(x) ? 1 : r.between(1, 3));
      for (const auto& w : pieces) sp[{x, r.below(x + 5)}] += w;
    }
    std::size_t p = a.period() * r.between(1, 2);
    BandTail band{t0, {}};
    long long lo = -static_cast<long long>(std::min<std::size_t>(t0, 2));
    for (std::size_t k = 0; k < p; ++k) {
      auto pieces = detail::split_value(r, a.at(t0 + k), r.between(1, 3));
      std::map<long long, ExtReal> row;
      for (const auto& w : pieces) row[lo + static_cast<long long>(r.below(static_cast<std::size_t>(4 - lo)))] += w;
      std::vector<TailEntry> es;
      for (const auto& [off, w] : row) es.push_back({false, off, w});
      band.pattern.push_back(std::move(es));
    }
    per.emplace_back(std::move(sp), std::move(band));
  }
  return Witness(t, std::move(per));
}

/// A complete section for alpha: a random index set meeting every class
/// that carries mass.
inline BorelSet sample_section(Rng& r, const WeightedFn& alpha) {
  const auto& t = alpha.table();
  std::vector<IndexSet> per;
  for (std::size_t c = 0; c < t.size(); ++c) {
    std::size_t bound = t[c].size.is_omega() ? 6 : t[c].size.finite();
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < bound; ++i)
      if (r.coin(1, 3)) idx.push_back(i);
    if (idx.empty()) idx.push_back(r.below(bound));
    if (t[c].size.is_omega() && r.coin(1, 3)) {
      std::vector<bool> pre(bound, false), cyc(r.between(1, 3), false);
      for (auto i : idx) pre[i] = true;
      cyc[r.below(cyc.size())] = true;
      per.emplace_back(std::move(pre), std::move(cyc));
    } else {
      per.push_back(finite_index_set(idx));
    }
  }
  return BorelSet(t, std::move(per));
}

/// A witness whose class-0 tail is a fanout from an inf point: alpha puts
/// inf at one index of each omega class and spreads it over a periodic
/// pattern of positive weights.
inline Witness sample_fanout_witness(Rng& r, const ClassTable& t) {
  std::vector<ClassWitness> per;
  for (std::size_t c = 0; c < t.size(); ++c) {
    if (!t[c].size.is_omega()) {
      per.emplace_back();
      continue;
    }
    std::size_t s = r.below(3);
    std::vector<ExtReal> w(r.between(1, 3));
    for (auto& x : w) x = sample_finite(r);
    w[r.below(w.size())] = sample_positive_finite(r);
    per.emplace_back(ClassWitness::Sparse{}, std::nullopt, std::vector<FanoutTail>{FanoutTail{s, r.below(4), w}});
  }
  return Witness(t, std::move(per));
}

enum class WitnessShape { Band, Concentrate, Fanout, Finite };

inline Witness sample_witness_from(Rng& r, const WeightedFn& alpha, WitnessShape shape,
                                   const std::vector<std::set<std::size_t>>& single = {}) {
  switch (shape) {
    case WitnessShape::Concentrate: return concentrate(alpha, sample_section(r, alpha)).witness;
    default: return sample_band_witness(r, alpha, single);
  }
}

struct WitnessPair {
  WeightedFn alpha, beta, gamma;
  Witness phi, psi;
};

/// phi : alpha ~ beta and psi : beta ~ gamma drawn so that the composite
/// stays inside the representable witness family.
inline WitnessPair sample_witness_pair(Rng& r) {
  auto t = sample_table(r);
  auto shape = static_cast<WitnessShape>(r.below(4));
  Witness phi;
  if (shape == WitnessShape::Fanout) {
    phi = sample_fanout_witness(r, t);
  } else if (shape == WitnessShape::Finite) {
    std::vector<TailSeq> per;
    for (const auto& c : t.classes()) {
      auto s = sample_class_seq(r, c.size);
      per.push_back(TailSeq(s.prefix()));
    }
    phi = sample_band_witness(r, WeightedFn(t, std::move(per)));
  } else {
    phi = sample_witness_from(r, sample_fn(r, t), shape);
  }
  auto [alpha, beta] = dom_rng(phi);
  bool has_absolute = false;
  for (const auto& cw : phi.per_class()) has_absolute |= !cw.absolute_targets().empty();
  // An infinite column of phi must meet a single-target row of psi, and a
  // fanout of phi must not meet an absolute target of psi.
  Witness psi = (has_absolute || (shape != WitnessShape::Fanout && r.coin(1, 3)))
                    ? concentrate(beta, sample_section(r, beta)).witness
                    : sample_band_witness(r, beta);
  auto gamma = dom_rng(psi).second;
  return {alpha, beta, gamma, phi, psi};
}

/// alpha = a1 + a2 with a1 a random fraction of alpha in each position.
inline std::pair<WeightedFn, WeightedFn> sample_split(Rng& r, const WeightedFn& alpha,
                                                      const std::vector<std::set<std::size_t>>& whole = {}) {
  std::vector<TailSeq> s1, s2;
  for (std::size_t c = 0; c < alpha.table().size(); ++c) {
    const auto& a = alpha.on(c);
    std::size_t n = a.tail_start() + a.period();
    std::vector<ExtReal> p1, p2;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& v = a.at(i);
      bool keep_whole = c < whole.size() && whole[c].contains(i);
      ExtReal x, y;
      if (v.is_inf()) {
        switch (keep_whole ? r.below(2) : r.below(3)) {
          case 0: x = v; break;
          case 1: y = v; break;
          default: x = v, y = v; break;
        }
      } else if (!v.is_zero()) {
        if (keep_whole) {
          (r.coin() ? x : y) = v;
        } else {
          x = ExtReal(v.value() * Rational(static_cast<long long>(r.below(4)), 3));
          y = v.minus(x);
        }
      }
      p1.push_back(x);
      p2.push_back(y);
    }
    auto cut = [&](std::vector<ExtReal> v) {
      std::vector<ExtReal> pre(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(a.tail_start()));
      std::vector<ExtReal> cyc(v.begin() + static_cast<std::ptrdiff_t>(a.tail_start()), v.end());
      return TailSeq(std::move(pre), std::move(cyc));
    };
    s1.push_back(cut(p1));
    s2.push_back(cut(p2));
  }
  return {WeightedFn(alpha.table(), std::move(s1)), WeightedFn(alpha.table(), std::move(s2))};
}

// ---------------------------------------------------------------------------
// Algebra elements.

inline Card sample_card(Rng& r, bool aperiodic = false) {
  if (aperiodic) return r.coin() ? Card::omega() : Card(0);
  switch (r.below(4)) {
    case 0: return Card(0);
    case 1: return Card::omega();
    default: return Card(r.between(1, 6));
  }
}

inline KElem sample_kelem(Rng& r, const ClassTable& t, bool aperiodic = false) {
  std::vector<Card> v;
  for (std::size_t c = 0; c < t.size(); ++c) v.push_back(sample_card(r, aperiodic));
  return KElem(t, std::move(v));
}

/// Class sums; finite classes get finite sums.
inline LElem sample_lelem(Rng& r, const ClassTable& t) {
  std::vector<ExtReal> v;
  for (const auto& c : t.classes()) v.push_back(c.size.is_omega() ? sample_ext(r) : sample_finite(r));
  return LElem(t, std::move(v));
}

template <class E, class Gen>
Family<E> sample_family(Rng& r, Gen gen, bool with_step = true) {
  Family<E> f;
  std::size_t n = r.below(5);
  for (std::size_t i = 0; i < n; ++i) f.items.push_back(gen());
  if (n == 0 || r.coin()) {
    f.tail = gen();
    if (with_step && r.coin(1, 3)) f.step = gen();
  }
  return f;
}

// ---------------------------------------------------------------------------
// Finite spaces and towers.

/// A random preorder (random relation, transitively closed) as a space.
inline FinSpace sample_space(Rng& r, std::size_t n) {
  std::vector<Mask> up(n);
  for (std::size_t x = 0; x < n; ++x) {
    up[x] = bit(x);
    for (std::size_t y = 0; y < n; ++y)
      if (r.coin(1, 3)) up[x] |= bit(y);
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y)
        if (has(up[x], y) && (up[y] & ~up[x])) up[x] |= up[y], changed = true;
  }
  return FinSpace::from_up(FinSpace::default_names(n), up);
}

inline std::vector<std::size_t> sample_partition(Rng& r, std::size_t n) {
  std::vector<std::size_t> cls(n);
  for (auto& c : cls) c = r.below(n);
  return cls;
}

/// An invariant subset: a random union of classes.
inline Mask sample_invariant(Rng& r, const SpaceRel& sr) {
  Mask m = 0;
  for (std::size_t c = 0; c < sr.class_count(); ++c)
    if (r.coin())
      for (std::size_t x = 0; x < sr.space().size(); ++x)
        if (sr.classes()[x] == c) m |= bit(x);
  return m;
}

/// tau_0 c tau_1 c ... with saturations open at every stage: tau_0 is drawn
/// until it qualifies (the indiscrete topology always does) and each later
/// stage adjoins an invariant set.
inline std::vector<SpaceRel> sample_increasing_tower(Rng& r) {
  std::size_t n = r.between(2, 4);
  auto cls = sample_partition(r, n);
  SpaceRel base(FinSpace::indiscrete(n), cls);
  for (int tries = 0; tries < 20; ++tries) {
    SpaceRel cand(sample_space(r, n), cls);
    if (!saturation_check(cand)) {
      base = cand;
      break;
    }
  }
  std::vector<SpaceRel> stages{base};
  std::size_t k = r.between(1, 3);
  for (std::size_t i = 0; i < k; ++i) {
    const auto& prev = stages.back();
    auto sub = prev.space().opens();
    sub.push_back(sample_invariant(r, prev));
    stages.emplace_back(FinSpace::generated(prev.space().names(), sub), prev.classes());
  }
  return stages;
}

/// A tower whose bonds are continuous with dense image.
inline Tower sample_dense_tower(Rng& r) {
  Tower t;
  t.stages.push_back(sample_space(r, r.between(1, 3)));
  std::size_t k = r.between(1, 3);
  for (std::size_t i = 0; i < k; ++i) {
    const FinSpace Y = t.stages.back();
    bool found = false;
    for (int tries = 0; tries < 200 && !found; ++tries) {
      auto X = sample_space(r, r.between(1, 3));
      PointMap f(X.size());
      for (auto& y : f) y = r.below(Y.size());
      if (is_continuous(X, Y, f) && has_dense_image(X, Y, f)) {
        t.stages.push_back(X);
        t.bonds.push_back(f);
        found = true;
      }
    }
    if (!found) {
      t.stages.push_back(Y);
      t.bonds.push_back(identity_map(Y.size()));
    }
  }
  return t;
}

}  // namespace eqdec
