#pragma once

// Invariant measures on a smooth relation.  An invariant measure is a
// per-class multiple of counting measure, so it is stored as one intensity
// per class.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "eqdec/eqrel.hpp"
#include "eqdec/extnum.hpp"
#include "eqdec/klalg.hpp"

namespace eqdec {

class InvMeasure : public ClassVec<ExtReal> {
 public:
  InvMeasure() = default;
  InvMeasure(ClassTable t, std::vector<ExtReal> intensity) : ClassVec(std::move(t), std::move(intensity)) {}

  static InvMeasure zero(const ClassTable& t) { return InvMeasure(t, std::vector<ExtReal>(t.size())); }
  /// r times counting measure on class c.
  static InvMeasure counting(const ClassTable& t, std::size_t c, ExtReal r = ExtReal(1)) {
    std::vector<ExtReal> v(t.size());
    v.at(c) = r;
    return InvMeasure(t, std::move(v));
  }
  static InvMeasure parse(const ClassTable& t, std::string_view text) {
    return InvMeasure(t, LElem::parse(t, text).values());
  }

  bool sigma_finite() const {
    for (std::size_t c = 0; c < size(); ++c)
      if (at(c).is_inf()) return false;
    return true;
  }

  friend bool operator==(const InvMeasure& a, const InvMeasure& b) {
    return a.table_ == b.table_ && a.vals_ == b.vals_;
  }
};

inline ExtReal evaluate(const InvMeasure& mu, const LElem& x) {
  require_same_table(mu.table(), x.table());
  ExtReal s;
  for (std::size_t c = 0; c < mu.size(); ++c) s = s + mu.at(c) * x.at(c);
  return s;
}

inline ExtReal evaluate(const InvMeasure& mu, const KElem& x) { return evaluate(mu, chi(x)); }
inline ExtReal evaluate(const InvMeasure& mu, const WeightedFn& alpha) { return evaluate(mu, LElem::of(alpha)); }
inline ExtReal evaluate(const InvMeasure& mu, const BorelSet& A) { return evaluate(mu, A.indicator()); }

/// One point of class c (so mu of it is the intensity of c).
inline LElem point_mass(const ClassTable& t, std::size_t c) {
  std::vector<ExtReal> v(t.size());
  v.at(c) = ExtReal(1);
  return LElem(t, std::move(v));
}

struct ErgodicCheck {
  bool ergodic = false;
  // A failure of meet preservation: mu(a ^ b) != mu(a) ^ mu(b).  For the
  // zero measure a = b = top and the failure is top |-> 0.
  std::optional<std::pair<LElem, LElem>> counterexample;
  std::string str() const;
};

inline ErgodicCheck is_ergodic(const InvMeasure& mu) {
  const auto& t = mu.table();
  std::vector<std::size_t> support;
  for (std::size_t c = 0; c < mu.size(); ++c)
    if (!mu.at(c).is_zero()) support.push_back(c);
  ErgodicCheck out;
  out.ergodic = support.size() == 1;
  if (support.empty()) {
    LElem top(t, std::vector<ExtReal>(t.size(), ExtReal::infinity()));
    out.counterexample = {top, top};
  } else if (support.size() > 1) {
    out.counterexample = {point_mass(t, support[0]), point_mass(t, support[1])};
  }
  return out;
}

inline std::string ErgodicCheck::str() const {
  if (ergodic) return "ergodic";
  std::ostringstream os;
  os << "not ergodic: a=" << counterexample->first.str() << " b=" << counterexample->second.str();
  return os.str();
}

// ---------------------------------------------------------------------------
// Extension from a subset.

/// Z acts on each class: on an omega class through the zigzag bijection
/// N -> Z (0, 1, -1, 2, -2, ...) and translation, on a class of size n by
/// rotation.
inline long long zigzag(std::size_t i) {
  auto k = static_cast<long long>((i + 1) / 2);
  return i % 2 ? k : -k;
}
inline std::size_t unzigzag(long long z) { return z > 0 ? static_cast<std::size_t>(2 * z - 1) : static_cast<std::size_t>(-2 * z); }

inline std::size_t act(const Card& size, long long g, std::size_t i) {
  if (size.is_omega()) return unzigzag(zigzag(i) + g);
  auto n = static_cast<long long>(size.finite());
  return static_cast<std::size_t>((((static_cast<long long>(i) + g) % n) + n) % n);
}

/// The default enumeration of Z: 0, 1, -1, 2, -2, ...
inline std::vector<long long> zigzag_enumeration(std::size_t n) {
  std::vector<long long> g;
  for (std::size_t i = 0; i < n; ++i) g.push_back(zigzag(i));
  return g;
}

struct RestrictedMeasure {
  BorelSet A;
  WeightedFn weight;  // mu({x}) for x in A; zero off A
};

/// Per-class common weight on A; NotInvariantOnA if two A-points of one
/// class carry different weights.
inline std::vector<std::optional<ExtReal>> common_weights(const RestrictedMeasure& m) {
  require_same_table(m.A.table(), m.weight.table());
  const auto& t = m.A.table();
  std::vector<std::optional<ExtReal>> out(t.size());
  std::vector<std::string> bad;
  for (std::size_t c = 0; c < t.size(); ++c) {
    const auto& S = m.A.on(c);
    const auto& w = m.weight.on(c);
    std::size_t h = std::max(S.tail_start(), w.tail_start()) + std::lcm(S.period(), w.period());
    for (std::size_t i = 0; i < h; ++i) {
      if (!S.at(i)) {
        require(w.at(i).is_zero(), Errc::InvalidInput,
                "weight off A at " + t[c].label + "[" + std::to_string(i) + "]");
        continue;
      }
      if (!out[c]) {
        out[c] = w.at(i);
      } else if (!(*out[c] == w.at(i))) {
        bad.push_back(t[c].label + "[" + std::to_string(i) + "]=" + w.at(i).str() + " vs " + out[c]->str());
      }
    }
  }
  if (!bad.empty()) {
    std::string msg = "unequal weights on A:";
    for (const auto& b : bad) msg += " " + b;
    fail(Errc::NotInvariantOnA, msg);
  }
  return out;
}

/// The closed form: intensity = common weight on A in each class, 0 where A
/// misses the class.
inline InvMeasure extend_measure(const RestrictedMeasure& m) {
  auto w = common_weights(m);
  std::vector<ExtReal> v;
  for (const auto& x : w) v.push_back(x.value_or(ExtReal(0)));
  return InvMeasure(m.A.table(), std::move(v));
}

struct FormulaValue {
  ExtReal value;
  // Points of the saturation not reached by any of the first `trunc` pieces.
  std::vector<std::pair<std::size_t, std::size_t>> uncovered;
  bool exact() const { return uncovered.empty(); }
};

/// [mu](B) = sum_i mu(g_i^-1 (B n B_i)), B_i = g_i A minus the earlier
/// translates, for a finite query set B given as (class, index) pairs.
inline FormulaValue extend_formula(const RestrictedMeasure& m, const std::vector<std::pair<std::size_t, std::size_t>>& B,
                                   std::size_t trunc = 64, const std::vector<long long>& order = {}) {
  common_weights(m);
  auto g = order.empty() ? zigzag_enumeration(trunc) : order;
  require(g.size() >= trunc, Errc::InvalidInput, "enumeration shorter than the truncation");
  const auto& t = m.A.table();
  FormulaValue out;
  auto pts = B;
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  for (auto [c, x] : pts) {
    const auto& size = t[c].size;
    require(size.is_omega() || x < size.finite(), Errc::InvalidInput, "query point outside its class");
    if (!first_member(m.A.on(c))) continue;  // off the saturation
    bool hit = false;
    for (std::size_t i = 0; i < trunc && !hit; ++i) {
      // x in B_i iff g_i^-1 x in A (and no earlier translate covers x).
      std::size_t y = act(size, -g[i], x);
      if (m.A.contains(c, y)) {
        out.value = out.value + m.weight.at(c, y);
        hit = true;
      }
    }
    if (!hit) out.uncovered.emplace_back(c, x);
  }
  return out;
}

/// B_i restricted to indices below `window`, for i < trunc; entry [i][c].
inline std::vector<std::vector<std::vector<std::size_t>>> extend_partition(const BorelSet& A, std::size_t trunc,
                                                                            std::size_t window,
                                                                            const std::vector<long long>& order = {}) {
  auto g = order.empty() ? zigzag_enumeration(trunc) : order;
  const auto& t = A.table();
  std::vector<std::vector<std::vector<std::size_t>>> parts(trunc, std::vector<std::vector<std::size_t>>(t.size()));
  for (std::size_t c = 0; c < t.size(); ++c) {
    std::size_t n = t[c].size.is_omega() ? window : std::min<std::size_t>(window, t[c].size.finite());
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t i = 0; i < trunc; ++i)
        if (A.contains(c, act(t[c].size, -g[i], x))) {
          parts[i][c].push_back(x);
          break;
        }
  }
  return parts;
}

// ---------------------------------------------------------------------------
// Separation.

struct Separation {
  InvMeasure mu;
  std::size_t cls = 0;
  bool atomic_branch = false;  // b has no points on the chosen class
};

/// For a not <= b: counting measure on a class where a has more points.
inline Separation separate(const KElem& a, const KElem& b) {
  require_same_table(a.table(), b.table());
  require(!leq(a, b), Errc::AlreadyBelow, a.str() + " <= " + b.str());
  auto Z = compare_bk(a, b).Z;
  std::size_t c = Z.front();
  return {InvMeasure::counting(a.table(), c), c, b.at(c).is_zero()};
}

/// Distinguishes two different elements of L(E) with a counting measure.
inline InvMeasure distinguish(const LElem& a, const LElem& b) {
  require_same_table(a.table(), b.table());
  for (std::size_t c = 0; c < a.size(); ++c)
    if (!(a.at(c) == b.at(c))) return InvMeasure::counting(a.table(), c);
  fail(Errc::InvalidInput, "elements are equal");
}

struct Compressibility {
  bool compressible = true;
  std::optional<InvMeasure> probability;  // uniform on a finite class
};

inline Compressibility is_compressible(const ClassTable& t) {
  for (std::size_t c = 0; c < t.size(); ++c)
    if (!t[c].size.is_omega())
      return {false, InvMeasure::counting(t, c, ExtReal(Rational(1, static_cast<long long>(t[c].size.finite()))))};
  return {};
}

// ---------------------------------------------------------------------------
// Duality.

/// A positively homogeneous map on ergodic sigma-finite measures.  The
/// ergodic measures are r counting_C; f(r counting_C) = r c_C.  The optional
/// threshold presentation describes f^-1((r, inf]) as a union of clauses,
/// each an intersection of atoms {mu : mu(A) > s r}.
struct ThresholdAtom {
  LElem A;
  ExtReal s;  // positive rational
};

struct DualFn {
  ClassTable table;
  std::vector<ExtReal> c;
  std::vector<std::vector<ThresholdAtom>> clauses;

  ExtReal at(const InvMeasure& mu) const;
};

/// sup { r : some clause holds at r } = max over clauses of min over atoms
/// of mu(A) / s.
inline ExtReal presented_value(const std::vector<std::vector<ThresholdAtom>>& clauses, const InvMeasure& mu) {
  ExtReal best;
  for (const auto& cl : clauses) {
    require(!cl.empty(), Errc::InvalidInput, "empty clause");
    ExtReal lo = ExtReal::infinity();
    for (const auto& a : cl) {
      require(a.s.is_finite() && !a.s.is_zero(), Errc::InvalidInput, "thresholds must be positive rationals");
      auto v = evaluate(mu, a.A);
      lo = ext_min(lo, v.is_inf() ? v : ExtReal(v.value() / a.s.value()));
    }
    best = ext_max(best, lo);
  }
  return best;
}

/// f at an ergodic measure r counting_C (or at the zero measure).
inline ExtReal DualFn::at(const InvMeasure& mu) const {
  require_same_table(table, mu.table());
  if (!clauses.empty()) return presented_value(clauses, mu);
  ExtReal s;
  for (std::size_t k = 0; k < c.size(); ++k) s = s + mu.at(k) * c[k];
  return s;
}

inline DualFn from_presentation(const ClassTable& t, std::vector<std::vector<ThresholdAtom>> clauses) {
  DualFn f{t, {}, std::move(clauses)};
  for (std::size_t k = 0; k < t.size(); ++k) f.c.push_back(presented_value(f.clauses, InvMeasure::counting(t, k)));
  return f;
}

inline DualFn iota(const LElem& x) {
  require(x.table().all_omega(), Errc::InvalidInput, "duality needs every class of size omega");
  return DualFn{x.table(), x.values(), {}};
}

/// One sampled ergodic measure r counting_C and the branch it falls in.
struct DualCaseCheck {
  std::size_t cls = 0;
  ExtReal r;
  bool singular = false;  // every atom set has measure 0 or inf
  ExtReal f_value, integral;
  bool ok = false;
};

struct DualReconstruction {
  LElem alpha;
  std::vector<DualCaseCheck> checks;
  bool ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const DualCaseCheck& c) { return c.ok; });
  }
};

/// alpha is read off f at the canonical ergodic measures counting_C.  With
/// a threshold presentation, sampled multiples r counting_C are sorted into
/// the non-singular case (some atom set has finite positive measure, where
/// f must scale by r) and the singular case (f takes values 0 or inf), and
/// f is compared with the integral of alpha in both.
inline DualReconstruction dual_reconstruct(const DualFn& f, const std::vector<ExtReal>& scales = {}) {
  require(f.table.all_omega(), Errc::InvalidInput, "duality needs every class of size omega");
  DualReconstruction out;
  std::vector<ExtReal> v;
  for (std::size_t k = 0; k < f.table.size(); ++k) v.push_back(f.at(InvMeasure::counting(f.table, k)));
  out.alpha = LElem(f.table, std::move(v));
  if (f.clauses.empty()) return out;
  for (std::size_t k = 0; k < f.table.size(); ++k) {
    bool singular = true;
    for (const auto& cl : f.clauses)
      for (const auto& a : cl)
        if (!a.A.at(k).is_zero() && a.A.at(k).is_finite()) singular = false;
    for (const auto& r : scales) {
      require(r.is_finite() && !r.is_zero(), Errc::InvalidInput, "scales must lie in (0, inf)");
      auto mu = InvMeasure::counting(f.table, k, r);
      DualCaseCheck ch{k, r, singular, f.at(mu), evaluate(mu, out.alpha), false};
      bool branch = singular ? (ch.f_value.is_zero() || ch.f_value.is_inf())
                             : ch.f_value == r * f.at(InvMeasure::counting(f.table, k));
      ch.ok = branch && ch.f_value == ch.integral;
      out.checks.push_back(ch);
    }
  }
  return out;
}

}  // namespace eqdec
