#pragma once

// K(E) and L(E) over a smooth relation.  Elements are stored in normal
// form (one count or one sum per class); representatives are produced on
// demand so the set-level constructions can be replayed and cross-checked.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "eqdec/eqrel.hpp"
#include "eqdec/extnum.hpp"
#include "eqdec/transport.hpp"

namespace eqdec {

template <class V>
class ClassVec {
 public:
  using value_type = V;

  ClassVec() = default;
  ClassVec(ClassTable t, std::vector<V> vals) : table_(std::move(t)), vals_(std::move(vals)) {
    require(vals_.size() == table_.size(), Errc::TableMismatch, "one value per class expected");
  }

  const ClassTable& table() const noexcept { return table_; }
  std::size_t size() const noexcept { return vals_.size(); }
  const V& at(std::size_t c) const { return vals_.at(c); }
  const std::vector<V>& values() const noexcept { return vals_; }

  bool is_zero() const {
    return std::all_of(vals_.begin(), vals_.end(), [](const V& v) { return v.is_zero(); });
  }

  std::string str() const {
    std::ostringstream os;
    os << "(";
    for (std::size_t c = 0; c < vals_.size(); ++c) os << (c ? "," : "") << vals_[c].str();
    os << ")";
    return os.str();
  }

 protected:
  ClassTable table_;
  std::vector<V> vals_;
};

namespace detail {

inline std::vector<std::string> split_tuple(std::string_view text) {
  auto s = trim(text);
  require(s.size() >= 2 && s.front() == '(' && s.back() == ')', Errc::ParseError,
          "expected a parenthesised tuple, got '" + std::string(text) + "'");
  s = s.substr(1, s.size() - 2);
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::size_t p = 0;
  while (true) {
    auto q = s.find(',', p);
    out.emplace_back(trim(s.substr(p, q == std::string_view::npos ? std::string_view::npos : q - p)));
    if (q == std::string_view::npos) break;
    p = q + 1;
  }
  return out;
}

}  // namespace detail

/// An element of K(E): the number of points per class (E compressible, so
/// every class is infinite).
class KElem : public ClassVec<Card> {
 public:
  KElem() = default;
  KElem(ClassTable t, std::vector<Card> counts) : ClassVec(std::move(t), std::move(counts)) {
    require(table_.all_omega(), Errc::InvalidInput, "K(E) needs every class of size omega");
  }

  static KElem zero(const ClassTable& t) { return KElem(t, std::vector<Card>(t.size())); }
  static KElem of(const BorelSet& A) {
    std::vector<Card> n;
    for (std::size_t c = 0; c < A.table().size(); ++c) n.push_back(A.count(c));
    return KElem(A.table(), std::move(n));
  }
  static KElem parse(const ClassTable& t, std::string_view text) {
    std::vector<Card> n;
    for (const auto& f : detail::split_tuple(text)) n.push_back(Card::parse(f));
    require(n.size() == t.size(), Errc::TableMismatch, "tuple arity differs from the class table");
    return KElem(t, std::move(n));
  }

  /// Initial segment {0..n-1} per class, or the whole class for omega.
  BorelSet representative() const {
    std::vector<IndexSet> per;
    for (const auto& n : vals_) {
      if (n.is_omega()) {
        per.push_back(cofinite_index_set({}));
      } else {
        std::vector<std::size_t> idx(n.finite());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        per.push_back(finite_index_set(idx));
      }
    }
    return BorelSet(table_, std::move(per));
  }

  friend bool operator==(const KElem& a, const KElem& b) { return a.table_ == b.table_ && a.vals_ == b.vals_; }
};

/// An element of L(E): the class sum per class.
class LElem : public ClassVec<ExtReal> {
 public:
  LElem() = default;
  LElem(ClassTable t, std::vector<ExtReal> sums) : ClassVec(std::move(t), std::move(sums)) {}

  static LElem zero(const ClassTable& t) { return LElem(t, std::vector<ExtReal>(t.size())); }
  static LElem of(const WeightedFn& alpha) {
    std::vector<ExtReal> s;
    for (const auto& [label, v] : sigma_E(alpha).sums) s.push_back(v);
    return LElem(alpha.table(), std::move(s));
  }
  static LElem parse(const ClassTable& t, std::string_view text) {
    std::vector<ExtReal> v;
    for (const auto& f : detail::split_tuple(text)) v.push_back(ExtReal::parse(f));
    require(v.size() == t.size(), Errc::TableMismatch, "tuple arity differs from the class table");
    return LElem(t, std::move(v));
  }

  /// A finite sum sits on index 0; inf is spread as weight 1 over an
  /// omega class and sits on index 0 of a finite one.
  WeightedFn representative() const {
    std::vector<TailSeq> per;
    for (std::size_t c = 0; c < vals_.size(); ++c) {
      const auto& v = vals_[c];
      if (v.is_inf() && table_[c].size.is_omega())
        per.emplace_back(std::vector<ExtReal>{}, std::vector<ExtReal>{ExtReal(1)});
      else
        per.emplace_back(std::vector<ExtReal>{v});
    }
    return WeightedFn(table_, std::move(per));
  }

  friend bool operator==(const LElem& a, const LElem& b) { return a.table_ == b.table_ && a.vals_ == b.vals_; }
};

namespace detail {

template <class E>
typename E::value_type top_of() {
  if constexpr (std::is_same_v<E, KElem>) return Card::omega();
  else return ExtReal::infinity();
}

template <class E>
E make_like(const E& shape, std::vector<typename E::value_type> v) {
  return E(shape.table(), std::move(v));
}

}  // namespace detail

template <class E>
E operator+(const E& a, const E& b)
  requires std::is_same_v<E, KElem> || std::is_same_v<E, LElem>
{
  require_same_table(a.table(), b.table());
  std::vector<typename E::value_type> v;
  for (std::size_t c = 0; c < a.size(); ++c) v.push_back(a.at(c) + b.at(c));
  return detail::make_like(a, std::move(v));
}

/// The canonical order; on normal forms it is per class.
template <class E>
bool leq(const E& a, const E& b) {
  require_same_table(a.table(), b.table());
  for (std::size_t c = 0; c < a.size(); ++c)
    if (b.at(c) < a.at(c)) return false;
  return true;
}

/// A countable family: explicit items, then (optionally) the arithmetic
/// continuation tail, tail + step, tail + 2 step, ...  step = 0 replicates
/// the tail omega times.
template <class E>
struct Family {
  std::vector<E> items;
  std::optional<E> tail;
  std::optional<E> step;

  bool infinite() const { return tail.has_value(); }

  E at(std::size_t i) const {
    if (i < items.size()) return items[i];
    require(tail.has_value(), Errc::InvalidInput, "family index out of range");
    E out = *tail;
    if (step)
      for (std::size_t k = items.size(); k < i; ++k) out = out + *step;
    return out;
  }

  const ClassTable& table() const {
    require(!items.empty() || tail, Errc::InvalidInput, "empty family has no table");
    return items.empty() ? tail->table() : items.front().table();
  }
};

namespace detail {

template <class E>
void check_family(const Family<E>& f) {
  const auto& t = f.table();
  for (const auto& x : f.items) require_same_table(t, x.table());
  if (f.tail) require_same_table(t, f.tail->table());
  if (f.step) {
    require(f.tail.has_value(), Errc::InvalidInput, "a step needs a tail");
    require_same_table(t, f.step->table());
  }
}

}  // namespace detail

/// Countable sum.  The infinite continuation contributes the top value on
/// every class where tail or step is nonzero.
template <class E>
E k_sum(const Family<E>& f) {
  detail::check_family(f);
  const auto& t = f.table();
  std::vector<typename E::value_type> v(t.size());
  for (const auto& x : f.items)
    for (std::size_t c = 0; c < t.size(); ++c) v[c] = v[c] + x.at(c);
  if (f.tail)
    for (std::size_t c = 0; c < t.size(); ++c)
      if (!f.tail->at(c).is_zero() || (f.step && !f.step->at(c).is_zero())) v[c] = detail::top_of<E>();
  return E(t, std::move(v));
}

template <class E>
E k_sum(const std::vector<E>& xs) {
  return k_sum(Family<E>{xs, std::nullopt, std::nullopt});
}

template <class E>
E n_times(const E& a, std::size_t n) {
  if (n == 0) return E::zero(a.table());
  return k_sum(std::vector<E>(n, a));
}

/// Invariant partition X = Y u Z with a <= b on Y and a > b on Z.  Ties go to
/// Y.  Entries are class indices.
struct Partition {
  std::vector<std::size_t> Y, Z;
  friend bool operator==(const Partition&, const Partition&) = default;
};

template <class E>
Partition compare_bk(const E& a, const E& b) {
  require_same_table(a.table(), b.table());
  Partition p;
  for (std::size_t c = 0; c < a.size(); ++c) (a.at(c) <= b.at(c) ? p.Y : p.Z).push_back(c);
  return p;
}

namespace detail {

inline bool in(const std::vector<std::size_t>& s, std::size_t c) { return std::find(s.begin(), s.end(), c) != s.end(); }

/// [(A n Y) u (B n Z)] computed on representatives.
inline KElem glue(const KElem& a, const KElem& b, const Partition& p, bool a_on_Y) {
  auto A = a.representative(), B = b.representative();
  std::vector<IndexSet> per;
  for (std::size_t c = 0; c < a.size(); ++c) per.push_back(in(p.Y, c) == a_on_Y ? A.on(c) : B.on(c));
  return KElem::of(BorelSet(a.table(), std::move(per)));
}

inline LElem glue(const LElem& a, const LElem& b, const Partition& p, bool a_on_Y) {
  auto A = a.representative(), B = b.representative();
  std::vector<TailSeq> per;
  for (std::size_t c = 0; c < a.size(); ++c) per.push_back(in(p.Y, c) == a_on_Y ? A.on(c) : B.on(c));
  return LElem::of(WeightedFn(a.table(), std::move(per)));
}

template <class E>
E pointwise(const E& a, const E& b, bool take_min) {
  require_same_table(a.table(), b.table());
  std::vector<typename E::value_type> v;
  for (std::size_t c = 0; c < a.size(); ++c) {
    bool a_le = a.at(c) <= b.at(c);
    v.push_back(a_le == take_min ? a.at(c) : b.at(c));
  }
  return E(a.table(), std::move(v));
}

}  // namespace detail

template <class E>
E meet_formula(const E& a, const E& b) {
  return detail::glue(a, b, compare_bk(a, b), true);
}
template <class E>
E join_formula(const E& a, const E& b) {
  return detail::glue(a, b, compare_bk(a, b), false);
}
template <class E>
E meet_pointwise(const E& a, const E& b) {
  return detail::pointwise(a, b, true);
}
template <class E>
E join_pointwise(const E& a, const E& b) {
  return detail::pointwise(a, b, false);
}

/// L(E) meets and joins split the classes four ways by finiteness of the
/// two sums: both finite take min/max of reals; a single infinite side is
/// the top on its side; both infinite stay infinite.
inline LElem lattice_four_way(const LElem& a, const LElem& b, bool meet) {
  require_same_table(a.table(), b.table());
  std::vector<ExtReal> v;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const auto &x = a.at(c), &y = b.at(c);
    if (x.is_finite() && y.is_finite())
      v.push_back(ExtReal(meet ? std::min(x.value(), y.value()) : std::max(x.value(), y.value())));
    else if (x.is_inf() && y.is_inf())
      v.push_back(x);
    else if (x.is_inf())
      v.push_back(meet ? y : x);
    else
      v.push_back(meet ? x : y);
  }
  return LElem(a.table(), std::move(v));
}

namespace detail {

template <class E>
E agree(const E& r1, const E& r2, const char* what) {
  require(r1 == r2, Errc::Internal, std::string(what) + " routes disagree: " + r1.str() + " vs " + r2.str());
  return r1;
}

}  // namespace detail

template <class E>
E meet(const E& a, const E& b) {
  auto r = detail::agree(meet_formula(a, b), meet_pointwise(a, b), "meet");
  if constexpr (std::is_same_v<E, LElem>) detail::agree(r, lattice_four_way(a, b, true), "meet");
  return r;
}

template <class E>
E join(const E& a, const E& b) {
  auto r = detail::agree(join_formula(a, b), join_pointwise(a, b), "join");
  if constexpr (std::is_same_v<E, LElem>) detail::agree(r, lattice_four_way(a, b, false), "join");
  return r;
}

template <class E>
bool is_increasing(const Family<E>& f) {
  for (std::size_t i = 0; i + 1 < f.items.size(); ++i)
    if (!leq(f.items[i], f.items[i + 1])) return false;
  if (f.tail && !f.items.empty() && !leq(f.items.back(), *f.tail)) return false;
  return true;  // an arithmetic continuation never decreases
}

/// Supremum of the arithmetic continuation: the tail, raised to the top
/// wherever the step is nonzero.
template <class E>
E continuation_sup(const Family<E>& f) {
  E out = *f.tail;
  if (!f.step) return out;
  std::vector<typename E::value_type> v = out.values();
  for (std::size_t c = 0; c < v.size(); ++c)
    if (!f.step->at(c).is_zero()) v[c] = detail::top_of<E>();
  return E(out.table(), std::move(v));
}

/// Increasing chain: nested representatives A_0 c A_1 c ..., each an initial
/// segment; the union is the initial segment of the supremum length.
inline KElem chain_join(const Family<KElem>& f) {
  require(is_increasing(f), Errc::InvalidInput, "chain route needs an increasing family");
  const auto& t = f.table();
  std::vector<IndexSet> uni(t.size(), IndexSet({}, false));
  auto absorb = [&](const KElem& x) {
    auto A = x.representative();
    for (std::size_t c = 0; c < t.size(); ++c) uni[c] = IndexSet::zip(uni[c], A.on(c), [](bool p, bool q) { return p || q; });
  };
  for (const auto& x : f.items) absorb(x);
  if (f.tail) absorb(continuation_sup(f));
  return KElem::of(BorelSet(t, std::move(uni)));
}

inline LElem chain_join(const Family<LElem>& f) {
  require(is_increasing(f), Errc::InvalidInput, "chain route needs an increasing family");
  const auto& t = f.table();
  std::vector<ExtReal> v(t.size());
  for (const auto& x : f.items)
    for (std::size_t c = 0; c < t.size(); ++c) v[c] = ext_max(v[c], x.at(c));
  if (f.tail) {
    auto s = continuation_sup(f);
    for (std::size_t c = 0; c < t.size(); ++c) v[c] = ext_max(v[c], s.at(c));
  }
  return LElem(t, std::move(v));
}

/// General family: running binary joins through the comparison partition.
/// `records` is the least subsequence of indices at which the running join
/// strictly grows; the continuation, if any, is the final record.
template <class E>
struct CountableJoin {
  E value;
  std::vector<std::size_t> records;
  bool continuation_record = false;
};

template <class E>
CountableJoin<E> partition_join(const Family<E>& f) {
  detail::check_family(f);
  CountableJoin<E> out;
  std::optional<E> acc;
  auto feed = [&](const E& x) {
    if (!acc) {
      acc = x;
      return true;
    }
    auto next = join_formula(*acc, x);
    bool grew = !(next == *acc);
    acc = next;
    return grew;
  };
  for (std::size_t i = 0; i < f.items.size(); ++i)
    if (feed(f.items[i])) out.records.push_back(i);
  if (f.tail) out.continuation_record = feed(continuation_sup(f));
  out.value = *acc;
  return out;
}

template <class E>
E countable_join(const Family<E>& f) {
  auto r = partition_join(f).value;
  if (is_increasing(f)) detail::agree(r, chain_join(f), "countable join");
  return r;
}

struct Division {
  KElem quotient;
  std::vector<BorelSet> transversals;
};

/// a / n for aperiodic a: every infinite class is cut into consecutive
/// blocks of size n and transversal r picks the r-th point of each block.
inline Division divide(const KElem& a, std::size_t n) {
  require(n > 0, Errc::InvalidInput, "divide by zero");
  std::vector<std::string> bad;
  for (std::size_t c = 0; c < a.size(); ++c)
    if (!a.at(c).is_zero() && !a.at(c).is_omega()) bad.push_back(a.table()[c].label + "=" + a.at(c).str());
  if (!bad.empty()) {
    std::string msg = "finite nonzero class counts:";
    for (const auto& b : bad) msg += " " + b;
    fail(Errc::NotAperiodic, msg);
  }
  Division d{a, {}};
  for (std::size_t r = 0; r < n; ++r) {
    std::vector<IndexSet> per;
    for (std::size_t c = 0; c < a.size(); ++c) {
      if (a.at(c).is_zero()) {
        per.push_back(IndexSet({}, false));
        continue;
      }
      std::vector<bool> cyc(n, false);
      cyc[r] = true;
      per.emplace_back(std::vector<bool>{}, std::move(cyc));
    }
    d.transversals.emplace_back(a.table(), std::move(per));
  }
  return d;
}

inline LElem real_multiple(const ExtReal& r, const LElem& a) {
  std::vector<ExtReal> v;
  for (const auto& x : a.values()) v.push_back(ext_scale(r, x));
  return LElem(a.table(), std::move(v));
}

/// L(E) is completely divisible: a / q is the unique b with q b = a.
inline LElem divide_l(const LElem& a, std::size_t q) {
  require(q > 0, Errc::InvalidInput, "divide by zero");
  std::vector<ExtReal> v;
  for (const auto& x : a.values())
    v.push_back(x.is_inf() ? x : ExtReal(x.value() / Rational(static_cast<long long>(q))));
  return LElem(a.table(), std::move(v));
}

/// r a = p (a / q) for r = p / q; inf a is omega copies of a.
inline LElem real_multiple_by_division(const ExtReal& r, const LElem& a) {
  if (r.is_inf()) return k_sum(Family<LElem>{{}, a, std::nullopt});
  auto num = numerator(r.value()), den = denominator(r.value());
  auto q = static_cast<std::size_t>(den);
  auto p = static_cast<std::size_t>(num);
  return n_times(divide_l(a, q), p);
}

inline LElem chi(const KElem& a) {
  std::vector<ExtReal> v;
  for (const auto& n : a.values()) v.push_back(n.to_ext());
  return LElem(a.table(), std::move(v));
}

// ---------------------------------------------------------------------------
// Axiom witnesses.

/// Refinement: a + b = sum c_i gives a = sum a_i, b = sum b_i with
/// c_i = a_i + b_i.  The family must replicate its tail.  The output
/// families may list some tail copies explicitly: a finite side cannot take
/// a share of a tail repeated omega times.
struct Refinement {
  Family<LElem> cs, as, bs;
};

inline Refinement refine(const LElem& a, const LElem& b, const Family<LElem>& cs) {
  detail::check_family(cs);
  require(!cs.step || cs.step->is_zero(), Errc::InvalidInput, "refinement needs a replicated tail");
  require((a + b) == k_sum(cs), Errc::SumMismatch, "a + b differs from the sum of the family");
  const auto& t = a.table();
  const std::size_t n = cs.items.size();
  auto tail_at = [&](std::size_t c) { return cs.tail ? cs.tail->at(c) : ExtReal(0); };

  // Explicit tail copies needed so that a finite side fits in the items.
  std::size_t extra = 0;
  for (std::size_t c = 0; c < t.size(); ++c) {
    const auto ct = tail_at(c);
    if (ct.is_zero() || (a.at(c).is_inf() && b.at(c).is_inf())) continue;
    ExtReal need = a.at(c).is_finite() ? a.at(c) : b.at(c), have;
    for (const auto& x : cs.items) have = have + x.at(c);
    std::size_t k = 0;
    while (have < need) have = have + ct, ++k;
    extra = std::max(extra, k);
  }
  const std::size_t m = n + extra;
  std::vector<std::vector<ExtReal>> cv(m, std::vector<ExtReal>(t.size())), av = cv, bv = cv;
  std::vector<ExtReal> at_tail(t.size()), bt_tail(t.size());
  for (std::size_t c = 0; c < t.size(); ++c) {
    std::vector<ExtReal> col;
    for (std::size_t i = 0; i < m; ++i) col.push_back(cv[i][c] = i < n ? cs.items[i].at(c) : tail_at(c));
    const auto ct = tail_at(c);
    if (ct.is_zero()) {
      auto plan = transport(TailSeq({a.at(c), b.at(c)}), TailSeq(col));
      for (std::size_t i = 0; i < m; ++i) av[i][c] = plan.entry(0, i), bv[i][c] = plan.entry(1, i);
    } else if (a.at(c).is_inf() && b.at(c).is_inf()) {
      for (std::size_t i = 0; i < m; ++i) av[i][c] = col[i];
      at_tail[c] = bt_tail[c] = ext_scale(ExtReal(Rational(1, 2)), ct);
    } else {
      // One side finite: fill it greedily from the front, the rest goes to
      // the infinite side together with the whole tail.
      bool a_fin = a.at(c).is_finite();
      ExtReal left = a_fin ? a.at(c) : b.at(c);
      for (std::size_t i = 0; i < m; ++i) {
        ExtReal take = ext_min(left, col[i]);
        left = left.minus(take);
        (a_fin ? av : bv)[i][c] = take;
        (a_fin ? bv : av)[i][c] = col[i].minus(take);
      }
      (a_fin ? bt_tail : at_tail)[c] = ct;
    }
  }
  Refinement out;
  for (std::size_t i = 0; i < m; ++i) {
    out.cs.items.emplace_back(t, cv[i]);
    out.as.items.emplace_back(t, av[i]);
    out.bs.items.emplace_back(t, bv[i]);
  }
  if (cs.tail) {
    out.cs.tail = cs.tail;
    out.as.tail = LElem(t, at_tail);
    out.bs.tail = LElem(t, bt_tail);
  }
  return out;
}

/// Remainder: for a_i = b_i + a_{i+1} the pointwise infimum c of the a_i
/// satisfies a_n = c + sum_{i >= n} b_i.
inline LElem remainder(const Family<LElem>& as) {
  detail::check_family(as);
  const auto& t = as.table();
  std::vector<ExtReal> v(t.size(), ExtReal::infinity());
  for (const auto& x : as.items)
    for (std::size_t c = 0; c < t.size(); ++c) v[c] = ext_min(v[c], x.at(c));
  if (as.tail)
    for (std::size_t c = 0; c < t.size(); ++c) v[c] = ext_min(v[c], as.tail->at(c));
  return LElem(t, std::move(v));
}

}  // namespace eqdec
