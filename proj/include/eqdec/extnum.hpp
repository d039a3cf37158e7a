#pragma once

// Exact arithmetic on the extended nonnegative reals [0, inf], eventually
// periodic sequences over it, and the extended naturals N u {omega}.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eqdec/error.hpp"

namespace eqdec {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(),
                                   [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

}  // namespace detail

/// A value in [0, inf]: either a nonnegative rational (kept in lowest terms by
/// the rational type) or infinity.  Multiplication follows 0 * inf = 0.
class ExtReal {
 public:
  ExtReal() = default;
  ExtReal(int n) : ExtReal(static_cast<long long>(n)) {}
  ExtReal(long long n) : value_(n) {
    require(n >= 0, Errc::InvalidInput, "negative ExtReal");
  }
  explicit ExtReal(Rational q) : value_(std::move(q)) {
    require(value_ >= 0, Errc::InvalidInput, "negative ExtReal");
  }
  ExtReal(long long p, long long q) : ExtReal(Rational(p, q)) {}

  static ExtReal infinity() {
    ExtReal r;
    r.inf_ = true;
    return r;
  }

  bool is_inf() const noexcept { return inf_; }
  bool is_finite() const noexcept { return !inf_; }
  bool is_zero() const noexcept { return !inf_ && value_ == 0; }

  /// The rational value; only meaningful when finite.
  const Rational& value() const {
    require(!inf_, Errc::InfiniteInput, "value() of infinity");
    return value_;
  }

  friend ExtReal operator+(const ExtReal& a, const ExtReal& b) {
    if (a.inf_ || b.inf_) return infinity();
    ExtReal r;
    r.value_ = a.value_ + b.value_;
    return r;
  }
  ExtReal& operator+=(const ExtReal& b) { return *this = *this + b; }

  friend ExtReal operator*(const ExtReal& a, const ExtReal& b) {
    if (a.is_zero() || b.is_zero()) return ExtReal{};
    if (a.inf_ || b.inf_) return infinity();
    ExtReal r;
    r.value_ = a.value_ * b.value_;
    return r;
  }

  /// a - b for b <= a.  inf - finite = inf; inf - inf is rejected.
  ExtReal minus(const ExtReal& b) const {
    require(b <= *this, Errc::InvalidInput, "subtraction would go negative");
    if (inf_) {
      require(!b.inf_, Errc::InvalidInput, "inf - inf is undefined");
      return infinity();
    }
    ExtReal r;
    r.value_ = value_ - b.value_;
    return r;
  }

  /// Division by a positive integer.
  ExtReal divided(std::uint64_t n) const {
    require(n > 0, Errc::InvalidInput, "division by zero");
    if (inf_) return infinity();
    ExtReal r;
    r.value_ = value_ / Rational(static_cast<long long>(n));
    return r;
  }

  friend bool operator==(const ExtReal& a, const ExtReal& b) {
    if (a.inf_ || b.inf_) return a.inf_ == b.inf_;
    return a.value_ == b.value_;
  }
  friend std::strong_ordering operator<=>(const ExtReal& a, const ExtReal& b) {
    if (a.inf_ || b.inf_) return static_cast<int>(a.inf_) <=> static_cast<int>(b.inf_);
    if (a.value_ < b.value_) return std::strong_ordering::less;
    if (b.value_ < a.value_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  std::string str() const {
    if (inf_) return "inf";
    return value_.str();
  }

  /// Literal syntax: integers, `p/q`, and `inf`.
  static ExtReal parse(std::string_view text) {
    auto s = detail::trim(text);
    if (s == "inf" || s == "oo" || s == "omega") return infinity();
    auto slash = s.find('/');
    if (slash == std::string_view::npos) {
      require(detail::all_digits(s), Errc::ParseError, "bad number literal '" + std::string(text) + "'");
      return ExtReal(Rational(Integer(std::string(s))));
    }
    auto num = detail::trim(s.substr(0, slash));
    auto den = detail::trim(s.substr(slash + 1));
    require(detail::all_digits(num) && detail::all_digits(den), Errc::ParseError,
            "bad rational literal '" + std::string(text) + "'");
    Integer d(std::string{den});
    require(d != 0, Errc::ParseError, "zero denominator in '" + std::string(text) + "'");
    return ExtReal(Rational(Integer(std::string{num}), d));
  }

 private:
  bool inf_ = false;
  Rational value_{0};
};

inline std::ostream& operator<<(std::ostream& os, const ExtReal& x) { return os << x.str(); }

inline ExtReal ext_add(const ExtReal& a, const ExtReal& b) { return a + b; }
inline ExtReal ext_scale(const ExtReal& r, const ExtReal& a) { return r * a; }
inline const ExtReal& ext_min(const ExtReal& a, const ExtReal& b) { return b < a ? b : a; }
inline const ExtReal& ext_max(const ExtReal& a, const ExtReal& b) { return a < b ? b : a; }

/// An element of N u {omega}; the counting values of K(E).
class Card {
 public:
  Card() = default;
  Card(std::uint64_t n) : n_(n) {}
  static Card omega() {
    Card c;
    c.omega_ = true;
    return c;
  }

  bool is_omega() const noexcept { return omega_; }
  bool is_zero() const noexcept { return !omega_ && n_ == 0; }
  std::uint64_t finite() const {
    require(!omega_, Errc::InfiniteInput, "finite() of omega");
    return n_;
  }

  friend Card operator+(Card a, Card b) {
    if (a.omega_ || b.omega_) return omega();
    return Card(a.n_ + b.n_);
  }
  friend Card operator*(Card a, Card b) {
    if (a.is_zero() || b.is_zero()) return Card{};
    if (a.omega_ || b.omega_) return omega();
    return Card(a.n_ * b.n_);
  }
  friend bool operator==(Card a, Card b) = default;
  friend std::strong_ordering operator<=>(Card a, Card b) {
    if (a.omega_ || b.omega_) return static_cast<int>(a.omega_) <=> static_cast<int>(b.omega_);
    return a.n_ <=> b.n_;
  }

  ExtReal to_ext() const { return omega_ ? ExtReal::infinity() : ExtReal(static_cast<long long>(n_)); }

  std::string str() const { return omega_ ? "omega" : std::to_string(n_); }

  static Card parse(std::string_view text) {
    auto s = detail::trim(text);
    if (s == "omega" || s == "w" || s == "inf") return omega();
    require(detail::all_digits(s), Errc::ParseError, "bad count literal '" + std::string(text) + "'");
    return Card(std::stoull(std::string(s)));
  }

 private:
  bool omega_ = false;
  std::uint64_t n_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, Card c) { return os << c.str(); }

/// A sequence indexed by N that is periodic from some point on:
/// entry i is prefix[i] for i < |prefix| and cycle[(i - |prefix|) mod |cycle|]
/// afterwards.  The cycle is never empty.
template <class T>
class Eventually {
 public:
  Eventually() : cycle_{T{}} {}
  explicit Eventually(std::vector<T> prefix) : prefix_(std::move(prefix)), cycle_{T{}} {}
  Eventually(std::vector<T> prefix, T tail) : prefix_(std::move(prefix)), cycle_{std::move(tail)} {}
  Eventually(std::vector<T> prefix, std::vector<T> cycle)
      : prefix_(std::move(prefix)), cycle_(std::move(cycle)) {
    require(!cycle_.empty(), Errc::InvalidInput, "empty tail cycle");
  }

  static Eventually constant(T c) { return Eventually({}, std::move(c)); }

  T at(std::size_t i) const {
    if (i < prefix_.size()) return prefix_[i];
    return cycle_[(i - prefix_.size()) % cycle_.size()];
  }
  T operator[](std::size_t i) const { return at(i); }

  const std::vector<T>& prefix() const noexcept { return prefix_; }
  const std::vector<T>& cycle() const noexcept { return cycle_; }
  std::size_t tail_start() const noexcept { return prefix_.size(); }
  std::size_t period() const noexcept { return cycle_.size(); }

  bool tail_is_zero() const {
    return std::all_of(cycle_.begin(), cycle_.end(), [](const T& x) { return x == T{}; });
  }
  bool tail_is_constant() const {
    return std::all_of(cycle_.begin(), cycle_.end(), [&](const T& x) { return x == cycle_.front(); });
  }

  /// Past this index every entry is zero; only defined when the tail is zero.
  std::size_t support_end() const {
    std::size_t n = prefix_.size();
    while (n > 0 && prefix_[n - 1] == T{}) --n;
    return n;
  }

  /// Canonical form: primitive cycle, and no prefix entry that could be
  /// absorbed into the cycle.
  Eventually normalized() const {
    std::vector<T> cyc = cycle_;
    for (std::size_t p = 1; p <= cyc.size(); ++p) {
      if (cyc.size() % p != 0) continue;
      bool ok = true;
      for (std::size_t i = p; i < cyc.size() && ok; ++i) ok = cyc[i] == cyc[i - p];
      if (ok) {
        cyc.resize(p);
        break;
      }
    }
    std::vector<T> pre = prefix_;
    while (!pre.empty() && pre.back() == cyc.back()) {
      pre.pop_back();
      std::rotate(cyc.rbegin(), cyc.rbegin() + 1, cyc.rend());
    }
    return Eventually(std::move(pre), std::move(cyc));
  }

  /// Drops the first k entries.
  Eventually shifted(std::size_t k) const {
    if (k <= prefix_.size()) {
      return Eventually(std::vector<T>(prefix_.begin() + static_cast<std::ptrdiff_t>(k), prefix_.end()), cycle_);
    }
    std::size_t r = (k - prefix_.size()) % cycle_.size();
    std::vector<T> cyc(cycle_.begin() + static_cast<std::ptrdiff_t>(r), cycle_.end());
    cyc.insert(cyc.end(), cycle_.begin(), cycle_.begin() + static_cast<std::ptrdiff_t>(r));
    return Eventually({}, std::move(cyc));
  }

  /// The entry-wise combination f(a[i], b[i]).
  template <class U, class F>
  static auto zip(const Eventually<T>& a, const Eventually<U>& b, F f) {
    using R = decltype(f(a.at(0), b.at(0)));
    std::size_t start = std::max(a.tail_start(), b.tail_start());
    std::size_t per = std::lcm(a.period(), b.period());
    std::vector<R> pre, cyc;
    pre.reserve(start);
    for (std::size_t i = 0; i < start; ++i) pre.push_back(f(a.at(i), b.at(i)));
    for (std::size_t i = start; i < start + per; ++i) cyc.push_back(f(a.at(i), b.at(i)));
    return Eventually<R>(std::move(pre), std::move(cyc)).normalized();
  }

  template <class F>
  auto map(F f) const {
    using R = decltype(f(at(0)));
    std::vector<R> pre, cyc;
    for (const auto& x : prefix_) pre.push_back(f(x));
    for (const auto& x : cycle_) cyc.push_back(f(x));
    return Eventually<R>(std::move(pre), std::move(cyc)).normalized();
  }

  /// An index past which both sequences are periodic with a common period.
  static std::size_t horizon(const Eventually& a, const Eventually& b) {
    return std::max(a.tail_start(), b.tail_start()) + std::lcm(a.period(), b.period());
  }

  friend bool operator==(const Eventually& a, const Eventually& b) {
    std::size_t h = horizon(a, b);
    for (std::size_t i = 0; i < h; ++i)
      if (!(a.at(i) == b.at(i))) return false;
    return true;
  }

 private:
  std::vector<T> prefix_;
  std::vector<T> cycle_;
};

/// Countable sequence over [0, inf] with finite prefix and periodic tail
/// (a constant tail is the period-one case).
using TailSeq = Eventually<ExtReal>;

/// Exact countable sum: the prefix sum, plus inf if the tail has any
/// positive entry.
inline ExtReal seq_sum(const TailSeq& u) {
  ExtReal s;
  for (const auto& x : u.prefix()) s += x;
  for (const auto& x : u.cycle())
    if (!x.is_zero()) return ExtReal::infinity();
  return s;
}

inline TailSeq operator+(const TailSeq& a, const TailSeq& b) {
  return TailSeq::zip(a, b, [](const ExtReal& x, const ExtReal& y) { return x + y; });
}

inline bool seq_has_inf(const TailSeq& u) {
  auto inf = [](const ExtReal& x) { return x.is_inf(); };
  return std::any_of(u.prefix().begin(), u.prefix().end(), inf) ||
         std::any_of(u.cycle().begin(), u.cycle().end(), inf);
}

inline bool seq_zero_or_inf(const TailSeq& u) {
  auto ok = [](const ExtReal& x) { return x.is_zero() || x.is_inf(); };
  return std::all_of(u.prefix().begin(), u.prefix().end(), ok) &&
         std::all_of(u.cycle().begin(), u.cycle().end(), ok);
}

/// `[a,b,c;t]` with a constant tail t, `[a,b;(t0,t1)]` with a periodic tail,
/// `[a,b]` with a zero tail.
inline std::string format_seq(const TailSeq& u) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < u.prefix().size(); ++i) os << (i ? "," : "") << u.prefix()[i];
  os << ';';
  if (u.period() == 1) {
    os << u.cycle().front();
  } else {
    os << '(';
    for (std::size_t i = 0; i < u.cycle().size(); ++i) os << (i ? "," : "") << u.cycle()[i];
    os << ')';
  }
  os << ']';
  return os.str();
}

namespace detail {

inline std::vector<ExtReal> parse_ext_list(std::string_view s) {
  std::vector<ExtReal> out;
  s = trim(s);
  if (s.empty()) return out;
  std::size_t pos = 0;
  while (true) {
    auto comma = s.find(',', pos);
    out.push_back(ExtReal::parse(s.substr(pos, comma == std::string_view::npos ? s.npos : comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace detail

inline TailSeq parse_seq(std::string_view text) {
  auto s = detail::trim(text);
  require(s.size() >= 2 && s.front() == '[' && s.back() == ']', Errc::ParseError,
          "sequence must look like [a,b;tail]: '" + std::string(text) + "'");
  s = s.substr(1, s.size() - 2);
  auto semi = s.find(';');
  if (semi == std::string_view::npos) return TailSeq(detail::parse_ext_list(s));
  auto prefix = detail::parse_ext_list(s.substr(0, semi));
  auto tail = detail::trim(s.substr(semi + 1));
  if (!tail.empty() && tail.front() == '(') {
    require(tail.back() == ')', Errc::ParseError, "unterminated tail cycle in '" + std::string(text) + "'");
    auto cyc = detail::parse_ext_list(tail.substr(1, tail.size() - 2));
    require(!cyc.empty(), Errc::ParseError, "empty tail cycle in '" + std::string(text) + "'");
    return TailSeq(std::move(prefix), std::move(cyc));
  }
  if (tail.empty()) return TailSeq(std::move(prefix));
  return TailSeq(std::move(prefix), ExtReal::parse(tail));
}

struct DyadicBits {
  Integer integer_part;
  std::vector<int> bits;  // bits[i] is the coefficient of 2^-(i+1)

  friend bool operator==(const DyadicBits&, const DyadicBits&) = default;
};

/// Finite binary expansion of a dyadic rational, with no trailing zero bits.
inline DyadicBits dyadic_bits(const ExtReal& a) {
  require(!a.is_inf(), Errc::InfiniteInput, "dyadic_bits of inf");
  const Rational& q = a.value();
  Integer num = boost::multiprecision::numerator(q);
  Integer den = boost::multiprecision::denominator(q);
  require((den & (den - 1)) == 0, Errc::NonDyadic, a.str() + " has a non-dyadic denominator");
  DyadicBits out;
  out.integer_part = num / den;
  Integer rem = num % den;
  while (rem != 0) {
    rem *= 2;
    if (rem >= den) {
      out.bits.push_back(1);
      rem -= den;
    } else {
      out.bits.push_back(0);
    }
  }
  return out;
}

inline bool is_dyadic(const ExtReal& a) {
  if (a.is_inf()) return false;
  Integer den = boost::multiprecision::denominator(a.value());
  return (den & (den - 1)) == 0;
}

/// Reassembles integer_part + sum bits[i] 2^-(i+1).
inline ExtReal from_dyadic_bits(const DyadicBits& d) {
  Rational r(d.integer_part);
  Rational w(1, 2);
  for (int b : d.bits) {
    if (b) r += w;
    w /= 2;
  }
  return ExtReal(r);
}

}  // namespace eqdec
