#pragma once

// Smooth equivalence relations presented as a list of labelled classes of
// size n or omega, with weighted functions, Borel sets and equidecomposition
// witnesses on them.  Inside a class the points are the indices 0, 1, 2, ...

#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "eqdec/error.hpp"
#include "eqdec/extnum.hpp"
#include "eqdec/transport.hpp"

namespace eqdec {

struct ClassInfo {
  std::string label;
  Card size;

  friend bool operator==(const ClassInfo&, const ClassInfo&) = default;
};

class ClassTable {
 public:
  ClassTable() = default;
  explicit ClassTable(std::vector<ClassInfo> cs) : classes_(std::move(cs)) {
    std::set<std::string> seen;
    for (const auto& c : classes_) {
      require(!c.label.empty(), Errc::InvalidInput, "empty class label");
      require(seen.insert(c.label).second, Errc::InvalidInput, "duplicate class label '" + c.label + "'");
      require(!c.size.is_zero(), Errc::InvalidInput, "class '" + c.label + "' has size 0");
    }
  }

  /// n classes of size omega labelled c0, c1, ...
  static ClassTable omega(std::size_t n) {
    std::vector<ClassInfo> cs;
    for (std::size_t i = 0; i < n; ++i) cs.push_back({"c" + std::to_string(i), Card::omega()});
    return ClassTable(std::move(cs));
  }

  std::size_t size() const noexcept { return classes_.size(); }
  const ClassInfo& operator[](std::size_t i) const { return classes_.at(i); }
  const std::vector<ClassInfo>& classes() const noexcept { return classes_; }

  std::optional<std::size_t> find(std::string_view label) const {
    for (std::size_t i = 0; i < classes_.size(); ++i)
      if (classes_[i].label == label) return i;
    return std::nullopt;
  }
  std::size_t index_of(std::string_view label) const {
    auto i = find(label);
    require(i.has_value(), Errc::InvalidInput, "unknown class '" + std::string(label) + "'");
    return *i;
  }

  bool all_omega() const {
    return std::all_of(classes_.begin(), classes_.end(), [](const ClassInfo& c) { return c.size.is_omega(); });
  }

  friend bool operator==(const ClassTable&, const ClassTable&) = default;

 private:
  std::vector<ClassInfo> classes_;
};

inline void require_same_table(const ClassTable& a, const ClassTable& b) {
  require(a == b, Errc::TableMismatch, "operands live over different class tables");
}

/// A Borel map X -> [0, inf], one eventually periodic sequence per class.
class WeightedFn {
 public:
  WeightedFn() = default;
  explicit WeightedFn(ClassTable t) : table_(std::move(t)), per_(table_.size()) {}
  WeightedFn(ClassTable t, std::vector<TailSeq> per) : table_(std::move(t)), per_(std::move(per)) {
    require(per_.size() == table_.size(), Errc::TableMismatch, "one sequence per class expected");
    for (std::size_t c = 0; c < per_.size(); ++c) {
      per_[c] = per_[c].normalized();
      check_fits(c, per_[c]);
    }
  }

  const ClassTable& table() const noexcept { return table_; }
  const TailSeq& on(std::size_t c) const { return per_.at(c); }
  const std::vector<TailSeq>& per_class() const noexcept { return per_; }
  ExtReal at(std::size_t c, std::size_t i) const { return per_.at(c).at(i); }
  ExtReal class_sum(std::size_t c) const { return seq_sum(per_.at(c)); }

  WeightedFn with(std::size_t c, TailSeq s) const {
    WeightedFn out = *this;
    out.per_.at(c) = s.normalized();
    out.check_fits(c, out.per_[c]);
    return out;
  }

  bool is_zero() const {
    return std::all_of(per_.begin(), per_.end(), [](const TailSeq& s) { return s.tail_is_zero() && s.support_end() == 0; });
  }

  friend WeightedFn operator+(const WeightedFn& a, const WeightedFn& b) {
    require_same_table(a.table_, b.table_);
    std::vector<TailSeq> out;
    for (std::size_t c = 0; c < a.per_.size(); ++c) out.push_back(a.per_[c] + b.per_[c]);
    return WeightedFn(a.table_, std::move(out));
  }

  friend bool operator==(const WeightedFn& a, const WeightedFn& b) {
    return a.table_ == b.table_ && a.per_ == b.per_;
  }

  std::string str() const {
    std::ostringstream os;
    for (std::size_t c = 0; c < per_.size(); ++c) os << (c ? " " : "") << table_[c].label << "=" << format_seq(per_[c]);
    return os.str();
  }

 private:
  void check_fits(std::size_t c, const TailSeq& s) const {
    const auto& size = table_[c].size;
    if (size.is_omega()) return;
    require(s.tail_is_zero() && s.support_end() <= size.finite(), Errc::InvalidInput,
            "function on finite class '" + table_[c].label + "' reaches past its size");
  }

  ClassTable table_;
  std::vector<TailSeq> per_;
};

using IndexSet = Eventually<bool>;

inline IndexSet finite_index_set(const std::vector<std::size_t>& idx) {
  std::size_t n = idx.empty() ? 0 : *std::max_element(idx.begin(), idx.end()) + 1;
  std::vector<bool> pre(n, false);
  for (auto i : idx) pre[i] = true;
  return IndexSet(std::move(pre), false).normalized();
}

inline IndexSet cofinite_index_set(const std::vector<std::size_t>& excluded) {
  std::size_t n = excluded.empty() ? 0 : *std::max_element(excluded.begin(), excluded.end()) + 1;
  std::vector<bool> pre(n, true);
  for (auto i : excluded) pre[i] = false;
  return IndexSet(std::move(pre), true).normalized();
}

/// Least member, if any.
inline std::optional<std::size_t> first_member(const IndexSet& s) {
  for (std::size_t i = 0; i < s.tail_start() + s.period(); ++i)
    if (s.at(i)) return i;
  return std::nullopt;
}

inline Card index_set_count(const IndexSet& s) {
  for (bool b : s.cycle())
    if (b) return Card::omega();
  return Card(static_cast<std::uint64_t>(std::count(s.prefix().begin(), s.prefix().end(), true)));
}

/// `finite{1,2}`, `cofinite{0}`, or `pattern[1,0;(0,1)]` with 0/1 entries
/// in the sequence syntax.
inline std::string format_index_set(const IndexSet& s0) {
  auto s = s0.normalized();
  std::ostringstream os;
  bool tail_const = s.period() == 1;
  if (tail_const) {
    bool t = s.cycle().front();
    os << (t ? "cofinite{" : "finite{");
    bool first = true;
    for (std::size_t i = 0; i < s.prefix().size(); ++i)
      if (s.prefix()[i] != t) {
        os << (first ? "" : ",") << i;
        first = false;
      }
    os << '}';
    return os.str();
  }
  os << "pattern[";
  for (std::size_t i = 0; i < s.prefix().size(); ++i) os << (i ? "," : "") << (s.prefix()[i] ? 1 : 0);
  os << ";(";
  for (std::size_t i = 0; i < s.cycle().size(); ++i) os << (i ? "," : "") << (s.cycle()[i] ? 1 : 0);
  os << ")]";
  return os.str();
}

namespace detail {

inline std::vector<std::size_t> parse_index_list(std::string_view s) {
  std::vector<std::size_t> out;
  s = trim(s);
  if (s.empty()) return out;
  std::size_t pos = 0;
  while (true) {
    auto comma = s.find(',', pos);
    auto item = trim(s.substr(pos, comma == std::string_view::npos ? s.npos : comma - pos));
    require(all_digits(item), Errc::ParseError, "bad index '" + std::string(item) + "'");
    out.push_back(std::stoull(std::string(item)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace detail

inline IndexSet parse_index_set(std::string_view text) {
  auto s = detail::trim(text);
  auto braced = [&](std::string_view kw) -> std::optional<std::string_view> {
    if (s.substr(0, kw.size()) != kw) return std::nullopt;
    auto rest = detail::trim(s.substr(kw.size()));
    require(rest.size() >= 2 && rest.front() == '{' && rest.back() == '}', Errc::ParseError,
            "expected " + std::string(kw) + "{...} in '" + std::string(text) + "'");
    return rest.substr(1, rest.size() - 2);
  };
  if (auto b = braced("cofinite")) return cofinite_index_set(detail::parse_index_list(*b));
  if (auto b = braced("finite")) return finite_index_set(detail::parse_index_list(*b));
  if (s.substr(0, 7) == "pattern") {
    auto seq = parse_seq(s.substr(7));
    auto bit = [&](const ExtReal& x) {
      require(x == ExtReal(0) || x == ExtReal(1), Errc::ParseError, "pattern entries must be 0 or 1");
      return x == ExtReal(1);
    };
    return seq.map(bit);
  }
  fail(Errc::ParseError, "expected finite{..}, cofinite{..} or pattern[..] in '" + std::string(text) + "'");
}

/// A Borel subset of X: one eventually periodic index set per class.
class BorelSet {
 public:
  BorelSet() = default;
  explicit BorelSet(ClassTable t) : table_(std::move(t)), per_(table_.size(), IndexSet({}, false)) {}
  BorelSet(ClassTable t, std::vector<IndexSet> per) : table_(std::move(t)), per_(std::move(per)) {
    require(per_.size() == table_.size(), Errc::TableMismatch, "one index set per class expected");
    for (std::size_t c = 0; c < per_.size(); ++c) {
      per_[c] = per_[c].normalized();
      const auto& size = table_[c].size;
      if (size.is_omega()) continue;
      require(per_[c].period() == 1 && !per_[c].cycle().front() && per_[c].prefix().size() <= size.finite(),
              Errc::InvalidInput, "set on finite class '" + table_[c].label + "' must be a finite set of indices < size");
    }
  }

  const ClassTable& table() const noexcept { return table_; }
  const IndexSet& on(std::size_t c) const { return per_.at(c); }
  bool contains(std::size_t c, std::size_t i) const { return per_.at(c).at(i); }
  Card count(std::size_t c) const { return index_set_count(per_.at(c)); }

  WeightedFn indicator() const {
    std::vector<TailSeq> out;
    for (const auto& s : per_) out.push_back(s.map([](bool b) { return b ? ExtReal(1) : ExtReal(0); }));
    return WeightedFn(table_, std::move(out));
  }

  friend bool operator==(const BorelSet& a, const BorelSet& b) { return a.table_ == b.table_ && a.per_ == b.per_; }

  std::string str() const {
    std::ostringstream os;
    for (std::size_t c = 0; c < per_.size(); ++c)
      os << (c ? " " : "") << table_[c].label << "=" << format_index_set(per_[c]);
    return os.str();
  }

 private:
  ClassTable table_;
  std::vector<IndexSet> per_;
};

// ---------------------------------------------------------------------------
// Witnesses.

/// One entry of a periodic row pattern: column x + pos (relative) or the
/// fixed column pos (absolute).
struct TailEntry {
  bool absolute = false;
  long long pos = 0;
  ExtReal w;

  friend bool operator==(const TailEntry&, const TailEntry&) = default;
};

/// Rows x >= start carry the entries pattern[(x - start) mod period].
struct BandTail {
  std::size_t start = 0;
  std::vector<std::vector<TailEntry>> pattern;

  std::size_t period() const { return pattern.size(); }
  friend bool operator==(const BandTail&, const BandTail&) = default;
};

/// Row `source` carries weights[(y - start) mod period] in every column
/// y >= start: one point spreads over the rest of its class.
struct FanoutTail {
  std::size_t source = 0;
  std::size_t start = 0;
  std::vector<ExtReal> weights;

  friend bool operator==(const FanoutTail&, const FanoutTail&) = default;
};

using Line = std::map<std::size_t, ExtReal>;

/// The restriction of a witness phi : E -> [0, inf] to one class: finitely
/// many explicit entries plus an optional band tail and fanout rows.
class ClassWitness {
 public:
  using Sparse = std::map<std::pair<std::size_t, std::size_t>, ExtReal>;

  ClassWitness() = default;
  explicit ClassWitness(Sparse sparse, std::optional<BandTail> band = std::nullopt,
                        std::vector<FanoutTail> fanouts = {})
      : band_(std::move(band)), fanouts_(std::move(fanouts)) {
    for (auto& [k, w] : sparse)
      if (!w.is_zero()) sparse_.emplace(k, w);
    for (const auto& [k, w] : sparse_) by_col_.emplace(std::make_pair(k.second, k.first), w);
    if (band_) {
      require(band_->period() > 0, Errc::InvalidInput, "band tail needs a nonempty pattern");
      bool any = false;
      for (auto& row : band_->pattern) {
        std::erase_if(row, [](const TailEntry& e) { return e.w.is_zero(); });
        for (const auto& e : row) {
          require(e.absolute ? e.pos >= 0 : static_cast<long long>(band_->start) + e.pos >= 0, Errc::InvalidInput,
                  "band entry points to a negative column");
          any = true;
        }
      }
      if (!any) band_.reset();
    }
    std::set<std::size_t> sources;
    for (const auto& f : fanouts_) {
      require(!f.weights.empty(), Errc::InvalidInput, "fanout tail needs weights");
      require(sources.insert(f.source).second, Errc::InvalidInput, "duplicate fanout source");
    }
    std::erase_if(fanouts_, [](const FanoutTail& f) {
      return std::all_of(f.weights.begin(), f.weights.end(), [](const ExtReal& w) { return w.is_zero(); });
    });
  }

  const Sparse& sparse() const noexcept { return sparse_; }
  const std::optional<BandTail>& band() const noexcept { return band_; }
  const std::vector<FanoutTail>& fanouts() const noexcept { return fanouts_; }
  bool has_tail() const noexcept { return band_.has_value() || !fanouts_.empty(); }

  std::size_t period() const {
    std::size_t p = band_ ? band_->period() : 1;
    for (const auto& f : fanouts_) p = std::lcm(p, f.weights.size());
    return p;
  }

  long long min_offset() const { return offset_bound(false); }
  long long max_offset() const { return offset_bound(true); }

  std::set<std::size_t> absolute_targets() const {
    std::set<std::size_t> out;
    if (band_)
      for (const auto& row : band_->pattern)
        for (const auto& e : row)
          if (e.absolute) out.insert(static_cast<std::size_t>(e.pos));
    return out;
  }
  std::set<std::size_t> fanout_sources() const {
    std::set<std::size_t> out;
    for (const auto& f : fanouts_) out.insert(f.source);
    return out;
  }

  /// Rows at or beyond this index hold only band entries, and every
  /// absolute target and fanout source lies below it.
  std::size_t horizon() const {
    std::size_t h = 0;
    for (const auto& [k, w] : sparse_) h = std::max({h, k.first + 1, k.second + 1});
    if (band_) h = std::max(h, band_->start);
    for (auto t : absolute_targets()) h = std::max(h, t + 1);
    for (const auto& f : fanouts_) h = std::max({h, f.source + 1, f.start});
    return h;
  }

  ExtReal entry(std::size_t x, std::size_t y) const {
    ExtReal s;
    if (auto it = sparse_.find({x, y}); it != sparse_.end()) s += it->second;
    if (band_ && x >= band_->start)
      for (const auto& e : band_->pattern[(x - band_->start) % band_->period()])
        if (target(e, x) == y) s += e.w;
    for (const auto& f : fanouts_)
      if (x == f.source && y >= f.start) s += f.weights[(y - f.start) % f.weights.size()];
    return s;
  }

  bool row_is_finite(std::size_t x) const {
    return std::none_of(fanouts_.begin(), fanouts_.end(), [&](const FanoutTail& f) { return f.source == x; });
  }
  bool col_is_finite(std::size_t y) const { return !absolute_targets().contains(y); }

  /// Nonzero entries of a row with finitely many of them.
  Line row(std::size_t x) const {
    require(row_is_finite(x), Errc::UnrepresentableSums, "row " + std::to_string(x) + " is infinite");
    Line out;
    for (auto it = sparse_.lower_bound({x, 0}); it != sparse_.end() && it->first.first == x; ++it)
      out[it->first.second] += it->second;
    if (band_ && x >= band_->start)
      for (const auto& e : band_->pattern[(x - band_->start) % band_->period()]) out[target(e, x)] += e.w;
    return out;
  }

  Line col(std::size_t y) const {
    require(col_is_finite(y), Errc::UnrepresentableSums, "column " + std::to_string(y) + " is infinite");
    Line out;
    for (auto it = by_col_.lower_bound({y, 0}); it != by_col_.end() && it->first.first == y; ++it)
      out[it->first.second] += it->second;
    if (band_) {
      const auto p = static_cast<long long>(band_->period());
      const auto st = static_cast<long long>(band_->start);
      for (long long r = 0; r < p; ++r)
        for (const auto& e : band_->pattern[static_cast<std::size_t>(r)]) {
          if (e.absolute) continue;
          long long x = static_cast<long long>(y) - e.pos;
          if (x >= st && (x - st) % p == r) out[static_cast<std::size_t>(x)] += e.w;
        }
    }
    for (const auto& f : fanouts_)
      if (y >= f.start) out[f.source] += f.weights[(y - f.start) % f.weights.size()];
    std::erase_if(out, [](const auto& kv) { return kv.second.is_zero(); });
    return out;
  }

  /// Row x as a sequence over column indices, infinite rows included.
  TailSeq row_seq(std::size_t x) const {
    if (row_is_finite(x)) return line_seq(row(x));
    std::size_t h = horizon();
    std::size_t p = period();
    std::vector<ExtReal> pre, cyc;
    for (std::size_t y = 0; y < h; ++y) pre.push_back(entry(x, y));
    for (std::size_t y = h; y < h + p; ++y) cyc.push_back(entry(x, y));
    return TailSeq(std::move(pre), std::move(cyc)).normalized();
  }

  TailSeq col_seq(std::size_t y) const {
    if (col_is_finite(y)) return line_seq(col(y));
    std::size_t h = horizon();
    std::size_t p = period();
    std::vector<ExtReal> pre, cyc;
    for (std::size_t x = 0; x < h; ++x) pre.push_back(entry(x, y));
    for (std::size_t x = h; x < h + p; ++x) cyc.push_back(entry(x, y));
    return TailSeq(std::move(pre), std::move(cyc)).normalized();
  }

  ExtReal row_sum(std::size_t x) const {
    if (!row_is_finite(x)) return seq_sum(row_seq(x));
    ExtReal s;
    for (const auto& [y, w] : row(x)) s += w;
    return s;
  }
  ExtReal col_sum(std::size_t y) const {
    if (!col_is_finite(y)) return seq_sum(col_seq(y));
    ExtReal s;
    for (const auto& [x, w] : col(y)) s += w;
    return s;
  }

  /// (dom, rng) on this class.
  std::pair<TailSeq, TailSeq> dom_rng() const {
    std::size_t h = horizon() + static_cast<std::size_t>(std::max(0LL, max_offset()));
    std::size_t p = period();
    std::vector<ExtReal> dpre, dcyc, rpre, rcyc;
    for (std::size_t i = 0; i < h; ++i) {
      dpre.push_back(row_sum(i));
      rpre.push_back(col_sum(i));
    }
    for (std::size_t i = h; i < h + p; ++i) {
      dcyc.push_back(row_sum(i));
      rcyc.push_back(col_sum(i));
    }
    return {TailSeq(std::move(dpre), std::move(dcyc)).normalized(), TailSeq(std::move(rpre), std::move(rcyc)).normalized()};
  }

  /// Entrywise comparison on the square [0, n)^2.
  bool agrees_on(const ClassWitness& other, std::size_t n) const {
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y)
        if (!(entry(x, y) == other.entry(x, y))) return false;
    return true;
  }

  std::string str() const {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (const auto& [k, w] : sparse_) {
      os << (first ? "" : ", ") << '(' << k.first << ',' << k.second << "):" << w;
      first = false;
    }
    os << '}';
    if (band_) {
      os << " band from " << band_->start << " [";
      for (std::size_t r = 0; r < band_->period(); ++r) {
        os << (r ? " | " : "");
        for (std::size_t k = 0; k < band_->pattern[r].size(); ++k) {
          const auto& e = band_->pattern[r][k];
          os << (k ? " " : "") << (e.absolute ? "@" : (e.pos >= 0 ? "+" : "")) << e.pos << ':' << e.w;
        }
      }
      os << ']';
    }
    for (const auto& f : fanouts_) {
      os << " fanout " << f.source << " from " << f.start << " [";
      for (std::size_t k = 0; k < f.weights.size(); ++k) os << (k ? "," : "") << f.weights[k];
      os << ']';
    }
    return os.str();
  }

 private:
  static std::size_t target(const TailEntry& e, std::size_t x) {
    return e.absolute ? static_cast<std::size_t>(e.pos) : static_cast<std::size_t>(static_cast<long long>(x) + e.pos);
  }

  static TailSeq line_seq(const Line& l) {
    std::size_t n = l.empty() ? 0 : l.rbegin()->first + 1;
    std::vector<ExtReal> v(n);
    for (const auto& [k, w] : l) v[k] = w;
    return TailSeq(std::move(v));
  }

  long long offset_bound(bool upper) const {
    long long b = 0;
    bool any = false;
    if (band_)
      for (const auto& row : band_->pattern)
        for (const auto& e : row)
          if (!e.absolute) {
            b = any ? (upper ? std::max(b, e.pos) : std::min(b, e.pos)) : e.pos;
            any = true;
          }
    return b;
  }

  Sparse sparse_;
  Sparse by_col_;  // (column, row) -> weight
  std::optional<BandTail> band_;
  std::vector<FanoutTail> fanouts_;
};

namespace detail {

/// Builds a ClassWitness from a row oracle.  Rows below R (and the fanout
/// rows, below column R) become explicit entries; rows R, R+1, ... must
/// repeat with period p, entries in `absolute` columns staying put and all
/// others moving with the row.  Periodicity is checked over two further
/// periods; a mismatch means the result has no finite description here.
struct RowOracle {
  std::function<Line(std::size_t)> finite_row;
  std::function<ExtReal(std::size_t, std::size_t)> entry;  // used for fanout rows
  std::set<std::size_t> fan_sources;
  std::set<std::size_t> absolute;
};

inline ClassWitness materialize(const RowOracle& o, std::size_t R, std::size_t p,
                                std::optional<std::size_t> class_size = std::nullopt) {
  ClassWitness::Sparse sparse;
  std::size_t rows_below = class_size ? *class_size : R;
  for (std::size_t x = 0; x < rows_below; ++x) {
    if (o.fan_sources.contains(x)) continue;
    for (const auto& [y, w] : o.finite_row(x))
      if (!w.is_zero()) sparse[{x, y}] = w;
  }
  if (class_size) {
    for (std::size_t x : o.fan_sources)
      for (std::size_t y = 0; y < *class_size; ++y)
        if (auto w = o.entry(x, y); !w.is_zero()) sparse[{x, y}] = w;
    return ClassWitness(std::move(sparse));
  }
  for (auto s : o.fan_sources) require(s < R, Errc::Internal, "fanout source beyond materialization start");
  for (auto t : o.absolute) require(t < R, Errc::Internal, "absolute target beyond materialization start");

  auto unrepresentable = [](const std::string& what) {
    fail(Errc::UnrepresentableSums, what + " does not settle into a periodic pattern");
  };

  std::vector<FanoutTail> fans;
  for (std::size_t s : o.fan_sources) {
    for (std::size_t y = 0; y < R; ++y)
      if (auto w = o.entry(s, y); !w.is_zero()) sparse[{s, y}] = w;
    FanoutTail f{s, R, {}};
    for (std::size_t k = 0; k < p; ++k) f.weights.push_back(o.entry(s, R + k));
    for (std::size_t k = p; k < 3 * p; ++k)
      if (!(o.entry(s, R + k) == f.weights[k % p])) unrepresentable("fanout row " + std::to_string(s));
    fans.push_back(std::move(f));
  }

  auto pattern_of = [&](std::size_t x) {
    std::vector<TailEntry> out;
    for (const auto& [y, w] : o.finite_row(x)) {
      if (w.is_zero()) continue;
      if (o.absolute.contains(y))
        out.push_back({true, static_cast<long long>(y), w});
      else
        out.push_back({false, static_cast<long long>(y) - static_cast<long long>(x), w});
    }
    return out;
  };
  BandTail band{R, {}};
  for (std::size_t k = 0; k < p; ++k) band.pattern.push_back(pattern_of(R + k));
  for (std::size_t k = p; k < 3 * p; ++k)
    if (!(pattern_of(R + k) == band.pattern[k % p])) unrepresentable("row " + std::to_string(R + k));

  return ClassWitness(std::move(sparse), std::move(band), std::move(fans));
}

inline std::size_t span(const ClassWitness& w) {
  return static_cast<std::size_t>(std::max(0LL, w.max_offset()) + std::max(0LL, -w.min_offset()));
}

}  // namespace detail

/// A witness phi : E -> [0, inf], one ClassWitness per class.
class Witness {
 public:
  Witness() = default;
  explicit Witness(ClassTable t) : table_(std::move(t)), per_(table_.size()) {}
  Witness(ClassTable t, std::vector<ClassWitness> per) : table_(std::move(t)), per_(std::move(per)) {
    require(per_.size() == table_.size(), Errc::TableMismatch, "one class witness per class expected");
    for (std::size_t c = 0; c < per_.size(); ++c) {
      const auto& size = table_[c].size;
      if (size.is_omega()) continue;
      require(!per_[c].has_tail() && per_[c].horizon() <= size.finite(), Errc::InvalidInput,
              "witness on finite class '" + table_[c].label + "' leaves the class");
    }
  }

  const ClassTable& table() const noexcept { return table_; }
  const ClassWitness& on(std::size_t c) const { return per_.at(c); }
  const std::vector<ClassWitness>& per_class() const noexcept { return per_; }
  ExtReal entry(std::size_t c, std::size_t x, std::size_t y) const { return per_.at(c).entry(x, y); }

  bool agrees_on(const Witness& other, std::size_t n) const {
    if (!(table_ == other.table_)) return false;
    for (std::size_t c = 0; c < per_.size(); ++c) {
      std::size_t m = table_[c].size.is_omega() ? n : std::min<std::size_t>(n, table_[c].size.finite());
      if (!per_[c].agrees_on(other.per_[c], m)) return false;
    }
    return true;
  }

  std::string str() const {
    std::ostringstream os;
    for (std::size_t c = 0; c < per_.size(); ++c) os << table_[c].label << ": " << per_[c].str() << '\n';
    return os.str();
  }

 private:
  ClassTable table_;
  std::vector<ClassWitness> per_;
};

inline std::pair<WeightedFn, WeightedFn> dom_rng(const Witness& phi) {
  std::vector<TailSeq> d, r;
  for (const auto& cw : phi.per_class()) {
    auto [a, b] = cw.dom_rng();
    d.push_back(std::move(a));
    r.push_back(std::move(b));
  }
  return {WeightedFn(phi.table(), std::move(d)), WeightedFn(phi.table(), std::move(r))};
}

inline std::optional<std::size_t> class_size_of(const ClassTable& t, std::size_t c) {
  if (t[c].size.is_omega()) return std::nullopt;
  return static_cast<std::size_t>(t[c].size.finite());
}

/// phi(x, x) = alpha(x).
inline Witness identity_witness(const WeightedFn& alpha) {
  std::vector<ClassWitness> out;
  for (std::size_t c = 0; c < alpha.table().size(); ++c) {
    const auto& a = alpha.on(c);
    detail::RowOracle o;
    o.finite_row = [&a](std::size_t x) { return Line{{x, a.at(x)}}; };
    o.entry = [&a](std::size_t x, std::size_t y) { return x == y ? a.at(x) : ExtReal{}; };
    out.push_back(detail::materialize(o, a.tail_start(), a.period(), class_size_of(alpha.table(), c)));
  }
  return Witness(alpha.table(), std::move(out));
}

/// The transpose psi(y, x) = phi(x, y), a witness rng phi ~ dom phi.
inline Witness reverse_witness(const Witness& phi) {
  std::vector<ClassWitness> out;
  for (std::size_t c = 0; c < phi.table().size(); ++c) {
    const auto& w = phi.on(c);
    detail::RowOracle o;
    o.finite_row = [&w](std::size_t y) { return w.col(y); };
    o.entry = [&w](std::size_t y, std::size_t x) { return w.entry(x, y); };
    o.fan_sources = w.absolute_targets();
    o.absolute = w.fanout_sources();
    std::size_t R = w.horizon() + detail::span(w) + 1;
    out.push_back(detail::materialize(o, R, w.period(), class_size_of(phi.table(), c)));
  }
  return Witness(phi.table(), std::move(out));
}

namespace detail {

inline std::size_t single_support(const Line& l, std::optional<std::size_t>& where) {
  std::size_t n = 0;
  for (const auto& [k, w] : l)
    if (!w.is_zero()) {
      ++n;
      where = k;
    }
  return n;
}

inline ClassWitness compose_class(const ClassWitness& phi, const ClassWitness& psi, std::optional<std::size_t> size) {
  // d_y transports column y of phi onto row y of psi.
  std::map<std::size_t, TransportPlan> plans;
  auto plan = [&](std::size_t y) -> const TransportPlan& {
    auto it = plans.find(y);
    if (it == plans.end()) it = plans.emplace(y, transport(phi.col_seq(y), psi.row_seq(y))).first;
    return it->second;
  };

  RowOracle o;
  o.fan_sources = phi.fanout_sources();
  o.absolute = psi.absolute_targets();
  for (auto t : phi.absolute_targets()) {
    require(psi.row_is_finite(t), Errc::UnrepresentableSums,
            "column " + std::to_string(t) + " of the first witness and row " + std::to_string(t) +
                " of the second are both infinite");
    std::optional<std::size_t> z;
    if (single_support(psi.row(t), z) > 1)
      fail(Errc::UnrepresentableSums, "infinite column " + std::to_string(t) + " meets a row with several targets");
    if (z) o.absolute.insert(*z);
  }
  for (auto y : psi.fanout_sources()) {
    require(phi.col_is_finite(y), Errc::UnrepresentableSums,
            "column " + std::to_string(y) + " of the first witness and row " + std::to_string(y) +
                " of the second are both infinite");
    std::optional<std::size_t> x;
    if (single_support(phi.col(y), x) > 1)
      fail(Errc::UnrepresentableSums, "infinite row " + std::to_string(y) + " meets a column with several sources");
    if (x) o.fan_sources.insert(*x);
  }
  if (!phi.fanout_sources().empty() && !psi.absolute_targets().empty())
    fail(Errc::UnrepresentableSums, "an infinite row of the first witness meets an infinite column of the second");

  o.finite_row = [&](std::size_t x) {
    Line out;
    for (const auto& [y, w] : phi.row(x))
      for (const auto& [z, v] : plan(y).row(x)) out[z] += v;
    return out;
  };
  o.entry = [&](std::size_t x, std::size_t z) {
    ExtReal s;
    if (phi.row_is_finite(x)) {
      for (const auto& [y, w] : phi.row(x)) s += plan(y).entry(x, z);
    } else {
      for (const auto& [y, w] : psi.col(z)) s += plan(y).entry(x, z);
    }
    return s;
  };
  std::size_t R = phi.horizon() + psi.horizon() + 2 * (span(phi) + span(psi)) + 2;
  for (auto t : o.absolute) R = std::max(R, t + span(phi) + span(psi) + 1);
  for (auto s : o.fan_sources) R = std::max(R, s + 1);
  std::size_t p = std::lcm(phi.period(), psi.period());
  return materialize(o, R, p, size);
}

}  // namespace detail

/// theta(x, z) = sum_y d(column y of phi, row y of psi)(x, z), with every
/// class enumerated in increasing index order.
inline Witness compose(const Witness& phi, const Witness& psi) {
  require_same_table(phi.table(), psi.table());
  auto [a, b] = dom_rng(phi);
  auto [b2, g] = dom_rng(psi);
  require(b == b2, Errc::Mismatch, "rng of the first witness " + b.str() + " differs from dom of the second " + b2.str());
  std::vector<ClassWitness> out;
  for (std::size_t c = 0; c < phi.table().size(); ++c)
    out.push_back(detail::compose_class(phi.on(c), psi.on(c), class_size_of(phi.table(), c)));
  return Witness(phi.table(), std::move(out));
}

/// Splits phi : alpha ~ beta along alpha = alpha1 + alpha2.  Row x of phi is
/// refined by d((alpha1(x), alpha2(x), 0, ...), row x of phi).
inline std::pair<Witness, Witness> split_witness(const Witness& phi, const WeightedFn& a1, const WeightedFn& a2) {
  require_same_table(phi.table(), a1.table());
  require_same_table(phi.table(), a2.table());
  auto [alpha, beta] = dom_rng(phi);
  require(a1 + a2 == alpha, Errc::SumMismatch, "alpha1 + alpha2 differs from dom phi");
  std::vector<ClassWitness> w1, w2;
  for (std::size_t c = 0; c < phi.table().size(); ++c) {
    const auto& w = phi.on(c);
    const auto& s1 = a1.on(c);
    const auto& s2 = a2.on(c);
    for (auto s : w.fanout_sources())
      require(s1.at(s).is_zero() || s2.at(s).is_zero(), Errc::UnrepresentableSums,
              "splitting the infinite row " + std::to_string(s) + " between two nonzero parts");
    std::map<std::size_t, TransportPlan> plans;
    auto plan = [&](std::size_t x) -> const TransportPlan& {
      auto it = plans.find(x);
      if (it == plans.end()) it = plans.emplace(x, transport(TailSeq({s1.at(x), s2.at(x)}), w.row_seq(x))).first;
      return it->second;
    };
    std::size_t R = std::max({w.horizon() + detail::span(w), s1.tail_start(), s2.tail_start()}) + 1;
    std::size_t p = std::lcm(w.period(), std::lcm(s1.period(), s2.period()));
    for (std::size_t k = 0; k < 2; ++k) {
      detail::RowOracle o;
      o.fan_sources = w.fanout_sources();
      o.absolute = w.absolute_targets();
      o.finite_row = [&, k](std::size_t x) {
        Line out;
        for (const auto& [y, v] : w.row(x))
          if (auto e = plan(x).entry(k, y); !e.is_zero()) out[y] = e;
        return out;
      };
      o.entry = [&, k](std::size_t x, std::size_t y) { return plan(x).entry(k, y); };
      (k == 0 ? w1 : w2).push_back(detail::materialize(o, R, p, class_size_of(phi.table(), c)));
    }
  }
  return {Witness(phi.table(), std::move(w1)), Witness(phi.table(), std::move(w2))};
}

// ---------------------------------------------------------------------------
// Sums over classes.

enum class SumKind { Finite, Aperiodic, Both, Mixed };

inline std::string_view sum_kind_name(SumKind k) {
  switch (k) {
    case SumKind::Finite: return "finite";
    case SumKind::Aperiodic: return "aperiodic";
    case SumKind::Both: return "finite+aperiodic";
    case SumKind::Mixed: return "mixed";
  }
  return "?";
}

struct SigmaE {
  std::vector<std::pair<std::string, ExtReal>> sums;  // in class order
  SumKind kind = SumKind::Both;

  friend bool operator==(const SigmaE&, const SigmaE&) = default;
};

inline SigmaE sigma_E(const WeightedFn& alpha) {
  SigmaE out;
  bool finite = true, aperiodic = true;
  for (std::size_t c = 0; c < alpha.table().size(); ++c) {
    auto s = alpha.class_sum(c);
    out.sums.emplace_back(alpha.table()[c].label, s);
    finite = finite && s.is_finite();
    aperiodic = aperiodic && (s.is_zero() || s.is_inf());
  }
  out.kind = finite && aperiodic ? SumKind::Both : finite ? SumKind::Finite : aperiodic ? SumKind::Aperiodic : SumKind::Mixed;
  return out;
}

struct EquidecResult {
  bool equivalent = false;
  std::optional<Witness> witness;
  std::vector<std::string> differing;  // labels whose class sums differ
};

/// On a smooth relation alpha ~ beta iff the class sums agree.  A witness is
/// produced when alpha = beta, or when both are finitely supported.
inline EquidecResult equidecomposable(const WeightedFn& alpha, const WeightedFn& beta) {
  require_same_table(alpha.table(), beta.table());
  EquidecResult r;
  for (std::size_t c = 0; c < alpha.table().size(); ++c)
    if (!(alpha.class_sum(c) == beta.class_sum(c))) r.differing.push_back(alpha.table()[c].label);
  r.equivalent = r.differing.empty();
  if (!r.equivalent) return r;
  if (alpha == beta) {
    r.witness = identity_witness(alpha);
    return r;
  }
  std::vector<ClassWitness> per;
  for (std::size_t c = 0; c < alpha.table().size(); ++c) {
    const auto& a = alpha.on(c);
    const auto& b = beta.on(c);
    if (!a.tail_is_zero() || !b.tail_is_zero()) return r;
    auto plan = transport(a, b);
    ClassWitness::Sparse sp;
    for (std::size_t i = 0; i < a.support_end(); ++i)
      for (const auto& [j, w] : plan.row(i)) sp[{i, j}] = w;
    per.emplace_back(std::move(sp));
  }
  r.witness = Witness(alpha.table(), std::move(per));
  return r;
}

struct Concentrated {
  WeightedFn beta;
  Witness witness;
};

/// Moves all mass onto the complete section Y: points of Y keep their mass,
/// every other point sends its mass to the least point of Y in its class.
inline Concentrated concentrate(const WeightedFn& alpha, const BorelSet& Y) {
  require_same_table(alpha.table(), Y.table());
  std::vector<std::string> missed;
  std::vector<ClassWitness> per;
  for (std::size_t c = 0; c < alpha.table().size(); ++c) {
    const auto& a = alpha.on(c);
    const auto& y = Y.on(c);
    auto y0 = first_member(y);
    bool massless = a.tail_is_zero() && a.support_end() == 0;
    if (!y0) {
      if (!massless) missed.push_back(alpha.table()[c].label);
      per.emplace_back();
      continue;
    }
    detail::RowOracle o;
    o.absolute = {*y0};
    std::size_t t = *y0;
    o.finite_row = [&a, &y, t](std::size_t x) { return Line{{y.at(x) ? x : t, a.at(x)}}; };
    o.entry = [&a, &y, t](std::size_t x, std::size_t z) { return z == (y.at(x) ? x : t) ? a.at(x) : ExtReal{}; };
    std::size_t R = std::max({a.tail_start(), y.tail_start(), t + 1});
    std::size_t p = std::lcm(a.period(), y.period());
    per.push_back(detail::materialize(o, R, p, class_size_of(alpha.table(), c)));
  }
  if (!missed.empty()) {
    std::string msg = "Y misses classes carrying mass:";
    for (const auto& m : missed) msg += " " + m;
    fail(Errc::NotCompleteSection, msg);
  }
  Witness w(alpha.table(), std::move(per));
  return {dom_rng(w).second, std::move(w)};
}

// ---------------------------------------------------------------------------
// Aperiodic functions are equidecomposable with characteristic functions.

enum class SpreadRoute { Empty, Transversal, Concentrate };

inline std::string_view spread_route_name(SpreadRoute r) {
  switch (r) {
    case SpreadRoute::Empty: return "empty";
    case SpreadRoute::Transversal: return "transversal";
    case SpreadRoute::Concentrate: return "concentrate";
  }
  return "?";
}

struct SpreadResult {
  BorelSet A;
  std::vector<SpreadRoute> routes;  // per class
  std::vector<Witness> chain;       // alpha = f0 ~ f1 ~ ... ~ chi_A
  std::vector<WeightedFn> stages;   // f0, f1, ..., chi_A
};

namespace detail {

inline std::optional<unsigned> power_of_half(const ExtReal& v) {
  if (v.is_inf() || v.is_zero()) return std::nullopt;
  const auto& q = v.value();
  if (boost::multiprecision::numerator(q) != 1) return std::nullopt;
  Integer d = boost::multiprecision::denominator(q);
  if ((d & (d - 1)) != 0) return std::nullopt;
  return static_cast<unsigned>(boost::multiprecision::msb(d));
}

}  // namespace detail

/// For alpha with class sums in {0, inf}: a set A and a chain of witnesses
/// from alpha to chi_A.  Classes whose values are all 0 or 2^-n with every
/// occurring level infinite are cut into blocks of 2^n consecutive level
/// points, each sent to its first point.  Every other class is concentrated
/// onto index 0 (value inf) and spread over the whole class.
inline SpreadResult spread_dyadic(const WeightedFn& alpha) {
  const auto& table = alpha.table();
  std::vector<std::string> bad_sum, bad_values;
  for (std::size_t c = 0; c < table.size(); ++c) {
    auto s = alpha.class_sum(c);
    if (!(s.is_zero() || s.is_inf())) bad_sum.push_back(table[c].label + "=" + s.str());
    const auto& a = alpha.on(c);
    for (const auto* part : {&a.prefix(), &a.cycle()})
      for (const auto& v : *part)
        if (!v.is_inf() && !is_dyadic(v)) bad_values.push_back(table[c].label + ":" + v.str());
  }
  if (!bad_sum.empty()) {
    std::string msg = "class sums must be 0 or inf:";
    for (const auto& m : bad_sum) msg += " " + m;
    fail(Errc::NotAperiodic, msg);
  }
  if (!bad_values.empty()) {
    std::string msg = "values must be dyadic or inf:";
    for (const auto& m : bad_values) msg += " " + m;
    fail(Errc::NonDyadicValues, msg);
  }
  for (std::size_t c = 0; c < table.size(); ++c)
    require(table[c].size.is_omega() || alpha.class_sum(c).is_zero(), Errc::NotAperiodic,
            "finite class '" + table[c].label + "' cannot carry infinite mass");

  SpreadResult res;
  std::vector<IndexSet> sets;
  std::vector<ClassWitness> first, second;
  for (std::size_t c = 0; c < table.size(); ++c) {
    const auto& a = alpha.on(c);
    if (alpha.class_sum(c).is_zero()) {
      res.routes.push_back(SpreadRoute::Empty);
      sets.emplace_back(std::vector<bool>{}, false);
      first.emplace_back();
      second.emplace_back();
      continue;
    }
    // Levels present, and whether each occurs in the periodic part.
    std::map<unsigned, bool> levels;
    bool transversal_ok = true;
    for (std::size_t i = 0; i < a.tail_start() + a.period(); ++i) {
      const auto& v = a.at(i);
      if (v.is_zero()) continue;
      auto n = detail::power_of_half(v);
      if (!n) {
        transversal_ok = false;
        break;
      }
      levels[*n] = levels[*n] || i >= a.tail_start();
    }
    for (const auto& [n, infinite] : levels) transversal_ok = transversal_ok && infinite && n < 20;

    if (transversal_ok) {
      res.routes.push_back(SpreadRoute::Transversal);
      // rank of each point within its level, and the transversal point of
      // its block.  Work out the super-period after which ranks repeat.
      std::size_t t0 = a.tail_start(), P = a.period();
      std::size_t big = P;
      std::size_t settle = t0;
      for (const auto& [n, inf] : levels) {
        std::size_t per_period = 0;
        for (std::size_t i = t0; i < t0 + P; ++i)
          if (a.at(i) == ExtReal(1, 1LL << n)) ++per_period;
        std::size_t block = std::size_t{1} << n;
        std::size_t q = block / std::gcd(block, per_period);
        big = std::lcm(big, P * q);
        settle = std::max(settle, t0 + (q + 2) * P + P * block);
      }
      std::size_t limit = settle + 4 * big;
      std::vector<std::size_t> head(limit, 0);
      std::map<unsigned, std::size_t> rank, current_head;
      for (std::size_t i = 0; i < limit; ++i) {
        auto n = detail::power_of_half(a.at(i));
        if (!n) continue;
        std::size_t r = rank[*n]++;
        if (r % (std::size_t{1} << *n) == 0) current_head[*n] = i;
        head[i] = current_head[*n];
      }
      std::vector<bool> pre(settle), cyc(big);
      auto in_A = [&](std::size_t i) { return !a.at(i).is_zero() && head[i] == i; };
      for (std::size_t i = 0; i < settle; ++i) pre[i] = in_A(i);
      for (std::size_t i = settle; i < settle + big; ++i) cyc[i - settle] = in_A(i);
      sets.emplace_back(std::move(pre), std::move(cyc));

      detail::RowOracle o;
      o.finite_row = [&a, &head](std::size_t x) {
        if (a.at(x).is_zero()) return Line{};
        return Line{{head.at(x), a.at(x)}};
      };
      o.entry = [&a, &head](std::size_t x, std::size_t y) {
        return !a.at(x).is_zero() && head.at(x) == y ? a.at(x) : ExtReal{};
      };
      first.push_back(detail::materialize(o, settle, big));
      second.emplace_back();  // identity, filled in below
    } else {
      res.routes.push_back(SpreadRoute::Concentrate);
      sets.emplace_back(std::vector<bool>{}, true);
      detail::RowOracle o;
      o.absolute = {0};
      o.finite_row = [&a](std::size_t x) { return Line{{0, a.at(x)}}; };
      o.entry = [&a](std::size_t x, std::size_t y) { return y == 0 ? a.at(x) : ExtReal{}; };
      first.push_back(detail::materialize(o, std::max<std::size_t>(a.tail_start(), 1), a.period()));
      second.push_back(ClassWitness({}, std::nullopt, {FanoutTail{0, 0, {ExtReal(1)}}}));
    }
  }
  res.A = BorelSet(table, std::move(sets));
  Witness w1(table, std::move(first));
  auto mid = dom_rng(w1).second;
  auto ident = identity_witness(mid);
  for (std::size_t c = 0; c < table.size(); ++c)
    if (res.routes[c] == SpreadRoute::Transversal) second[c] = ident.on(c);
  Witness w2(table, std::move(second));
  res.stages = {alpha, mid, dom_rng(w2).second};
  res.chain = {std::move(w1), std::move(w2)};
  return res;
}

}  // namespace eqdec
