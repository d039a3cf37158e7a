#pragma once

// The refinement operator d(u, v): given two countable families in [0, inf]
// with equal sums, a nonnegative matrix whose row sums are u and whose column
// sums are v.  The construction follows four cases:
//
//   I    both u and v contain inf     -> cross at the first inf of each
//   II   u in {0, inf}, v finite      -> windows of v dealt round-robin to
//                                        the inf rows
//   III  u and v finite               -> greedy staircase with residuals
//   IV   u mixes inf with finite > 0  -> split u = u' + u'', v = v' + v''
//                                        and add a III plan and a II plan
//
// plus the transposed variants of II and IV.  Entries are evaluated on demand;
// greedy and window state is memoized behind a mutex, so a plan may be shared
// between threads.

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "eqdec/error.hpp"
#include "eqdec/extnum.hpp"

namespace eqdec {

enum class TransportCase { I, II, IISym, III, IV, IVSym };

inline std::string_view case_name(TransportCase c) {
  switch (c) {
    case TransportCase::I: return "I";
    case TransportCase::II: return "II";
    case TransportCase::IISym: return "II-sym";
    case TransportCase::III: return "III";
    case TransportCase::IV: return "IV";
    case TransportCase::IVSym: return "IV-sym";
  }
  return "?";
}

namespace detail {

// Upper bound on greedy or window steps taken for a single query.
inline constexpr std::size_t kStepLimit = std::size_t{1} << 26;

/// A lazily evaluated sequence in [0, inf] with the facts the case analysis
/// needs.  Built from a TailSeq or derived inside case IV.
struct Seq {
  std::function<ExtReal(std::size_t)> at;
  ExtReal total;
  bool any_inf = false;
  bool zero_or_inf = false;
  std::optional<std::size_t> support_end;  // nullopt: infinite support
  std::function<std::size_t(std::size_t)> inf_index;
  std::optional<std::size_t> inf_count;  // nullopt: infinitely many inf entries
};

inline Seq make_seq(const TailSeq& u) {
  Seq s;
  s.at = [u](std::size_t i) { return u.at(i); };
  s.total = seq_sum(u);
  s.any_inf = seq_has_inf(u);
  s.zero_or_inf = seq_zero_or_inf(u);
  if (u.tail_is_zero()) s.support_end = u.support_end();
  std::vector<std::size_t> pre, cyc;
  for (std::size_t i = 0; i < u.prefix().size(); ++i)
    if (u.prefix()[i].is_inf()) pre.push_back(i);
  for (std::size_t i = 0; i < u.cycle().size(); ++i)
    if (u.cycle()[i].is_inf()) cyc.push_back(i);
  if (cyc.empty()) s.inf_count = pre.size();
  std::size_t start = u.tail_start(), per = u.period();
  s.inf_index = [pre, cyc, start, per](std::size_t k) -> std::size_t {
    if (k < pre.size()) return pre[k];
    require(!cyc.empty(), Errc::Internal, "inf_index out of range");
    std::size_t r = k - pre.size();
    return start + (r / cyc.size()) * per + cyc[r % cyc.size()];
  };
  return s;
}

class PlanImpl {
 public:
  virtual ~PlanImpl() = default;
  virtual ExtReal entry(std::size_t i, std::size_t j) const = 0;
  /// Columns at or beyond the extent hold zeros in row i; nullopt when row i
  /// has infinitely many nonzero entries.
  virtual std::optional<std::size_t> row_extent(std::size_t i) const = 0;
  virtual std::optional<std::size_t> col_extent(std::size_t j) const = 0;
};

class ZeroPlan final : public PlanImpl {
 public:
  ExtReal entry(std::size_t, std::size_t) const override { return {}; }
  std::optional<std::size_t> row_extent(std::size_t) const override { return 0; }
  std::optional<std::size_t> col_extent(std::size_t) const override { return 0; }
};

class CrossPlan final : public PlanImpl {
 public:
  CrossPlan(Seq u, Seq v) : u_(std::move(u)), v_(std::move(v)), i0_(u_.inf_index(0)), j0_(v_.inf_index(0)) {}

  ExtReal entry(std::size_t i, std::size_t j) const override {
    if (i == i0_) return v_.at(j);
    if (j == j0_) return u_.at(i);
    return {};
  }
  std::optional<std::size_t> row_extent(std::size_t i) const override {
    if (i == i0_) return v_.support_end;
    return j0_ + 1;
  }
  std::optional<std::size_t> col_extent(std::size_t j) const override {
    if (j == j0_) return u_.support_end;
    return i0_ + 1;
  }

 private:
  Seq u_, v_;
  std::size_t i0_, j0_;
};

/// Cut points 0 = k_0 < k_1 < ... where k_{l+1} is least with
/// v(k_l) + ... + v(k_{l+1} - 1) > 1.  Requires sum v = inf.
class WindowCuts {
 public:
  explicit WindowCuts(Seq v) : v_(std::move(v)) {}

  std::size_t cut(std::size_t l) const {
    std::lock_guard lock(mu_);
    extend_to_index(l);
    return cuts_[l];
  }

  /// The l with k_l <= j < k_{l+1}.
  std::size_t window_of(std::size_t j) const {
    std::lock_guard lock(mu_);
    while (cuts_.back() <= j) extend_once();
    auto it = std::upper_bound(cuts_.begin(), cuts_.end(), j);
    return static_cast<std::size_t>(it - cuts_.begin()) - 1;
  }

 private:
  void extend_to_index(std::size_t l) const {
    while (cuts_.size() <= l) extend_once();
  }
  void extend_once() const {
    std::size_t k = cuts_.back();
    ExtReal acc;
    const ExtReal one(1);
    std::size_t steps = 0;
    do {
      acc += v_.at(k++);
      require(++steps < kStepLimit, Errc::Internal, "window cut did not close; is sum v infinite?");
    } while (!(one < acc));
    cuts_.push_back(k);
  }

  Seq v_;
  mutable std::mutex mu_;
  mutable std::vector<std::size_t> cuts_{0};
};

/// Case II: u takes values in {0, inf}, v is finite with infinite sum.
class BlockPlan final : public PlanImpl {
 public:
  BlockPlan(Seq u, Seq v) : u_(std::move(u)), cuts_(std::make_shared<WindowCuts>(v)), v_(std::move(v)) {}

  /// Round-robin over the inf rows: cycles through them when there are
  /// finitely many, otherwise runs 0; 0,1; 0,1,2; ... over their enumeration.
  std::size_t f(std::size_t l) const {
    if (u_.inf_count) return u_.inf_index(l % *u_.inf_count);
    std::size_t n = 0;
    while ((n + 1) * (n + 2) / 2 <= l) ++n;
    return u_.inf_index(l - n * (n + 1) / 2);
  }

  ExtReal entry(std::size_t i, std::size_t j) const override {
    if (!u_.at(i).is_inf()) return {};
    return f(cuts_->window_of(j)) == i ? v_.at(j) : ExtReal{};
  }
  std::optional<std::size_t> row_extent(std::size_t i) const override {
    if (u_.at(i).is_inf()) return std::nullopt;
    return 0;
  }
  std::optional<std::size_t> col_extent(std::size_t j) const override { return f(cuts_->window_of(j)) + 1; }

 private:
  Seq u_;
  std::shared_ptr<WindowCuts> cuts_;
  Seq v_;
};

/// Case III: the greedy staircase.  Step k visits cell (i_k, j_k) with
/// i_k + j_k = k, so entry (i, j) is decided after i + j + 1 steps.
class GreedyPlan final : public PlanImpl {
 public:
  GreedyPlan(Seq u, Seq v) : u_(std::move(u)), v_(std::move(v)) {
    r_ = u_.at(0);
    s_ = v_.at(0);
  }

  ExtReal entry(std::size_t i, std::size_t j) const override {
    std::lock_guard lock(mu_);
    std::size_t k = i + j;
    while (cells_.size() <= k) step();
    return cells_[k].first == i ? vals_[k] : ExtReal{};
  }

  std::optional<std::size_t> row_extent(std::size_t i) const override {
    if (u_.at(i).is_zero()) return 0;
    std::lock_guard lock(mu_);
    // The first cell in row i + 1 sits in the column where row i ended.
    while (cur_i_ <= i) step();
    return first_col_in_row(i + 1) + 1;
  }

  std::optional<std::size_t> col_extent(std::size_t j) const override {
    if (v_.at(j).is_zero()) return 0;
    std::lock_guard lock(mu_);
    while (cur_j_ <= j) {
      // Column exhausted while only zero rows remain: i advances forever.
      if (cur_j_ == j && s_.is_zero()) return cur_i_;
      step();
    }
    return first_row_in_col(j + 1) + 1;
  }

  std::size_t steps_taken() const {
    std::lock_guard lock(mu_);
    return cells_.size();
  }

 private:
  void step() const {
    require(cells_.size() < kStepLimit, Errc::Internal, "greedy transport exceeded step limit");
    cells_.emplace_back(cur_i_, cur_j_);
    if (r_ <= s_) {
      vals_.push_back(r_);
      s_ = s_.minus(r_);
      ++cur_i_;
      r_ = u_.at(cur_i_);
    } else {
      vals_.push_back(s_);
      r_ = r_.minus(s_);
      ++cur_j_;
      s_ = v_.at(cur_j_);
    }
  }

  std::size_t first_col_in_row(std::size_t row) const {
    for (const auto& [ci, cj] : cells_)
      if (ci == row) return cj;
    // The cursor has entered the row but no cell has been recorded yet.
    return cur_j_;
  }
  std::size_t first_row_in_col(std::size_t col) const {
    for (const auto& [ci, cj] : cells_)
      if (cj == col) return ci;
    return cur_i_;
  }

  Seq u_, v_;
  mutable std::mutex mu_;
  mutable std::vector<std::pair<std::size_t, std::size_t>> cells_;
  mutable std::vector<ExtReal> vals_;
  mutable std::size_t cur_i_ = 0, cur_j_ = 0;
  mutable ExtReal r_, s_;
};

class SumPlan final : public PlanImpl {
 public:
  SumPlan(std::shared_ptr<const PlanImpl> a, std::shared_ptr<const PlanImpl> b) : a_(std::move(a)), b_(std::move(b)) {}

  ExtReal entry(std::size_t i, std::size_t j) const override { return a_->entry(i, j) + b_->entry(i, j); }
  std::optional<std::size_t> row_extent(std::size_t i) const override {
    return join(a_->row_extent(i), b_->row_extent(i));
  }
  std::optional<std::size_t> col_extent(std::size_t j) const override {
    return join(a_->col_extent(j), b_->col_extent(j));
  }

 private:
  static std::optional<std::size_t> join(std::optional<std::size_t> x, std::optional<std::size_t> y) {
    if (!x || !y) return std::nullopt;
    return std::max(*x, *y);
  }
  std::shared_ptr<const PlanImpl> a_, b_;
};

class TransposePlan final : public PlanImpl {
 public:
  explicit TransposePlan(std::shared_ptr<const PlanImpl> p) : p_(std::move(p)) {}
  ExtReal entry(std::size_t i, std::size_t j) const override { return p_->entry(j, i); }
  std::optional<std::size_t> row_extent(std::size_t i) const override { return p_->col_extent(i); }
  std::optional<std::size_t> col_extent(std::size_t j) const override { return p_->row_extent(j); }

 private:
  std::shared_ptr<const PlanImpl> p_;
};

inline std::shared_ptr<const PlanImpl> block_or_zero(Seq u, Seq v) {
  if (u.total.is_zero()) return std::make_shared<ZeroPlan>();
  return std::make_shared<BlockPlan>(std::move(u), std::move(v));
}

/// Case IV with u mixing inf and finite positive values, v finite.
inline std::shared_ptr<const PlanImpl> split_plan(const TailSeq& u, const Seq& v) {
  TailSeq u1 = u.map([](const ExtReal& x) { return x.is_inf() ? ExtReal{} : x; });
  TailSeq u2 = u.map([](const ExtReal& x) { return x.is_inf() ? ExtReal::infinity() : ExtReal{}; });
  ExtReal s1 = seq_sum(u1);
  Seq v1, v2;
  v1.total = s1;
  v2.total = ExtReal::infinity();
  if (s1.is_finite()) {
    // k least with v(0) + ... + v(k) > sum u'.
    std::size_t k = 0;
    ExtReal acc = v.at(0);
    while (!(s1 < acc)) {
      acc += v.at(++k);
      require(k < kStepLimit, Errc::Internal, "case IV cut did not close");
    }
    ExtReal before = acc.minus(v.at(k));
    ExtReal edge = s1.minus(before);
    v1.at = [v, k, edge](std::size_t j) { return j < k ? v.at(j) : j == k ? edge : ExtReal{}; };
    v1.support_end = k + 1;
    v2.at = [v, k, edge](std::size_t j) { return j < k ? ExtReal{} : j == k ? v.at(k).minus(edge) : v.at(j); };
  } else {
    // Both halves need infinite sums: alternate the windows used in case II.
    auto cuts = std::make_shared<WindowCuts>(v);
    v1.at = [v, cuts](std::size_t j) { return cuts->window_of(j) % 2 == 0 ? v.at(j) : ExtReal{}; };
    v2.at = [v, cuts](std::size_t j) { return cuts->window_of(j) % 2 == 1 ? v.at(j) : ExtReal{}; };
  }
  auto greedy = std::make_shared<GreedyPlan>(make_seq(u1), v1);
  auto block = block_or_zero(make_seq(u2), v2);
  return std::make_shared<SumPlan>(greedy, block);
}

}  // namespace detail

/// The matrix d(u, v).  Copies share memoized state; every query is
/// deterministic in (u, v, i, j).
class TransportPlan {
 public:
  TransportPlan(TailSeq u, TailSeq v, TransportCase c, std::shared_ptr<const detail::PlanImpl> impl)
      : u_(std::move(u)), v_(std::move(v)), case_(c), impl_(std::move(impl)) {}

  const TailSeq& source() const noexcept { return u_; }
  const TailSeq& target() const noexcept { return v_; }
  TransportCase kind() const noexcept { return case_; }

  ExtReal entry(std::size_t i, std::size_t j) const { return impl_->entry(i, j); }
  std::optional<std::size_t> row_extent(std::size_t i) const { return impl_->row_extent(i); }
  std::optional<std::size_t> col_extent(std::size_t j) const { return impl_->col_extent(j); }

  /// Nonzero entries of a row with finitely many of them.
  std::vector<std::pair<std::size_t, ExtReal>> row(std::size_t i) const {
    auto ext = row_extent(i);
    require(ext.has_value(), Errc::UnrepresentableSums, "row " + std::to_string(i) + " has infinite support");
    std::vector<std::pair<std::size_t, ExtReal>> out;
    for (std::size_t j = 0; j < *ext; ++j)
      if (auto x = entry(i, j); !x.is_zero()) out.emplace_back(j, x);
    return out;
  }
  std::vector<std::pair<std::size_t, ExtReal>> col(std::size_t j) const {
    auto ext = col_extent(j);
    require(ext.has_value(), Errc::UnrepresentableSums, "column " + std::to_string(j) + " has infinite support");
    std::vector<std::pair<std::size_t, ExtReal>> out;
    for (std::size_t i = 0; i < *ext; ++i)
      if (auto x = entry(i, j); !x.is_zero()) out.emplace_back(i, x);
    return out;
  }

 private:
  TailSeq u_, v_;
  TransportCase case_;
  std::shared_ptr<const detail::PlanImpl> impl_;
};

inline TransportPlan transport(const TailSeq& u, const TailSeq& v) {
  ExtReal su = seq_sum(u), sv = seq_sum(v);
  require(su == sv, Errc::SumMismatch, "sum u = " + su.str() + " but sum v = " + sv.str());
  auto U = detail::make_seq(u), V = detail::make_seq(v);
  using namespace detail;
  if (U.any_inf && V.any_inf) return {u, v, TransportCase::I, std::make_shared<CrossPlan>(U, V)};
  if (!V.any_inf && U.zero_or_inf) return {u, v, TransportCase::II, block_or_zero(U, V)};
  if (!U.any_inf && V.zero_or_inf)
    return {u, v, TransportCase::IISym, std::make_shared<TransposePlan>(block_or_zero(V, U))};
  if (!U.any_inf && !V.any_inf) return {u, v, TransportCase::III, std::make_shared<GreedyPlan>(U, V)};
  if (U.any_inf) return {u, v, TransportCase::IV, split_plan(u, V)};
  return {u, v, TransportCase::IVSym, std::make_shared<TransposePlan>(split_plan(v, U))};
}

inline ExtReal plan_entry(const TransportPlan& p, std::size_t i, std::size_t j) { return p.entry(i, j); }

struct MarginalCheck {
  bool is_row = true;
  std::size_t index = 0;
  ExtReal marginal;
  ExtReal partial;              // exact sum, or the partial sum reached by a certificate
  std::size_t scanned = 0;      // number of entries summed
  bool divergence_certificate = false;
};

struct MarginalReport {
  std::size_t bound = 0;
  std::vector<MarginalCheck> rows, cols;

  std::string str() const {
    std::ostringstream os;
    for (const auto* group : {&rows, &cols}) {
      for (const auto& c : *group) {
        os << (c.is_row ? "row " : "col ") << c.index << ": marginal " << c.marginal;
        if (c.divergence_certificate)
          os << ", partial sum " << c.partial << " over " << c.scanned << " entries exceeds " << bound;
        else
          os << ", exact sum " << c.partial;
        os << '\n';
      }
    }
    return os.str();
  }
};

namespace detail {

inline MarginalCheck check_line(const TransportPlan& p, bool is_row, std::size_t idx, const ExtReal& marginal,
                                std::size_t bound) {
  MarginalCheck c;
  c.is_row = is_row;
  c.index = idx;
  c.marginal = marginal;
  auto at = [&](std::size_t k) { return is_row ? p.entry(idx, k) : p.entry(k, idx); };
  auto ext = is_row ? p.row_extent(idx) : p.col_extent(idx);
  auto violation = [&](const std::string& why) {
    fail(Errc::MarginalViolation, std::string(is_row ? "row " : "column ") + std::to_string(idx) + ": " + why +
                                      " (marginal " + marginal.str() + ", partial " + c.partial.str() + ")");
  };
  if (ext) {
    for (std::size_t k = 0; k < *ext; ++k) c.partial += at(k);
    c.scanned = *ext;
    if (!(c.partial == marginal)) violation("sum differs from marginal");
    return c;
  }
  if (marginal.is_finite()) violation("finite marginal but infinite support");
  const ExtReal limit(static_cast<long long>(bound));
  for (std::size_t k = 0; k < kStepLimit; ++k) {
    c.partial += at(k);
    c.scanned = k + 1;
    if (limit < c.partial) {
      c.divergence_certificate = true;
      return c;
    }
  }
  violation("no divergence certificate within the scan limit");
  return c;
}

}  // namespace detail

/// Checks every row i < bound and column j < bound.  Lines with finite
/// support are summed exactly; lines with infinite support must have marginal
/// inf and are certified by a partial sum exceeding `bound`.
inline MarginalReport verify_marginals(const TransportPlan& p, std::size_t bound) {
  MarginalReport rep;
  rep.bound = bound;
  for (std::size_t i = 0; i < bound; ++i)
    rep.rows.push_back(detail::check_line(p, true, i, p.source().at(i), bound));
  for (std::size_t j = 0; j < bound; ++j)
    rep.cols.push_back(detail::check_line(p, false, j, p.target().at(j), bound));
  return rep;
}

}  // namespace eqdec
