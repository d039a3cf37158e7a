#pragma once

// Finite topological spaces, T0 quotients by an equivalence relation,
// towers of spaces with their limits, and the patch/upper round trip.
// Subsets are bitmasks over point indices.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "eqdec/error.hpp"
#include "eqdec/extnum.hpp"

namespace eqdec {

using Mask = std::uint64_t;

inline Mask bit(std::size_t i) { return Mask{1} << i; }
inline bool has(Mask m, std::size_t i) { return (m >> i) & 1U; }
inline Mask full_mask(std::size_t n) { return n == 64 ? ~Mask{0} : bit(n) - 1; }

class FinSpace {
 public:
  static constexpr std::size_t kMaxPoints = 20;

  FinSpace() = default;

  /// Validates the open family: contains the empty and full sets, closed
  /// under binary unions and intersections, and equal to the up-sets of
  /// its specialization preorder.
  FinSpace(std::vector<std::string> names, std::vector<Mask> opens) : names_(std::move(names)) {
    const std::size_t n = names_.size();
    require(n <= kMaxPoints, Errc::InvalidInput, "too many points");
    check_names();
    std::sort(opens.begin(), opens.end());
    opens.erase(std::unique(opens.begin(), opens.end()), opens.end());
    const Mask all = full_mask(n);
    for (auto m : opens) require((m & ~all) == 0, Errc::InvalidInput, "open set mentions an unknown point");
    require(std::binary_search(opens.begin(), opens.end(), Mask{0}), Errc::InvalidInput, "opens must contain the empty set");
    require(std::binary_search(opens.begin(), opens.end(), all), Errc::InvalidInput, "opens must contain the whole space");
    // Pairwise closure is quadratic; large families rely on the up-set
    // comparison below, which implies it.
    if (opens.size() <= 512)
      for (auto a : opens)
        for (auto b : opens) {
          require(std::binary_search(opens.begin(), opens.end(), a | b), Errc::InvalidInput,
                  "opens not closed under union");
          require(std::binary_search(opens.begin(), opens.end(), a & b), Errc::InvalidInput,
                  "opens not closed under intersection");
        }
    opens_ = std::move(opens);
    up_.assign(n, all);
    for (auto m : opens_)
      for (std::size_t x = 0; x < n; ++x)
        if (has(m, x)) up_[x] &= m;
    require(opens_ == upsets(up_, n), Errc::InvalidInput, "opens differ from the up-sets of the specialization preorder");
  }

  /// Topology generated by a subbasis.
  static FinSpace generated(std::vector<std::string> names, const std::vector<Mask>& subbasis) {
    const std::size_t n = names.size();
    require(n <= kMaxPoints, Errc::InvalidInput, "too many points");
    std::vector<Mask> up(n, full_mask(n));
    for (auto s : subbasis) {
      require((s & ~full_mask(n)) == 0, Errc::InvalidInput, "subbasic set mentions an unknown point");
      for (std::size_t x = 0; x < n; ++x)
        if (has(s, x)) up[x] &= s;
    }
    return FinSpace(std::move(names), upsets(up, n));
  }

  /// up[x] = the points y with x <= y; must be reflexive and transitive.
  static FinSpace from_up(std::vector<std::string> names, const std::vector<Mask>& up) {
    return generated(std::move(names), up);
  }

  static std::vector<std::string> default_names(std::size_t n) {
    std::vector<std::string> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(std::to_string(i));
    return v;
  }
  static FinSpace discrete(std::size_t n) {
    std::vector<Mask> s;
    for (std::size_t i = 0; i < n; ++i) s.push_back(bit(i));
    return generated(default_names(n), s);
  }
  static FinSpace indiscrete(std::size_t n) { return generated(default_names(n), {}); }
  /// Points 0 < 1 < ... < n-1; opens are the final segments.
  static FinSpace chain(std::size_t n) {
    std::vector<Mask> s;
    for (std::size_t i = 0; i < n; ++i) s.push_back(full_mask(n) & ~full_mask(i));
    return generated(default_names(n), s);
  }
  static FinSpace sierpinski() { return chain(2); }

  std::size_t size() const noexcept { return names_.size(); }
  Mask all() const { return full_mask(size()); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  std::size_t index_of(std::string_view s) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == s) return i;
    fail(Errc::InvalidInput, "unknown point '" + std::string(s) + "'");
  }
  const std::vector<Mask>& opens() const noexcept { return opens_; }
  /// Smallest open neighbourhood.
  Mask up(std::size_t x) const { return up_.at(x); }

  bool is_open(Mask m) const { return std::binary_search(opens_.begin(), opens_.end(), m); }
  bool is_closed(Mask m) const { return is_open(all() & ~m); }
  /// x <= y iff every open containing x contains y, i.e. x in cl{y}.
  bool leq(std::size_t x, std::size_t y) const { return has(up_.at(x), y); }
  Mask closure(Mask m) const {
    Mask out = 0;
    for (std::size_t z = 0; z < size(); ++z)
      if (up_[z] & m) out |= bit(z);
    return out;
  }
  Mask interior(Mask m) const {
    Mask out = 0;
    for (std::size_t z = 0; z < size(); ++z)
      if ((up_[z] & ~m) == 0) out |= bit(z);
    return out;
  }

  bool is_t0() const {
    for (std::size_t x = 0; x < size(); ++x)
      for (std::size_t y = x + 1; y < size(); ++y)
        if (leq(x, y) && leq(y, x)) return false;
    return true;
  }
  bool is_discrete() const { return opens_.size() == (std::size_t{1} << size()); }
  bool is_t1() const {
    for (std::size_t x = 0; x < size(); ++x)
      if (up_[x] != bit(x)) return false;
    return true;
  }

  Mask parse_subset(std::string_view text) const;
  std::string format(Mask m) const {
    std::string s = "{";
    bool first = true;
    for (std::size_t i = 0; i < size(); ++i)
      if (has(m, i)) s += (first ? "" : ",") + names_[i], first = false;
    return s + "}";
  }
  std::string str() const {
    std::ostringstream os;
    os << "points";
    for (const auto& n : names_) os << " " << n;
    os << "; opens";
    for (auto m : opens_) os << " " << format(m);
    return os.str();
  }

  friend bool operator==(const FinSpace& a, const FinSpace& b) {
    return a.names_ == b.names_ && a.opens_ == b.opens_;
  }

  /// All masks closed under the given minimal neighbourhoods.
  static std::vector<Mask> upsets(const std::vector<Mask>& up, std::size_t n) {
    std::vector<Mask> out;
    const Mask lim = full_mask(n);
    for (Mask m = 0;; ++m) {
      bool ok = true;
      for (std::size_t x = 0; x < n && ok; ++x)
        if (has(m, x) && (up[x] & ~m)) ok = false;
      if (ok) out.push_back(m);
      if (m == lim) break;
    }
    return out;
  }

 private:
  void check_names() const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
      require(!names_[i].empty(), Errc::InvalidInput, "empty point name");
      for (std::size_t j = 0; j < i; ++j)
        require(names_[i] != names_[j], Errc::InvalidInput, "duplicate point '" + names_[i] + "'");
    }
  }

  std::vector<std::string> names_;
  std::vector<Mask> opens_;
  std::vector<Mask> up_;
};

inline Mask FinSpace::parse_subset(std::string_view text) const {
  auto s = detail::trim(text);
  require(s.size() >= 2 && s.front() == '{' && s.back() == '}', Errc::ParseError,
          "expected {..}, got '" + std::string(text) + "'");
  s = s.substr(1, s.size() - 2);
  Mask m = 0;
  std::size_t p = 0;
  while (p <= s.size()) {
    auto q = s.find(',', p);
    auto tok = detail::trim(s.substr(p, q == std::string_view::npos ? std::string_view::npos : q - p));
    if (!tok.empty()) m |= bit(index_of(tok));
    if (q == std::string_view::npos) break;
    p = q + 1;
  }
  return m;
}

// ---------------------------------------------------------------------------
// Maps.

using PointMap = std::vector<std::size_t>;

inline Mask image(const PointMap& f, Mask m) {
  Mask out = 0;
  for (std::size_t x = 0; x < f.size(); ++x)
    if (has(m, x)) out |= bit(f[x]);
  return out;
}
inline Mask preimage(const PointMap& f, Mask m) {
  Mask out = 0;
  for (std::size_t x = 0; x < f.size(); ++x)
    if (has(m, f[x])) out |= bit(x);
  return out;
}
inline PointMap compose_maps(const PointMap& g, const PointMap& f) {  // g . f
  PointMap out(f.size());
  for (std::size_t x = 0; x < f.size(); ++x) out[x] = g.at(f[x]);
  return out;
}
inline PointMap identity_map(std::size_t n) {
  PointMap f(n);
  std::iota(f.begin(), f.end(), std::size_t{0});
  return f;
}

inline void check_map_shape(const FinSpace& X, const FinSpace& Y, const PointMap& f) {
  require(f.size() == X.size(), Errc::InvalidInput, "map domain size differs from the space");
  for (auto y : f) require(y < Y.size(), Errc::InvalidInput, "map value out of range");
}
inline bool is_continuous(const FinSpace& X, const FinSpace& Y, const PointMap& f) {
  check_map_shape(X, Y, f);
  return std::all_of(Y.opens().begin(), Y.opens().end(), [&](Mask V) { return X.is_open(preimage(f, V)); });
}
inline bool is_open_map(const FinSpace& X, const FinSpace& Y, const PointMap& f) {
  check_map_shape(X, Y, f);
  return std::all_of(X.opens().begin(), X.opens().end(), [&](Mask U) { return Y.is_open(image(f, U)); });
}
/// Dense image: meets every nonempty open.
inline bool has_dense_image(const FinSpace& X, const FinSpace& Y, const PointMap& f) {
  check_map_shape(X, Y, f);
  Mask im = image(f, X.all());
  return std::all_of(Y.opens().begin(), Y.opens().end(), [&](Mask V) { return V == 0 || (V & im); });
}
inline bool is_surjective(const FinSpace& X, const FinSpace& Y, const PointMap& f) {
  check_map_shape(X, Y, f);
  return image(f, X.all()) == Y.all();
}
inline bool is_homeomorphism(const FinSpace& X, const FinSpace& Y, const PointMap& f) {
  if (X.size() != Y.size() || !is_surjective(X, Y, f)) return false;
  return is_continuous(X, Y, f) && is_open_map(X, Y, f);
}

// ---------------------------------------------------------------------------
// Spaces with an equivalence relation.

class SpaceRel {
 public:
  SpaceRel() = default;
  /// cls[x] = class id of x (any labels; normalized to first-occurrence order).
  SpaceRel(FinSpace X, std::vector<std::size_t> cls) : X_(std::move(X)), cls_(std::move(cls)) {
    require(cls_.size() == X_.size(), Errc::InvalidInput, "one class id per point expected");
    std::map<std::size_t, std::size_t> relabel;
    for (auto& c : cls_) c = relabel.emplace(c, relabel.size()).first->second;
  }
  static SpaceRel equality(FinSpace X) {
    auto n = X.size();
    return SpaceRel(std::move(X), identity_map(n));
  }
  /// Orbit partition of the group generated by permutations; each must be
  /// a homeomorphism.
  static SpaceRel from_action(FinSpace X, const std::vector<PointMap>& gens) {
    std::vector<std::size_t> parent = identity_map(X.size());
    auto find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const auto& g : gens) {
      require(is_homeomorphism(X, X, g), Errc::InvalidInput, "action generator is not a homeomorphism");
      for (std::size_t x = 0; x < X.size(); ++x) parent[find(x)] = find(g[x]);
    }
    std::vector<std::size_t> cls(X.size());
    for (std::size_t x = 0; x < X.size(); ++x) cls[x] = find(x);
    return SpaceRel(std::move(X), std::move(cls));
  }

  const FinSpace& space() const noexcept { return X_; }
  const std::vector<std::size_t>& classes() const noexcept { return cls_; }
  std::size_t class_count() const { return cls_.empty() ? 0 : *std::max_element(cls_.begin(), cls_.end()) + 1; }
  Mask class_of(std::size_t x) const {
    Mask m = 0;
    for (std::size_t y = 0; y < cls_.size(); ++y)
      if (cls_[y] == cls_.at(x)) m |= bit(y);
    return m;
  }
  Mask saturation(Mask m) const {
    Mask out = 0;
    for (std::size_t x = 0; x < cls_.size(); ++x)
      if (has(m, x)) out |= class_of(x);
    return out;
  }
  bool is_invariant(Mask m) const { return saturation(m) == m; }

  std::string partition_str() const {
    std::string s;
    for (std::size_t c = 0; c < class_count(); ++c) {
      Mask m = 0;
      for (std::size_t x = 0; x < cls_.size(); ++x)
        if (cls_[x] == c) m |= bit(x);
      s += (c ? " " : "") + X_.format(m);
    }
    return s;
  }

  friend bool operator==(const SpaceRel& a, const SpaceRel& b) { return a.X_ == b.X_ && a.cls_ == b.cls_; }

 private:
  FinSpace X_;
  std::vector<std::size_t> cls_;
};

/// An open set whose saturation is not open, if any.
inline std::optional<Mask> saturation_check(const SpaceRel& sr) {
  for (auto U : sr.space().opens())
    if (!sr.space().is_open(sr.saturation(U))) return U;
  return std::nullopt;
}

struct Quotient {
  FinSpace space;  // points named by the least member of each fiber
  PointMap proj;
  // Postconditions, each checked independently of the construction.
  bool open_projection = false;
  bool t0 = false;
  bool kernel = false;          // p(x) = p(y) iff cl[x] = cl[y]
  bool minimal_fibers = false;  // each class is dense in its fiber
  bool order = false;           // p(x) <= p(y) iff x in cl[y]
  bool ok() const { return open_projection && t0 && kernel && minimal_fibers && order; }
};

inline Quotient t0_quotient(const SpaceRel& sr) {
  const auto& X = sr.space();
  if (auto U = saturation_check(sr))
    fail(Errc::SaturationFails, "saturation of " + X.format(*U) + " is " + X.format(sr.saturation(*U)) + ", not open");
  const std::size_t n = X.size();
  std::vector<Mask> cl(n);
  for (std::size_t x = 0; x < n; ++x) cl[x] = X.closure(sr.class_of(x));

  Quotient q;
  q.proj.assign(n, 0);
  std::vector<std::size_t> rep;  // least point of each fiber
  for (std::size_t x = 0; x < n; ++x) {
    std::size_t k = 0;
    while (k < rep.size() && cl[rep[k]] != cl[x]) ++k;
    if (k == rep.size()) rep.push_back(x);
    q.proj[x] = k;
  }
  const std::size_t m = rep.size();
  // Lexicographically least name of each fiber, for display.
  std::vector<std::string> names(m);
  for (std::size_t x = 0; x < n; ++x)
    if (names[q.proj[x]].empty() || X.name(x) < names[q.proj[x]]) names[q.proj[x]] = X.name(x);
  std::vector<Mask> opens;
  for (Mask V = 0; V <= full_mask(m); ++V)
    if (X.is_open(preimage(q.proj, V))) opens.push_back(V);
  q.space = FinSpace(std::move(names), std::move(opens));

  q.open_projection = is_open_map(X, q.space, q.proj) && is_continuous(X, q.space, q.proj);
  q.t0 = q.space.is_t0();
  // Closures recomputed from the closed sets rather than the preorder.
  auto closure_by_closed = [&](Mask S) {
    Mask out = X.all();
    for (auto U : X.opens())
      if ((U & S) == 0) out &= ~U;
    return out;
  };
  q.kernel = q.minimal_fibers = q.order = true;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      Mask cx = closure_by_closed(sr.class_of(x)), cy = closure_by_closed(sr.class_of(y));
      if ((q.proj[x] == q.proj[y]) != (cx == cy)) q.kernel = false;
      if (q.space.leq(q.proj[x], q.proj[y]) != has(cy, x)) q.order = false;
    }
  for (std::size_t k = 0; k < m; ++k) {
    Mask fiber = preimage(q.proj, bit(k));
    for (std::size_t x = 0; x < n; ++x)
      if (has(fiber, x) && (closure_by_closed(sr.class_of(x)) & fiber) != fiber) q.minimal_fibers = false;
  }
  return q;
}

/// Adjoining E-invariant closed sets to the topology.
struct Adjoined {
  SpaceRel rel;
  Quotient before, after;
  bool same_components = false;    // both quotients partition X alike
  bool closed_sets_adjoined = false;  // after = before plus the F // E
};

inline Adjoined adjoin_closed(const SpaceRel& sr, const std::vector<Mask>& F) {
  const auto& X = sr.space();
  for (auto f : F) {
    if (!X.is_closed(f) || !sr.is_invariant(f))
      fail(Errc::NotInvariantClosed, X.format(f) + " is not an invariant closed set");
  }
  std::vector<Mask> sub = X.opens();
  sub.insert(sub.end(), F.begin(), F.end());
  Adjoined out;
  out.rel = SpaceRel(FinSpace::generated(X.names(), sub), sr.classes());
  out.before = t0_quotient(sr);
  out.after = t0_quotient(out.rel);
  out.same_components = out.before.proj == out.after.proj;
  if (out.same_components) {
    std::vector<Mask> qsub = out.before.space.opens();
    for (auto f : F) qsub.push_back(image(out.before.proj, f));
    out.closed_sets_adjoined = FinSpace::generated(out.before.space.names(), qsub) == out.after.space;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Towers and limits.

/// X_0 <- X_1 <- ... <- X_k, then identities forever.  bonds[i] : X_{i+1} -> X_i.
struct Tower {
  std::vector<FinSpace> stages;
  std::vector<PointMap> bonds;

  void validate() const {
    require(!stages.empty(), Errc::InvalidInput, "empty tower");
    require(bonds.size() + 1 == stages.size(), Errc::InvalidInput, "one bond per consecutive pair of stages");
    for (std::size_t i = 0; i < bonds.size(); ++i)
      if (!is_continuous(stages[i + 1], stages[i], bonds[i]))
        fail(Errc::NotContinuous, "bond at stage " + std::to_string(i) + " is not continuous");
  }
};

/// The limit as the subspace of the product of compatible threads; its
/// topology is generated by the preimages of opens under the projections.
struct Limit {
  FinSpace space;
  std::vector<std::vector<std::size_t>> threads;  // threads[t][i] = point of X_i
  std::vector<PointMap> proj;                     // proj[i] : limit -> X_i
};

inline Limit tower_limit(const Tower& t) {
  t.validate();
  const std::size_t k = t.stages.size();
  // Threads are determined by the last coordinate.
  Limit L;
  for (std::size_t x = 0; x < t.stages.back().size(); ++x) {
    std::vector<std::size_t> th(k);
    th[k - 1] = x;
    for (std::size_t i = k - 1; i-- > 0;) th[i] = t.bonds[i][th[i + 1]];
    L.threads.push_back(th);
  }
  L.proj.assign(k, PointMap(L.threads.size()));
  for (std::size_t s = 0; s < L.threads.size(); ++s)
    for (std::size_t i = 0; i < k; ++i) L.proj[i][s] = L.threads[s][i];
  std::vector<Mask> sub;
  for (std::size_t i = 0; i < k; ++i)
    for (auto U : t.stages[i].opens()) sub.push_back(preimage(L.proj[i], U));
  std::vector<std::string> names;
  for (const auto& th : L.threads) {
    std::string s = "(";
    for (std::size_t i = 0; i < k; ++i) s += (i ? "," : "") + t.stages[i].name(th[i]);
    names.push_back(s + ")");
  }
  L.space = FinSpace::generated(std::move(names), sub);
  return L;
}

/// The same limit computed by brute force over the product, as a check on
/// the thread shortcut.
inline std::size_t count_threads_brute(const Tower& t) {
  std::vector<std::size_t> idx(t.stages.size(), 0);
  std::size_t count = 0;
  while (true) {
    bool ok = true;
    for (std::size_t i = 0; i + 1 < idx.size() && ok; ++i) ok = t.bonds[i][idx[i + 1]] == idx[i];
    count += ok;
    std::size_t d = 0;
    while (d < idx.size() && ++idx[d] == t.stages[d].size()) idx[d++] = 0;
    if (d == idx.size()) break;
  }
  return count;
}

/// Increasing topologies tau_0 c tau_1 c ... on one point set with one
/// relation: the quotient of the join against the limit of the quotients.
struct TowerComparison {
  FinSpace join;
  Quotient join_quotient;
  std::vector<Quotient> stage_quotients;
  Tower quotient_tower;
  Limit limit;
  PointMap h;
  bool bijective = false;
  bool homeomorphism = false;
};

inline TowerComparison compare_tower(const std::vector<SpaceRel>& stages) {
  require(!stages.empty(), Errc::InvalidInput, "empty tower");
  const auto& X0 = stages.front().space();
  for (std::size_t i = 0; i < stages.size(); ++i) {
    require(stages[i].space().names() == X0.names() && stages[i].classes() == stages.front().classes(),
            Errc::InvalidInput, "stages must share points and relation");
    if (i > 0 && !is_continuous(stages[i].space(), stages[i - 1].space(), identity_map(X0.size())))
      fail(Errc::NotContinuous, "topology at stage " + std::to_string(i) + " does not refine stage " +
                                    std::to_string(i - 1));
  }
  TowerComparison out;
  std::vector<Mask> sub;
  for (const auto& s : stages) sub.insert(sub.end(), s.space().opens().begin(), s.space().opens().end());
  out.join = FinSpace::generated(X0.names(), sub);
  out.join_quotient = t0_quotient(SpaceRel(out.join, stages.front().classes()));
  for (const auto& s : stages) out.stage_quotients.push_back(t0_quotient(s));
  for (std::size_t i = 0; i < stages.size(); ++i) {
    out.quotient_tower.stages.push_back(out.stage_quotients[i].space);
    if (i + 1 < stages.size()) {
      // [x]^{i+1} |-> [x]^i
      PointMap g(out.stage_quotients[i + 1].space.size());
      for (std::size_t x = 0; x < X0.size(); ++x) g[out.stage_quotients[i + 1].proj[x]] = out.stage_quotients[i].proj[x];
      out.quotient_tower.bonds.push_back(g);
    }
  }
  out.limit = tower_limit(out.quotient_tower);
  out.h.assign(out.join_quotient.space.size(), 0);
  for (std::size_t x = 0; x < X0.size(); ++x) {
    std::vector<std::size_t> th;
    for (const auto& q : out.stage_quotients) th.push_back(q.proj[x]);
    auto it = std::find(out.limit.threads.begin(), out.limit.threads.end(), th);
    require(it != out.limit.threads.end(), Errc::Internal, "comparison lands outside the limit");
    out.h[out.join_quotient.proj[x]] = static_cast<std::size_t>(it - out.limit.threads.begin());
  }
  out.bijective = is_surjective(out.join_quotient.space, out.limit.space, out.h) &&
                  out.join_quotient.space.size() == out.limit.space.size();
  out.homeomorphism = is_homeomorphism(out.join_quotient.space, out.limit.space, out.h);
  return out;
}

/// Lax colimit of the stages 0..k and the limit, with the basic opens
/// up(U) = union over j >= i of (bonds)^-1(U) together with p_i^-1(U).
struct LaxColimit {
  FinSpace space;
  Limit limit;
  std::vector<std::size_t> offset;  // first point of stage i; the limit comes last
  bool projections_dense = false;
  bool stages_dense = false;  // each up(X_i) is dense
  bool limit_dense = false;
};

inline LaxColimit lax_colimit_density(const Tower& t) {
  t.validate();
  for (std::size_t i = 0; i < t.bonds.size(); ++i)
    if (!has_dense_image(t.stages[i + 1], t.stages[i], t.bonds[i]))
      fail(Errc::NotDenseBond, "bond at stage " + std::to_string(i) + " misses a nonempty open");
  LaxColimit out;
  out.limit = tower_limit(t);
  const std::size_t k = t.stages.size();
  std::vector<std::string> names;
  std::size_t off = 0;
  for (std::size_t i = 0; i < k; ++i) {
    out.offset.push_back(off);
    for (const auto& nm : t.stages[i].names()) names.push_back(std::to_string(i) + ":" + nm);
    off += t.stages[i].size();
  }
  out.offset.push_back(off);
  for (const auto& nm : out.limit.space.names()) names.push_back("lim:" + nm);
  require(names.size() <= FinSpace::kMaxPoints, Errc::InvalidInput, "lax colimit too large");

  auto up_of = [&](std::size_t i, Mask U) {
    Mask m = 0;
    Mask cur = U;  // subset of X_j pulled back from X_i
    for (std::size_t j = i; j < k; ++j) {
      if (j > i) cur = preimage(t.bonds[j - 1], cur);
      m |= cur << out.offset[j];
    }
    m |= preimage(out.limit.proj[i], U) << out.offset[k];
    return m;
  };
  std::vector<Mask> sub;
  for (std::size_t i = 0; i < k; ++i)
    for (auto U : t.stages[i].opens()) sub.push_back(up_of(i, U));
  out.space = FinSpace::generated(std::move(names), sub);

  auto dense = [&](Mask S) {
    return std::all_of(out.space.opens().begin(), out.space.opens().end(), [&](Mask V) { return V == 0 || (V & S); });
  };
  out.projections_dense = true;
  for (std::size_t i = 0; i < k; ++i)
    out.projections_dense = out.projections_dense && has_dense_image(out.limit.space, t.stages[i], out.limit.proj[i]);
  out.stages_dense = true;
  for (std::size_t i = 0; i < k; ++i) out.stages_dense = out.stages_dense && dense(up_of(i, t.stages[i].all()));
  out.limit_dense = dense(full_mask(out.limit.space.size()) << out.offset[k]);
  return out;
}

/// Two towers joined by vertical maps h_i : X_i -> Y_i.
struct Ladder {
  Tower top, bottom;
  std::vector<PointMap> verticals;
};

struct BeckChevalley {
  Limit X, Y;
  PointMap h;  // limit of the verticals
  bool h0_surjective = false;
  bool h_open = false;
  bool h_surjective = false;
  bool star = false;  // h(p_i^-1 U) = q_i^-1(h_i U)
};

inline BeckChevalley beck_chevalley(const Ladder& d) {
  d.top.validate();
  d.bottom.validate();
  const std::size_t k = d.top.stages.size();
  require(d.bottom.stages.size() == k && d.verticals.size() == k, Errc::InvalidInput, "ladder rows differ in length");
  for (std::size_t i = 0; i < k; ++i) {
    require(is_continuous(d.top.stages[i], d.bottom.stages[i], d.verticals[i]), Errc::InvalidInput,
            "vertical " + std::to_string(i) + " is not continuous");
    require(is_open_map(d.top.stages[i], d.bottom.stages[i], d.verticals[i]), Errc::InvalidInput,
            "vertical " + std::to_string(i) + " is not open");
    if (i + 1 < k)
      require(compose_maps(d.verticals[i], d.top.bonds[i]) == compose_maps(d.bottom.bonds[i], d.verticals[i + 1]),
              Errc::InvalidInput, "ladder square " + std::to_string(i) + " does not commute");
  }
  for (std::size_t i = 0; i + 1 < k; ++i)
    for (auto U : d.top.stages[i].opens()) {
      Mask lhs = image(d.verticals[i + 1], preimage(d.top.bonds[i], U));
      Mask rhs = preimage(d.bottom.bonds[i], image(d.verticals[i], U));
      if (lhs != rhs)
        fail(Errc::ConditionFails, "stage " + std::to_string(i) + ", U = " + d.top.stages[i].format(U) + ": " +
                                       d.bottom.stages[i + 1].format(lhs) + " != " + d.bottom.stages[i + 1].format(rhs));
    }
  BeckChevalley out;
  out.X = tower_limit(d.top);
  out.Y = tower_limit(d.bottom);
  out.h.assign(out.X.threads.size(), 0);
  for (std::size_t s = 0; s < out.X.threads.size(); ++s) {
    std::vector<std::size_t> th;
    for (std::size_t i = 0; i < k; ++i) th.push_back(d.verticals[i][out.X.threads[s][i]]);
    auto it = std::find(out.Y.threads.begin(), out.Y.threads.end(), th);
    require(it != out.Y.threads.end(), Errc::Internal, "limit map leaves the limit");
    out.h[s] = static_cast<std::size_t>(it - out.Y.threads.begin());
  }
  out.h0_surjective = is_surjective(d.top.stages[0], d.bottom.stages[0], d.verticals[0]);
  out.h_open = is_open_map(out.X.space, out.Y.space, out.h);
  out.h_surjective = is_surjective(out.X.space, out.Y.space, out.h);
  out.star = true;
  for (std::size_t i = 0; i < k; ++i)
    for (auto U : d.top.stages[i].opens())
      out.star = out.star && image(out.h, preimage(out.X.proj[i], U)) ==
                                 preimage(out.Y.proj[i], image(d.verticals[i], U));
  return out;
}

/// The ladder X_i = (X, tau_i) over Y_i = (X, tau_i) // E with the quotient
/// projections as verticals.
inline Ladder quotient_ladder(const std::vector<SpaceRel>& stages) {
  Ladder d;
  std::vector<Quotient> qs;
  for (const auto& s : stages) qs.push_back(t0_quotient(s));
  const std::size_t n = stages.front().space().size();
  for (std::size_t i = 0; i < stages.size(); ++i) {
    d.top.stages.push_back(stages[i].space());
    d.bottom.stages.push_back(qs[i].space);
    d.verticals.push_back(qs[i].proj);
    if (i + 1 < stages.size()) {
      d.top.bonds.push_back(identity_map(n));
      PointMap g(qs[i + 1].space.size());
      for (std::size_t x = 0; x < n; ++x) g[qs[i + 1].proj[x]] = qs[i].proj[x];
      d.bottom.bonds.push_back(g);
    }
  }
  return d;
}

// ---------------------------------------------------------------------------
// Stably compact round trip.

/// A compact Hausdorff topology with a closed partial order.
struct OrderedSpace {
  FinSpace patch;
  std::vector<Mask> up;  // up[x] = {y : x <= y}
};

/// Patch topology: closed sets generated by the closed sets and the
/// compact up-sets (every up-set, the space being finite); order: the
/// specialization order.
inline OrderedSpace to_patch(const FinSpace& s) {
  require(s.is_t0(), Errc::NotT0, "stably compact round trip needs a T0 space");
  std::vector<Mask> closed_sub;
  for (auto U : s.opens()) {
    closed_sub.push_back(s.all() & ~U);  // closed sets
    closed_sub.push_back(U);             // up-sets
  }
  // Generated closed family -> complements give the patch opens; the
  // subbasic closed sets are closed, so their complements are subbasic open.
  std::vector<Mask> open_sub;
  for (auto C : closed_sub) open_sub.push_back(s.all() & ~C);
  OrderedSpace o{FinSpace::generated(s.names(), open_sub), {}};
  for (std::size_t x = 0; x < s.size(); ++x) o.up.push_back(s.up(x));
  return o;
}

/// Upper topology: patch-open up-sets.
inline FinSpace to_upper(const OrderedSpace& o) {
  std::vector<Mask> opens;
  for (auto U : o.patch.opens()) {
    bool upset = true;
    for (std::size_t x = 0; x < o.patch.size() && upset; ++x)
      if (has(U, x) && (o.up[x] & ~U)) upset = false;
    if (upset) opens.push_back(U);
  }
  return FinSpace(o.patch.names(), std::move(opens));
}

struct StablyCompact {
  OrderedSpace ordered;
  FinSpace upper;
  bool identity = false;         // upper == input
  bool patch_hausdorff = false;  // discrete, the space being finite
  bool order_closed = false;     // graph of <= closed in the patch square
  bool partial_order = false;
  bool inverse = false;          // to_patch(upper) == ordered
};

inline StablyCompact stably_compact_roundtrip(const FinSpace& s) {
  StablyCompact out;
  out.ordered = to_patch(s);
  out.upper = to_upper(out.ordered);
  out.identity = out.upper == s;
  out.patch_hausdorff = out.ordered.patch.is_discrete();
  const auto& P = out.ordered.patch;
  out.order_closed = true;
  for (std::size_t x = 0; x < s.size(); ++x)
    for (std::size_t y = 0; y < s.size(); ++y) {
      if (has(out.ordered.up[x], y)) continue;
      // Separate (x, y) from the graph by a product of patch opens.
      bool separated = false;
      for (auto U : P.opens())
        for (auto V : P.opens()) {
          if (!has(U, x) || !has(V, y)) continue;
          bool disjoint = true;
          for (std::size_t a = 0; a < s.size() && disjoint; ++a)
            if (has(U, a) && (out.ordered.up[a] & V)) disjoint = false;
          if (disjoint) separated = true;
        }
      out.order_closed = out.order_closed && separated;
    }
  out.partial_order = true;
  for (std::size_t x = 0; x < s.size(); ++x)
    for (std::size_t y = 0; y < s.size(); ++y)
      if (x != y && has(out.ordered.up[x], y) && has(out.ordered.up[y], x)) out.partial_order = false;
  if (out.upper.is_t0()) {
    auto back = to_patch(out.upper);
    out.inverse = back.patch == out.ordered.patch && back.up == out.ordered.up;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Enumeration.

/// Every topology on n labelled points, as the up-set families of all
/// preorders.
inline std::vector<FinSpace> all_topologies(std::size_t n) {
  require(n <= 5, Errc::InvalidInput, "enumeration limited to 5 points");
  std::vector<FinSpace> out;
  const std::size_t pairs = n * (n - (n > 0));
  std::vector<std::pair<std::size_t, std::size_t>> off;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (x != y) off.emplace_back(x, y);
  for (std::uint64_t rel = 0; rel < (std::uint64_t{1} << pairs); ++rel) {
    std::vector<Mask> up(n);
    for (std::size_t x = 0; x < n; ++x) up[x] = bit(x);
    for (std::size_t k = 0; k < off.size(); ++k)
      if (has(rel, k)) up[off[k].first] |= bit(off[k].second);
    bool transitive = true;
    for (std::size_t x = 0; x < n && transitive; ++x)
      for (std::size_t y = 0; y < n && transitive; ++y)
        if (has(up[x], y) && (up[y] & ~up[x])) transitive = false;
    if (transitive) out.push_back(FinSpace::from_up(FinSpace::default_names(n), up));
  }
  return out;
}

/// Independent count: every family of subsets containing the empty and full
/// sets, closed under binary union and intersection.
inline std::size_t count_topologies_brute(std::size_t n) {
  require(n <= 4, Errc::InvalidInput, "brute force limited to 4 points");
  const std::size_t subsets = std::size_t{1} << n;
  const Mask all = full_mask(n);
  // Families over the 2^n - 2 proper nonempty subsets.
  std::vector<Mask> middle;
  for (Mask s = 1; s < all; ++s) middle.push_back(s);
  if (n == 0) return 1;
  std::size_t count = 0;
  for (std::uint64_t fam = 0; fam < (std::uint64_t{1} << middle.size()); ++fam) {
    std::vector<bool> in(subsets, false);
    in[0] = in[all] = true;
    for (std::size_t k = 0; k < middle.size(); ++k)
      if (has(fam, k)) in[middle[k]] = true;
    bool ok = true;
    for (Mask a = 0; a < subsets && ok; ++a) {
      if (!in[a]) continue;
      for (Mask b = a + 1; b < subsets && ok; ++b)
        if (in[b] && (!in[a | b] || !in[a & b])) ok = false;
    }
    count += ok;
  }
  return count;
}

/// Every partition of n points as class-id vectors (restricted growth strings).
inline std::vector<std::vector<std::size_t>> all_partitions(std::size_t n) {
  if (n == 0) return {{}};
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> a(n, 0);
  while (true) {
    out.push_back(a);
    // Rightmost position that may grow: a[i] <= max of the prefix.
    std::size_t i = n - 1;
    for (; i > 0; --i) {
      std::size_t mx = *std::max_element(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(i));
      if (a[i] <= mx) break;
    }
    if (i == 0) break;
    ++a[i];
    std::fill(a.begin() + static_cast<std::ptrdiff_t>(i) + 1, a.end(), 0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Space files: `points a b c`, `open {a,b}` (subbasic), `class {a,c}`,
// `action perm (a b)(c d)`, `stage` (start a finer topology).

struct SpaceFile {
  std::vector<SpaceRel> stages;  // one per `stage` section; the first is implicit
};

inline SpaceFile parse_space(std::string_view text) {
  std::vector<std::string> names;
  std::vector<std::vector<Mask>> subs(1);
  std::vector<Mask> classes;
  std::vector<std::vector<std::vector<std::string>>> perms;
  std::size_t lineno = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  auto err = [&](const std::string& msg) { fail(Errc::ParseError, "line " + std::to_string(lineno) + ": " + msg); };
  auto mask_of = [&](std::string_view set) {
    Mask m = 0;
    auto s = detail::trim(set);
    if (s.size() < 2 || s.front() != '{' || s.back() != '}') err("expected {..}");
    s = s.substr(1, s.size() - 2);
    std::size_t p = 0;
    while (p <= s.size()) {
      auto q = s.find(',', p);
      auto tok = detail::trim(s.substr(p, q == std::string_view::npos ? std::string_view::npos : q - p));
      if (!tok.empty()) {
        auto it = std::find(names.begin(), names.end(), tok);
        if (it == names.end()) err("unknown point '" + std::string(tok) + "'");
        m |= bit(static_cast<std::size_t>(it - names.begin()));
      }
      if (q == std::string_view::npos) break;
      p = q + 1;
    }
    return m;
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    auto s = std::string(detail::trim(line));
    if (s.empty()) continue;
    std::istringstream ls(s);
    std::string kw;
    ls >> kw;
    std::string rest;
    std::getline(ls, rest);
    if (kw == "points") {
      if (!names.empty()) err("points given twice");
      std::istringstream ps(rest);
      std::string p;
      while (ps >> p) names.push_back(p);
      if (names.empty()) err("no points");
    } else if (kw == "open") {
      if (names.empty()) err("open before points");
      subs.back().push_back(mask_of(rest));
    } else if (kw == "class") {
      if (names.empty()) err("class before points");
      classes.push_back(mask_of(rest));
    } else if (kw == "action") {
      std::istringstream as(rest);
      std::string perm;
      as >> perm;
      if (perm != "perm") err("expected 'action perm (..)'");
      std::string cyc;
      std::getline(as, cyc);
      std::vector<std::vector<std::string>> cycles;
      std::size_t p = 0;
      while ((p = cyc.find('(', p)) != std::string::npos) {
        auto q = cyc.find(')', p);
        if (q == std::string::npos) err("unclosed cycle");
        std::istringstream cs(cyc.substr(p + 1, q - p - 1));
        std::vector<std::string> c;
        std::string tok;
        while (cs >> tok) c.push_back(tok);
        cycles.push_back(c);
        p = q + 1;
      }
      perms.push_back(cycles);
    } else if (kw == "stage") {
      subs.emplace_back();
    } else {
      err("unknown directive '" + kw + "'");
    }
  }
  if (names.empty()) fail(Errc::ParseError, "no points declared");
  const std::size_t n = names.size();
  std::vector<PointMap> gens;
  for (const auto& cycles : perms) {
    PointMap g = identity_map(n);
    for (const auto& c : cycles)
      for (std::size_t i = 0; i < c.size(); ++i) {
        auto a = std::find(names.begin(), names.end(), c[i]);
        auto b = std::find(names.begin(), names.end(), c[(i + 1) % c.size()]);
        if (a == names.end() || b == names.end()) fail(Errc::ParseError, "unknown point in cycle");
        g[static_cast<std::size_t>(a - names.begin())] = static_cast<std::size_t>(b - names.begin());
      }
    gens.push_back(g);
  }
  std::vector<std::size_t> cls = identity_map(n);
  Mask seen = 0;
  for (auto c : classes) {
    if (c & seen) fail(Errc::ParseError, "classes overlap");
    seen |= c;
    std::size_t lead = static_cast<std::size_t>(std::countr_zero(c));
    for (std::size_t x = 0; x < n; ++x)
      if (has(c, x)) cls[x] = lead;
  }
  SpaceFile out;
  std::vector<Mask> acc;
  for (const auto& sub : subs) {
    acc.insert(acc.end(), sub.begin(), sub.end());
    auto X = FinSpace::generated(names, acc);
    SpaceRel sr = gens.empty() ? SpaceRel(X, cls) : SpaceRel::from_action(X, gens);
    if (!gens.empty() && !classes.empty()) {
      // Both given: the relation is generated by the two.
      auto a = sr.classes();
      std::vector<std::size_t> merged = identity_map(n);
      auto find = [&](std::size_t x) {
        while (merged[x] != x) x = merged[x];
        return x;
      };
      for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y)
          if (a[x] == a[y] || cls[x] == cls[y]) merged[find(x)] = find(y);
      std::vector<std::size_t> m(n);
      for (std::size_t x = 0; x < n; ++x) m[x] = find(x);
      sr = SpaceRel(X, m);
    }
    out.stages.push_back(sr);
  }
  return out;
}

}  // namespace eqdec
