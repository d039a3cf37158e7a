#pragma once

// The eqdec command line.  run_cli() is the whole program minus main(), so
// tests drive it in-process.  Exit codes: 0 all checks pass, 1 a check
// fails, 2 usage error, 3 model or file error.

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eqdec/acceptance.hpp"
#include "eqdec/hornlang.hpp"
#include "eqdec/klalg.hpp"
#include "eqdec/measures.hpp"
#include "eqdec/model.hpp"
#include "eqdec/report.hpp"
#include "eqdec/topdec.hpp"
#include "eqdec/transport.hpp"

#ifndef EQDEC_DATA_DIR
#define EQDEC_DATA_DIR "data"
#endif

namespace eqdec {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInput = 3;

namespace cli {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), Errc::InvalidInput, "cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Codes that mean the inputs themselves are malformed.
inline bool is_input_error(Errc c) {
  switch (c) {
    case Errc::InvalidInput:
    case Errc::ParseError:
    case Errc::SyntaxError:
    case Errc::TableMismatch:
    case Errc::UnboundVariable: return true;
    default: return false;
  }
}

inline std::string join_strs(const std::vector<std::string>& xs, const std::string& sep) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? sep : "") + xs[i];
  return s;
}

inline std::string pairs_str(const std::vector<std::pair<std::string, std::string>>& kv) {
  std::string s;
  for (std::size_t i = 0; i < kv.size(); ++i) s += (i ? ", " : "") + kv[i].first + "=" + kv[i].second;
  return s;
}

inline CheckResult& add_skip(RunReport& rep, std::string name, std::string why) {
  rep.checks.push_back({std::move(name), Status::Skip, std::move(why), {}});
  return rep.checks.back();
}

// transport ----------------------------------------------------------------

inline void cmd_transport(RunReport& rep, const std::string& u_text, const std::string& v_text, std::size_t bound) {
  auto u = parse_seq(u_text), v = parse_seq(v_text);
  auto p = transport(u, v);
  rep.output.push_back("case " + std::string(case_name(p.kind())));
  for (std::size_t i = 0; i < bound; ++i) {
    std::string row = "d[" + std::to_string(i) + "] =";
    for (std::size_t j = 0; j < bound; ++j) row += " " + p.entry(i, j).str();
    rep.output.push_back(row);
  }
  auto mr = verify_marginals(p, bound);
  std::size_t certs = 0;
  for (const auto* g : {&mr.rows, &mr.cols})
    for (const auto& c : *g) certs += c.divergence_certificate;
  std::istringstream lines(mr.str());
  for (std::string l; std::getline(lines, l);) rep.output.push_back(l);
  rep.add("marginals", true, "rows and columns below " + std::to_string(bound) + " match u and v")
      .detail("lines", std::to_string(mr.rows.size() + mr.cols.size()))
      .detail("divergence certificates", std::to_string(certs));
}

// kl -------------------------------------------------------------------------

inline bool use_kelem(const Model& m, const std::vector<std::string>& names, const std::string& algebra) {
  if (algebra == "k") return true;
  if (algebra == "l") return false;
  if (!m.table.all_omega()) return false;
  for (const auto& n : names)
    if (!m.sets.count(n)) return false;
  return true;
}

template <class E>
E resolve(const Model& m, const std::string& name) {
  if constexpr (std::is_same_v<E, KElem>) return m.kelem(name);
  else return m.lelem(name);
}

template <class E>
void kl_lattice(RunReport& rep, const Model& m, const std::vector<std::string>& names, bool is_meet) {
  require(names.size() == 2, Errc::InvalidInput, std::string(is_meet ? "meet" : "join") + " takes two names");
  auto a = resolve<E>(m, names[0]), b = resolve<E>(m, names[1]);
  auto f = is_meet ? meet_formula(a, b) : join_formula(a, b);
  auto p = is_meet ? meet_pointwise(a, b) : join_pointwise(a, b);
  rep.output.push_back("formula route: " + f.str());
  rep.output.push_back("pointwise route: " + p.str());
  bool agree = f == p;
  if constexpr (std::is_same_v<E, LElem>) {
    auto w = lattice_four_way(a, b, is_meet);
    rep.output.push_back("four-way route: " + w.str());
    agree = agree && f == w;
  }
  rep.add("routes agree", agree);
}

template <class E>
void kl_sum(RunReport& rep, const Model& m, const std::vector<std::string>& names, const std::string& rep_name) {
  Family<E> fam;
  for (const auto& n : names) fam.items.push_back(resolve<E>(m, n));
  if (!rep_name.empty()) fam.tail = resolve<E>(m, rep_name);
  require(!fam.items.empty() || fam.tail, Errc::InvalidInput, "sum needs at least one name");
  auto s = k_sum(fam);
  // Second route: pairwise sums, then omega copies of the tail on their own.
  std::optional<E> t;
  for (const auto& x : fam.items) t = t ? *t + x : x;
  if (fam.tail) {
    auto tail_only = k_sum(Family<E>{{}, fam.tail, std::nullopt});
    t = t ? *t + tail_only : tail_only;
  }
  rep.output.push_back("family route: " + s.str());
  rep.output.push_back("pairwise route: " + t->str());
  rep.add("routes agree", s == *t);
}

inline void kl_divide(RunReport& rep, const Model& m, const std::vector<std::string>& names, bool k, std::size_t n) {
  require(names.size() == 1, Errc::InvalidInput, "divide takes one name");
  if (k) {
    auto a = m.kelem(names[0]);
    auto d = divide(a, n);
    rep.output.push_back("quotient: " + d.quotient.str());
    bool each = true;
    for (std::size_t r = 0; r < d.transversals.size(); ++r) {
      rep.output.push_back("transversal " + std::to_string(r) + ": " + d.transversals[r].str());
      each = each && KElem::of(d.transversals[r]) == d.quotient;
    }
    rep.add("n-fold sum", n_times(d.quotient, n) == a, "n (a / n) = a");
    rep.add("transversals", each, "each transversal has the quotient's type");
  } else {
    auto a = m.lelem(names[0]);
    auto q = divide_l(a, n);
    auto r = real_multiple(ExtReal(Rational(1, static_cast<long long>(n))), a);
    rep.output.push_back("division route: " + q.str());
    rep.output.push_back("real multiple route: " + r.str());
    rep.add("n-fold sum", n_times(q, n) == a, "n (a / n) = a");
    rep.add("routes agree", q == r);
  }
}

inline void kl_chi(RunReport& rep, const Model& m, const std::vector<std::string>& names) {
  require(names.size() == 1, Errc::InvalidInput, "chi takes one name");
  auto a = m.kelem(names[0]);
  auto c = chi(a);
  auto ind = m.lelem(names[0]);
  rep.output.push_back("type: " + a.str());
  rep.output.push_back("chi route: " + c.str());
  rep.output.push_back("indicator route: " + ind.str());
  rep.add("routes agree", c == ind);
}

// measure --------------------------------------------------------------------

inline void measure_eval(RunReport& rep, const Model& m, const std::string& mu_name, const std::vector<std::string>& names) {
  const auto& mu = m.measure(mu_name);
  auto erg = is_ergodic(mu);
  rep.output.push_back(mu_name + " = " + mu.str() + (erg.ergodic ? " (ergodic)" : " (not ergodic)"));
  bool agree = true;
  for (const auto& n : names) {
    auto v = evaluate(mu, m.lelem(n));
    rep.output.push_back(mu_name + "(" + n + ") = " + v.str());
    if (m.sets.count(n)) {
      agree = agree && evaluate(mu, m.set(n)) == v;
      if (m.table.all_omega()) agree = agree && evaluate(mu, m.kelem(n)) == v;
    }
  }
  rep.add("routes agree", agree, "function, set and type evaluations coincide");
}

inline void measure_extend(RunReport& rep, const Model& m, const std::string& set_name, const std::string& weight_name,
                           std::size_t trunc, std::size_t window) {
  const auto& A = m.set(set_name);
  WeightedFn w = weight_name.empty() ? A.indicator() : m.fn(weight_name);
  RestrictedMeasure rm{A, w};
  auto closed = extend_measure(rm);
  rep.output.push_back("intensities: " + closed.str());
  auto parts = extend_partition(A, trunc, window);
  auto g = zigzag_enumeration(trunc);
  const auto& t = m.table;
  for (std::size_t i = 0; i < trunc; ++i) {
    std::string line;
    for (std::size_t c = 0; c < t.size(); ++c) {
      if (parts[i][c].empty()) continue;
      std::vector<std::string> xs;
      for (auto x : parts[i][c]) xs.push_back(std::to_string(x));
      line += " " + t[c].label + "{" + join_strs(xs, ",") + "}";
    }
    if (!line.empty()) rep.output.push_back("B_" + std::to_string(i) + " (g = " + std::to_string(g[i]) + "):" + line);
  }
  // Query: every point below the window, one at a time and all together.
  std::vector<std::pair<std::size_t, std::size_t>> all;
  std::size_t mismatches = 0, uncovered = 0;
  for (std::size_t c = 0; c < t.size(); ++c) {
    std::size_t n = t[c].size.is_omega() ? window : std::min<std::size_t>(window, t[c].size.finite());
    for (std::size_t x = 0; x < n; ++x) {
      all.emplace_back(c, x);
      auto v = extend_formula(rm, {{c, x}}, trunc);
      uncovered += v.uncovered.size();
      if (v.exact() && !(v.value == closed.at(c) * (first_member(A.on(c)) ? ExtReal(1) : ExtReal(0))))
        ++mismatches;
    }
  }
  auto total = extend_formula(rm, all, trunc);
  ExtReal expect;
  for (std::size_t c = 0; c < t.size(); ++c) {
    std::size_t n = t[c].size.is_omega() ? window : std::min<std::size_t>(window, t[c].size.finite());
    expect = expect + ExtReal(static_cast<long long>(n)) * closed.at(c);
  }
  rep.output.push_back("formula on the window: " + total.value.str());
  rep.add("formula equals closed form", mismatches == 0 && total.exact() && total.value == expect)
      .detail("points", std::to_string(all.size()))
      .detail("uncovered", std::to_string(uncovered))
      .detail("truncation", std::to_string(trunc));
}

inline void measure_separate(RunReport& rep, const Model& m, const std::vector<std::string>& names) {
  require(names.size() == 2, Errc::InvalidInput, "separate takes two names");
  auto a = m.kelem(names[0]), b = m.kelem(names[1]);
  auto s = separate(a, b);
  auto ma = evaluate(s.mu, a), mb = evaluate(s.mu, b);
  rep.output.push_back("mu = " + s.mu.str() + " (counting on " + m.table[s.cls].label + ")");
  rep.output.push_back("mu(" + names[0] + ") = " + ma.str());
  rep.output.push_back("mu(" + names[1] + ") = " + mb.str());
  rep.add("separates", mb < ma, "mu(b) < mu(a)").detail("atomic branch", s.atomic_branch ? "yes" : "no");
}

inline void measure_dual(RunReport& rep, const Model& m, const std::string& name, const std::vector<std::string>& scale_text) {
  auto x = m.lelem(name);
  std::vector<ExtReal> scales;
  for (const auto& s : scale_text) scales.push_back(ExtReal::parse(s));
  auto f = iota(x);
  auto back = dual_reconstruct(f).alpha;
  rep.output.push_back("iota(" + name + ") coefficients: " + LElem(x.table(), f.c).str());
  rep.output.push_back("reconstructed: " + back.str());
  // The same functional given by the threshold presentation {mu : mu(x) > r}.
  auto pres = dual_reconstruct(from_presentation(x.table(), {{ThresholdAtom{x, ExtReal(1)}}}), scales);
  rep.output.push_back("from presentation: " + pres.alpha.str());
  rep.add("round trip", back == x, "alpha(iota x) = x");
  std::size_t singular = 0;
  for (const auto& c : pres.checks) singular += c.singular;
  rep.add("presentation", pres.alpha == x && pres.ok(), "threshold presentation reconstructs x")
      .detail("sampled measures", std::to_string(pres.checks.size()))
      .detail("singular", std::to_string(singular));
}

// top ------------------------------------------------------------------------

inline const SpaceRel& stage_of(const SpaceFile& f, std::size_t i) {
  require(i < f.stages.size(), Errc::InvalidInput, "no stage " + std::to_string(i));
  return f.stages[i];
}

inline void add_quotient_checks(RunReport& rep, const Quotient& q, const std::string& prefix) {
  rep.add(prefix + "open projection", q.open_projection);
  rep.add(prefix + "T0", q.t0);
  rep.add(prefix + "kernel", q.kernel, "p(x) = p(y) iff cl[x] = cl[y]");
  rep.add(prefix + "minimal fibers", q.minimal_fibers);
  rep.add(prefix + "order", q.order, "p(x) <= p(y) iff x in cl[y]");
}

inline std::string map_str(const FinSpace& X, const FinSpace& Y, const PointMap& p) {
  std::vector<std::string> xs;
  for (std::size_t x = 0; x < p.size(); ++x) xs.push_back(X.name(x) + "->" + Y.name(p[x]));
  return join_strs(xs, " ");
}

inline void top_quotient(RunReport& rep, const SpaceRel& sr) {
  rep.output.push_back("space: " + sr.space().str());
  rep.output.push_back("classes: " + sr.partition_str());
  if (auto U = saturation_check(sr)) {
    rep.add("saturation", false, "saturations of opens must be open")
        .detail("open", sr.space().format(*U))
        .detail("saturation", sr.space().format(sr.saturation(*U)));
    return;
  }
  rep.add("saturation", true, "saturations of opens are open");
  auto q = t0_quotient(sr);
  rep.output.push_back("quotient: " + q.space.str());
  rep.output.push_back("projection: " + map_str(sr.space(), q.space, q.proj));
  add_quotient_checks(rep, q, "");
}

inline void top_adjoin(RunReport& rep, const SpaceRel& sr, const std::vector<std::string>& closed) {
  std::vector<Mask> F;
  for (const auto& c : closed) F.push_back(sr.space().parse_subset(c));
  auto a = adjoin_closed(sr, F);
  rep.output.push_back("before: " + a.before.space.str());
  rep.output.push_back("after: " + a.after.space.str());
  rep.add("same components", a.same_components, "the quotients partition X alike");
  rep.add("closed sets adjoined", a.closed_sets_adjoined, "after = before with the images of F adjoined");
  add_quotient_checks(rep, a.after, "after: ");
}

inline void top_tower(RunReport& rep, const SpaceFile& f) {
  const auto& st = f.stages;
  for (std::size_t i = 0; i < st.size(); ++i) rep.output.push_back("stage " + std::to_string(i) + ": " + st[i].space().str());
  auto c = compare_tower(st);
  rep.output.push_back("join quotient: " + c.join_quotient.space.str());
  rep.output.push_back("limit: " + c.limit.space.str());
  rep.add("h bijective", c.bijective);
  rep.add("h homeomorphism", c.homeomorphism, "quotient of the join = limit of the quotients");
  auto bc = beck_chevalley(quotient_ladder(st));
  rep.add("Beck-Chevalley", bc.star);
  if (bc.h0_surjective)
    rep.add("limit map", bc.h_open && bc.h_surjective, "open surjection");
  else
    add_skip(rep, "limit map", "h_0 is not surjective");
  try {
    auto l = lax_colimit_density(c.quotient_tower);
    rep.add("lax colimit density", l.projections_dense && l.stages_dense && l.limit_dense)
        .detail("points", std::to_string(l.space.size()));
  } catch (const Error& e) {
    if (e.code() != Errc::NotDenseBond) throw;
    add_skip(rep, "lax colimit density", e.what());
  }
}

inline void top_patch(RunReport& rep, const FinSpace& X) {
  auto s = stably_compact_roundtrip(X);
  rep.output.push_back("patch: " + s.ordered.patch.str());
  rep.output.push_back("upper: " + s.upper.str());
  rep.add("identity", s.identity, "upper(patch(X)) = X");
  rep.add("patch Hausdorff", s.patch_hausdorff);
  rep.add("order closed", s.order_closed);
  rep.add("partial order", s.partial_order);
  rep.add("inverse", s.inverse, "patch(upper(P)) = P");
}

inline void top_enumerate(RunReport& rep, std::size_t max_points, const std::string& suite) {
  bool all = suite == "all";
  if (all || suite == "counts") {
    std::vector<std::string> counts;
    bool agree = true;
    for (std::size_t n = 0; n <= max_points; ++n) {
      auto k = all_topologies(n).size();
      counts.push_back(std::to_string(k));
      agree = agree && k == count_topologies_brute(n);
    }
    rep.add("topology counts", agree, "preorder route matches brute force").detail("counts", join_strs(counts, ","));
  }
  if (all || suite == "quotient") {
    std::size_t pairs = 0, bad = 0;
    std::string first;
    for (std::size_t n = 0; n <= max_points; ++n)
      for (const auto& X : all_topologies(n))
        for (const auto& p : all_partitions(n)) {
          SpaceRel sr(X, p);
          if (saturation_check(sr)) continue;
          ++pairs;
          if (!t0_quotient(sr).ok() && bad++ == 0) first = X.str() + " / " + sr.partition_str();
        }
    auto& c = rep.add("quotient", bad == 0, "postconditions on every saturated pair");
    c.detail("pairs", std::to_string(pairs));
    if (bad) c.detail("first failure", first);
  }
  if (all || suite == "patch") {
    std::size_t spaces = 0, bad = 0;
    std::string first;
    for (std::size_t n = 0; n <= max_points; ++n)
      for (const auto& X : all_topologies(n)) {
        if (!X.is_t0()) continue;
        ++spaces;
        auto s = stably_compact_roundtrip(X);
        if (!(s.identity && s.patch_hausdorff && s.order_closed && s.partial_order && s.inverse) && bad++ == 0)
          first = X.str();
      }
    auto& c = rep.add("patch", bad == 0, "round trip on every T0 space");
    c.detail("spaces", std::to_string(spaces));
    if (bad) c.detail("first failure", first);
  }
}

// horn -----------------------------------------------------------------------

inline void verdict_into(CheckResult& c, const HornVerdict& v, const std::string& where) {
  c.detail(where + " trials", std::to_string(v.trials)).detail(where + " vacuous", std::to_string(v.vacuous));
  if (!v.pass) {
    c.detail("counterexample", pairs_str(v.counterexample)).detail("lhs", v.lhs).detail("rhs", v.rhs);
    if (c.status == Status::Pass) c.status = Status::Fail;
    c.summary += " (fails in " + where + ")";
  }
}

inline void horn_check(RunReport& rep, const std::string& file, const std::string& algebra, const std::string& model_path,
                       std::uint64_t seed, std::size_t trials) {
  auto cat = parse_catalog(read_file(file));
  std::optional<Model> model;
  if (!model_path.empty()) model = parse_model(read_file(model_path));
  std::vector<ClassTable> tables;
  if (model) {
    tables.push_back(model->table);
  } else if (algebra == "lelem") {
    tables = {ClassTable({{"A", Card::omega()}}), ClassTable({{"A", Card(3)}, {"B", Card::omega()}}),
              ClassTable({{"A", Card::omega()}, {"B", Card::omega()}, {"C", Card(1)}})};
  } else if (algebra == "kelem") {
    tables = {ClassTable::omega(1), ClassTable::omega(2), ClassTable::omega(3)};
  }
  Rng root(seed);
  for (std::size_t i = 0; i < cat.size(); ++i) {
    const auto& e = cat[i];
    rep.output.push_back(e.name + ": " + print(e.axiom));
    CheckResult c{e.name, Status::Pass, e.expect_valid ? "listed as valid" : "listed as invalid", {}};
    Rng r = root.fork(i);
    if (algebra == "extreal") {
      auto g = check_exhaustive(e.axiom, ExtRealAlgebra{}, small_ext_grid());
      verdict_into(c, g, "grid");
      if (g.pass) verdict_into(c, check(e.axiom, ExtRealAlgebra{}, r, trials), "random");
    } else {
      for (std::size_t k = 0; k < tables.size() && c.status == Status::Pass; ++k) {
        const auto where = algebra + " table " + std::to_string(k);
        if (algebra == "lelem")
          verdict_into(c, check(e.axiom, LElemAlgebra{{tables[k]}}, r.fork(k), trials), where);
        else
          verdict_into(c, check(e.axiom, KElemAlgebra{{tables[k]}}, r.fork(k), trials), where);
      }
    }
    rep.checks.push_back(std::move(c));
  }
}

inline void horn_parse(RunReport& rep, const std::string& file) {
  auto cat = parse_catalog(read_file(file));
  std::size_t valid = 0;
  bool round_trip = true;
  for (const auto& e : cat) {
    rep.output.push_back(e.name + ": " + print(e.axiom));
    valid += e.expect_valid;
    round_trip = round_trip && parse_axiom(print(e.axiom)) == e.axiom;
  }
  rep.add("printer round trip", round_trip)
      .detail("axioms", std::to_string(cat.size()))
      .detail("listed valid", std::to_string(valid));
}

}  // namespace cli

/// Runs one command line (without the program name).
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  using namespace cli;
  CLI::App app{"Equidecomposition types, invariant measures and topological decompositions"};
  app.name("eqdec");
  app.fallthrough();
  app.require_subcommand(1);

  std::string format = "text", out_path;
  std::uint64_t seed = 20240601;
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--out", out_path, "Also write the report here")->envname("EQDEC_OUT");
  app.add_option("--seed", seed, "Seed for every random choice")->envname("EQDEC_SEED");

  std::function<void(RunReport&)> action;

  // transport
  std::string u_text, v_text;
  std::size_t bound = 8;
  auto* tr = app.add_subcommand("transport", "The transport matrix d(u, v) and its marginals");
  tr->add_option("--u", u_text, "Source sequence [a,b;tail]")->required();
  tr->add_option("--v", v_text, "Target sequence")->required();
  tr->add_option("--bound", bound, "Window size")->check(CLI::Range(1, 256));
  tr->callback([&] { action = [&](RunReport& r) { cmd_transport(r, u_text, v_text, bound); }; });

  // kl
  std::string model_path, algebra_kl = "auto", rep_name;
  std::vector<std::string> names;
  std::size_t by = 2;
  auto* kl = app.add_subcommand("kl", "Operations in K(E) and L(E)");
  kl->require_subcommand(1);
  auto kl_cmd = [&](const char* name, const char* help) {
    auto* s = kl->add_subcommand(name, help);
    s->add_option("--model", model_path, "Model file")->required();
    s->add_option("--in", algebra_kl, "k, l, or auto")->check(CLI::IsMember({"auto", "k", "l"}));
    s->add_option("names", names, "Model element names");
    return s;
  };
  auto dispatch_kl = [&](auto body_k, auto body_l) {
    return [&, body_k, body_l](RunReport& r) {
      auto m = parse_model(read_file(model_path));
      auto all = names;
      if (!rep_name.empty()) all.push_back(rep_name);
      if (use_kelem(m, all, algebra_kl)) body_k(r, m);
      else body_l(r, m);
    };
  };
  {
    auto* s = kl_cmd("meet", "Meet by both routes");
    s->callback([&] {
      action = dispatch_kl([&](RunReport& r, const Model& m) { kl_lattice<KElem>(r, m, names, true); },
                           [&](RunReport& r, const Model& m) { kl_lattice<LElem>(r, m, names, true); });
    });
  }
  {
    auto* s = kl_cmd("join", "Join by both routes");
    s->callback([&] {
      action = dispatch_kl([&](RunReport& r, const Model& m) { kl_lattice<KElem>(r, m, names, false); },
                           [&](RunReport& r, const Model& m) { kl_lattice<LElem>(r, m, names, false); });
    });
  }
  {
    auto* s = kl_cmd("sum", "Sum of the named elements, plus omega copies of --rep");
    s->add_option("--rep", rep_name, "Element repeated omega times");
    s->callback([&] {
      action = dispatch_kl([&](RunReport& r, const Model& m) { kl_sum<KElem>(r, m, names, rep_name); },
                           [&](RunReport& r, const Model& m) { kl_sum<LElem>(r, m, names, rep_name); });
    });
  }
  {
    auto* s = kl_cmd("divide", "a / n with transversals");
    s->add_option("--by", by, "Divisor")->check(CLI::Range(1, 1000));
    s->callback([&] {
      action = dispatch_kl([&](RunReport& r, const Model& m) { kl_divide(r, m, names, true, by); },
                           [&](RunReport& r, const Model& m) { kl_divide(r, m, names, false, by); });
    });
  }
  {
    auto* s = kl_cmd("chi", "The map K(E) -> L(E)");
    s->callback([&] {
      action = [&](RunReport& r) { kl_chi(r, parse_model(read_file(model_path)), names); };
    });
  }

  // measure
  std::string mu_name, set_name, weight_name;
  std::size_t trunc = 64, window = 16;
  std::vector<std::string> scales{"1/2", "1", "3"};
  auto* ms = app.add_subcommand("measure", "Invariant measures");
  ms->require_subcommand(1);
  auto with_model = [&](CLI::App* s) { s->add_option("--model", model_path, "Model file")->required(); };
  {
    auto* s = ms->add_subcommand("eval", "Evaluate a measure on named elements");
    with_model(s);
    s->add_option("--measure", mu_name, "Measure name")->required();
    s->add_option("names", names, "Element names")->required();
    s->callback([&] { action = [&](RunReport& r) { measure_eval(r, parse_model(read_file(model_path)), mu_name, names); }; });
  }
  {
    auto* s = ms->add_subcommand("extend", "Extend a measure given on a complete section");
    with_model(s);
    s->add_option("--set", set_name, "The set A")->required();
    s->add_option("--weight", weight_name, "Point weights on A (default 1)");
    s->add_option("--trunc", trunc, "Number of translates")->check(CLI::Range(1, 4096));
    s->add_option("--window", window, "Indices shown and checked per class")->check(CLI::Range(1, 1024));
    s->callback([&] {
      action = [&](RunReport& r) { measure_extend(r, parse_model(read_file(model_path)), set_name, weight_name, trunc, window); };
    });
  }
  {
    auto* s = ms->add_subcommand("separate", "A measure with mu(b) < mu(a) for a not below b");
    with_model(s);
    s->add_option("names", names, "a b")->required()->expected(2);
    s->callback([&] { action = [&](RunReport& r) { measure_separate(r, parse_model(read_file(model_path)), names); }; });
  }
  {
    auto* s = ms->add_subcommand("dual", "Duality round trip");
    with_model(s);
    s->add_option("name", set_name, "Element name")->required();
    s->add_option("--scales", scales, "Multiples r of the ergodic measures to sample");
    s->callback([&] { action = [&](RunReport& r) { measure_dual(r, parse_model(read_file(model_path)), set_name, scales); }; });
  }

  // top
  std::string space_path, suite = "all";
  std::size_t stage = 0, max_points = 4;
  std::vector<std::string> closed;
  auto* top = app.add_subcommand("top", "Finite spaces with an equivalence relation");
  top->require_subcommand(1);
  auto with_space = [&](CLI::App* s, bool staged) {
    s->add_option("--space", space_path, "Space file")->required();
    if (staged) s->add_option("--stage", stage, "Which stage of the file");
  };
  auto load_space = [&] { return parse_space(read_file(space_path)); };
  {
    auto* s = top->add_subcommand("quotient", "T0 quotient X // E");
    with_space(s, true);
    s->callback([&] { action = [&](RunReport& r) { top_quotient(r, stage_of(load_space(), stage)); }; });
  }
  {
    auto* s = top->add_subcommand("adjoin", "Adjoin invariant closed sets");
    with_space(s, true);
    s->add_option("--closed", closed, "Closed set {a,b}; repeatable")->required();
    s->callback([&] { action = [&](RunReport& r) { top_adjoin(r, stage_of(load_space(), stage), closed); }; });
  }
  {
    auto* s = top->add_subcommand("tower", "Increasing topologies: limit, Beck-Chevalley, lax colimit");
    with_space(s, false);
    s->callback([&] { action = [&](RunReport& r) { top_tower(r, load_space()); }; });
  }
  {
    auto* s = top->add_subcommand("patch", "Stably compact round trip");
    with_space(s, true);
    s->callback([&] { action = [&](RunReport& r) { top_patch(r, stage_of(load_space(), stage).space()); }; });
  }
  {
    auto* s = top->add_subcommand("enumerate", "Exhaustive checks over small spaces");
    s->add_option("--max-points", max_points, "Largest space")->check(CLI::Range(0, 4));
    s->add_option("--suite", suite, "counts, quotient, patch, or all")
        ->check(CLI::IsMember({"all", "counts", "quotient", "patch"}));
    s->callback([&] { action = [&](RunReport& r) { top_enumerate(r, max_points, suite); }; });
  }

  // horn
  std::string horn_file, horn_algebra = "extreal";
  std::size_t trials = 500;
  auto* horn = app.add_subcommand("horn", "Horn axioms over the algebras");
  horn->require_subcommand(1);
  {
    auto* s = horn->add_subcommand("check", "Search for counterexamples");
    s->add_option("--file", horn_file, "Axiom catalog")->required();
    s->add_option("--algebra", horn_algebra, "extreal, lelem, or kelem")
        ->check(CLI::IsMember({"extreal", "lelem", "kelem"}));
    s->add_option("--model", model_path, "Take the class table from a model file");
    s->add_option("--trials", trials, "Random valuations per axiom and table")->check(CLI::Range(0, 1000000));
    s->callback([&] {
      action = [&](RunReport& r) { horn_check(r, horn_file, horn_algebra, model_path, seed, trials); };
    });
  }
  {
    auto* s = horn->add_subcommand("parse", "Parse and reprint a catalog");
    s->add_option("--file", horn_file, "Axiom catalog")->required();
    s->callback([&] { action = [&](RunReport& r) { horn_parse(r, horn_file); }; });
  }

  // accept
  std::vector<int> only;
  std::string catalog_path = std::string(EQDEC_DATA_DIR) + "/axioms.horn";
  auto* acc = app.add_subcommand("accept", "Run the acceptance criteria");
  acc->add_option("--only", only, "Criterion numbers")->check(CLI::Range(1, kCriteria))->delimiter(',');
  acc->add_option("--catalog", catalog_path, "Axiom catalog for criterion 4");
  acc->callback([&] {
    action = [&](RunReport& r) {
      auto text = read_file(catalog_path);
      for (auto& c : run_acceptance(seed, text, std::set<int>(only.begin(), only.end()))) r.checks.push_back(std::move(c));
    };
  });

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  } catch (const Error& e) {
    // A callback that touched the inputs; callbacks only record actions.
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }

  RunReport rep;
  rep.command = args;
  rep.seed = seed;
  try {
    action(rep);
  } catch (const Error& e) {
    if (is_input_error(e.code())) {
      err << "error: " << e.what() << '\n';
      return kExitInput;
    }
    rep.checks.push_back({"precondition", Status::Fail, e.what(), {{"code", std::string(errc_name(e.code()))}}});
  }

  const std::string text = format == "json" ? rep.json_text() : rep.text();
  out << text;
  if (!out_path.empty()) {
    std::ofstream f(out_path, std::ios::binary);
    f << text;
    if (!f) {
      err << "error: cannot write '" << out_path << "'\n";
      return kExitInput;
    }
  }
  return rep.ok() ? kExitOk : kExitCheckFailed;
}

}  // namespace eqdec
