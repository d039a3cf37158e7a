#pragma once

// Horn axioms over countable sums, binary meets, joins and real multiples.
//
//   axiom := ['forall' var* '.'] [eq {',' eq} '=>'] eq
//   eq    := term '=' term
//   term  := prod {'+' prod}
//   prod  := lit '*' prod | atom
//   atom  := var | '(' term ')' | 'meet' '(' term ',' term ')'
//          | ('sum' | 'join') '(' [term {',' term}] [';' 'rep' term] ')'
//
// Without `forall` every variable is bound implicitly.
//
// Catalog files hold one axiom per line, optionally prefixed by `name:`;
// `#` starts a comment and a comment beginning with `invalid` marks an
// axiom expected to fail over the extended reals.

#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eqdec/error.hpp"
#include "eqdec/extnum.hpp"
#include "eqdec/klalg.hpp"
#include "eqdec/sampling.hpp"

namespace eqdec {

struct Term {
  enum class Kind { Var, Sum, Meet, Join, Scale };
  Kind kind = Kind::Var;
  std::string name;        // Var
  ExtReal lit;             // Scale
  std::vector<Term> args;  // Sum/Join items, Meet pair, Scale operand
  bool tail = false;       // Sum/Join: the last arg is replicated omega times

  static Term var(std::string n) {
    Term t;
    t.name = std::move(n);
    return t;
  }
  static Term node(Kind k, std::vector<Term> a, bool tail = false) {
    Term t;
    t.kind = k;
    t.args = std::move(a);
    t.tail = tail;
    return t;
  }
  static Term scale(ExtReal r, Term x) {
    Term t = node(Kind::Scale, {std::move(x)});
    t.lit = std::move(r);
    return t;
  }

  friend bool operator==(const Term&, const Term&) = default;
};

struct Equation {
  Term lhs, rhs;
  friend bool operator==(const Equation&, const Equation&) = default;
};

struct HornAxiom {
  std::vector<std::string> declared;
  std::vector<Equation> hypotheses;
  Equation conclusion;
  std::vector<std::string> variables;  // declared first, then by first use

  friend bool operator==(const HornAxiom&, const HornAxiom&) = default;
};

// ---------------------------------------------------------------------------
// Printing.

namespace detail {

inline bool infix_sum(const Term& t) { return t.kind == Term::Kind::Sum && !t.tail && t.args.size() >= 2; }

inline void print_term(std::string& out, const Term& t);

inline void print_list(std::string& out, const char* head, const Term& t) {
  out += head;
  out += '(';
  std::size_t n = t.args.size() - (t.tail ? 1 : 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += ", ";
    print_term(out, t.args[i]);
  }
  if (t.tail) {
    out += n ? "; rep " : "rep ";
    print_term(out, t.args.back());
  }
  out += ')';
}

inline void print_term(std::string& out, const Term& t) {
  switch (t.kind) {
    case Term::Kind::Var: out += t.name; return;
    case Term::Kind::Meet:
      out += "meet(";
      print_term(out, t.args[0]);
      out += ", ";
      print_term(out, t.args[1]);
      out += ')';
      return;
    case Term::Kind::Join: print_list(out, "join", t); return;
    case Term::Kind::Scale:
      out += t.lit.str() + " * ";
      if (infix_sum(t.args[0])) {
        out += '(';
        print_term(out, t.args[0]);
        out += ')';
      } else {
        print_term(out, t.args[0]);
      }
      return;
    case Term::Kind::Sum:
      if (!infix_sum(t)) {
        print_list(out, "sum", t);
        return;
      }
      for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (i) out += " + ";
        bool paren = infix_sum(t.args[i]);
        if (paren) out += '(';
        print_term(out, t.args[i]);
        if (paren) out += ')';
      }
      return;
  }
}

}  // namespace detail

inline std::string print(const Term& t) {
  std::string s;
  detail::print_term(s, t);
  return s;
}

inline std::string print(const Equation& e) { return print(e.lhs) + " = " + print(e.rhs); }

inline std::string print(const HornAxiom& ax) {
  std::string s;
  if (!ax.declared.empty()) {
    s += "forall";
    for (const auto& v : ax.declared) s += " " + v;
    s += ". ";
  }
  for (std::size_t i = 0; i < ax.hypotheses.size(); ++i) s += (i ? ", " : "") + print(ax.hypotheses[i]);
  if (!ax.hypotheses.empty()) s += " => ";
  return s + print(ax.conclusion);
}

// ---------------------------------------------------------------------------
// Parsing.

namespace detail {

class HornParser {
 public:
  explicit HornParser(std::string_view src) : src_(src) {}

  HornAxiom axiom() {
    HornAxiom ax;
    bool quantified = peek_word() == "forall";
    if (quantified) {
      take_word();
      while (true) {
        skip_ws();
        if (at('.')) {
          ++pos_;
          break;
        }
        auto v = take_word();
        if (v.empty()) error("expected a variable or '.'");
        check_var(v);
        ax.declared.push_back(v);
      }
    }
    std::vector<Equation> eqs{equation()};
    while (skip_ws(), at(',')) {
      ++pos_;
      eqs.push_back(equation());
    }
    skip_ws();
    if (at('=') && at_next('>')) {
      pos_ += 2;
      ax.hypotheses = std::move(eqs);
      ax.conclusion = equation();
    } else {
      if (eqs.size() > 1) error("several equations need '=>'");
      ax.conclusion = eqs.front();
    }
    skip_ws();
    if (pos_ < src_.size()) error("unexpected trailing input");

    ax.variables = ax.declared;
    auto note = [&](const std::vector<std::string>& vs, bool binding) {
      for (const auto& v : vs) {
        if (std::find(ax.variables.begin(), ax.variables.end(), v) == ax.variables.end()) {
          if (!binding && quantified) fail(Errc::SyntaxError, "variable '" + v + "' in the conclusion is not bound");
          ax.variables.push_back(v);
        }
      }
    };
    for (const auto& h : ax.hypotheses) note(vars_of(h), true);
    note(vars_of(ax.conclusion), false);
    return ax;
  }

 private:
  static void collect(const Term& t, std::vector<std::string>& out) {
    if (t.kind == Term::Kind::Var) {
      if (std::find(out.begin(), out.end(), t.name) == out.end()) out.push_back(t.name);
      return;
    }
    for (const auto& a : t.args) collect(a, out);
  }
  static std::vector<std::string> vars_of(const Equation& e) {
    std::vector<std::string> out;
    collect(e.lhs, out);
    collect(e.rhs, out);
    return out;
  }

  Equation equation() {
    Term l = term();
    skip_ws();
    if (!at('=') || at_next('>')) error("expected '='");
    ++pos_;
    return {std::move(l), term()};
  }

  Term term() {
    std::vector<Term> items{prod()};
    while (skip_ws(), at('+')) {
      ++pos_;
      items.push_back(prod());
    }
    if (items.size() == 1) return std::move(items.front());
    return Term::node(Term::Kind::Sum, std::move(items));
  }

  Term prod() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
      while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '/')) ++pos_;
      return scaled(src_.substr(start, pos_ - start), start);
    }
    if (peek_word() == "inf") {
      take_word();
      return scaled("inf", start);
    }
    return atom();
  }

  Term scaled(std::string_view lit, std::size_t start) {
    ExtReal r;
    try {
      r = ExtReal::parse(lit);
    } catch (const Error&) {
      pos_ = start;
      error("bad literal '" + std::string(lit) + "'");
    }
    skip_ws();
    if (!at('*')) error("expected '*' after a literal");
    ++pos_;
    return Term::scale(std::move(r), prod());
  }

  Term atom() {
    skip_ws();
    if (at('(')) {
      ++pos_;
      Term t = term();
      expect(')');
      return t;
    }
    std::size_t start = pos_;
    auto w = take_word();
    if (w.empty()) error("expected a term");
    if (w == "meet") {
      expect('(');
      Term a = term();
      expect(',');
      Term b = term();
      expect(')');
      return Term::node(Term::Kind::Meet, {std::move(a), std::move(b)});
    }
    if (w == "sum" || w == "join") return list(w == "sum" ? Term::Kind::Sum : Term::Kind::Join);
    if (keyword(w)) {
      pos_ = start;
      error("unexpected keyword '" + w + "'");
    }
    check_var(w, start);
    return Term::var(w);
  }

  Term list(Term::Kind k) {
    expect('(');
    std::vector<Term> items;
    bool tail = false;
    skip_ws();
    if (!at(')') && peek_word() != "rep") {
      items.push_back(term());
      while (skip_ws(), at(',')) {
        ++pos_;
        items.push_back(term());
      }
      skip_ws();
      if (at(';')) {
        ++pos_;
        if (peek_word() != "rep") error("expected 'rep'");
        tail = true;
      }
    } else if (peek_word() == "rep") {
      tail = true;
    }
    if (tail) {
      take_word();
      items.push_back(term());
    }
    expect(')');
    return Term::node(k, std::move(items), tail);
  }

  static bool keyword(const std::string& w) {
    return w == "forall" || w == "meet" || w == "join" || w == "sum" || w == "rep" || w == "inf";
  }
  void check_var(const std::string& v, std::optional<std::size_t> at_pos = std::nullopt) {
    if (keyword(v) || std::isdigit(static_cast<unsigned char>(v[0]))) {
      if (at_pos) pos_ = *at_pos;
      error("'" + v + "' is not a variable name");
    }
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  bool at(char c) const { return pos_ < src_.size() && src_[pos_] == c; }
  bool at_next(char c) const { return pos_ + 1 < src_.size() && src_[pos_ + 1] == c; }
  void expect(char c) {
    skip_ws();
    if (!at(c)) error(std::string("expected '") + c + "'");
    ++pos_;
  }
  static bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }
  std::string peek_word() {
    skip_ws();
    std::size_t e = pos_;
    while (e < src_.size() && word_char(src_[e])) ++e;
    return std::string(src_.substr(pos_, e - pos_));
  }
  std::string take_word() {
    auto w = peek_word();
    pos_ += w.size();
    return w;
  }

  [[noreturn]] void error(const std::string& msg) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos_ && i < src_.size(); ++i) {
      if (src_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    fail(Errc::SyntaxError, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline HornAxiom parse_axiom(std::string_view source) { return detail::HornParser(source).axiom(); }

struct CatalogEntry {
  std::string name;
  HornAxiom axiom;
  bool expect_valid = true;
  std::size_t line = 0;
};

inline std::vector<CatalogEntry> parse_catalog(std::string_view text) {
  std::vector<CatalogEntry> out;
  std::size_t lineno = 0, start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    start = end + 1;
    ++lineno;
    std::string_view comment;
    if (auto h = line.find('#'); h != std::string_view::npos) {
      comment = detail::trim(line.substr(h + 1));
      line = line.substr(0, h);
    }
    line = detail::trim(line);
    if (line.empty()) continue;
    CatalogEntry e;
    e.line = lineno;
    if (auto c = line.find(':'); c != std::string_view::npos) {
      e.name = std::string(detail::trim(line.substr(0, c)));
      line = line.substr(c + 1);
    } else {
      e.name = "axiom" + std::to_string(out.size() + 1);
    }
    e.expect_valid = comment.substr(0, 7) != "invalid";
    try {
      e.axiom = parse_axiom(line);
    } catch (const Error& err) {
      fail(Errc::SyntaxError, "catalog line " + std::to_string(lineno) + ": " + err.what());
    }
    out.push_back(std::move(e));
    if (end == text.size()) break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Algebras.

struct ExtRealAlgebra {
  using Elem = ExtReal;
  std::string name() const { return "extreal"; }
  Elem sum(const std::vector<Elem>& xs, const std::optional<Elem>& tail) const {
    Elem s(0);
    for (const auto& x : xs) s = ext_add(s, x);
    if (tail && !tail->is_zero()) s = ExtReal::infinity();
    return s;
  }
  Elem meet(const Elem& a, const Elem& b) const { return ext_min(a, b); }
  Elem join(const std::vector<Elem>& xs, const std::optional<Elem>& tail) const {
    Elem s(0);
    for (const auto& x : xs) s = ext_max(s, x);
    if (tail) s = ext_max(s, *tail);
    return s;
  }
  Elem scale(const ExtReal& r, const Elem& a) const { return ext_scale(r, a); }
  Elem sample(Rng& r) const { return sample_ext(r); }
  std::string str(const Elem& a) const { return a.str(); }
};

template <class E>
struct ClassAlgebra {
  using Elem = E;
  ClassTable table;

  Elem sum(const std::vector<Elem>& xs, const std::optional<Elem>& tail) const {
    if (xs.empty() && !tail) return Elem::zero(table);
    return k_sum(Family<Elem>{xs, tail, std::nullopt});
  }
  Elem meet(const Elem& a, const Elem& b) const { return eqdec::meet(a, b); }
  Elem join(const std::vector<Elem>& xs, const std::optional<Elem>& tail) const {
    Elem s = Elem::zero(table);
    for (const auto& x : xs) s = eqdec::join(s, x);
    if (tail) s = eqdec::join(s, *tail);
    return s;
  }
  std::string str(const Elem& a) const { return a.str(); }
};

struct LElemAlgebra : ClassAlgebra<LElem> {
  std::string name() const { return "lelem"; }
  Elem scale(const ExtReal& r, const Elem& a) const {
    auto out = real_multiple(r, a);
    require(out == real_multiple_by_division(r, a), Errc::Internal, "real multiple routes disagree");
    return out;
  }
  Elem sample(Rng& r) const { return sample_lelem(r, table); }
};

/// Counting types.  r a is defined when every finite nonzero count is
/// divisible by the denominator of r.
struct KElemAlgebra : ClassAlgebra<KElem> {
  std::string name() const { return "kelem"; }
  Elem scale(const ExtReal& r, const Elem& a) const {
    if (r.is_inf()) return k_sum(Family<KElem>{{}, a, std::nullopt});
    auto p = static_cast<std::uint64_t>(numerator(r.value()));
    auto q = static_cast<std::uint64_t>(denominator(r.value()));
    bool aperiodic = true;
    std::vector<Card> v;
    for (std::size_t c = 0; c < a.size(); ++c) {
      const auto& n = a.at(c);
      if (n.is_omega() || n.is_zero()) {
        v.push_back(n);
        continue;
      }
      aperiodic = false;
      if (n.finite() % q != 0)
        fail(Errc::ScaleUndefined, r.str() + " * " + a.str() + " is undefined at class " + a.table()[c].label);
      v.push_back(Card(n.finite() / q));
    }
    KElem base = aperiodic ? divide(a, q).quotient : KElem(a.table(), std::move(v));
    return n_times(base, p);
  }
  Elem sample(Rng& r) const { return sample_kelem(r, table, false); }
};

// ---------------------------------------------------------------------------
// Evaluation and checking.

template <class Alg>
using Valuation = std::map<std::string, typename Alg::Elem>;

template <class Alg>
typename Alg::Elem evaluate(const Term& t, const Valuation<Alg>& val, const Alg& alg) {
  using Elem = typename Alg::Elem;
  auto items = [&](std::vector<Elem>& xs, std::optional<Elem>& tail) {
    std::size_t n = t.args.size() - (t.tail ? 1 : 0);
    for (std::size_t i = 0; i < n; ++i) xs.push_back(evaluate(t.args[i], val, alg));
    if (t.tail) tail = evaluate(t.args.back(), val, alg);
  };
  switch (t.kind) {
    case Term::Kind::Var: {
      auto it = val.find(t.name);
      if (it == val.end()) fail(Errc::UnboundVariable, "no value for '" + t.name + "'");
      return it->second;
    }
    case Term::Kind::Meet: return alg.meet(evaluate(t.args[0], val, alg), evaluate(t.args[1], val, alg));
    case Term::Kind::Scale: return alg.scale(t.lit, evaluate(t.args[0], val, alg));
    case Term::Kind::Sum: {
      std::vector<Elem> xs;
      std::optional<Elem> tail;
      items(xs, tail);
      return alg.sum(xs, tail);
    }
    case Term::Kind::Join: {
      std::vector<Elem> xs;
      std::optional<Elem> tail;
      items(xs, tail);
      return alg.join(xs, tail);
    }
  }
  fail(Errc::Internal, "unknown term kind");
}

inline bool lattice_free(const Term& t) {
  if (t.kind == Term::Kind::Meet || t.kind == Term::Kind::Join) return false;
  return std::all_of(t.args.begin(), t.args.end(), lattice_free);
}

struct HornVerdict {
  bool pass = true;
  std::size_t trials = 0;    // valuations tried
  std::size_t vacuous = 0;   // hypotheses false or a side undefined
  std::vector<std::pair<std::string, std::string>> counterexample;  // variable, value
  std::string lhs, rhs;      // conclusion sides at the counterexample
};

namespace detail {

/// One valuation: true unless the hypotheses hold, both conclusion sides
/// are defined and they differ.
template <class Alg>
bool holds(const HornAxiom& ax, const Valuation<Alg>& val, const Alg& alg, HornVerdict& v) {
  try {
    for (const auto& h : ax.hypotheses)
      if (!(evaluate(h.lhs, val, alg) == evaluate(h.rhs, val, alg))) {
        ++v.vacuous;
        return true;
      }
    auto l = evaluate(ax.conclusion.lhs, val, alg);
    auto r = evaluate(ax.conclusion.rhs, val, alg);
    if (l == r) return true;
    v.pass = false;
    for (const auto& name : ax.variables) v.counterexample.emplace_back(name, alg.str(val.at(name)));
    v.lhs = alg.str(l);
    v.rhs = alg.str(r);
    return false;
  } catch (const Error& e) {
    if (e.code() != Errc::ScaleUndefined) throw;
    ++v.vacuous;
    return true;
  }
}

}  // namespace detail

/// Randomized search; trial k draws from rng.fork(k).
template <class Alg>
HornVerdict check(const HornAxiom& ax, const Alg& alg, const Rng& rng, std::size_t trials) {
  HornVerdict v;
  for (std::size_t k = 0; k < trials; ++k) {
    Rng r = rng.fork(k);
    Valuation<Alg> val;
    for (const auto& name : ax.variables) val.emplace(name, alg.sample(r));
    ++v.trials;
    if (!detail::holds(ax, val, alg, v)) break;
  }
  return v;
}

/// Every valuation over a fixed value list, in lexicographic order.
template <class Alg>
HornVerdict check_exhaustive(const HornAxiom& ax, const Alg& alg, const std::vector<typename Alg::Elem>& values) {
  HornVerdict v;
  std::vector<std::size_t> idx(ax.variables.size(), 0);
  if (values.empty()) return v;
  while (true) {
    Valuation<Alg> val;
    for (std::size_t i = 0; i < idx.size(); ++i) val.emplace(ax.variables[i], values[idx[i]]);
    ++v.trials;
    if (!detail::holds(ax, val, alg, v)) return v;
    std::size_t d = idx.size();
    while (d > 0 && ++idx[d - 1] == values.size()) idx[--d] = 0;
    if (d == 0) return v;
  }
}

inline std::vector<ExtReal> small_ext_grid() {
  return {ExtReal(0), ExtReal(1, 3), ExtReal(1, 2), ExtReal(1), ExtReal(2), ExtReal::infinity()};
}

}  // namespace eqdec
