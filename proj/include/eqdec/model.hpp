#pragma once

// Model files.  One directive per line, `#` comments:
//
//   class <label> size <n|omega>
//   set <name> in <label>: finite{..} | cofinite{..} | pattern[..]
//   fn <name>: <label> -> [prefix;tail]
//   measure <name>: (v0, v1, ...)      intensities in class order
//
// A set or function not mentioned on some class is empty (zero) there.

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eqdec/eqrel.hpp"
#include "eqdec/klalg.hpp"
#include "eqdec/measures.hpp"

namespace eqdec {

struct Model {
  ClassTable table;
  std::map<std::string, BorelSet> sets;
  std::map<std::string, WeightedFn> fns;
  std::map<std::string, InvMeasure> measures;

  const BorelSet& set(const std::string& name) const { return lookup(sets, name, "set"); }
  const WeightedFn& fn(const std::string& name) const { return lookup(fns, name, "function"); }
  const InvMeasure& measure(const std::string& name) const { return lookup(measures, name, "measure"); }

  /// A name resolved as an element of K(E): sets only.
  KElem kelem(const std::string& name) const { return KElem::of(set(name)); }
  /// A name resolved as an element of L(E): functions, or set indicators.
  LElem lelem(const std::string& name) const {
    if (auto it = fns.find(name); it != fns.end()) return LElem::of(it->second);
    if (auto it = sets.find(name); it != sets.end()) return LElem::of(it->second.indicator());
    fail(Errc::InvalidInput, "no function or set named '" + name + "'");
  }

 private:
  template <class M>
  static const typename M::mapped_type& lookup(const M& m, const std::string& name, const char* what) {
    auto it = m.find(name);
    require(it != m.end(), Errc::InvalidInput, std::string("no ") + what + " named '" + name + "'");
    return it->second;
  }
};

namespace detail {

inline std::string_view take_token(std::string_view& s) {
  s = trim(s);
  std::size_t e = 0;
  while (e < s.size() && !std::isspace(static_cast<unsigned char>(s[e])) && s[e] != ':') ++e;
  auto tok = s.substr(0, e);
  s = s.substr(e);
  return tok;
}

inline void expect_colon(std::string_view& s) {
  s = trim(s);
  require(!s.empty() && s[0] == ':', Errc::ParseError, "expected ':'");
  s = s.substr(1);
}

}  // namespace detail

inline Model parse_model(std::string_view text) {
  std::vector<ClassInfo> classes;
  struct Pending {
    std::string name, label, body;
    std::size_t line;
  };
  std::vector<Pending> sets, fns, measures;

  std::size_t lineno = 0, start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    start = end + 1;
    ++lineno;
    if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
    line = detail::trim(line);
    if (!line.empty()) {
      try {
        auto kw = detail::take_token(line);
        if (kw == "class") {
          std::string label(detail::take_token(line));
          require(detail::take_token(line) == "size", Errc::ParseError, "expected 'size'");
          auto size = Card::parse(detail::take_token(line));
          require(detail::trim(line).empty(), Errc::ParseError, "trailing input");
          classes.push_back({label, size});
        } else if (kw == "set") {
          std::string name(detail::take_token(line));
          require(detail::take_token(line) == "in", Errc::ParseError, "expected 'in'");
          std::string label(detail::take_token(line));
          detail::expect_colon(line);
          sets.push_back({name, label, std::string(detail::trim(line)), lineno});
        } else if (kw == "fn") {
          std::string name(detail::take_token(line));
          detail::expect_colon(line);
          std::string label(detail::take_token(line));
          line = detail::trim(line);
          require(line.substr(0, 2) == "->", Errc::ParseError, "expected '->'");
          fns.push_back({name, label, std::string(detail::trim(line.substr(2))), lineno});
        } else if (kw == "measure") {
          std::string name(detail::take_token(line));
          detail::expect_colon(line);
          measures.push_back({name, "", std::string(detail::trim(line)), lineno});
        } else {
          fail(Errc::ParseError, "unknown directive '" + std::string(kw) + "'");
        }
      } catch (const Error& e) {
        fail(Errc::ParseError, "model line " + std::to_string(lineno) + ": " + e.what());
      }
    }
    if (end == text.size()) break;
  }

  Model m;
  m.table = ClassTable(std::move(classes));
  auto at_line = [](std::size_t line, auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      fail(Errc::ParseError, "model line " + std::to_string(line) + ": " + e.what());
    }
  };
  std::map<std::string, std::vector<IndexSet>> set_parts;
  for (const auto& p : sets)
    at_line(p.line, [&] {
      auto& per = set_parts.try_emplace(p.name, m.table.size(), IndexSet({}, false)).first->second;
      per[m.table.index_of(p.label)] = parse_index_set(p.body);
    });
  for (auto& [name, per] : set_parts) {
    std::size_t line = 0;
    for (const auto& p : sets)
      if (p.name == name) line = p.line;
    at_line(line, [&] { m.sets.emplace(name, BorelSet(m.table, per)); });
  }
  std::map<std::string, std::vector<TailSeq>> fn_parts;
  for (const auto& p : fns)
    at_line(p.line, [&] {
      auto& per = fn_parts.try_emplace(p.name, m.table.size(), TailSeq()).first->second;
      per[m.table.index_of(p.label)] = parse_seq(p.body);
    });
  for (auto& [name, per] : fn_parts) {
    std::size_t line = 0;
    for (const auto& p : fns)
      if (p.name == name) line = p.line;
    at_line(line, [&] { m.fns.emplace(name, WeightedFn(m.table, per)); });
  }
  for (const auto& p : measures)
    at_line(p.line, [&] { m.measures.insert_or_assign(p.name, InvMeasure::parse(m.table, p.body)); });
  return m;
}

}  // namespace eqdec
