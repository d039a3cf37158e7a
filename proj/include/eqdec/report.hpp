#pragma once

// Run reports.  The JSON form keeps insertion order and carries no timing,
// so equal argv and seed give byte-identical output.

#include <cstdint>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "eqdec/error.hpp"

namespace eqdec {

enum class Status { Pass, Fail, Skip };

inline std::string status_name(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Skip: return "skip";
  }
  return "?";
}

inline Status parse_status(const std::string& s) {
  if (s == "pass") return Status::Pass;
  if (s == "fail") return Status::Fail;
  if (s == "skip") return Status::Skip;
  fail(Errc::ParseError, "unknown status '" + s + "'");
}

struct CheckResult {
  std::string name;
  Status status = Status::Pass;
  std::string summary;
  std::vector<std::pair<std::string, std::string>> details;  // certificates, counterexamples, counts

  CheckResult& detail(std::string k, std::string v) {
    details.emplace_back(std::move(k), std::move(v));
    return *this;
  }

  friend bool operator==(const CheckResult&, const CheckResult&) = default;
};

struct RunReport {
  std::vector<std::string> command;
  std::uint64_t seed = 0;
  std::vector<std::string> output;  // free-form result lines
  std::vector<CheckResult> checks;

  bool ok() const {
    for (const auto& c : checks)
      if (c.status == Status::Fail) return false;
    return true;
  }

  CheckResult& add(std::string name, bool pass, std::string summary = {}) {
    checks.push_back({std::move(name), pass ? Status::Pass : Status::Fail, std::move(summary), {}});
    return checks.back();
  }

  nlohmann::ordered_json json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["seed"] = seed;
    j["output"] = output;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
      nlohmann::ordered_json cj;
      cj["name"] = c.name;
      cj["status"] = status_name(c.status);
      cj["summary"] = c.summary;
      auto d = nlohmann::ordered_json::array();
      for (const auto& [k, v] : c.details) d.push_back({k, v});
      cj["details"] = d;
      arr.push_back(std::move(cj));
    }
    j["checks"] = std::move(arr);
    j["ok"] = ok();
    return j;
  }

  std::string json_text() const { return json().dump(2) + "\n"; }

  static RunReport from_json(const nlohmann::ordered_json& j) {
    RunReport r;
    try {
      r.command = j.at("command").get<std::vector<std::string>>();
      r.seed = j.at("seed").get<std::uint64_t>();
      r.output = j.at("output").get<std::vector<std::string>>();
      for (const auto& cj : j.at("checks")) {
        CheckResult c;
        c.name = cj.at("name").get<std::string>();
        c.status = parse_status(cj.at("status").get<std::string>());
        c.summary = cj.at("summary").get<std::string>();
        for (const auto& d : cj.at("details")) c.details.emplace_back(d.at(0).get<std::string>(), d.at(1).get<std::string>());
        r.checks.push_back(std::move(c));
      }
    } catch (const nlohmann::json::exception& e) {
      fail(Errc::ParseError, std::string("bad report: ") + e.what());
    }
    return r;
  }

  std::string text() const {
    std::ostringstream os;
    os << "command:";
    for (const auto& a : command) os << ' ' << a;
    os << "\nseed: " << seed << '\n';
    for (const auto& line : output) os << line << '\n';
    for (const auto& c : checks) {
      os << '[' << status_name(c.status) << "] " << c.name;
      if (!c.summary.empty()) os << ": " << c.summary;
      os << '\n';
      for (const auto& [k, v] : c.details) os << "    " << k << " = " << v << '\n';
    }
    os << (ok() ? "OK" : "FAILED") << '\n';
    return os.str();
  }

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

}  // namespace eqdec
