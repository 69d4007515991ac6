#pragma once

// JSON run report shared by every qlaplace subcommand.

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "qlap/verify.hpp"

namespace qlap::cli {

struct RunReport {
  std::string mode;
  nlohmann::json q;
  nlohmann::json kind;
  double tol = 0.0;
  nlohmann::json inputs = nlohmann::json::object();
  std::vector<CheckRecord> results;
  nlohmann::json extra = nlohmann::json::object();

  std::size_t passed() const {
    std::size_t n = 0;
    for (const auto& r : results) n += r.pass ? 1 : 0;
    return n;
  }
  std::size_t failed() const { return results.size() - passed(); }
};

/// Non-finite numbers become null.
inline nlohmann::json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

inline nlohmann::json to_json(const RunReport& r) {
  nlohmann::json j;
  j["mode"] = r.mode;
  j["q"] = r.q;
  j["kind"] = r.kind;
  j["tol"] = r.tol;
  j["inputs"] = r.inputs;
  j["results"] = nlohmann::json::array();
  for (const auto& c : r.results) {
    j["results"].push_back({{"description", c.description},
                            {"expected", number(c.expected)},
                            {"actual", number(c.actual)},
                            {"rel_err", number(c.rel_err)},
                            {"tol", c.tol},
                            {"pass", c.pass}});
  }
  j["summary"] = {{"pass", r.passed()}, {"fail", r.failed()}};
  for (const auto& [k, v] : r.extra.items()) j[k] = v;
  return j;
}

}  // namespace qlap::cli
