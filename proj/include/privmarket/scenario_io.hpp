// Scenario files: strict JSON parsing with named-key diagnostics, plus the
// canonical re-serialization used by the export command.
//
// Layout:
//   {
//     "demand": 2.0,
//     "holders": [ { "a": 0.1, "h": 0.002, "label": "A" }, ... ],
//     "dynamics": { "p0": 0.2, "step_size": 0.005, "max_iters": 10000,
//                   "tol_abs": 1e-8, "tol_rel": 1e-8 }
//   }
// "label" and the whole "dynamics" block are optional; every key inside
// "dynamics" is optional.  Unknown keys are rejected by name.
#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "privmarket/errors.hpp"
#include "privmarket/scenario.hpp"

namespace privmarket {

struct DynamicsOverrides {
  std::optional<double> p0;
  std::optional<double> step_size;
  std::optional<long> max_iters;
  std::optional<double> tol_abs;
  std::optional<double> tol_rel;

  bool any() const {
    return p0 || step_size || max_iters || tol_abs || tol_rel;
  }
  bool operator==(const DynamicsOverrides&) const = default;
};

struct ScenarioDocument {
  MarketScenario scenario;
  std::vector<std::string> labels;  // one per holder, empty when absent
  DynamicsOverrides dynamics;
};

namespace detail {

using json = nlohmann::ordered_json;

[[noreturn]] inline void io_fail(const std::string& source, const std::string& what) {
  throw ScenarioParseError(source + ": " + what);
}

inline void reject_unknown_keys(const std::string& source, const json& obj,
                                std::initializer_list<const char*> allowed,
                                const std::string& context) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed)
      if (item.key() == k) known = true;
    if (!known)
      io_fail(source, "unknown key \"" + item.key() + "\" in " + context);
  }
}

inline double require_number(const std::string& source, const json& obj,
                             const char* key, const std::string& context) {
  if (!obj.contains(key))
    io_fail(source, "missing key \"" + std::string(key) + "\" in " + context);
  const json& v = obj.at(key);
  if (!v.is_number())
    io_fail(source, context + "." + key + ": expected a number");
  return v.get<double>();
}

}  // namespace detail

// Parses and validates scenario JSON; source names the input (file name or a
// placeholder) for diagnostics.
inline ScenarioDocument parse_scenario_text(const std::string& text,
                                            const std::string& source) {
  detail::json doc;
  try {
    doc = detail::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i)
      if (text[i] == '\n') ++line;
    detail::io_fail(source, "JSON syntax error at line " + std::to_string(line) +
                                ": " + e.what());
  }
  if (!doc.is_object()) detail::io_fail(source, "top level must be an object");
  detail::reject_unknown_keys(source, doc, {"demand", "holders", "dynamics"},
                              "scenario");

  double demand = detail::require_number(source, doc, "demand", "scenario");
  if (!(std::isfinite(demand) && demand > 0.0))
    detail::io_fail(source, "demand: must be finite and > 0");

  if (!doc.contains("holders"))
    detail::io_fail(source, "missing key \"holders\" in scenario");
  const detail::json& holders = doc.at("holders");
  if (!holders.is_array() || holders.empty())
    detail::io_fail(source, "holders: expected a non-empty array");

  std::vector<QuadraticCost> costs;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < holders.size(); ++i) {
    std::string ctx = "holders[" + std::to_string(i) + "]";
    const detail::json& h = holders[i];
    if (!h.is_object()) detail::io_fail(source, ctx + ": expected an object");
    detail::reject_unknown_keys(source, h, {"a", "h", "label"}, ctx);
    double a = detail::require_number(source, h, "a", ctx);
    double hh = detail::require_number(source, h, "h", ctx);
    if (!(std::isfinite(a) && a >= 0.0))
      detail::io_fail(source, ctx + ".a: must be finite and >= 0");
    if (!(std::isfinite(hh) && hh > 0.0))
      detail::io_fail(source, ctx + ".h: must be finite and > 0");
    std::string label;
    if (h.contains("label")) {
      if (!h.at("label").is_string())
        detail::io_fail(source, ctx + ".label: expected a string");
      label = h.at("label").get<std::string>();
    }
    costs.emplace_back(a, hh);
    labels.push_back(std::move(label));
  }

  DynamicsOverrides dyn;
  if (doc.contains("dynamics")) {
    const detail::json& d = doc.at("dynamics");
    if (!d.is_object()) detail::io_fail(source, "dynamics: expected an object");
    detail::reject_unknown_keys(
        source, d, {"p0", "step_size", "max_iters", "tol_abs", "tol_rel"},
        "dynamics");
    auto opt_positive = [&](const char* key) -> std::optional<double> {
      if (!d.contains(key)) return std::nullopt;
      double v = detail::require_number(source, d, key, "dynamics");
      if (!(std::isfinite(v) && v > 0.0))
        detail::io_fail(source, std::string("dynamics.") + key + ": must be finite and > 0");
      return v;
    };
    dyn.p0 = opt_positive("p0");
    dyn.step_size = opt_positive("step_size");
    if (d.contains("max_iters")) {
      const detail::json& v = d.at("max_iters");
      if (!v.is_number_integer() || v.get<long>() < 1)
        detail::io_fail(source, "dynamics.max_iters: must be an integer >= 1");
      dyn.max_iters = v.get<long>();
    }
    auto opt_nonnegative = [&](const char* key) -> std::optional<double> {
      if (!d.contains(key)) return std::nullopt;
      double v = detail::require_number(source, d, key, "dynamics");
      if (!(std::isfinite(v) && v >= 0.0))
        detail::io_fail(source, std::string("dynamics.") + key + ": must be finite and >= 0");
      return v;
    };
    dyn.tol_abs = opt_nonnegative("tol_abs");
    dyn.tol_rel = opt_nonnegative("tol_rel");
  }

  return ScenarioDocument{MarketScenario(demand, std::move(costs)),
                          std::move(labels), dyn};
}

inline ScenarioDocument load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioParseError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), path);
}

// Canonical serialization: fixed key order, two-space indent, trailing
// newline; shortest round-trip number formatting, so exporting an exported
// file reproduces it byte for byte.
inline std::string scenario_to_json(const ScenarioDocument& doc) {
  detail::json out;
  out["demand"] = doc.scenario.demand;
  out["holders"] = detail::json::array();
  for (std::size_t i = 0; i < doc.scenario.size(); ++i) {
    detail::json h;
    if (i < doc.labels.size() && !doc.labels[i].empty())
      h["label"] = doc.labels[i];
    h["a"] = doc.scenario.holders[i].a;
    h["h"] = doc.scenario.holders[i].h;
    out["holders"].push_back(std::move(h));
  }
  if (doc.dynamics.any()) {
    detail::json d;
    if (doc.dynamics.p0) d["p0"] = *doc.dynamics.p0;
    if (doc.dynamics.step_size) d["step_size"] = *doc.dynamics.step_size;
    if (doc.dynamics.max_iters) d["max_iters"] = *doc.dynamics.max_iters;
    if (doc.dynamics.tol_abs) d["tol_abs"] = *doc.dynamics.tol_abs;
    if (doc.dynamics.tol_rel) d["tol_rel"] = *doc.dynamics.tol_rel;
    out["dynamics"] = std::move(d);
  }
  return out.dump(2) + "\n";
}

inline void write_scenario_file(const std::string& path, const ScenarioDocument& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ScenarioParseError(path + ": cannot open file for writing");
  out << scenario_to_json(doc);
}

}  // namespace privmarket
