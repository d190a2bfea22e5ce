#pragma once

// Rendering of extracted types as human-readable text and as a
// machine-readable JSON document that round-trips losslessly.

#include <optional>
#include <string>

#include <json.hpp>

#include "gc/types.hpp"

namespace gc {

struct TypeReport {
  std::string component;
  ComponentType type;
};

inline std::string type_report_text(const TypeReport& r) {
  return r.component + " : " + to_string(r.type);
}

inline nlohmann::json to_json(const ExtNat& e) {
  if (e.infinite) return "inf";
  return e.n;
}

inline nlohmann::json type_report_json(const TypeReport& r) {
  nlohmann::json doc;
  doc["component"] = r.component;
  doc["inputs"] = nlohmann::json::array();
  for (const auto& [port, bt] : r.type.inputs)
    doc["inputs"].push_back({{"port", port}, {"basicType", bt.name}});
  doc["constraints"] = nlohmann::json::array();
  for (const auto& [port, c] : r.type.constraints) {
    nlohmann::json jc;
    jc["port"] = port;
    jc["basicType"] = c.type.name;
    jc["bound"] = to_json(c.bound);
    jc["deps"] = nlohmann::json::array();
    for (const auto& [dp, d] : c.deps) {
      nlohmann::json jd;
      jd["port"] = dp;
      jd["kind"] = d.kind == Dependency::Kind::Initial ? "initial" : "each";
      if (d.kind == Dependency::Kind::PerEach) jd["count"] = to_json(d.count);
      jc["deps"].push_back(jd);
    }
    doc["constraints"].push_back(jc);
  }
  return doc;
}

inline std::optional<ExtNat> extnat_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return ExtNat::inf();
    return std::nullopt;
  }
  if (j.is_number_unsigned() || j.is_number_integer())
    return ExtNat::fin(j.get<uint64_t>());
  return std::nullopt;
}

inline std::optional<TypeReport> type_report_from_json(const nlohmann::json& doc) {
  TypeReport r;
  if (!doc.contains("inputs") || !doc.contains("constraints")) return std::nullopt;
  if (doc.contains("component")) r.component = doc["component"].get<std::string>();
  for (const auto& ji : doc["inputs"])
    r.type.inputs.emplace(ji["port"].get<std::string>(),
                          BasicType{ji["basicType"].get<std::string>()});
  for (const auto& jc : doc["constraints"]) {
    Constraint c;
    c.type = BasicType{jc["basicType"].get<std::string>()};
    auto b = extnat_from_json(jc["bound"]);
    if (!b) return std::nullopt;
    c.bound = *b;
    for (const auto& jd : jc["deps"]) {
      if (jd["kind"].get<std::string>() == "initial") {
        c.deps.emplace(jd["port"].get<std::string>(), Dependency::initial());
      } else {
        auto n = extnat_from_json(jd["count"]);
        if (!n) return std::nullopt;
        c.deps.emplace(jd["port"].get<std::string>(), Dependency::per_each(*n));
      }
    }
    r.type.constraints.emplace(jc["port"].get<std::string>(), std::move(c));
  }
  return r;
}

}  // namespace gc
