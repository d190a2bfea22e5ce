#pragma once

// Conformance of a (modified) component type to a local protocol, and the
// well-typedness judgment tying everything together: a composite is well
// typed when its subcomponents are, its type extracts through the
// interfacing role, and every role's modified type conforms to its
// projection.

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gc/extraction.hpp"
#include "gc/model.hpp"
#include "gc/projection.hpp"
#include "gc/types.hpp"

namespace gc {

// ---------------------------------------------------------------------------
// t1 <= t2 when some sequence of inputs turns t1 into exactly t2. Inputs act
// independently per port and monotonically, so existence reduces to a
// consistent per-port count of inputs: finite per-each differences fix it,
// a dropped initial dependency demands at least one, a kept initial
// dependency demands none, and bounds never move.

inline bool leq(const ModifiedType& t1, const ModifiedType& t2) {
  if (t1.inputs != t2.inputs) return false;
  if (t1.constraints.size() != t2.constraints.size()) return false;

  // Per input port: the exact number of inputs needed, if pinned, and the
  // weakest lower bound collected so far.
  std::map<std::string, std::optional<uint64_t>> exact;
  std::map<std::string, uint64_t> at_least;

  for (const auto& [y, c1] : t1.constraints) {
    auto it = t2.constraints.find(y);
    if (it == t2.constraints.end()) return false;
    const Constraint& c2 = it->second;
    if (c1.type != c2.type || !(c1.bound == c2.bound)) return false;

    for (const auto& [x, d1] : c1.deps) {
      auto dit = c2.deps.find(x);
      if (dit == c2.deps.end()) {
        // Only an initial dependency can disappear, and doing so costs at
        // least one input.
        if (d1.kind != Dependency::Kind::Initial) return false;
        at_least[x] = std::max<uint64_t>(at_least[x], 1);
        continue;
      }
      const Dependency& d2 = dit->second;
      if (d1.kind != d2.kind) return false;
      if (d1.kind == Dependency::Kind::Initial) {
        // Still present on both sides: no input on x may have happened.
        if (exact[x] && *exact[x] != 0) return false;
        exact[x] = 0;
        continue;
      }
      if (d1.count.infinite != d2.count.infinite) return false;
      if (d1.count.infinite) continue;  // unaffected by inputs
      if (d2.count.n < d1.count.n) return false;
      uint64_t diff = d2.count.n - d1.count.n;
      if (exact[x] && *exact[x] != diff) return false;
      exact[x] = diff;
    }
    for (const auto& [x, d2] : c2.deps) {
      (void)d2;
      if (!c1.deps.count(x)) return false;  // inputs never add dependencies
    }
  }
  for (const auto& [x, lo] : at_least) {
    auto it = exact.find(x);
    if (it != exact.end() && it->second && *it->second < lo) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Conformance judgment with a recorded derivation.

struct ConformanceResult {
  bool ok = false;
  std::vector<std::pair<int, std::string>> trace;  // (depth, rule application)
  std::string failure;                             // set when !ok
};

namespace detail {

inline bool conforms_rec(std::map<std::string, ModifiedType>& env, const ModifiedType& t,
                         const LocalProtocolPtr& lp, int depth, ConformanceResult& res) {
  if (!lp) return true;
  switch (lp->form) {
    case LocalProtocol::Form::Recv: {
      auto step = type_input(t, lp->port);
      if (!step) {
        res.failure = "input " + lp->port + "?:" + lp->type.name + " not in the interface";
        return false;
      }
      if (step->first != lp->type) {
        res.failure = "input " + lp->port + " carries " + step->first.name +
                      ", protocol wants " + lp->type.name;
        return false;
      }
      res.trace.push_back({depth, "InpConf " + lp->port + "?:" + lp->type.name});
      return conforms_rec(env, step->second, lp->cont, depth + 1, res);
    }
    case LocalProtocol::Form::Send: {
      auto step = type_output(t, lp->port);
      if (!step.enabled()) {
        res.failure = "output " + lp->port + "!:" + lp->type.name + " blocked: " +
                      to_string(step.block);
        return false;
      }
      if (step.result->first != lp->type) {
        res.failure = "output " + lp->port + " carries " + step.result->first.name +
                      ", protocol wants " + lp->type.name;
        return false;
      }
      res.trace.push_back({depth, "OutConf " + lp->port + "!:" + lp->type.name});
      return conforms_rec(env, step.result->second, lp->cont, depth + 1, res);
    }
    case LocalProtocol::Form::Rec: {
      res.trace.push_back({depth, "RecConf " + lp->var});
      env[lp->var] = t;
      return conforms_rec(env, t, lp->cont, depth + 1, res);
    }
    case LocalProtocol::Form::Var: {
      auto it = env.find(lp->var);
      if (it == env.end()) {
        res.failure = "unbound recursion variable " + lp->var;
        return false;
      }
      if (!leq(it->second, t)) {
        res.failure = "type at " + lp->var + " not reachable by inputs from the recorded one";
        return false;
      }
      res.trace.push_back({depth, "VarConf " + lp->var});
      return true;
    }
    case LocalProtocol::Form::End:
      res.trace.push_back({depth, "EndConf"});
      return true;
  }
  return false;
}

}  // namespace detail

inline ConformanceResult conforms(std::map<std::string, ModifiedType> env, const ModifiedType& t,
                                  const LocalProtocolPtr& lp) {
  ConformanceResult res;
  res.ok = detail::conforms_rec(env, t, lp, 0, res);
  return res;
}

inline std::string render_trace(const ConformanceResult& r) {
  std::string out;
  for (const auto& [depth, line] : r.trace) {
    out.append(static_cast<size_t>(depth) * 2, ' ');
    out += line;
    out += '\n';
  }
  if (!r.ok) out += "FAILED: " + r.failure + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Well-typedness

struct IllTyped {
  enum class Clause { Validation, Extraction, Projection, Conformance };

  Clause clause;
  std::string role;        // innermost role path where the failure occurred
  std::string message;
  std::optional<ConformanceResult> conformance;
};

inline std::string to_string(IllTyped::Clause c) {
  switch (c) {
    case IllTyped::Clause::Validation: return "validation";
    case IllTyped::Clause::Extraction: return "extraction";
    case IllTyped::Clause::Projection: return "projection";
    case IllTyped::Clause::Conformance: return "conformance";
  }
  return "?";
}

using TypeOfResult = std::variant<ComponentType, IllTyped>;

namespace detail {

inline TypeOfResult type_of_rec(const Component& k, const GammaEnv& env,
                                const std::string& path) {
  if (k.is_base()) {
    auto t = extract_base(k.base(), env);
    if (std::holds_alternative<TypeError>(t))
      return IllTyped{IllTyped::Clause::Extraction, path, to_string(std::get<TypeError>(t)),
                      std::nullopt};
    return std::get<ComponentType>(t);
  }

  const CompositeComponent& c = k.composite();
  std::map<std::string, ComponentType> sub_types;
  for (const auto& [role, sub] : c.roles) {
    auto t = type_of_rec(*sub, env, path.empty() ? role : path + "/" + role);
    if (std::holds_alternative<IllTyped>(t)) return t;
    sub_types.emplace(role, std::get<ComponentType>(std::move(t)));
  }

  auto proj_of = [&](const std::string& role) -> std::variant<LocalProtocolPtr, IllTyped> {
    auto pr = project(c.protocol, role, c.binders, env.label_types);
    if (pr.error) {
      auto kind = pr.error->kind == ProjectionError::Kind::MissingBinder ? "no distribution binder"
                                                                         : "no basic type";
      return IllTyped{IllTyped::Clause::Projection, role,
                      std::string(kind) + " for label " + pr.error->label, std::nullopt};
    }
    return pr.protocol;
  };

  // Every role's modified type must conform to its projection. Only the
  // interfacing role's ports can be forwarded, so for the others the
  // modification is the identity.
  for (const auto& [role, sub] : c.roles) {
    (void)sub;
    auto lp = proj_of(role);
    if (std::holds_alternative<IllTyped>(lp)) return std::get<IllTyped>(lp);
    ModifiedType mt = modify(c.forwarders, sub_types.at(role));
    if (role != c.interfacing_role && !(mt == sub_types.at(role)))
      return IllTyped{IllTyped::Clause::Extraction, role,
                      "forwarders touched a non-interfacing component", std::nullopt};
    auto conf = conforms({}, mt, std::get<LocalProtocolPtr>(lp));
    if (!conf.ok)
      return IllTyped{IllTyped::Clause::Conformance, path.empty() ? role : path + "/" + role,
                      conf.failure, std::move(conf)};
  }

  auto lp = proj_of(c.interfacing_role);
  if (std::holds_alternative<IllTyped>(lp)) return std::get<IllTyped>(lp);
  auto t = extract_composite(c, sub_types.at(c.interfacing_role),
                             std::get<LocalProtocolPtr>(lp));
  if (std::holds_alternative<TypeError>(t))
    return IllTyped{IllTyped::Clause::Extraction, path, to_string(std::get<TypeError>(t)),
                    std::nullopt};
  return std::get<ComponentType>(t);
}

}  // namespace detail

// K has type T: validation, recursive extraction and per-role conformance in
// one judgment. Works on initial and runtime configurations alike.
inline TypeOfResult type_of(const Component& k, const GammaEnv& env) {
  auto errs = validate(k, env.fn_types);
  if (!errs.empty())
    return IllTyped{IllTyped::Clause::Validation, "", to_string(errs.front()), std::nullopt};
  return detail::type_of_rec(k, env, "");
}

// Conformance results for every role of a composite, for reporting.
inline std::map<std::string, ConformanceResult> role_conformance(const CompositeComponent& c,
                                                                 const GammaEnv& env) {
  std::map<std::string, ConformanceResult> out;
  for (const auto& [role, sub] : c.roles) {
    auto t = detail::type_of_rec(*sub, env, role);
    if (std::holds_alternative<IllTyped>(t)) continue;
    auto pr = project(c.protocol, role, c.binders, env.label_types);
    if (pr.error) continue;
    out.emplace(role,
                conforms({}, modify(c.forwarders, std::get<ComponentType>(t)), pr.protocol));
  }
  return out;
}

}  // namespace gc
