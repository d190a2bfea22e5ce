#pragma once

// The behavioural type language for components: an input interface of typed
// ports plus one constraint per output port recording the value type, an
// emission boundary and the dependencies on input ports. Types evolve under
// an LTS so that component steps can be mirrored at the type level.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gc/model.hpp"

namespace gc {

// ---------------------------------------------------------------------------
// Naturals extended with infinity. Increment and decrement saturate at
// infinity; every finite value is below it.

struct ExtNat {
  bool infinite = false;
  uint64_t n = 0;

  static ExtNat inf() { return {true, 0}; }
  static ExtNat fin(uint64_t v) { return {false, v}; }

  bool is_zero() const { return !infinite && n == 0; }

  ExtNat plus_one() const { return infinite ? inf() : fin(n + 1); }
  ExtNat minus_one() const { return infinite ? inf() : fin(n - 1); }  // requires n >= 1

  friend bool operator==(const ExtNat& a, const ExtNat& b) {
    return a.infinite == b.infinite && (a.infinite || a.n == b.n);
  }
  friend bool operator<(const ExtNat& a, const ExtNat& b) {
    if (a.infinite) return false;
    if (b.infinite) return true;
    return a.n < b.n;
  }
};

inline ExtNat min(const ExtNat& a, const ExtNat& b) { return a < b ? a : b; }

inline std::string to_string(const ExtNat& e) {
  return e.infinite ? "inf" : std::to_string(e.n);
}

// ---------------------------------------------------------------------------
// Dependencies and constraints

// A per-each-value dependency x:N means every emission needs one input on x,
// with N values currently available. An initial dependency x:init is dropped
// by the first input on x. Infinite counts only arise in modified types.
struct Dependency {
  enum class Kind { PerEach, Initial };

  Kind kind = Kind::PerEach;
  ExtNat count;  // meaningful for PerEach

  static Dependency per_each(ExtNat c) { return {Kind::PerEach, c}; }
  static Dependency per_each(uint64_t c) { return {Kind::PerEach, ExtNat::fin(c)}; }
  static Dependency initial() { return {Kind::Initial, {}}; }

  friend bool operator==(const Dependency& a, const Dependency& b) {
    if (a.kind != b.kind) return false;
    return a.kind == Kind::Initial || a.count == b.count;
  }
};

inline std::string to_string(const Dependency& d) {
  return d.kind == Dependency::Kind::Initial ? "init" : to_string(d.count);
}

struct Constraint {
  BasicType type;
  ExtNat bound;
  std::map<std::string, Dependency> deps;  // at most one dependency per port

  friend bool operator==(const Constraint&, const Constraint&) = default;
};

struct ComponentType {
  std::map<std::string, BasicType> inputs;
  std::map<std::string, Constraint> constraints;

  friend bool operator==(const ComponentType&, const ComponentType&) = default;
};

// Modified types share the representation; their per-each counts may be
// infinite after relaxing externally forwarded inputs.
using ModifiedType = ComponentType;

inline std::string to_string(const ComponentType& t) {
  std::string out = "<{";
  bool first = true;
  for (const auto& [port, bt] : t.inputs) {
    if (!first) out += ", ";
    first = false;
    out += port + "(" + bt.name + ")";
  }
  out += "}; {";
  first = true;
  for (const auto& [port, c] : t.constraints) {
    if (!first) out += ", ";
    first = false;
    out += port + "(" + c.type.name + "):" + to_string(c.bound) + ":[";
    bool fd = true;
    for (const auto& [dp, d] : c.deps) {
      if (!fd) out += ", ";
      fd = false;
      out += dp + ":" + to_string(d);
    }
    out += "]";
  }
  return out + "}>";
}

// ---------------------------------------------------------------------------
// Constraint-level input step. Every constraint can always take an input:
// unrelated ports are ignored, an initial dependency is dropped, a
// per-each-value count is incremented.

inline Constraint constraint_input(const Constraint& c, const std::string& x) {
  auto it = c.deps.find(x);
  if (it == c.deps.end()) return c;
  Constraint out = c;
  if (it->second.kind == Dependency::Kind::Initial)
    out.deps.erase(x);
  else
    out.deps[x].count = it->second.count.plus_one();
  return out;
}

// ---------------------------------------------------------------------------
// Type-level steps

// Input on x: defined exactly when x is in the input interface; every
// constraint steps, and the basic type of the port decorates the label.
inline std::optional<std::pair<BasicType, ComponentType>> type_input(const ComponentType& t,
                                                                     const std::string& x) {
  auto it = t.inputs.find(x);
  if (it == t.inputs.end()) return std::nullopt;
  ComponentType out = t;
  for (auto& [port, c] : out.constraints) {
    (void)port;
    c = constraint_input(c, x);
  }
  return std::make_pair(it->second, std::move(out));
}

enum class OutputBlock { NoConstraint, InitialDependency, ZeroCount, ZeroBound };

inline std::string to_string(OutputBlock b) {
  switch (b) {
    case OutputBlock::NoConstraint: return "no constraint for the port";
    case OutputBlock::InitialDependency: return "initial dependency still present";
    case OutputBlock::ZeroCount: return "a per-each dependency has no value available";
    case OutputBlock::ZeroBound: return "boundary exhausted";
  }
  return "?";
}

struct OutputStep {
  std::optional<std::pair<BasicType, ComponentType>> result;
  OutputBlock block = OutputBlock::NoConstraint;  // meaningful when !result

  bool enabled() const { return result.has_value(); }
};

// Output on y: enabled when y's constraint has only per-each dependencies,
// each with at least one value, and a positive boundary. The boundary and
// every count are decremented; infinity is unaffected.
inline OutputStep type_output(const ComponentType& t, const std::string& y) {
  auto it = t.constraints.find(y);
  if (it == t.constraints.end()) return {std::nullopt, OutputBlock::NoConstraint};
  const Constraint& c = it->second;
  for (const auto& [port, d] : c.deps) {
    (void)port;
    if (d.kind == Dependency::Kind::Initial)
      return {std::nullopt, OutputBlock::InitialDependency};
    if (d.count.is_zero()) return {std::nullopt, OutputBlock::ZeroCount};
  }
  if (c.bound.is_zero()) return {std::nullopt, OutputBlock::ZeroBound};

  ComponentType out = t;
  Constraint& oc = out.constraints[y];
  oc.bound = oc.bound.minus_one();
  for (auto& [port, d] : oc.deps) {
    (void)port;
    d.count = d.count.minus_one();
  }
  return {std::make_pair(c.type, std::move(out)), {}};
}

// ---------------------------------------------------------------------------
// Modified types: dependencies on inputs forwarded from the environment are
// relaxed, on the reading that such values can always be supplied. Per-each
// dependencies on forwarded ports become unbounded, initial ones disappear.

inline ModifiedType modify(const std::vector<Forwarder>& fs, const ComponentType& t) {
  const std::set<std::string> fin = forwarded_inputs(fs);
  ModifiedType out = t;
  for (auto& [port, c] : out.constraints) {
    (void)port;
    Constraint next = c;
    for (const auto& [dp, d] : c.deps) {
      if (!fin.count(dp)) continue;
      if (d.kind == Dependency::Kind::Initial)
        next.deps.erase(dp);
      else
        next.deps[dp].count = ExtNat::inf();
    }
    c = std::move(next);
  }
  return out;
}

// True for plain (unmodified) types: all per-each counts finite.
inline bool finite_counts(const ComponentType& t) {
  for (const auto& [port, c] : t.constraints) {
    (void)port;
    for (const auto& [dp, d] : c.deps) {
      (void)dp;
      if (d.kind == Dependency::Kind::PerEach && d.count.infinite) return false;
    }
  }
  return true;
}

}  // namespace gc
