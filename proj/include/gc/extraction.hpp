#pragma once

// Automatic extraction of component types. Base components are typed from
// their binders and queues; composite components are typed through the
// interfacing subcomponent, lifting its dependencies across forwarders and
// the local protocol.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "gc/model.hpp"
#include "gc/projection.hpp"
#include "gc/types.hpp"

namespace gc {

// ---------------------------------------------------------------------------
// Typing environment: basic types for ports, functions and message labels.
// Label types agree with the two ports a distribution binder associates.

struct GammaEnv {
  std::map<std::string, BasicType> port_types;
  SigTable fn_types;
  std::map<std::string, BasicType> label_types;

  std::optional<BasicType> port_type(const std::string& p) const {
    auto it = port_types.find(p);
    if (it == port_types.end()) return std::nullopt;
    return it->second;
  }
};

struct TypeError {
  enum class Kind {
    UndeclaredFunction,
    ReturnMismatch,
    ParamMismatch,
    UntypedPort,
    PortTypeConflict,
    UnmappedPort,
    MissingBinder,
    MissingType,
    InternalInconsistency,
  };

  Kind kind;
  std::string where;
  std::string message;
};

inline std::string to_string(TypeError::Kind k) {
  using K = TypeError::Kind;
  switch (k) {
    case K::UndeclaredFunction: return "UndeclaredFunction";
    case K::ReturnMismatch: return "ReturnMismatch";
    case K::ParamMismatch: return "ParamMismatch";
    case K::UntypedPort: return "UntypedPort";
    case K::PortTypeConflict: return "PortTypeConflict";
    case K::UnmappedPort: return "UnmappedPort";
    case K::MissingBinder: return "MissingBinder";
    case K::MissingType: return "MissingType";
    case K::InternalInconsistency: return "InternalInconsistency";
  }
  return "?";
}

inline std::string to_string(const TypeError& e) {
  std::string out = to_string(e.kind) + "(" + e.where + ")";
  if (!e.message.empty()) out += ": " + e.message;
  return out;
}

template <class T>
using Extracted = std::variant<T, TypeError>;

// ---------------------------------------------------------------------------
// Gamma inference: port types follow from function signatures through the
// binders, flow across distribution binders via their labels, and across
// forwarders to the composite interface.

namespace detail {

inline std::optional<TypeError> assign_port(GammaEnv& env, const std::string& port,
                                            const BasicType& bt, const std::string& where) {
  auto [it, fresh] = env.port_types.insert({port, bt});
  if (!fresh && it->second != bt)
    return TypeError{TypeError::Kind::PortTypeConflict, port,
                     where + ": " + it->second.name + " vs " + bt.name};
  return std::nullopt;
}

inline std::optional<TypeError> infer_gamma(const Component& k, GammaEnv& env) {
  if (k.is_base()) {
    for (const auto& lb : k.base().binders) {
      auto sig = env.fn_types.find(lb.fn);
      if (sig == env.fn_types.end())
        return TypeError{TypeError::Kind::UndeclaredFunction, lb.fn, "binder " + lb.out};
      if (sig->second.params.size() != lb.params.size())
        return TypeError{TypeError::Kind::ParamMismatch, lb.fn,
                         "binder " + lb.out + ": arity mismatch"};
      if (auto e = assign_port(env, lb.out, sig->second.ret, "binder " + lb.out)) return e;
      for (size_t i = 0; i < lb.params.size(); ++i)
        if (auto e = assign_port(env, lb.params[i], sig->second.params[i], "binder " + lb.out))
          return e;
    }
    return std::nullopt;
  }

  const CompositeComponent& c = k.composite();
  for (const auto& [role, sub] : c.roles) {
    (void)role;
    if (auto e = infer_gamma(*sub, env)) return e;
  }
  // Propagate across distribution binders until stable: a label takes the
  // type of either endpoint and forces it on the other.
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& d : c.binders) {
      std::optional<BasicType> bt;
      if (auto lt = env.label_types.find(d.label); lt != env.label_types.end()) bt = lt->second;
      if (!bt) bt = env.port_type(d.sender_port);
      if (!bt) bt = env.port_type(d.receiver_port);
      if (!bt) continue;
      auto [it, fresh] = env.label_types.insert({d.label, *bt});
      if (!fresh && it->second != *bt)
        return TypeError{TypeError::Kind::PortTypeConflict, d.label,
                         "label typed " + it->second.name + " and " + bt->name};
      if (auto e = assign_port(env, d.sender_port, *bt, "label " + d.label)) return e;
      if (auto e = assign_port(env, d.receiver_port, *bt, "label " + d.label)) return e;
    }
  }
  for (const auto& f : c.forwarders) {
    auto bt = env.port_type(f.inner);
    if (!bt) continue;
    if (auto e = assign_port(env, f.outer, *bt, "forwarder " + f.outer)) return e;
  }
  return std::nullopt;
}

}  // namespace detail

// Builds the typing environment for a component tree. Fails when a port's
// type is unconstrained or two uses disagree.
inline Extracted<GammaEnv> build_gamma(const Component& k, const SigTable& sigs) {
  GammaEnv env;
  env.fn_types = sigs;
  if (auto e = detail::infer_gamma(k, env)) return *e;

  // Every port of the tree must have a type by now.
  std::vector<std::string> ports;
  detail::collect_ports(k, ports);
  for (const auto& p : ports)
    if (!env.port_types.count(p))
      return TypeError{TypeError::Kind::UntypedPort, p, "no use determines its type"};
  return env;
}

// ---------------------------------------------------------------------------
// Queue counting: the number of oldest stores that all hold a value for x,
// provided no younger store holds one (FIFO fill makes this the number of
// values available for x).

inline uint64_t count(const std::string& x, const BinderQueue& q) {
  size_t j = 0;
  while (j < q.size() && q[j].count(x)) ++j;
  for (size_t i = j; i < q.size(); ++i)
    if (q[i].count(x)) return 0;
  return j;
}

// ---------------------------------------------------------------------------
// Base component extraction. Checks that the function types agree with the
// port types, then emits one constraint per output port: unbounded emission
// with a per-each dependency on every parameter, counted from the queue.

inline Extracted<ComponentType> extract_base(const BaseComponent& k, const GammaEnv& env) {
  ComponentType t;
  for (const auto& x : k.inputs) {
    auto bt = env.port_type(x);
    if (!bt) return TypeError{TypeError::Kind::UntypedPort, x, ""};
    t.inputs.emplace(x, *bt);
  }
  for (const auto& lb : k.binders) {
    auto sig = env.fn_types.find(lb.fn);
    if (sig == env.fn_types.end())
      return TypeError{TypeError::Kind::UndeclaredFunction, lb.fn, "binder " + lb.out};
    auto ret = env.port_type(lb.out);
    if (!ret) return TypeError{TypeError::Kind::UntypedPort, lb.out, ""};
    if (sig->second.ret != *ret)
      return TypeError{TypeError::Kind::ReturnMismatch, lb.out,
                       "binder returns " + sig->second.ret.name + ", port is " + ret->name};
    if (sig->second.params.size() != lb.params.size())
      return TypeError{TypeError::Kind::ParamMismatch, lb.out, "arity mismatch"};
    for (size_t i = 0; i < lb.params.size(); ++i) {
      auto pt = env.port_type(lb.params[i]);
      if (!pt) return TypeError{TypeError::Kind::UntypedPort, lb.params[i], ""};
      if (sig->second.params[i] != *pt)
        return TypeError{TypeError::Kind::ParamMismatch, lb.out,
                         "parameter " + lb.params[i] + " is " + pt->name + ", function wants " +
                             sig->second.params[i].name};
    }

    Constraint c;
    c.type = *ret;
    c.bound = ExtNat::inf();
    for (const auto& p : lb.params)
      c.deps.emplace(p, Dependency::per_each(count(p, lb.queue)));
    t.constraints.emplace(lb.out, std::move(c));
  }
  return t;
}

// ---------------------------------------------------------------------------
// Composite extraction pieces

// Dependencies of an externally forwarded output on externally forwarded
// inputs, lifted unchanged.
inline std::map<std::string, std::vector<Dependency>> direct_deps(
    const std::map<std::string, Constraint>& cs, const std::vector<Forwarder>& fs,
    const std::string& y) {
  std::map<std::string, std::vector<Dependency>> out;
  const auto fin = forwarded_inputs(fs);
  const auto fout = forwarded_outputs(fs);
  if (!fout.count(y)) return out;
  auto it = cs.find(y);
  if (it == cs.end()) return out;
  for (const auto& [x, d] : it->second.deps)
    if (fin.count(x)) out[x].push_back(d);
  return out;
}

// Dependencies of an externally forwarded output that arise through the
// protocol: the output needs an internal input that some other binder feeds
// by sending, and that sender in turn depends on an external input.
inline std::map<std::string, std::vector<Dependency>> transitive_deps(
    const std::map<std::string, Constraint>& cs, const std::vector<Forwarder>& fs,
    const LocalProtocolPtr& lp, const std::string& y) {
  std::map<std::string, std::vector<Dependency>> out;
  const auto fin = forwarded_inputs(fs);
  const auto fout = forwarded_outputs(fs);
  if (!fout.count(y)) return out;
  auto yit = cs.find(y);
  if (yit == cs.end()) return out;

  for (const auto& [xp, m_prime] : yit->second.deps) {       // y depends on x' via M'
    for (const auto& [yp, yc] : cs) {                        // candidate intermediary y'
      if (yp == y) continue;
      DepCase dc = match_dep(lp, yp, xp);
      if (dc == DepCase::None) continue;
      for (const auto& [x, m] : yc.deps) {                   // y' depends on x via M
        if (!fin.count(x)) continue;
        const bool m_initial = m.kind == Dependency::Kind::Initial;
        const bool mp_initial = m_prime.kind == Dependency::Kind::Initial;
        if (dc == DepCase::Case1 || dc == DepCase::Case2) {
          if (m_initial || m.count.is_zero()) out[x].push_back(Dependency::initial());
        } else {  // Case3
          const int vf = value_flowing(lp, xp, yp);
          if (m_initial || (mp_initial && m.count.is_zero() && vf == 0)) {
            out[x].push_back(Dependency::initial());
          } else if (!m_initial && !mp_initial) {
            ExtNat sum = m.count;
            if (m_prime.count.infinite) sum = ExtNat::inf();
            if (!sum.infinite) sum = ExtNat::fin(sum.n + m_prime.count.n + uint64_t(vf));
            out[x].push_back(Dependency::per_each(sum));
          }
        }
      }
    }
  }
  return out;
}

// Per-each dependencies win over initial ones; collected per-each counts for
// one port always agree, anything else is an extraction bug.
inline Extracted<std::map<std::string, Dependency>> prioritize(
    const std::map<std::string, std::vector<Dependency>>& collected) {
  std::map<std::string, Dependency> out;
  for (const auto& [port, deps] : collected) {
    std::optional<Dependency> pick;
    for (const auto& d : deps) {
      if (d.kind == Dependency::Kind::Initial) {
        if (!pick) pick = d;
        continue;
      }
      if (!pick || pick->kind == Dependency::Kind::Initial) {
        pick = d;
      } else if (!(pick->count == d.count)) {
        return TypeError{TypeError::Kind::InternalInconsistency, port,
                         "per-each dependencies disagree: " + to_string(pick->count) + " vs " +
                             to_string(d.count)};
      }
    }
    if (pick) out.emplace(port, *pick);
  }
  return out;
}

// The emission boundary of a forwarded output: its internal boundary, capped
// by dependencies on ports that can no longer be fed. A port unused by the
// protocol and not forwarded contributes its current count (or zero for an
// initial dependency); a protocol port outside the recursion can be fed once
// more.
inline ExtNat boundary(const std::string& y, const LocalProtocolPtr& lp,
                       const std::map<std::string, Constraint>& cs,
                       const std::vector<Forwarder>& fs) {
  auto it = cs.find(y);
  if (it == cs.end()) return ExtNat::inf();
  ExtNat b = it->second.bound;
  const auto fin = forwarded_inputs(fs);
  const auto fp = free_ports(lp);
  const auto rep = rec_ports(lp);
  for (const auto& [xp, d] : it->second.deps) {
    const bool linked = fin.count(xp) > 0;
    if (!fp.count(xp) && !linked) {
      b = min(b, d.kind == Dependency::Kind::Initial ? ExtNat::fin(0) : d.count);
    } else if (d.kind == Dependency::Kind::PerEach && fp.count(xp) && !rep.count(xp) &&
               !linked) {
      b = min(b, d.count.plus_one());
    }
  }
  return b;
}

// Renames inner ports to the outer ones linked by the forwarders.
inline Extracted<ComponentType> rename_ports(const std::vector<Forwarder>& fs,
                                             const ComponentType& t) {
  std::map<std::string, std::string> inner_to_outer;
  for (const auto& f : fs) inner_to_outer[f.inner] = f.outer;
  auto lookup = [&](const std::string& p) -> std::optional<std::string> {
    auto it = inner_to_outer.find(p);
    if (it == inner_to_outer.end()) return std::nullopt;
    return it->second;
  };

  ComponentType out;
  for (const auto& [p, bt] : t.inputs) {
    auto o = lookup(p);
    if (!o) return TypeError{TypeError::Kind::UnmappedPort, p, "input not in the forwarders"};
    out.inputs.emplace(*o, bt);
  }
  for (const auto& [p, c] : t.constraints) {
    auto o = lookup(p);
    if (!o) return TypeError{TypeError::Kind::UnmappedPort, p, "output not in the forwarders"};
    Constraint rc;
    rc.type = c.type;
    rc.bound = c.bound;
    for (const auto& [dp, d] : c.deps) {
      auto od = lookup(dp);
      if (!od)
        return TypeError{TypeError::Kind::UnmappedPort, dp, "dependency not in the forwarders"};
      rc.deps.emplace(*od, d);
    }
    out.constraints.emplace(*o, std::move(rc));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Full composite extraction from the interfacing subcomponent's type and its
// local protocol: keep the forwarded inputs, constrain each forwarded output
// with the prioritised union of direct and transitive dependencies and the
// capped boundary, then rename everything to the outer interface.

inline Extracted<ComponentType> extract_composite(const CompositeComponent& k,
                                                  const ComponentType& interfacing_type,
                                                  const LocalProtocolPtr& lp) {
  const auto fin = forwarded_inputs(k.forwarders);
  const auto fout = forwarded_outputs(k.forwarders);

  ComponentType inner;
  for (const auto& [x, bt] : interfacing_type.inputs)
    if (fin.count(x)) inner.inputs.emplace(x, bt);

  for (const auto& [y, c] : interfacing_type.constraints) {
    if (!fout.count(y)) continue;
    auto collected = direct_deps(interfacing_type.constraints, k.forwarders, y);
    auto trans = transitive_deps(interfacing_type.constraints, k.forwarders, lp, y);
    for (auto& [port, ds] : trans)
      for (auto& d : ds) collected[port].push_back(d);
    auto deps = prioritize(collected);
    if (std::holds_alternative<TypeError>(deps)) return std::get<TypeError>(deps);

    Constraint rc;
    rc.type = c.type;
    rc.bound = boundary(y, lp, interfacing_type.constraints, k.forwarders);
    rc.deps = std::get<std::map<std::string, Dependency>>(std::move(deps));
    inner.constraints.emplace(y, std::move(rc));
  }
  return rename_ports(k.forwarders, inner);
}

}  // namespace gc
