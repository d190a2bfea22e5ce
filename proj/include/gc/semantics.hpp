#pragma once

// Labelled transition system of components. Base components move by binder
// inputs and outputs; composite components forward external I/O through the
// interfacing subcomponent and synchronise internal communication with the
// global protocol.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gc/model.hpp"

namespace gc {

// Optional concrete evaluation for selected functions; everything else stays
// a symbolic application. A builtin receives the arguments and the declared
// return type.
using BuiltinTable =
    std::map<std::string, std::function<Value(const std::vector<Value>&, const BasicType&)>>;

inline BuiltinTable default_builtins() {
  BuiltinTable t;
  t["id"] = [](const std::vector<Value>& args, const BasicType&) { return args.at(0); };
  t["constant"] = [](const std::vector<Value>&, const BasicType& ret) {
    return Value::literal("constant_" + ret.name, ret);
  };
  return t;
}

// ---------------------------------------------------------------------------
// Local binder dynamics

// Input on x: every binder using x stores the value in its oldest store that
// lacks x, appending a fresh store when all have one; other binders discard
// it. All binders take the input in the same step.
inline std::vector<LocalBinder> binder_input(const std::vector<LocalBinder>& binders,
                                             const std::string& x, const Value& v) {
  std::vector<LocalBinder> out = binders;
  for (auto& lb : out) {
    bool uses = false;
    for (const auto& p : lb.params) uses |= (p == x);
    if (!uses) continue;
    bool placed = false;
    for (auto& store : lb.queue) {
      if (!store.count(x)) {
        store.emplace(x, v);
        placed = true;
        break;
      }
    }
    if (!placed) lb.queue.push_back({{x, v}});
  }
  return out;
}

struct BinderOutput {
  std::string port;
  Value value;
  std::vector<LocalBinder> binders;  // configuration after the emission
};

// One entry per binder whose oldest store assigns all parameters; the value
// is the (symbolic) application of the binder's function in parameter order
// and the store is consumed. Binder outputs are not synchronised.
inline std::vector<BinderOutput> binder_outputs(const std::vector<LocalBinder>& binders,
                                                const SigTable& sigs,
                                                const BuiltinTable& builtins = {}) {
  std::vector<BinderOutput> out;
  for (size_t i = 0; i < binders.size(); ++i) {
    const LocalBinder& lb = binders[i];
    std::vector<Value> args;
    if (!lb.params.empty()) {
      if (lb.queue.empty()) continue;
      const Store& head = lb.queue.front();
      bool complete = true;
      for (const auto& p : lb.params) {
        auto it = head.find(p);
        if (it == head.end()) {
          complete = false;
          break;
        }
        args.push_back(it->second);
      }
      if (!complete) continue;
    }
    auto sig = sigs.find(lb.fn);
    if (sig == sigs.end()) continue;  // validated components never hit this
    Value v;
    auto builtin = builtins.find(lb.fn);
    if (builtin != builtins.end())
      v = builtin->second(args, sig->second.ret);
    else
      v = Value::application(lb.fn, std::move(args), sig->second.ret);

    std::vector<LocalBinder> next = binders;
    if (!lb.params.empty()) next[i].queue.erase(next[i].queue.begin());
    out.push_back({lb.out, std::move(v), std::move(next)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Global protocol LTS

struct ProtocolLabel {
  enum class Kind { Out, In };

  Kind kind = Kind::Out;
  std::string role;
  std::string label;
  Value value;

  static ProtocolLabel out(std::string role, std::string label, Value v) {
    return {Kind::Out, std::move(role), std::move(label), std::move(v)};
  }
  static ProtocolLabel in(std::string role, std::string label, Value v) {
    return {Kind::In, std::move(role), std::move(label), std::move(v)};
  }
};

inline ProtocolPtr protocol_unfold(const ProtocolPtr& g);

namespace detail {

inline ProtocolPtr proto_subst(const ProtocolPtr& body, const std::string& var,
                               const ProtocolPtr& with) {
  if (!body) return body;
  switch (body->form) {
    case GlobalProtocol::Form::Comm:
      return GlobalProtocol::comm(body->sender, body->label, body->receivers,
                                  proto_subst(body->cont, var, with));
    case GlobalProtocol::Form::InTransit:
      return GlobalProtocol::in_transit(body->sender, body->label, *body->value,
                                        body->receivers, proto_subst(body->cont, var, with));
    case GlobalProtocol::Form::Rec:
      if (body->var == var) return body;
      return GlobalProtocol::rec(body->var, proto_subst(body->cont, var, with));
    case GlobalProtocol::Form::Var:
      return body->var == var ? with : body;
    case GlobalProtocol::Form::End:
      return body;
  }
  return body;
}

}  // namespace detail

// One level of recursion unfolding.
inline ProtocolPtr protocol_unfold(const ProtocolPtr& g) {
  if (g && g->form == GlobalProtocol::Form::Rec)
    return detail::proto_subst(g->cont, g->var, g);
  return g;
}

// Only the head communication may fire. An output turns the head into an
// in-transit term carrying the value; inputs peel receivers off until the
// set empties and the continuation is exposed. Returns nothing if the label
// is not enabled.
inline std::optional<ProtocolPtr> protocol_step(const ProtocolPtr& g, const ProtocolLabel& l) {
  ProtocolPtr head = protocol_unfold(g);
  if (!head) return std::nullopt;
  switch (head->form) {
    case GlobalProtocol::Form::Comm:
      if (l.kind == ProtocolLabel::Kind::Out && head->sender == l.role &&
          head->label == l.label)
        return GlobalProtocol::in_transit(head->sender, head->label, l.value, head->receivers,
                                          head->cont);
      return std::nullopt;
    case GlobalProtocol::Form::InTransit: {
      if (l.kind != ProtocolLabel::Kind::In || head->label != l.label) return std::nullopt;
      if (!(*head->value == l.value)) return std::nullopt;
      std::vector<std::string> remaining;
      bool found = false;
      for (const auto& q : head->receivers) {
        if (q == l.role && !found)
          found = true;
        else
          remaining.push_back(q);
      }
      if (!found) return std::nullopt;
      if (remaining.empty()) return head->cont;
      return GlobalProtocol::in_transit(head->sender, head->label, *head->value,
                                        std::move(remaining), head->cont);
    }
    default:
      return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// Component LTS

struct Transition {
  TransitionLabel label;
  ComponentPtr target;
};

// Feeding a value into an input port always succeeds for base components;
// for a composite the port must be linked by an input forwarder, in which
// case the value is pushed through to the interfacing subcomponent.
inline std::optional<ComponentPtr> apply_input(const Component& k, const std::string& port,
                                               const Value& v) {
  if (k.is_base()) {
    const BaseComponent& b = k.base();
    bool declared = false;
    for (const auto& x : b.inputs) declared |= (x == port);
    if (!declared) return std::nullopt;
    BaseComponent next = b;
    next.binders = binder_input(b.binders, port, v);
    return make_component(std::move(next));
  }
  const CompositeComponent& c = k.composite();
  for (const auto& f : c.forwarders) {
    if (f.kind != Forwarder::Kind::Input || f.outer != port) continue;
    const ComponentPtr* iface = c.find_role(c.interfacing_role);
    if (!iface) return std::nullopt;
    auto inner = apply_input(**iface, f.inner, v);
    if (!inner) return std::nullopt;
    CompositeComponent next = c;
    for (auto& [role, sub] : next.roles)
      if (role == c.interfacing_role) sub = *inner;
    return make_component(std::move(next));
  }
  return std::nullopt;
}

namespace detail {

struct InnerOutput {
  std::string port;
  Value value;
  ComponentPtr target;
};

inline std::vector<InnerOutput> component_outputs(const Component& k, const SigTable& sigs);
inline std::vector<ComponentPtr> component_taus(const Component& k, const SigTable& sigs);

inline std::vector<InnerOutput> component_outputs(const Component& k, const SigTable& sigs) {
  std::vector<InnerOutput> out;
  if (k.is_base()) {
    const BaseComponent& b = k.base();
    for (auto& bo : binder_outputs(b.binders, sigs)) {
      bool declared = false;
      for (const auto& y : b.outputs) declared |= (y == bo.port);
      if (!declared) continue;
      BaseComponent next = b;
      next.binders = std::move(bo.binders);
      out.push_back({bo.port, std::move(bo.value), make_component(std::move(next))});
    }
    return out;
  }
  const CompositeComponent& c = k.composite();
  const ComponentPtr* iface = c.find_role(c.interfacing_role);
  if (!iface) return out;
  for (auto& io : component_outputs(**iface, sigs)) {
    for (const auto& f : c.forwarders) {
      if (f.kind != Forwarder::Kind::Output || f.inner != io.port) continue;
      CompositeComponent next = c;
      for (auto& [role, sub] : next.roles)
        if (role == c.interfacing_role) sub = io.target;
      out.push_back({f.outer, io.value, make_component(std::move(next))});
    }
  }
  return out;
}

inline std::vector<ComponentPtr> component_taus(const Component& k, const SigTable& sigs) {
  std::vector<ComponentPtr> out;
  if (k.is_base()) return out;
  const CompositeComponent& c = k.composite();

  auto with_role = [&](const std::string& role, const ComponentPtr& sub,
                       ProtocolPtr proto) -> ComponentPtr {
    CompositeComponent next = c;
    next.protocol = std::move(proto);
    for (auto& [r, s] : next.roles)
      if (r == role) s = sub;
    return make_component(std::move(next));
  };

  // Internal moves of any subcomponent.
  for (const auto& [role, sub] : c.roles)
    for (const auto& t : component_taus(*sub, sigs)) out.push_back(with_role(role, t, c.protocol));

  // Protocol-mediated sends: a subcomponent output on a label-bound port.
  for (const auto& [role, sub] : c.roles) {
    for (auto& io : component_outputs(*sub, sigs)) {
      for (const auto& d : c.binders) {
        if (d.sender_role != role || d.sender_port != io.port) continue;
        auto g2 = protocol_step(c.protocol, ProtocolLabel::out(role, d.label, io.value));
        if (g2) out.push_back(with_role(role, io.target, *g2));
      }
    }
  }

  // Protocol-mediated receives: deliver the in-transit value to a receiver.
  for (const auto& [role, sub] : c.roles) {
    for (const auto& d : c.binders) {
      if (d.receiver_role != role) continue;
      ProtocolPtr head = protocol_unfold(c.protocol);
      if (!head || head->form != GlobalProtocol::Form::InTransit || head->label != d.label)
        continue;
      auto g2 = protocol_step(c.protocol, ProtocolLabel::in(role, d.label, *head->value));
      if (!g2) continue;
      auto sub2 = apply_input(*sub, d.receiver_port, *head->value);
      if (!sub2) continue;
      out.push_back(with_role(role, *sub2, *g2));
    }
  }
  return out;
}

}  // namespace detail

// Fresh symbolic stand-ins for values arriving from the environment.
inline Value fresh_value(const BasicType& bt, uint64_t step) {
  return Value::literal("fresh_" + bt.name + "#" + std::to_string(step), bt);
}

// The set of one-step transitions of a component. External inputs are
// represented by one fresh value per port, tagged with `step` so that the
// set stays finite per state; port basic types come from `port_types`.
inline std::vector<Transition> enumerate(const Component& k, const SigTable& sigs,
                                         const std::map<std::string, BasicType>& port_types,
                                         uint64_t step = 0) {
  std::vector<Transition> out;
  for (const auto& x : k.inputs()) {
    auto bt = port_types.find(x);
    if (bt == port_types.end()) continue;
    Value v = fresh_value(bt->second, step);
    auto next = apply_input(k, x, v);
    if (next) out.push_back({TransitionLabel::input(x, v), *next});
  }
  for (auto& io : detail::component_outputs(k, sigs))
    out.push_back({TransitionLabel::output(io.port, io.value), io.target});
  for (auto& t : detail::component_taus(k, sigs)) out.push_back({TransitionLabel::tau(), t});
  return out;
}

}  // namespace gc
