#pragma once

// Core terms of the governed-components calculus: base components built from
// local binders with FIFO store queues, composite components that assemble
// role-assigned subcomponents under a global protocol, and the transition
// labels observed when they run.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace gc {

// ---------------------------------------------------------------------------
// Basic types and values

struct BasicType {
  std::string name;

  friend bool operator==(const BasicType&, const BasicType&) = default;
  friend auto operator<=>(const BasicType&, const BasicType&) = default;
};

// Values are symbolic terms: either a literal lexeme or an unevaluated
// function application tagged with the function's declared return type.
struct Value {
  enum class Form { Literal, Application };

  Form form = Form::Literal;
  std::string lexeme;       // literal text, or the function name
  std::vector<Value> args;  // empty for literals
  BasicType type;

  static Value literal(std::string lex, BasicType bt) {
    Value v;
    v.form = Form::Literal;
    v.lexeme = std::move(lex);
    v.type = std::move(bt);
    return v;
  }

  static Value application(std::string fn, std::vector<Value> args, BasicType ret) {
    Value v;
    v.form = Form::Application;
    v.lexeme = std::move(fn);
    v.args = std::move(args);
    v.type = std::move(ret);
    return v;
  }
};

inline bool operator==(const Value& a, const Value& b) {
  return a.form == b.form && a.lexeme == b.lexeme && a.type == b.type && a.args == b.args;
}
inline bool operator!=(const Value& a, const Value& b) { return !(a == b); }

inline std::string to_string(const Value& v) {
  if (v.form == Value::Form::Literal) return v.lexeme;
  std::string out = v.lexeme + "(";
  for (size_t i = 0; i < v.args.size(); ++i) {
    if (i) out += ", ";
    out += to_string(v.args[i]);
  }
  return out + ")";
}

struct FunctionSig {
  std::string name;
  std::vector<BasicType> params;
  BasicType ret;

  friend bool operator==(const FunctionSig&, const FunctionSig&) = default;
};

using SigTable = std::map<std::string, FunctionSig>;

// ---------------------------------------------------------------------------
// Local binders

// One store per "round": a partial map from input ports to received values.
using Store = std::map<std::string, Value>;

// Oldest store first. Values for a port always land in the oldest store that
// lacks that port, so per port the stores holding it form an age prefix.
using BinderQueue = std::vector<Store>;

struct LocalBinder {
  std::string out;                  // output port this binder computes
  std::string fn;                   // function applied to the parameters
  std::vector<std::string> params;  // input ports, in application order
  BinderQueue queue;
};

struct BaseComponent {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<LocalBinder> binders;
};

// ---------------------------------------------------------------------------
// Global protocols

struct GlobalProtocol;
using ProtocolPtr = std::shared_ptr<const GlobalProtocol>;

// Choice-free protocols: a sequence of communications with at most one
// recursion. InTransit is the runtime form of a communication whose output
// has been performed while some receivers still have to take the value.
struct GlobalProtocol {
  enum class Form { Comm, InTransit, Rec, Var, End };

  Form form = Form::End;
  std::string sender;                  // Comm, InTransit
  std::string label;                   // Comm, InTransit
  std::vector<std::string> receivers;  // Comm: all receivers; InTransit: remaining
  std::optional<Value> value;          // InTransit only
  std::string var;                     // Rec binder / Var name
  ProtocolPtr cont;                    // Comm/InTransit continuation, Rec body

  static ProtocolPtr comm(std::string sender, std::string label,
                          std::vector<std::string> receivers, ProtocolPtr cont) {
    auto g = std::make_shared<GlobalProtocol>();
    g->form = Form::Comm;
    g->sender = std::move(sender);
    g->label = std::move(label);
    g->receivers = std::move(receivers);
    g->cont = std::move(cont);
    return g;
  }

  static ProtocolPtr in_transit(std::string sender, std::string label, Value v,
                                std::vector<std::string> remaining, ProtocolPtr cont) {
    auto g = std::make_shared<GlobalProtocol>();
    g->form = Form::InTransit;
    g->sender = std::move(sender);
    g->label = std::move(label);
    g->value = std::move(v);
    g->receivers = std::move(remaining);
    g->cont = std::move(cont);
    return g;
  }

  static ProtocolPtr rec(std::string var, ProtocolPtr body) {
    auto g = std::make_shared<GlobalProtocol>();
    g->form = Form::Rec;
    g->var = std::move(var);
    g->cont = std::move(body);
    return g;
  }

  static ProtocolPtr recvar(std::string var) {
    auto g = std::make_shared<GlobalProtocol>();
    g->form = Form::Var;
    g->var = std::move(var);
    return g;
  }

  static ProtocolPtr end() {
    auto g = std::make_shared<GlobalProtocol>();
    g->form = Form::End;
    return g;
  }
};

inline std::string to_string(const ProtocolPtr& g) {
  if (!g) return "<null>";
  switch (g->form) {
    case GlobalProtocol::Form::Comm: {
      std::string rs;
      for (size_t i = 0; i < g->receivers.size(); ++i) {
        if (i) rs += ", ";
        rs += g->receivers[i];
      }
      return g->sender + " -> " + rs + " : " + g->label + " ; " + to_string(g->cont);
    }
    case GlobalProtocol::Form::InTransit: {
      std::string rs;
      for (size_t i = 0; i < g->receivers.size(); ++i) {
        if (i) rs += " ";
        rs += g->receivers[i];
      }
      return "transit " + g->sender + " -> { " + rs + " } : " + g->label + " ( " +
             to_string(*g->value) + " ) ; " + to_string(g->cont);
    }
    case GlobalProtocol::Form::Rec:
      return "rec " + g->var + " . " + to_string(g->cont);
    case GlobalProtocol::Form::Var:
      return g->var;
    case GlobalProtocol::Form::End:
      return "end";
  }
  return "";
}

inline bool protocol_equal(const ProtocolPtr& a, const ProtocolPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->form != b->form || a->sender != b->sender || a->label != b->label ||
      a->receivers != b->receivers || a->var != b->var)
    return false;
  if (a->value.has_value() != b->value.has_value()) return false;
  if (a->value && !(*a->value == *b->value)) return false;
  if (!a->cont && !b->cont) return true;
  return a->cont && b->cont && protocol_equal(a->cont, b->cont);
}

// ---------------------------------------------------------------------------
// Composite components

// Associates a message label with the sender port emitting it and the
// receiver port taking delivery: label : receiverRole.receiverPort <- senderRole.senderPort
struct DistributionBinder {
  std::string label;
  std::string receiver_role;
  std::string receiver_port;
  std::string sender_role;
  std::string sender_port;

  friend bool operator==(const DistributionBinder&, const DistributionBinder&) = default;
};

// Links one port of the composite interface to one port of the interfacing
// subcomponent. Input: inner <- outer. Output: outer <- inner.
struct Forwarder {
  enum class Kind { Input, Output };

  Kind kind = Kind::Input;
  std::string inner;
  std::string outer;

  friend bool operator==(const Forwarder&, const Forwarder&) = default;
};

struct Component;
using ComponentPtr = std::shared_ptr<const Component>;

struct CompositeComponent {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  ProtocolPtr protocol;
  std::vector<std::pair<std::string, ComponentPtr>> roles;  // declaration order
  std::vector<DistributionBinder> binders;
  std::string interfacing_role;
  std::vector<Forwarder> forwarders;

  const ComponentPtr* find_role(const std::string& r) const {
    for (const auto& [name, k] : roles)
      if (name == r) return &k;
    return nullptr;
  }
};

struct Component {
  std::variant<BaseComponent, CompositeComponent> node;

  bool is_base() const { return std::holds_alternative<BaseComponent>(node); }
  const BaseComponent& base() const { return std::get<BaseComponent>(node); }
  const CompositeComponent& composite() const { return std::get<CompositeComponent>(node); }

  const std::vector<std::string>& inputs() const {
    return is_base() ? base().inputs : composite().inputs;
  }
  const std::vector<std::string>& outputs() const {
    return is_base() ? base().outputs : composite().outputs;
  }
};

inline ComponentPtr make_component(BaseComponent b) {
  auto c = std::make_shared<Component>();
  c->node = std::move(b);
  return c;
}

inline ComponentPtr make_component(CompositeComponent k) {
  auto c = std::make_shared<Component>();
  c->node = std::move(k);
  return c;
}

// Internal input/output ports named by a forwarder list.
inline std::set<std::string> forwarded_inputs(const std::vector<Forwarder>& fs) {
  std::set<std::string> out;
  for (const auto& f : fs)
    if (f.kind == Forwarder::Kind::Input) out.insert(f.inner);
  return out;
}

inline std::set<std::string> forwarded_outputs(const std::vector<Forwarder>& fs) {
  std::set<std::string> out;
  for (const auto& f : fs)
    if (f.kind == Forwarder::Kind::Output) out.insert(f.inner);
  return out;
}

// ---------------------------------------------------------------------------
// Transition labels

struct TransitionLabel {
  enum class Kind { Input, Output, Tau };

  Kind kind = Kind::Tau;
  std::string port;
  std::optional<Value> value;

  static TransitionLabel input(std::string port, Value v) {
    return {Kind::Input, std::move(port), std::move(v)};
  }
  static TransitionLabel output(std::string port, Value v) {
    return {Kind::Output, std::move(port), std::move(v)};
  }
  static TransitionLabel tau() { return {Kind::Tau, {}, std::nullopt}; }
};

inline std::string to_string(const TransitionLabel& l) {
  switch (l.kind) {
    case TransitionLabel::Kind::Input:
      return l.port + "?" + to_string(*l.value);
    case TransitionLabel::Kind::Output:
      return l.port + "!" + to_string(*l.value);
    case TransitionLabel::Kind::Tau:
      return "tau";
  }
  return "";
}

inline bool operator==(const TransitionLabel& a, const TransitionLabel& b) {
  if (a.kind != b.kind || a.port != b.port) return false;
  if (a.value.has_value() != b.value.has_value()) return false;
  return !a.value || *a.value == *b.value;
}

// ---------------------------------------------------------------------------
// Canonical term rendering; used for equality, hashing and diagnostics.

inline std::string to_term_string(const Component& k);

inline std::string to_term_string(const BinderQueue& q) {
  std::string out;
  for (const auto& store : q) {
    out += "{";
    bool first = true;
    for (const auto& [port, v] : store) {
      if (!first) out += ", ";
      first = false;
      out += port + " -> " + to_string(v);
    }
    out += "}";
  }
  return out;
}

inline std::string to_term_string(const BaseComponent& b) {
  std::string out = "[";
  for (size_t i = 0; i < b.inputs.size(); ++i) out += (i ? "," : "") + b.inputs[i];
  out += ">";
  for (size_t i = 0; i < b.outputs.size(); ++i) out += (i ? "," : "") + b.outputs[i];
  out += "]{";
  for (size_t i = 0; i < b.binders.size(); ++i) {
    const auto& lb = b.binders[i];
    if (i) out += ", ";
    out += lb.out + "=" + lb.fn + "(";
    for (size_t j = 0; j < lb.params.size(); ++j) out += (j ? "," : "") + lb.params[j];
    out += ")<" + to_term_string(lb.queue);
  }
  return out + "}";
}

inline std::string to_term_string(const CompositeComponent& c) {
  std::string out = "[";
  for (size_t i = 0; i < c.inputs.size(); ++i) out += (i ? "," : "") + c.inputs[i];
  out += ">";
  for (size_t i = 0; i < c.outputs.size(); ++i) out += (i ? "," : "") + c.outputs[i];
  out += "]{" + to_string(c.protocol) + "; ";
  for (size_t i = 0; i < c.roles.size(); ++i) {
    if (i) out += ", ";
    out += c.roles[i].first + "=" + to_term_string(*c.roles[i].second);
  }
  out += "; ";
  for (size_t i = 0; i < c.binders.size(); ++i) {
    const auto& d = c.binders[i];
    if (i) out += ", ";
    out += d.label + ":" + d.receiver_role + "." + d.receiver_port + "<-" + d.sender_role +
           "." + d.sender_port;
  }
  out += "; " + c.interfacing_role + "[";
  for (size_t i = 0; i < c.forwarders.size(); ++i) {
    const auto& f = c.forwarders[i];
    if (i) out += ", ";
    if (f.kind == Forwarder::Kind::Input)
      out += f.inner + "<-" + f.outer;
    else
      out += f.outer + "<-" + f.inner;
  }
  return out + "]}";
}

inline std::string to_term_string(const Component& k) {
  return k.is_base() ? to_term_string(k.base()) : to_term_string(k.composite());
}

inline bool component_equal(const Component& a, const Component& b) {
  return to_term_string(a) == to_term_string(b);
}

inline uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string component_hash(const Component& k) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(to_term_string(k))));
  return buf;
}

// ---------------------------------------------------------------------------
// Well-formedness

struct WellFormednessError {
  enum class Kind {
    DuplicatePort,
    MissingBinder,
    UnusedBinder,
    DuplicateBinder,
    UnknownParam,
    DuplicateParam,
    QueueDomain,
    QueueShape,
    UndeclaredFunction,
    ArityMismatch,
    EmptyReceivers,
    UnboundVar,
    MultipleRecursion,
    DuplicateLabel,
    TransitPosition,
    MissingRole,
    ExtraRole,
    MissingInterfaceRole,
    MissingDistribution,
    DuplicateDistribution,
    BadDistribution,
    PortLabelClash,
    BadForwarder,
    DuplicateForwarder,
    PortUseClash,
    GlobalPortClash,
    SelfCommunication,
  };

  Kind kind;
  std::string where;   // component/port/label the error refers to
  std::string detail;
};

inline std::string to_string(WellFormednessError::Kind k) {
  using K = WellFormednessError::Kind;
  switch (k) {
    case K::DuplicatePort: return "DuplicatePort";
    case K::MissingBinder: return "MissingBinder";
    case K::UnusedBinder: return "UnusedBinder";
    case K::DuplicateBinder: return "DuplicateBinder";
    case K::UnknownParam: return "UnknownParam";
    case K::DuplicateParam: return "DuplicateParam";
    case K::QueueDomain: return "QueueDomain";
    case K::QueueShape: return "QueueShape";
    case K::UndeclaredFunction: return "UndeclaredFunction";
    case K::ArityMismatch: return "ArityMismatch";
    case K::EmptyReceivers: return "EmptyReceivers";
    case K::UnboundVar: return "UnboundVar";
    case K::MultipleRecursion: return "MultipleRecursion";
    case K::DuplicateLabel: return "DuplicateLabel";
    case K::TransitPosition: return "TransitPosition";
    case K::MissingRole: return "MissingRole";
    case K::ExtraRole: return "ExtraRole";
    case K::MissingInterfaceRole: return "MissingInterfaceRole";
    case K::MissingDistribution: return "MissingDistribution";
    case K::DuplicateDistribution: return "DuplicateDistribution";
    case K::BadDistribution: return "BadDistribution";
    case K::PortLabelClash: return "PortLabelClash";
    case K::BadForwarder: return "BadForwarder";
    case K::DuplicateForwarder: return "DuplicateForwarder";
    case K::PortUseClash: return "PortUseClash";
    case K::GlobalPortClash: return "GlobalPortClash";
    case K::SelfCommunication: return "SelfCommunication";
  }
  return "?";
}

inline std::string to_string(const WellFormednessError& e) {
  std::string out = to_string(e.kind) + "(" + e.where + ")";
  if (!e.detail.empty()) out += ": " + e.detail;
  return out;
}

namespace detail {

inline void collect_ports(const Component& k, std::vector<std::string>& out) {
  for (const auto& p : k.inputs()) out.push_back(p);
  for (const auto& p : k.outputs()) out.push_back(p);
  if (!k.is_base())
    for (const auto& [role, sub] : k.composite().roles) collect_ports(*sub, out);
}

// Roles occurring as sender or receiver anywhere in the protocol.
inline void collect_roles(const ProtocolPtr& g, std::set<std::string>& out) {
  if (!g) return;
  switch (g->form) {
    case GlobalProtocol::Form::Comm:
    case GlobalProtocol::Form::InTransit:
      out.insert(g->sender);
      for (const auto& r : g->receivers) out.insert(r);
      collect_roles(g->cont, out);
      break;
    case GlobalProtocol::Form::Rec:
      collect_roles(g->cont, out);
      break;
    default:
      break;
  }
}

// Labels paired with whether they sit inside the recursion body. Stepping a
// recursive protocol unfolds one iteration, so at runtime a label may occur
// once in the unfolded prefix and once in the body; label uniqueness is
// up to that unfolding.
inline void collect_labels(const ProtocolPtr& g, bool inside_rec,
                           std::vector<std::pair<std::string, bool>>& out) {
  if (!g) return;
  if (g->form == GlobalProtocol::Form::Comm || g->form == GlobalProtocol::Form::InTransit) {
    out.push_back({g->label, inside_rec});
    collect_labels(g->cont, inside_rec, out);
  } else if (g->form == GlobalProtocol::Form::Rec) {
    collect_labels(g->cont, true, out);
  }
}

inline void validate_protocol(const ProtocolPtr& g, bool at_head, bool under_rec,
                              std::set<std::string> bound,
                              std::vector<WellFormednessError>& errs) {
  if (!g) return;
  using K = WellFormednessError::Kind;
  switch (g->form) {
    case GlobalProtocol::Form::Comm:
      if (g->receivers.empty()) errs.push_back({K::EmptyReceivers, g->label, ""});
      for (const auto& q : g->receivers)
        if (q == g->sender) errs.push_back({K::SelfCommunication, g->label, ""});
      validate_protocol(g->cont, false, under_rec, bound, errs);
      break;
    case GlobalProtocol::Form::InTransit:
      if (!at_head)
        errs.push_back({K::TransitPosition, g->label, "in-transit term must be the protocol head"});
      if (g->receivers.empty()) errs.push_back({K::EmptyReceivers, g->label, ""});
      validate_protocol(g->cont, false, under_rec, bound, errs);
      break;
    case GlobalProtocol::Form::Rec:
      if (under_rec)
        errs.push_back({K::MultipleRecursion, g->var, "at most one recursion is allowed"});
      bound.insert(g->var);
      validate_protocol(g->cont, false, true, bound, errs);
      break;
    case GlobalProtocol::Form::Var:
      if (!bound.count(g->var)) errs.push_back({K::UnboundVar, g->var, ""});
      break;
    case GlobalProtocol::Form::End:
      break;
  }
}

inline void validate_base(const BaseComponent& b, const SigTable& sigs, const std::string& where,
                          std::vector<WellFormednessError>& errs) {
  using K = WellFormednessError::Kind;
  std::set<std::string> ins(b.inputs.begin(), b.inputs.end());
  std::set<std::string> outs(b.outputs.begin(), b.outputs.end());
  {
    std::set<std::string> seen;
    for (const auto& p : b.inputs)
      if (!seen.insert(p).second) errs.push_back({K::DuplicatePort, p, where});
    for (const auto& p : b.outputs)
      if (!seen.insert(p).second) errs.push_back({K::DuplicatePort, p, where});
  }

  std::set<std::string> bound_outputs;
  for (const auto& lb : b.binders) {
    if (!outs.count(lb.out))
      errs.push_back({K::UnusedBinder, lb.out, "binder for a port outside the interface"});
    if (!bound_outputs.insert(lb.out).second) errs.push_back({K::DuplicateBinder, lb.out, where});

    std::set<std::string> seen_params;
    for (const auto& p : lb.params) {
      if (!ins.count(p)) errs.push_back({K::UnknownParam, p, "binder " + lb.out});
      if (!seen_params.insert(p).second) errs.push_back({K::DuplicateParam, p, "binder " + lb.out});
    }

    auto it = sigs.find(lb.fn);
    if (it == sigs.end()) {
      errs.push_back({K::UndeclaredFunction, lb.fn, "binder " + lb.out});
    } else if (it->second.params.size() != lb.params.size()) {
      errs.push_back({K::ArityMismatch, lb.fn, "binder " + lb.out});
    }

    // Queue stores only map binder parameters, and per port the stores
    // holding it must form an age prefix. Only the last store may be empty.
    for (size_t i = 0; i < lb.queue.size(); ++i) {
      for (const auto& [port, v] : lb.queue[i]) {
        (void)v;
        if (!seen_params.count(port))
          errs.push_back({K::QueueDomain, port, "binder " + lb.out});
      }
      if (lb.queue[i].empty() && i + 1 != lb.queue.size())
        errs.push_back({K::QueueShape, lb.out, "empty store before the tail"});
    }
    for (const auto& p : lb.params) {
      bool gap = false;
      for (const auto& store : lb.queue) {
        bool has = store.count(p) > 0;
        if (has && gap) {
          errs.push_back({K::QueueShape, p, "binder " + lb.out + ": non-prefix fill"});
          break;
        }
        if (!has) gap = true;
      }
    }
  }
  for (const auto& y : b.outputs)
    if (!bound_outputs.count(y)) errs.push_back({K::MissingBinder, y, where});
}

inline void validate_component(const Component& k, const SigTable& sigs, const std::string& where,
                               std::vector<WellFormednessError>& errs);

inline void validate_composite(const CompositeComponent& c, const SigTable& sigs,
                               const std::string& where,
                               std::vector<WellFormednessError>& errs) {
  using K = WellFormednessError::Kind;
  {
    std::set<std::string> seen;
    for (const auto& p : c.inputs)
      if (!seen.insert(p).second) errs.push_back({K::DuplicatePort, p, where});
    for (const auto& p : c.outputs)
      if (!seen.insert(p).second) errs.push_back({K::DuplicatePort, p, where});
  }

  validate_protocol(c.protocol, true, false, {}, errs);

  std::vector<std::pair<std::string, bool>> labels;
  collect_labels(c.protocol, false, labels);
  {
    std::set<std::pair<std::string, bool>> seen;
    for (const auto& l : labels)
      if (!seen.insert(l).second) errs.push_back({K::DuplicateLabel, l.first, where});
  }

  // Runtime protocols shrink as communications complete, so a role may stop
  // occurring; only the converse direction is demanded here. Source programs
  // get the exact-match check in validate_source.
  std::set<std::string> proto_roles;
  collect_roles(c.protocol, proto_roles);
  std::set<std::string> assigned;
  for (const auto& [r, sub] : c.roles) {
    (void)sub;
    assigned.insert(r);
  }
  for (const auto& r : proto_roles)
    if (!assigned.count(r)) errs.push_back({K::MissingRole, r, where});
  if (!assigned.count(c.interfacing_role))
    errs.push_back({K::MissingInterfaceRole, c.interfacing_role, where});

  // Distribution binders: one per (label, receiver), a consistent sender per
  // label, ports that exist, and a per-direction port<->label bijection.
  std::map<std::string, std::pair<std::string, std::string>> sender_of_label;
  std::set<std::pair<std::string, std::string>> recv_entries;
  std::map<std::string, std::string> label_of_recv_port, label_of_send_port;
  std::set<std::string> dist_ports;
  for (const auto& d : c.binders) {
    dist_ports.insert(d.receiver_port);
    dist_ports.insert(d.sender_port);
    if (!recv_entries.insert({d.label, d.receiver_role}).second)
      errs.push_back({K::DuplicateDistribution, d.label, "receiver " + d.receiver_role});
    auto [it, fresh] = sender_of_label.insert({d.label, {d.sender_role, d.sender_port}});
    if (!fresh && it->second != std::make_pair(d.sender_role, d.sender_port))
      errs.push_back({K::BadDistribution, d.label, "conflicting senders"});

    const ComponentPtr* recv = c.find_role(d.receiver_role);
    const ComponentPtr* send = c.find_role(d.sender_role);
    if (!recv) {
      errs.push_back({K::BadDistribution, d.label, "unknown role " + d.receiver_role});
    } else {
      const auto& ins = (*recv)->inputs();
      if (std::find(ins.begin(), ins.end(), d.receiver_port) == ins.end())
        errs.push_back({K::BadDistribution, d.label,
                        d.receiver_role + " has no input port " + d.receiver_port});
    }
    if (!send) {
      errs.push_back({K::BadDistribution, d.label, "unknown role " + d.sender_role});
    } else {
      const auto& outs = (*send)->outputs();
      if (std::find(outs.begin(), outs.end(), d.sender_port) == outs.end())
        errs.push_back({K::BadDistribution, d.label,
                        d.sender_role + " has no output port " + d.sender_port});
    }

    auto [rit, rfresh] = label_of_recv_port.insert({d.receiver_port, d.label});
    if (!rfresh && rit->second != d.label)
      errs.push_back({K::PortLabelClash, d.receiver_port, "bound to two labels"});
    auto [sit, sfresh] = label_of_send_port.insert({d.sender_port, d.label});
    if (!sfresh && sit->second != d.label)
      errs.push_back({K::PortLabelClash, d.sender_port, "bound to two labels"});
  }
  // Every (label, receiver) pair prescribed by the protocol needs a binder.
  std::set<std::pair<std::string, std::string>> needed;
  for (ProtocolPtr g = c.protocol; g;) {
    if (g->form == GlobalProtocol::Form::Comm || g->form == GlobalProtocol::Form::InTransit) {
      for (const auto& r : g->receivers) needed.insert({g->label, r});
      g = g->cont;
    } else if (g->form == GlobalProtocol::Form::Rec) {
      g = g->cont;
    } else {
      break;
    }
  }
  for (const auto& [l, r] : needed)
    if (!recv_entries.count({l, r}))
      errs.push_back({K::MissingDistribution, l, "no binder for receiver " + r});

  // Forwarders link composite ports to ports of the interfacing subcomponent.
  const ComponentPtr* iface = c.find_role(c.interfacing_role);
  std::set<std::string> outer_seen, inner_seen;
  for (const auto& f : c.forwarders) {
    const auto& outer_list = f.kind == Forwarder::Kind::Input ? c.inputs : c.outputs;
    if (std::find(outer_list.begin(), outer_list.end(), f.outer) == outer_list.end())
      errs.push_back({K::BadForwarder, f.outer, "outer port not in the composite interface"});
    if (!outer_seen.insert(f.outer).second)
      errs.push_back({K::DuplicateForwarder, f.outer, where});
    if (!inner_seen.insert(f.inner).second)
      errs.push_back({K::DuplicateForwarder, f.inner, where});
    if (iface) {
      const auto& inner_list =
          f.kind == Forwarder::Kind::Input ? (*iface)->inputs() : (*iface)->outputs();
      if (std::find(inner_list.begin(), inner_list.end(), f.inner) == inner_list.end())
        errs.push_back(
            {K::BadForwarder, f.inner, "inner port not on the interfacing subcomponent"});
    }
    if (dist_ports.count(f.inner))
      errs.push_back({K::PortUseClash, f.inner, "port both forwarded and label-bound"});
  }

  for (const auto& [r, sub] : c.roles) {
    (void)r;
    validate_component(*sub, sigs, where + "/" + r, errs);
  }

  // All port identifiers in the assembly must be distinct.
  std::vector<std::string> all;
  for (const auto& p : c.inputs) all.push_back(p);
  for (const auto& p : c.outputs) all.push_back(p);
  for (const auto& [r, sub] : c.roles) {
    (void)r;
    collect_ports(*sub, all);
  }
  std::set<std::string> seen;
  for (const auto& p : all)
    if (!seen.insert(p).second) errs.push_back({K::GlobalPortClash, p, where});
}

inline void validate_component(const Component& k, const SigTable& sigs, const std::string& where,
                               std::vector<WellFormednessError>& errs) {
  if (k.is_base())
    validate_base(k.base(), sigs, where, errs);
  else
    validate_composite(k.composite(), sigs, where, errs);
}

}  // namespace detail

// Aggregates every structural side-condition; empty result means the
// component is well formed. Deterministic and side-effect free. Holds for
// runtime configurations as well as source programs.
inline std::vector<WellFormednessError> validate(const Component& k, const SigTable& sigs) {
  std::vector<WellFormednessError> errs;
  detail::validate_component(k, sigs, "", errs);
  return errs;
}

namespace detail {

inline void strict_protocol_checks(const Component& k, std::vector<WellFormednessError>& errs) {
  if (k.is_base()) return;
  using K = WellFormednessError::Kind;
  const CompositeComponent& c = k.composite();
  std::set<std::string> proto_roles;
  collect_roles(c.protocol, proto_roles);
  for (const auto& [r, sub] : c.roles) {
    (void)sub;
    if (!proto_roles.count(r))
      errs.push_back({K::ExtraRole, r, "role not occurring in the protocol"});
  }
  std::vector<std::pair<std::string, bool>> labels;
  collect_labels(c.protocol, false, labels);
  std::set<std::string> label_set;
  for (const auto& [l, inside] : labels) {
    (void)inside;
    label_set.insert(l);
  }
  for (const auto& d : c.binders)
    if (!label_set.count(d.label))
      errs.push_back({K::BadDistribution, d.label, "label not in the protocol"});
  for (const auto& [r, sub] : c.roles) {
    (void)r;
    strict_protocol_checks(*sub, errs);
  }
}

}  // namespace detail

// Source programs additionally assign exactly the roles the protocol names
// and declare no distribution binders for unknown labels.
inline std::vector<WellFormednessError> validate_source(const Component& k,
                                                        const SigTable& sigs) {
  auto errs = validate(k, sigs);
  detail::strict_protocol_checks(k, errs);
  return errs;
}

inline std::set<std::string> protocol_roles(const ProtocolPtr& g) {
  std::set<std::string> out;
  detail::collect_roles(g, out);
  return out;
}

}  // namespace gc
