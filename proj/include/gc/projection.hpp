#pragma once

// Projection of a global protocol onto one role: the local protocol of
// port-level sends and receives that the role's component must realize.
// Also the structural queries over local protocols that type extraction
// needs: port sets, repetition, output-before-input shapes, and whether a
// value is currently flowing through the protocol.

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gc/model.hpp"

namespace gc {

struct LocalProtocol;
using LocalProtocolPtr = std::shared_ptr<const LocalProtocol>;

struct LocalProtocol {
  enum class Form { Recv, Send, Rec, Var, End };

  Form form = Form::End;
  std::string port;  // Recv/Send
  BasicType type;    // Recv/Send
  std::string var;   // Rec binder / Var name
  LocalProtocolPtr cont;

  static LocalProtocolPtr recv(std::string port, BasicType bt, LocalProtocolPtr cont) {
    auto lp = std::make_shared<LocalProtocol>();
    lp->form = Form::Recv;
    lp->port = std::move(port);
    lp->type = std::move(bt);
    lp->cont = std::move(cont);
    return lp;
  }
  static LocalProtocolPtr send(std::string port, BasicType bt, LocalProtocolPtr cont) {
    auto lp = std::make_shared<LocalProtocol>();
    lp->form = Form::Send;
    lp->port = std::move(port);
    lp->type = std::move(bt);
    lp->cont = std::move(cont);
    return lp;
  }
  static LocalProtocolPtr rec(std::string var, LocalProtocolPtr body) {
    auto lp = std::make_shared<LocalProtocol>();
    lp->form = Form::Rec;
    lp->var = std::move(var);
    lp->cont = std::move(body);
    return lp;
  }
  static LocalProtocolPtr recvar(std::string var) {
    auto lp = std::make_shared<LocalProtocol>();
    lp->form = Form::Var;
    lp->var = std::move(var);
    return lp;
  }
  static LocalProtocolPtr end() {
    auto lp = std::make_shared<LocalProtocol>();
    lp->form = Form::End;
    return lp;
  }
};

inline std::string to_string(const LocalProtocolPtr& lp) {
  if (!lp) return "<null>";
  switch (lp->form) {
    case LocalProtocol::Form::Recv:
      return lp->port + "?:" + lp->type.name + " . " + to_string(lp->cont);
    case LocalProtocol::Form::Send:
      return lp->port + "!:" + lp->type.name + " . " + to_string(lp->cont);
    case LocalProtocol::Form::Rec:
      return "rec " + lp->var + " . " + to_string(lp->cont);
    case LocalProtocol::Form::Var:
      return lp->var;
    case LocalProtocol::Form::End:
      return "end";
  }
  return "";
}

inline bool local_equal(const LocalProtocolPtr& a, const LocalProtocolPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->form != b->form || a->port != b->port || a->type != b->type || a->var != b->var)
    return false;
  if (!a->cont && !b->cont) return true;
  return a->cont && b->cont && local_equal(a->cont, b->cont);
}

// ---------------------------------------------------------------------------
// Projection

struct ProjectionError {
  enum class Kind { MissingBinder, MissingType };
  Kind kind;
  std::string label;
};

struct ProjectionResult {
  LocalProtocolPtr protocol;
  std::optional<ProjectionError> error;
};

namespace detail {

inline bool role_occurs(const ProtocolPtr& g, const std::string& r) {
  if (!g) return false;
  switch (g->form) {
    case GlobalProtocol::Form::Comm:
    case GlobalProtocol::Form::InTransit:
      if (g->sender == r) return true;
      for (const auto& q : g->receivers)
        if (q == r) return true;
      return role_occurs(g->cont, r);
    case GlobalProtocol::Form::Rec:
      return role_occurs(g->cont, r);
    default:
      return false;
  }
}

}  // namespace detail

// Projects g onto role r. Message labels are mapped to ports through the
// distribution binders and to basic types through label_types. A pending
// in-transit communication still projects to a receive for the remaining
// receivers; for the sender the output has already happened, so it is
// skipped. A recursion in which r does not occur projects to end.
inline ProjectionResult project(const ProtocolPtr& g, const std::string& r,
                                const std::vector<DistributionBinder>& binders,
                                const std::map<std::string, BasicType>& label_types) {
  if (!g) return {LocalProtocol::end(), std::nullopt};

  auto type_of_label = [&](const std::string& l) -> std::optional<BasicType> {
    auto it = label_types.find(l);
    if (it == label_types.end()) return std::nullopt;
    return it->second;
  };
  auto sender_port = [&](const std::string& l) -> std::optional<std::string> {
    for (const auto& d : binders)
      if (d.label == l) return d.sender_port;
    return std::nullopt;
  };
  auto receiver_port = [&](const std::string& l, const std::string& q) -> std::optional<std::string> {
    for (const auto& d : binders)
      if (d.label == l && d.receiver_role == q) return d.receiver_port;
    return std::nullopt;
  };

  switch (g->form) {
    case GlobalProtocol::Form::Comm:
    case GlobalProtocol::Form::InTransit: {
      auto rest = project(g->cont, r, binders, label_types);
      if (rest.error) return rest;
      bool receiving = false;
      for (const auto& q : g->receivers) receiving |= (q == r);
      bool sending = g->form == GlobalProtocol::Form::Comm && g->sender == r;
      if (!receiving && !sending) return rest;
      auto bt = type_of_label(g->label);
      if (!bt)
        return {nullptr, ProjectionError{ProjectionError::Kind::MissingType, g->label}};
      if (sending) {
        auto p = sender_port(g->label);
        if (!p)
          return {nullptr, ProjectionError{ProjectionError::Kind::MissingBinder, g->label}};
        return {LocalProtocol::send(*p, *bt, rest.protocol), std::nullopt};
      }
      auto p = receiver_port(g->label, r);
      if (!p)
        return {nullptr, ProjectionError{ProjectionError::Kind::MissingBinder, g->label}};
      return {LocalProtocol::recv(*p, *bt, rest.protocol), std::nullopt};
    }
    case GlobalProtocol::Form::Rec: {
      if (!detail::role_occurs(g->cont, r)) return {LocalProtocol::end(), std::nullopt};
      auto body = project(g->cont, r, binders, label_types);
      if (body.error) return body;
      return {LocalProtocol::rec(g->var, body.protocol), std::nullopt};
    }
    case GlobalProtocol::Form::Var:
      return {LocalProtocol::recvar(g->var), std::nullopt};
    case GlobalProtocol::Form::End:
      return {LocalProtocol::end(), std::nullopt};
  }
  return {LocalProtocol::end(), std::nullopt};
}

// ---------------------------------------------------------------------------
// Structural queries. Local protocols are linear with at most one recursion
// at the tail, so they flatten to a list of prefix events, each marked as
// lying inside or outside the recursion body.

struct LocalEvent {
  bool is_send = false;
  std::string port;
  BasicType type;
  bool inside_rec = false;
};

inline std::vector<LocalEvent> flatten(const LocalProtocolPtr& lp) {
  std::vector<LocalEvent> out;
  bool inside = false;
  for (LocalProtocolPtr cur = lp; cur;) {
    switch (cur->form) {
      case LocalProtocol::Form::Recv:
      case LocalProtocol::Form::Send:
        out.push_back({cur->form == LocalProtocol::Form::Send, cur->port, cur->type, inside});
        cur = cur->cont;
        break;
      case LocalProtocol::Form::Rec:
        inside = true;
        cur = cur->cont;
        break;
      case LocalProtocol::Form::Var:
      case LocalProtocol::Form::End:
        cur = nullptr;
        break;
    }
  }
  return out;
}

// All ports occurring in the protocol.
inline std::set<std::string> free_ports(const LocalProtocolPtr& lp) {
  std::set<std::string> out;
  for (const auto& e : flatten(lp)) out.insert(e.port);
  return out;
}

// Ports occurring inside the recursion body.
inline std::set<std::string> rec_ports(const LocalProtocolPtr& lp) {
  std::set<std::string> out;
  for (const auto& e : flatten(lp))
    if (e.inside_rec) out.insert(e.port);
  return out;
}

// Shapes in which an output on out_port precedes an input on in_port:
//   Case1 - both occur outside the recursion;
//   Case2 - the output occurs before the recursion, the input inside it;
//   Case3 - both occur inside the recursion body, output first.
// The cases are mutually exclusive for a fixed protocol and port pair.
enum class DepCase { None, Case1, Case2, Case3 };

inline DepCase match_dep(const LocalProtocolPtr& lp, const std::string& out_port,
                         const std::string& in_port) {
  const auto events = flatten(lp);
  const auto rep = rec_ports(lp);

  // Case3: inside the body, some send on out_port precedes a recv on in_port.
  for (size_t i = 0; i < events.size(); ++i) {
    if (!events[i].inside_rec || !events[i].is_send || events[i].port != out_port) continue;
    for (size_t j = i + 1; j < events.size(); ++j)
      if (events[j].inside_rec && !events[j].is_send && events[j].port == in_port)
        return DepCase::Case3;
  }
  // Case2: a send on out_port before the recursion, a recv on in_port inside
  // it, and out_port itself not repetitive.
  if (!rep.count(out_port)) {
    bool send_outside = false, recv_inside = false;
    for (const auto& e : events) {
      if (!e.inside_rec && e.is_send && e.port == out_port) send_outside = true;
      if (e.inside_rec && !e.is_send && e.port == in_port) recv_inside = true;
    }
    if (send_outside && recv_inside) return DepCase::Case2;
  }
  // Case1: both non-repetitive, send strictly before the recv.
  if (!rep.count(out_port) && !rep.count(in_port)) {
    for (size_t i = 0; i < events.size(); ++i) {
      if (events[i].inside_rec || !events[i].is_send || events[i].port != out_port) continue;
      for (size_t j = i + 1; j < events.size(); ++j)
        if (!events[j].inside_rec && !events[j].is_send && events[j].port == in_port)
          return DepCase::Case1;
    }
  }
  return DepCase::None;
}

// A value is flowing from out_port to in_port when the recursion body sends
// on out_port before receiving on in_port, and the protocol has already been
// stepped past that send: its unfolded head reaches an input on in_port with
// no earlier occurrence of either port.
inline int value_flowing(const LocalProtocolPtr& lp, const std::string& in_port,
                         const std::string& out_port) {
  const auto events = flatten(lp);
  bool shape = false;
  for (size_t i = 0; i < events.size() && !shape; ++i) {
    if (!events[i].inside_rec || !events[i].is_send || events[i].port != out_port) continue;
    for (size_t j = i + 1; j < events.size(); ++j)
      if (events[j].inside_rec && !events[j].is_send && events[j].port == in_port) {
        shape = true;
        break;
      }
  }
  if (!shape) return 0;
  for (const auto& e : events) {
    if (e.inside_rec) break;  // prefix contexts stop at the recursion
    if (e.port == out_port) return 0;
    if (e.port == in_port) return e.is_send ? 0 : 1;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Head step of a local protocol (send/recv removal with unfolding); the
// local mirror of stepping the global protocol.

namespace detail {

inline LocalProtocolPtr local_subst(const LocalProtocolPtr& body, const std::string& var,
                                    const LocalProtocolPtr& with) {
  if (!body) return body;
  switch (body->form) {
    case LocalProtocol::Form::Recv:
      return LocalProtocol::recv(body->port, body->type, local_subst(body->cont, var, with));
    case LocalProtocol::Form::Send:
      return LocalProtocol::send(body->port, body->type, local_subst(body->cont, var, with));
    case LocalProtocol::Form::Rec:
      if (body->var == var) return body;
      return LocalProtocol::rec(body->var, local_subst(body->cont, var, with));
    case LocalProtocol::Form::Var:
      return body->var == var ? with : body;
    case LocalProtocol::Form::End:
      return body;
  }
  return body;
}

}  // namespace detail

inline LocalProtocolPtr local_unfold(const LocalProtocolPtr& lp) {
  if (lp && lp->form == LocalProtocol::Form::Rec)
    return detail::local_subst(lp->cont, lp->var, lp);
  return lp;
}

inline std::optional<LocalProtocolPtr> local_step(const LocalProtocolPtr& lp, bool is_send,
                                                  const std::string& port) {
  LocalProtocolPtr head = local_unfold(lp);
  if (!head) return std::nullopt;
  if (head->form == LocalProtocol::Form::Send && is_send && head->port == port)
    return head->cont;
  if (head->form == LocalProtocol::Form::Recv && !is_send && head->port == port)
    return head->cont;
  return std::nullopt;
}

}  // namespace gc
