#pragma once

// Shared fixtures and independent reference oracles for the test suite. The
// oracles deliberately re-derive behaviour in a naive way so the production
// path can be checked against them.

#include <fstream>
#include <sstream>
#include <string>

#include "gc/dsl.hpp"
#include "gc/extraction.hpp"
#include "gc/model.hpp"
#include "gc/semantics.hpp"

namespace gctest {

inline gc::BasicType bt(const std::string& n) { return gc::BasicType{n}; }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string fixture_path(const std::string& name) {
  return std::string(GC_FIXTURE_DIR) + "/" + name;
}

inline gc::SourceProgram load_fixture(const std::string& name) {
  auto result = gc::parse(read_file(fixture_path(name)));
  if (!result.ok()) {
    std::string msg = "fixture " + name + " failed to parse:";
    for (const auto& d : result.diagnostics) msg += "\n  " + gc::to_string(d);
    throw std::runtime_error(msg);
  }
  return *result.program;
}

// ---------------------------------------------------------------------------
// Programmatic portal/engine components, independent of the DSL.

struct IrsParts {
  gc::SigTable sigs;
  gc::BaseComponent portal;
  gc::BaseComponent engine;
  gc::CompositeComponent irs;  // protocol left empty, set by callers
};

inline gc::SigTable irs_sigs() {
  gc::SigTable sigs;
  sigs.emplace("f_u", gc::FunctionSig{"f_u", {bt("image")}, bt("image")});
  sigs.emplace("f_r", gc::FunctionSig{"f_r", {bt("class")}, bt("class")});
  sigs.emplace("f", gc::FunctionSig{"f", {}, bt("version")});
  sigs.emplace("g", gc::FunctionSig{"g", {bt("image")}, bt("class")});
  return sigs;
}

inline gc::BaseComponent make_portal() {
  gc::BaseComponent b;
  b.inputs = {"x_p", "x_p'"};
  b.outputs = {"y_p", "y_p'", "y_p''"};
  b.binders = {{"y_p", "f_u", {"x_p"}, {}},
               {"y_p'", "f_r", {"x_p'"}, {}},
               {"y_p''", "f", {}, {}}};
  return b;
}

inline gc::BaseComponent make_engine() {
  gc::BaseComponent b;
  b.inputs = {"x_re"};
  b.outputs = {"y_re"};
  b.binders = {{"y_re", "g", {"x_re"}, {}}};
  return b;
}

inline gc::ProtocolPtr one_shot_protocol() {
  return gc::GlobalProtocol::comm(
      "Portal", "image", {"RE"},
      gc::GlobalProtocol::comm("RE", "class", {"Portal"}, gc::GlobalProtocol::end()));
}

inline gc::ProtocolPtr recursive_protocol() {
  return gc::GlobalProtocol::rec(
      "X", gc::GlobalProtocol::comm(
               "Portal", "image", {"RE"},
               gc::GlobalProtocol::comm("RE", "class", {"Portal"},
                                        gc::GlobalProtocol::recvar("X"))));
}

inline gc::CompositeComponent make_irs(gc::ProtocolPtr protocol) {
  gc::CompositeComponent c;
  c.inputs = {"x"};
  c.outputs = {"y", "y'"};
  c.protocol = std::move(protocol);
  c.roles = {{"Portal", gc::make_component(make_portal())},
             {"RE", gc::make_component(make_engine())}};
  c.binders = {{"image", "RE", "x_re", "Portal", "y_p"},
               {"class", "Portal", "x_p'", "RE", "y_re"}};
  c.interfacing_role = "Portal";
  c.forwarders = {{gc::Forwarder::Kind::Input, "x_p", "x"},
                  {gc::Forwarder::Kind::Output, "y_p'", "y"},
                  {gc::Forwarder::Kind::Output, "y_p''", "y'"}};
  return c;
}

inline gc::GammaEnv irs_gamma(const gc::Component& k) {
  auto g = gc::build_gamma(k, irs_sigs());
  return std::get<gc::GammaEnv>(g);
}

// ---------------------------------------------------------------------------
// Reference oracle: a direct transcription of the store-placement rule,
// independent of the production binder code. Values for port x go to the
// oldest store without an x entry; one store per slot is scanned by index.

inline gc::BinderQueue reference_place(const gc::BinderQueue& q, const std::string& x,
                                       const gc::Value& v) {
  gc::BinderQueue out = q;
  for (size_t age = 0;; ++age) {
    if (age == out.size()) {
      out.push_back({});
    }
    if (out[age].find(x) == out[age].end()) {
      out[age].emplace(x, v);
      return out;
    }
  }
}

// Reference oracle for the base component step relation: tries every rule
// against every port/binder combination.
struct ReferenceTransition {
  std::string label;  // rendered, e.g. "x?v" / "y!f(v)"
  std::string target; // canonical term of the successor
};

inline std::vector<ReferenceTransition> reference_base_steps(
    const gc::BaseComponent& b, const gc::SigTable& sigs,
    const std::map<std::string, gc::BasicType>& port_types, uint64_t step) {
  std::vector<ReferenceTransition> out;
  // Rule: any declared input port accepts a value; all binders using the
  // port buffer a copy.
  for (const auto& x : b.inputs) {
    auto bt_it = port_types.find(x);
    if (bt_it == port_types.end()) continue;
    gc::Value v = gc::fresh_value(bt_it->second, step);
    gc::BaseComponent next = b;
    for (auto& lb : next.binders) {
      bool uses = false;
      for (const auto& p : lb.params) uses |= p == x;
      if (uses) lb.queue = reference_place(lb.queue, x, v);
    }
    out.push_back({x + "?" + gc::to_string(v),
                   gc::to_term_string(gc::Component{std::move(next)})});
  }
  // Rule: a binder whose oldest store is complete emits the application and
  // drops the store; the port must be part of the interface.
  for (size_t i = 0; i < b.binders.size(); ++i) {
    const auto& lb = b.binders[i];
    bool on_interface = false;
    for (const auto& y : b.outputs) on_interface |= y == lb.out;
    if (!on_interface) continue;
    bool ready = lb.params.empty();
    std::vector<gc::Value> args;
    if (!ready) {
      if (lb.queue.empty()) continue;
      ready = true;
      for (const auto& p : lb.params) {
        auto it = lb.queue.front().find(p);
        if (it == lb.queue.front().end()) {
          ready = false;
          break;
        }
        args.push_back(it->second);
      }
    }
    if (!ready) continue;
    gc::Value v = gc::Value::application(lb.fn, args, sigs.at(lb.fn).ret);
    gc::BaseComponent next = b;
    if (!lb.params.empty()) next.binders[i].queue.erase(next.binders[i].queue.begin());
    out.push_back({lb.out + "!" + gc::to_string(v),
                   gc::to_term_string(gc::Component{std::move(next)})});
  }
  return out;
}

}  // namespace gctest
