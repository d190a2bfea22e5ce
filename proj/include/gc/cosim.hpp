#pragma once

// Property harness: generates well-typed components and co-simulates the
// component LTS against the type LTS. Every component step must be mirrored
// by a type step into the re-extracted type, and every type-enabled I/O
// action must be realizable by the component within a budget of internal
// moves.

#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "gc/conformance.hpp"
#include "gc/extraction.hpp"
#include "gc/model.hpp"
#include "gc/semantics.hpp"
#include "gc/types.hpp"

namespace gc {

// ---------------------------------------------------------------------------
// Canonical state keys. Behaviour never inspects value contents, so states
// are identified up to a consistent renaming of literal lexemes; this keeps
// exploration tractable when fresh input values carry step tags.

namespace cosim_detail {

struct LiteralRenamer {
  std::map<std::string, std::string> names;

  std::string operator()(const std::string& lexeme) {
    auto [it, fresh] = names.insert({lexeme, "v#" + std::to_string(names.size())});
    (void)fresh;
    return it->second;
  }
};

inline std::string canon_value(const Value& v, LiteralRenamer& ren) {
  if (v.form == Value::Form::Literal) return ren(v.lexeme) + ":" + v.type.name;
  std::string out = v.lexeme + "(";
  for (size_t i = 0; i < v.args.size(); ++i) {
    if (i) out += ",";
    out += canon_value(v.args[i], ren);
  }
  return out + ")";
}

inline std::string canon_proto(const ProtocolPtr& g, LiteralRenamer& ren) {
  if (!g) return "-";
  switch (g->form) {
    case GlobalProtocol::Form::Comm: {
      std::string rs;
      for (const auto& r : g->receivers) rs += r + ",";
      return "C(" + g->sender + ";" + g->label + ";" + rs + ")" + canon_proto(g->cont, ren);
    }
    case GlobalProtocol::Form::InTransit: {
      std::string rs;
      for (const auto& r : g->receivers) rs += r + ",";
      return "T(" + g->sender + ";" + g->label + ";" + canon_value(*g->value, ren) + ";" + rs +
             ")" + canon_proto(g->cont, ren);
    }
    case GlobalProtocol::Form::Rec:
      return "R(" + g->var + ")" + canon_proto(g->cont, ren);
    case GlobalProtocol::Form::Var:
      return "V(" + g->var + ")";
    case GlobalProtocol::Form::End:
      return "E";
  }
  return "";
}

inline std::string canon_component(const Component& k, LiteralRenamer& ren) {
  if (k.is_base()) {
    const BaseComponent& b = k.base();
    std::string out = "B{";
    for (const auto& lb : b.binders) {
      out += lb.out + "<";
      for (const auto& store : lb.queue) {
        out += "[";
        for (const auto& [port, v] : store) out += port + "=" + canon_value(v, ren) + ";";
        out += "]";
      }
      out += " ";
    }
    return out + "}";
  }
  const CompositeComponent& c = k.composite();
  std::string out = "K{" + canon_proto(c.protocol, ren) + "|";
  for (const auto& [role, sub] : c.roles) out += role + "=" + canon_component(*sub, ren) + "|";
  return out + "}";
}

}  // namespace cosim_detail

// Stable across any consistent renaming of literal values. Interfaces and
// binder structure never change along transitions, so only queues and the
// protocol enter the key.
inline std::string canonical_key(const Component& k) {
  cosim_detail::LiteralRenamer ren;
  return cosim_detail::canon_component(k, ren);
}

// ---------------------------------------------------------------------------
// Reports

struct CosimViolation {
  std::string state;
  std::string transition;
  std::string expected;
  std::string actual;
};

struct CosimReport {
  std::vector<uint64_t> seeds;
  uint64_t states_explored = 0;
  uint64_t edges_checked = 0;
  std::vector<CosimViolation> violations;
  std::vector<CosimViolation> budget_exceeded;

  bool clean() const { return violations.empty(); }

  void merge(const CosimReport& other) {
    for (auto s : other.seeds) seeds.push_back(s);
    states_explored += other.states_explored;
    edges_checked += other.edges_checked;
    for (const auto& v : other.violations) violations.push_back(v);
    for (const auto& v : other.budget_exceeded) budget_exceeded.push_back(v);
  }
};

inline std::string to_text(const CosimReport& r) {
  std::string out = "states explored: " + std::to_string(r.states_explored) +
                    "\nedges checked: " + std::to_string(r.edges_checked) +
                    "\nviolations: " + std::to_string(r.violations.size()) +
                    "\nbudget exceeded: " + std::to_string(r.budget_exceeded.size()) + "\n";
  auto dump = [&](const char* tag, const std::vector<CosimViolation>& vs) {
    for (const auto& v : vs) {
      out += std::string(tag) + " at " + v.state + "\n  transition: " + v.transition +
             "\n  expected: " + v.expected + "\n  actual: " + v.actual + "\n";
    }
  };
  dump("VIOLATION", r.violations);
  dump("BUDGET", r.budget_exceeded);
  return out;
}

inline nlohmann::json to_json(const CosimReport& r) {
  nlohmann::json doc;
  doc["seeds"] = r.seeds;
  doc["statesExplored"] = r.states_explored;
  doc["edgesChecked"] = r.edges_checked;
  auto arr = [](const std::vector<CosimViolation>& vs) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& v : vs)
      a.push_back({{"state", v.state},
                   {"transition", v.transition},
                   {"expected", v.expected},
                   {"actual", v.actual}});
    return a;
  };
  doc["violations"] = arr(r.violations);
  doc["budgetExceeded"] = arr(r.budget_exceeded);
  return doc;
}

// ---------------------------------------------------------------------------
// Subject reduction

using TypeOfFn = std::function<TypeOfResult(const Component&)>;

namespace cosim_detail {

struct TypeMemo {
  const GammaEnv& gamma;
  TypeOfFn override_fn;
  std::map<std::string, TypeOfResult> memo;

  const TypeOfResult& get(const Component& k) {
    std::string key = canonical_key(k);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    TypeOfResult r = override_fn ? override_fn(k) : type_of(k, gamma);
    return memo.emplace(key, std::move(r)).first->second;
  }
};

inline std::string describe(const TypeOfResult& r) {
  if (std::holds_alternative<ComponentType>(r))
    return to_string(std::get<ComponentType>(r));
  const IllTyped& it = std::get<IllTyped>(r);
  return "ill-typed (" + to_string(it.clause) + (it.role.empty() ? "" : ", " + it.role) + "): " +
         it.message;
}

}  // namespace cosim_detail

// Breadth-first over component transitions to the given depth. Every edge
// K --l--> K' must be mirrored by the type of K stepping on the matching
// label into exactly the type of K'.
inline CosimReport check_subject_reduction(const Component& k, const GammaEnv& gamma,
                                           uint32_t depth, TypeOfFn typeof_fn = {}) {
  CosimReport report;
  cosim_detail::TypeMemo types{gamma, std::move(typeof_fn), {}};

  std::vector<ComponentPtr> frontier;
  std::set<std::string> seen;
  auto root = std::make_shared<const Component>(k);
  frontier.push_back(root);
  seen.insert(canonical_key(k));

  if (std::holds_alternative<IllTyped>(types.get(k))) {
    report.violations.push_back({to_term_string(k), "-", "well-typed initial configuration",
                                 cosim_detail::describe(types.get(k))});
    return report;
  }

  for (uint32_t level = 0; level < depth && !frontier.empty(); ++level) {
    std::vector<ComponentPtr> next;
    for (const auto& state : frontier) {
      const TypeOfResult& tr = types.get(*state);
      if (std::holds_alternative<IllTyped>(tr)) continue;  // already reported on the edge
      const ComponentType& t = std::get<ComponentType>(tr);

      for (const auto& tr2 : enumerate(*state, gamma.fn_types, gamma.port_types, level)) {
        ++report.edges_checked;
        std::optional<ComponentType> expected;
        std::string label_str = to_string(tr2.label);

        switch (tr2.label.kind) {
          case TransitionLabel::Kind::Input: {
            auto step = type_input(t, tr2.label.port);
            if (!step) {
              report.violations.push_back({to_term_string(*state), label_str,
                                           "type input on " + tr2.label.port,
                                           "port not in the type interface"});
            } else if (step->first != tr2.label.value->type) {
              report.violations.push_back({to_term_string(*state), label_str,
                                           "value of type " + step->first.name,
                                           "value of type " + tr2.label.value->type.name});
            } else {
              expected = step->second;
            }
            break;
          }
          case TransitionLabel::Kind::Output: {
            auto step = type_output(t, tr2.label.port);
            if (!step.enabled()) {
              report.violations.push_back({to_term_string(*state), label_str,
                                           "type output on " + tr2.label.port,
                                           "blocked: " + to_string(step.block)});
            } else if (step.result->first != tr2.label.value->type) {
              report.violations.push_back({to_term_string(*state), label_str,
                                           "value of type " + step.result->first.name,
                                           "value of type " + tr2.label.value->type.name});
            } else {
              expected = step.result->second;
            }
            break;
          }
          case TransitionLabel::Kind::Tau:
            expected = t;  // internal steps leave the type unchanged
            break;
        }

        if (expected) {
          const TypeOfResult& after = types.get(*tr2.target);
          if (std::holds_alternative<IllTyped>(after)) {
            report.violations.push_back({to_term_string(*state), label_str,
                                         to_string(*expected), cosim_detail::describe(after)});
          } else if (!(std::get<ComponentType>(after) == *expected)) {
            report.violations.push_back({to_term_string(*state), label_str,
                                         to_string(*expected),
                                         to_string(std::get<ComponentType>(after))});
          }
        }

        std::string key = canonical_key(*tr2.target);
        if (seen.insert(std::move(key)).second) next.push_back(tr2.target);
      }
    }
    frontier = std::move(next);
  }
  report.states_explored = seen.size();
  return report;
}

// ---------------------------------------------------------------------------
// Progress

// For every reachable configuration whose type enables an I/O action, the
// component must realize that action, possibly after internal moves bounded
// by tau_budget, reaching a configuration with the stepped type. Failure to
// find the action within budget is reported separately from a violation.
inline CosimReport check_progress(const Component& k, const GammaEnv& gamma, uint32_t depth,
                                  uint32_t tau_budget, TypeOfFn typeof_fn = {}) {
  CosimReport report;
  cosim_detail::TypeMemo types{gamma, std::move(typeof_fn), {}};

  struct StateInfo {
    ComponentPtr comp;
    uint32_t level;
  };
  std::vector<StateInfo> states;
  std::set<std::string> seen;
  auto root = std::make_shared<const Component>(k);
  states.push_back({root, 0});
  seen.insert(canonical_key(k));

  // Reachable states up to depth.
  size_t cursor = 0;
  while (cursor < states.size()) {
    StateInfo cur = states[cursor++];
    if (cur.level >= depth) continue;
    for (const auto& tr : enumerate(*cur.comp, gamma.fn_types, gamma.port_types, cur.level)) {
      if (seen.insert(canonical_key(*tr.target)).second)
        states.push_back({tr.target, cur.level + 1});
    }
  }
  report.states_explored = states.size();

  for (const auto& st : states) {
    const TypeOfResult& tr = types.get(*st.comp);
    if (std::holds_alternative<IllTyped>(tr)) {
      report.violations.push_back({to_term_string(*st.comp), "-", "well-typed configuration",
                                   cosim_detail::describe(tr)});
      continue;
    }
    const ComponentType& t = std::get<ComponentType>(tr);
    auto transitions = enumerate(*st.comp, gamma.fn_types, gamma.port_types, st.level);

    // Inputs are always type-enabled and must be immediately available.
    for (const auto& [port, bt] : t.inputs) {
      ++report.edges_checked;
      auto step = type_input(t, port);
      const Transition* found = nullptr;
      for (const auto& tr2 : transitions)
        if (tr2.label.kind == TransitionLabel::Kind::Input && tr2.label.port == port)
          found = &tr2;
      if (!found) {
        report.violations.push_back({to_term_string(*st.comp), port + "?(" + bt.name + ")",
                                     "an input transition", "none enabled"});
        continue;
      }
      const TypeOfResult& after = types.get(*found->target);
      if (std::holds_alternative<IllTyped>(after) ||
          !(std::get<ComponentType>(after) == step->second)) {
        report.violations.push_back({to_term_string(*st.comp), port + "?(" + bt.name + ")",
                                     to_string(step->second), cosim_detail::describe(after)});
      }
    }

    // Enabled outputs must be realizable through a bounded run of taus.
    for (const auto& [port, c] : t.constraints) {
      auto step = type_output(t, port);
      if (!step.enabled()) continue;
      ++report.edges_checked;
      const ComponentType& want = step.result->second;

      bool found_output = false, matched = false;
      std::vector<ComponentPtr> closure{st.comp};
      std::set<std::string> closure_seen{canonical_key(*st.comp)};
      for (uint32_t hop = 0; hop <= tau_budget && !matched; ++hop) {
        std::vector<ComponentPtr> next;
        for (const auto& cfg : closure) {
          for (const auto& tr2 :
               enumerate(*cfg, gamma.fn_types, gamma.port_types, st.level)) {
            if (tr2.label.kind == TransitionLabel::Kind::Output && tr2.label.port == port) {
              found_output = true;
              if (tr2.label.value->type == c.type) {
                const TypeOfResult& after = types.get(*tr2.target);
                if (std::holds_alternative<ComponentType>(after) &&
                    std::get<ComponentType>(after) == want) {
                  matched = true;
                  break;
                }
              }
            }
            if (tr2.label.kind == TransitionLabel::Kind::Tau && hop < tau_budget)
              if (closure_seen.insert(canonical_key(*tr2.target)).second)
                next.push_back(tr2.target);
          }
          if (matched) break;
        }
        closure = std::move(next);
      }
      if (matched) continue;
      CosimViolation v{to_term_string(*st.comp), port + "!(" + c.type.name + ")",
                       to_string(want),
                       found_output ? "outputs found but none reaches the stepped type"
                                    : "no output found within the tau budget"};
      if (found_output)
        report.violations.push_back(std::move(v));
      else
        report.budget_exceeded.push_back(std::move(v));
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Random generation of well-formed, well-typed components.

struct GenConfig {
  uint32_t max_ports = 3;         // input ports per base component
  uint32_t max_binders = 3;       // output ports per base component
  uint32_t max_protocol_len = 4;  // communications in a protocol
  double rec_probability = 0.5;
  uint32_t depth = 6;
  uint32_t tau_budget = 16;

  bool satisfiable() const { return max_ports > 0 && max_binders > 0 && max_protocol_len > 0; }
};

struct GeneratedComponent {
  ComponentPtr component;
  SigTable sigs;
  GammaEnv gamma;
};

namespace cosim_detail {

struct Gen {
  std::mt19937_64 rng;
  uint64_t counter = 0;
  SigTable sigs;
  std::vector<BasicType> type_pool{BasicType{"t0"}, BasicType{"t1"}, BasicType{"t2"}};

  explicit Gen(uint64_t seed) : rng(seed) {}

  uint64_t pick(uint64_t lo, uint64_t hi) {  // inclusive bounds
    return lo + rng() % (hi - lo + 1);
  }
  bool coin(double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; }
  std::string fresh(const char* prefix) { return std::string(prefix) + std::to_string(counter++); }
  const BasicType& random_type() { return type_pool[pick(0, type_pool.size() - 1)]; }

  std::string fresh_fn(const std::vector<BasicType>& params, const BasicType& ret) {
    std::string name = fresh("gf");
    sigs.emplace(name, FunctionSig{name, params, ret});
    return name;
  }

  // A standalone base component with random ports and binders.
  BaseComponent gen_base(const GenConfig& cfg) {
    BaseComponent b;
    std::map<std::string, BasicType> port_type;
    uint64_t n_in = pick(1, cfg.max_ports);
    for (uint64_t i = 0; i < n_in; ++i) {
      std::string p = fresh("gi");
      port_type[p] = random_type();
      b.inputs.push_back(p);
    }
    uint64_t n_out = pick(1, cfg.max_binders);
    for (uint64_t i = 0; i < n_out; ++i) {
      std::string y = fresh("go");
      b.outputs.push_back(y);
      std::vector<std::string> pool = b.inputs;
      std::shuffle(pool.begin(), pool.end(), rng);
      pool.resize(pick(0, pool.size()));
      std::vector<BasicType> params;
      for (const auto& p : pool) params.push_back(port_type[p]);
      BasicType ret = random_type();
      b.binders.push_back({y, fresh_fn(params, ret), pool, {}});
    }
    return b;
  }

  struct RoleAction {
    bool is_send;
    std::string label;
    bool inside_rec;
    std::string port;  // assigned below
    BasicType type;
  };

  std::optional<CompositeComponent> gen_composite(const GenConfig& cfg) {
    uint64_t n_roles = pick(2, 3);
    std::vector<std::string> role_pool;
    for (uint64_t i = 0; i < n_roles; ++i) role_pool.push_back(fresh("R"));

    struct Comm {
      std::string sender;
      std::vector<std::string> receivers;
      std::string label;
      BasicType type;
      bool inside_rec;
    };
    uint64_t len = pick(1, cfg.max_protocol_len);
    uint64_t rec_from = coin(cfg.rec_probability) ? pick(0, len - 1) : len;

    std::vector<Comm> comms;
    for (uint64_t i = 0; i < len; ++i) {
      Comm cm;
      cm.sender = role_pool[pick(0, role_pool.size() - 1)];
      // The interfacing role must occur in the protocol; put it on either
      // side of the first communication.
      if (i == 0 && coin(0.5)) cm.sender = role_pool[0];
      std::vector<std::string> others;
      for (const auto& r : role_pool)
        if (r != cm.sender) others.push_back(r);
      std::shuffle(others.begin(), others.end(), rng);
      size_t n_recv = (others.size() > 1 && coin(0.15)) ? 2 : 1;
      cm.receivers.assign(others.begin(), others.begin() + n_recv);
      if (i == 0 && cm.sender != role_pool[0] &&
          std::find(cm.receivers.begin(), cm.receivers.end(), role_pool[0]) ==
              cm.receivers.end())
        cm.receivers[0] = role_pool[0];
      cm.label = fresh("l");
      cm.type = random_type();
      cm.inside_rec = i >= rec_from;
      comms.push_back(std::move(cm));
    }

    // Only roles that occur may be assigned.
    std::set<std::string> occurring;
    for (const auto& cm : comms) {
      occurring.insert(cm.sender);
      for (const auto& r : cm.receivers) occurring.insert(r);
    }
    std::vector<std::string> roles;
    for (const auto& r : role_pool)
      if (occurring.count(r)) roles.push_back(r);

    // Per-role action sequences and ports.
    std::map<std::string, std::vector<RoleAction>> actions;
    std::vector<DistributionBinder> dbinds;
    std::map<std::string, std::pair<std::string, std::string>> send_port;  // label -> role,port
    for (auto& cm : comms) {
      std::string sp = fresh("p");
      send_port[cm.label] = {cm.sender, sp};
      actions[cm.sender].push_back({true, cm.label, cm.inside_rec, sp, cm.type});
      for (const auto& r : cm.receivers) {
        std::string rp = fresh("p");
        dbinds.push_back({cm.label, r, rp, cm.sender, sp});
        actions[r].push_back({false, cm.label, cm.inside_rec, rp, cm.type});
      }
    }

    CompositeComponent comp;
    comp.interfacing_role = roles[0];
    comp.binders = dbinds;

    // External inputs of the interfacing role, forwarded from outer ports.
    std::vector<std::pair<std::string, BasicType>> ext_inputs;
    uint64_t n_ext = pick(0, 2);
    for (uint64_t i = 0; i < n_ext; ++i)
      ext_inputs.push_back({fresh("p"), random_type()});

    for (const auto& role : roles) {
      BaseComponent b;
      std::map<std::string, BasicType> port_type;
      const bool interfacing = role == comp.interfacing_role;

      // In-rec receive ports are either consumed by protocol sends or
      // buffered by other binders, never both; a mixed use cannot conform.
      std::vector<std::string> consumable_out, consumable_in, buffered;
      for (const auto& a : actions[role]) {
        if (a.is_send) continue;
        b.inputs.push_back(a.port);
        port_type[a.port] = a.type;
        if (!a.inside_rec)
          consumable_out.push_back(a.port);
        else if (coin(0.7))
          consumable_in.push_back(a.port);
        else
          buffered.push_back(a.port);
      }
      if (interfacing)
        for (const auto& [p, bt] : ext_inputs) {
          b.inputs.push_back(p);
          port_type[p] = bt;
        }
      std::vector<std::string> noise_inputs;
      if (coin(0.25)) {  // noise input, fed by nobody
        std::string p = fresh("p");
        b.inputs.push_back(p);
        port_type[p] = random_type();
        noise_inputs.push_back(p);
      }

      auto make_binder = [&](const std::string& y, const BasicType& ret,
                             std::vector<std::string> pool) {
        std::shuffle(pool.begin(), pool.end(), rng);
        pool.resize(pick(0, std::min<size_t>(pool.size(), 2)));
        std::vector<BasicType> params;
        for (const auto& p : pool) params.push_back(port_type[p]);
        b.binders.push_back({y, fresh_fn(params, ret), pool, {}});
      };

      // Protocol send binders: values must be producible each time the
      // protocol demands them, so parameters come from receives that
      // precede the send in the same phase, or from external inputs.
      std::vector<std::string> seen_out, seen_in;
      for (const auto& a : actions[role]) {
        if (!a.is_send) {
          auto& tgt = a.inside_rec ? seen_in : seen_out;
          tgt.push_back(a.port);
          continue;
        }
        b.outputs.push_back(a.port);
        port_type[a.port] = a.type;
        std::vector<std::string> pool;
        if (!a.inside_rec) {
          for (const auto& p : seen_out)
            if (std::count(consumable_out.begin(), consumable_out.end(), p)) pool.push_back(p);
        } else {
          for (const auto& p : seen_in)
            if (std::count(consumable_in.begin(), consumable_in.end(), p)) pool.push_back(p);
        }
        if (interfacing)
          for (const auto& [p, bt] : ext_inputs) {
            (void)bt;
            pool.push_back(p);
          }
        make_binder(a.port, a.type, pool);
      }

      // Extra outputs: forwarded to the outer interface when interfacing,
      // silent otherwise. Their parameters may buffer protocol receives.
      uint64_t extra = interfacing ? pick(1, 2) : (coin(0.2) ? 1 : 0);
      for (uint64_t i = 0; i < extra; ++i) {
        std::string y = fresh("p");
        b.outputs.push_back(y);
        BasicType ret = random_type();
        port_type[y] = ret;
        std::vector<std::string> pool = buffered;
        for (const auto& p : consumable_out) pool.push_back(p);
        for (const auto& p : noise_inputs) pool.push_back(p);
        if (interfacing)
          for (const auto& [p, bt] : ext_inputs) {
            (void)bt;
            pool.push_back(p);
          }
        make_binder(y, ret, pool);
        if (interfacing) comp.forwarders.push_back({Forwarder::Kind::Output, y, fresh("ey")});
      }

      comp.roles.push_back({role, make_component(std::move(b))});
    }

    for (const auto& [p, bt] : ext_inputs) {
      (void)bt;
      comp.forwarders.push_back({Forwarder::Kind::Input, p, fresh("ex")});
    }
    for (const auto& f : comp.forwarders) {
      if (f.kind == Forwarder::Kind::Input)
        comp.inputs.push_back(f.outer);
      else
        comp.outputs.push_back(f.outer);
    }

    // Assemble the protocol term.
    ProtocolPtr tail =
        rec_from < len ? GlobalProtocol::recvar("X") : GlobalProtocol::end();
    for (size_t i = comms.size(); i-- > rec_from;)
      tail = GlobalProtocol::comm(comms[i].sender, comms[i].label, comms[i].receivers, tail);
    if (rec_from < len) tail = GlobalProtocol::rec("X", tail);
    for (size_t i = rec_from; i-- > 0;)
      tail = GlobalProtocol::comm(comms[i].sender, comms[i].label, comms[i].receivers, tail);
    comp.protocol = tail;
    return comp;
  }
};

}  // namespace cosim_detail

// Draws a validated, well-typed component. Candidates that fail validation
// or typing are discarded and resampled; after too many rejections a base
// component (always typable) is produced instead.
inline std::optional<GeneratedComponent> generate(uint64_t seed, const GenConfig& cfg) {
  if (!cfg.satisfiable()) return std::nullopt;

  for (uint32_t attempt = 0; attempt < 64; ++attempt) {
    cosim_detail::Gen gen(seed * 0x9e3779b97f4a7c15ULL + attempt);
    ComponentPtr comp;
    if (attempt == 63 || gen.coin(0.35)) {
      comp = make_component(gen.gen_base(cfg));
    } else {
      auto c = gen.gen_composite(cfg);
      if (!c) continue;
      comp = make_component(std::move(*c));
    }
    if (!validate(*comp, gen.sigs).empty()) continue;
    auto g = build_gamma(*comp, gen.sigs);
    if (std::holds_alternative<TypeError>(g)) continue;
    GammaEnv env = std::get<GammaEnv>(std::move(g));
    if (std::holds_alternative<IllTyped>(type_of(*comp, env))) continue;
    return GeneratedComponent{comp, gen.sigs, std::move(env)};
  }
  return std::nullopt;
}

}  // namespace gc
