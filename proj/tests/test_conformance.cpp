#include <doctest.h>

#include "gc/conformance.hpp"
#include "support.hpp"

using namespace gc;
using gctest::bt;

namespace {

ComponentType engine_type() {
  ComponentType t;
  t.inputs.emplace("x_re", bt("image"));
  t.constraints.emplace(
      "y_re", Constraint{bt("class"), ExtNat::inf(), {{"x_re", Dependency::per_each(0)}}});
  return t;
}

ComponentType portal_type() {
  ComponentType t;
  t.inputs.emplace("x_p", bt("image"));
  t.inputs.emplace("x_p'", bt("class"));
  t.constraints.emplace(
      "y_p", Constraint{bt("image"), ExtNat::inf(), {{"x_p", Dependency::per_each(0)}}});
  t.constraints.emplace(
      "y_p'", Constraint{bt("class"), ExtNat::inf(), {{"x_p'", Dependency::per_each(0)}}});
  t.constraints.emplace("y_p''", Constraint{bt("version"), ExtNat::inf(), {}});
  return t;
}

}  // namespace

TEST_CASE("leq is reflexive and respects input monotonicity") {
  ComponentType a;
  a.inputs.emplace("x", bt("b"));
  a.constraints.emplace("y",
                        Constraint{bt("b"), ExtNat::fin(5), {{"x", Dependency::per_each(0)}}});
  CHECK(leq(a, a));

  ComponentType b = a;
  b.constraints.at("y").deps.at("x") = Dependency::per_each(2);
  CHECK(leq(a, b));   // two inputs on x
  CHECK(!leq(b, a));  // counts cannot decrease

  // Transitivity across a chain.
  ComponentType c = a;
  c.constraints.at("y").deps.at("x") = Dependency::per_each(7);
  CHECK(leq(b, c));
  CHECK(leq(a, c));
}

TEST_CASE("leq handles dropped initial dependencies and fixed bounds") {
  ComponentType a;
  a.inputs.emplace("x", bt("b"));
  a.constraints.emplace("y",
                        Constraint{bt("b"), ExtNat::fin(1), {{"x", Dependency::initial()}}});
  ComponentType b = a;
  b.constraints.at("y").deps.clear();
  CHECK(leq(a, b));   // one input drops the initial dependency
  CHECK(!leq(b, a));  // dependencies never reappear

  // An input cannot change a bound.
  ComponentType c = a;
  c.constraints.at("y").bound = ExtNat::fin(0);
  CHECK(!leq(a, c));

  // A kept initial dependency forbids inputs that another constraint needs.
  ComponentType d = a;
  d.constraints.emplace("z",
                        Constraint{bt("b"), ExtNat::fin(1), {{"x", Dependency::per_each(0)}}});
  ComponentType e = d;
  e.constraints.at("z").deps.at("x") = Dependency::per_each(1);  // needs one input on x
  CHECK(!leq(d, e));  // but y's initial dependency would have been dropped
}

TEST_CASE("the modified portal type conforms to its one-shot projection") {
  auto c = gctest::make_irs(gctest::one_shot_protocol());
  auto env = gctest::irs_gamma(*make_component(c));
  auto lp = project(c.protocol, "Portal", c.binders, env.label_types);
  REQUIRE(!lp.error);

  // Unmodified, the output on y_p is blocked: no image was received.
  auto raw = conforms({}, portal_type(), lp.protocol);
  CHECK(!raw.ok);

  auto m = modify(c.forwarders, portal_type());
  auto res = conforms({}, m, lp.protocol);
  CHECK(res.ok);
  REQUIRE(res.trace.size() == 3);
  CHECK(res.trace[0].second == "OutConf y_p!:image");
  CHECK(res.trace[1].second == "InpConf x_p'?:class");
  CHECK(res.trace[2].second == "EndConf");
}

TEST_CASE("the engine type conforms to its projection without modification") {
  auto c = gctest::make_irs(gctest::one_shot_protocol());
  auto env = gctest::irs_gamma(*make_component(c));
  auto lp = project(c.protocol, "RE", c.binders, env.label_types);
  REQUIRE(!lp.error);
  auto res = conforms({}, engine_type(), lp.protocol);
  CHECK(res.ok);
  REQUIRE(res.trace.size() == 3);
  CHECK(res.trace[0].second == "InpConf x_re?:image");
  CHECK(res.trace[1].second == "OutConf y_re!:class");
}

TEST_CASE("recursive conformance goes through VarConf") {
  auto c = gctest::make_irs(gctest::recursive_protocol());
  auto env = gctest::irs_gamma(*make_component(c));
  for (const auto& role : {"Portal", "RE"}) {
    auto lp = project(c.protocol, role, c.binders, env.label_types);
    REQUIRE(!lp.error);
    ComponentType t = role == std::string("Portal") ? portal_type() : engine_type();
    auto res = conforms({}, modify(c.forwarders, t), lp.protocol);
    CHECK(res.ok);
    CHECK(res.trace.back().second == std::string("VarConf X"));
  }
}

TEST_CASE("an exhausted bound fails conformance with the reason recorded") {
  ComponentType t;
  t.constraints.emplace("y", Constraint{bt("c"), ExtNat::fin(0), {}});
  auto lp = LocalProtocol::send("y", bt("c"), LocalProtocol::end());
  auto res = conforms({}, t, lp);
  CHECK(!res.ok);
  CHECK(res.failure.find("boundary exhausted") != std::string::npos);
}

TEST_CASE("well-typedness of the fixture assemblies") {
  auto one = gctest::load_fixture("irs.gc");
  auto t1 = type_of(*one.entry_component(), one.gamma);
  REQUIRE(std::holds_alternative<ComponentType>(t1));

  ComponentType want;
  want.inputs.emplace("x", bt("image"));
  want.constraints.emplace(
      "y", Constraint{bt("class"), ExtNat::fin(1), {{"x", Dependency::initial()}}});
  want.constraints.emplace("y'", Constraint{bt("version"), ExtNat::inf(), {}});
  CHECK(std::get<ComponentType>(t1) == want);

  auto rec = gctest::load_fixture("irs_rec.gc");
  auto t2 = type_of(*rec.entry_component(), rec.gamma);
  REQUIRE(std::holds_alternative<ComponentType>(t2));
  ComponentType want2;
  want2.inputs.emplace("x", bt("image"));
  want2.constraints.emplace(
      "y", Constraint{bt("class"), ExtNat::inf(), {{"x", Dependency::per_each(0)}}});
  want2.constraints.emplace("y'", Constraint{bt("version"), ExtNat::inf(), {}});
  CHECK(std::get<ComponentType>(t2) == want2);
}

TEST_CASE("an engine that cannot produce the class makes the assembly ill-typed") {
  // The binder for y_re consumes a port the protocol never feeds.
  BaseComponent bad;
  bad.inputs = {"x_re", "x_dead"};
  bad.outputs = {"y_re"};
  bad.binders = {{"y_re", "g2", {"x_dead"}, {}}};

  SigTable sigs = gctest::irs_sigs();
  sigs.emplace("g2", FunctionSig{"g2", {bt("image")}, bt("class")});

  CompositeComponent c = gctest::make_irs(gctest::one_shot_protocol());
  c.roles[1].second = make_component(bad);

  auto g = build_gamma(*make_component(c), sigs);
  REQUIRE(std::holds_alternative<GammaEnv>(g));
  auto t = type_of(*make_component(c), std::get<GammaEnv>(g));
  REQUIRE(std::holds_alternative<IllTyped>(t));
  const IllTyped& it = std::get<IllTyped>(t);
  CHECK(it.clause == IllTyped::Clause::Conformance);
  CHECK(it.role == "RE");
  REQUIRE(it.conformance);
  CHECK(!it.conformance->ok);
}

TEST_CASE("a missing binder makes the assembly ill-typed at validation") {
  BaseComponent bad;
  bad.inputs = {"x_re"};
  bad.outputs = {"y_re"};  // no binder for y_re

  CompositeComponent c = gctest::make_irs(gctest::one_shot_protocol());
  c.roles[1].second = make_component(bad);
  auto g = build_gamma(*make_component(c), gctest::irs_sigs());
  REQUIRE(std::holds_alternative<GammaEnv>(g));
  auto t = type_of(*make_component(c), std::get<GammaEnv>(g));
  REQUIRE(std::holds_alternative<IllTyped>(t));
  CHECK(std::get<IllTyped>(t).clause == IllTyped::Clause::Validation);
}

TEST_CASE("nested composites type through the inner extraction") {
  // Wrap the one-shot assembly as the interfacing subcomponent of an outer
  // shell with a relay engine: outer protocol ships one classification out.
  auto inner = gctest::make_irs(gctest::one_shot_protocol());

  BaseComponent relay;
  relay.inputs = {"x_c"};
  relay.outputs = {"y_c"};
  relay.binders = {{"y_c", "h", {"x_c"}, {}}};

  SigTable sigs = gctest::irs_sigs();
  sigs.emplace("h", FunctionSig{"h", {bt("class")}, bt("class")});

  CompositeComponent outer;
  outer.inputs = {"u"};
  outer.outputs = {"w"};
  outer.protocol = GlobalProtocol::comm("Irs", "cls", {"Relay"}, GlobalProtocol::end());
  outer.roles = {{"Irs", make_component(inner)}, {"Relay", make_component(relay)}};
  outer.binders = {{"cls", "Relay", "x_c", "Irs", "y"}};
  outer.interfacing_role = "Irs";
  outer.forwarders = {{Forwarder::Kind::Input, "x", "u"},
                      {Forwarder::Kind::Output, "y'", "w"}};

  auto k = make_component(outer);
  auto g = build_gamma(*k, sigs);
  REQUIRE(std::holds_alternative<GammaEnv>(g));
  auto env = std::get<GammaEnv>(g);
  REQUIRE(validate(*k, sigs).empty());

  auto t = type_of(*k, env);
  REQUIRE(std::holds_alternative<ComponentType>(t));
  const ComponentType& ct = std::get<ComponentType>(t);
  CHECK(ct.inputs.count("u"));
  REQUIRE(ct.constraints.count("w"));
  // The version relay is unbounded and untouched by the outer protocol.
  CHECK(ct.constraints.at("w").bound == ExtNat::inf());
}

TEST_CASE("conformance derivations are renderable") {
  auto c = gctest::make_irs(gctest::one_shot_protocol());
  auto env = gctest::irs_gamma(*make_component(c));
  auto traces = role_conformance(c, env);
  REQUIRE(traces.count("Portal"));
  REQUIRE(traces.count("RE"));
  CHECK(traces.at("Portal").ok);
  CHECK(traces.at("RE").ok);
  CHECK(render_trace(traces.at("Portal")).find("OutConf") != std::string::npos);
}
