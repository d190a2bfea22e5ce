#include <doctest.h>

#include "gc/cosim.hpp"
#include "support.hpp"

using namespace gc;
using gctest::bt;

TEST_CASE("canonical keys identify states up to literal renaming") {
  auto k = make_component(gctest::make_irs(gctest::one_shot_protocol()));
  auto a = apply_input(*k, "x", Value::literal("one", bt("image")));
  auto b = apply_input(*k, "x", Value::literal("two", bt("image")));
  REQUIRE(a);
  REQUIRE(b);
  CHECK(!component_equal(**a, **b));
  CHECK(canonical_key(**a) == canonical_key(**b));
  CHECK(canonical_key(*k) != canonical_key(**a));
}

TEST_CASE("generation yields validated, well-typed components") {
  GenConfig cfg;
  int composites = 0;
  for (uint64_t seed = 0; seed < 30; ++seed) {
    auto gen = generate(seed, cfg);
    REQUIRE(gen);
    CHECK(validate(*gen->component, gen->sigs).empty());
    auto t = type_of(*gen->component, gen->gamma);
    CHECK(std::holds_alternative<ComponentType>(t));
    if (!gen->component->is_base()) ++composites;
  }
  CHECK(composites > 5);  // the mix covers assemblies, not just bases
}

TEST_CASE("unsatisfiable generator configurations are rejected") {
  GenConfig cfg;
  cfg.max_ports = 0;
  CHECK(!generate(0, cfg));
}

TEST_CASE("subject reduction holds on the fixture assemblies (smoke)") {
  for (const auto* name : {"irs.gc", "irs_rec.gc", "irs_kind.gc"}) {
    auto prog = gctest::load_fixture(name);
    auto rep = check_subject_reduction(*prog.entry_component(), prog.gamma, 5);
    CHECK(rep.violations.empty());
    CHECK(rep.edges_checked > 0);
  }
}

TEST_CASE("subject reduction holds on a plain base component") {
  auto k = make_component(gctest::make_portal());
  auto rep = check_subject_reduction(*k, gctest::irs_gamma(*k), 4);
  CHECK(rep.violations.empty());
  CHECK(rep.states_explored > 1);
}

TEST_CASE("a corrupted typing function is caught by the harness") {
  auto prog = gctest::load_fixture("irs.gc");
  const GammaEnv& env = prog.gamma;
  TypeOfFn corrupted = [&env](const Component& k) -> TypeOfResult {
    auto r = type_of(k, env);
    if (std::holds_alternative<ComponentType>(r)) {
      auto& t = std::get<ComponentType>(r);
      // Zero every boundary: emissions the component performs look
      // type-forbidden, so the mirror step fails.
      for (auto& [y, c] : t.constraints) {
        (void)y;
        c.bound = ExtNat::fin(0);
      }
    }
    return r;
  };
  auto rep = check_subject_reduction(*prog.entry_component(), prog.gamma, 4, corrupted);
  CHECK(!rep.violations.empty());
}

TEST_CASE("progress holds on the one-shot workflow") {
  auto prog = gctest::load_fixture("irs.gc");
  auto rep = check_progress(*prog.entry_component(), prog.gamma, 3, 16);
  CHECK(rep.violations.empty());
  CHECK(rep.budget_exceeded.empty());
}

TEST_CASE("the version output is immediately available at the initial state") {
  auto prog = gctest::load_fixture("irs.gc");
  auto rep = check_progress(*prog.entry_component(), prog.gamma, 0, 0);
  // Depth 0, budget 0: only the initial state, and y' must fire directly.
  CHECK(rep.violations.empty());
  CHECK(rep.budget_exceeded.empty());
}

TEST_CASE("a zero tau budget cannot cross the protocol chain") {
  auto prog = gctest::load_fixture("irs.gc");
  auto fed = apply_input(*prog.entry_component(), "x",
                         Value::literal("img", bt("image")));
  REQUIRE(fed);
  // After the image, the type enables the class output, but realizing it
  // needs four internal steps.
  auto rep = check_progress(**fed, prog.gamma, 0, 0);
  CHECK(rep.violations.empty());
  REQUIRE(rep.budget_exceeded.size() == 1);
  CHECK(rep.budget_exceeded[0].transition == "y!(class)");

  auto ok = check_progress(**fed, prog.gamma, 0, 16);
  CHECK(ok.budget_exceeded.empty());
}

TEST_CASE("identical seeds and configuration reproduce the report") {
  GenConfig cfg;
  cfg.depth = 4;
  auto one = generate(3, cfg);
  auto two = generate(3, cfg);
  REQUIRE(one);
  REQUIRE(two);
  CHECK(component_equal(*one->component, *two->component));
  auto r1 = check_subject_reduction(*one->component, one->gamma, 4);
  auto r2 = check_subject_reduction(*two->component, two->gamma, 4);
  CHECK(to_text(r1) == to_text(r2));
}

TEST_CASE("nested assemblies: deep delivery and lifted dependencies co-simulate") {
  SigTable sigs = gctest::irs_sigs();
  sigs.emplace("h", FunctionSig{"h", {bt("image")}, bt("image")});

  // The one-shot assembly sits behind a relay that feeds it through the
  // outer protocol: delivery crosses into the nested composite.
  BaseComponent relay;
  relay.inputs = {"x_c"};
  relay.outputs = {"y_c"};
  relay.binders = {{"y_c", "h", {"x_c"}, {}}};

  CompositeComponent feed;
  feed.inputs = {"u"};
  feed.protocol = GlobalProtocol::comm("Relay", "relayed", {"Irs"}, GlobalProtocol::end());
  feed.roles = {{"Relay", make_component(relay)},
                {"Irs", make_component(gctest::make_irs(gctest::one_shot_protocol()))}};
  feed.binders = {{"relayed", "Irs", "x", "Relay", "y_c"}};
  feed.interfacing_role = "Relay";
  feed.forwarders = {{Forwarder::Kind::Input, "x_c", "u"}};

  auto fk = make_component(feed);
  REQUIRE(validate(*fk, sigs).empty());
  auto fg = build_gamma(*fk, sigs);
  REQUIRE(std::holds_alternative<GammaEnv>(fg));
  auto frep = check_subject_reduction(*fk, std::get<GammaEnv>(fg), 8);
  CHECK(frep.violations.empty());
  CHECK(frep.edges_checked > 20);
  auto fprog = check_progress(*fk, std::get<GammaEnv>(fg), 5, 16);
  CHECK(fprog.violations.empty());
  CHECK(fprog.budget_exceeded.empty());

  // The assembly as the interfacing component: its one-shot class output is
  // forwarded outward, so the initial dependency is lifted to the new
  // interface.
  BaseComponent sink;
  sink.inputs = {"x_o"};
  sink.outputs = {"y_o"};
  sink.binders = {{"y_o", "f_r2", {"x_o"}, {}}};
  SigTable sigs2 = gctest::irs_sigs();
  sigs2.emplace("f_r2", FunctionSig{"f_r2", {bt("version")}, bt("version")});

  CompositeComponent shell;
  shell.inputs = {"u2"};
  shell.outputs = {"w2"};
  shell.protocol = GlobalProtocol::comm("Irs", "ver", {"Other"}, GlobalProtocol::end());
  shell.roles = {{"Irs", make_component(gctest::make_irs(gctest::one_shot_protocol()))},
                 {"Other", make_component(sink)}};
  shell.binders = {{"ver", "Other", "x_o", "Irs", "y'"}};
  shell.interfacing_role = "Irs";
  shell.forwarders = {{Forwarder::Kind::Input, "x", "u2"},
                      {Forwarder::Kind::Output, "y", "w2"}};

  auto sk = make_component(shell);
  REQUIRE(validate(*sk, sigs2).empty());
  auto sg = build_gamma(*sk, sigs2);
  REQUIRE(std::holds_alternative<GammaEnv>(sg));
  auto st = type_of(*sk, std::get<GammaEnv>(sg));
  REQUIRE(std::holds_alternative<ComponentType>(st));
  ComponentType want;
  want.inputs.emplace("u2", bt("image"));
  want.constraints.emplace(
      "w2", Constraint{bt("class"), ExtNat::fin(1), {{"u2", Dependency::initial()}}});
  CHECK(std::get<ComponentType>(st) == want);

  auto srep = check_subject_reduction(*sk, std::get<GammaEnv>(sg), 8);
  CHECK(srep.violations.empty());
  auto sprog = check_progress(*sk, std::get<GammaEnv>(sg), 5, 16);
  CHECK(sprog.violations.empty());
  CHECK(sprog.budget_exceeded.empty());
}

TEST_CASE("subject reduction and progress on a small generated corpus") {
  GenConfig cfg;
  for (uint64_t seed = 0; seed < 10; ++seed) {
    auto gen = generate(seed, cfg);
    REQUIRE(gen);
    auto sr = check_subject_reduction(*gen->component, gen->gamma, 4);
    CHECK(sr.violations.empty());
    auto pr = check_progress(*gen->component, gen->gamma, 3, 16);
    CHECK(pr.violations.empty());
  }
}
