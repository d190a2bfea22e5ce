#include <doctest.h>

#include "gc/types.hpp"
#include "support.hpp"

using namespace gc;
using gctest::bt;

namespace {

// <{x(i)}; {y(c):1:[x:init], y'(v):1:[]}>
ComponentType example_type() {
  ComponentType t;
  t.inputs.emplace("x", bt("i"));
  Constraint y{bt("c"), ExtNat::fin(1), {{"x", Dependency::initial()}}};
  Constraint yp{bt("v"), ExtNat::fin(1), {}};
  t.constraints.emplace("y", y);
  t.constraints.emplace("y'", yp);
  return t;
}

}  // namespace

TEST_CASE("extended naturals saturate at infinity") {
  CHECK(ExtNat::inf().plus_one() == ExtNat::inf());
  CHECK(ExtNat::inf().minus_one() == ExtNat::inf());
  CHECK(ExtNat::fin(2).plus_one() == ExtNat::fin(3));
  CHECK(ExtNat::fin(5) < ExtNat::inf());
  CHECK(!(ExtNat::inf() < ExtNat::fin(5)));
  CHECK(min(ExtNat::inf(), ExtNat::fin(1)) == ExtNat::fin(1));
  CHECK(min(ExtNat::inf(), ExtNat::inf()) == ExtNat::inf());
}

TEST_CASE("constraint input: drop initial, bump per-each, ignore others") {
  Constraint c{bt("c"), ExtNat::fin(1), {{"x", Dependency::initial()}}};
  Constraint after = constraint_input(c, "x");
  CHECK(after.deps.empty());
  CHECK(after.bound == ExtNat::fin(1));  // the boundary never moves on input

  Constraint unrelated{bt("v"), ExtNat::fin(1), {}};
  CHECK(constraint_input(unrelated, "x") == unrelated);

  Constraint each{bt("b"), ExtNat::inf(), {{"x", Dependency::per_each(2)}}};
  CHECK(constraint_input(each, "x").deps.at("x") == Dependency::per_each(3));
}

TEST_CASE("type input steps every constraint and keeps bounds") {
  ComponentType t = example_type();
  auto step = type_input(t, "x");
  REQUIRE(step);
  CHECK(step->first == bt("i"));
  const ComponentType& t2 = step->second;
  CHECK(t2.constraints.at("y").deps.empty());
  CHECK(t2.constraints.at("y").bound == ExtNat::fin(1));
  CHECK(t2.constraints.at("y'") == t.constraints.at("y'"));
}

TEST_CASE("type input on an unknown port is rejected") {
  ComponentType t;
  CHECK(!type_input(t, "x"));
}

TEST_CASE("an unbounded per-each count absorbs inputs") {
  ComponentType t;
  t.inputs.emplace("x", bt("b"));
  t.constraints.emplace("y",
                        Constraint{bt("b"), ExtNat::fin(1), {{"x", Dependency::per_each(ExtNat::inf())}}});
  auto step = type_input(t, "x");
  REQUIRE(step);
  CHECK(step->second == t);
}

TEST_CASE("type output enabling and arithmetic") {
  ComponentType t = example_type();
  // y still carries the initial dependency.
  auto blocked = type_output(t, "y");
  CHECK(!blocked.enabled());
  CHECK(blocked.block == OutputBlock::InitialDependency);

  ComponentType t2;
  t2.inputs.emplace("x", bt("b"));
  t2.constraints.emplace("y",
                         Constraint{bt("b"), ExtNat::fin(2), {{"x", Dependency::per_each(1)}}});
  auto step = type_output(t2, "y");
  REQUIRE(step.enabled());
  CHECK(step.result->first == bt("b"));
  CHECK(step.result->second.constraints.at("y").bound == ExtNat::fin(1));
  CHECK(step.result->second.constraints.at("y").deps.at("x") == Dependency::per_each(0));

  ComponentType t3;
  t3.constraints.emplace("y'", Constraint{bt("v"), ExtNat::inf(), {}});
  auto step3 = type_output(t3, "y'");
  REQUIRE(step3.enabled());
  CHECK(step3.result->second == t3);  // inf - 1 = inf, no dependencies

  CHECK(type_output(t3, "nope").block == OutputBlock::NoConstraint);
  ComponentType t4;
  t4.constraints.emplace("y", Constraint{bt("b"), ExtNat::fin(0), {}});
  CHECK(type_output(t4, "y").block == OutputBlock::ZeroBound);
  ComponentType t5;
  t5.constraints.emplace("y",
                         Constraint{bt("b"), ExtNat::fin(1), {{"x", Dependency::per_each(0)}}});
  CHECK(type_output(t5, "y").block == OutputBlock::ZeroCount);
}

TEST_CASE("modification relaxes forwarded inputs only") {
  ComponentType portal;
  portal.inputs.emplace("x_p", bt("i"));
  portal.inputs.emplace("x_p'", bt("c"));
  portal.constraints.emplace("y_p",
                             Constraint{bt("i"), ExtNat::inf(), {{"x_p", Dependency::per_each(0)}}});
  portal.constraints.emplace("y_p'",
                             Constraint{bt("c"), ExtNat::inf(), {{"x_p'", Dependency::per_each(0)}}});
  portal.constraints.emplace("y_p''", Constraint{bt("v"), ExtNat::inf(), {}});

  std::vector<Forwarder> fs{{Forwarder::Kind::Input, "x_p", "x"},
                            {Forwarder::Kind::Output, "y_p'", "y"},
                            {Forwarder::Kind::Output, "y_p''", "y'"}};
  ModifiedType m = modify(fs, portal);
  CHECK(m.constraints.at("y_p").deps.at("x_p") == Dependency::per_each(ExtNat::inf()));
  CHECK(m.constraints.at("y_p'") == portal.constraints.at("y_p'"));
  CHECK(finite_counts(portal));
  CHECK(!finite_counts(m));

  // Components with no forwarded ports are untouched.
  ComponentType engine;
  engine.inputs.emplace("x_re", bt("i"));
  engine.constraints.emplace("y_re",
                             Constraint{bt("c"), ExtNat::inf(), {{"x_re", Dependency::per_each(0)}}});
  CHECK(modify(fs, engine) == engine);

  // Initial dependencies on forwarded ports are dropped.
  ComponentType with_init;
  with_init.inputs.emplace("x_p", bt("i"));
  with_init.constraints.emplace("y",
                                Constraint{bt("c"), ExtNat::fin(1), {{"x_p", Dependency::initial()}}});
  CHECK(modify(fs, with_init).constraints.at("y").deps.empty());
}

TEST_CASE("inputs never decrease counts nor touch bounds; outputs and inputs on disjoint ports commute") {
  ComponentType t;
  t.inputs.emplace("a", bt("b"));
  t.inputs.emplace("c", bt("b"));
  t.constraints.emplace("y",
                        Constraint{bt("b"), ExtNat::fin(3), {{"a", Dependency::per_each(1)}}});
  t.constraints.emplace("z",
                        Constraint{bt("b"), ExtNat::fin(3), {{"c", Dependency::per_each(2)}}});

  auto in = type_input(t, "a");
  REQUIRE(in);
  for (const auto& [port, c] : in->second.constraints) {
    CHECK(c.bound == t.constraints.at(port).bound);
    for (const auto& [dp, d] : c.deps) {
      if (d.kind == Dependency::Kind::PerEach)
        CHECK(!(d.count < t.constraints.at(port).deps.at(dp).count));
    }
  }

  // out on y then in on c == in on c then out on y.
  auto out_first = type_output(t, "y");
  REQUIRE(out_first.enabled());
  auto then_in = type_input(out_first.result->second, "c");
  REQUIRE(then_in);
  auto in_first = type_input(t, "c");
  REQUIRE(in_first);
  auto then_out = type_output(in_first->second, "y");
  REQUIRE(then_out.enabled());
  CHECK(then_in->second == then_out.result->second);
}
