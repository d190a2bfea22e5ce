#include <doctest.h>

#include "gc/cosim.hpp"
#include "gc/dsl.hpp"
#include "gc/report.hpp"
#include "support.hpp"

using namespace gc;
using gctest::bt;

TEST_CASE("the one-shot fixture parses, resolves and validates") {
  auto prog = gctest::load_fixture("irs.gc");
  CHECK(prog.entry == "K_IRS");
  auto entry = prog.entry_component();
  REQUIRE(entry);
  CHECK(!entry->is_base());
  CHECK(validate(*entry, prog.sig_table()).empty());
  CHECK(component_equal(*entry, *make_component(gctest::make_irs(gctest::one_shot_protocol()))));
}

TEST_CASE("empty input is a parse error") {
  auto r = parse("");
  CHECK(!r.program);
  REQUIRE(!r.diagnostics.empty());
  CHECK(r.diagnostics[0].message.find("expected declaration") != std::string::npos);
}

TEST_CASE("undeclared function in a binder is a resolve error") {
  auto r = parse("type t\nbase B { in x out y bind y = nope(x) }\nentry B\n");
  CHECK(!r.ok());
  bool found = false;
  for (const auto& d : r.diagnostics)
    found |= d.kind == Diagnostic::Kind::Resolve &&
             d.message.find("unknown function 'nope'") != std::string::npos;
  CHECK(found);
}

TEST_CASE("parse errors carry positions and expectations") {
  auto r = parse("base B {\n  in x out y\n  bind y = \n}\nentry B\n");
  CHECK(!r.program);
  REQUIRE(!r.diagnostics.empty());
  CHECK(r.diagnostics[0].line == 4);  // the offending '}' token
  CHECK(r.diagnostics[0].message.find("expected function name") != std::string::npos);
}

TEST_CASE("entry component must validate") {
  // y has no binder.
  auto r = parse("type t\nfn f(t) -> t\nbase B { in x out y }\nentry B\n");
  CHECK(!r.ok());
  bool val = false;
  for (const auto& d : r.diagnostics)
    val |= d.kind == Diagnostic::Kind::Validation &&
           d.message.find("MissingBinder(y)") != std::string::npos;
  CHECK(val);
}

TEST_CASE("printing and reparsing is the identity on the fixture corpus") {
  for (const auto* name : {"irs.gc", "irs_rec.gc", "irs_kind.gc"}) {
    auto prog = gctest::load_fixture(name);
    auto text = print(prog);
    auto again = parse(text);
    REQUIRE(again.ok());
    CHECK(program_equal(prog, *again.program));
  }
}

TEST_CASE("a minimal base component prints canonically") {
  auto r = parse("base B { in out }\nentry B\n");
  REQUIRE(r.program);  // zero ports, zero binders: validates trivially
  CHECK(print(*r.program) == "base B {\n  in \n  out \n}\n\nentry B\n");
}

TEST_CASE("recursive protocols print with rec and the variable") {
  auto prog = gctest::load_fixture("irs_rec.gc");
  auto text = print(prog);
  CHECK(text.find("rec X . Portal -> RE : image ; RE -> Portal : class ; X") !=
        std::string::npos);
}

TEST_CASE("runtime forms round-trip: queues and in-transit heads") {
  std::string src = R"(
type image
type class
type version

fn f_u(image) -> image
fn f_r(class) -> class
fn f() -> version
fn g(image) -> class

base K_Portal {
  in x_p, x_p'
  out y_p, y_p', y_p''
  bind y_p = f_u(x_p) queue { x_p -> img0 } { x_p -> f_u(img1) }
  bind y_p' = f_r(x_p')
  bind y_p'' = f()
}

base K_RE {
  in x_re
  out y_re
  bind y_re = g(x_re) queue { x_re -> img0 }
}

composite K_IRS {
  in x
  out y, y'
  protocol transit Portal -> { RE } : image ( img0 ) ; RE -> Portal : class ; end
  roles Portal = K_Portal RE = K_RE
  binders image : RE.x_re <- Portal.y_p
          class : Portal.x_p' <- RE.y_re
  interface Portal [ x_p <- x, y <- y_p', y' <- y_p'' ]
}

entry K_IRS
)";
  auto r = parse(src);
  REQUIRE(r.ok());
  auto entry = r.program->entry_component();
  CHECK(entry->composite().protocol->form == GlobalProtocol::Form::InTransit);
  CHECK(entry->composite().protocol->value->type == bt("image"));

  const auto& portal = **entry->composite().find_role("Portal");
  CHECK(portal.base().binders[0].queue.size() == 2);
  CHECK(portal.base().binders[0].queue[1].at("x_p") ==
        Value::application("f_u", {Value::literal("img1", bt("image"))}, bt("image")));

  auto again = parse(print(*r.program));
  REQUIRE(again.ok());
  CHECK(program_equal(*r.program, *again.program));
}

TEST_CASE("ill-typed values in runtime forms are rejected") {
  std::string src = R"(
type image
type version
fn f_u(image) -> image
fn f() -> version
base B {
  in x_p
  out y_p
  bind y_p = f_u(x_p) queue { x_p -> f() }
}
entry B
)";
  auto r = parse(src);
  CHECK(!r.ok());
  bool found = false;
  for (const auto& d : r.diagnostics)
    found |= d.message.find("value of type version") != std::string::npos;
  CHECK(found);
}

TEST_CASE("generated programs survive a print/parse round trip") {
  GenConfig cfg;
  int printed = 0;
  for (uint64_t seed = 0; seed < 25; ++seed) {
    auto gen = generate(seed, cfg);
    REQUIRE(gen);

    // Wrap the generated component into a program.
    SourceProgram prog;
    std::set<std::string> types;
    for (const auto& [name, sig] : gen->sigs) {
      (void)name;
      for (const auto& p : sig.params) types.insert(p.name);
      types.insert(sig.ret.name);
    }
    for (const auto& [port, t] : gen->gamma.port_types) {
      (void)port;
      types.insert(t.name);
    }
    prog.basic_types.assign(types.begin(), types.end());
    for (const auto& [name, sig] : gen->sigs) {
      (void)name;
      prog.fn_sigs.push_back(sig);
    }
    std::vector<std::pair<std::string, ComponentPtr>> decls;
    if (gen->component->is_base()) {
      decls.push_back({"Gen", gen->component});
    } else {
      CompositeComponent c = gen->component->composite();
      CompositeDecl cd{"Gen", c.inputs, c.outputs, c.protocol, {}, c.binders,
                       c.interfacing_role, c.forwarders};
      for (const auto& [role, sub] : c.roles) {
        std::string child = "Sub_" + role;
        cd.role_names.push_back({role, child});
        decls.push_back({child, sub});
      }
      prog.components.push_back(ComponentDecl{cd});
      prog.resolved["Gen"] = gen->component;
    }
    for (const auto& [name, sub] : decls) {
      if (sub->is_base())
        prog.components.push_back(ComponentDecl{BaseDecl{name, sub->base()}});
      prog.resolved[name] = sub;
    }
    prog.entry = "Gen";

    auto text = print(prog);
    auto again = parse(text);
    REQUIRE(again.ok());
    CHECK(program_equal(prog, *again.program));
    ++printed;
  }
  CHECK(printed == 25);
}

TEST_CASE("parsing is total: garbage yields diagnostics, never a crash") {
  std::mt19937_64 rng(2024);
  const std::string alphabet = "abXZ019_'(){}[]<>-.,;:=#\n\t qwe rec end fn in";
  for (int round = 0; round < 300; ++round) {
    std::string src;
    size_t len = rng() % 120;
    for (size_t i = 0; i < len; ++i) src += alphabet[rng() % alphabet.size()];
    auto r = parse(src);
    CHECK((r.program.has_value() || !r.diagnostics.empty()));
  }
  // Truncations of a valid program must all yield a program or an error.
  auto full = gctest::read_file(gctest::fixture_path("irs_rec.gc"));
  for (size_t cut = 0; cut < full.size(); cut += 37) {
    auto r = parse(full.substr(0, cut));
    CHECK((r.program.has_value() || !r.diagnostics.empty()));
  }
}

TEST_CASE("type reports round-trip through the machine format") {
  auto prog = gctest::load_fixture("irs.gc");
  auto t = type_of(*prog.entry_component(), prog.gamma);
  REQUIRE(std::holds_alternative<ComponentType>(t));
  TypeReport rep{"K_IRS", std::get<ComponentType>(t)};
  auto doc = type_report_json(rep);
  auto back = type_report_from_json(doc);
  REQUIRE(back);
  CHECK(back->component == rep.component);
  CHECK(back->type == rep.type);
  CHECK(type_report_json(*back) == doc);
}
