// Command line front end: check and extract component types, project
// protocols, run random simulations and the co-simulation property suites.
//
// Exit codes: 0 success, 1 diagnostics or violations, 2 usage errors.

#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "gc/conformance.hpp"
#include "gc/cosim.hpp"
#include "gc/dsl.hpp"
#include "gc/report.hpp"
#include "gc/semantics.hpp"

namespace {

std::optional<gc::SourceProgram> load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "cannot open " << path << "\n";
    return std::nullopt;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  auto result = gc::parse(ss.str());
  for (const auto& d : result.diagnostics) std::cerr << gc::to_string(d) << "\n";
  if (!result.ok()) return std::nullopt;
  return *result.program;
}

gc::ComponentPtr pick_component(const gc::SourceProgram& prog, const std::string& name,
                                std::string& picked) {
  picked = name.empty() ? prog.entry : name;
  auto it = prog.resolved.find(picked);
  if (it == prog.resolved.end()) {
    std::cerr << "unknown component '" << picked << "'\n";
    return nullptr;
  }
  return it->second;
}

int run_check(const std::string& file, const std::string& component, bool as_json,
              bool quiet_trace) {
  auto prog = load(file);
  if (!prog) return 1;
  std::string name;
  auto k = pick_component(*prog, component, name);
  if (!k) return 1;

  auto errs = gc::validate(*k, prog->sig_table());
  for (const auto& e : errs) std::cerr << gc::to_string(e) << "\n";
  if (!errs.empty()) return 1;

  auto t = gc::type_of(*k, prog->gamma);
  if (std::holds_alternative<gc::IllTyped>(t)) {
    const auto& ill = std::get<gc::IllTyped>(t);
    std::cerr << "ill-typed (" << gc::to_string(ill.clause)
              << (ill.role.empty() ? "" : ", role " + ill.role) << "): " << ill.message << "\n";
    if (ill.conformance && !quiet_trace) std::cerr << gc::render_trace(*ill.conformance);
    return 1;
  }
  gc::TypeReport rep{name, std::get<gc::ComponentType>(t)};
  if (as_json)
    std::cout << gc::type_report_json(rep).dump(2) << "\n";
  else
    std::cout << gc::type_report_text(rep) << "\n";
  return 0;
}

int run_project(const std::string& file, const std::string& component,
                const std::string& role) {
  auto prog = load(file);
  if (!prog) return 1;
  std::string name;
  auto k = pick_component(*prog, component, name);
  if (!k) return 1;
  if (k->is_base()) {
    std::cerr << "component '" << name << "' is not a composite\n";
    return 1;
  }
  const auto& c = k->composite();
  auto r = gc::project(c.protocol, role, c.binders, prog->gamma.label_types);
  if (r.error) {
    std::cerr << "projection failed for label '" << r.error->label << "'\n";
    return 1;
  }
  std::cout << gc::to_string(r.protocol) << "\n";
  return 0;
}

int run_simulate(const std::string& file, const std::string& component, uint32_t steps,
                 uint64_t seed) {
  auto prog = load(file);
  if (!prog) return 1;
  std::string name;
  auto k = pick_component(*prog, component, name);
  if (!k) return 1;

  std::mt19937_64 rng(seed);
  gc::ComponentPtr cur = k;
  const auto sigs = prog->sig_table();
  for (uint32_t n = 0; n < steps; ++n) {
    auto ts = gc::enumerate(*cur, sigs, prog->gamma.port_types, n);
    if (ts.empty()) {
      std::cout << "STEP " << n << " <stuck> ;; " << gc::component_hash(*cur) << "\n";
      return 0;
    }
    const auto& tr = ts[rng() % ts.size()];
    cur = tr.target;
    std::cout << "STEP " << n << " " << gc::to_string(tr.label) << " ;; "
              << gc::component_hash(*cur) << "\n";
  }
  return 0;
}

int run_cosim(const std::string& file, bool generate_mode, uint64_t seeds, uint32_t depth,
              uint32_t tau, bool as_json) {
  gc::CosimReport total;
  if (generate_mode) {
    gc::GenConfig cfg;
    cfg.depth = depth;
    cfg.tau_budget = tau;
    for (uint64_t seed = 0; seed < seeds; ++seed) {
      auto gen = gc::generate(seed, cfg);
      if (!gen) {
        std::cerr << "generation failed for seed " << seed << "\n";
        return 1;
      }
      auto sr = gc::check_subject_reduction(*gen->component, gen->gamma, depth);
      sr.seeds = {seed};
      total.merge(sr);
      auto pg = gc::check_progress(*gen->component, gen->gamma, depth, tau);
      total.states_explored += pg.states_explored;
      total.edges_checked += pg.edges_checked;
      for (const auto& v : pg.violations) total.violations.push_back(v);
      for (const auto& v : pg.budget_exceeded) total.budget_exceeded.push_back(v);
    }
  } else {
    auto prog = load(file);
    if (!prog) return 1;
    auto k = prog->entry_component();
    auto sr = gc::check_subject_reduction(*k, prog->gamma, depth);
    total.merge(sr);
    auto pg = gc::check_progress(*k, prog->gamma, depth, tau);
    total.states_explored += pg.states_explored;
    total.edges_checked += pg.edges_checked;
    for (const auto& v : pg.violations) total.violations.push_back(v);
    for (const auto& v : pg.budget_exceeded) total.budget_exceeded.push_back(v);
  }
  if (as_json)
    std::cout << gc::to_json(total).dump(2) << "\n";
  else
    std::cout << gc::to_text(total);
  return total.violations.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"governed component type extraction and co-simulation"};
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "machine-readable output");

  std::string file, component, role;
  uint32_t steps = 20, depth = 6, tau = 16;
  uint64_t seed = 0, seeds = 100;
  bool generate_mode = false;

  auto* check = app.add_subcommand("check", "validate and type a program");
  check->add_option("file", file)->required();
  check->add_option("--component", component, "component to check (default: entry)");

  auto* type = app.add_subcommand("type", "print the extracted component type");
  type->add_option("file", file)->required();
  type->add_option("--component", component);

  auto* project = app.add_subcommand("project", "project the protocol onto a role");
  project->add_option("file", file)->required();
  project->add_option("--role", role)->required();
  project->add_option("--component", component);

  auto* simulate = app.add_subcommand("simulate", "random trace of the entry component");
  simulate->add_option("file", file)->required();
  simulate->add_option("--steps", steps);
  simulate->add_option("--seed", seed);

  auto* cosim = app.add_subcommand("cosim", "co-simulate components against their types");
  cosim->add_option("file", file);
  cosim->add_flag("--generate", generate_mode, "run on generated components");
  cosim->add_option("--seeds", seeds);
  cosim->add_option("--depth", depth);
  cosim->add_option("--tau", tau);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << e.what() << "\n";
    return 2;
  }

  if (check->parsed()) return run_check(file, component, as_json, false);
  if (type->parsed()) return run_check(file, component, as_json, true);
  if (project->parsed()) return run_project(file, component, role);
  if (simulate->parsed()) return run_simulate(file, component, steps, seed);
  if (cosim->parsed()) {
    if (!generate_mode && file.empty()) {
      std::cerr << "cosim needs a file or --generate\n";
      return 2;
    }
    return run_cosim(file, generate_mode, seeds, depth, tau, as_json);
  }
  return 2;
}
