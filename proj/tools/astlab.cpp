// astlab: a workbench for finite abstract learning systems.
//
// Subcommands: check, homo, compose, theorems, dot. Exit codes: 0 on
// success, 1 when a check fails or nothing is found, 2 on usage or parse
// errors. Standard output carries results only; diagnostics go to standard
// error.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "astlab/dot.hpp"
#include "astlab/homomorphism.hpp"
#include "astlab/learning.hpp"
#include "astlab/model.hpp"
#include "astlab/parser.hpp"
#include "astlab/serializer.hpp"
#include "astlab/theorems.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;

using nlohmann::json;

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void print_diagnostics(const std::string& path,
                       const std::vector<astlab::Diagnostic>& diags) {
  for (const astlab::Diagnostic& d : diags)
    std::cerr << path << ":" << d.span.line << ":" << d.span.column << ": "
              << to_string(d.category) << ": " << d.message << "\n";
}

json diagnostics_json(const std::vector<astlab::Diagnostic>& diags) {
  json out = json::array();
  for (const astlab::Diagnostic& d : diags)
    out.push_back({{"category", to_string(d.category)},
                   {"line", d.span.line},
                   {"column", d.span.column},
                   {"length", d.span.length},
                   {"message", d.message}});
  return out;
}

/// Parses a file with the environment limits; on diagnostics, prints them to
/// stderr and returns nothing.
std::optional<astlab::Model> load_model(const std::string& path,
                                        std::vector<astlab::Diagnostic>* diags
                                            = nullptr) {
  auto text = read_file(path);
  if (!text) {
    std::cerr << "cannot read " << path << "\n";
    return std::nullopt;
  }
  astlab::ParseResult parsed =
      astlab::parse_model(*text, astlab::Limits::from_environment());
  if (diags) *diags = parsed.diagnostics;
  if (!parsed.ok()) {
    print_diagnostics(path, parsed.diagnostics);
    return std::nullopt;
  }
  astlab::Model m = std::move(parsed.model);
  // Model name: file stem.
  std::size_t slash = path.find_last_of('/');
  std::string stem = slash == std::string::npos ? path : path.substr(slash + 1);
  if (std::size_t dot = stem.find_last_of('.'); dot != std::string::npos)
    stem = stem.substr(0, dot);
  m.name = stem.empty() ? "model" : stem;
  return m;
}

/// Every check a model carries: component validation for declared systems,
/// the defining biconditional for every learning structure, and the declared
/// homomorphisms. Returns failure descriptions; empty means the model passes.
std::vector<std::string> run_model_checks(const astlab::Model& m) {
  std::vector<std::string> failures;
  const astlab::SetDirectory directory = m.set_directory();

  for (const auto& [name, sys] : m.systems) {
    // Derived systems carry fresh product sets, so they validate without
    // the declared-set directory.
    for (const astlab::ValidationIssue& issue : astlab::validate_system(
             sys.base, sys.declared ? &directory : nullptr))
      failures.push_back("system " + name + ": " + issue.detail);
  }

  auto guard = [&failures](const std::string& what, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      failures.push_back(what + ": " + e.what());
    }
  };

  for (const auto& [name, decl] : m.learnings)
    guard("learning " + name, [&, name = name] {
      astlab::LearningSystem ls = m.build_learning(name);
      if (auto v = astlab::biconditional_violation(ls))
        failures.push_back("learning " + name + ": " + *v);
    });
  for (const auto& [name, decl] : m.transfers)
    guard("transfer " + name, [&, name = name] {
      astlab::TransferLearningSystem tr = m.build_transfer_structure(name);
      if (auto v = astlab::biconditional_violation(tr.as_learning_system()))
        failures.push_back("transfer " + name + ": " + *v);
    });
  for (const auto& [name, decl] : m.multitasks)
    guard("multitask " + name, [&, name = name] {
      astlab::MultiTaskLearningSystem mt = m.build_multitask_structure(name);
      if (auto v = astlab::biconditional_violation(mt.joint()))
        failures.push_back("multitask " + name + ": " + *v);
    });
  for (const auto& [name, decl] : m.metas)
    guard("meta " + name, [&, name = name] {
      astlab::MetaLearningSystem meta = m.build_meta_structure(name);
      if (auto v = astlab::meta_invariant_violation(meta))
        failures.push_back("meta " + name + ": " + *v);
    });

  for (const auto& [name, decl] : m.homos)
    guard("homo " + name, [&, name = name, &decl = decl] {
      const astlab::AbstractSystem& from = m.system_named(decl.from).base;
      const astlab::AbstractSystem& to = m.system_named(decl.to).base;
      astlab::Morphism morphism;
      morphism.maps.resize(from.arity());
      for (std::size_t k = 0; k < from.arity(); ++k) {
        auto it = decl.maps.find(k);
        if (it == decl.maps.end()) {
          failures.push_back("homo " + name + ": no map for position " +
                             std::to_string(k));
          return;
        }
        morphism.maps[k] = it->second;
      }
      astlab::HomomorphismCheck check =
          astlab::verify_homomorphism(from, to, morphism);
      if (!check.holds)
        failures.push_back("homo " + name + ": " + check.witness);
    });

  return failures;
}

int cmd_check(const std::vector<std::string>& files, bool as_json) {
  bool any_fail = false;
  bool any_usage = false;
  json out{{"files", json::array()}};
  for (const std::string& path : files) {
    std::vector<astlab::Diagnostic> diags;
    auto text = read_file(path);
    if (!text) {
      std::cerr << "cannot read " << path << "\n";
      any_usage = true;
      continue;
    }
    astlab::ParseResult parsed =
        astlab::parse_model(*text, astlab::Limits::from_environment());
    if (!parsed.ok()) {
      print_diagnostics(path, parsed.diagnostics);
      if (as_json)
        out["files"].push_back({{"path", path},
                                {"status", "parse-error"},
                                {"diagnostics",
                                 diagnostics_json(parsed.diagnostics)}});
      else
        std::cout << "FAIL " << path << " (parse)\n";
      any_usage = true;
      continue;
    }
    std::vector<std::string> failures = run_model_checks(parsed.model);
    if (as_json) {
      out["files"].push_back({{"path", path},
                              {"status", failures.empty() ? "pass" : "fail"},
                              {"failures", failures}});
    } else if (failures.empty()) {
      std::cout << "PASS " << path << "\n";
    } else {
      std::cout << "FAIL " << path << "\n";
      for (const std::string& f : failures) std::cout << "  " << f << "\n";
    }
    any_fail |= !failures.empty();
  }
  if (as_json) std::cout << out.dump(2) << "\n";
  if (any_usage) return kUsage;
  return any_fail ? kCheckFailed : kOk;
}

/// Canonical morphism text: one line per component position, rho for input
/// positions and theta for output positions, entries sorted by source.
std::string render_morphism(const astlab::Morphism& m,
                            const astlab::InputOutputSystem& from) {
  std::string out;
  for (std::size_t k = 0; k < m.maps.size(); ++k) {
    const auto& ins = from.input_positions();
    const bool is_input = std::find(ins.begin(), ins.end(), k) != ins.end();
    out += (is_input ? "rho " : "theta ") + std::to_string(k) + " { ";
    bool first = true;
    for (const auto& [src, dst] : m.maps[k]) {
      if (!first) out += ", ";
      first = false;
      out += src.text() + " -> " + dst.text();
    }
    out += " }\n";
  }
  return out;
}

int cmd_homo(const std::string& file, const std::string& from,
             const std::string& to, std::uint64_t budget_assignments,
             double budget_seconds, bool as_json) {
  auto model = load_model(file);
  if (!model) return kUsage;
  astlab::SearchResult result{astlab::SearchOutcome::None, std::nullopt, 0};
  std::optional<astlab::InputOutputSystem> s1, s2;
  try {
    s1 = model->system_named(from).as_io();
    s2 = model->system_named(to).as_io();
  } catch (const astlab::UsageError& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  }
  try {
    result = astlab::find_homomorphism(
        *s1, *s2, astlab::SearchBudget{budget_assignments, budget_seconds},
        model->limits);
  } catch (const astlab::UsageError& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  }
  if (as_json) {
    json out;
    switch (result.outcome) {
      case astlab::SearchOutcome::Found: out["outcome"] = "found"; break;
      case astlab::SearchOutcome::None: out["outcome"] = "none"; break;
      case astlab::SearchOutcome::BudgetExhausted:
        out["outcome"] = "budget_exhausted";
        break;
    }
    out["assignments_explored"] = result.assignments_explored;
    if (result.morphism) {
      json maps = json::array();
      for (std::size_t k = 0; k < result.morphism->maps.size(); ++k) {
        const auto& ins = s1->input_positions();
        json entries = json::array();
        for (const auto& [src, dst] : result.morphism->maps[k])
          entries.push_back({{"from", src.text()}, {"to", dst.text()}});
        maps.push_back(
            {{"position", k},
             {"role", std::find(ins.begin(), ins.end(), k) != ins.end()
                          ? "rho"
                          : "theta"},
             {"entries", entries}});
      }
      out["maps"] = maps;
    }
    std::cout << out.dump(2) << "\n";
    return result.outcome == astlab::SearchOutcome::Found ? kOk : kCheckFailed;
  }
  switch (result.outcome) {
    case astlab::SearchOutcome::Found:
      std::cout << "FOUND\n" << render_morphism(*result.morphism, *s1);
      return kOk;
    case astlab::SearchOutcome::None:
      std::cout << "NONE\n";
      return kCheckFailed;
    case astlab::SearchOutcome::BudgetExhausted:
      std::cout << "BUDGET\n";
      return kCheckFailed;
  }
  return kCheckFailed;
}

/// Materializes a composed system into the model: its component sets become
/// declared sets (fresh names), the system a declared system.
void materialize(astlab::Model& m, const astlab::InputOutputSystem& sys) {
  std::vector<astlab::ComponentSet> comps;
  for (const astlab::ComponentSet& c : sys.base().components()) {
    std::string n = c.name();
    while (m.knows(n)) n += "_";
    comps.emplace_back(n, c.members());
    m.sets.emplace(n, comps.back());
  }
  m.systems.emplace(
      sys.name(),
      astlab::StoredSystem{
          astlab::AbstractSystem(sys.name(), std::move(comps),
                                 sys.relation()),
          astlab::IoPartition{sys.input_positions(), sys.output_positions()},
          true});
}

int cmd_compose(const std::string& file, const std::string& op,
                const std::vector<std::string>& operands,
                std::optional<std::size_t> z_left,
                std::optional<std::size_t> z_right, std::string out_name) {
  auto model = load_model(file);
  if (!model) return kUsage;
  if (model->knows(out_name)) {
    std::cerr << "name " << out_name << " already exists in the model\n";
    return kUsage;
  }
  try {
    astlab::InputOutputSystem a = model->system_named(operands[0]).as_io();
    astlab::InputOutputSystem b = model->system_named(operands[1]).as_io();
    if (op == "parallel") {
      materialize(*model,
                  parallel_connect(a, b, out_name, model->limits));
    } else {
      if (!z_left || !z_right) {
        std::cerr << "cascade requires --z-left and --z-right\n";
        return kUsage;
      }
      materialize(*model,
                  cascade_connect(a, b, astlab::CascadeBinding{*z_left,
                                                               *z_right},
                                  out_name, model->limits));
    }
  } catch (const astlab::ConstructionError& e) {
    std::cerr << e.what() << "\n";
    return kCheckFailed;
  } catch (const astlab::UsageError& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  }
  std::cout << astlab::serialize_model(*model);
  return kOk;
}

int cmd_theorems(std::vector<std::string> only, std::uint64_t seed,
                 std::optional<std::size_t> trials, std::size_t min_size,
                 std::size_t max_size, std::size_t tasks, bool mutate,
                 bool as_json) {
  if (only.empty()) only = {"T1", "T2", "T3", "FIG5"};
  std::vector<astlab::TheoremReport> reports;
  try {
    for (const std::string& which : only) {
      astlab::InstanceSpec spec;
      spec.seed = seed;
      spec.min_size = min_size;
      spec.max_size = max_size;
      spec.task_count = tasks;
      spec.mutate = mutate;
      if (which == "T1") {
        spec.trials = trials.value_or(100);
        reports.push_back(astlab::check_theorem1(spec));
      } else if (which == "T2") {
        spec.trials = trials.value_or(100);
        reports.push_back(astlab::check_theorem2(spec));
      } else if (which == "T3") {
        spec.trials = trials.value_or(100);
        reports.push_back(astlab::check_theorem3(spec));
      } else if (which == "FIG5") {
        spec.trials = trials.value_or(25);
        reports.push_back(astlab::check_figure5_chain(spec));
      } else {
        std::cerr << "unknown theorem id: " << which
                  << " (expected T1, T2, T3, or FIG5)\n";
        return kUsage;
      }
    }
  } catch (const astlab::UsageError& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  }
  bool all_passed = true;
  if (as_json) {
    json out{{"reports", json::array()}};
    for (const astlab::TheoremReport& r : reports) {
      json failures = json::array();
      for (const astlab::TrialFailure& f : r.failures)
        failures.push_back({{"trial", f.trial},
                            {"seed", f.seed},
                            {"stage", f.stage},
                            {"witness", f.witness}});
      json jr{{"theorem", astlab::to_string(r.theorem)},
              {"trials", r.trials},
              {"passes", r.passes},
              {"failures", failures}};
      if (r.theorem == astlab::TheoremId::T2)
        jr["controls"] = r.control_detections;
      out["reports"].push_back(std::move(jr));
      all_passed &= r.all_passed();
    }
    std::cout << out.dump(2) << "\n";
  } else {
    for (const astlab::TheoremReport& r : reports) {
      std::cout << astlab::render_report(r);
      all_passed &= r.all_passed();
    }
  }
  return all_passed ? kOk : kCheckFailed;
}

int cmd_dot(const std::string& file, const std::string& target,
            const std::string& level) {
  auto model = load_model(file);
  if (!model) return kUsage;
  try {
    std::string text = astlab::export_dot(
        *model, target,
        level == "elementary" ? astlab::DotLevel::Elementary
                              : astlab::DotLevel::Cascade);
    if (std::string problem = astlab::validate_dot(text); !problem.empty()) {
      std::cerr << "internal error: emitted DOT is malformed: " << problem
                << "\n";
      return kCheckFailed;
    }
    std::cout << text;
    return kOk;
  } catch (const astlab::UsageError& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"astlab: finite abstract learning systems workbench"};
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "machine-readable output");

  auto* check = app.add_subcommand("check", "parse and check model files");
  std::vector<std::string> check_files;
  check->add_option("files", check_files, "model files (.asl)")->required();

  auto* homo = app.add_subcommand("homo", "search for a homomorphism");
  std::string homo_file, homo_from, homo_to;
  std::uint64_t budget_assignments = 1'000'000;
  double budget_seconds = 30.0;
  homo->add_option("file", homo_file, "model file")->required();
  homo->add_option("--from", homo_from, "source system")->required();
  homo->add_option("--to", homo_to, "target system")->required();
  homo->add_option("--budget-assignments", budget_assignments,
                   "max candidate assignments");
  homo->add_option("--budget-seconds", budget_seconds, "max wall-clock time");

  auto* compose = app.add_subcommand("compose", "compose two systems");
  std::string compose_file, compose_op, compose_as;
  std::vector<std::string> compose_operands;
  std::optional<std::size_t> z_left, z_right;
  compose->add_option("file", compose_file, "model file")->required();
  compose->add_option("operands", compose_operands, "two system names")
      ->expected(2);
  compose->add_option("--op", compose_op, "parallel or cascade")
      ->required()
      ->check(CLI::IsMember({"parallel", "cascade"}));
  compose->add_option("--z-left", z_left,
                      "output position of the left operand carrying Z");
  compose->add_option("--z-right", z_right,
                      "input position of the right operand carrying Z");
  compose->add_option("--as", compose_as, "name of the composed system")
      ->required();

  auto* theorems = app.add_subcommand("theorems", "run the theorem suites");
  std::vector<std::string> only;
  std::uint64_t seed = 42;
  std::optional<std::size_t> trials;
  std::size_t min_size = 1, max_size = 4, tasks = 2;
  bool mutate = false;
  theorems->add_option("--only", only,
                       "subset of T1, T2, T3, FIG5 (default: all)")
      ->delimiter(',');
  theorems->add_option("--seed", seed, "random seed");
  theorems->add_option("--trials", trials,
                       "trials per theorem (default 100; FIG5 25)");
  theorems->add_option("--min-size", min_size, "min carrier size");
  theorems->add_option("--max-size", max_size, "max carrier size (<= 6)");
  theorems->add_option("--tasks", tasks, "task count for T2 (2..4)");
  theorems->add_flag("--mutate", mutate,
                     "single-tuple corruption negative control");

  auto* dot = app.add_subcommand("dot", "export a DOT diagram");
  std::string dot_file, dot_target, dot_level = "cascade";
  dot->add_option("file", dot_file, "model file")->required();
  dot->add_option("target", dot_target, "system or structure to draw")
      ->required();
  dot->add_option("--level", dot_level, "elementary or cascade")
      ->check(CLI::IsMember({"elementary", "cascade"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  }

  try {
    if (check->parsed()) return cmd_check(check_files, as_json);
    if (homo->parsed())
      return cmd_homo(homo_file, homo_from, homo_to, budget_assignments,
                      budget_seconds, as_json);
    if (compose->parsed())
      return cmd_compose(compose_file, compose_op, compose_operands, z_left,
                         z_right, compose_as);
    if (theorems->parsed())
      return cmd_theorems(only, seed, trials, min_size, max_size, tasks,
                          mutate, as_json);
    if (dot->parsed()) return cmd_dot(dot_file, dot_target, dot_level);
  } catch (const astlab::UsageError& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCheckFailed;
  }
  return kUsage;
}
