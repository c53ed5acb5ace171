#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "prpmi/bench.hpp"
#include "prpmi/heuristics.hpp"
#include "prpmi/model.hpp"
#include "prpmi/planning.hpp"
#include "prpmi/solver.hpp"

namespace prpmi::cli {

namespace {

struct GenerateArgs {
  int sources = 1;
  int destinations = 0;
  double dest_ratio = 4.33;
  double storage_ratio = 1.26;
  double magnitude = 85.0;
  std::string dissatisfaction = "low";
  int horizon = 7;
  std::uint64_t seed = 0;
  std::string output;
};

struct SolveArgs {
  std::string instance;
  std::string method;
  double limit = 60.0;
  std::optional<double> work_limit;
  std::optional<long> node_limit;
  double gap = 1e-6;
  double threshold = 100.0;
  std::string solver_command;
  bool seed_full = false;
  std::string output_dir = ".";
};

struct BenchArgs {
  int count = 16;
  std::uint64_t seed = 1;
  double limit = 60.0;
  std::vector<std::string> methods;
  int workers = 1;
  int horizon = 7;
  bool wall_clock = false;
  double threshold = 100.0;
  std::string solver_command;
  bool seed_full = false;
  std::string output_dir = "bench-out";
};

struct ExportArgs {
  std::string instance;
  std::string variant = "full";
  std::string output;
};

struct DotArgs {
  std::string instance;
  std::string output;
};

std::string version_string() {
  std::ostringstream os;
  os << "prpmi " << PRPMI_VERSION << " (instance schema " << kInstanceSchemaVersion << ", model schema "
     << kModelSchemaVersion << ")";
  return os.str();
}

int exit_code_for(SolveStatus s, bool has_solution) {
  if (has_solution) return kExitOk;
  switch (s) {
    case SolveStatus::NoIncumbent:
      return kExitNoIncumbent;
    case SolveStatus::Infeasible:
      return kExitInfeasible;
    default:
      return kExitError;
  }
}

nlohmann::json optional_number(std::optional<double> v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

nlohmann::json solution_json(const Instance& inst, const TimeExpandedGraph& teg, const MethodResult& r) {
  nlohmann::json j;
  j["schema"] = {{"instance", kInstanceSchemaVersion}, {"model", kModelSchemaVersion}};
  j["method"] = to_string(r.method);
  j["status"] = to_string(r.status);
  j["bound"] = optional_number(r.bound);
  j["gap"] = optional_number(r.gap());
  j["seconds"] = r.seconds;
  j["work_units"] = r.work;
  j["note"] = r.note;
  j["routing_from_greedy"] = r.fallback;
  if (!r.solution) {
    j["cost"] = nullptr;
    return j;
  }
  const FlowSolution& sol = *r.solution;
  const CostBreakdown& c = sol.cost;
  j["cost"] = {{"transport", c.transport},
               {"refill", c.refill},
               {"variable_dissatisfaction", c.variable_dissatisfaction},
               {"fixed_dissatisfaction", c.fixed_dissatisfaction},
               {"total", c.total()}};
  j["evaluated_total"] = evaluate_cost(inst, teg, sol).total();
  j["unmet_kg"] = total_unmet_demand(inst, sol);

  nlohmann::json deliveries = nlohmann::json::array(), refills = nlohmann::json::array();
  const int ns = teg.source_count(), nd = teg.destination_count();
  for (int day = 1; day <= inst.horizon; ++day) {
    const TimeIndex first = TimeIndex::first_part(day), second = TimeIndex::second_part(day);
    for (int d = 0; d < nd; ++d)
      for (int s = 0; s < ns; ++s) {
        const ArcId a = teg.source_to_dest(s, d, first);
        if (!sol.y[a]) continue;
        nlohmann::json e{{"day", day},
                         {"source", inst.sources[s].id},
                         {"destination", inst.destinations[d].id},
                         {"swap_hour", swap_hour(inst, teg, sol.y, d, day)},
                         {"delivered_kg", sol.f[a]}};
        for (int back = 0; back < ns; ++back) {
          const ArcId ret = teg.dest_to_source(d, back, second);
          if (sol.y[ret]) {
            e["return_source"] = inst.sources[back].id;
            e["returned_kg"] = sol.f[ret];
          }
        }
        deliveries.push_back(std::move(e));
      }
    for (int s = 0; s < ns; ++s) {
      const double kg = sol.refill[s * inst.horizon + day - 1];
      if (kg > 0.0) refills.push_back({{"day", day}, {"source", inst.sources[s].id}, {"kg", kg}});
    }
  }
  j["deliveries"] = std::move(deliveries);
  j["refills"] = std::move(refills);
  j["flow_count"] = check_flow_count(teg, sol.y);
  return j;
}

int cmd_generate(const GenerateArgs& a, std::ostream& out, std::ostream& err) {
  GenerationSpec spec;
  spec.n_sources = a.sources;
  spec.destinations = a.destinations;
  spec.dest_ratio = a.dest_ratio;
  spec.storage_ratio = a.storage_ratio;
  spec.demand_magnitude = a.magnitude;
  spec.dissatisfaction = a.dissatisfaction == "high" ? kHighDissatisfaction : kLowDissatisfaction;
  spec.horizon = a.horizon;
  spec.seed = a.seed;
  Instance inst;
  try {
    inst = generate_instance(spec);
  } catch (const ParameterError& e) {
    err << "generate: " << e.what() << "\n";
    return kExitUsage;
  }
  save_instance(inst, a.output);
  const auto problems = validate_instance(inst);
  if (problems.empty()) {
    err << "generate: " << a.output << " is valid (" << inst.source_count() << " sources, "
        << inst.destination_count() << " destinations, " << inst.storage_count() << " storages)\n";
  } else {
    for (const auto& v : problems) err << "generate: [" << v.assumption << "] " << v.message << "\n";
  }
  out << a.output << "\n";
  return problems.empty() ? kExitOk : kExitError;
}

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  const auto method = method_from_string(a.method);
  if (!method) {
    err << "solve: unknown method " << a.method << "\n";
    return kExitUsage;
  }
  Instance inst;
  try {
    inst = load_instance(a.instance);
  } catch (const std::exception& e) {
    err << "solve: " << e.what() << "\n";
    return kExitError;
  }
  const TimeExpandedGraph teg(inst);
  SolveLimits limits;
  limits.wall_clock = a.limit;
  limits.gap_tolerance = a.gap;
  limits.node_limit = a.node_limit;
  if (a.work_limit) limits.work_limit = *a.work_limit;
  GreedyConfig greedy;
  greedy.critical_threshold = a.threshold;
  SolverConfig solver;
  solver.external_command = a.solver_command;
  solver.seed_full = a.seed_full;

  MethodResult r;
  try {
    r = run_method(*method, inst, teg, limits, greedy, solver);
  } catch (const std::exception& e) {
    err << "solve: " << e.what() << "\n";
    return kExitError;
  }
  namespace fs = std::filesystem;
  fs::create_directories(a.output_dir);
  const fs::path sol_path = fs::path(a.output_dir) / "solution.json";
  {
    std::ofstream f(sol_path);
    f << solution_json(inst, teg, r).dump(2) << "\n";
  }
  if (!r.note.empty()) err << "solve: " << r.note << "\n";
  out << "status " << to_string(r.status) << "\n";
  if (r.solution) {
    char line[128];
    std::snprintf(line, sizeof line, "cost %.6f\n", r.cost());
    out << line;
    if (r.bound) {
      std::snprintf(line, sizeof line, "bound %.6f\ngap %.6f\n", *r.bound, r.gap().value_or(1.0));
      out << line;
    }
    try {
      const auto plans = derive_transport_plans(teg, *r.solution);
      const fs::path plan_path = fs::path(a.output_dir) / "plans.csv";
      save_plans_csv(plan_path, inst, teg, *r.solution, plans);
      out << "plans " << plans.size() << " " << plan_path.string() << "\n";
    } catch (const DecodeError& e) {
      err << "solve: cannot decode transport plans: " << e.what() << "\n";
      return kExitError;
    }
  }
  out << "solution " << sol_path.string() << "\n";
  return exit_code_for(r.status, r.solution.has_value());
}

int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  BenchOptions o;
  o.methods.clear();
  for (const auto& name : a.methods) {
    const auto m = method_from_string(name);
    if (!m) {
      err << "bench: unknown method " << name << "\n";
      return kExitUsage;
    }
    o.methods.push_back(*m);
  }
  std::sort(o.methods.begin(), o.methods.end());
  o.methods.erase(std::unique(o.methods.begin(), o.methods.end()), o.methods.end());
  o.limit_seconds = a.limit;
  o.deterministic = !a.wall_clock;
  o.workers = a.workers;
  o.greedy.critical_threshold = a.threshold;
  o.solver.external_command = a.solver_command;
  o.solver.seed_full = a.seed_full;

  std::vector<SuiteInstance> suite;
  try {
    suite = build_suite(a.seed, a.count, a.horizon);
  } catch (const std::invalid_argument& e) {
    err << "bench: " << e.what() << "\n";
    return kExitUsage;
  }
  err << "bench: " << suite.size() << " instances x " << o.methods.size() << " methods\n";
  const auto records = run_suite(suite, o);
  write_bench_outputs(a.output_dir, records);
  for (const auto& r : records)
    if (r.status == SolveStatus::Error) err << "bench: " << r.instance_id << " " << to_string(r.method) << ": " << r.note << "\n";
  if (o.methods.size() == 3) {
    const TrendCheck t = trend_check(records);
    err << "bench: median min(MA, RH) " << t.median_best_exact << " vs GH " << t.median_greedy << " -> "
        << (t.median_holds ? "holds" : "violated") << "\n";
    err << "bench: mean gap on " << t.largest_bin << ": RH " << t.mean_gap_rh << " vs MA " << t.mean_gap_ma << " -> "
        << (t.gap_holds ? "holds" : "violated") << "\n";
    for (const auto& line : t.log) err << "bench: " << line << "\n";
  }
  out << (std::filesystem::path(a.output_dir) / "records.csv").string() << "\n";
  return kExitOk;
}

int cmd_export(const ExportArgs& a, std::ostream& out, std::ostream& err) {
  try {
    const Instance inst = load_instance(a.instance);
    const TimeExpandedGraph teg(inst);
    const BuiltModel built = a.variant == "relaxed" ? build_relaxed_model(inst, teg) : build_full_model(inst, teg);
    export_lp(built.milp, a.output);
    err << "export-lp: " << built.milp.variable_count() << " variables, " << built.milp.constraint_count()
        << " rows\n";
  } catch (const std::exception& e) {
    err << "export-lp: " << e.what() << "\n";
    return kExitError;
  }
  out << a.output << "\n";
  return kExitOk;
}

int cmd_dot(const DotArgs& a, std::ostream& out, std::ostream& err) {
  try {
    const Instance inst = load_instance(a.instance);
    const TimeExpandedGraph teg(inst);
    if (a.output.empty()) {
      out << teg.to_dot();
    } else {
      std::ofstream f(a.output);
      if (!f) throw std::runtime_error("cannot write " + a.output);
      f << teg.to_dot();
    }
  } catch (const std::exception& e) {
    err << "dot: " << e.what() << "\n";
    return kExitError;
  }
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Production routing with mobile inventories: models, solvers, heuristics and benchmarks", "prpmi"};
  app.set_version_flag("--version", version_string());
  app.set_config("--config", "", "Read option values from a TOML or INI file");
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Generate an instance file");
  g->add_option("--sources", gen.sources, "Number of sources")->check(CLI::Range(1, 7));
  g->add_option("--destinations", gen.destinations, "Destination count; 0 derives it from the ratio");
  g->add_option("--dest-ratio", gen.dest_ratio, "Destinations per source")->check(CLI::Range(4.33, 8.5));
  g->add_option("--storage-ratio", gen.storage_ratio, "Storages per destination")->check(CLI::Range(1.26, 1.5));
  g->add_option("--magnitude", gen.magnitude, "Daily demand magnitude in kg (85 or 130)")
      ->check(CLI::IsMember({85.0, 130.0}));
  g->add_option("--dissatisfaction", gen.dissatisfaction, "Dissatisfaction profile")
      ->check(CLI::IsMember({"low", "high"}));
  g->add_option("--horizon", gen.horizon, "Days")->check(CLI::NonNegativeNumber);
  g->add_option("--seed", gen.seed, "Random seed");
  g->add_option("-o,--output", gen.output, "Instance file to write")->required();

  SolveArgs sv;
  auto* s = app.add_subcommand("solve", "Solve an instance with MA, RH or GH");
  s->add_option("--instance", sv.instance, "Instance file")->required()->check(CLI::ExistingFile);
  s->add_option("--method", sv.method, "ma, rh or gh")->required()->check(CLI::IsMember({"ma", "rh", "gh"}, CLI::ignore_case));
  s->add_option("--limit", sv.limit, "Wall-clock limit per method in seconds")->check(CLI::PositiveNumber);
  s->add_option("--work-limit", sv.work_limit, "Deterministic effort limit in work units")->check(CLI::PositiveNumber);
  s->add_option("--node-limit", sv.node_limit, "Branch-and-bound node limit")->check(CLI::PositiveNumber);
  s->add_option("--gap", sv.gap, "Relative gap tolerance")->check(CLI::Range(0.0, 1.0));
  s->add_option("--threshold", sv.threshold, "GH critical stock threshold in kg")->check(CLI::NonNegativeNumber);
  s->add_option("--solver-command", sv.solver_command, "External MILP solver executable");
  s->add_flag("--seed-full", sv.seed_full, "Start MA from the GH routing");
  s->add_option("--output-dir", sv.output_dir, "Directory for solution.json and plans.csv");

  BenchArgs bn;
  auto* b = app.add_subcommand("bench", "Run the benchmark suite");
  b->add_option("--count", bn.count, "Number of instances (at least 4)")->check(CLI::Range(4, 100000));
  b->add_option("--seed", bn.seed, "Suite seed");
  b->add_option("--limit", bn.limit, "Nominal limit per method in seconds")->check(CLI::PositiveNumber);
  b->add_option("--methods", bn.methods, "Comma-separated methods: ma,rh,gh")->required()->delimiter(',');
  b->add_option("--workers", bn.workers, "Concurrent jobs")->check(CLI::Range(1, 256));
  b->add_option("--horizon", bn.horizon, "Days per instance")->check(CLI::NonNegativeNumber);
  b->add_flag("--wall-clock", bn.wall_clock, "Use wall-clock limits instead of deterministic work limits");
  b->add_option("--threshold", bn.threshold, "GH critical stock threshold in kg")->check(CLI::NonNegativeNumber);
  b->add_option("--solver-command", bn.solver_command, "External MILP solver executable");
  b->add_flag("--seed-full", bn.seed_full, "Start MA from the GH routing");
  b->add_option("--output-dir", bn.output_dir, "Directory for the CSV outputs");

  ExportArgs ex;
  auto* e = app.add_subcommand("export-lp", "Write the model of an instance as an LP file");
  e->add_option("--instance", ex.instance, "Instance file")->required()->check(CLI::ExistingFile);
  e->add_option("--variant", ex.variant, "full or relaxed")->check(CLI::IsMember({"full", "relaxed"}));
  e->add_option("--output", ex.output, "LP file to write")->required();

  DotArgs dt;
  auto* d = app.add_subcommand("dot", "Write the time-expanded graph in Graphviz format");
  d->add_option("--instance", dt.instance, "Instance file")->required()->check(CLI::ExistingFile);
  d->add_option("--output", dt.output, "File to write; stdout when absent");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& pe) {
    const int code = app.exit(pe, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (g->parsed()) return cmd_generate(gen, out, err);
    if (s->parsed()) return cmd_solve(sv, out, err);
    if (b->parsed()) return cmd_bench(bn, out, err);
    if (e->parsed()) return cmd_export(ex, out, err);
    if (d->parsed()) return cmd_dot(dt, out, err);
  } catch (const std::exception& ex_) {
    err << "prpmi: " << ex_.what() << "\n";
    return kExitError;
  }
  return kExitUsage;
}

}  // namespace prpmi::cli
