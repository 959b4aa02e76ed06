// demo2pddl: learn operators from demonstration traces, emit PDDL, plan and
// execute with replanning.
//
// Exit codes: 0 ok, 2 unsolvable, 3 invalid input, 4 resource limit,
// 5 execution failure, 1 anything else.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "demo2pddl/demo2pddl.hpp"

namespace fs = std::filesystem;
using namespace demo2pddl;

namespace {

enum Exit { kOk = 0, kOther = 1, kUnsolvable = 2, kInvalid = 3, kLimit = 4, kExecFailed = 5 };

// Defaults < config file < command-line flags.
struct Settings {
  std::string rules;
  std::size_t debounce = 2;
  std::size_t node_limit = 10'000'000;
  bool hmax = false;
  bool allow_repeated_bindings = false;
  std::size_t max_replans = 5;
  std::string costs = "count";
  std::string out;
};

void apply_config(Settings& s, const fs::path& path) {
  const json j = json_io::read_file(path);
  if (!j.is_object()) throw ParseError(path.string() + ": config must be an object");
  try {
    if (j.contains("rules")) s.rules = j.at("rules").get<std::string>();
    if (j.contains("debounce")) s.debounce = j.at("debounce").get<std::size_t>();
    if (j.contains("node_limit")) s.node_limit = j.at("node_limit").get<std::size_t>();
    if (j.contains("hmax")) s.hmax = j.at("hmax").get<bool>();
    if (j.contains("allow_repeated_bindings"))
      s.allow_repeated_bindings = j.at("allow_repeated_bindings").get<bool>();
    if (j.contains("max_replans")) s.max_replans = j.at("max_replans").get<std::size_t>();
    if (j.contains("costs")) s.costs = j.at("costs").get<std::string>();
    if (j.contains("out")) s.out = j.at("out").get<std::string>();
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

fs::path out_dir(const Settings& s) {
  fs::path dir = ".";
  if (const char* env = std::getenv("DEMO2PDDL_OUT"); env && *env) dir = env;
  if (!s.out.empty()) dir = s.out;
  fs::create_directories(dir);
  return dir;
}

LearnOptions learn_options(const Settings& s) {
  LearnOptions o;
  if (!s.rules.empty()) o.rules = load_rules(s.rules);
  o.debounce.window = s.debounce;
  return o;
}

CostModel costs_for(const OperatorLibrary& lib, const Settings& s) {
  if (s.costs == "count") return derive_costs(lib);
  if (s.costs == "unit") return unit_costs(lib);
  throw ValidationError("unknown cost model '" + s.costs + "' (count|unit)");
}

SearchOptions search_options(const Settings& s) { return {s.node_limit, s.hmax}; }

OperatorLibrary load_or_empty(const fs::path& p) {
  return fs::exists(p) ? load_library(p) : OperatorLibrary{};
}

// Library, scene and goal in their original spelling, ready to search.
struct Task {
  Schema schema;
  Scene scene;
  std::vector<Literal> goal;
  std::vector<GroundedAction> actions;
};

Task make_task(const OperatorLibrary& lib, const Scene& scene,
               const std::vector<Literal>& goal, const Settings& s) {
  Task t{{lib.vocabulary(), lib.types()}, scene, goal, {}};
  try {
    t.schema.types.absorb_types(scene.types.types_only());
    for (const auto& o : scene.objects) t.schema.types.add_instance(o.id, o.type_id);
  } catch (const SchemaError& e) {
    throw ValidationError(std::string("scene: ") + e.what());
  }
  for (const auto& a : scene.init.true_atoms) check_atom(t.schema, a);
  for (const auto& l : goal) check_atom(t.schema, l.atom);
  t.actions = ground(schemas_from_library(lib, costs_for(lib, s)), t.schema.types,
                     scene.objects, {s.allow_repeated_bindings});
  return t;
}

std::vector<Literal> read_goal(const std::string& arg) {
  if (fs::exists(arg)) {
    const json j = json_io::read_file(arg);
    return goal_from_json(j.is_object() && j.contains("goal") ? j.at("goal") : j);
  }
  return parse_goal(arg);
}

void write_plan(const fs::path& dir, const PlanResult& r) {
  json result = {{"status", r.solved() ? "solved" : "unsolvable"},
                 {"expanded", r.expanded},
                 {"generated", r.generated}};
  if (r.solved()) {
    result["total_cost"] = r.plan.total_cost;
    json_io::write_file(dir / "plan.json", plan_to_json(r.plan));
    json_io::write_text(dir / "plan.txt", plan_to_text(r.plan));
  } else {
    fs::remove(dir / "plan.json");
    json_io::write_text(dir / "plan.txt", "unsolvable\n");
  }
  json_io::write_file(dir / "result.json", result);
}

int report_plan(const PlanResult& r) {
  if (!r.solved()) {
    std::cout << "unsolvable (" << r.expanded << " states expanded)\n";
    return kUnsolvable;
  }
  std::cout << plan_to_text(r.plan);
  return kOk;
}

int run_learn(const std::vector<std::string>& traces, const fs::path& library,
              const std::string& report_path, const Settings& s) {
  OperatorLibrary lib = load_or_empty(library);
  const LearnOptions opts = learn_options(s);
  json reports = json::array();
  for (const auto& path : traces) {
    TraceReport r = learn_trace(lib, load_trace(path), opts, path);
    std::cout << to_text(r);
    reports.push_back(to_json(r));
  }
  save_library(lib, library);
  std::cout << "library: " << lib.size() << " operator(s) -> " << library.string() << "\n";
  if (!report_path.empty()) json_io::write_file(report_path, reports);
  return kOk;
}

int run_emit(const fs::path& library, const std::string& init, const std::string& goal,
             const std::string& name, const Settings& s) {
  const OperatorLibrary lib = load_library(library);
  const fs::path dir = out_dir(s);
  json_io::write_text(dir / "domain.pddl", pddl::emit_domain(lib, costs_for(lib, s), name));
  std::cout << "wrote " << (dir / "domain.pddl").string() << "\n";
  if (!init.empty() && !goal.empty()) {
    const Task t = make_task(lib, load_scene(init), read_goal(goal), s);
    json_io::write_text(dir / "problem.pddl",
                        pddl::emit_problem(t.schema, t.scene.objects, t.scene.init,
                                           t.goal, "task", name));
    std::cout << "wrote " << (dir / "problem.pddl").string() << "\n";
  }
  return kOk;
}

struct PlanArgs {
  std::string library, domain, problem, init, goal;
};

int run_plan(const PlanArgs& a, const Settings& s) {
  const fs::path dir = out_dir(s);
  const bool from_library = !a.library.empty();
  if (from_library == !a.domain.empty())
    throw ValidationError("give exactly one of --library or --domain");
  const bool from_problem = !a.problem.empty();
  if (from_problem == !(a.init.empty() && a.goal.empty()))
    throw ValidationError("give either --problem or --init with --goal");
  if (!from_problem && (a.init.empty() || a.goal.empty()))
    throw ValidationError("--init and --goal go together");

  PlanResult r;
  if (from_library && !from_problem) {
    const OperatorLibrary lib = load_library(a.library);
    const Task t = make_task(lib, load_scene(a.init), read_goal(a.goal), s);
    r = find_plan(t.actions, t.scene.init, t.goal, search_options(s));
  } else {
    // Everything in PDDL spelling.
    pddl::DomainDoc domain;
    if (from_library) {
      const OperatorLibrary lib = load_library(a.library);
      domain = pddl::domain_doc(lib, costs_for(lib, s));
    } else {
      domain = pddl::parse_domain(json_io::read_text(a.domain));
    }
    pddl::ProblemDoc problem;
    if (from_problem) {
      problem = pddl::parse_problem(json_io::read_text(a.problem));
    } else {
      const Scene scene = load_scene(a.init);
      Schema schema{pddl::vocabulary(domain), pddl::type_table(domain)};
      // Scene and goal are spelled like the traces; map them over.
      Scene lowered;
      for (const auto& o : scene.objects)
        lowered.objects.push_back({pddl_identifier(o.id), pddl_identifier(o.type_id)});
      auto lower = [](const Atom& x) {
        Atom y{pddl_identifier(x.predicate), {}};
        for (const auto& arg : x.args) y.args.push_back(pddl_identifier(arg));
        return y;
      };
      for (const auto& x : scene.init.true_atoms) lowered.init.true_atoms.insert(lower(x));
      std::vector<Literal> goal;
      for (const auto& l : read_goal(a.goal)) goal.push_back({lower(l.atom), l.positive});
      problem = pddl::problem_doc(schema, lowered.objects, lowered.init, goal, "task",
                                  domain.name);
    }
    const pddl::GroundTask task =
        pddl::ground_task(domain, problem, {s.allow_repeated_bindings});
    r = find_plan(task.actions, task.init, task.goal, search_options(s));
  }
  write_plan(dir, r);
  return report_plan(r);
}

int finish_execution(const fs::path& dir, const ExecutionLog& log) {
  json_io::write_file(dir / "log.json", to_json(log));
  json_io::write_text(dir / "log.txt", transcript(log));
  std::cout << transcript(log);
  return log.outcome == Outcome::success ? kOk : kExecFailed;
}

std::vector<Fault> read_faults(const std::string& path, const Schema& schema) {
  if (path.empty()) return {};
  std::vector<Fault> faults = faults_from_json(json_io::read_file(path));
  check_faults(schema, faults);
  return faults;
}

int run_execute(const fs::path& library, const std::string& plan_path,
                const std::string& init, const std::string& goal,
                const std::string& faults_path, const Settings& s) {
  const OperatorLibrary lib = load_library(library);
  const Task t = make_task(lib, load_scene(init), read_goal(goal), s);
  Plan plan;
  if (!plan_path.empty()) {
    plan = plan_from_json(json_io::read_file(plan_path), t.actions);
  } else {
    PlanResult r = find_plan(t.actions, t.scene.init, t.goal, search_options(s));
    if (!r.solved()) return report_plan(r);
    plan = r.plan;
  }
  WorldSim sim(t.scene.init, read_faults(faults_path, t.schema));
  const ExecutionLog log =
      execute(plan, sim, t.goal, t.actions, {s.max_replans, search_options(s)});
  return finish_execution(out_dir(s), log);
}

int run_pipeline(const std::vector<std::string>& traces, const std::string& init,
                 const std::string& goal, const std::string& faults_path,
                 const Settings& s) {
  const fs::path dir = out_dir(s);
  OperatorLibrary lib;
  const LearnOptions opts = learn_options(s);
  json reports = json::array();
  std::optional<Scene> first_scene;
  for (const auto& path : traces) {
    const Trace trace = load_trace(path);
    if (!first_scene)
      first_scene = Scene{trace.objects, trace.types, trace.frames.front().state};
    TraceReport r = learn_trace(lib, trace, opts, path);
    std::cout << to_text(r);
    reports.push_back(to_json(r));
  }
  save_library(lib, dir / "library.json");
  json_io::write_file(dir / "report.json", reports);

  const Scene scene = init.empty() ? *first_scene : load_scene(init);
  const Task t = make_task(lib, scene, read_goal(goal), s);
  const CostModel costs = costs_for(lib, s);
  json_io::write_text(dir / "domain.pddl", pddl::emit_domain(lib, costs));
  json_io::write_text(dir / "problem.pddl",
                      pddl::emit_problem(t.schema, t.scene.objects, t.scene.init, t.goal));

  const PlanResult r = find_plan(t.actions, t.scene.init, t.goal, search_options(s));
  write_plan(dir, r);
  if (!r.solved()) return report_plan(r);
  std::cout << "plan:\n" << plan_to_text(r.plan);
  WorldSim sim(t.scene.init, read_faults(faults_path, t.schema));
  const ExecutionLog log =
      execute(r.plan, sim, t.goal, t.actions, {s.max_replans, search_options(s)});
  std::cout << "execution:\n";
  return finish_execution(dir, log);
}

int run_generate(const fs::path& dir, std::optional<std::uint64_t> seed, double rate) {
  fs::create_directories(dir);
  json goals = json::object();
  for (const auto& demo : synth::generate_corpus()) {
    Trace t = demo.trace;
    if (seed) t = synth::inject_flicker(t, *seed, rate);
    const std::string name = t.meta.demonstrator + "_" + t.meta.scenario + ".json";
    save_trace(t, dir / name);
    goals[t.meta.scenario] = json_io::literals_to_json(demo.goal);
    std::cout << (dir / name).string() << "\n";
  }
  json_io::write_file(dir / "goals.json", goals);
  Scene scene{synth::stacking_objects(), synth::stacking_types(), synth::initial_state()};
  json_io::write_file(dir / "scene.json", to_json(scene));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learn PDDL operators from symbolic demonstrations, then plan and execute"};
  app.require_subcommand(1);
  Settings settings;
  std::string config;
  app.add_option("--config", config, "JSON settings file (flags override it)")
      ->check(CLI::ExistingFile);

  // Flags shared by several subcommands; registered per subcommand so they
  // can follow it on the command line.
  struct Flags {
    CLI::Option *rules, *debounce, *node_limit, *hmax, *repeated, *max_replans, *costs, *out;
  };
  Settings flag;
  auto add_common = [&](CLI::App* sub) {
    Flags f{};
    f.out = sub->add_option("--out", flag.out, "output directory (env DEMO2PDDL_OUT)");
    f.costs = sub->add_option("--costs", flag.costs, "cost model: count | unit");
    f.node_limit = sub->add_option("--node-limit", flag.node_limit, "search node limit");
    f.hmax = sub->add_flag("--hmax", flag.hmax, "A* with the h_max heuristic");
    f.repeated = sub->add_flag("--allow-repeated-bindings", flag.allow_repeated_bindings,
                               "let one object fill several parameters");
    f.max_replans = sub->add_option("--max-replans", flag.max_replans, "replanning budget");
    f.rules = sub->add_option("--rules", flag.rules, "classifier rules JSON");
    f.debounce = sub->add_option("--debounce", flag.debounce, "persistence window (frames)");
    return f;
  };
  std::vector<Flags> all_flags;

  std::vector<std::string> traces;
  std::string library, report, init, goal, plan, faults, domain, problem, name = "learned";
  std::string gen_dir;
  std::uint64_t seed = 0;
  double rate = 0.5;

  auto* learn = app.add_subcommand("learn", "add operators from traces to a library");
  learn->add_option("traces", traces, "trace JSON files")->required()->check(CLI::ExistingFile);
  learn->add_option("--library", library, "library JSON (created if missing)")->required();
  learn->add_option("--report", report, "write the per-trace report as JSON");
  all_flags.push_back(add_common(learn));

  auto* emit = app.add_subcommand("emit", "write domain.pddl (and problem.pddl)");
  emit->add_option("--library", library, "library JSON")->required();
  emit->add_option("--init", init, "scene JSON or trace for problem.pddl");
  emit->add_option("--goal", goal, "goal literals or JSON file");
  emit->add_option("--name", name, "domain name");
  all_flags.push_back(add_common(emit));

  auto* planc = app.add_subcommand("plan", "find a minimum-cost plan");
  PlanArgs pa;
  planc->add_option("--library", pa.library, "library JSON");
  planc->add_option("--domain", pa.domain, "domain.pddl");
  planc->add_option("--problem", pa.problem, "problem.pddl");
  planc->add_option("--init", pa.init, "scene JSON or trace");
  planc->add_option("--goal", pa.goal, "goal literals or JSON file");
  all_flags.push_back(add_common(planc));

  auto* exec = app.add_subcommand("execute", "run a plan against the simulator");
  exec->add_option("--library", library, "library JSON")->required();
  exec->add_option("--init", init, "scene JSON or trace")->required();
  exec->add_option("--goal", goal, "goal literals or JSON file")->required();
  exec->add_option("--plan", plan, "plan JSON (planned from --init if absent)");
  exec->add_option("--faults", faults, "fault script JSON");
  all_flags.push_back(add_common(exec));

  auto* pipe = app.add_subcommand("pipeline", "learn, emit, plan and execute in one go");
  pipe->add_option("traces", traces, "trace JSON files")->required()->check(CLI::ExistingFile);
  pipe->add_option("--goal", goal, "goal literals or JSON file")->required();
  pipe->add_option("--init", init, "scene JSON (default: first frame of the first trace)");
  pipe->add_option("--faults", faults, "fault script JSON");
  all_flags.push_back(add_common(pipe));

  auto* gen = app.add_subcommand("generate-traces", "write the synthetic stacking corpus");
  gen->add_option("--out-dir", gen_dir, "directory")->required();
  auto* seed_opt = gen->add_option("--noise-seed", seed, "inject flicker with this seed");
  gen->add_option("--rate", rate, "flicker probability per atom and window");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (!config.empty()) apply_config(settings, config);
    for (const auto& f : all_flags) {
      if (f.rules->count()) settings.rules = flag.rules;
      if (f.debounce->count()) settings.debounce = flag.debounce;
      if (f.node_limit->count()) settings.node_limit = flag.node_limit;
      if (f.hmax->count()) settings.hmax = true;
      if (f.repeated->count()) settings.allow_repeated_bindings = true;
      if (f.max_replans->count()) settings.max_replans = flag.max_replans;
      if (f.costs->count()) settings.costs = flag.costs;
      if (f.out->count()) settings.out = flag.out;
    }

    if (*learn) return run_learn(traces, library, report, settings);
    if (*emit) return run_emit(library, init, goal, name, settings);
    if (*planc) return run_plan(pa, settings);
    if (*exec) return run_execute(library, plan, init, goal, faults, settings);
    if (*pipe) return run_pipeline(traces, init, goal, faults, settings);
    if (*gen)
      return run_generate(gen_dir,
                          seed_opt->count() ? std::optional<std::uint64_t>(seed)
                                            : std::nullopt,
                          rate);
  } catch (const SearchLimitExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kLimit;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kInvalid;
  } catch (const SyntaxError& e) {
    std::cerr << "pddl error: " << e.what() << "\n";
    return kInvalid;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalid;
  } catch (const TypeError& e) {
    std::cerr << "type error: " << e.what() << "\n";
    return kInvalid;
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kInvalid;
  } catch (const NoActorError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalid;
  } catch (const EmptyDomain& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalid;
  } catch (const InvalidEffect& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOther;
  }
  return kOther;
}
