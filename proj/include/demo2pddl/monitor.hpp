#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "demo2pddl/core.hpp"
#include "demo2pddl/json_io.hpp"
#include "demo2pddl/planner.hpp"

namespace demo2pddl {

enum class FaultMode {
  drop_effects,  // the action has no effect on the world
  perturb,       // the scripted adds/dels are applied instead of the action's
};

struct Fault {
  std::size_t step = 0;  // 0-based index over executed actions
  FaultMode mode = FaultMode::drop_effects;
  std::set<GroundAtom> adds;
  std::set<GroundAtom> dels;

  friend bool operator==(const Fault&, const Fault&) = default;
};

// Symbolic stand-in for the robot's world. Owned by one execution session.
class WorldSim {
 public:
  explicit WorldSim(State initial, std::vector<Fault> faults = {})
      : current_(std::move(initial)), faults_(std::move(faults)) {
    for (const auto& f : faults_)
      for (const auto& a : f.adds)
        if (f.dels.contains(a))
          throw InvalidEffect("fault at step " + std::to_string(f.step) +
                              " adds and deletes " + to_string(a));
  }

  const State& current() const { return current_; }

  // Executes `action` as the step_index-th action and returns the sensed
  // state. Preconditions are not checked here.
  State step(const GroundedAction& action, std::size_t step_index) {
    const Fault* fault = nullptr;
    for (const auto& f : faults_)
      if (f.step == step_index) fault = &f;
    if (!fault) {
      current_ = apply(current_, action.adds, action.dels);
    } else if (fault->mode == FaultMode::perturb) {
      current_ = apply(current_, fault->adds, fault->dels);
    }
    return current_;
  }

 private:
  State current_;
  std::vector<Fault> faults_;
};

struct MonitorConfig {
  std::size_t max_replans = 5;
  SearchOptions search;
};

struct StepRecord {
  std::size_t step = 0;
  GroundedAction action;
  State expected;
  State sensed;
  std::set<GroundAtom> missing;     // expected but not sensed
  std::set<GroundAtom> unexpected;  // sensed but not expected

  bool discrepancy() const { return !missing.empty() || !unexpected.empty(); }
};

struct ReplanEvent {
  std::size_t step = 0;  // executed actions before the replan
  std::string reason;    // "precondition" | "discrepancy" | "incomplete"
  bool solved = false;
  Plan plan;
};

enum class Outcome { success, failure_unsolvable, failure_budget, failure_search_limit };

inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::success: return "success";
    case Outcome::failure_unsolvable: return "failure(unsolvable)";
    case Outcome::failure_budget: return "failure(replan budget exhausted)";
    case Outcome::failure_search_limit: return "failure(search limit)";
  }
  return "?";
}

struct ExecutionLog {
  std::vector<StepRecord> steps;
  std::vector<ReplanEvent> replans;
  Outcome outcome = Outcome::success;
  State final_state;
};

// Dispatches `plan` action by action against `sim`. Preconditions are
// checked on the sensed state before each action and the sensed state is
// compared to the model's prediction after it; either failure triggers a
// replan to `goal` from the sensed state, bounded by cfg.max_replans.
inline ExecutionLog execute(const Plan& plan, WorldSim& sim,
                            const std::vector<Literal>& goal,
                            const std::vector<GroundedAction>& actions,
                            const MonitorConfig& cfg = {}) {
  ExecutionLog log;
  Plan current = plan;
  std::size_t next = 0;
  std::size_t executed = 0;

  // Returns false when execution must stop.
  auto replan = [&](const std::string& reason) {
    if (log.replans.size() >= cfg.max_replans) {
      log.outcome = Outcome::failure_budget;
      return false;
    }
    ReplanEvent ev{executed, reason, false, {}};
    try {
      PlanResult r = find_plan(actions, sim.current(), goal, cfg.search);
      ev.solved = r.solved();
      ev.plan = r.plan;
    } catch (const SearchLimitExceeded&) {
      log.replans.push_back(std::move(ev));
      log.outcome = Outcome::failure_search_limit;
      return false;
    }
    log.replans.push_back(ev);
    if (!ev.solved) {
      log.outcome = Outcome::failure_unsolvable;
      return false;
    }
    current = std::move(ev.plan);
    next = 0;
    return true;
  };

  while (true) {
    if (next == current.actions.size()) {
      if (holds_all(sim.current(), goal)) {
        log.outcome = Outcome::success;
        break;
      }
      if (!replan("incomplete")) break;
      continue;
    }
    const GroundedAction& action = current.actions[next];
    if (!holds_all(sim.current(), action.pre)) {
      if (!replan("precondition")) break;
      continue;
    }
    StepRecord rec;
    rec.step = executed;
    rec.action = action;
    rec.expected = apply(sim.current(), action.adds, action.dels);
    rec.sensed = sim.step(action, executed);
    ++executed;
    ++next;
    std::set_difference(rec.expected.true_atoms.begin(), rec.expected.true_atoms.end(),
                        rec.sensed.true_atoms.begin(), rec.sensed.true_atoms.end(),
                        std::inserter(rec.missing, rec.missing.end()));
    std::set_difference(rec.sensed.true_atoms.begin(), rec.sensed.true_atoms.end(),
                        rec.expected.true_atoms.begin(), rec.expected.true_atoms.end(),
                        std::inserter(rec.unexpected, rec.unexpected.end()));
    const bool diverged = rec.discrepancy();
    log.steps.push_back(std::move(rec));
    if (diverged) {
      if (holds_all(sim.current(), goal)) {
        log.outcome = Outcome::success;
        break;
      }
      if (!replan("discrepancy")) break;
    }
  }
  log.final_state = sim.current();
  return log;
}

// Either a bare array of faults or {"faults": [...]}.
inline std::vector<Fault> faults_from_json(const json& j) {
  using namespace json_io;
  std::vector<Fault> out;
  const json& list = j.is_object() ? require(j, "faults", "fault script") : j;
  for (const auto& f : require_array(list, "faults")) {
    Fault fault;
    const json& step = require(f, "step", "fault");
    if (!step.is_number_integer() || step.get<long long>() < 0)
      throw ParseError("fault.step: expected a non-negative integer");
    fault.step = step.get<std::size_t>();
    std::string mode = require_string(require(f, "mode", "fault"), "fault.mode");
    if (mode == "drop_effects")
      fault.mode = FaultMode::drop_effects;
    else if (mode == "perturb")
      fault.mode = FaultMode::perturb;
    else
      throw ParseError("fault.mode: unknown mode '" + mode + "'");
    if (f.contains("adds"))
      for (const auto& a : require_array(f.at("adds"), "fault.adds"))
        fault.adds.insert(atom_from_json(a, "fault.adds"));
    if (f.contains("dels"))
      for (const auto& a : require_array(f.at("dels"), "fault.dels"))
        fault.dels.insert(atom_from_json(a, "fault.dels"));
    out.push_back(std::move(fault));
  }
  return out;
}

inline json faults_to_json(const std::vector<Fault>& faults) {
  json out = json::array();
  for (const auto& f : faults)
    out.push_back({{"step", f.step},
                   {"mode", f.mode == FaultMode::perturb ? "perturb" : "drop_effects"},
                   {"adds", json_io::atoms_to_json(f.adds)},
                   {"dels", json_io::atoms_to_json(f.dels)}});
  return out;
}

// Perturbation atoms must type-check against `schema` (with instances).
inline void check_faults(const Schema& schema, const std::vector<Fault>& faults) {
  for (const auto& f : faults)
    for (const auto* atoms : {&f.adds, &f.dels})
      for (const auto& a : *atoms) {
        try {
          check_atom(schema, a);
        } catch (const TypeError& e) {
          throw ValidationError("fault at step " + std::to_string(f.step) + ": " +
                                e.what());
        }
      }
}

inline json to_json(const ExecutionLog& log) {
  json steps = json::array();
  for (const auto& s : log.steps)
    steps.push_back({{"step", s.step},
                     {"action", s.action.name},
                     {"args", s.action.args},
                     {"expected", json_io::atoms_to_json(s.expected.true_atoms)},
                     {"sensed", json_io::atoms_to_json(s.sensed.true_atoms)},
                     {"missing", json_io::atoms_to_json(s.missing)},
                     {"unexpected", json_io::atoms_to_json(s.unexpected)}});
  json replans = json::array();
  for (const auto& r : log.replans)
    replans.push_back({{"step", r.step},
                       {"reason", r.reason},
                       {"solved", r.solved},
                       {"plan", plan_to_json(r.plan)}});
  return {{"outcome", to_string(log.outcome)},
          {"steps", steps},
          {"replans", replans},
          {"final_state", json_io::atoms_to_json(log.final_state.true_atoms)}};
}

inline std::string transcript(const ExecutionLog& log) {
  std::string out;
  std::size_t r = 0;
  auto replans_before = [&](std::size_t step) {
    for (; r < log.replans.size() && log.replans[r].step <= step; ++r) {
      const auto& ev = log.replans[r];
      out += "  replan (" + ev.reason + "): " +
             (ev.solved ? std::to_string(ev.plan.actions.size()) + " action(s), cost " +
                              std::to_string(ev.plan.total_cost)
                        : std::string("no plan")) +
             "\n";
    }
  };
  for (const auto& s : log.steps) {
    replans_before(s.step);
    out += "step " + std::to_string(s.step) + ": " + to_string(s.action) + "\n";
    for (const auto& a : s.missing) out += "  missing    " + to_string(a) + "\n";
    for (const auto& a : s.unexpected) out += "  unexpected " + to_string(a) + "\n";
  }
  replans_before(static_cast<std::size_t>(-1));
  out += std::string("outcome: ") + to_string(log.outcome) + "\n";
  return out;
}

}  // namespace demo2pddl
