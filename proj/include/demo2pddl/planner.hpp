#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "demo2pddl/core.hpp"
#include "demo2pddl/json_io.hpp"
#include "demo2pddl/learning.hpp"

namespace demo2pddl {

// Lifted action in planner form: preconditions plus an add/delete delta.
struct ActionSchema {
  std::string name;
  std::vector<Parameter> params;
  std::vector<Literal> pre;
  std::vector<Atom> adds;
  std::vector<Atom> dels;
  std::uint64_t cost = 1;

  friend bool operator==(const ActionSchema&, const ActionSchema&) = default;
};

// Per-operator cost, keyed by canonical operator key.
struct CostModel {
  std::map<std::string, std::uint64_t> by_key;

  std::uint64_t at(const std::string& key) const {
    auto it = by_key.find(key);
    if (it == by_key.end())
      throw SchemaError("no cost for operator key " + key);
    return it->second;
  }
  friend bool operator==(const CostModel&, const CostModel&) = default;
};

// cost = max_count - count + 1: the most demonstrated operator costs 1.
inline CostModel derive_costs(const OperatorLibrary& lib) {
  std::uint64_t max_count = 0;
  for (const auto& [_, op] : lib.operators())
    max_count = std::max(max_count, op.count);
  CostModel out;
  for (const auto& [k, op] : lib.operators())
    out.by_key[k] = max_count - op.count + 1;
  return out;
}

// Every operator costs 1 (ignores demonstration frequency).
inline CostModel unit_costs(const OperatorLibrary& lib) {
  CostModel out;
  for (const auto& [k, _] : lib.operators()) out.by_key[k] = 1;
  return out;
}

// Effects become the delta post \ pre.
inline ActionSchema to_schema(const LiftedOperator& op, std::string name,
                              std::uint64_t cost) {
  ActionSchema s{std::move(name), op.params,
                 std::vector<Literal>(op.pre.begin(), op.pre.end()), {}, {},
                 cost};
  for (const auto& l : op.post) {
    if (op.pre.contains(l)) continue;
    (l.positive ? s.adds : s.dels).push_back(l.atom);
  }
  return s;
}

inline std::vector<ActionSchema> schemas_from_library(
    const OperatorLibrary& lib, const CostModel& costs) {
  const auto names = lib.action_names();
  std::vector<ActionSchema> out;
  for (const auto& [k, op] : lib.operators())
    out.push_back(to_schema(op, names.at(k), costs.at(k)));
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.name < b.name; });
  return out;
}

struct GroundedAction {
  std::string name;
  std::vector<std::string> args;
  std::vector<Literal> pre;
  std::set<GroundAtom> adds;
  std::set<GroundAtom> dels;
  std::uint64_t cost = 1;

  friend bool operator==(const GroundedAction&, const GroundedAction&) = default;
};

inline std::string to_string(const GroundedAction& a) {
  return to_string(Atom{a.name, a.args});
}

struct GroundOptions {
  bool allow_repeated_bindings = false;
};

namespace detail {

inline std::vector<Literal> substitute(const std::vector<Literal>& lits,
                                       const std::map<std::string, std::string>& m) {
  std::vector<Literal> out;
  for (const auto& l : lits) out.push_back(rename(l, m));
  return out;
}

}  // namespace detail

// All type-consistent bindings, sorted by (name, args). Bindings whose
// preconditions contradict themselves or whose delta overlaps are skipped.
inline std::vector<GroundedAction> ground(
    const std::vector<ActionSchema>& schemas, const TypeTable& types,
    std::vector<ObjectInstance> objects, const GroundOptions& opts = {}) {
  std::sort(objects.begin(), objects.end());
  std::vector<GroundedAction> out;
  for (const auto& s : schemas) {
    std::vector<std::vector<const std::string*>> candidates;
    for (const auto& p : s.params) {
      candidates.emplace_back();
      for (const auto& o : objects)
        if (types.is_subtype(o.type_id, p.type)) candidates.back().push_back(&o.id);
    }
    std::vector<std::string> binding;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      if (i == s.params.size()) {
        std::map<std::string, std::string> m;
        for (std::size_t j = 0; j < binding.size(); ++j)
          m[s.params[j].var] = binding[j];
        GroundedAction g{s.name, binding, detail::substitute(s.pre, m), {}, {},
                         s.cost};
        for (const auto& a : s.adds) g.adds.insert(detail::rename(pos(a), m).atom);
        for (const auto& a : s.dels) g.dels.insert(detail::rename(pos(a), m).atom);
        std::set<Literal> pre(g.pre.begin(), g.pre.end());
        for (const auto& l : pre)
          if (pre.contains(negate(l))) return;
        for (const auto& a : g.adds)
          if (g.dels.contains(a)) return;
        out.push_back(std::move(g));
        return;
      }
      for (const std::string* obj : candidates[i]) {
        if (!opts.allow_repeated_bindings &&
            std::find(binding.begin(), binding.end(), *obj) != binding.end())
          continue;
        binding.push_back(*obj);
        rec(i + 1);
        binding.pop_back();
      }
    };
    rec(0);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::tie(a.name, a.args) < std::tie(b.name, b.args);
  });
  return out;
}

inline std::vector<GroundedAction> ground(const OperatorLibrary& lib,
                                          const CostModel& costs,
                                          const std::vector<ObjectInstance>& objects,
                                          const GroundOptions& opts = {}) {
  TypeTable types = lib.types();
  for (const auto& o : objects) {
    if (!types.has_type(o.type_id)) types.add_type(o.type_id);
    types.add_instance(o.id, o.type_id);
  }
  return ground(schemas_from_library(lib, costs), types, objects, opts);
}

struct Plan {
  std::vector<GroundedAction> actions;
  std::uint64_t total_cost = 0;

  friend bool operator==(const Plan&, const Plan&) = default;
};

enum class PlanStatus { solved, unsolvable };

struct PlanResult {
  PlanStatus status = PlanStatus::unsolvable;
  Plan plan;
  std::size_t expanded = 0;
  std::size_t generated = 0;

  bool solved() const { return status == PlanStatus::solved; }
};

struct SearchOptions {
  std::size_t node_limit = 10'000'000;
  bool use_hmax = false;
};

namespace detail {

using Bits = std::vector<std::uint64_t>;

struct BitsHash {
  std::size_t operator()(const Bits& b) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto w : b) {
      h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

inline bool test(const Bits& b, std::uint32_t i) { return (b[i >> 6] >> (i & 63)) & 1U; }
inline void set(Bits& b, std::uint32_t i) { b[i >> 6] |= (std::uint64_t{1} << (i & 63)); }
inline void reset(Bits& b, std::uint32_t i) { b[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }

struct CompiledAction {
  std::vector<std::uint32_t> pre_pos, pre_neg, adds, dels;
  std::uint64_t cost;
  std::size_t source;
};

class Compiled {
 public:
  Compiled(const std::vector<GroundedAction>& actions, const State& init,
           const std::vector<Literal>& goal) {
    std::set<Atom> universe(init.true_atoms.begin(), init.true_atoms.end());
    for (const auto& l : goal) universe.insert(l.atom);
    for (const auto& a : actions) {
      for (const auto& l : a.pre) universe.insert(l.atom);
      universe.insert(a.adds.begin(), a.adds.end());
      universe.insert(a.dels.begin(), a.dels.end());
    }
    for (const auto& a : universe) {
      auto id = static_cast<std::uint32_t>(index_.size());
      index_.emplace(a, id);
    }
    words_ = (index_.size() + 63) / 64;

    // successors are generated in (name, args) order
    std::vector<std::size_t> order(actions.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) {
      return std::tie(actions[x].name, actions[x].args) <
             std::tie(actions[y].name, actions[y].args);
    });
    for (std::size_t i : order) {
      const auto& a = actions[i];
      CompiledAction c{{}, {}, {}, {}, a.cost, i};
      for (const auto& l : a.pre)
        (l.positive ? c.pre_pos : c.pre_neg).push_back(index_.at(l.atom));
      for (const auto& x : a.adds) c.adds.push_back(index_.at(x));
      for (const auto& x : a.dels) c.dels.push_back(index_.at(x));
      actions_.push_back(std::move(c));
    }
    for (const auto& l : goal)
      (l.positive ? goal_pos_ : goal_neg_).push_back(index_.at(l.atom));
    init_ = encode(init);
  }

  Bits encode(const State& s) const {
    Bits b(words_, 0);
    for (const auto& a : s.true_atoms) set(b, index_.at(a));
    return b;
  }

  bool applicable(const CompiledAction& a, const Bits& s) const {
    for (auto i : a.pre_pos)
      if (!test(s, i)) return false;
    for (auto i : a.pre_neg)
      if (test(s, i)) return false;
    return true;
  }

  Bits successor(const CompiledAction& a, const Bits& s) const {
    Bits out = s;
    for (auto i : a.dels) reset(out, i);
    for (auto i : a.adds) set(out, i);
    return out;
  }

  bool is_goal(const Bits& s) const {
    for (auto i : goal_pos_)
      if (!test(s, i)) return false;
    for (auto i : goal_neg_)
      if (test(s, i)) return false;
    return true;
  }

  // Max-cost relaxation ignoring deletes and negative conditions.
  std::optional<std::uint64_t> hmax(const Bits& s) const {
    constexpr auto inf = std::numeric_limits<std::uint64_t>::max();
    std::vector<std::uint64_t> cost(index_.size(), inf);
    for (std::uint32_t i = 0; i < cost.size(); ++i)
      if (test(s, i)) cost[i] = 0;
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& a : actions_) {
        std::uint64_t c = 0;
        for (auto p : a.pre_pos) c = std::max(c, cost[p]);
        if (c == inf) continue;
        for (auto x : a.adds)
          if (c + a.cost < cost[x]) {
            cost[x] = c + a.cost;
            changed = true;
          }
      }
    }
    std::uint64_t h = 0;
    for (auto g : goal_pos_) h = std::max(h, cost[g]);
    if (h == inf) return std::nullopt;
    return h;
  }

  const std::vector<CompiledAction>& actions() const { return actions_; }
  const Bits& init() const { return init_; }

 private:
  std::map<Atom, std::uint32_t> index_;
  std::size_t words_ = 0;
  std::vector<CompiledAction> actions_;
  std::vector<std::uint32_t> goal_pos_, goal_neg_;
  Bits init_;
};

}  // namespace detail

// Minimum-total-cost search (uniform cost, or A* with h_max). Among
// frontier nodes of equal priority the earlier generated one is expanded
// first, and successors are generated in (action name, args) order.
inline PlanResult find_plan(const std::vector<GroundedAction>& actions,
                            const State& init, const std::vector<Literal>& goal,
                            const SearchOptions& opts = {}) {
  using detail::Bits;
  const detail::Compiled task(actions, init, goal);

  struct Node {
    std::size_t parent;
    std::size_t action;  // index into task.actions()
    std::uint64_t g;
    std::uint64_t h;
  };
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  std::vector<Node> nodes;
  std::vector<const Bits*> node_state;
  std::unordered_map<Bits, std::size_t, detail::BitsHash> seen;

  // (f, sequence, node)
  using Entry = std::tuple<std::uint64_t, std::uint64_t, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  std::uint64_t seq = 0;

  PlanResult result;
  auto heuristic = [&](const Bits& s) -> std::optional<std::uint64_t> {
    if (!opts.use_hmax) return 0;
    return task.hmax(s);
  };

  {
    auto h = heuristic(task.init());
    if (!h) return result;
    auto [it, _] = seen.emplace(task.init(), 0);
    nodes.push_back({kNone, kNone, 0, *h});
    node_state.push_back(&it->first);
    open.emplace(*h, seq++, 0);
    result.generated = 1;
  }

  while (!open.empty()) {
    auto [f, _, id] = open.top();
    open.pop();
    const std::uint64_t g = nodes[id].g;
    const Bits& state = *node_state[id];
    if (g + nodes[id].h != f) continue;  // stale entry
    if (task.is_goal(state)) {
      std::vector<std::size_t> rev;
      for (std::size_t n = id; nodes[n].parent != kNone; n = nodes[n].parent)
        rev.push_back(task.actions()[nodes[n].action].source);
      result.status = PlanStatus::solved;
      result.plan.total_cost = g;
      for (auto it = rev.rbegin(); it != rev.rend(); ++it)
        result.plan.actions.push_back(actions[*it]);
      return result;
    }
    ++result.expanded;
    for (std::size_t ai = 0; ai < task.actions().size(); ++ai) {
      const auto& a = task.actions()[ai];
      if (!task.applicable(a, state)) continue;
      Bits next = task.successor(a, state);
      const std::uint64_t ng = g + a.cost;
      auto it = seen.find(next);
      std::size_t nid;
      if (it == seen.end()) {
        if (nodes.size() >= opts.node_limit)
          throw SearchLimitExceeded("search exceeded " +
                                    std::to_string(opts.node_limit) + " nodes");
        auto h = heuristic(next);
        if (!h) continue;
        nid = nodes.size();
        auto [ins, __] = seen.emplace(std::move(next), nid);
        nodes.push_back({id, ai, ng, *h});
        node_state.push_back(&ins->first);
        ++result.generated;
        open.emplace(ng + *h, seq++, nid);
      } else {
        nid = it->second;
        if (ng >= nodes[nid].g) continue;
        nodes[nid].parent = id;
        nodes[nid].action = ai;
        nodes[nid].g = ng;
        open.emplace(ng + nodes[nid].h, seq++, nid);
      }
    }
  }
  return result;
}

struct PlanCheck {
  bool ok = true;
  std::optional<std::size_t> failed_step;  // first inapplicable action
  std::vector<Literal> unmet;              // its unmet preconditions, or unmet goals
  bool goal_violated = false;
  State final_state;
};

// Replays `plan` from `init` with apply().
inline PlanCheck validate(const Plan& plan, const State& init,
                          const std::vector<Literal>& goal) {
  PlanCheck out;
  State s = init;
  for (std::size_t i = 0; i < plan.actions.size(); ++i) {
    const auto& a = plan.actions[i];
    for (const auto& l : a.pre)
      if (!holds(s, l)) out.unmet.push_back(l);
    if (!out.unmet.empty()) {
      out.ok = false;
      out.failed_step = i;
      out.final_state = s;
      return out;
    }
    s = apply(s, a.adds, a.dels);
  }
  for (const auto& l : goal)
    if (!holds(s, l)) out.unmet.push_back(l);
  out.goal_violated = !out.unmet.empty();
  out.ok = !out.goal_violated;
  out.final_state = std::move(s);
  return out;
}

inline json plan_to_json(const Plan& plan) {
  json out = json::array();
  for (const auto& a : plan.actions)
    out.push_back({{"action", a.name}, {"args", a.args}, {"cost", a.cost}});
  return out;
}

inline std::string plan_to_text(const Plan& plan) {
  std::string out;
  for (std::size_t i = 0; i < plan.actions.size(); ++i)
    out += std::to_string(i + 1) + ". " + to_string(plan.actions[i]) +
           "  [cost " + std::to_string(plan.actions[i].cost) + "]\n";
  out += "total cost: " + std::to_string(plan.total_cost) + "\n";
  return out;
}

// Resolves [{action, args}] against a grounded action set.
inline Plan plan_from_json(const json& j,
                           const std::vector<GroundedAction>& actions) {
  using namespace json_io;
  std::map<std::pair<std::string, std::vector<std::string>>,
           const GroundedAction*>
      by_id;
  for (const auto& a : actions) by_id[{a.name, a.args}] = &a;
  Plan plan;
  for (const auto& step : require_array(j, "plan")) {
    std::string name = require_string(require(step, "action", "plan"), "action");
    std::vector<std::string> args;
    for (const auto& x : require_array(require(step, "args", "plan"), "args"))
      args.push_back(require_string(x, "args"));
    auto it = by_id.find({name, args});
    if (it == by_id.end())
      throw ValidationError("plan step " + to_string(Atom{name, args}) +
                            " is not a grounded action of the domain");
    plan.actions.push_back(*it->second);
    plan.total_cost += it->second->cost;
  }
  return plan;
}

}  // namespace demo2pddl
