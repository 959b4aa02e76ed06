#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "demo2pddl/core.hpp"
#include "demo2pddl/json_io.hpp"
#include "demo2pddl/trace.hpp"

namespace demo2pddl {

inline constexpr std::string_view kIdle = "idle";
inline constexpr std::string_view kActorVar = "?actor";

// Where a condition pattern is matched for frame i.
enum class ConditionScope {
  state,    // atoms true at frame i
  added,    // true at i, false at i-1
  deleted,  // true at i-1, false at i
};

struct Condition {
  ConditionScope scope = ConditionScope::state;
  Literal pattern;  // args are constants, ?variables or the wildcard "_"

  friend bool operator==(const Condition&, const Condition&) = default;
};

// A rule fires when some binding of its non-actor variables satisfies every
// positive condition and no negative condition matches under that binding.
// Variables that occur only in negative conditions are free there, so
// `!inHand(?actor, ?o)` reads "the actor holds nothing".
struct ClassifierRule {
  std::string name;
  std::string actor_type;
  int priority = 0;  // larger wins
  std::vector<Condition> conditions;

  friend bool operator==(const ClassifierRule&, const ClassifierRule&) = default;
};

class RuleSet {
 public:
  RuleSet() = default;

  explicit RuleSet(std::vector<ClassifierRule> rules) : rules_(std::move(rules)) {
    std::set<int> priorities;
    for (const auto& r : rules_) {
      if (r.name.empty() || r.name == kIdle)
        throw ValidationError("rule name '" + r.name + "' is reserved or empty");
      if (!priorities.insert(r.priority).second)
        throw ValidationError("duplicate rule priority " +
                              std::to_string(r.priority));
      bool mentions_actor = std::any_of(
          r.conditions.begin(), r.conditions.end(), [](const Condition& c) {
            const auto& args = c.pattern.atom.args;
            return std::find(args.begin(), args.end(), kActorVar) != args.end();
          });
      if (!mentions_actor)
        throw ValidationError("rule '" + r.name +
                              "' has no condition on ?actor");
    }
    std::stable_sort(rules_.begin(), rules_.end(),
                     [](const auto& a, const auto& b) {
                       return a.priority > b.priority;
                     });
  }

  // Highest priority first.
  const std::vector<ClassifierRule>& rules() const { return rules_; }

  bool has_actor_type(const TypeTable& types, const std::string& type) const {
    return std::any_of(rules_.begin(), rules_.end(), [&](const auto& r) {
      return types.is_subtype(type, r.actor_type);
    });
  }

 private:
  std::vector<ClassifierRule> rules_;
};

namespace detail {

inline const char* scope_name(ConditionScope s) {
  switch (s) {
    case ConditionScope::state: return "state";
    case ConditionScope::added: return "added";
    case ConditionScope::deleted: return "deleted";
  }
  return "state";
}

inline ConditionScope scope_from(const std::string& s) {
  if (s == "state") return ConditionScope::state;
  if (s == "added") return ConditionScope::added;
  if (s == "deleted") return ConditionScope::deleted;
  throw ParseError("rules: unknown condition scope '" + s + "'");
}

using Binding = std::map<std::string, std::string>;

// Extends `b` so that `pattern` equals `atom`; false on mismatch.
inline bool unify(const Atom& pattern, const Atom& atom, Binding& b) {
  if (pattern.predicate != atom.predicate ||
      pattern.args.size() != atom.args.size())
    return false;
  for (std::size_t i = 0; i < atom.args.size(); ++i) {
    const std::string& p = pattern.args[i];
    if (p == "_") continue;
    if (!is_variable(p)) {
      if (p != atom.args[i]) return false;
      continue;
    }
    auto [it, inserted] = b.emplace(p, atom.args[i]);
    if (!inserted && it->second != atom.args[i]) return false;
  }
  return true;
}

struct FrameView {
  const std::set<GroundAtom>* state;
  std::set<GroundAtom> added;
  std::set<GroundAtom> deleted;

  const std::set<GroundAtom>& scope(ConditionScope s) const {
    switch (s) {
      case ConditionScope::added: return added;
      case ConditionScope::deleted: return deleted;
      default: return *state;
    }
  }
};

inline bool match_rule(const ClassifierRule& rule, const FrameView& view,
                       const std::string& actor) {
  std::vector<const Condition*> positives, negatives;
  for (const auto& c : rule.conditions)
    (c.pattern.positive ? positives : negatives).push_back(&c);

  std::function<bool(std::size_t, Binding&)> search =
      [&](std::size_t idx, Binding& b) -> bool {
    if (idx == positives.size()) {
      for (const Condition* c : negatives)
        for (const auto& atom : view.scope(c->scope)) {
          Binding probe = b;
          if (unify(c->pattern.atom, atom, probe)) return false;
        }
      return true;
    }
    const Condition& c = *positives[idx];
    for (const auto& atom : view.scope(c.scope)) {
      Binding next = b;
      if (unify(c.pattern.atom, atom, next) && search(idx + 1, next))
        return true;
    }
    return false;
  };
  Binding b{{std::string(kActorVar), actor}};
  return search(0, b);
}

inline FrameView frame_view(const Trace& trace, std::size_t i) {
  FrameView v{&trace.frames[i].state.true_atoms, {}, {}};
  const auto& prev = trace.frames[i - 1].state.true_atoms;
  const auto& cur = trace.frames[i].state.true_atoms;
  std::set_difference(cur.begin(), cur.end(), prev.begin(), prev.end(),
                      std::inserter(v.added, v.added.end()));
  std::set_difference(prev.begin(), prev.end(), cur.begin(), cur.end(),
                      std::inserter(v.deleted, v.deleted.end()));
  return v;
}

}  // namespace detail

inline std::string classify_frame(const Trace& trace, std::size_t frame_index,
                                  const ObjectInstance& actor,
                                  const RuleSet& rules) {
  if (frame_index == 0)
    throw IndexError("frame 0 has no predecessor to classify against");
  if (frame_index >= trace.frames.size())
    throw IndexError("frame " + std::to_string(frame_index) +
                     " out of range");
  const auto view = detail::frame_view(trace, frame_index);
  for (const auto& rule : rules.rules()) {
    if (!trace.types.is_subtype(actor.type_id, rule.actor_type)) continue;
    if (detail::match_rule(rule, view, actor.id)) return rule.name;
  }
  return std::string(kIdle);
}

// A maximal run [start_frame, end_frame] of frames carrying the same
// non-idle label for one actor. The activity starts from the state at
// onset_frame(), the frame right before the run.
struct Segment {
  std::string label;
  std::string actor;
  std::size_t start_frame = 0;
  std::size_t end_frame = 0;

  std::size_t onset_frame() const { return start_frame - 1; }
  friend auto operator<=>(const Segment&, const Segment&) = default;
};

// Objects whose type matches some rule's actor type, sorted by id.
inline std::vector<ObjectInstance> actors_of(const Trace& trace,
                                             const RuleSet& rules) {
  std::vector<ObjectInstance> out;
  for (const auto& o : trace.objects)
    if (rules.has_actor_type(trace.types, o.type_id)) out.push_back(o);
  std::sort(out.begin(), out.end());
  return out;
}

// Labels for frames 1..n-1 of one actor; entry 0 is always idle.
inline std::vector<std::string> frame_labels(const Trace& trace,
                                             const ObjectInstance& actor,
                                             const RuleSet& rules) {
  std::vector<std::string> labels{std::string(kIdle)};
  for (std::size_t i = 1; i < trace.frames.size(); ++i)
    labels.push_back(classify_frame(trace, i, actor, rules));
  return labels;
}

inline std::vector<Segment> segments_from_labels(
    const std::vector<std::string>& labels, const std::string& actor) {
  std::vector<Segment> out;
  for (std::size_t i = 1; i < labels.size(); ++i) {
    if (labels[i] == kIdle) continue;
    if (!out.empty() && out.back().label == labels[i] &&
        out.back().end_frame + 1 == i) {
      out.back().end_frame = i;
    } else {
      out.push_back({labels[i], actor, i, i});
    }
  }
  return out;
}

// Segments of all actors, ordered by actor id then start frame.
inline std::vector<Segment> segment(const Trace& trace, const RuleSet& rules) {
  const auto actors = actors_of(trace, rules);
  if (actors.empty()) throw NoActorError("trace has no object of an actor type");
  std::vector<Segment> out;
  for (const auto& actor : actors) {
    auto segs = segments_from_labels(frame_labels(trace, actor, rules), actor.id);
    out.insert(out.end(), segs.begin(), segs.end());
  }
  return out;
}

// Stacking repertoire over handMove/handOpen/inHand/onTop.
inline RuleSet default_rules() {
  auto c = [](ConditionScope s, Literal l) { return Condition{s, std::move(l)}; };
  const auto S = ConditionScope::state;
  const std::string a(kActorVar);
  return RuleSet({
      {"release", "Hand", 50,
       {c(ConditionScope::deleted, pos({"inHand", {a, "?o"}}))}},
      {"put", "Hand", 40,
       {c(S, pos({"inHand", {a, "?o"}})), c(S, pos({"handMove", {a}})),
        c(S, neg({"onTop", {"?o", "?s"}}))}},
      {"place", "Hand", 30,
       {c(S, pos({"inHand", {a, "?o"}})), c(S, pos({"handMove", {a}})),
        c(S, pos({"onTop", {"?o", "?s"}}))}},
      {"grasp", "Hand", 20,
       {c(S, pos({"inHand", {a, "?o"}})), c(S, neg({"handMove", {a}})),
        c(S, neg({"handOpen", {a}}))}},
      {"reach", "Hand", 10,
       {c(S, pos({"handMove", {a}})), c(S, neg({"inHand", {a, "?o"}}))}},
  });
}

inline json to_json(const RuleSet& rules) {
  json out = json::array();
  for (const auto& r : rules.rules()) {
    json conds = json::array();
    for (const auto& c : r.conditions)
      conds.push_back({{"scope", detail::scope_name(c.scope)},
                       {"literal", json_io::literal_to_json(c.pattern)}});
    out.push_back({{"name", r.name},
                   {"actor_type", r.actor_type},
                   {"priority", r.priority},
                   {"conditions", conds}});
  }
  return out;
}

inline RuleSet rules_from_json(const json& j) {
  using namespace json_io;
  std::vector<ClassifierRule> rules;
  for (const auto& r : require_array(j, "rules")) {
    ClassifierRule rule;
    rule.name = require_string(require(r, "name", "rule"), "rule.name");
    rule.actor_type =
        require_string(require(r, "actor_type", "rule"), "rule.actor_type");
    const json& p = require(r, "priority", "rule");
    if (!p.is_number_integer()) throw ParseError("rule.priority: expected int");
    rule.priority = p.get<int>();
    for (const auto& c :
         require_array(require(r, "conditions", "rule"), "rule.conditions")) {
      ConditionScope scope = c.contains("scope")
                                 ? detail::scope_from(require_string(
                                       c.at("scope"), "condition.scope"))
                                 : ConditionScope::state;
      rule.conditions.push_back(
          {scope, literal_from_json(require(c, "literal", "condition"),
                                    "condition.literal")});
    }
    rules.push_back(std::move(rule));
  }
  return RuleSet(std::move(rules));
}

inline RuleSet load_rules(const std::filesystem::path& path) {
  return rules_from_json(json_io::read_file(path));
}

}  // namespace demo2pddl
