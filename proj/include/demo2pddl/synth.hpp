#pragma once

// Scripted symbolic stacking demonstrations: three demonstrator styles times
// four cube combinations, with optional single-frame predicate flicker.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "demo2pddl/core.hpp"
#include "demo2pddl/segmentation.hpp"
#include "demo2pddl/trace.hpp"

namespace demo2pddl::synth {

inline const std::string kTable = "Table_1";

inline Vocabulary stacking_vocabulary() {
  Vocabulary v;
  v.add({"handMove", {"Hand"}});
  v.add({"handOpen", {"Hand"}});
  v.add({"inHand", {"Hand", "object"}});
  v.add({"inTouch", {"object", "object"}});
  v.add({"onTop", {"object", "object"}});
  return v;
}

inline std::vector<ObjectInstance> stacking_objects() {
  return {{"Left_hand", "Hand"},       {"Right_hand", "Hand"},
          {kTable, "Table"},           {"Cube_red1", "Wooden_cube"},
          {"Cube_green1", "Wooden_cube"}, {"Cube_blue1", "Wooden_cube"}};
}

inline TypeTable stacking_types() {
  TypeTable t;
  for (const auto& o : stacking_objects()) {
    t.add_type(o.type_id);
    t.add_instance(o.id, o.type_id);
  }
  return t;
}

inline Schema stacking_schema() { return {stacking_vocabulary(), stacking_types()}; }

// Both hands open and still, every cube on the table.
inline State initial_state() {
  State s;
  for (const auto& o : stacking_objects()) {
    if (o.type_id == "Hand") s.true_atoms.insert({"handOpen", {o.id}});
    if (o.type_id == "Wooden_cube") {
      s.true_atoms.insert({"onTop", {o.id, kTable}});
      s.true_atoms.insert({"inTouch", {o.id, kTable}});
    }
  }
  return s;
}

struct Scenario {
  std::string name;
  std::string hand;
  std::vector<std::pair<std::string, std::string>> stacks;  // (top, bottom)
};

inline const std::vector<Scenario>& scenarios() {
  static const std::vector<Scenario> all{
      {"one-cube-right", "Right_hand", {{"Cube_green1", "Cube_red1"}}},
      {"one-cube-left", "Left_hand", {{"Cube_blue1", "Cube_green1"}}},
      {"two-cubes-right",
       "Right_hand",
       {{"Cube_green1", "Cube_red1"}, {"Cube_blue1", "Cube_green1"}}},
      {"two-cubes-left",
       "Left_hand",
       {{"Cube_red1", "Cube_blue1"}, {"Cube_green1", "Cube_red1"}}},
  };
  return all;
}

inline std::vector<Literal> goal_of(const Scenario& s) {
  std::vector<Literal> out;
  for (const auto& [top, bottom] : s.stacks) out.push_back(pos({"onTop", {top, bottom}}));
  return out;
}

enum class Style {
  steady,   // reach, grasp, put, place, release
  careful,  // stops before closing the hand
  hasty,    // opens the hand while still moving, then retreats
};

struct Demonstrator {
  std::string id;
  Style style;
  std::size_t hold;  // frames per phase
};

inline const std::vector<Demonstrator>& demonstrators() {
  static const std::vector<Demonstrator> all{
      {"P1", Style::steady, 3}, {"P2", Style::careful, 4}, {"P3", Style::hasty, 5}};
  return all;
}

struct Demo {
  Trace trace;
  std::vector<Segment> truth;  // expected segmentation under default_rules()
  std::vector<Literal> goal;
};

namespace detail {

class Recorder {
 public:
  Recorder(Trace& trace, std::vector<Segment>& truth, std::string actor)
      : trace_(trace), truth_(truth), actor_(std::move(actor)) {}

  State& state() { return state_; }

  // Appends `frames` copies of the current state, labelled `label`.
  void hold(const std::string& label, std::size_t frames) {
    for (std::size_t k = 0; k < frames; ++k) {
      const std::size_t idx = trace_.frames.size();
      trace_.frames.push_back({static_cast<double>(idx) / 30.0, state_});
      if (label == kIdle || idx == 0) continue;
      if (!truth_.empty() && truth_.back().label == label &&
          truth_.back().end_frame + 1 == idx)
        truth_.back().end_frame = idx;
      else
        truth_.push_back({label, actor_, idx, idx});
    }
  }

  void add(Atom a) { state_.true_atoms.insert(std::move(a)); }
  void del(const Atom& a) { state_.true_atoms.erase(a); }

 private:
  Trace& trace_;
  std::vector<Segment>& truth_;
  std::string actor_;
  State state_;
};

}  // namespace detail

inline Demo generate_demo(const Demonstrator& who, const Scenario& what) {
  Demo demo;
  Trace& t = demo.trace;
  t.vocabulary = stacking_vocabulary();
  t.types = stacking_types();
  t.objects = stacking_objects();
  t.meta = {who.id, what.name};
  demo.goal = goal_of(what);

  const std::string& h = what.hand;
  const std::string idle(kIdle);
  detail::Recorder rec(t, demo.truth, h);
  rec.state() = initial_state();
  rec.hold(idle, who.hold);

  for (const auto& [top, bottom] : what.stacks) {
    rec.add({"handMove", {h}});
    rec.hold("reach", who.hold);
    if (who.style == Style::careful) {
      rec.del({"handMove", {h}});
      rec.hold(idle, who.hold);
    }
    rec.del({"handMove", {h}});
    rec.del({"handOpen", {h}});
    rec.add({"inHand", {h, top}});
    rec.hold("grasp", who.hold);

    rec.add({"handMove", {h}});
    rec.del({"onTop", {top, kTable}});
    rec.del({"inTouch", {top, kTable}});
    rec.hold("put", who.hold);

    rec.add({"onTop", {top, bottom}});
    rec.add({"inTouch", {top, bottom}});
    rec.hold("place", who.hold);

    rec.add({"handOpen", {h}});
    rec.del({"inHand", {h, top}});
    if (who.style == Style::hasty) {
      rec.hold("release", 1);
      rec.hold("reach", who.hold);  // retreat: no state change, dropped later
      rec.del({"handMove", {h}});
      rec.hold(idle, who.hold);
    } else {
      rec.del({"handMove", {h}});
      rec.hold("release", 1);
      rec.hold(idle, who.hold);
    }
  }
  return demo;
}

// 3 demonstrators x 4 scenarios, demonstrator-major.
inline std::vector<Demo> generate_corpus() {
  std::vector<Demo> out;
  for (const auto& who : demonstrators())
    for (const auto& what : scenarios()) out.push_back(generate_demo(who, what));
  return out;
}

// Every well-typed ground atom over the trace's objects.
inline std::vector<GroundAtom> all_ground_atoms(const Trace& trace) {
  std::vector<GroundAtom> out;
  for (const auto& [name, sig] : trace.vocabulary.signatures()) {
    std::vector<std::string> args;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      if (i == sig.arity()) {
        out.push_back({name, args});
        return;
      }
      for (const auto& o : trace.objects) {
        if (!trace.types.is_subtype(o.type_id, sig.arg_types[i])) continue;
        args.push_back(o.id);
        rec(i + 1);
        args.pop_back();
      }
    };
    rec(0);
  }
  return out;
}

struct FlickerStats {
  std::size_t flips = 0;
};

// Flips single frames of single atoms: at most one flip per atom per
// 10-frame window, each with probability `rate`, and only inside runs where
// the atom is constant on frames i-2..i+1 so that a persistence filter of
// width 2 can undo it exactly.
inline Trace inject_flicker(const Trace& trace, std::uint64_t seed,
                            double rate = 0.5, FlickerStats* stats = nullptr) {
  Trace out = trace;
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(rate);
  const std::size_t n = trace.frames.size();
  for (const auto& atom : all_ground_atoms(trace)) {
    auto member = [&](std::size_t i) { return trace.frames[i].state.contains(atom); };
    for (std::size_t w = 0; w * 10 < n; ++w) {
      if (!coin(rng)) continue;
      std::vector<std::size_t> eligible;
      for (std::size_t i = w * 10 + 1; i <= w * 10 + 8; ++i) {
        if (i < 2 || i + 2 > n) continue;
        const bool v = member(i);
        if (member(i - 2) == v && member(i - 1) == v && member(i + 1) == v)
          eligible.push_back(i);
      }
      if (eligible.empty()) continue;
      std::uniform_int_distribution<std::size_t> pick(0, eligible.size() - 1);
      const std::size_t i = eligible[pick(rng)];
      auto& atoms = out.frames[i].state.true_atoms;
      if (atoms.contains(atom))
        atoms.erase(atom);
      else
        atoms.insert(atom);
      if (stats) ++stats->flips;
    }
  }
  return out;
}

}  // namespace demo2pddl::synth
