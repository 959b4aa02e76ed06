#include <gtest/gtest.h>

#include <optional>
#include <random>

#include "support.hpp"

using namespace demo2pddl;
using demo2pddl::oracle::data_path;

namespace {

Trace stacking_trace(const std::vector<std::set<Atom>>& frames) {
  Trace t;
  t.vocabulary = synth::stacking_vocabulary();
  t.types = synth::stacking_types();
  t.objects = synth::stacking_objects();
  for (std::size_t i = 0; i < frames.size(); ++i)
    t.frames.push_back({static_cast<double>(i), {frames[i]}});
  return t;
}

const ObjectInstance kRight{"Right_hand", "Hand"};

}  // namespace

TEST(ClassifyFrame, ReachWhenMovingEmptyHanded) {
  Trace t = stacking_trace({{}, {{"handMove", {"Right_hand"}}, {"handOpen", {"Right_hand"}}}});
  EXPECT_EQ(classify_frame(t, 1, kRight, default_rules()), "reach");
}

TEST(ClassifyFrame, IdleWhenNothingMatches) {
  Trace t = stacking_trace({{{"handOpen", {"Right_hand"}}}, {{"handOpen", {"Right_hand"}}}});
  EXPECT_EQ(classify_frame(t, 1, kRight, default_rules()), std::string(kIdle));
}

TEST(ClassifyFrame, PutFixtureTransitionIsPut) {
  Trace t = load_trace(data_path("put_fixture.json"));
  // Frame 1: onTop/inTouch deleted while the hand holds the cube.
  auto view = symmetric_difference(t.frames[0].state, t.frames[1].state);
  EXPECT_TRUE(view.count({"onTop", {"Cube_green1", "Table_1"}}));
  EXPECT_EQ(classify_frame(t, 1, kRight, default_rules()), "put");
}

TEST(ClassifyFrame, FrameZeroThrows) {
  Trace t = load_trace(data_path("put_fixture.json"));
  EXPECT_THROW(classify_frame(t, 0, kRight, default_rules()), IndexError);
}

TEST(Segment, MaximalRuns) {
  std::vector<std::string> labels{"idle", "reach", "reach", "put", "put", "idle"};
  auto segs = segments_from_labels(labels, "h");
  ASSERT_EQ(segs.size(), 2u);
  EXPECT_EQ(segs[0], (Segment{"reach", "h", 1, 2}));
  EXPECT_EQ(segs[1], (Segment{"put", "h", 3, 4}));
}

TEST(Segment, AllIdleGivesNothing) {
  Trace t = stacking_trace({synth::initial_state().true_atoms, synth::initial_state().true_atoms,
                            synth::initial_state().true_atoms});
  EXPECT_TRUE(segment(t, default_rules()).empty());
}

TEST(Segment, NoActorThrows) {
  Trace t;
  t.vocabulary.add({"onTop", {"object", "object"}});
  t.types.add_type("Cube");
  t.types.add_instance("c", "Cube");
  t.objects = {{"c", "Cube"}};
  t.frames = {{0, {}}, {1, {}}};
  EXPECT_THROW(segment(t, default_rules()), NoActorError);
}

TEST(Segment, SyntheticDemosMatchGeneratorScript) {
  for (const auto& demo : synth::generate_corpus())
    EXPECT_EQ(segment(demo.trace, default_rules()), demo.truth)
        << demo.trace.meta.demonstrator << " " << demo.trace.meta.scenario;
}

TEST(Segment, OneCubeLabelOrder) {
  const auto corpus = synth::generate_corpus();
  const auto& demo = corpus.front();
  std::vector<std::string> labels;
  for (const auto& s : segment(demo.trace, default_rules())) labels.push_back(s.label);
  EXPECT_EQ(labels, (std::vector<std::string>{"reach", "grasp", "put", "place", "release"}));
}

TEST(Segment, TwoHandsIndependent) {
  // Both hands reach at different times.
  Trace t = stacking_trace({{},
                            {{"handMove", {"Left_hand"}}},
                            {{"handMove", {"Left_hand"}}, {"handMove", {"Right_hand"}}},
                            {{"handMove", {"Right_hand"}}},
                            {}});
  auto segs = segment(t, default_rules());
  ASSERT_EQ(segs.size(), 2u);
  EXPECT_EQ(segs[0], (Segment{"reach", "Left_hand", 1, 2}));
  EXPECT_EQ(segs[1], (Segment{"reach", "Right_hand", 2, 3}));
}

TEST(SegmentProperties, PartitionOfNonIdleFrames) {
  std::mt19937_64 rng(3);
  for (std::uint64_t seed = 0; seed < 3; ++seed)
    for (const auto& demo : synth::generate_corpus()) {
      // Unfiltered noise to exercise odd label sequences.
      Trace t = synth::inject_flicker(demo.trace, seed, 1.0);
      const RuleSet rules = default_rules();
      const auto segs = segment(t, rules);
      for (const auto& actor : actors_of(t, rules)) {
        auto labels = frame_labels(t, actor, rules);
        std::vector<int> covered(t.frames.size(), 0);
        std::optional<std::size_t> prev_end;
        for (const auto& s : segs) {
          if (s.actor != actor.id) continue;
          EXPECT_GE(s.end_frame, s.start_frame);
          if (prev_end) {
            EXPECT_GT(s.start_frame, *prev_end);
          }
          prev_end = s.end_frame;
          for (std::size_t i = s.start_frame; i <= s.end_frame; ++i) {
            ++covered[i];
            EXPECT_EQ(labels[i], s.label);
          }
          // Maximal: neighbours carry a different label.
          EXPECT_NE(labels[s.start_frame - 1], s.label);
          if (s.end_frame + 1 < labels.size()) {
            EXPECT_NE(labels[s.end_frame + 1], s.label);
          }
        }
        for (std::size_t i = 0; i < labels.size(); ++i)
          EXPECT_EQ(covered[i], labels[i] == kIdle ? 0 : 1) << "frame " << i;
      }
      EXPECT_EQ(segment(t, rules), segs);  // determinism
    }
}

TEST(SegmentProperties, PermutingPrioritiesOfNonCoFiringRules) {
  const auto corpus = synth::generate_corpus();
  const RuleSet base = default_rules();
  const auto& rules = base.rules();
  const std::size_t n = rules.size();

  // Which rules ever fire together on the corpus?
  std::vector<std::vector<bool>> cofire(n, std::vector<bool>(n, false));
  for (const auto& demo : corpus)
    for (const auto& actor : actors_of(demo.trace, base))
      for (std::size_t f = 1; f < demo.trace.frames.size(); ++f) {
        auto view = detail::frame_view(demo.trace, f);
        std::vector<std::size_t> firing;
        for (std::size_t r = 0; r < n; ++r)
          if (detail::match_rule(rules[r], view, actor.id)) firing.push_back(r);
        for (auto a : firing)
          for (auto b : firing) cofire[a][b] = true;
      }

  std::mt19937_64 rng(17);
  std::vector<int> priorities;
  for (const auto& r : rules) priorities.push_back(r.priority);
  int tested = 0;
  for (int round = 0; round < 200; ++round) {
    std::vector<int> shuffled = priorities;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    bool keeps_cofiring_order = true;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        if (a != b && cofire[a][b] &&
            (priorities[a] < priorities[b]) != (shuffled[a] < shuffled[b]))
          keeps_cofiring_order = false;
    if (!keeps_cofiring_order) continue;
    auto permuted = rules;
    for (std::size_t i = 0; i < n; ++i) permuted[i].priority = shuffled[i];
    RuleSet other(permuted);
    ++tested;
    for (const auto& demo : corpus)
      EXPECT_EQ(segment(demo.trace, other), segment(demo.trace, base));
  }
  EXPECT_GT(tested, 5);
}

TEST(Rules, ValidationAndJsonRoundTrip) {
  RuleSet rules = default_rules();
  EXPECT_EQ(rules_from_json(to_json(rules)).rules(), rules.rules());
  EXPECT_EQ(load_rules(data_path("default_rules.json")).rules(), rules.rules());

  auto dup = rules.rules();
  dup[1].priority = dup[0].priority;
  EXPECT_THROW(RuleSet{dup}, ValidationError);

  std::vector<ClassifierRule> no_actor{
      {"x", "Hand", 1, {{ConditionScope::state, pos({"handMove", {"?o"}})}}}};
  EXPECT_THROW(RuleSet{no_actor}, ValidationError);
}

TEST(Rules, CustomRuleTableChangesLabels) {
  // A single rule that calls every hand movement "move".
  std::vector<ClassifierRule> r{
      {"move", "Hand", 1, {{ConditionScope::state, pos({"handMove", {"?actor"}})}}}};
  const auto corpus = synth::generate_corpus();
  const auto& demo = corpus.front();
  auto segs = segment(demo.trace, RuleSet(r));
  ASSERT_FALSE(segs.empty());
  for (const auto& s : segs) EXPECT_EQ(s.label, "move");
}
