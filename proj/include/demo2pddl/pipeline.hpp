#pragma once

#include <string>
#include <vector>

#include "demo2pddl/learning.hpp"
#include "demo2pddl/segmentation.hpp"
#include "demo2pddl/trace.hpp"

namespace demo2pddl {

struct LearnOptions {
  RuleSet rules = default_rules();
  DebounceConfig debounce;
};

struct LearnedEntry {
  std::string name;
  std::string key;
  std::uint64_t count = 0;  // after the merge
};

struct DroppedSegment {
  Segment segment;
  std::string reason;
};

struct TraceReport {
  std::string source;
  std::vector<Segment> segments;
  std::vector<LearnedEntry> added;
  std::vector<LearnedEntry> incremented;
  std::vector<DroppedSegment> dropped;
};

// Debounce, segment, extract, lift and merge one demonstration into `lib`.
// Segments that change nothing (or exceed the operator arity limit) are
// dropped and reported.
inline TraceReport learn_trace(OperatorLibrary& lib, const Trace& raw,
                               const LearnOptions& opts,
                               const std::string& source = "") {
  TraceReport report;
  report.source = source;
  lib.absorb_schema(raw.vocabulary, raw.types);
  const Trace trace = debounce(raw, opts.debounce);
  const auto active = active_atoms(trace);
  report.segments = segment(trace, opts.rules);
  for (const auto& seg : report.segments) {
    LiftedOperator op;
    try {
      op = lift(extract(trace, seg, active), trace.types);
    } catch (const NoEffectSegment& e) {
      report.dropped.push_back({seg, e.what()});
      continue;
    } catch (const SchemaError& e) {
      report.dropped.push_back({seg, e.what()});
      continue;
    }
    const std::string key = canonical_key(op);
    MergeOutcome m = lib.merge(op);
    LearnedEntry entry{op.name, key, lib.operators().at(key).count};
    (m == MergeOutcome::added ? report.added : report.incremented).push_back(entry);
  }
  return report;
}

inline json to_json(const Segment& s) {
  return {{"label", s.label},
          {"actor", s.actor},
          {"start_frame", s.start_frame},
          {"end_frame", s.end_frame}};
}

inline json to_json(const TraceReport& r) {
  json segs = json::array();
  for (const auto& s : r.segments) segs.push_back(to_json(s));
  auto entries = [](const std::vector<LearnedEntry>& v) {
    json out = json::array();
    for (const auto& e : v)
      out.push_back({{"name", e.name}, {"key", e.key}, {"count", e.count}});
    return out;
  };
  json dropped = json::array();
  for (const auto& d : r.dropped)
    dropped.push_back({{"segment", to_json(d.segment)}, {"reason", d.reason}});
  return {{"source", r.source},
          {"segments", segs},
          {"added", entries(r.added)},
          {"incremented", entries(r.incremented)},
          {"dropped", dropped}};
}

inline std::string to_text(const TraceReport& r) {
  std::string out = r.source + ":\n  segments:";
  for (const auto& s : r.segments)
    out += " " + s.label + "[" + s.actor + " " + std::to_string(s.start_frame) + "-" +
           std::to_string(s.end_frame) + "]";
  out += "\n";
  for (const auto& e : r.added)
    out += "  added: " + e.name + " (count " + std::to_string(e.count) + ")\n";
  for (const auto& e : r.incremented)
    out += "  incremented: " + e.name + " (count " + std::to_string(e.count) + ")\n";
  for (const auto& d : r.dropped) out += "  dropped: " + d.reason + "\n";
  return out;
}

}  // namespace demo2pddl
