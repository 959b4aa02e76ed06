#pragma once

#include <cstddef>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "demo2pddl/core.hpp"
#include "demo2pddl/json_io.hpp"

namespace demo2pddl {

// One symbolic snapshot of a demonstration.
struct Frame {
  double t = 0.0;
  State state;

  friend bool operator==(const Frame&, const Frame&) = default;
};

struct TraceMeta {
  std::string demonstrator;
  std::string scenario;

  friend bool operator==(const TraceMeta&, const TraceMeta&) = default;
};

struct Trace {
  Vocabulary vocabulary;
  TypeTable types;  // holds the instance -> type map as well
  std::vector<ObjectInstance> objects;
  std::vector<Frame> frames;
  TraceMeta meta;

  Schema schema() const { return {vocabulary, types}; }

  friend bool operator==(const Trace&, const Trace&) = default;
};

struct DebounceConfig {
  std::size_t window = 2;
};

// Throws ValidationError naming the offending frame and atom.
inline void validate_trace(const Trace& trace) {
  if (trace.frames.size() < 2)
    throw ValidationError("trace needs at least 2 frames, has " +
                          std::to_string(trace.frames.size()));
  std::set<std::string> seen;
  for (const auto& o : trace.objects) {
    if (!seen.insert(o.id).second)
      throw ValidationError("object '" + o.id + "' declared twice");
    const std::string* t = trace.types.type_of(o.id);
    if (!t || *t != o.type_id)
      throw ValidationError("object '" + o.id + "' missing from type table");
  }
  for (const auto& [name, sig] : trace.vocabulary.signatures())
    for (const auto& t : sig.arg_types)
      if (!trace.types.has_type(t))
        throw ValidationError("predicate '" + name +
                              "' uses undeclared type '" + t + "'");
  for (std::size_t i = 0; i < trace.frames.size(); ++i) {
    if (i > 0 && trace.frames[i].t < trace.frames[i - 1].t)
      throw ValidationError("frame " + std::to_string(i) +
                            ": timestamp decreases");
    for (const auto& a : trace.frames[i].state.true_atoms) {
      try {
        check_atom(trace.vocabulary, trace.types, a);
      } catch (const TypeError& e) {
        throw ValidationError("frame " + std::to_string(i) + ": " + e.what());
      }
    }
  }
}

inline json to_json(const Trace& trace) {
  json objects = json::array();
  for (const auto& o : trace.objects)
    objects.push_back({{"id", o.id}, {"type", o.type_id}});
  json frames = json::array();
  for (const auto& f : trace.frames)
    frames.push_back(
        {{"t", f.t}, {"atoms", json_io::atoms_to_json(f.state.true_atoms)}});
  return {{"meta",
           {{"demonstrator", trace.meta.demonstrator},
            {"scenario", trace.meta.scenario}}},
          {"types", json_io::types_to_json(trace.types)},
          {"vocabulary", json_io::vocabulary_to_json(trace.vocabulary)},
          {"objects", objects},
          {"frames", frames}};
}

// Without a "types" key every referenced type is registered flat under the
// root type; with one, referenced types must be declared there.
inline Trace trace_from_json(const json& j) {
  using namespace json_io;
  if (!j.is_object()) throw ParseError("trace: top level must be an object");
  Trace trace;
  trace.vocabulary = vocabulary_from_json(require(j, "vocabulary", "trace"));

  std::vector<ObjectInstance> objects;
  for (const auto& o : require_array(require(j, "objects", "trace"), "objects"))
    objects.push_back({require_string(require(o, "id", "objects"), "objects.id"),
                       require_string(require(o, "type", "objects"),
                                      "objects.type")});

  try {
    if (j.contains("types")) {
      types_from_json(j.at("types"), trace.types);
    } else {
      for (const auto& [_, sig] : trace.vocabulary.signatures())
        for (const auto& t : sig.arg_types) trace.types.add_type(t);
      for (const auto& o : objects) trace.types.add_type(o.type_id);
    }
    for (const auto& o : objects) trace.types.add_instance(o.id, o.type_id);
  } catch (const SchemaError& e) {
    throw ValidationError(e.what());
  }
  trace.objects = std::move(objects);

  const json& frames = require_array(require(j, "frames", "trace"), "frames");
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const std::string where = "frames[" + std::to_string(i) + "]";
    Frame f;
    const json& t = require(frames[i], "t", where);
    if (!t.is_number()) throw ParseError(where + ".t: expected a number");
    f.t = t.get<double>();
    for (const auto& a : require_array(require(frames[i], "atoms", where),
                                       where + ".atoms"))
      f.state.true_atoms.insert(atom_from_json(a, where));
    trace.frames.push_back(std::move(f));
  }
  if (j.contains("meta")) {
    const json& m = j.at("meta");
    if (m.contains("demonstrator"))
      trace.meta.demonstrator = require_string(m.at("demonstrator"), "meta");
    if (m.contains("scenario"))
      trace.meta.scenario = require_string(m.at("scenario"), "meta");
  }
  validate_trace(trace);
  return trace;
}

inline Trace load_trace(const std::filesystem::path& path) {
  json j = json_io::read_file(path);
  try {
    return trace_from_json(j);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

inline void save_trace(const Trace& trace, const std::filesystem::path& path) {
  json_io::write_file(path, to_json(trace));
}

// Every atom that is true in at least one frame.
inline std::set<GroundAtom> active_atoms(const Trace& trace) {
  std::set<GroundAtom> out;
  for (const auto& f : trace.frames)
    out.insert(f.state.true_atoms.begin(), f.state.true_atoms.end());
  return out;
}

// Persistence filter: a membership change at frame i survives only if the
// new value holds for `window` consecutive frames starting at i.
inline Trace debounce(const Trace& trace, const DebounceConfig& cfg) {
  const std::size_t k = cfg.window;
  if (k <= 1) return trace;
  const std::size_t n = trace.frames.size();
  Trace out = trace;
  for (auto& f : out.frames) f.state.true_atoms.clear();

  for (const auto& atom : active_atoms(trace)) {
    bool current = trace.frames[0].state.contains(atom);
    for (std::size_t i = 0; i < n; ++i) {
      const bool raw = trace.frames[i].state.contains(atom);
      if (i > 0 && raw != current && i + k <= n) {
        bool persists = true;
        for (std::size_t j = i + 1; j < i + k; ++j)
          persists = persists && trace.frames[j].state.contains(atom) == raw;
        if (persists) current = raw;
      }
      if (current) out.frames[i].state.true_atoms.insert(atom);
    }
  }
  return out;
}

}  // namespace demo2pddl
