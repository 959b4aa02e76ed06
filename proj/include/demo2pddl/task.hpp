#pragma once

// Planning tasks posed against a learned library: the scene (objects and the
// initial state) and a goal conjunction.

#include <cctype>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "demo2pddl/core.hpp"
#include "demo2pddl/json_io.hpp"
#include "demo2pddl/trace.hpp"

namespace demo2pddl {

struct Scene {
  std::vector<ObjectInstance> objects;
  TypeTable types;
  State init;
};

// Either {"objects":[{id,type}], "types"?:[...], "atoms":[...]} or a trace,
// in which case its first frame is the initial state.
inline Scene scene_from_json(const json& j) {
  using namespace json_io;
  if (!j.is_object()) throw ParseError("scene: top level must be an object");
  Scene scene;
  if (j.contains("frames")) {
    Trace t = trace_from_json(j);
    scene.objects = t.objects;
    scene.types = t.types;
    scene.init = t.frames.front().state;
    return scene;
  }
  for (const auto& o : require_array(require(j, "objects", "scene"), "objects"))
    scene.objects.push_back(
        {require_string(require(o, "id", "objects"), "objects.id"),
         require_string(require(o, "type", "objects"), "objects.type")});
  try {
    if (j.contains("types")) types_from_json(j.at("types"), scene.types);
    for (const auto& o : scene.objects) {
      if (!scene.types.has_type(o.type_id)) scene.types.add_type(o.type_id);
      scene.types.add_instance(o.id, o.type_id);
    }
  } catch (const SchemaError& e) {
    throw ValidationError(std::string("scene: ") + e.what());
  }
  for (const auto& a : require_array(require(j, "atoms", "scene"), "atoms"))
    scene.init.true_atoms.insert(atom_from_json(a, "scene.atoms"));
  return scene;
}

inline json to_json(const Scene& s) {
  json objects = json::array();
  for (const auto& o : s.objects) objects.push_back({{"id", o.id}, {"type", o.type_id}});
  return {{"types", json_io::types_to_json(s.types)},
          {"objects", objects},
          {"atoms", json_io::atoms_to_json(s.init.true_atoms)}};
}

inline Scene load_scene(const std::filesystem::path& path) {
  try {
    return scene_from_json(json_io::read_file(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

// "onTop(Cube_green1,Cube_red1) !inHand(Right_hand,Cube_green1)". Literals
// may be separated by whitespace, ',' or ';'; negation is '!' or 'not '.
inline std::vector<Literal> parse_goal(std::string_view text) {
  std::vector<Literal> out;
  std::size_t i = 0;
  auto skip = [&] {
    while (i < text.size() &&
           (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == ',' ||
            text[i] == ';'))
      ++i;
  };
  auto ident = [&] {
    std::size_t b = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) &&
           text[i] != '(' && text[i] != ')' && text[i] != ',' && text[i] != ';' &&
           text[i] != '!')
      ++i;
    return std::string(text.substr(b, i - b));
  };
  auto fail = [&](const std::string& msg) {
    throw ParseError("goal at offset " + std::to_string(i) + ": " + msg);
  };
  while (true) {
    skip();
    if (i == text.size()) break;
    bool positive = true;
    if (text[i] == '!') {
      positive = false;
      ++i;
    } else if (text.substr(i, 4) == "not ") {
      positive = false;
      i += 4;
      while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    }
    Atom a{ident(), {}};
    if (a.predicate.empty()) fail("expected a predicate name");
    if (i == text.size() || text[i] != '(') fail("expected '('");
    ++i;
    while (true) {
      while (i < text.size() && (text[i] == ' ' || text[i] == ',')) ++i;
      if (i == text.size()) fail("unterminated argument list");
      if (text[i] == ')') {
        ++i;
        break;
      }
      std::string arg = ident();
      if (arg.empty()) fail("bad argument");
      a.args.push_back(std::move(arg));
    }
    out.push_back({std::move(a), positive});
  }
  if (out.empty()) throw ParseError("goal: no literals");
  return out;
}

// JSON array of literals, or a goal string.
inline std::vector<Literal> goal_from_json(const json& j) {
  if (j.is_string()) return parse_goal(j.get<std::string>());
  std::vector<Literal> out;
  for (const auto& l : json_io::require_array(j, "goal"))
    out.push_back(json_io::literal_from_json(l, "goal"));
  if (out.empty()) throw ParseError("goal: no literals");
  return out;
}

}  // namespace demo2pddl
