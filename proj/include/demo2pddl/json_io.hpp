#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "demo2pddl/core.hpp"

namespace demo2pddl {

using json = nlohmann::json;

namespace json_io {

inline json read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

inline void write_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

inline void write_text(const std::filesystem::path& path,
                       const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline const json& require(const json& j, const char* key,
                           const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    throw ParseError(where + ": missing key '" + key + "'");
  return j.at(key);
}

inline std::string require_string(const json& j, const std::string& where) {
  if (!j.is_string()) throw ParseError(where + ": expected a string");
  return j.get<std::string>();
}

inline const json& require_array(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array");
  return j;
}

// ["onTop","Cube_green1","Table_1"]
inline json atom_to_json(const Atom& a) {
  json j = json::array({a.predicate});
  for (const auto& arg : a.args) j.push_back(arg);
  return j;
}

inline Atom atom_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty())
    throw ParseError(where + ": atom must be a nonempty array");
  Atom a;
  a.predicate = require_string(j[0], where);
  for (std::size_t i = 1; i < j.size(); ++i)
    a.args.push_back(require_string(j[i], where));
  return a;
}

// Negative literals carry a leading "!": ["!","handOpen","?h"]
inline json literal_to_json(const Literal& l) {
  json j = atom_to_json(l.atom);
  if (!l.positive) j.insert(j.begin(), "!");
  return j;
}

inline Literal literal_from_json(const json& j, const std::string& where) {
  if (j.is_array() && !j.empty() && j[0] == "!") {
    json rest(j.begin() + 1, j.end());
    return neg(atom_from_json(rest, where));
  }
  return pos(atom_from_json(j, where));
}

template <typename Range>
json literals_to_json(const Range& lits) {
  json out = json::array();
  for (const Literal& l : lits) out.push_back(literal_to_json(l));
  return out;
}

template <typename Range>
json atoms_to_json(const Range& atoms) {
  json out = json::array();
  for (const Atom& a : atoms) out.push_back(atom_to_json(a));
  return out;
}

inline json vocabulary_to_json(const Vocabulary& v) {
  json out = json::array();
  for (const auto& [name, sig] : v.signatures())
    out.push_back({{"name", name}, {"arg_types", sig.arg_types}});
  return out;
}

inline Vocabulary vocabulary_from_json(const json& j) {
  Vocabulary v;
  for (const auto& e : require_array(j, "vocabulary")) {
    PredicateSignature sig;
    sig.name = require_string(require(e, "name", "vocabulary"), "vocabulary");
    for (const auto& t :
         require_array(require(e, "arg_types", "vocabulary"), "arg_types"))
      sig.arg_types.push_back(require_string(t, "arg_types"));
    try {
      v.add(sig);
    } catch (const SchemaError& err) {
      throw ParseError(std::string("vocabulary: ") + err.what());
    }
  }
  return v;
}

inline json types_to_json(const TypeTable& t) {
  json out = json::array();
  for (const auto& [name, parent] : t.types())
    out.push_back({{"name", name}, {"parent", parent}});
  return out;
}

// Reads [{name, parent?}] in any order into `into`.
inline void types_from_json(const json& j, TypeTable& into) {
  TypeTable staged;
  std::vector<std::pair<std::string, std::string>> pending;
  for (const auto& e : require_array(j, "types")) {
    std::string name = require_string(require(e, "name", "types"), "types");
    std::string parent = e.contains("parent")
                             ? require_string(e.at("parent"), "types.parent")
                             : std::string(kRootType);
    pending.emplace_back(std::move(name), std::move(parent));
  }
  // Parents before children.
  while (!pending.empty()) {
    std::size_t before = pending.size();
    std::erase_if(pending, [&](const auto& tp) {
      if (!staged.has_type(tp.second)) return false;
      staged.add_type(tp.first, tp.second);
      return true;
    });
    if (pending.size() == before)
      throw SchemaError("types: cycle or unknown parent at '" +
                        pending.front().first + "'");
  }
  into.absorb_types(staged);
}

}  // namespace json_io
}  // namespace demo2pddl
