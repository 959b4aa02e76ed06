#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "demo2pddl/core.hpp"
#include "demo2pddl/json_io.hpp"
#include "demo2pddl/names.hpp"
#include "demo2pddl/segmentation.hpp"
#include "demo2pddl/trace.hpp"

namespace demo2pddl {

// Operators with more parameters than this are rejected by canonicalization
// (it enumerates permutations of same-typed parameters).
inline constexpr std::size_t kMaxOperatorArity = 5;

struct GroundedOperator {
  std::string name;
  std::set<Literal> pre;
  std::set<Literal> post;
  std::vector<std::string> objects;  // actor first

  friend bool operator==(const GroundedOperator&,
                         const GroundedOperator&) = default;
};

struct Parameter {
  std::string var;  // "?hand"
  std::string type;

  friend auto operator<=>(const Parameter&, const Parameter&) = default;
};

struct LiftedOperator {
  std::string name;
  std::vector<Parameter> params;
  std::set<Literal> pre;
  std::set<Literal> post;  // full post-state over the parameters
  std::uint64_t count = 1;

  friend bool operator==(const LiftedOperator&,
                         const LiftedOperator&) = default;
};

// Atoms whose truth value differs between the onset and end frame.
inline std::set<GroundAtom> changed_atoms(const Trace& trace,
                                          const Segment& seg) {
  return symmetric_difference(trace.frames.at(seg.onset_frame()).state,
                              trace.frames.at(seg.end_frame).state);
}

// Actor, then every object of a changed atom in order of first appearance
// (changed atoms taken in sorted order).
inline std::vector<std::string> relevant_objects(const Trace& trace,
                                                 const Segment& seg) {
  std::vector<std::string> out{seg.actor};
  for (const auto& a : changed_atoms(trace, seg))
    for (const auto& arg : a.args)
      if (std::find(out.begin(), out.end(), arg) == out.end())
        out.push_back(arg);
  return out;
}

// `active` is the set of atoms true somewhere in the trace; only those
// contribute negative literals.
inline GroundedOperator extract(const Trace& trace, const Segment& seg,
                                const std::set<GroundAtom>& active) {
  if (changed_atoms(trace, seg).empty())
    throw NoEffectSegment(seg.label + " of " + seg.actor + " at frames " +
                          std::to_string(seg.start_frame) + "-" +
                          std::to_string(seg.end_frame) + " changes nothing");
  GroundedOperator op;
  op.name = seg.label;
  op.objects = relevant_objects(trace, seg);
  const std::set<std::string> relevant(op.objects.begin(), op.objects.end());
  const State& start = trace.frames[seg.onset_frame()].state;
  const State& end = trace.frames[seg.end_frame].state;
  for (const auto& atom : active) {
    bool over_relevant = std::all_of(atom.args.begin(), atom.args.end(),
                                     [&](const auto& a) {
                                       return relevant.contains(a);
                                     });
    if (!over_relevant) continue;
    op.pre.insert({atom, start.contains(atom)});
    op.post.insert({atom, end.contains(atom)});
  }
  return op;
}

inline GroundedOperator extract(const Trace& trace, const Segment& seg) {
  return extract(trace, seg, active_atoms(trace));
}

namespace detail {

inline std::string variable_base(const std::string& type) {
  std::string out;
  for (unsigned char ch : type)
    out += std::isalnum(ch) ? static_cast<char>(std::tolower(ch)) : '_';
  return out.empty() ? "x" : out;
}

inline Literal rename(const Literal& l,
                      const std::map<std::string, std::string>& m) {
  Literal out = l;
  for (auto& arg : out.atom.args) {
    auto it = m.find(arg);
    if (it != m.end()) arg = it->second;
  }
  return out;
}

inline std::string join_literals(const std::set<Literal>& lits) {
  std::string out;
  for (const auto& l : lits) {
    if (!out.empty()) out += ";";
    out += to_string(l);
  }
  return out;
}

inline std::string serialize(const LiftedOperator& op) {
  std::string out = op.name + "(";
  for (std::size_t i = 0; i < op.params.size(); ++i) {
    if (i) out += ",";
    out += op.params[i].var + ":" + op.params[i].type;
  }
  return out + ")|pre:" + join_literals(op.pre) +
         "|post:" + join_literals(op.post);
}

}  // namespace detail

struct CanonicalForm {
  LiftedOperator op;
  std::string key;
  // permutation[i] = index in the input's params of canonical param i
  std::vector<std::size_t> permutation;
};

// Sorts parameters by type, then picks the ordering within each type group
// whose serialization is lexicographically smallest. Variable names are
// derived from type and position, so the result is invariant under
// renaming of the input's variables.
inline CanonicalForm canonicalize(const LiftedOperator& op) {
  const std::size_t m = op.params.size();
  if (m > kMaxOperatorArity)
    throw SchemaError("operator '" + op.name + "' has " + std::to_string(m) +
                      " parameters (max " +
                      std::to_string(kMaxOperatorArity) + ")");

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return op.params[a].type < op.params[b].type;
  });
  // group boundaries over `order`
  std::vector<std::pair<std::size_t, std::size_t>> groups;
  for (std::size_t i = 0; i < m;) {
    std::size_t j = i;
    while (j < m && op.params[order[j]].type == op.params[order[i]].type) ++j;
    groups.emplace_back(i, j);
    i = j;
  }

  std::vector<std::string> names(m);
  std::set<std::string> used;
  for (auto [b, e] : groups)
    for (std::size_t i = b; i < e; ++i) {
      std::string n = "?" + detail::variable_base(op.params[order[i]].type);
      if (e - b > 1) n += std::to_string(i - b + 1);
      if (!used.insert(n).second) {
        n += "_" + std::to_string(i);
        used.insert(n);
      }
      names[i] = n;
    }

  for (auto [b, e] : groups) std::sort(order.begin() + b, order.begin() + e);

  CanonicalForm best;
  bool have = false;
  while (true) {
    LiftedOperator cand;
    cand.name = op.name;
    cand.count = op.count;
    std::map<std::string, std::string> m_rename;
    for (std::size_t i = 0; i < m; ++i) {
      cand.params.push_back({names[i], op.params[order[i]].type});
      m_rename[op.params[order[i]].var] = names[i];
    }
    for (const auto& l : op.pre) cand.pre.insert(detail::rename(l, m_rename));
    for (const auto& l : op.post) cand.post.insert(detail::rename(l, m_rename));
    std::string key = detail::serialize(cand);
    if (!have || key < best.key) {
      best = {std::move(cand), std::move(key), order};
      have = true;
    }
    // odometer over per-group permutations
    std::size_t g = 0;
    for (; g < groups.size(); ++g) {
      auto [b, e] = groups[g];
      if (std::next_permutation(order.begin() + b, order.begin() + e)) break;
    }
    if (g == groups.size()) break;
  }
  return best;
}

inline std::string canonical_key(const LiftedOperator& op) {
  return canonicalize(op).key;
}

struct LiftResult {
  LiftedOperator op;
  std::vector<std::string> binding;  // object bound to each parameter
};

// Replaces instances by typed variables. Objects that occur in no literal
// are dropped from the parameter list.
inline LiftResult lift_with_binding(const GroundedOperator& g,
                                    const TypeTable& types) {
  std::set<std::string> mentioned;
  for (const auto* lits : {&g.pre, &g.post})
    for (const auto& l : *lits)
      mentioned.insert(l.atom.args.begin(), l.atom.args.end());

  LiftedOperator raw;
  raw.name = g.name;
  std::map<std::string, std::string> to_var;
  std::vector<std::string> objects;
  for (const auto& obj : g.objects) {
    if (!mentioned.contains(obj) || to_var.contains(obj)) continue;
    const std::string* t = types.type_of(obj);
    if (!t) throw TypeError("object '" + obj + "' has no type");
    std::string var = "?p" + std::to_string(objects.size());
    to_var[obj] = var;
    raw.params.push_back({var, *t});
    objects.push_back(obj);
  }
  for (const auto& obj : mentioned)
    if (!to_var.contains(obj))
      throw TypeError("literal mentions '" + obj +
                      "' which is not an operator object");
  for (const auto& l : g.pre) raw.pre.insert(detail::rename(l, to_var));
  for (const auto& l : g.post) raw.post.insert(detail::rename(l, to_var));

  CanonicalForm c = canonicalize(raw);
  LiftResult out{std::move(c.op), {}};
  for (std::size_t idx : c.permutation) out.binding.push_back(objects[idx]);
  return out;
}

inline LiftedOperator lift(const GroundedOperator& g, const TypeTable& types) {
  return lift_with_binding(g, types).op;
}

// Binds parameters positionally to `objects`.
inline GroundedOperator instantiate(const LiftedOperator& op,
                                    const std::vector<std::string>& objects) {
  if (objects.size() != op.params.size())
    throw SchemaError("operator '" + op.name + "' takes " +
                      std::to_string(op.params.size()) + " objects");
  std::map<std::string, std::string> m;
  for (std::size_t i = 0; i < objects.size(); ++i) m[op.params[i].var] = objects[i];
  GroundedOperator g;
  g.name = op.name;
  g.objects = objects;
  for (const auto& l : op.pre) g.pre.insert(detail::rename(l, m));
  for (const auto& l : op.post) g.post.insert(detail::rename(l, m));
  return g;
}

enum class MergeOutcome { added, incremented };

class OperatorLibrary {
 public:
  const Vocabulary& vocabulary() const { return vocab_; }
  const TypeTable& types() const { return types_; }
  const std::map<std::string, LiftedOperator>& operators() const { return ops_; }
  std::size_t size() const { return ops_.size(); }
  bool empty() const { return ops_.empty(); }

  // Unions predicate signatures and types; conflicts raise SchemaError.
  void absorb_schema(const Vocabulary& vocab, const TypeTable& types) {
    OperatorLibrary staged = *this;
    staged.vocab_.absorb(vocab);
    staged.types_.absorb_types(types.types_only());
    vocab_ = std::move(staged.vocab_);
    types_ = std::move(staged.types_);
  }

  MergeOutcome merge(const LiftedOperator& op) {
    if (op.count < 1) throw SchemaError("operator count must be >= 1");
    CanonicalForm c = canonicalize(op);
    check(c.op);
    auto it = ops_.find(c.key);
    if (it != ops_.end()) {
      it->second.count += op.count;
      return MergeOutcome::incremented;
    }
    ops_.emplace(std::move(c.key), std::move(c.op));
    return MergeOutcome::added;
  }

  std::map<std::string, std::uint64_t> counts() const {
    std::map<std::string, std::uint64_t> out;
    for (const auto& [k, op] : ops_) out[k] = op.count;
    return out;
  }

  // Unique action name per key: the label itself, or label-1, label-2, ...
  // (in key order) when several operators share a label.
  std::map<std::string, std::string> action_names() const {
    std::map<std::string, std::vector<std::string>> by_label;
    for (const auto& [k, op] : ops_) by_label[op.name].push_back(k);
    std::map<std::string, std::string> out;
    for (const auto& [label, keys] : by_label)
      for (std::size_t i = 0; i < keys.size(); ++i)
        out[keys[i]] =
            keys.size() == 1 ? label : label + "-" + std::to_string(i + 1);
    return out;
  }

  friend bool operator==(const OperatorLibrary&,
                         const OperatorLibrary&) = default;

 private:
  void check(const LiftedOperator& op) const {
    std::map<std::string, std::string> var_types;
    for (const auto& p : op.params) {
      if (!types_.has_type(p.type))
        throw SchemaError("operator '" + op.name + "' uses unknown type '" +
                          p.type + "'");
      var_types[p.var] = p.type;
    }
    std::set<std::string> used;
    for (const auto* lits : {&op.pre, &op.post})
      for (const auto& l : *lits) {
        try {
          check_lifted_atom(vocab_, types_, var_types, l.atom);
        } catch (const TypeError& e) {
          throw SchemaError("operator '" + op.name + "': " + e.what());
        }
        used.insert(l.atom.args.begin(), l.atom.args.end());
      }
    for (const auto& p : op.params)
      if (!used.contains(p.var))
        throw SchemaError("operator '" + op.name + "': parameter " + p.var +
                          " is unused");
    if (op.pre == op.post)
      throw SchemaError("operator '" + op.name + "' has no effect");
  }

  Vocabulary vocab_;
  TypeTable types_;
  std::map<std::string, LiftedOperator> ops_;
};

inline OperatorLibrary merge(OperatorLibrary lib, const LiftedOperator& op) {
  lib.merge(op);
  return lib;
}

inline NameTable name_table(const OperatorLibrary& lib) {
  std::set<std::string> ids;
  for (const auto& [name, _] : lib.vocabulary().signatures()) ids.insert(name);
  for (const auto& [t, _] : lib.types().types()) ids.insert(t);
  for (const auto& [_, name] : lib.action_names()) ids.insert(name);
  for (const auto& [_, op] : lib.operators())
    for (const auto& p : op.params) ids.insert(p.var);
  return NameTable(ids);
}

inline json to_json(const LiftedOperator& op) {
  json params = json::array();
  for (const auto& p : op.params)
    params.push_back({{"var", p.var}, {"type", p.type}});
  return {{"name", op.name},
          {"params", params},
          {"pre", json_io::literals_to_json(op.pre)},
          {"post", json_io::literals_to_json(op.post)},
          {"count", op.count}};
}

inline json to_json(const OperatorLibrary& lib) {
  json ops = json::array();
  for (const auto& [_, op] : lib.operators()) ops.push_back(to_json(op));
  return {{"vocabulary", json_io::vocabulary_to_json(lib.vocabulary())},
          {"types", json_io::types_to_json(lib.types())},
          {"operators", ops},
          {"pddl_names", name_table(lib).entries()}};
}

inline LiftedOperator lifted_operator_from_json(const json& j) {
  using namespace json_io;
  LiftedOperator op;
  op.name = require_string(require(j, "name", "operator"), "operator.name");
  for (const auto& p :
       require_array(require(j, "params", "operator"), "operator.params"))
    op.params.push_back(
        {require_string(require(p, "var", "param"), "param.var"),
         require_string(require(p, "type", "param"), "param.type")});
  for (const auto& l : require_array(require(j, "pre", "operator"), "pre"))
    op.pre.insert(literal_from_json(l, "operator.pre"));
  for (const auto& l : require_array(require(j, "post", "operator"), "post"))
    op.post.insert(literal_from_json(l, "operator.post"));
  const json& c = require(j, "count", "operator");
  if (!c.is_number_unsigned() && !c.is_number_integer())
    throw ParseError("operator.count: expected an integer");
  if (c.get<std::int64_t>() < 1) throw SchemaError("operator.count must be >= 1");
  op.count = c.get<std::uint64_t>();
  return op;
}

inline OperatorLibrary library_from_json(const json& j) {
  using namespace json_io;
  OperatorLibrary lib;
  TypeTable types;
  types_from_json(require(j, "types", "library"), types);
  lib.absorb_schema(vocabulary_from_json(require(j, "vocabulary", "library")),
                    types);
  for (const auto& o :
       require_array(require(j, "operators", "library"), "operators")) {
    LiftedOperator op = lifted_operator_from_json(o);
    if (lib.operators().contains(canonical_key(op)))
      throw SchemaError("duplicate operator '" + op.name +
                        "' (same canonical key)");
    lib.merge(op);
  }
  if (j.contains("pddl_names")) {
    const json& names = j.at("pddl_names");
    if (!names.is_object()) throw ParseError("pddl_names: expected an object");
    if (names.get<std::map<std::string, std::string>>() !=
        name_table(lib).entries())
      throw SchemaError("pddl_names does not match the library contents");
  }
  return lib;
}

inline void save_library(const OperatorLibrary& lib,
                         const std::filesystem::path& path) {
  json_io::write_file(path, to_json(lib));
}

inline OperatorLibrary load_library(const std::filesystem::path& path) {
  json j = json_io::read_file(path);
  try {
    return library_from_json(j);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

}  // namespace demo2pddl
