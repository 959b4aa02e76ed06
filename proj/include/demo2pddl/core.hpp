#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "demo2pddl/errors.hpp"

namespace demo2pddl {

// Implicit root of every type hierarchy (matches PDDL's `object`).
inline constexpr std::string_view kRootType = "object";

struct ObjectInstance {
  std::string id;
  std::string type_id;

  friend auto operator<=>(const ObjectInstance&,
                          const ObjectInstance&) = default;
};

struct PredicateSignature {
  std::string name;
  std::vector<std::string> arg_types;

  std::size_t arity() const { return arg_types.size(); }
  friend bool operator==(const PredicateSignature&,
                         const PredicateSignature&) = default;
};

// A predicate applied to arguments. Arguments are object ids in ground
// atoms and `?variables` in lifted ones.
struct Atom {
  std::string predicate;
  std::vector<std::string> args;

  friend auto operator<=>(const Atom&, const Atom&) = default;
};

using GroundAtom = Atom;

struct Literal {
  Atom atom;
  bool positive = true;

  friend auto operator<=>(const Literal&, const Literal&) = default;
};

inline Literal pos(Atom a) { return {std::move(a), true}; }
inline Literal neg(Atom a) { return {std::move(a), false}; }
inline Literal negate(Literal l) {
  l.positive = !l.positive;
  return l;
}

inline bool is_variable(std::string_view arg) {
  return !arg.empty() && arg.front() == '?';
}

inline std::string to_string(const Atom& a) {
  std::string out = a.predicate + "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) out += ",";
    out += a.args[i];
  }
  return out + ")";
}

inline std::string to_string(const Literal& l) {
  return (l.positive ? "" : "!") + to_string(l.atom);
}

// Closed world: atoms not in the set are false.
struct State {
  std::set<GroundAtom> true_atoms;

  bool contains(const GroundAtom& a) const { return true_atoms.contains(a); }
  friend bool operator==(const State&, const State&) = default;
};

class TypeTable {
 public:
  // Registers `type` below `parent`. The parent must already be known.
  void add_type(const std::string& type,
                const std::string& parent = std::string(kRootType)) {
    if (type == kRootType) return;
    if (type.empty()) throw SchemaError("empty type name");
    if (!has_type(parent))
      throw SchemaError("type '" + type + "' has unknown parent '" + parent +
                        "'");
    if (auto it = parent_.find(type); it != parent_.end()) {
      if (it->second != parent)
        throw SchemaError("type '" + type + "' redeclared with parent '" +
                          parent + "' (was '" + it->second + "')");
      return;
    }
    if (is_subtype(parent, type))
      throw SchemaError("type cycle through '" + type + "'");
    parent_.emplace(type, parent);
  }

  void add_instance(const std::string& id, const std::string& type) {
    if (id.empty()) throw SchemaError("empty object id");
    if (!has_type(type))
      throw SchemaError("object '" + id + "' has undeclared type '" + type +
                        "'");
    auto [it, inserted] = instance_.emplace(id, type);
    if (!inserted && it->second != type)
      throw SchemaError("object '" + id + "' declared twice with types '" +
                        it->second + "' and '" + type + "'");
  }

  bool has_type(std::string_view type) const {
    return type == kRootType || parent_.contains(std::string(type));
  }

  const std::string* type_of(const std::string& id) const {
    auto it = instance_.find(id);
    return it == instance_.end() ? nullptr : &it->second;
  }

  bool is_subtype(const std::string& type, const std::string& ancestor) const {
    if (ancestor == kRootType) return has_type(type);
    std::string cur = type;
    for (std::size_t guard = 0; guard <= parent_.size(); ++guard) {
      if (cur == ancestor) return true;
      auto it = parent_.find(cur);
      if (it == parent_.end()) return false;
      cur = it->second;
    }
    return false;
  }

  // type -> parent, root type excluded
  const std::map<std::string, std::string>& types() const { return parent_; }
  // object id -> type
  const std::map<std::string, std::string>& instances() const {
    return instance_;
  }

  TypeTable types_only() const {
    TypeTable t;
    t.parent_ = parent_;
    return t;
  }

  // Adds every type of `other`, parents first.
  void absorb_types(const TypeTable& other) {
    std::vector<std::pair<std::string, std::string>> pending(
        other.parent_.begin(), other.parent_.end());
    while (!pending.empty()) {
      std::size_t before = pending.size();
      std::erase_if(pending, [&](const auto& tp) {
        if (!has_type(tp.second)) return false;
        add_type(tp.first, tp.second);
        return true;
      });
      if (pending.size() == before)
        throw SchemaError("unresolvable type parent for '" +
                          pending.front().first + "'");
    }
  }

  friend bool operator==(const TypeTable&, const TypeTable&) = default;

 private:
  std::map<std::string, std::string> parent_;
  std::map<std::string, std::string> instance_;
};

class Vocabulary {
 public:
  void add(const PredicateSignature& sig) {
    if (sig.name.empty()) throw SchemaError("empty predicate name");
    auto [it, inserted] = sigs_.emplace(sig.name, sig);
    if (!inserted && !(it->second == sig))
      throw SchemaError("predicate '" + sig.name +
                        "' declared with conflicting signatures");
  }

  void absorb(const Vocabulary& other) {
    for (const auto& [_, sig] : other.sigs_) add(sig);
  }

  const PredicateSignature* find(const std::string& name) const {
    auto it = sigs_.find(name);
    return it == sigs_.end() ? nullptr : &it->second;
  }

  const std::map<std::string, PredicateSignature>& signatures() const {
    return sigs_;
  }
  std::size_t size() const { return sigs_.size(); }

  friend bool operator==(const Vocabulary&, const Vocabulary&) = default;

 private:
  std::map<std::string, PredicateSignature> sigs_;
};

// Predicate vocabulary plus type table: what is needed to type-check atoms.
struct Schema {
  Vocabulary vocabulary;
  TypeTable types;
};

// Throws TypeError unless `a` is a well-typed ground atom.
inline void check_atom(const Vocabulary& vocab, const TypeTable& types,
                       const Atom& a) {
  const PredicateSignature* sig = vocab.find(a.predicate);
  if (!sig) throw TypeError("unknown predicate in " + to_string(a));
  if (sig->arity() != a.args.size())
    throw TypeError("arity mismatch in " + to_string(a) + ": expected " +
                    std::to_string(sig->arity()));
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    const std::string* t = types.type_of(a.args[i]);
    if (!t) throw TypeError("undeclared object '" + a.args[i] + "' in " +
                            to_string(a));
    if (!types.is_subtype(*t, sig->arg_types[i]))
      throw TypeError("argument " + std::to_string(i + 1) + " of " +
                      to_string(a) + " has type '" + *t + "', expected '" +
                      sig->arg_types[i] + "'");
  }
}

inline void check_atom(const Schema& s, const Atom& a) {
  check_atom(s.vocabulary, s.types, a);
}

// Lifted variant: arguments are variables typed by `var_types`.
inline void check_lifted_atom(const Vocabulary& vocab, const TypeTable& types,
                              const std::map<std::string, std::string>& var_types,
                              const Atom& a) {
  const PredicateSignature* sig = vocab.find(a.predicate);
  if (!sig) throw TypeError("unknown predicate in " + to_string(a));
  if (sig->arity() != a.args.size())
    throw TypeError("arity mismatch in " + to_string(a));
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    auto it = var_types.find(a.args[i]);
    if (it == var_types.end())
      throw TypeError("unbound variable '" + a.args[i] + "' in " +
                      to_string(a));
    if (!types.is_subtype(it->second, sig->arg_types[i]))
      throw TypeError("variable " + a.args[i] + " of type '" + it->second +
                      "' does not fit '" + sig->arg_types[i] + "' in " +
                      to_string(a));
  }
}

inline bool holds(const State& state, const Literal& literal) {
  return state.contains(literal.atom) == literal.positive;
}

// Type-checked evaluation.
inline bool holds(const Schema& schema, const State& state,
                  const Literal& literal) {
  check_atom(schema, literal.atom);
  return holds(state, literal);
}

template <typename Literals>
bool holds_all(const State& state, const Literals& literals) {
  return std::all_of(std::begin(literals), std::end(literals),
                     [&](const Literal& l) { return holds(state, l); });
}

// STRIPS progression: (state \ dels) ∪ adds.
inline State apply(const State& state, const std::set<GroundAtom>& adds,
                   const std::set<GroundAtom>& dels) {
  for (const auto& a : adds)
    if (dels.contains(a))
      throw InvalidEffect(to_string(a) + " is both added and deleted");
  State out = state;
  for (const auto& d : dels) out.true_atoms.erase(d);
  out.true_atoms.insert(adds.begin(), adds.end());
  return out;
}

// Atoms in exactly one of the two states.
inline std::set<GroundAtom> symmetric_difference(const State& a,
                                                 const State& b) {
  std::set<GroundAtom> out;
  std::set_symmetric_difference(a.true_atoms.begin(), a.true_atoms.end(),
                                b.true_atoms.begin(), b.true_atoms.end(),
                                std::inserter(out, out.end()));
  return out;
}

}  // namespace demo2pddl
