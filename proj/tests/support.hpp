#pragma once

// Test-side oracles and random generators. Nothing here calls the code it is
// used to check: enumeration, search and isomorphism are done the slow way.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "demo2pddl/demo2pddl.hpp"

namespace demo2pddl::oracle {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(DEMO2PDDL_DATA_DIR) / name;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("demo2pddl_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Flat type lookup, independent of TypeTable.
inline bool is_a(const std::map<std::string, std::string>& parent, std::string t,
                 const std::string& want) {
  while (true) {
    if (t == want) return true;
    if (t == kRootType) return false;
    auto it = parent.find(t);
    if (it == parent.end()) return want == kRootType;
    t = it->second;
  }
}

// ------------------------------------------------------------ enumerators

// Odometer over objects^n; keeps tuples that are pairwise distinct (unless
// `repeats`) and match `types` positionally.
inline std::vector<std::vector<std::string>> typed_tuples(
    const std::vector<ObjectInstance>& objects, const std::vector<std::string>& types,
    const std::map<std::string, std::string>& parent, bool repeats = false) {
  std::vector<std::vector<std::string>> out;
  const std::size_t n = types.size();
  if (n == 0) return {{}};
  if (objects.empty()) return out;
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    std::vector<std::string> tuple;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      const auto& o = objects[idx[i]];
      ok = is_a(parent, o.type_id, types[i]);
      tuple.push_back(o.id);
    }
    if (ok && !repeats) {
      std::set<std::string> distinct(tuple.begin(), tuple.end());
      ok = distinct.size() == tuple.size();
    }
    if (ok) out.push_back(tuple);
    std::size_t k = 0;
    while (k < n && ++idx[k] == objects.size()) idx[k++] = 0;
    if (k == n) break;
  }
  return out;
}

inline std::map<std::string, std::string> parents_of(const TypeTable& t) {
  return t.types();
}

// All literals over `objects` the extraction rule admits at `state`: positive
// when true, negative when false but true in some frame of `trace`.
inline std::set<Literal> brute_force_literals(const Trace& trace,
                                              const std::vector<std::string>& objects,
                                              const State& state) {
  std::vector<ObjectInstance> objs;
  for (const auto& id : objects) objs.push_back({id, *trace.types.type_of(id)});
  const auto parent = parents_of(trace.types);
  std::set<Literal> out;
  for (const auto& [name, sig] : trace.vocabulary.signatures())
    for (auto& args : typed_tuples(objs, sig.arg_types, parent, true)) {
      Atom a{name, args};
      bool ever = false;
      for (const auto& f : trace.frames) ever = ever || f.state.true_atoms.count(a);
      if (state.true_atoms.count(a))
        out.insert(pos(a));
      else if (ever)
        out.insert(neg(a));
    }
  return out;
}

// ------------------------------------------------------------ search oracle

struct OracleResult {
  std::optional<std::uint64_t> cost;
  std::size_t reachable = 0;
};

// Plain Dijkstra over std::set<Atom> states with literal-by-literal checks.
inline OracleResult dijkstra(const std::vector<GroundedAction>& actions,
                             const State& init, const std::vector<Literal>& goal,
                             std::size_t cap = 200'000) {
  auto sat = [](const std::set<Atom>& s, const std::vector<Literal>& lits) {
    for (const auto& l : lits)
      if ((s.count(l.atom) > 0) != l.positive) return false;
    return true;
  };
  using Item = std::pair<std::uint64_t, std::set<Atom>>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  std::map<std::set<Atom>, std::uint64_t> best;
  best[init.true_atoms] = 0;
  open.push({0, init.true_atoms});
  OracleResult r;
  std::optional<std::uint64_t> found;
  while (!open.empty()) {
    auto [g, s] = open.top();
    open.pop();
    if (best[s] < g) continue;
    if (!found && sat(s, goal)) found = g;
    for (const auto& a : actions) {
      if (!sat(s, a.pre)) continue;
      std::set<Atom> next;
      for (const auto& x : s)
        if (!a.dels.count(x)) next.insert(x);
      next.insert(a.adds.begin(), a.adds.end());
      auto it = best.find(next);
      if (it == best.end() || g + a.cost < it->second) {
        best[next] = g + a.cost;
        open.push({g + a.cost, next});
      }
    }
    if (best.size() > cap) break;
  }
  r.cost = found;
  r.reachable = best.size();
  return r;
}

// ------------------------------------------------------------ isomorphism

// Same name and some type-preserving bijection of parameters maps a onto b.
inline bool isomorphic(const LiftedOperator& a, const LiftedOperator& b) {
  if (a.name != b.name || a.params.size() != b.params.size()) return false;
  std::vector<std::size_t> perm(a.params.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  do {
    bool typed = true;
    std::map<std::string, std::string> m;
    for (std::size_t i = 0; i < perm.size(); ++i) {
      typed = typed && a.params[i].type == b.params[perm[i]].type;
      m[a.params[i].var] = b.params[perm[i]].var;
    }
    if (!typed) continue;
    auto map_set = [&](const std::set<Literal>& lits) {
      std::set<Literal> out;
      for (auto l : lits) {
        for (auto& x : l.atom.args) x = m.at(x);
        out.insert(l);
      }
      return out;
    };
    if (map_set(a.pre) == b.pre && map_set(a.post) == b.post) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

// ------------------------------------------------------------ generators

struct RandomSchema {
  Vocabulary vocab;
  TypeTable types;
  std::vector<std::string> type_names;
};

// A few flat types (one with a subtype) and predicates of arity 0..2.
inline RandomSchema random_schema(std::mt19937_64& rng, std::size_t n_preds = 4) {
  RandomSchema s;
  s.types.add_type("Thing");
  s.types.add_type("Block", "Thing");
  s.types.add_type("Gripper");
  s.type_names = {"Thing", "Block", "Gripper"};
  const std::vector<std::string> arg_types{"Thing", "Block", "Gripper", "object"};
  std::uniform_int_distribution<int> arity(0, 2), ty(0, 3);
  for (std::size_t i = 0; i < n_preds; ++i) {
    PredicateSignature sig{"p" + std::to_string(i) + (i % 2 ? "Up" : "_x"), {}};
    int a = i == 0 ? 1 : arity(rng);
    for (int k = 0; k < a; ++k) sig.arg_types.push_back(arg_types[ty(rng)]);
    s.vocab.add(sig);
  }
  return s;
}

// Variable atoms for predicate `sig` using parameters of matching type.
inline std::vector<Atom> lifted_atoms(const PredicateSignature& sig,
                                      const std::vector<Parameter>& params,
                                      const TypeTable& types) {
  std::vector<ObjectInstance> as_objects;
  for (const auto& p : params) as_objects.push_back({p.var, p.type});
  std::vector<Atom> out;
  for (auto& args : typed_tuples(as_objects, sig.arg_types, types.types(), true))
    out.push_back({sig.name, args});
  return out;
}

// Random well-formed lifted operator: every parameter used, pre != post,
// no literal both positive and negative. Empty optional if the draw failed.
inline std::optional<LiftedOperator> random_operator(std::mt19937_64& rng,
                                                     const RandomSchema& s,
                                                     const std::string& name) {
  std::uniform_int_distribution<int> n_params(1, 3), pick_type(0, 2), coin(0, 1);
  LiftedOperator op;
  op.name = name;
  std::map<std::string, int> seen;
  const int n = n_params(rng);
  for (int i = 0; i < n; ++i) {
    const std::string& t = s.type_names[pick_type(rng)];
    op.params.push_back({"?v" + std::to_string(i), t});
  }
  std::vector<Atom> pool;
  for (const auto& [_, sig] : s.vocab.signatures())
    for (auto& a : lifted_atoms(sig, op.params, s.types)) pool.push_back(a);
  if (pool.empty()) return std::nullopt;
  std::shuffle(pool.begin(), pool.end(), rng);
  std::uniform_int_distribution<std::size_t> take(1, std::min<std::size_t>(pool.size(), 5));
  pool.resize(take(rng));
  bool changed = false;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const bool before = coin(rng);
    bool after = coin(rng) ? !before : before;
    if (i + 1 == pool.size() && !changed) after = !before;
    changed = changed || before != after;
    op.pre.insert({pool[i], before});
    op.post.insert({pool[i], after});
  }
  std::set<std::string> used;
  for (const auto& l : op.pre) used.insert(l.atom.args.begin(), l.atom.args.end());
  std::erase_if(op.params, [&](const Parameter& p) { return !used.contains(p.var); });
  return op;
}

inline OperatorLibrary random_library(std::mt19937_64& rng, std::size_t target,
                                      std::size_t n_preds = 4) {
  RandomSchema s = random_schema(rng, n_preds);
  OperatorLibrary lib;
  lib.absorb_schema(s.vocab, s.types);
  std::uniform_int_distribution<int> label(0, 5), count(1, 20);
  const std::vector<std::string> names{"move", "pick", "Place", "push_it", "turn", "wait"};
  std::size_t guard = 0;
  while (lib.size() < target && ++guard < 100'000) {
    auto op = random_operator(rng, s, names[label(rng)]);
    if (!op) continue;
    op->count = count(rng);
    lib.merge(*op);
  }
  return lib;
}

inline std::vector<ObjectInstance> random_objects(std::mt19937_64& rng,
                                                  std::size_t n) {
  const std::vector<std::string> types{"Thing", "Block", "Gripper"};
  std::uniform_int_distribution<int> ty(0, 2);
  std::vector<ObjectInstance> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back({"Obj_" + std::string(1, static_cast<char>('a' + i)), types[ty(rng)]});
  return out;
}

inline std::vector<Atom> ground_atoms(const Vocabulary& vocab, const TypeTable& types,
                                      const std::vector<ObjectInstance>& objects) {
  std::vector<Atom> out;
  for (const auto& [name, sig] : vocab.signatures())
    for (auto& args : typed_tuples(objects, sig.arg_types, types.types(), true))
      out.push_back({name, args});
  return out;
}

struct RandomTask {
  OperatorLibrary lib;
  std::vector<ObjectInstance> objects;
  Schema schema;  // library schema plus the object instances
  State init;
  std::vector<Literal> goal;
};

// Library plus a small problem over it; the ground atom space stays small
// enough (<= 16 atoms) that every reachable space is tiny.
inline RandomTask random_task(std::mt19937_64& rng) {
  RandomTask t;
  while (true) {
    std::uniform_int_distribution<int> n_ops(2, 7), n_objs(2, 4);
    t.lib = random_library(rng, n_ops(rng), 4);
    t.objects = random_objects(rng, n_objs(rng));
    t.schema = {t.lib.vocabulary(), t.lib.types()};
    for (const auto& o : t.objects) t.schema.types.add_instance(o.id, o.type_id);
    const auto atoms = ground_atoms(t.schema.vocabulary, t.schema.types, t.objects);
    if (atoms.empty() || atoms.size() > 16) continue;
    std::uniform_int_distribution<int> coin(0, 1);
    t.init = {};
    for (const auto& a : atoms)
      if (coin(rng)) t.init.true_atoms.insert(a);
    std::vector<Atom> shuffled = atoms;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    std::uniform_int_distribution<std::size_t> n_goal(1, std::min<std::size_t>(3, atoms.size()));
    t.goal.clear();
    for (std::size_t i = 0, k = n_goal(rng); i < k; ++i)
      t.goal.push_back({shuffled[i], coin(rng) == 1});
    std::sort(t.goal.begin(), t.goal.end());
    return t;
  }
}

}  // namespace demo2pddl::oracle
