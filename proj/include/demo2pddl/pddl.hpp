#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "demo2pddl/core.hpp"
#include "demo2pddl/learning.hpp"
#include "demo2pddl/names.hpp"
#include "demo2pddl/planner.hpp"

namespace demo2pddl::pddl {

inline const std::vector<std::string>& supported_requirements() {
  static const std::vector<std::string> reqs{":strips", ":typing",
                                             ":negative-preconditions",
                                             ":action-costs"};
  return reqs;
}

struct TypeDecl {
  std::string name;
  std::string parent = std::string(kRootType);
  friend auto operator<=>(const TypeDecl&, const TypeDecl&) = default;
};

struct PredicateDecl {
  std::string name;
  std::vector<std::string> arg_types;
  friend auto operator<=>(const PredicateDecl&, const PredicateDecl&) = default;
};

struct ActionDecl {
  std::string name;
  std::vector<Parameter> params;
  std::vector<Literal> precondition;
  std::vector<Literal> effect;         // negative literals are deletes
  std::optional<std::uint64_t> cost;  // (increase (total-cost) n)
  friend bool operator==(const ActionDecl&, const ActionDecl&) = default;
};

struct DomainDoc {
  std::string name;
  std::vector<std::string> requirements;
  std::vector<TypeDecl> types;
  std::vector<PredicateDecl> predicates;
  std::vector<ActionDecl> actions;
  friend bool operator==(const DomainDoc&, const DomainDoc&) = default;
};

struct ProblemDoc {
  std::string name;
  std::string domain;
  std::vector<ObjectInstance> objects;
  std::vector<Atom> init;
  std::vector<Literal> goal;
  bool total_cost = true;  // (= (total-cost) 0) and the minimize metric
  friend bool operator==(const ProblemDoc&, const ProblemDoc&) = default;
};

// ---------------------------------------------------------------- printing

namespace detail {

inline std::string atom_text(const Atom& a) {
  std::string out = "(" + a.predicate;
  for (const auto& arg : a.args) out += " " + arg;
  return out + ")";
}

inline std::string literal_text(const Literal& l) {
  return l.positive ? atom_text(l.atom) : "(not " + atom_text(l.atom) + ")";
}

inline std::string conjunction(const std::vector<Literal>& lits,
                               const std::string& indent,
                               const std::vector<std::string>& extra = {}) {
  if (lits.empty() && extra.empty()) return "(and)";
  std::string out = "(and\n";
  for (const auto& l : lits) out += indent + "  " + literal_text(l) + "\n";
  for (const auto& e : extra) out += indent + "  " + e + "\n";
  return out + indent + ")";
}

}  // namespace detail

inline std::string print_domain(const DomainDoc& doc) {
  std::ostringstream os;
  os << "(define (domain " << doc.name << ")\n";
  os << "  (:requirements";
  for (const auto& r : doc.requirements) os << " " << r;
  os << ")\n";
  if (!doc.types.empty()) {
    os << "  (:types\n";
    for (const auto& t : doc.types) os << "    " << t.name << " - " << t.parent << "\n";
    os << "  )\n";
  }
  if (!doc.predicates.empty()) {
    os << "  (:predicates\n";
    for (const auto& p : doc.predicates) {
      os << "    (" << p.name;
      for (std::size_t i = 0; i < p.arg_types.size(); ++i)
        os << " ?a" << i + 1 << " - " << p.arg_types[i];
      os << ")\n";
    }
    os << "  )\n";
  }
  const bool costs = std::find(doc.requirements.begin(), doc.requirements.end(),
                               ":action-costs") != doc.requirements.end();
  if (costs) os << "  (:functions\n    (total-cost) - number\n  )\n";
  for (const auto& a : doc.actions) {
    os << "  (:action " << a.name << "\n";
    os << "    :parameters (";
    for (std::size_t i = 0; i < a.params.size(); ++i)
      os << (i ? " " : "") << a.params[i].var << " - " << a.params[i].type;
    os << ")\n";
    os << "    :precondition " << detail::conjunction(a.precondition, "    ")
       << "\n";
    std::vector<std::string> extra;
    if (a.cost)
      extra.push_back("(increase (total-cost) " + std::to_string(*a.cost) + ")");
    os << "    :effect " << detail::conjunction(a.effect, "    ", extra) << "\n";
    os << "  )\n";
  }
  os << ")\n";
  return os.str();
}

inline std::string print_problem(const ProblemDoc& doc) {
  std::ostringstream os;
  os << "(define (problem " << doc.name << ")\n";
  os << "  (:domain " << doc.domain << ")\n";
  os << "  (:objects\n";
  for (const auto& o : doc.objects) os << "    " << o.id << " - " << o.type_id << "\n";
  os << "  )\n";
  os << "  (:init\n";
  if (doc.total_cost) os << "    (= (total-cost) 0)\n";
  for (const auto& a : doc.init) os << "    " << detail::atom_text(a) << "\n";
  os << "  )\n";
  os << "  (:goal " << detail::conjunction(doc.goal, "  ") << ")\n";
  if (doc.total_cost) os << "  (:metric minimize (total-cost))\n";
  os << ")\n";
  return os.str();
}

// ------------------------------------------------- building from the model

// Effects are emitted as the delta post \ pre; names go through `names`.
inline DomainDoc domain_doc(const OperatorLibrary& lib, const CostModel& costs,
                            const std::string& name = "learned") {
  if (lib.empty()) throw EmptyDomain("operator library is empty");
  const NameTable names = name_table(lib);
  DomainDoc doc;
  doc.name = pddl_identifier(name);
  doc.requirements = supported_requirements();
  for (const auto& [t, parent] : lib.types().types())
    doc.types.push_back({names.pddl(t), names.pddl(parent)});
  for (const auto& [p, sig] : lib.vocabulary().signatures()) {
    PredicateDecl d{names.pddl(p), {}};
    for (const auto& t : sig.arg_types) d.arg_types.push_back(names.pddl(t));
    doc.predicates.push_back(std::move(d));
  }
  auto rename_atom = [&](const Atom& a) {
    Atom out{names.pddl(a.predicate), {}};
    for (const auto& arg : a.args) out.args.push_back(names.pddl(arg));
    return out;
  };
  for (const auto& s : schemas_from_library(lib, costs)) {
    ActionDecl a;
    a.name = names.pddl(s.name);
    for (const auto& p : s.params)
      a.params.push_back({names.pddl(p.var), names.pddl(p.type)});
    for (const auto& l : s.pre)
      a.precondition.push_back({rename_atom(l.atom), l.positive});
    for (const auto& x : s.adds) a.effect.push_back(pos(rename_atom(x)));
    for (const auto& x : s.dels) a.effect.push_back(neg(rename_atom(x)));
    std::sort(a.precondition.begin(), a.precondition.end());
    std::sort(a.effect.begin(), a.effect.end());
    a.cost = s.cost;
    doc.actions.push_back(std::move(a));
  }
  std::sort(doc.types.begin(), doc.types.end());
  std::sort(doc.predicates.begin(), doc.predicates.end());
  std::sort(doc.actions.begin(), doc.actions.end(),
            [](const auto& x, const auto& y) { return x.name < y.name; });
  return doc;
}

inline std::string emit_domain(const OperatorLibrary& lib, const CostModel& costs,
                               const std::string& name = "learned") {
  return print_domain(domain_doc(lib, costs, name));
}

// Type-checks init and goal against `schema`; an empty goal is rejected.
inline ProblemDoc problem_doc(const Schema& schema,
                              const std::vector<ObjectInstance>& objects,
                              const State& init, const std::vector<Literal>& goal,
                              const std::string& name = "task",
                              const std::string& domain = "learned") {
  if (goal.empty()) throw ValidationError("goal must contain at least one literal");
  TypeTable types = schema.types;
  for (const auto& o : objects) {
    if (!types.has_type(o.type_id)) types.add_type(o.type_id);
    types.add_instance(o.id, o.type_id);
  }
  for (const auto& a : init.true_atoms) check_atom(schema.vocabulary, types, a);
  for (const auto& l : goal) check_atom(schema.vocabulary, types, l.atom);

  std::set<std::string> ids;
  for (const auto& o : objects) ids.insert(o.id);
  for (const auto& [p, _] : schema.vocabulary.signatures()) ids.insert(p);
  for (const auto& [t, _] : types.types()) ids.insert(t);
  const NameTable names(ids);
  auto rename_atom = [&](const Atom& a) {
    Atom out{names.pddl(a.predicate), {}};
    for (const auto& arg : a.args) out.args.push_back(names.pddl(arg));
    return out;
  };

  ProblemDoc doc;
  doc.name = pddl_identifier(name);
  doc.domain = pddl_identifier(domain);
  for (const auto& o : objects)
    doc.objects.push_back({names.pddl(o.id), names.pddl(o.type_id)});
  for (const auto& a : init.true_atoms) doc.init.push_back(rename_atom(a));
  for (const auto& l : goal) doc.goal.push_back({rename_atom(l.atom), l.positive});
  std::sort(doc.objects.begin(), doc.objects.end());
  std::sort(doc.init.begin(), doc.init.end());
  std::sort(doc.goal.begin(), doc.goal.end());
  doc.goal.erase(std::unique(doc.goal.begin(), doc.goal.end()), doc.goal.end());
  return doc;
}

inline std::string emit_problem(const Schema& schema,
                                const std::vector<ObjectInstance>& objects,
                                const State& init, const std::vector<Literal>& goal,
                                const std::string& name = "task",
                                const std::string& domain = "learned") {
  return print_problem(problem_doc(schema, objects, init, goal, name, domain));
}

// ------------------------------------------------------------------ parsing

struct SExpr {
  bool is_list = false;
  std::string token;
  std::vector<SExpr> items;
  std::size_t line = 1;
  std::size_t column = 1;
};

// Identifiers are lowercased; ';' starts a comment.
inline SExpr read_sexpr(const std::string& text) {
  std::size_t i = 0, line = 1, col = 1;
  auto advance = [&] {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++i;
  };
  auto skip = [&] {
    while (i < text.size()) {
      if (std::isspace(static_cast<unsigned char>(text[i]))) {
        advance();
      } else if (text[i] == ';') {
        while (i < text.size() && text[i] != '\n') advance();
      } else {
        break;
      }
    }
  };
  std::vector<SExpr> stack;
  std::optional<SExpr> root;
  skip();
  if (i >= text.size()) throw SyntaxError("empty input", line, col);
  while (i < text.size()) {
    if (root) throw SyntaxError("trailing text after expression", line, col);
    const char c = text[i];
    if (c == '(') {
      SExpr e;
      e.is_list = true;
      e.line = line;
      e.column = col;
      stack.push_back(std::move(e));
      advance();
    } else if (c == ')') {
      if (stack.empty()) throw SyntaxError("unbalanced ')'", line, col);
      SExpr done = std::move(stack.back());
      stack.pop_back();
      advance();
      if (stack.empty())
        root = std::move(done);
      else
        stack.back().items.push_back(std::move(done));
    } else {
      SExpr e;
      e.line = line;
      e.column = col;
      while (i < text.size() && text[i] != '(' && text[i] != ')' && text[i] != ';' &&
             !std::isspace(static_cast<unsigned char>(text[i]))) {
        e.token += static_cast<char>(std::tolower(static_cast<unsigned char>(text[i])));
        advance();
      }
      if (stack.empty()) throw SyntaxError("expected '('", e.line, e.column);
      stack.back().items.push_back(std::move(e));
    }
    skip();
  }
  if (!stack.empty())
    throw SyntaxError("unclosed '('", stack.back().line, stack.back().column);
  return std::move(*root);
}

namespace detail {

[[noreturn]] inline void fail(const SExpr& at, const std::string& msg) {
  throw SyntaxError(msg, at.line, at.column);
}

[[noreturn]] inline void unsupported(const SExpr& at, const std::string& what) {
  throw UnsupportedFeature("unsupported PDDL feature: " + what, at.line, at.column);
}

inline bool is_token(const SExpr& e, std::string_view t) {
  return !e.is_list && e.token == t;
}

inline const std::string& token(const SExpr& e, const char* what) {
  if (e.is_list || e.token.empty()) fail(e, std::string("expected ") + what);
  return e.token;
}

inline const SExpr& list(const SExpr& e, const char* what) {
  if (!e.is_list) fail(e, std::string("expected ") + what);
  return e;
}

inline const std::string& head(const SExpr& e) {
  static const std::string none;
  return e.is_list && !e.items.empty() && !e.items[0].is_list ? e.items[0].token
                                                                : none;
}

// `a b - t c - u d` -> [(a,t),(b,t),(c,u),(d,object)]
inline std::vector<std::pair<std::string, std::string>> typed_list(
    const std::vector<SExpr>& items, std::size_t from) {
  std::vector<std::pair<std::string, std::string>> out;
  std::vector<std::string> pending;
  for (std::size_t i = from; i < items.size(); ++i) {
    const SExpr& e = items[i];
    if (is_token(e, "-")) {
      if (pending.empty() || i + 1 >= items.size()) fail(e, "dangling '-'");
      const SExpr& t = items[++i];
      if (t.is_list) {
        if (head(t) == "either") unsupported(t, "either types");
        fail(t, "expected a type name");
      }
      for (auto& p : pending) out.emplace_back(std::move(p), t.token);
      pending.clear();
    } else {
      pending.push_back(token(e, "a name"));
    }
  }
  for (auto& p : pending) out.emplace_back(std::move(p), std::string(kRootType));
  return out;
}

inline Atom parse_atom(const SExpr& e) {
  list(e, "an atom");
  if (e.items.empty()) fail(e, "empty atom");
  const std::string& h = head(e);
  if (h == "=") unsupported(e, "equality");
  Atom a{token(e.items[0], "a predicate name"), {}};
  for (std::size_t i = 1; i < e.items.size(); ++i)
    a.args.push_back(token(e.items[i], "an argument"));
  return a;
}

inline Literal parse_literal(const SExpr& e) {
  const std::string& h = head(e);
  if (h == "not") {
    if (e.items.size() != 2) fail(e, "'not' takes one atom");
    const std::string& inner = head(e.items[1]);
    if (inner == "and" || inner == "or" || inner == "not")
      unsupported(e, "negated formulas");
    return neg(parse_atom(e.items[1]));
  }
  if (h == "or" || h == "imply" || h == "exists" || h == "forall")
    unsupported(e, "'" + h + "' formulas");
  if (h == "when") unsupported(e, "conditional effects");
  return pos(parse_atom(e));
}

// (and l*) | l | ()
inline std::vector<const SExpr*> conjuncts(const SExpr& e) {
  list(e, "a formula");
  std::vector<const SExpr*> out;
  if (e.items.empty()) return out;
  if (head(e) == "and") {
    for (std::size_t i = 1; i < e.items.size(); ++i) out.push_back(&e.items[i]);
  } else {
    out.push_back(&e);
  }
  return out;
}

inline std::pair<const SExpr*, std::string> define_header(const SExpr& root,
                                                          const char* kind) {
  list(root, "(define ...)");
  if (root.items.size() < 2 || !is_token(root.items[0], "define"))
    fail(root, "expected (define ...)");
  const SExpr& h = root.items[1];
  if (!h.is_list || h.items.size() != 2 || !is_token(h.items[0], kind))
    fail(h, std::string("expected (") + kind + " <name>)");
  return {&h, token(h.items[1], "a name")};
}

inline void check_atom_decl(const SExpr& at, const Atom& a,
                            const std::map<std::string, std::size_t>& arity) {
  auto it = arity.find(a.predicate);
  if (it == arity.end()) fail(at, "undeclared predicate '" + a.predicate + "'");
  if (it->second != a.args.size())
    fail(at, "predicate '" + a.predicate + "' expects " +
                 std::to_string(it->second) + " arguments");
}

inline ActionDecl parse_action(const SExpr& e,
                               const std::map<std::string, std::size_t>& arity) {
  ActionDecl a;
  if (e.items.size() < 2) fail(e, "action without a name");
  a.name = token(e.items[1], "an action name");
  std::set<std::string> vars;
  for (std::size_t i = 2; i < e.items.size(); i += 2) {
    const std::string& key = token(e.items[i], "an action keyword");
    if (i + 1 >= e.items.size()) fail(e.items[i], "missing value for " + key);
    const SExpr& v = e.items[i + 1];
    if (key == ":parameters") {
      for (auto& [var, type] : typed_list(list(v, "a parameter list").items, 0)) {
        if (var.front() != '?') fail(v, "parameter '" + var + "' must start with '?'");
        vars.insert(var);
        a.params.push_back({var, type});
      }
    } else if (key == ":precondition") {
      for (const SExpr* c : conjuncts(v)) {
        Literal l = parse_literal(*c);
        check_atom_decl(*c, l.atom, arity);
        a.precondition.push_back(std::move(l));
      }
    } else if (key == ":effect") {
      for (const SExpr* c : conjuncts(v)) {
        const std::string& h = head(*c);
        if (h == "increase") {
          if (c->items.size() != 3 || head(c->items[1]) != "total-cost" ||
              c->items[1].items.size() != 1)
            unsupported(*c, "numeric effects other than total-cost");
          const std::string& n = token(c->items[2], "a cost");
          if (n.empty() || !std::all_of(n.begin(), n.end(), ::isdigit) ||
              std::stoull(n) == 0)
            unsupported(c->items[2], "non-positive or non-integer action cost");
          if (a.cost) fail(*c, "duplicate cost increase");
          a.cost = std::stoull(n);
          continue;
        }
        if (h == "forall") unsupported(*c, "universal effects");
        Literal l = parse_literal(*c);
        check_atom_decl(*c, l.atom, arity);
        a.effect.push_back(std::move(l));
      }
    } else {
      unsupported(e.items[i], "action keyword " + key);
    }
  }
  for (const auto* lits : {&a.precondition, &a.effect})
    for (const auto& l : *lits)
      for (const auto& arg : l.atom.args)
        if (!vars.contains(arg))
          fail(e, "action '" + a.name + "' uses unbound term '" + arg + "'");
  return a;
}

}  // namespace detail

inline DomainDoc parse_domain(const std::string& text) {
  using namespace detail;
  const SExpr root = read_sexpr(text);
  DomainDoc doc;
  doc.name = define_header(root, "domain").second;
  std::map<std::string, std::size_t> arity;
  bool costs_declared = false;
  for (std::size_t i = 2; i < root.items.size(); ++i) {
    const SExpr& sec = list(root.items[i], "a domain section");
    const std::string& kind = head(sec);
    if (kind == ":requirements") {
      for (std::size_t j = 1; j < sec.items.size(); ++j) {
        const std::string& r = token(sec.items[j], "a requirement");
        const auto& ok = supported_requirements();
        if (std::find(ok.begin(), ok.end(), r) == ok.end())
          unsupported(sec.items[j], "requirement " + r);
        doc.requirements.push_back(r);
      }
    } else if (kind == ":types") {
      for (auto& [t, parent] : typed_list(sec.items, 1))
        doc.types.push_back({t, parent});
    } else if (kind == ":predicates") {
      for (std::size_t j = 1; j < sec.items.size(); ++j) {
        const SExpr& p = list(sec.items[j], "a predicate declaration");
        if (p.items.empty()) fail(p, "empty predicate declaration");
        PredicateDecl d{token(p.items[0], "a predicate name"), {}};
        for (auto& [_, t] : typed_list(p.items, 1)) d.arg_types.push_back(t);
        arity[d.name] = d.arg_types.size();
        doc.predicates.push_back(std::move(d));
      }
    } else if (kind == ":functions") {
      const auto& items = sec.items;
      bool ok = items.size() >= 2 && head(items[1]) == "total-cost" &&
                items[1].items.size() == 1 &&
                (items.size() == 2 ||
                 (items.size() == 4 && is_token(items[2], "-") &&
                  is_token(items[3], "number")));
      if (!ok) unsupported(sec, "functions other than total-cost");
      costs_declared = true;
    } else if (kind == ":action") {
      doc.actions.push_back(parse_action(sec, arity));
    } else if (kind == ":durative-action") {
      unsupported(sec, "durative actions");
    } else if (kind == ":constants" || kind == ":derived" || kind == ":process" ||
               kind == ":event" || kind == ":constraints") {
      unsupported(sec, kind + " section");
    } else {
      fail(sec, "unknown domain section '" + kind + "'");
    }
  }
  const bool costs_required =
      std::find(doc.requirements.begin(), doc.requirements.end(),
                ":action-costs") != doc.requirements.end();
  if (costs_required != costs_declared)
    fail(root, ":action-costs requires (:functions (total-cost)) and vice versa");
  if (!costs_required)
    for (const auto& a : doc.actions)
      if (a.cost) fail(root, "cost increase without :action-costs");
  return doc;
}

inline ProblemDoc parse_problem(const std::string& text) {
  using namespace detail;
  const SExpr root = read_sexpr(text);
  ProblemDoc doc;
  doc.name = define_header(root, "problem").second;
  doc.total_cost = false;
  bool cost_init = false;
  bool have_goal = false;
  for (std::size_t i = 2; i < root.items.size(); ++i) {
    const SExpr& sec = list(root.items[i], "a problem section");
    const std::string& kind = head(sec);
    if (kind == ":domain") {
      if (sec.items.size() != 2) fail(sec, "expected (:domain <name>)");
      doc.domain = token(sec.items[1], "a domain name");
    } else if (kind == ":objects") {
      for (auto& [o, t] : typed_list(sec.items, 1)) doc.objects.push_back({o, t});
    } else if (kind == ":init") {
      for (std::size_t j = 1; j < sec.items.size(); ++j) {
        const SExpr& a = sec.items[j];
        if (head(a) == "=") {
          bool ok = a.items.size() == 3 && head(a.items[1]) == "total-cost" &&
                    is_token(a.items[2], "0");
          if (!ok) unsupported(a, "numeric initialisation other than total-cost 0");
          cost_init = true;
          continue;
        }
        if (head(a) == "not") fail(a, "negative literal in :init");
        doc.init.push_back(parse_atom(a));
      }
    } else if (kind == ":goal") {
      if (sec.items.size() != 2) fail(sec, "expected (:goal <formula>)");
      for (const SExpr* c : conjuncts(sec.items[1]))
        doc.goal.push_back(parse_literal(*c));
      have_goal = true;
    } else if (kind == ":metric") {
      bool ok = sec.items.size() == 3 && is_token(sec.items[1], "minimize") &&
                head(sec.items[2]) == "total-cost" && sec.items[2].items.size() == 1;
      if (!ok) unsupported(sec, "metric other than (minimize (total-cost))");
      doc.total_cost = true;
    } else {
      unsupported(sec, "problem section " + kind);
    }
  }
  if (!have_goal) fail(root, "problem has no :goal");
  if (cost_init != doc.total_cost)
    fail(root, "total-cost initialisation and metric must appear together");
  std::set<std::string> declared;
  for (const auto& o : doc.objects) declared.insert(o.id);
  auto check_args = [&](const Atom& a) {
    for (const auto& arg : a.args)
      if (!declared.contains(arg))
        fail(root, "undeclared object '" + arg + "' in " + to_string(a));
  };
  for (const auto& a : doc.init) check_args(a);
  for (const auto& l : doc.goal) check_args(l.atom);
  return doc;
}

// -------------------------------------------------- back to planner form

inline TypeTable type_table(const DomainDoc& doc) {
  TypeTable staged;
  std::vector<TypeDecl> pending = doc.types;
  while (!pending.empty()) {
    std::size_t before = pending.size();
    std::erase_if(pending, [&](const TypeDecl& t) {
      if (!staged.has_type(t.parent)) return false;
      staged.add_type(t.name, t.parent);
      return true;
    });
    if (pending.size() == before)
      throw SchemaError("domain types: cycle or unknown parent at '" +
                        pending.front().name + "'");
  }
  return staged;
}

inline Vocabulary vocabulary(const DomainDoc& doc) {
  Vocabulary v;
  for (const auto& p : doc.predicates) v.add({p.name, p.arg_types});
  return v;
}

// Actions without a cost increase cost 1.
inline std::vector<ActionSchema> schemas(const DomainDoc& doc) {
  std::vector<ActionSchema> out;
  for (const auto& a : doc.actions) {
    ActionSchema s{a.name, a.params, a.precondition, {}, {}, a.cost.value_or(1)};
    for (const auto& l : a.effect) (l.positive ? s.adds : s.dels).push_back(l.atom);
    out.push_back(std::move(s));
  }
  return out;
}

struct GroundTask {
  std::vector<GroundedAction> actions;
  State init;
  std::vector<Literal> goal;
};

inline GroundTask ground_task(const DomainDoc& domain, const ProblemDoc& problem,
                              const GroundOptions& opts = {}) {
  TypeTable types = type_table(domain);
  const Vocabulary vocab = vocabulary(domain);
  for (const auto& o : problem.objects) {
    if (!types.has_type(o.type_id))
      throw TypeError("object '" + o.id + "' has undeclared type '" + o.type_id + "'");
    types.add_instance(o.id, o.type_id);
  }
  GroundTask task;
  for (const auto& a : problem.init) {
    check_atom(vocab, types, a);
    task.init.true_atoms.insert(a);
  }
  for (const auto& l : problem.goal) check_atom(vocab, types, l.atom);
  task.goal = problem.goal;
  task.actions = ground(schemas(domain), types, problem.objects, opts);
  return task;
}

}  // namespace demo2pddl::pddl
