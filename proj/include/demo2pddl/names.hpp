#pragma once

#include <cctype>
#include <map>
#include <set>
#include <string>

#include "demo2pddl/errors.hpp"

namespace demo2pddl {

// Lowercases an identifier for PDDL output. Characters outside
// [a-z0-9_-] become '_'; a leading non-letter gets an 'x' prefix.
// Variables keep their '?'.
inline std::string pddl_identifier(const std::string& id) {
  std::string body = id;
  std::string prefix;
  if (!body.empty() && body.front() == '?') {
    prefix = "?";
    body.erase(0, 1);
  }
  std::string out;
  for (unsigned char ch : body) {
    if (std::isalnum(ch))
      out += static_cast<char>(std::tolower(ch));
    else if (ch == '-' || ch == '_')
      out += static_cast<char>(ch);
    else
      out += '_';
  }
  if (out.empty() || !std::isalpha(static_cast<unsigned char>(out.front())))
    out = "x" + out;
  return prefix + out;
}

// Reversible mapping between in-memory identifiers and their PDDL spelling.
// Identifiers that collapse to the same spelling are rejected rather than
// renamed, so the mapping stays a pure function of the identifier.
class NameTable {
 public:
  NameTable() = default;

  explicit NameTable(const std::set<std::string>& identifiers) {
    for (const auto& id : identifiers) add(id);
  }

  void add(const std::string& id) {
    std::string p = pddl_identifier(id);
    auto [it, inserted] = from_pddl_.emplace(p, id);
    if (!inserted && it->second != id)
      throw SchemaError("identifiers '" + it->second + "' and '" + id +
                        "' both map to PDDL name '" + p + "'");
  }

  std::string pddl(const std::string& id) const { return pddl_identifier(id); }

  // Falls back to the PDDL spelling for names the table never saw.
  std::string original(const std::string& pddl_name) const {
    auto it = from_pddl_.find(pddl_name);
    return it == from_pddl_.end() ? pddl_name : it->second;
  }

  const std::map<std::string, std::string>& entries() const {
    return from_pddl_;
  }

  friend bool operator==(const NameTable&, const NameTable&) = default;

 private:
  std::map<std::string, std::string> from_pddl_;
};

}  // namespace demo2pddl
