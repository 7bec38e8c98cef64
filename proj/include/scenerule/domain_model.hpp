#pragma once

// Class hierarchy and classification -> interpretation map, read from
// Prolog-style fact files:
//
//   subclass_of('Weapon_Class', 'Sword_Class').
//   interpretation('Sword_Class', 'Sword').

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scenerule/error.hpp"
#include "scenerule/lexer.hpp"

namespace scenerule {

struct SubclassEdge {
  std::string parent;
  std::string child;

  friend auto operator<=>(const SubclassEdge&, const SubclassEdge&) = default;
};

struct InterpretationFact {
  std::string classification;
  std::string interpretation;

  friend auto operator<=>(const InterpretationFact&, const InterpretationFact&) = default;
};

class DomainModel {
 public:
  DomainModel() = default;

  /// Adds a subclass edge. Returns false when the edge was already present.
  /// Throws when the edge would close a cycle.
  bool add_subclass(const std::string& parent, const std::string& child, SourcePos pos = {}) {
    if (parent.empty() || child.empty()) throw Error(Stage::domain, "empty class name", pos);
    SubclassEdge e{parent, child};
    if (edge_set_.contains(e)) return false;
    if (parent == child || is_subclass_of(child, parent)) {
      auto path = find_path(child, parent);
      std::string cycle = parent;
      for (const auto& n : path) cycle += " -> " + n;
      if (parent == child) cycle = parent + " -> " + child;
      throw Error(Stage::domain, "subclass cycle: " + cycle, pos);
    }
    edge_set_.insert(e);
    edges_.push_back(e);
    children_[parent].push_back(child);
    known_classes_.insert(parent);
    known_classes_.insert(child);
    return true;
  }

  /// Adds an interpretation fact. Returns false when already present.
  bool add_interpretation(const std::string& cls, const std::string& interp, SourcePos pos = {}) {
    if (cls.empty() || interp.empty()) throw Error(Stage::domain, "empty name", pos);
    InterpretationFact f{cls, interp};
    if (fact_set_.contains(f)) return false;
    fact_set_.insert(f);
    facts_.push_back(f);
    by_class_[cls].push_back(interp);
    known_classes_.insert(cls);
    interpretation_names_.insert(interp);
    return true;
  }

  /// Reflexive-transitive closure of the subclass edges.
  bool is_subclass_of(std::string_view ancestor, std::string_view descendant) const {
    if (ancestor == descendant) return true;
    std::vector<std::string_view> stack{ancestor};
    std::set<std::string_view> seen{ancestor};
    while (!stack.empty()) {
      auto cur = stack.back();
      stack.pop_back();
      auto it = children_.find(std::string(cur));
      if (it == children_.end()) continue;
      for (const auto& c : it->second) {
        if (c == descendant) return true;
        if (seen.insert(c).second) stack.push_back(c);
      }
    }
    return false;
  }

  /// Interpretations declared for a classification, in file order.
  std::vector<std::string> interpretations_of(std::string_view cls) const {
    auto it = by_class_.find(std::string(cls));
    if (it == by_class_.end()) return {};
    return it->second;
  }

  /// Interpretations produced by `ancestor` or any of its descendants.
  std::set<std::string> interpretations_below(std::string_view ancestor) const {
    std::set<std::string> out;
    for (const auto& f : facts_)
      if (is_subclass_of(ancestor, f.classification)) out.insert(f.interpretation);
    return out;
  }

  bool knows_class(std::string_view name) const {
    return known_classes_.contains(std::string(name));
  }

  bool has_interpretation(std::string_view name) const {
    return interpretation_names_.contains(std::string(name));
  }

  const std::vector<SubclassEdge>& subclass_edges() const { return edges_; }
  const std::vector<InterpretationFact>& interpretation_facts() const { return facts_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  void add_warning(std::string w) { warnings_.push_back(std::move(w)); }

  /// Fact-file rendering of the model; parse_domain(serialize()) yields the
  /// same fact set.
  std::string serialize() const {
    std::string out;
    for (const auto& e : edges_) out += "subclass_of('" + e.parent + "', '" + e.child + "').\n";
    for (const auto& f : facts_)
      out += "interpretation('" + f.classification + "', '" + f.interpretation + "').\n";
    return out;
  }

 private:
  std::vector<std::string> find_path(const std::string& from, const std::string& to) const {
    // DFS returning the node sequence from `from` (inclusive) to `to`.
    std::vector<std::string> path{from};
    std::set<std::string> seen{from};
    std::function<bool(const std::string&)> dfs = [&](const std::string& cur) {
      if (cur == to) return true;
      auto it = children_.find(cur);
      if (it == children_.end()) return false;
      for (const auto& c : it->second) {
        if (!seen.insert(c).second) continue;
        path.push_back(c);
        if (dfs(c)) return true;
        path.pop_back();
      }
      return false;
    };
    dfs(from);
    return path;
  }

  std::vector<SubclassEdge> edges_;
  std::set<SubclassEdge> edge_set_;
  std::map<std::string, std::vector<std::string>> children_;
  std::vector<InterpretationFact> facts_;
  std::set<InterpretationFact> fact_set_;
  std::map<std::string, std::vector<std::string>> by_class_;
  std::set<std::string> known_classes_;
  std::set<std::string> interpretation_names_;
  std::vector<std::string> warnings_;
};

/// Parses a domain fact file. Duplicate facts are dropped with a warning.
inline DomainModel parse_domain(std::string_view text) {
  TokenStream ts(tokenize(text, Stage::domain), Stage::domain);
  DomainModel model;
  while (!ts.at_end()) {
    const Token& head = ts.expect(TokenKind::identifier, "a fact name");
    const SourcePos pos = head.pos;
    const std::string name = head.text;
    if (name != "subclass_of" && name != "interpretation")
      ts.fail_at(head, "unknown fact '" + name + "' (expected subclass_of or interpretation)");
    ts.expect_punct('(');
    std::string first = ts.expect(TokenKind::quoted, "a quoted name").text;
    ts.expect_punct(',');
    std::string second = ts.expect(TokenKind::quoted, "a quoted name").text;
    ts.expect_punct(')');
    ts.expect_punct('.');

    const bool added = name == "subclass_of" ? model.add_subclass(first, second, pos)
                                             : model.add_interpretation(first, second, pos);
    if (!added)
      model.add_warning("line " + std::to_string(pos.line) + ": duplicate fact " + name + "('" +
                        first + "', '" + second + "') ignored");
  }
  return model;
}

}  // namespace scenerule
