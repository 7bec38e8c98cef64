#pragma once

// The interpretation rule language.
//
//   rule('Warrior', [X, Y]) {
//     Human(X);
//     kindOf(Y, 'Weapon_Class');
//     horizontal(X, Y);
//     (near(X, Y, 3.0) or overlap(X, Y))
//   }
//
//   rule('Group_Of_Corniforms', group(Xs : 'Corniform', maximal)) {
//     relGroup(Xs, 0.5)
//   }
//
// Uppercase-initial bare identifiers are variables (or, in head position,
// interpretation checks). Quoted names are interpretation/class names.
// Properties take their box arguments first and optional trailing literals
// (a position symbol or a numeric threshold). `near` is `absNear`.

#include <array>
#include <cctype>
#include <charconv>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "scenerule/domain_model.hpp"
#include "scenerule/error.hpp"
#include "scenerule/geometry.hpp"
#include "scenerule/lexer.hpp"

namespace scenerule {

enum class PropertyKind {
  horizontal,
  vertical,
  diagonal,
  disjoint,
  overlap,
  contains,
  abs_near,
  rel_near,
  near,
  abs_group,
  rel_group,
};

inline constexpr std::array<std::pair<PropertyKind, std::string_view>, 11> kPropertyNames{{
    {PropertyKind::horizontal, "horizontal"},
    {PropertyKind::vertical, "vertical"},
    {PropertyKind::diagonal, "diagonal"},
    {PropertyKind::disjoint, "disjoint"},
    {PropertyKind::overlap, "overlap"},
    {PropertyKind::contains, "contains"},
    {PropertyKind::abs_near, "absNear"},
    {PropertyKind::rel_near, "relNear"},
    {PropertyKind::near, "near"},
    {PropertyKind::abs_group, "absGroup"},
    {PropertyKind::rel_group, "relGroup"},
}};

inline std::string_view property_name(PropertyKind k) {
  for (const auto& [kind, name] : kPropertyNames)
    if (kind == k) return name;
  return "?";
}

inline std::optional<PropertyKind> property_from_name(std::string_view s) {
  for (const auto& [kind, name] : kPropertyNames)
    if (name == s) return kind;
  return std::nullopt;
}

// Thresholds used when a proximity property omits its numeric argument.
inline constexpr double kDefaultAbsNear = 10.0;
inline constexpr double kDefaultRelNear = 0.2;

struct VarArg {
  std::string name;
  friend bool operator==(const VarArg&, const VarArg&) = default;
};

struct SymbolArg {
  std::string value;
  friend bool operator==(const SymbolArg&, const SymbolArg&) = default;
};

using Arg = std::variant<VarArg, double, SymbolArg>;

struct InterpretationCheck {
  std::string var;
  std::string interpretation;
  friend bool operator==(const InterpretationCheck&, const InterpretationCheck&) = default;
};

// Scene is of a classification at or below `class_name` in the hierarchy.
struct KindOf {
  std::string var;
  std::string class_name;
  friend bool operator==(const KindOf&, const KindOf&) = default;
};

struct Property {
  PropertyKind kind = PropertyKind::horizontal;
  std::vector<Arg> args;
  friend bool operator==(const Property&, const Property&) = default;
};

using Atom = std::variant<InterpretationCheck, KindOf, Property>;

// A single atom, or a disjunction when more than one branch is present.
struct Constraint {
  std::vector<Atom> branches;

  bool is_disjunction() const { return branches.size() > 1; }
  friend bool operator==(const Constraint&, const Constraint&) = default;
};

struct VarList {
  std::vector<std::string> names;
  friend bool operator==(const VarList&, const VarList&) = default;
};

enum class GroupMode { maximal, subsets };

struct GroupBinder {
  std::string var;
  std::string member_interpretation;
  GroupMode mode = GroupMode::maximal;
  friend bool operator==(const GroupBinder&, const GroupBinder&) = default;
};

using Binder = std::variant<VarList, GroupBinder>;

struct RuleIR {
  std::string head;
  Binder binder;
  std::vector<Constraint> constraints;
  SourcePos pos;  // not part of rule identity

  bool is_group() const { return std::holds_alternative<GroupBinder>(binder); }

  friend bool operator==(const RuleIR& a, const RuleIR& b) {
    return a.head == b.head && a.binder == b.binder && a.constraints == b.constraints;
  }
};

struct RuleSet {
  std::vector<RuleIR> rules;
  std::vector<std::string> warnings;
};

enum class Severity { warning, error };

struct Diagnostic {
  Severity severity = Severity::warning;
  std::string message;
};

// Variables mentioned by an atom.
inline std::vector<std::string> atom_vars(const Atom& atom) {
  return std::visit(
      [](const auto& a) -> std::vector<std::string> {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, Property>) {
          std::vector<std::string> out;
          for (const auto& arg : a.args)
            if (auto v = std::get_if<VarArg>(&arg)) out.push_back(v->name);
          return out;
        } else {
          return {a.var};
        }
      },
      atom);
}

inline std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  std::string s(buf.data(), ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

namespace detail {

inline bool is_variable_name(std::string_view s) {
  return !s.empty() && std::isupper(static_cast<unsigned char>(s.front()));
}

inline bool is_plain_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s.front())) || s.front() == '_'))
    return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

inline std::string quote(std::string_view s) { return "'" + std::string(s) + "'"; }

// Argument shape checks. `group_var` is the set variable of a group rule, or
// empty for variable-list rules.
class PropertyChecker {
 public:
  PropertyChecker(const TokenStream& ts, const Token& at, const std::string& group_var)
      : ts_(ts), at_(at), group_var_(group_var) {}

  void check(const Property& p) const {
    const auto name = std::string(property_name(p.kind));
    const auto& args = p.args;
    auto is_var = [&](std::size_t i) { return i < args.size() && std::holds_alternative<VarArg>(args[i]); };
    auto is_group_var = [&](std::size_t i) {
      return is_var(i) && !group_var_.empty() && std::get<VarArg>(args[i]).name == group_var_;
    };
    auto is_num = [&](std::size_t i) { return i < args.size() && std::holds_alternative<double>(args[i]); };
    auto symbol = [&](std::size_t i) -> std::optional<std::string> {
      if (i < args.size())
        if (auto s = std::get_if<SymbolArg>(&args[i])) return s->value;
      return std::nullopt;
    };
    auto arity = [&](std::string_view expected) {
      fail("wrong arguments for " + name + ": expected " + std::string(expected));
    };

    switch (p.kind) {
      case PropertyKind::abs_group:
      case PropertyKind::rel_group:
        if (args.size() != 2 || !is_var(0) || !is_num(1)) arity("(GroupVar, threshold)");
        if (!is_group_var(0)) fail(name + " needs the group variable of a group rule");
        check_threshold(p.kind, std::get<double>(args[1]));
        return;
      case PropertyKind::horizontal:
      case PropertyKind::vertical:
        if (args.size() == 1 && is_var(0)) {
          if (!is_group_var(0)) fail("chained " + name + " needs the group variable of a group rule");
          return;
        }
        [[fallthrough]];
      case PropertyKind::diagonal: {
        if (args.size() < 2 || args.size() > 3 || !is_var(0) || !is_var(1))
          arity("(X, Y) or (X, Y, position)");
        check_element_vars(args, 2, name);
        if (args.size() == 3) {
          auto s = symbol(2);
          bool ok = false;
          if (s) {
            if (p.kind == PropertyKind::horizontal) ok = parse_horizontal_pos(*s).has_value();
            if (p.kind == PropertyKind::vertical) ok = parse_vertical_pos(*s).has_value();
            if (p.kind == PropertyKind::diagonal) ok = parse_diagonal_pos(*s).has_value();
          }
          if (!ok) fail("invalid position argument for " + name);
        }
        return;
      }
      case PropertyKind::disjoint:
      case PropertyKind::overlap:
      case PropertyKind::contains:
        if (args.size() != 2 || !is_var(0) || !is_var(1)) arity("(X, Y)");
        check_element_vars(args, 2, name);
        return;
      case PropertyKind::abs_near:
      case PropertyKind::rel_near:
      case PropertyKind::near:
        if (args.size() < 2 || args.size() > 3 || !is_var(0) || !is_var(1) ||
            (args.size() == 3 && !is_num(2)))
          arity("(X, Y) or (X, Y, threshold)");
        check_element_vars(args, 2, name);
        if (args.size() == 3) check_threshold(p.kind, std::get<double>(args[2]));
        return;
    }
  }

 private:
  void check_element_vars(const std::vector<Arg>& args, std::size_t n, const std::string& name) const {
    for (std::size_t i = 0; i < n; ++i)
      if (!group_var_.empty() && std::get<VarArg>(args[i]).name == group_var_)
        fail(name + " cannot take the group variable; use a group predicate");
  }

  void check_threshold(PropertyKind k, double th) const {
    if (k == PropertyKind::rel_near || k == PropertyKind::rel_group) {
      if (!(th >= 0.0 && th <= 1.0)) fail("relative threshold must lie in [0, 1]");
    } else if (!(th >= 0.0)) {
      fail("absolute threshold must be >= 0");
    }
  }

  [[noreturn]] void fail(const std::string& msg) const { ts_.fail_at(at_, msg); }

  const TokenStream& ts_;
  const Token& at_;
  const std::string& group_var_;
};

class RuleParser {
 public:
  explicit RuleParser(std::string_view text)
      : ts_(tokenize(text, Stage::rules, {.slash_comments = true}), Stage::rules) {}

  RuleSet parse() {
    RuleSet rs;
    while (!ts_.at_end()) {
      RuleIR r = parse_rule(rs.warnings);
      bool dup = false;
      for (const auto& existing : rs.rules) dup = dup || existing == r;
      if (dup) {
        rs.warnings.push_back("line " + std::to_string(r.pos.line) + ": duplicate rule '" +
                              r.head + "' ignored");
        continue;
      }
      rs.rules.push_back(std::move(r));
    }
    return rs;
  }

 private:
  RuleIR parse_rule(std::vector<std::string>& warnings) {
    const Token& kw = ts_.expect(TokenKind::identifier, "'rule'");
    if (kw.text != "rule") ts_.fail_at(kw, "expected 'rule'");
    RuleIR r;
    r.pos = kw.pos;
    ts_.expect_punct('(');
    r.head = ts_.expect(TokenKind::quoted, "a quoted interpretation name").text;
    ts_.expect_punct(',');
    r.binder = parse_binder();
    ts_.expect_punct(')');
    ts_.expect_punct('{');

    std::string group_var;
    std::set<std::string> declared;
    if (auto g = std::get_if<GroupBinder>(&r.binder)) {
      group_var = g->var;
      declared.insert(g->var);
    } else {
      for (const auto& v : std::get<VarList>(r.binder).names) declared.insert(v);
    }

    std::set<std::string> used;
    while (true) {
      r.constraints.push_back(parse_constraint(group_var, declared, used));
      if (ts_.accept_punct(';')) {
        if (ts_.peek().is_punct('}')) break;
        continue;
      }
      if (ts_.peek().is_punct('}')) break;
      ts_.fail("expected ';' or '}'");
    }
    ts_.expect_punct('}');

    for (const auto& v : declared)
      if (!used.contains(v))
        warnings.push_back("line " + std::to_string(r.pos.line) + ": variable " + v +
                           " declared but unused in rule '" + r.head + "'");
    return r;
  }

  Binder parse_binder() {
    if (ts_.peek().is_identifier("group")) {
      ts_.next();
      ts_.expect_punct('(');
      GroupBinder g;
      const Token& v = ts_.expect(TokenKind::identifier, "a group variable");
      if (!is_variable_name(v.text)) ts_.fail_at(v, "variables must start with an uppercase letter");
      g.var = v.text;
      ts_.expect_punct(':');
      g.member_interpretation = ts_.expect(TokenKind::quoted, "a quoted member interpretation").text;
      if (ts_.accept_punct(',')) {
        const Token& m = ts_.expect(TokenKind::identifier, "'maximal' or 'subsets'");
        if (m.text == "maximal")
          g.mode = GroupMode::maximal;
        else if (m.text == "subsets")
          g.mode = GroupMode::subsets;
        else
          ts_.fail_at(m, "group mode must be 'maximal' or 'subsets'");
      }
      ts_.expect_punct(')');
      return g;
    }

    ts_.expect_punct('[');
    VarList vl;
    do {
      const Token& v = ts_.expect(TokenKind::identifier, "a variable");
      if (!is_variable_name(v.text)) ts_.fail_at(v, "variables must start with an uppercase letter");
      for (const auto& existing : vl.names)
        if (existing == v.text) ts_.fail_at(v, "variable " + v.text + " declared twice");
      vl.names.push_back(v.text);
    } while (ts_.accept_punct(','));
    ts_.expect_punct(']');
    return vl;
  }

  Constraint parse_constraint(const std::string& group_var, const std::set<std::string>& declared,
                              std::set<std::string>& used) {
    Constraint c;
    if (ts_.accept_punct('(')) {
      c.branches.push_back(parse_atom(group_var, declared, used));
      while (ts_.peek().is_identifier("or")) {
        ts_.next();
        c.branches.push_back(parse_atom(group_var, declared, used));
      }
      ts_.expect_punct(')');
    } else {
      c.branches.push_back(parse_atom(group_var, declared, used));
    }
    return c;
  }

  Atom parse_atom(const std::string& group_var, const std::set<std::string>& declared,
                  std::set<std::string>& used) {
    const Token& head = ts_.peek();
    if (head.kind != TokenKind::identifier && head.kind != TokenKind::quoted)
      ts_.fail("expected a constraint");
    ts_.next();

    auto use_var = [&](const Token& t) {
      if (!declared.contains(t.text))
        ts_.fail_at(t, "variable " + t.text + " used but not declared");
      used.insert(t.text);
    };
    auto expect_var = [&]() -> std::string {
      const Token& v = ts_.expect(TokenKind::identifier, "a variable");
      if (!is_variable_name(v.text)) ts_.fail_at(v, "expected a variable, found '" + v.text + "'");
      use_var(v);
      return v.text;
    };
    auto element_only = [&](const std::string& var, const Token& at) {
      if (var == group_var) ts_.fail_at(at, "the group variable cannot be used here");
    };

    // Interpretation check: 'Name'(X) or Name(X) with an uppercase initial.
    if (head.kind == TokenKind::quoted || is_variable_name(head.text)) {
      ts_.expect_punct('(');
      const Token& at = ts_.peek();
      InterpretationCheck ic{expect_var(), head.text};
      element_only(ic.var, at);
      ts_.expect_punct(')');
      return ic;
    }

    if (head.text == "kindOf") {
      ts_.expect_punct('(');
      const Token& at = ts_.peek();
      KindOf k;
      k.var = expect_var();
      element_only(k.var, at);
      ts_.expect_punct(',');
      k.class_name = ts_.expect(TokenKind::quoted, "a quoted class name").text;
      ts_.expect_punct(')');
      return k;
    }

    auto kind = property_from_name(head.text);
    if (!kind) ts_.fail_at(head, "unknown property '" + head.text + "'");
    Property p;
    p.kind = *kind;
    ts_.expect_punct('(');
    if (!ts_.peek().is_punct(')')) {
      do {
        const Token& t = ts_.next();
        if (t.kind == TokenKind::number) {
          p.args.emplace_back(t.number);
        } else if (t.kind == TokenKind::quoted) {
          p.args.emplace_back(SymbolArg{t.text});
        } else if (t.kind == TokenKind::identifier && is_variable_name(t.text)) {
          use_var(t);
          p.args.emplace_back(VarArg{t.text});
        } else if (t.kind == TokenKind::identifier) {
          p.args.emplace_back(SymbolArg{t.text});
        } else {
          ts_.fail_at(t, "unexpected '" + t.text + "' in argument list");
        }
      } while (ts_.accept_punct(','));
    }
    ts_.expect_punct(')');
    PropertyChecker(ts_, head, group_var).check(p);
    return p;
  }

  TokenStream ts_;
};

inline std::string print_arg(const Arg& a) {
  if (auto v = std::get_if<VarArg>(&a)) return v->name;
  if (auto d = std::get_if<double>(&a)) return format_number(*d);
  return quote(std::get<SymbolArg>(a).value);
}

}  // namespace detail

/// Parses a rule file. Throws Error(Stage::rules) with line and column on
/// lexical, syntax, arity and scoping errors.
inline RuleSet parse_rules(std::string_view text) { return detail::RuleParser(text).parse(); }

inline std::string print_atom(const Atom& atom) {
  return std::visit(
      [](const auto& a) -> std::string {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, InterpretationCheck>) {
          const bool bare = detail::is_plain_identifier(a.interpretation) &&
                            detail::is_variable_name(a.interpretation);
          return (bare ? a.interpretation : detail::quote(a.interpretation)) + "(" + a.var + ")";
        } else if constexpr (std::is_same_v<T, KindOf>) {
          return "kindOf(" + a.var + ", " + detail::quote(a.class_name) + ")";
        } else {
          std::string s = std::string(property_name(a.kind)) + "(";
          for (std::size_t i = 0; i < a.args.size(); ++i)
            s += (i ? ", " : "") + detail::print_arg(a.args[i]);
          return s + ")";
        }
      },
      atom);
}

inline std::string print_constraint(const Constraint& c) {
  if (!c.is_disjunction()) return print_atom(c.branches.front());
  std::string s = "(";
  for (std::size_t i = 0; i < c.branches.size(); ++i)
    s += (i ? " or " : "") + print_atom(c.branches[i]);
  return s + ")";
}

inline std::string print_rule(const RuleIR& r) {
  std::string s = "rule(" + detail::quote(r.head) + ", ";
  if (auto g = std::get_if<GroupBinder>(&r.binder)) {
    s += "group(" + g->var + " : " + detail::quote(g->member_interpretation) + ", " +
         (g->mode == GroupMode::maximal ? "maximal" : "subsets") + ")";
  } else {
    const auto& names = std::get<VarList>(r.binder).names;
    s += "[";
    for (std::size_t i = 0; i < names.size(); ++i) s += (i ? ", " : "") + names[i];
    s += "]";
  }
  s += ") {\n";
  for (const auto& c : r.constraints) s += "  " + print_constraint(c) + ";\n";
  return s + "}\n";
}

inline std::string print_rules(const RuleSet& rs) {
  std::string out;
  for (std::size_t i = 0; i < rs.rules.size(); ++i) out += (i ? "\n" : "") + print_rule(rs.rules[i]);
  return out;
}

/// Cross-checks rules against a domain model: interpretation names nobody
/// produces, and kindOf classes missing from the hierarchy.
inline std::vector<Diagnostic> validate_rules(const RuleSet& rs, const DomainModel& model) {
  std::set<std::string> heads;
  for (const auto& r : rs.rules) heads.insert(r.head);
  auto produced = [&](const std::string& name) {
    return model.has_interpretation(name) || heads.contains(name);
  };

  std::vector<Diagnostic> out;
  std::set<std::string> reported;
  auto warn = [&](const RuleIR& r, const std::string& msg) {
    const std::string full = "line " + std::to_string(r.pos.line) + ": rule '" + r.head + "': " + msg;
    if (reported.insert(full).second) out.push_back({Severity::warning, full});
  };

  for (const auto& r : rs.rules) {
    if (auto g = std::get_if<GroupBinder>(&r.binder))
      if (!produced(g->member_interpretation))
        warn(r, "interpretation '" + g->member_interpretation + "' is never produced");
    for (const auto& c : r.constraints) {
      for (const auto& atom : c.branches) {
        if (auto ic = std::get_if<InterpretationCheck>(&atom)) {
          if (!produced(ic->interpretation))
            warn(r, "interpretation '" + ic->interpretation + "' is never produced");
        } else if (auto k = std::get_if<KindOf>(&atom)) {
          if (!model.knows_class(k->class_name))
            warn(r, "class '" + k->class_name + "' is not in the class hierarchy");
        }
      }
    }
  }
  return out;
}

}  // namespace scenerule
