#pragma once

// Scene graph construction: basic scenes become nodes, then rules are applied
// until no new composite scene appears.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "scenerule/domain_model.hpp"
#include "scenerule/error.hpp"
#include "scenerule/geometry.hpp"
#include "scenerule/rule_lang.hpp"
#include "scenerule/scene_io.hpp"

namespace scenerule {

using NodeId = std::size_t;

inline constexpr std::size_t kDefaultMaxNodes = 10000;
// Largest candidate pool enumerated exhaustively by group rules.
inline constexpr std::size_t kMaxGroupCandidates = 20;

struct SceneNode {
  NodeId id = 0;
  std::string interpretation;
  BoundingBox bb;
  std::optional<std::string> class_name;  // basic scenes only
  double confidence = 0.0;
  std::vector<ImageId> cover;    // sorted
  std::vector<NodeId> children;  // sorted; empty for basic scenes

  bool is_basic() const { return children.empty(); }
};

class SceneGraph {
 public:
  const std::vector<SceneNode>& nodes() const { return nodes_; }
  const SceneNode& node(NodeId id) const { return nodes_.at(id); }
  std::size_t size() const { return nodes_.size(); }
  std::size_t basic_count() const { return basic_count_; }
  const std::vector<ImageId>& image_ids() const { return image_ids_; }

  /// Returns the new node id, or nullopt when an identical basic scene exists.
  std::optional<NodeId> add_basic(const BasicScene& b) {
    if (basic_count_ != nodes_.size())
      throw Error(Stage::engine, "basic scenes must be added before composites");
    const auto key = std::make_tuple(b.image_id, b.class_name, b.interpretation);
    if (!basic_keys_.insert(key).second) return std::nullopt;
    SceneNode n;
    n.id = nodes_.size();
    n.interpretation = b.interpretation;
    n.bb = b.bb;
    n.class_name = b.class_name;
    n.confidence = b.confidence;
    n.cover = {b.image_id};
    nodes_.push_back(std::move(n));
    ++basic_count_;
    auto it = std::lower_bound(image_ids_.begin(), image_ids_.end(), b.image_id);
    if (it == image_ids_.end() || *it != b.image_id) image_ids_.insert(it, b.image_id);
    return nodes_.back().id;
  }

  bool has_composite(const std::string& interpretation, const std::vector<NodeId>& children) const {
    auto sorted = children;
    std::sort(sorted.begin(), sorted.end());
    return composite_keys_.contains({interpretation, sorted});
  }

  /// Adds a composite over `children`. Returns nullopt when the
  /// (interpretation, children-set) pair already exists.
  std::optional<NodeId> add_composite(const std::string& interpretation,
                                      std::vector<NodeId> children) {
    std::sort(children.begin(), children.end());
    if (children.empty()) throw Error(Stage::engine, "composite scene without children");
    if (std::adjacent_find(children.begin(), children.end()) != children.end())
      throw Error(Stage::engine, "composite scene with a repeated child");
    if (!composite_keys_.insert({interpretation, children}).second) return std::nullopt;

    SceneNode n;
    n.id = nodes_.size();
    n.interpretation = interpretation;
    n.children = children;
    std::vector<BoundingBox> boxes;
    double conf = 0.0;
    for (auto c : children) {
      const auto& child = nodes_.at(c);
      boxes.push_back(child.bb);
      conf += child.confidence;
      n.cover.insert(n.cover.end(), child.cover.begin(), child.cover.end());
    }
    std::sort(n.cover.begin(), n.cover.end());
    if (std::adjacent_find(n.cover.begin(), n.cover.end()) != n.cover.end())
      throw Error(Stage::engine, "children of a composite scene share an image");
    n.bb = merge(boxes);
    n.confidence = conf / static_cast<double>(children.size());
    nodes_.push_back(std::move(n));
    return nodes_.back().id;
  }

  /// Structural invariants; returns a description of the first violation.
  std::optional<std::string> verify() const {
    std::set<std::pair<std::string, std::vector<NodeId>>> seen;
    for (const auto& n : nodes_) {
      const std::string where = "node " + std::to_string(n.id) + ": ";
      if (n.is_basic() != n.class_name.has_value()) return where + "basic/class mismatch";
      if (n.is_basic()) {
        if (n.cover.size() != 1) return where + "basic scene must cover one image";
        continue;
      }
      std::vector<ImageId> cover;
      std::vector<BoundingBox> boxes;
      double conf = 0.0;
      for (auto c : n.children) {
        if (c >= n.id) return where + "child id not smaller than parent";
        const auto& child = nodes_[c];
        cover.insert(cover.end(), child.cover.begin(), child.cover.end());
        boxes.push_back(child.bb);
        conf += child.confidence;
      }
      std::sort(cover.begin(), cover.end());
      if (std::adjacent_find(cover.begin(), cover.end()) != cover.end())
        return where + "children covers overlap";
      if (cover != n.cover) return where + "cover is not the union of children covers";
      if (!(merge(boxes) == n.bb)) return where + "box is not the merge of children boxes";
      const double mean = conf / static_cast<double>(n.children.size());
      if (std::abs(mean - n.confidence) > 1e-12) return where + "confidence is not the children mean";
      if (!seen.insert({n.interpretation, n.children}).second) return where + "duplicate composite";
    }
    return std::nullopt;
  }

 private:
  std::vector<SceneNode> nodes_;
  std::size_t basic_count_ = 0;
  std::vector<ImageId> image_ids_;
  std::set<std::tuple<ImageId, std::string, std::string>> basic_keys_;
  std::set<std::pair<std::string, std::vector<NodeId>>> composite_keys_;
};

/// One node per basic scene, ids in input order.
inline SceneGraph init_graph(const std::vector<BasicScene>& basics) {
  if (basics.empty()) throw Error(Stage::engine, "no basic scenes");
  SceneGraph g;
  for (const auto& b : basics) g.add_basic(b);
  return g;
}

namespace detail {

inline bool covers_disjoint(const SceneNode& a, const SceneNode& b) {
  auto i = a.cover.begin();
  auto j = b.cover.begin();
  while (i != a.cover.end() && j != b.cover.end()) {
    if (*i == *j) return false;
    if (*i < *j)
      ++i;
    else
      ++j;
  }
  return true;
}

template <class T>
const T* arg_as(const Property& p, std::size_t i) {
  return i < p.args.size() ? std::get_if<T>(&p.args[i]) : nullptr;
}

inline double threshold_or(const Property& p, std::size_t i, double fallback) {
  auto d = arg_as<double>(p, i);
  return d ? *d : fallback;
}

class RuleMatcher {
 public:
  RuleMatcher(const SceneGraph& g, const RuleIR& rule, const DomainModel& model)
      : g_(g), rule_(rule), model_(model) {}

  std::vector<std::vector<NodeId>> run() {
    if (auto g = std::get_if<GroupBinder>(&rule_.binder)) return run_group(*g);
    return run_vars(std::get<VarList>(rule_.binder));
  }

 private:
  // ---- variable-list rules ----

  std::vector<std::vector<NodeId>> run_vars(const VarList& vl) {
    vars_ = vl.names;
    for (std::size_t i = 0; i < vars_.size(); ++i) var_index_[vars_[i]] = i;

    // Each constraint is checked as soon as its last variable is bound.
    checks_at_.assign(vars_.size(), {});
    for (const auto& c : rule_.constraints) {
      std::size_t depth = 0;
      for (const auto& atom : c.branches)
        for (const auto& v : atom_vars(atom)) depth = std::max(depth, index_of(v));
      checks_at_[depth].push_back(&c);
    }

    // Interpretation and kind constraints narrow each variable's candidates.
    candidates_.assign(vars_.size(), {});
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      for (const auto& n : g_.nodes()) {
        bool ok = true;
        for (const auto& c : rule_.constraints)
          if (is_unary_on(c, vars_[i])) ok = ok && eval_unary(c, n);
        if (ok) candidates_[i].push_back(n.id);
      }
    }

    binding_.assign(vars_.size(), 0);
    matches_.clear();
    bind(0);
    return std::move(matches_);
  }

  std::size_t index_of(const std::string& var) const {
    auto it = var_index_.find(var);
    if (it == var_index_.end())
      throw Error(Stage::engine, "rule '" + rule_.head + "': undeclared variable " + var, rule_.pos);
    return it->second;
  }

  bool is_unary_on(const Constraint& c, const std::string& var) const {
    for (const auto& atom : c.branches) {
      if (std::holds_alternative<Property>(atom)) return false;
      if (atom_vars(atom).front() != var) return false;
    }
    return true;
  }

  bool eval_unary(const Constraint& c, const SceneNode& n) {
    for (const auto& atom : c.branches)
      if (eval_node_atom(atom, n)) return true;
    return false;
  }

  bool eval_node_atom(const Atom& atom, const SceneNode& n) {
    if (auto ic = std::get_if<InterpretationCheck>(&atom)) return n.interpretation == ic->interpretation;
    if (auto k = std::get_if<KindOf>(&atom)) return kind_of(n, k->class_name);
    return false;
  }

  // Basic scenes: classification at or below the class. Composite scenes:
  // interpretation produced by that class or a descendant.
  bool kind_of(const SceneNode& n, const std::string& cls) {
    if (n.class_name) return model_.is_subclass_of(cls, *n.class_name);
    auto it = below_cache_.find(cls);
    if (it == below_cache_.end()) it = below_cache_.emplace(cls, model_.interpretations_below(cls)).first;
    return it->second.contains(n.interpretation);
  }

  void bind(std::size_t depth) {
    if (depth == vars_.size()) {
      matches_.push_back(binding_);
      return;
    }
    for (auto id : candidates_[depth]) {
      const auto& n = g_.node(id);
      bool ok = true;
      for (std::size_t k = 0; k < depth && ok; ++k)
        ok = binding_[k] != id && covers_disjoint(g_.node(binding_[k]), n);
      if (!ok) continue;
      binding_[depth] = id;
      for (const Constraint* c : checks_at_[depth]) {
        if (!eval_bound(*c)) {
          ok = false;
          break;
        }
      }
      if (ok) bind(depth + 1);
    }
  }

  const SceneNode& bound(const std::string& var) const { return g_.node(binding_[index_of(var)]); }

  bool eval_bound(const Constraint& c) {
    for (const auto& atom : c.branches) {
      if (auto p = std::get_if<Property>(&atom)) {
        if (eval_pair_property(*p)) return true;
      } else {
        if (eval_node_atom(atom, bound(atom_vars(atom).front()))) return true;
      }
    }
    return false;
  }

  bool eval_pair_property(const Property& p) const {
    if (p.kind == PropertyKind::abs_group || p.kind == PropertyKind::rel_group ||
        p.args.size() < 2 || !arg_as<VarArg>(p, 0) || !arg_as<VarArg>(p, 1))
      throw Error(Stage::engine,
                  "rule '" + rule_.head + "': " + std::string(property_name(p.kind)) +
                      " needs two scene variables here",
                  rule_.pos);
    const auto& a = bound(arg_as<VarArg>(p, 0)->name).bb;
    const auto& b = bound(arg_as<VarArg>(p, 1)->name).bb;
    auto sym = [&](std::size_t i) -> std::string {
      auto s = arg_as<SymbolArg>(p, i);
      return s ? s->value : std::string{};
    };
    switch (p.kind) {
      case PropertyKind::horizontal:
        return p.args.size() == 3 ? horizontal(a, b, parse_horizontal_pos(sym(2)))
                                  : horizontal(a, b);
      case PropertyKind::vertical:
        return p.args.size() == 3 ? vertical(a, b, parse_vertical_pos(sym(2))) : vertical(a, b);
      case PropertyKind::diagonal:
        return p.args.size() == 3 ? diagonal(a, b, parse_diagonal_pos(sym(2))) : diagonal(a, b);
      case PropertyKind::disjoint: return disjoint(a, b);
      case PropertyKind::overlap: return overlap(a, b);
      case PropertyKind::contains: return contains(a, b);
      case PropertyKind::abs_near:
      case PropertyKind::near: return abs_near(a, b, threshold_or(p, 2, kDefaultAbsNear));
      case PropertyKind::rel_near: return rel_near(a, b, threshold_or(p, 2, kDefaultRelNear));
      case PropertyKind::abs_group:
      case PropertyKind::rel_group: break;
    }
    return false;
  }

  // ---- group rules ----

  std::vector<std::vector<NodeId>> run_group(const GroupBinder& gb) {
    std::vector<NodeId> pool;
    for (const auto& n : g_.nodes())
      if (n.interpretation == gb.member_interpretation) pool.push_back(n.id);

    std::vector<std::vector<NodeId>> sets =
        gb.mode == GroupMode::maximal ? maximal_sets(pool) : all_subsets(pool);

    std::vector<std::vector<NodeId>> out;
    for (auto& s : sets) {
      std::vector<BoundingBox> boxes;
      for (auto id : s) boxes.push_back(g_.node(id).bb);
      bool ok = true;
      for (const auto& c : rule_.constraints) {
        bool any = false;
        for (const auto& atom : c.branches) any = any || eval_group_atom(atom, boxes);
        if (!any) {
          ok = false;
          break;
        }
      }
      if (ok) out.push_back(std::move(s));
    }
    return out;
  }

  bool eval_group_atom(const Atom& atom, const std::vector<BoundingBox>& boxes) const {
    auto p = std::get_if<Property>(&atom);
    if (!p)
      throw Error(Stage::engine, "rule '" + rule_.head + "': only group predicates apply to a group",
                  rule_.pos);
    switch (p->kind) {
      case PropertyKind::abs_group: return abs_group(boxes, threshold_or(*p, 1, kDefaultAbsNear));
      case PropertyKind::rel_group: return rel_group(boxes, threshold_or(*p, 1, kDefaultRelNear));
      case PropertyKind::vertical:
        if (p->args.size() == 1) return vertical_chain(boxes);
        break;
      case PropertyKind::horizontal:
        if (p->args.size() == 1) return horizontal_chain(boxes);
        break;
      default: break;
    }
    throw Error(Stage::engine,
                "rule '" + rule_.head + "': " + std::string(property_name(p->kind)) +
                    " cannot be evaluated on a group",
                rule_.pos);
  }

  // The proximity predicate that defines neighbourhood for maximal groups:
  // the first absGroup/relGroup in the rule. Without one, all members are
  // neighbours.
  std::optional<std::pair<double, NearMode>> neighbourhood() const {
    for (const auto& c : rule_.constraints)
      for (const auto& atom : c.branches)
        if (auto p = std::get_if<Property>(&atom)) {
          if (p->kind == PropertyKind::abs_group)
            return std::pair{threshold_or(*p, 1, kDefaultAbsNear), NearMode::abs};
          if (p->kind == PropertyKind::rel_group)
            return std::pair{threshold_or(*p, 1, kDefaultRelNear), NearMode::rel};
        }
    return std::nullopt;
  }

  bool adjacent(NodeId a, NodeId b, const std::optional<std::pair<double, NearMode>>& nb) const {
    if (!nb) return true;
    return near(g_.node(a).bb, g_.node(b).bb, nb->first, nb->second);
  }

  bool pairwise_disjoint(const std::vector<NodeId>& ids) const {
    for (std::size_t i = 0; i < ids.size(); ++i)
      for (std::size_t j = i + 1; j < ids.size(); ++j)
        if (!covers_disjoint(g_.node(ids[i]), g_.node(ids[j]))) return false;
    return true;
  }

  // Connected components (size >= 2) of the neighbourhood graph. A component
  // whose members share images is replaced by its inclusion-maximal connected
  // subsets with disjoint covers.
  std::vector<std::vector<NodeId>> maximal_sets(const std::vector<NodeId>& pool) const {
    const auto nb = neighbourhood();
    const std::size_t n = pool.size();
    std::vector<std::size_t> comp(n, n);
    std::vector<std::vector<NodeId>> components;
    for (std::size_t s = 0; s < n; ++s) {
      if (comp[s] != n) continue;
      const std::size_t cid = components.size();
      components.emplace_back();
      std::vector<std::size_t> stack{s};
      comp[s] = cid;
      while (!stack.empty()) {
        const auto cur = stack.back();
        stack.pop_back();
        components[cid].push_back(pool[cur]);
        for (std::size_t t = 0; t < n; ++t)
          if (comp[t] == n && adjacent(pool[cur], pool[t], nb)) {
            comp[t] = cid;
            stack.push_back(t);
          }
      }
    }

    std::vector<std::vector<NodeId>> out;
    for (auto& c : components) {
      std::sort(c.begin(), c.end());
      if (c.size() < 2) continue;
      if (pairwise_disjoint(c)) {
        out.push_back(c);
        continue;
      }
      auto subsets = enumerate_subsets(c);
      std::vector<std::vector<NodeId>> connected;
      for (auto& s : subsets)
        if (is_connected(s, nb)) connected.push_back(std::move(s));
      for (std::size_t i = 0; i < connected.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < connected.size() && !dominated; ++j)
          dominated = i != j && connected[j].size() > connected[i].size() &&
                      std::includes(connected[j].begin(), connected[j].end(),
                                    connected[i].begin(), connected[i].end());
        if (!dominated) out.push_back(connected[i]);
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  bool is_connected(const std::vector<NodeId>& s,
                    const std::optional<std::pair<double, NearMode>>& nb) const {
    std::vector<bool> reached(s.size(), false);
    std::vector<std::size_t> stack{0};
    reached[0] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
      auto cur = stack.back();
      stack.pop_back();
      for (std::size_t t = 0; t < s.size(); ++t)
        if (!reached[t] && adjacent(s[cur], s[t], nb)) {
          reached[t] = true;
          ++count;
          stack.push_back(t);
        }
    }
    return count == s.size();
  }

  std::vector<std::vector<NodeId>> all_subsets(std::vector<NodeId> pool) const {
    std::sort(pool.begin(), pool.end());
    return enumerate_subsets(pool);
  }

  // Subsets of size >= 2 with pairwise-disjoint covers, in lexicographic order.
  std::vector<std::vector<NodeId>> enumerate_subsets(const std::vector<NodeId>& pool) const {
    if (pool.size() > kMaxGroupCandidates)
      throw Error(Stage::engine,
                  "rule '" + rule_.head + "': " + std::to_string(pool.size()) +
                      " group candidates exceed the enumeration limit of " +
                      std::to_string(kMaxGroupCandidates),
                  rule_.pos);
    std::vector<std::vector<NodeId>> out;
    std::vector<NodeId> cur;
    std::function<void(std::size_t)> rec = [&](std::size_t from) {
      if (cur.size() >= 2) out.push_back(cur);
      for (std::size_t i = from; i < pool.size(); ++i) {
        const auto& n = g_.node(pool[i]);
        bool ok = true;
        for (auto id : cur) ok = ok && covers_disjoint(g_.node(id), n);
        if (!ok) continue;
        cur.push_back(pool[i]);
        rec(i + 1);
        cur.pop_back();
      }
    };
    rec(0);
    return out;
  }

  const SceneGraph& g_;
  const RuleIR& rule_;
  const DomainModel& model_;

  std::vector<std::string> vars_;
  std::map<std::string, std::size_t> var_index_;
  std::vector<std::vector<const Constraint*>> checks_at_;
  std::vector<std::vector<NodeId>> candidates_;
  std::vector<NodeId> binding_;
  std::vector<std::vector<NodeId>> matches_;
  std::map<std::string, std::set<std::string>> below_cache_;
};

}  // namespace detail

/// All matches of one rule against the current graph. Variable-list rules
/// yield children in variable order; group rules in ascending node order.
inline std::vector<std::vector<NodeId>> match_rule(const SceneGraph& g, const RuleIR& rule,
                                                   const DomainModel& model) {
  return detail::RuleMatcher(g, rule, model).run();
}

/// Applies every rule, in file order, until an iteration adds no node.
/// Within a rule, new composites are created in lexicographic order of their
/// sorted child ids.
inline SceneGraph apply_rules_to_fixpoint(SceneGraph g, const RuleSet& rs, const DomainModel& model,
                                          std::size_t max_nodes = kDefaultMaxNodes) {
  if (max_nodes <= g.basic_count())
    throw Error(Stage::engine, "node cap must exceed the number of basic scenes");
  while (true) {
    std::size_t added = 0;
    for (const auto& rule : rs.rules) {
      auto matches = match_rule(g, rule, model);
      for (auto& m : matches) std::sort(m.begin(), m.end());
      std::sort(matches.begin(), matches.end());
      matches.erase(std::unique(matches.begin(), matches.end()), matches.end());
      for (auto& m : matches) {
        if (g.has_composite(rule.head, m)) continue;
        if (g.size() >= max_nodes)
          throw Error(Stage::engine, "scene graph exceeded " + std::to_string(max_nodes) +
                                         " nodes; last rule fired: '" + rule.head + "'");
        g.add_composite(rule.head, std::move(m));
        ++added;
      }
    }
    if (added == 0) break;
  }
  return g;
}

}  // namespace scenerule
