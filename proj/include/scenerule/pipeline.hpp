#pragma once

// From a finished scene graph to ranked interpretations: exact covers of the
// input images, deduplicated, filtered for derivability and sorted by weight.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scenerule/domain_model.hpp"
#include "scenerule/engine.hpp"
#include "scenerule/error.hpp"
#include "scenerule/exact_cover.hpp"
#include "scenerule/rule_lang.hpp"
#include "scenerule/scene_io.hpp"

namespace scenerule {

struct Interpretation {
  std::vector<NodeId> nodes;  // sorted top-level scenes
  std::int64_t weight = 0;
  std::size_t rank = 0;  // 1-based position in its list
};

/// Sum of squared cover sizes.
inline std::int64_t interpretation_weight(const SceneGraph& g, const std::vector<NodeId>& nodes) {
  std::int64_t w = 0;
  for (auto id : nodes) {
    const auto k = static_cast<std::int64_t>(g.node(id).cover.size());
    w += k * k;
  }
  return w;
}

/// Universe = image ids re-indexed densely in ascending order; one row per node.
inline CoverInstance<NodeId> build_cover_instance(const SceneGraph& g) {
  const auto& ids = g.image_ids();
  std::map<ImageId, std::size_t> column;
  for (std::size_t i = 0; i < ids.size(); ++i) column[ids[i]] = i;
  CoverInstance<NodeId> inst;
  inst.universe_size = ids.size();
  for (const auto& n : g.nodes()) {
    CoverRow<NodeId> row{n.id, {}};
    for (auto img : n.cover) row.elements.push_back(column.at(img));
    inst.rows.push_back(std::move(row));
  }
  return inst;
}

/// Descending weight, then ascending node sequence. Assigns ranks.
inline void sort_interpretations(std::vector<Interpretation>& list) {
  std::sort(list.begin(), list.end(), [](const Interpretation& a, const Interpretation& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.nodes < b.nodes;
  });
  for (std::size_t i = 0; i < list.size(); ++i) list[i].rank = i + 1;
}

inline std::vector<Interpretation> enumerate_interpretations(const SceneGraph& g) {
  std::vector<Interpretation> out;
  if (g.size() == 0) return out;
  std::set<std::vector<NodeId>> seen;
  for (auto& sol : solve_all(build_cover_instance(g))) {
    std::sort(sol.keys.begin(), sol.keys.end());
    if (!seen.insert(sol.keys).second) continue;
    out.push_back({sol.keys, interpretation_weight(g, sol.keys), 0});
  }
  sort_interpretations(out);
  return out;
}

/// Replaces a composite top-level scene by its direct children.
inline Interpretation expand_once(const SceneGraph& g, const Interpretation& i, NodeId node) {
  auto it = std::find(i.nodes.begin(), i.nodes.end(), node);
  if (it == i.nodes.end())
    throw Error(Stage::pipeline, "node " + std::to_string(node) + " is not part of the interpretation");
  const auto& n = g.node(node);
  if (n.is_basic())
    throw Error(Stage::pipeline, "node " + std::to_string(node) + " is a basic scene");
  Interpretation out;
  for (auto id : i.nodes)
    if (id != node) out.nodes.push_back(id);
  out.nodes.insert(out.nodes.end(), n.children.begin(), n.children.end());
  std::sort(out.nodes.begin(), out.nodes.end());
  out.weight = interpretation_weight(g, out.nodes);
  return out;
}

/// Keeps the interpretations that no other interpretation reaches through
/// expansions. Every intermediate expansion is itself an exact cover, so
/// one-step expansions of the whole list mark everything derivable.
inline std::vector<Interpretation> filter_derivable(const SceneGraph& g,
                                                    const std::vector<Interpretation>& all) {
  std::set<std::vector<NodeId>> derivable;
  for (const auto& i : all)
    for (auto id : i.nodes)
      if (!g.node(id).is_basic()) derivable.insert(expand_once(g, i, id).nodes);
  std::vector<Interpretation> out;
  for (const auto& i : all)
    if (!derivable.contains(i.nodes)) out.push_back(i);
  sort_interpretations(out);
  return out;
}

inline std::string render_node(const SceneGraph& g, NodeId id) {
  const auto& n = g.node(id);
  if (n.is_basic()) return n.interpretation + "-" + std::to_string(n.cover.front());
  auto children = n.children;
  std::sort(children.begin(), children.end(), [&](NodeId a, NodeId b) {
    return g.node(a).cover.front() < g.node(b).cover.front();
  });
  std::string s = n.interpretation + "(";
  for (std::size_t k = 0; k < children.size(); ++k) s += (k ? ", " : "") + render_node(g, children[k]);
  return s + ")";
}

/// `[A(B-0, C-1), D-2]`, scenes ordered by their first covered image.
inline std::string render_interpretation(const SceneGraph& g, const Interpretation& i) {
  auto nodes = i.nodes;
  std::sort(nodes.begin(), nodes.end(), [&](NodeId a, NodeId b) {
    return g.node(a).cover.front() < g.node(b).cover.front();
  });
  std::string s = "[";
  for (std::size_t k = 0; k < nodes.size(); ++k) s += (k ? ", " : "") + render_node(g, nodes[k]);
  return s + "]";
}

struct InterpretOptions {
  bool filtered = false;
  bool distinct = false;  // accepted for compatibility; values are always distinct
  std::size_t max_nodes = kDefaultMaxNodes;
};

struct InterpretationReport {
  SceneGraph graph;
  std::vector<Interpretation> all;
  std::vector<Interpretation> filtered;
  std::map<std::vector<NodeId>, std::string> renderings;
  bool filtered_first = false;
  std::vector<std::string> notes;

  const std::vector<Interpretation>& leading() const { return filtered_first ? filtered : all; }
  bool is_filtered(const Interpretation& i) const {
    return std::any_of(filtered.begin(), filtered.end(),
                       [&](const Interpretation& f) { return f.nodes == i.nodes; });
  }
  const std::string& text(const Interpretation& i) const { return renderings.at(i.nodes); }
};

/// Basic scenes -> scene graph -> exact covers -> filtering -> rendering.
inline InterpretationReport interpret_scene(const InputScene& scene, const DomainModel& model,
                                            const RuleSet& rules, const InterpretOptions& opts = {}) {
  InterpretationReport r;
  r.graph = apply_rules_to_fixpoint(init_graph(serialize_basic_scenes(scene, model)), rules, model,
                                    opts.max_nodes);
  r.all = enumerate_interpretations(r.graph);
  r.filtered = filter_derivable(r.graph, r.all);
  for (const auto& i : r.all) r.renderings[i.nodes] = render_interpretation(r.graph, i);
  r.filtered_first = opts.filtered;
  if (opts.distinct) r.notes.push_back("distinct mode has no effect: scenes are values");
  return r;
}

inline nlohmann::json node_to_json(const SceneGraph& g, NodeId id) {
  const auto& n = g.node(id);
  nlohmann::json children = nlohmann::json::array();
  for (auto c : n.children) children.push_back(node_to_json(g, c));
  nlohmann::json j = {
      {"nodeId", n.id},
      {"interpretation", n.interpretation},
      {"cover", n.cover},
      {"confidence", n.confidence},
      {"bb", {{"x", n.bb.x}, {"y", n.bb.y}, {"w", n.bb.w}, {"h", n.bb.h}}},
      {"children", children},
  };
  if (n.class_name) {
    j["class"] = *n.class_name;
    j["imageId"] = n.cover.front();
  }
  return j;
}

/// {allCount, filteredCount, interpretations: [{rank, weight, filtered, text, nodes}]}
inline nlohmann::json report_to_json(const InterpretationReport& r) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& i : r.leading()) {
    nlohmann::json nodes = nlohmann::json::array();
    for (auto id : i.nodes) nodes.push_back(node_to_json(r.graph, id));
    list.push_back({{"rank", i.rank},
                    {"weight", i.weight},
                    {"filtered", r.is_filtered(i)},
                    {"text", r.text(i)},
                    {"nodes", nodes}});
  }
  nlohmann::json j = {
      {"allCount", r.all.size()},
      {"filteredCount", r.filtered.size()},
      {"interpretations", list},
  };
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j;
}

/// Plain-text report: a count header, then one line per interpretation.
inline std::string report_to_text(const InterpretationReport& r) {
  std::string out = "all: " + std::to_string(r.all.size()) +
                    ", filtered: " + std::to_string(r.filtered.size()) + "\n";
  for (const auto& note : r.notes) out += "note: " + note + "\n";
  for (const auto& i : r.leading())
    out += "I" + std::to_string(i.rank) + " (weight " + std::to_string(i.weight) +
           ") = " + r.text(i) + "\n";
  return out;
}

}  // namespace scenerule
