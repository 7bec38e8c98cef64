#pragma once

// SVG 1.1 overlay of a scene: one solid rectangle per input image and, when an
// interpretation is chosen, one dashed rectangle per composite scene.

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scenerule/error.hpp"
#include "scenerule/geometry.hpp"
#include "scenerule/rule_lang.hpp"
#include "scenerule/scene_io.hpp"

namespace scenerule {

struct SvgComposite {
  BoundingBox bb;
  std::string label;
  int depth = 0;  // 0 for top-level scenes
};

struct SvgOverlay {
  std::map<ImageId, std::string> image_labels;
  std::vector<SvgComposite> composites;
};

namespace detail {

inline void collect_overlay(const nlohmann::json& node, int depth, SvgOverlay& out) {
  const auto& children = node.at("children");
  if (children.empty()) {
    const auto id = node.at("imageId").get<ImageId>();
    out.image_labels[id] = node.at("interpretation").get<std::string>() + "-" + std::to_string(id);
    return;
  }
  const auto& bb = node.at("bb");
  out.composites.push_back({{bb.at("x").get<double>(), bb.at("y").get<double>(),
                             bb.at("w").get<double>(), bb.at("h").get<double>()},
                            node.at("interpretation").get<std::string>(),
                            depth});
  for (const auto& c : children) collect_overlay(c, depth + 1, out);
}

inline std::string escape_xml(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string num(double v) {
  auto s = format_number(v);
  if (s.size() > 2 && s.ends_with(".0")) s.resize(s.size() - 2);
  return s;
}

}  // namespace detail

/// Picks interpretation `rank` (1-based) out of a structured report.
inline SvgOverlay overlay_from_report(const nlohmann::json& report, std::size_t rank,
                                      const InputScene& scene) {
  try {
    const auto& list = report.at("interpretations");
    const auto it = std::find_if(list.begin(), list.end(), [&](const nlohmann::json& i) {
      return i.at("rank").get<std::size_t>() == rank;
    });
    if (it == list.end())
      throw Error(Stage::report, "no interpretation with rank " + std::to_string(rank) + " (report has " +
                                     std::to_string(list.size()) + ")");
    SvgOverlay out;
    for (const auto& node : it->at("nodes")) detail::collect_overlay(node, 0, out);
    for (const auto& [id, label] : out.image_labels)
      if (!scene.find(id))
        throw Error(Stage::report, "report refers to image " + std::to_string(id) + " absent from the scene");
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Stage::report, std::string("malformed report: ") + e.what());
  }
}

/// Without an overlay, images are labeled with their classifications.
inline std::string render_svg(const InputScene& scene, const SvgOverlay* overlay = nullptr) {
  constexpr double margin = 20.0;
  std::vector<BoundingBox> boxes;
  for (const auto& img : scene.images) boxes.push_back(img.bb);
  if (overlay)
    for (const auto& c : overlay->composites) boxes.push_back(c.bb);
  const BoundingBox extent = boxes.empty() ? BoundingBox{0, 0, 1, 1} : merge(boxes);
  const double ox = extent.x - margin;
  const double oy = extent.y - margin;
  const double w = extent.w + 2 * margin;
  const double h = extent.h + 2 * margin;

  using detail::num;
  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(w) + "\" height=\"" +
       num(h) + "\" viewBox=\"" + num(ox) + " " + num(oy) + " " + num(w) + " " + num(h) + "\">\n";
  s += "<g class=\"images\" fill=\"none\" stroke=\"black\" stroke-width=\"1\" font-family=\"sans-serif\" "
       "font-size=\"6\">\n";
  for (const auto& img : scene.images) {
    std::string label;
    if (overlay && overlay->image_labels.contains(img.id)) {
      label = overlay->image_labels.at(img.id);
    } else {
      for (const auto& c : img.classifications) {
        if (!label.empty()) label += ", ";
        label += c.class_name + " " + num(c.confidence);
      }
      label = std::to_string(img.id) + ": " + label;
    }
    s += "<rect x=\"" + num(img.bb.x) + "\" y=\"" + num(img.bb.y) + "\" width=\"" + num(img.bb.w) +
         "\" height=\"" + num(img.bb.h) + "\"/>\n";
    s += "<text x=\"" + num(img.bb.x) + "\" y=\"" + num(img.bb.y - 2) + "\" fill=\"black\" stroke=\"none\">" +
         detail::escape_xml(label) + "</text>\n";
  }
  s += "</g>\n";
  if (overlay && !overlay->composites.empty()) {
    s += "<g class=\"composites\" fill=\"none\" stroke=\"red\" stroke-width=\"1\" stroke-dasharray=\"4 2\" "
         "font-family=\"sans-serif\" font-size=\"6\">\n";
    for (const auto& c : overlay->composites) {
      const double pad = 2.0 * (c.depth + 1);
      const BoundingBox b{c.bb.x - pad, c.bb.y - pad, c.bb.w + 2 * pad, c.bb.h + 2 * pad};
      s += "<rect x=\"" + num(b.x) + "\" y=\"" + num(b.y) + "\" width=\"" + num(b.w) + "\" height=\"" +
           num(b.h) + "\"/>\n";
      s += "<text x=\"" + num(b.x) + "\" y=\"" + num(b.bottom() + 7) + "\" fill=\"red\" stroke=\"none\">" +
           detail::escape_xml(c.label) + "</text>\n";
    }
    s += "</g>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace scenerule
