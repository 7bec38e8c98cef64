#pragma once

// Detected scenes (one box per token, each with one or more classifier
// hypotheses) and their expansion into basic scenes.

#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "scenerule/domain_model.hpp"
#include "scenerule/error.hpp"
#include "scenerule/geometry.hpp"
#include "scenerule/lexer.hpp"

namespace scenerule {

using ImageId = std::int64_t;

struct ComputedClassification {
  std::string class_name;
  double confidence = 1.0;

  friend bool operator==(const ComputedClassification&, const ComputedClassification&) = default;
};

struct InputImage {
  ImageId id = 0;
  BoundingBox bb;
  std::vector<ComputedClassification> classifications;

  friend bool operator==(const InputImage&, const InputImage&) = default;
};

struct InputScene {
  std::vector<InputImage> images;

  const InputImage* find(ImageId id) const {
    for (const auto& img : images)
      if (img.id == id) return &img;
    return nullptr;
  }

  friend bool operator==(const InputScene&, const InputScene&) = default;
};

struct BasicScene {
  ImageId image_id = 0;
  BoundingBox bb;
  std::string class_name;
  std::string interpretation;
  double confidence = 0.0;
};

namespace detail {

inline void check_image(const InputImage& img, std::set<ImageId>& seen, SourcePos pos) {
  if (img.id < 0) throw Error(Stage::scene, "image id must be non-negative", pos);
  if (!seen.insert(img.id).second)
    throw Error(Stage::scene, "duplicate image id " + std::to_string(img.id), pos);
  if (!std::isfinite(img.bb.x) || !std::isfinite(img.bb.y))
    throw Error(Stage::scene, "non-finite coordinate in image " + std::to_string(img.id), pos);
  if (!(img.bb.w > 0.0) || !std::isfinite(img.bb.w))
    throw Error(Stage::scene, "non-positive width in image " + std::to_string(img.id), pos);
  if (!(img.bb.h > 0.0) || !std::isfinite(img.bb.h))
    throw Error(Stage::scene, "non-positive height in image " + std::to_string(img.id), pos);
  if (img.classifications.empty())
    throw Error(Stage::scene, "image " + std::to_string(img.id) + " has no classification", pos);
  for (const auto& c : img.classifications) {
    if (c.class_name.empty()) throw Error(Stage::scene, "empty class name", pos);
    if (!(c.confidence >= 0.0 && c.confidence <= 1.0))
      throw Error(Stage::scene,
                  "confidence out of range [0, 1] for class '" + c.class_name + "'", pos);
  }
}

inline ImageId integral_id(double v, SourcePos pos) {
  if (v != std::floor(v) || v < 0 || v > 9.0e15)
    throw Error(Stage::scene, "image id must be a non-negative integer", pos);
  return static_cast<ImageId>(v);
}

}  // namespace detail

/// Parses `image(Id, bb(X,Y,W,H), [class('Name', Conf), ...]).` facts.
inline InputScene parse_scene_facts(std::string_view text) {
  TokenStream ts(tokenize(text, Stage::scene), Stage::scene);
  InputScene scene;
  std::set<ImageId> seen;
  while (!ts.at_end()) {
    const Token& head = ts.expect(TokenKind::identifier, "'image'");
    if (head.text != "image") ts.fail_at(head, "unknown fact '" + head.text + "' (expected image)");
    const SourcePos pos = head.pos;
    InputImage img;
    ts.expect_punct('(');
    const Token& id = ts.expect(TokenKind::number, "an image id");
    img.id = detail::integral_id(id.number, id.pos);
    ts.expect_punct(',');
    const Token& bb = ts.expect(TokenKind::identifier, "'bb'");
    if (bb.text != "bb") ts.fail_at(bb, "expected 'bb'");
    ts.expect_punct('(');
    img.bb.x = ts.expect(TokenKind::number, "x").number;
    ts.expect_punct(',');
    img.bb.y = ts.expect(TokenKind::number, "y").number;
    ts.expect_punct(',');
    img.bb.w = ts.expect(TokenKind::number, "width").number;
    ts.expect_punct(',');
    img.bb.h = ts.expect(TokenKind::number, "height").number;
    ts.expect_punct(')');
    ts.expect_punct(',');
    ts.expect_punct('[');
    if (!ts.peek().is_punct(']')) {
      do {
        const Token& cls = ts.expect(TokenKind::identifier, "'class'");
        if (cls.text != "class") ts.fail_at(cls, "expected 'class'");
        ts.expect_punct('(');
        ComputedClassification c;
        c.class_name = ts.expect(TokenKind::quoted, "a quoted class name").text;
        ts.expect_punct(',');
        c.confidence = ts.expect(TokenKind::number, "a confidence").number;
        ts.expect_punct(')');
        img.classifications.push_back(std::move(c));
      } while (ts.accept_punct(','));
    }
    ts.expect_punct(']');
    ts.expect_punct(')');
    ts.expect_punct('.');
    detail::check_image(img, seen, pos);
    scene.images.push_back(std::move(img));
  }
  if (scene.images.empty()) throw Error(Stage::scene, "empty scene");
  return scene;
}

/// Parses the JSON form:
/// {"images": [{"id": 0, "bb": {"x":..,"y":..,"w":..,"h":..},
///              "classifications": [{"class": "A", "confidence": 1.0}]}]}
inline InputScene parse_scene_structured(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Stage::scene, std::string("malformed JSON: ") + e.what());
  }

  auto need = [](const nlohmann::json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key))
      throw Error(Stage::scene, where + ": missing field '" + key + "'");
    return obj.at(key);
  };
  auto number = [&](const nlohmann::json& obj, const char* key, const std::string& where) {
    auto v = need(obj, key, where);
    if (!v.is_number()) throw Error(Stage::scene, where + ": field '" + key + "' must be a number");
    return v.get<double>();
  };

  auto images = need(doc, "images", "document");
  if (!images.is_array()) throw Error(Stage::scene, "document: 'images' must be an array");
  if (images.empty()) throw Error(Stage::scene, "empty scene");

  InputScene scene;
  std::set<ImageId> seen;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const auto& jimg = images[i];
    const std::string where = "images[" + std::to_string(i) + "]";
    InputImage img;
    img.id = detail::integral_id(number(jimg, "id", where), {});
    auto jbb = need(jimg, "bb", where);
    img.bb = {number(jbb, "x", where + ".bb"), number(jbb, "y", where + ".bb"),
              number(jbb, "w", where + ".bb"), number(jbb, "h", where + ".bb")};
    auto jcls = need(jimg, "classifications", where);
    if (!jcls.is_array())
      throw Error(Stage::scene, where + ": 'classifications' must be an array");
    for (std::size_t k = 0; k < jcls.size(); ++k) {
      const std::string cw = where + ".classifications[" + std::to_string(k) + "]";
      auto name = need(jcls[k], "class", cw);
      if (!name.is_string()) throw Error(Stage::scene, cw + ": 'class' must be a string");
      img.classifications.push_back({name.get<std::string>(), number(jcls[k], "confidence", cw)});
    }
    detail::check_image(img, seen, {});
    scene.images.push_back(std::move(img));
  }
  return scene;
}

inline nlohmann::json scene_to_json(const InputScene& scene) {
  nlohmann::json images = nlohmann::json::array();
  for (const auto& img : scene.images) {
    nlohmann::json cls = nlohmann::json::array();
    for (const auto& c : img.classifications)
      cls.push_back({{"class", c.class_name}, {"confidence", c.confidence}});
    images.push_back({{"id", img.id},
                      {"bb", {{"x", img.bb.x}, {"y", img.bb.y}, {"w", img.bb.w}, {"h", img.bb.h}}},
                      {"classifications", cls}});
  }
  return {{"images", images}};
}

/// One basic scene per (image, classification, interpretation); a
/// classification's confidence is split evenly over its interpretations.
inline std::vector<BasicScene> serialize_basic_scenes(const InputScene& scene,
                                                      const DomainModel& model) {
  std::vector<BasicScene> out;
  std::set<std::string> missing;
  for (const auto& img : scene.images) {
    for (const auto& c : img.classifications) {
      const auto interps = model.interpretations_of(c.class_name);
      if (interps.empty()) {
        missing.insert(c.class_name);
        continue;
      }
      const double share = c.confidence * (1.0 / static_cast<double>(interps.size()));
      for (const auto& inter : interps) {
        bool dup = false;
        for (const auto& b : out)
          dup = dup || (b.image_id == img.id && b.class_name == c.class_name &&
                        b.interpretation == inter);
        if (dup) continue;
        out.push_back({img.id, img.bb, c.class_name, inter, share});
      }
    }
  }
  if (!missing.empty()) {
    std::string names;
    for (const auto& m : missing) names += (names.empty() ? "" : ", ") + m;
    throw Error(Stage::scene, "no interpretation declared for classification(s): " + names);
  }
  return out;
}

}  // namespace scenerule
