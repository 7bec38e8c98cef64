#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace scenerule {

// Which part of the pipeline raised an error. Used for CLI exit codes and
// for prefixing messages.
enum class Stage {
  geometry,
  domain,
  scene,
  rules,
  engine,
  cover,
  pipeline,
  report,
};

inline const char* to_string(Stage s) {
  switch (s) {
    case Stage::geometry: return "geometry";
    case Stage::domain: return "domain";
    case Stage::scene: return "scene";
    case Stage::rules: return "rules";
    case Stage::engine: return "engine";
    case Stage::cover: return "cover";
    case Stage::pipeline: return "pipeline";
    case Stage::report: return "report";
  }
  return "unknown";
}

struct SourcePos {
  std::size_t line = 0;  // 1-based; 0 means unknown
  std::size_t column = 0;
};

class Error : public std::runtime_error {
 public:
  Error(Stage stage, const std::string& message, SourcePos pos = {})
      : std::runtime_error(format(stage, message, pos)),
        stage_(stage),
        pos_(pos),
        message_(message) {}

  Stage stage() const { return stage_; }
  SourcePos pos() const { return pos_; }
  const std::string& message() const { return message_; }

 private:
  static std::string format(Stage stage, const std::string& message, SourcePos pos) {
    std::string out = to_string(stage);
    if (pos.line != 0) {
      out += ":" + std::to_string(pos.line);
      if (pos.column != 0) out += ":" + std::to_string(pos.column);
    }
    out += ": " + message;
    return out;
  }

  Stage stage_;
  SourcePos pos_;
  std::string message_;
};

}  // namespace scenerule
