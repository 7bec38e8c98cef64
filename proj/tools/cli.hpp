#pragma once

// Command-line front end: interpret, check and render.
// Exit codes: 0 success, 1 I/O or parse error, 2 validation or semantic error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "scenerule/domain_model.hpp"
#include "scenerule/error.hpp"
#include "scenerule/pipeline.hpp"
#include "scenerule/rule_lang.hpp"
#include "scenerule/scene_io.hpp"
#include "scenerule/svg.hpp"

namespace scenerule::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitInvalid = 2;

enum class Command { interpret, check, render };
enum class Format { text, structured };

struct CliConfig {
  Command command = Command::interpret;
  std::string scene_path;
  std::string rules_path;
  std::string domain_path;
  std::string report_path;
  std::size_t rank = 1;
  bool filtered = false;
  bool distinct = false;
  Format format = Format::text;
  std::optional<std::string> out_path;
};

// Carries an exit code out of a command.
struct Failure {
  int code;
  std::string message;
};

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kExitIo, "cannot read '" + path + "'"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_output(const CliConfig& cfg, const std::string& text, std::ostream& out) {
  if (!cfg.out_path) {
    out << text;
    return;
  }
  std::ofstream f(*cfg.out_path, std::ios::binary);
  if (!f) throw Failure{kExitIo, "cannot write '" + *cfg.out_path + "'"};
  f << text;
}

inline Failure with_file(const Error& e, const std::string& path, int code) {
  return {code, path + ": " + e.what()};
}

/// `.json` is structured; anything else is read as image facts.
inline InputScene load_scene(const std::string& path) {
  const std::string text = read_file(path);
  try {
    if (std::filesystem::path(path).extension() == ".json") return parse_scene_structured(text);
    return parse_scene_facts(text);
  } catch (const Error& e) {
    throw with_file(e, path, kExitIo);
  }
}

inline DomainModel load_domain(const std::string& path, std::ostream& err) {
  const std::string text = read_file(path);
  try {
    auto m = parse_domain(text);
    for (const auto& w : m.warnings()) err << path << ": warning: " << w << "\n";
    return m;
  } catch (const Error& e) {
    throw with_file(e, path, kExitInvalid);
  }
}

inline RuleSet load_rules(const std::string& path, const DomainModel& model, std::ostream& err) {
  const std::string text = read_file(path);
  try {
    auto rs = parse_rules(text);
    for (const auto& w : rs.warnings) err << path << ": warning: " << w << "\n";
    bool failed = false;
    for (const auto& d : validate_rules(rs, model)) {
      const bool is_error = d.severity == Severity::error;
      failed = failed || is_error;
      err << path << ": " << (is_error ? "error: " : "warning: ") << d.message << "\n";
    }
    if (failed) throw Failure{kExitInvalid, path + ": rule validation failed"};
    return rs;
  } catch (const Error& e) {
    throw with_file(e, path, kExitInvalid);
  }
}

}  // namespace detail

inline int cmd_interpret(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto model = detail::load_domain(cfg.domain_path, err);
  const auto rules = detail::load_rules(cfg.rules_path, model, err);
  const auto scene = detail::load_scene(cfg.scene_path);
  InterpretationReport report;
  try {
    report = interpret_scene(scene, model, rules, {.filtered = cfg.filtered, .distinct = cfg.distinct});
  } catch (const Error& e) {
    throw detail::with_file(e, cfg.scene_path, kExitInvalid);
  }
  if (report.all.empty()) throw Failure{kExitInvalid, cfg.scene_path + ": no interpretation"};
  detail::write_output(cfg,
                       cfg.format == Format::structured ? report_to_json(report).dump(2) + "\n"
                                                        : report_to_text(report),
                       out);
  return kExitOk;
}

inline int cmd_check(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto model = detail::load_domain(cfg.domain_path, err);
  const auto rules = detail::load_rules(cfg.rules_path, model, err);
  out << "ok: " << rules.rules.size() << " rules, " << model.subclass_edges().size()
      << " subclass facts, " << model.interpretation_facts().size() << " interpretation facts\n";
  return kExitOk;
}

inline int cmd_render(const CliConfig& cfg, std::ostream& out, std::ostream&) {
  const auto scene = detail::load_scene(cfg.scene_path);
  std::optional<SvgOverlay> overlay;
  if (!cfg.report_path.empty()) {
    nlohmann::json report;
    try {
      report = nlohmann::json::parse(detail::read_file(cfg.report_path));
    } catch (const nlohmann::json::parse_error& e) {
      throw Failure{kExitIo, cfg.report_path + ": malformed JSON: " + e.what()};
    }
    try {
      overlay = overlay_from_report(report, cfg.rank, scene);
    } catch (const Error& e) {
      throw detail::with_file(e, cfg.report_path, kExitInvalid);
    }
  }
  detail::write_output(cfg, render_svg(scene, overlay ? &*overlay : nullptr), out);
  return kExitOk;
}

inline int run(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    switch (cfg.command) {
      case Command::interpret: return cmd_interpret(cfg, out, err);
      case Command::check: return cmd_check(cfg, out, err);
      case Command::render: return cmd_render(cfg, out, err);
    }
  } catch (const Failure& f) {
    err << "error: " << f.message << "\n";
    return f.code;
  }
  return kExitInvalid;
}

/// Parses arguments and runs the selected command.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rule-based scene interpretation"};
  app.require_subcommand(1);
  CliConfig cfg;

  const std::map<std::string, Format> formats{{"text", Format::text}, {"structured", Format::structured}};
  auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out", cfg.out_path, "Write output to this file instead of standard output");
  };

  auto* interpret = app.add_subcommand("interpret", "Interpret a scene and print ranked interpretations");
  interpret->add_option("--scene", cfg.scene_path, "Scene file (.json structured, otherwise image facts)")
      ->required();
  interpret->add_option("--rules", cfg.rules_path, "Rule file")->required();
  interpret->add_option("--domain", cfg.domain_path, "Domain fact file")->required();
  interpret->add_flag("--filtered", cfg.filtered, "List filtered interpretations first (default: all)");
  interpret->add_flag("--distinct", cfg.distinct, "Accepted for compatibility; has no effect");
  interpret->add_option("--format", cfg.format, "Output format: text or structured (default: text)")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
  add_out(interpret);

  auto* check = app.add_subcommand("check", "Parse and validate a rule file against a domain file");
  check->add_option("--rules", cfg.rules_path, "Rule file")->required();
  check->add_option("--domain", cfg.domain_path, "Domain fact file")->required();

  auto* render = app.add_subcommand("render", "Draw a scene, optionally with one interpretation, as SVG");
  render->add_option("--scene", cfg.scene_path, "Scene file")->required();
  render->add_option("--report", cfg.report_path, "Structured report produced by 'interpret'");
  render->add_option("--rank", cfg.rank, "Rank of the interpretation to draw (default: 1)");
  add_out(render);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitIo;
  }
  if (app.got_subcommand(check))
    cfg.command = Command::check;
  else if (app.got_subcommand(render))
    cfg.command = Command::render;
  return run(cfg, out, err);
}

}  // namespace scenerule::cli
