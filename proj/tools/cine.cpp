// Copyright 2026 The CineStyle Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "cine/errors.hpp"
#include "cine/pipeline.hpp"

namespace fs = std::filesystem;

namespace
{

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;

struct Flags
{
  std::string config_file;
  std::optional<double> theta;
  std::optional<double> mu;
  std::optional<std::string> mode;
  std::optional<std::string> focus_variant;
  std::optional<std::uint64_t> seed;
  bool strict = false;
  std::string out = ".";
};

void add_common(CLI::App & cmd, Flags & flags)
{
  cmd.add_option("--config", flags.config_file, "JSON config file; its keys win over flags")
    ->check(CLI::ExistingFile);
  cmd.add_option("--theta", flags.theta, "focus threshold in [0, 1]");
  cmd.add_option("--mu", flags.mu, "depth-of-field margin in metres");
  cmd.add_option("--mode", flags.mode, "subject selection: dp | relaxed | ablation");
  cmd.add_option("--focus-variant", flags.focus_variant, "focus binarization: anchored | literal");
  cmd.add_option("--seed", flags.seed, "seed for simulated scenes");
  cmd.add_flag("--strict", flags.strict, "reject unknown fields in input files");
  cmd.add_option("--out", flags.out, "output directory")->capture_default_str();
}

std::string read_text(const fs::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw cine::ValidationError("<file>", std::nullopt, "cannot open " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Defaults, then flags, then the config file.
cine::PipelineConfig resolve(const Flags & flags)
{
  nlohmann::json from_flags = nlohmann::json::object();
  if (flags.theta) {
    from_flags["theta"] = *flags.theta;
  }
  if (flags.mu) {
    from_flags["mu_m"] = *flags.mu;
  }
  if (flags.mode) {
    from_flags["mode"] = *flags.mode;
  }
  if (flags.focus_variant) {
    from_flags["focus_variant"] = *flags.focus_variant;
  }
  if (flags.seed) {
    from_flags["seed"] = *flags.seed;
  }
  if (flags.strict) {
    from_flags["strict"] = true;
  }
  cine::PipelineConfig config;
  cine::apply_config(from_flags, config);
  if (!flags.config_file.empty()) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(read_text(flags.config_file));
    } catch (const nlohmann::json::parse_error & e) {
      throw cine::ConfigError(flags.config_file + ": malformed JSON: " + e.what());
    }
    cine::apply_config(doc, config);
  }
  config.validate();
  return config;
}

void write_text(const fs::path & path, const std::string & text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw cine::ValidationError("--out", std::nullopt, "cannot write " + path.string());
  }
  out << text;
}

fs::path prepare(const Flags & flags)
{
  const fs::path dir(flags.out);
  fs::create_directories(dir);
  return dir;
}

cine::MeasurementSequence load_measurements(const fs::path & path, const cine::PipelineConfig & config)
{
  cine::ParsedSequence parsed = cine::parse_sequence(path, config.parse);
  for (const std::string & w : parsed.warnings) {
    std::cerr << "warning: " << w << "\n";
  }
  return std::move(parsed.sequence);
}

cine::SceneSpec load_scene(const fs::path & path, const cine::PipelineConfig & config)
{
  cine::SceneSpec scene = cine::read_scene(path);
  if (config.seed) {
    scene.seed = *config.seed;
  }
  return scene;
}

void write_extraction(
  const fs::path & dir, const std::string & prefix, const cine::MeasurementSequence & seq,
  const cine::ExtractionResult & r)
{
  cine::write_instructions(r.instructions, dir / (prefix + "instructions.json"));
  const std::string subject = cine::subject_trace_csv(seq, r);
  const std::string focus = cine::focus_trace_csv(r.focus);
  write_text(dir / (prefix + "subject_trace.csv"), subject);
  write_text(dir / (prefix + "focus_trace.csv"), focus);
  write_text(dir / (prefix + "focus_trace.svg"), cine::csv_to_svg(focus, "focus"));
}

void write_style(const fs::path & dir, const cine::StyleReport & report)
{
  const std::string csv = cine::style_report_csv(report);
  write_text(dir / "style_report.csv", csv);
  write_text(dir / "style_report.svg", cine::csv_to_svg(csv, "style distance"));
  write_text(dir / "style_summary.txt", cine::style_report_summary(report));
  std::cout << cine::style_report_summary(report);
}

int cmd_extract(const Flags & flags, const std::string & input)
{
  const cine::PipelineConfig config = resolve(flags);
  const cine::MeasurementSequence seq = load_measurements(input, config);
  const cine::ExtractionResult r = cine::extract(seq, config);
  const fs::path dir = prepare(flags);
  write_extraction(dir, "", seq, r);
  write_text(dir / "config.json", cine::config_to_json(config).dump(2) + "\n");
  std::cout << "extracted " << r.instructions.size() << " frames into " << dir.string() << "\n";
  return kExitOk;
}

int cmd_transfer(const Flags & flags, const std::string & instructions, const std::string & scene_file)
{
  const cine::PipelineConfig config = resolve(flags);
  const cine::RecordingInstructions source = cine::read_instructions(instructions);
  const cine::SceneSpec scene = load_scene(scene_file, config);
  cine::RolloutOptions ro;
  ro.controller = config.controller;
  const cine::RolloutResult rr = cine::rollout(source, scene, ro);
  const cine::ExtractionResult output = cine::extract(rr.output.sequence, config);
  const fs::path dir = prepare(flags);
  write_text(dir / "trajectory.csv", cine::trajectory_csv(rr.trajectory));
  cine::write_sequence(rr.output.sequence, dir / "output_measurements.json");
  write_text(dir / "output_truth.json", cine::truth_to_json(rr.output.truth).dump() + "\n");
  write_extraction(dir, "output_", rr.output.sequence, output);
  write_style(dir, cine::compare_style(source, output.instructions, config.style));
  return kExitOk;
}

int cmd_compare(const Flags & flags, const std::string & a, const std::string & b)
{
  const cine::PipelineConfig config = resolve(flags);
  const cine::StyleReport report =
    cine::compare_style(cine::read_instructions(a), cine::read_instructions(b), config.style);
  write_style(prepare(flags), report);
  return kExitOk;
}

int cmd_simulate(const Flags & flags, const std::string & scene_file)
{
  const cine::PipelineConfig config = resolve(flags);
  const cine::Synthesis syn = cine::synthesize(load_scene(scene_file, config));
  const fs::path dir = prepare(flags);
  cine::write_sequence(syn.sequence, dir / "measurements.json");
  write_text(dir / "truth.json", cine::truth_to_json(syn.truth).dump() + "\n");
  std::cout << "simulated " << syn.sequence.size() << " frames into " << dir.string() << "\n";
  return kExitOk;
}

int cmd_plot(const Flags & flags, const std::string & csv_file, const std::string & title)
{
  const std::string csv = read_text(csv_file);
  const fs::path dir = prepare(flags);
  const fs::path out = dir / fs::path(csv_file).filename().replace_extension(".svg");
  write_text(out, cine::csv_to_svg(csv, title.empty() ? fs::path(csv_file).stem().string() : title));
  std::cout << out.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Extract a camera style from measurements and reproduce it in a simulated scene."};
  app.require_subcommand(1);

  Flags flags;
  std::string input;
  std::string second;
  std::string title;

  CLI::App * extract = app.add_subcommand("extract", "measurements JSON -> recording instructions and traces");
  extract->add_option("measurements", input, "measurement file")->required();
  add_common(*extract, flags);

  CLI::App * transfer = app.add_subcommand("transfer", "replay instructions in a scene with the camera controller");
  transfer->add_option("instructions", input, "instructions file")->required();
  transfer->add_option("scene", second, "target scene file")->required();
  add_common(*transfer, flags);

  CLI::App * compare = app.add_subcommand("compare", "style distance between two instruction files");
  compare->add_option("a", input, "first instructions file")->required();
  compare->add_option("b", second, "second instructions file")->required();
  add_common(*compare, flags);

  CLI::App * simulate = app.add_subcommand("simulate", "render a scene into measurements and ground truth");
  simulate->add_option("scene", input, "scene file")->required();
  add_common(*simulate, flags);

  CLI::App * plot = app.add_subcommand("plot", "render a trace CSV as SVG");
  plot->add_option("csv", input, "trace file")->required();
  plot->add_option("--title", title, "plot title");
  add_common(*plot, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp & e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp & e) {
    return app.exit(e);
  } catch (const CLI::ParseError & e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*extract) {
      return cmd_extract(flags, input);
    }
    if (*transfer) {
      return cmd_transfer(flags, input, second);
    }
    if (*compare) {
      return cmd_compare(flags, input, second);
    }
    if (*simulate) {
      return cmd_simulate(flags, input);
    }
    return cmd_plot(flags, input, title);
  } catch (const cine::SolverError & e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const cine::Error & e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const fs::filesystem_error & e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}
