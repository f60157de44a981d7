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

#include "cine/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "cine/errors.hpp"

namespace cine
{

using nlohmann::json;

void PipelineConfig::validate() const
{
  if (!(mu > 0.0)) {
    throw ConfigError("mu must be positive");
  }
  if (!(focus.theta >= 0.0 && focus.theta <= 1.0)) {
    throw ConfigError("theta must lie in [0, 1]");
  }
  if (!(tracking.continuity >= 0.0) || !(joints.continuity >= 0.0)) {
    throw ConfigError("continuity weights must be non-negative");
  }
  if (tracking.gamma && !(*tracking.gamma >= 0.0)) {
    throw ConfigError("gamma must be non-negative");
  }
  if (tracking.temperature && !(*tracking.temperature > 0.0)) {
    throw ConfigError("temperature must be positive");
  }
  if (!(tracking.clip > 0.0 && tracking.clip < 0.5)) {
    throw ConfigError("clip must lie in (0, 0.5)");
  }
  if (!(focus.binarize.epsilon > 0.0) || !(focus.binarize.kappa > 0.0) ||
    !(focus.binarize.continuity >= 0.0))
  {
    throw ConfigError("focus binarization needs epsilon > 0, kappa > 0, continuity >= 0");
  }
  if (!(style.delta >= 0.0) || !(style.eta >= 0.0) || !(style_threshold >= 0.0)) {
    throw ConfigError("style weights and threshold must be non-negative");
  }
  controller.validate();
}

namespace
{

class ConfigReader
{
public:
  ConfigReader(const json & obj, std::string path, std::initializer_list<const char *> known)
  : obj_(obj), path_(std::move(path))
  {
    if (!obj.is_object()) {
      throw ConfigError(label("") + ": expected an object");
    }
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool ok = false;
      for (const char * k : known) {
        ok = ok || it.key() == k;
      }
      if (!ok) {
        throw ConfigError(label(it.key()) + ": unknown configuration key");
      }
    }
  }

  std::string label(const std::string & key) const
  {
    return path_.empty() ? key : key.empty() ? path_ : path_ + "." + key;
  }

  const json * find(const char * key) const {return obj_.contains(key) ? &obj_.at(key) : nullptr;}

  template<typename T>
  void number(const char * key, T & out) const
  {
    if (const json * v = find(key)) {
      if (!v->is_number()) {
        throw ConfigError(label(key) + ": expected a number");
      }
      out = v->get<T>();
    }
  }

  void optional_number(const char * key, std::optional<double> & out) const
  {
    if (const json * v = find(key)) {
      if (v->is_null()) {
        out.reset();
      } else if (v->is_number()) {
        out = v->get<double>();
      } else {
        throw ConfigError(label(key) + ": expected a number or null");
      }
    }
  }

  void boolean(const char * key, bool & out) const
  {
    if (const json * v = find(key)) {
      if (!v->is_boolean()) {
        throw ConfigError(label(key) + ": expected a boolean");
      }
      out = v->get<bool>();
    }
  }

  std::string text(const char * key) const
  {
    const json * v = find(key);
    if (!v->is_string()) {
      throw ConfigError(label(key) + ": expected a string");
    }
    return v->get<std::string>();
  }

  void control_vector(const char * key, ControlVector & out) const
  {
    if (const json * v = find(key)) {
      if (!v->is_array() || v->size() != 8) {
        throw ConfigError(label(key) + ": expected 8 numbers");
      }
      for (int i = 0; i < 8; ++i) {
        const json & e = (*v)[static_cast<std::size_t>(i)];
        if (!e.is_number()) {
          throw ConfigError(label(key) + ": expected 8 numbers");
        }
        out(i) = e.get<double>();
      }
    }
  }

private:
  const json & obj_;
  std::string path_;
};

json control_json(const ControlVector & v)
{
  return json(std::vector<double>(v.data(), v.data() + 8));
}

}  // namespace

void apply_config(const json & doc, PipelineConfig & config)
{
  const ConfigReader r(doc, "",
    {"theta", "mu_m", "continuity", "joint_continuity", "max_missing_fraction", "gamma",
      "temperature", "clip", "epsilon", "kappa", "focus_continuity", "mode", "focus_variant",
      "strict", "seed", "controlled_joints", "style", "controller"});
  r.number("theta", config.focus.theta);
  r.number("mu_m", config.mu);
  r.number("continuity", config.tracking.continuity);
  r.number("joint_continuity", config.joints.continuity);
  r.number("max_missing_fraction", config.joints.max_missing_fraction);
  r.optional_number("gamma", config.tracking.gamma);
  r.optional_number("temperature", config.tracking.temperature);
  r.number("clip", config.tracking.clip);
  r.number("epsilon", config.focus.binarize.epsilon);
  r.number("kappa", config.focus.binarize.kappa);
  r.number("focus_continuity", config.focus.binarize.continuity);
  r.boolean("strict", config.parse.strict);
  if (r.find("mode")) {
    const auto mode = tracking_mode_from_string(r.text("mode"));
    if (!mode) {
      throw ConfigError("mode: expected dp, relaxed or ablation");
    }
    config.tracking.mode = *mode;
  }
  if (r.find("focus_variant")) {
    const auto variant = focus_variant_from_string(r.text("focus_variant"));
    if (!variant) {
      throw ConfigError("focus_variant: expected anchored or literal");
    }
    config.focus.binarize.variant = *variant;
  }
  if (const json * s = r.find("seed")) {
    if (!s->is_number_integer() || (!s->is_number_unsigned() && s->get<std::int64_t>() < 0)) {
      throw ConfigError("seed: expected a non-negative integer");
    }
    config.seed = s->get<std::uint64_t>();
  }
  if (const json * names = r.find("controlled_joints")) {
    if (!names->is_array()) {
      throw ConfigError("controlled_joints: expected an array of joint names");
    }
    config.controlled.clear();
    for (const json & n : *names) {
      const auto j = n.is_string() ? joint_from_name(n.get<std::string>()) : std::nullopt;
      if (!j) {
        throw ConfigError("controlled_joints: unknown joint " + n.dump());
      }
      config.controlled.push_back(*j);
    }
  }
  if (const json * s = r.find("style")) {
    const ConfigReader sr(*s, "style", {"w_delta", "w_eta", "threshold"});
    sr.number("w_delta", config.style.delta);
    sr.number("w_eta", config.style.eta);
    sr.number("threshold", config.style_threshold);
  }
  if (const json * c = r.find("controller")) {
    const ConfigReader cr(*c, "controller",
      {"horizon", "w_im", "w_dof", "min_distance_m", "max_distance_m", "max_iterations",
        "tolerance", "optimizer", "rate_lower", "rate_upper", "state_lower", "state_upper"});
    ControllerConfig & cc = config.controller;
    cr.number("horizon", cc.horizon);
    cr.number("w_im", cc.weights.image);
    cr.number("w_dof", cc.weights.dof);
    cr.number("min_distance_m", cc.weights.min_distance_m);
    cr.number("max_distance_m", cc.weights.max_distance_m);
    cr.number("max_iterations", cc.max_iterations);
    cr.number("tolerance", cc.tolerance);
    if (cr.find("optimizer")) {
      const std::string name = cr.text("optimizer");
      if (name == "lm") {
        cc.optimizer = Optimizer::kLevenbergMarquardt;
      } else if (name == "projected_gradient") {
        cc.optimizer = Optimizer::kProjectedGradient;
      } else {
        throw ConfigError("controller.optimizer: expected lm or projected_gradient");
      }
    }
    cr.control_vector("rate_lower", cc.rate_lower);
    cr.control_vector("rate_upper", cc.rate_upper);
    cr.control_vector("state_lower", cc.state_lower);
    cr.control_vector("state_upper", cc.state_upper);
  }
  config.validate();
}

json config_to_json(const PipelineConfig & config)
{
  json names = json::array();
  for (const Joint j : config.controlled) {
    names.push_back(joint_name(j));
  }
  const ControllerConfig & cc = config.controller;
  json doc{
    {"theta", config.focus.theta},
    {"mu_m", config.mu},
    {"continuity", config.tracking.continuity},
    {"joint_continuity", config.joints.continuity},
    {"max_missing_fraction", config.joints.max_missing_fraction},
    {"gamma", config.tracking.gamma ? json(*config.tracking.gamma) : json(nullptr)},
    {"temperature", config.tracking.temperature ? json(*config.tracking.temperature) : json(nullptr)},
    {"clip", config.tracking.clip},
    {"epsilon", config.focus.binarize.epsilon},
    {"kappa", config.focus.binarize.kappa},
    {"focus_continuity", config.focus.binarize.continuity},
    {"mode", to_string(config.tracking.mode)},
    {"focus_variant", to_string(config.focus.binarize.variant)},
    {"strict", config.parse.strict},
    {"controlled_joints", names},
    {"style", {{"w_delta", config.style.delta}, {"w_eta", config.style.eta},
      {"threshold", config.style_threshold}}},
    {"controller", {
        {"horizon", cc.horizon}, {"w_im", cc.weights.image}, {"w_dof", cc.weights.dof},
        {"min_distance_m", cc.weights.min_distance_m}, {"max_distance_m", cc.weights.max_distance_m},
        {"max_iterations", cc.max_iterations}, {"tolerance", cc.tolerance},
        {"optimizer", cc.optimizer == Optimizer::kLevenbergMarquardt ? "lm" : "projected_gradient"},
        {"rate_lower", control_json(cc.rate_lower)}, {"rate_upper", control_json(cc.rate_upper)},
        {"state_lower", control_json(cc.state_lower)}, {"state_upper", control_json(cc.state_upper)},
      }},
  };
  if (config.seed) {
    doc["seed"] = *config.seed;
  }
  return doc;
}

ExtractionResult extract(const MeasurementSequence & seq, const PipelineConfig & config)
{
  config.validate();
  ExtractionResult out;
  out.subject = extract_subject(seq, config.tracking, config.joints);
  const std::vector<RleMask> masks = subject_masks(seq, out.subject.track);
  out.focus = extract_focus(seq, masks, config.focus);
  std::vector<double> durations;
  durations.reserve(seq.frames.size());
  for (const auto & f : seq.frames) {
    durations.push_back(f.duration);
  }
  out.instructions = build_instructions(
    out.subject.joints, out.focus, durations, config.mu, config.controlled);
  return out;
}

namespace
{

std::ostringstream csv_stream()
{
  std::ostringstream os;
  os.precision(10);
  return os;
}

}  // namespace

std::string subject_trace_csv(const MeasurementSequence & seq, const ExtractionResult & result)
{
  std::ostringstream os = csv_stream();
  os << "frame,chosen,mask_detection,person,left,top,right,bottom";
  for (int j = 0; j < kJointCount; ++j) {
    const auto name = joint_name(static_cast<Joint>(j));
    os << ',' << name << "_x," << name << "_y";
  }
  os << '\n';
  const SubjectTrack & track = result.subject.track;
  auto index = [](const std::optional<int> & v) {return v ? std::to_string(*v) : std::string();};
  for (std::size_t f = 0; f < track.size(); ++f) {
    const BBox & b = track.boxes[f];
    os << seq.frames[f].frame_index << ',' << index(track.chosen[f]) << ','
       << index(track.mask_detection[f]) << ',' << index(result.subject.person[f]) << ','
       << b.left << ',' << b.top << ',' << b.right << ',' << b.bottom;
    for (const TrackedJoint & t : result.subject.joints.frames[f]) {
      if (t.valid) {
        os << ',' << t.x << ',' << t.y;
      } else {
        os << ",,";
      }
    }
    os << '\n';
  }
  return os.str();
}

std::string focus_trace_csv(const FocusProfile & focus)
{
  std::ostringstream os = csv_stream();
  os << "frame";
  for (int r = 0; r < kRegionCount; ++r) {
    const auto name = region_name(static_cast<Region>(r));
    os << ",b_" << name << ",B_" << name << ",focused_" << name;
  }
  os << '\n';
  for (std::size_t f = 0; f < focus.size(); ++f) {
    os << f + 1;
    for (std::size_t r = 0; r < static_cast<std::size_t>(kRegionCount); ++r) {
      os << ',' << focus.raw[f][r] << ',' << focus.smoothed[f][r] << ',' << (focus.focused[f][r] ? 1 : 0);
    }
    os << '\n';
  }
  return os.str();
}

std::string trajectory_csv(const std::vector<TrajectoryRow> & rows)
{
  std::ostringstream os = csv_stream();
  os << "frame,time_s,x,y,z,yaw,pitch,focal_mm,f_number,focus_m,near_m,far_m,distance_m,"
        "target_near_m,target_far_m,image_cost,dof_cost,iterations";
  for (int j = 0; j < kJointCount; ++j) {
    const auto name = joint_name(static_cast<Joint>(j));
    os << ',' << name << "_x," << name << "_y";
  }
  os << '\n';
  for (const TrajectoryRow & r : rows) {
    const ControlVector c = r.camera.controls();
    os << r.frame << ',' << r.time;
    for (int i = 0; i < 8; ++i) {
      os << ',' << c(i);
    }
    os << ',' << r.dof.near_m << ',' << r.dof.far_m << ',' << r.distance_m << ','
       << r.cost.targets.near_m << ',' << r.cost.targets.far_m << ',' << r.cost.image << ','
       << r.cost.dof << ',' << r.iterations;
    for (std::size_t j = 0; j < static_cast<std::size_t>(kJointCount); ++j) {
      if (r.joint_visible[j]) {
        os << ',' << r.joints[j].x() << ',' << r.joints[j].y();
      } else {
        os << ",,";
      }
    }
    os << '\n';
  }
  return os.str();
}

std::string csv_to_svg(const std::string & csv, const std::string & title)
{
  std::istringstream in(csv);
  std::string line;
  std::vector<std::string> header;
  if (std::getline(in, line)) {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) {
      header.push_back(cell);
    }
  }
  if (header.size() < 2) {
    throw ValidationError("<csv>", std::nullopt, "need a header with at least two columns");
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::vector<double>> cols(header.size());
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      cells.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
      if (comma == std::string::npos) {
        break;
      }
      start = comma + 1;
    }
    for (std::size_t c = 0; c < header.size(); ++c) {
      double v = nan;
      if (c < cells.size() && !cells[c].empty()) {
        char * end = nullptr;
        v = std::strtod(cells[c].c_str(), &end);
        if (end == cells[c].c_str() || *end != '\0' || !std::isfinite(v)) {
          v = nan;
        }
      }
      cols[c].push_back(v);
    }
  }

  std::vector<std::size_t> series;
  for (std::size_t c = 1; c < header.size(); ++c) {
    if (std::any_of(cols[c].begin(), cols[c].end(), [](double v) {return std::isfinite(v);})) {
      series.push_back(c);
    }
  }
  constexpr double kWidth = 640.0;
  constexpr double kPanel = 70.0;
  constexpr double kLeft = 150.0;
  constexpr double kTop = 30.0;
  const double height = kTop + kPanel * static_cast<double>(series.size()) + 10.0;
  std::ostringstream os;
  os.precision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth + kLeft + 10 << "\" height=\""
     << height << "\" font-family=\"sans-serif\" font-size=\"10\">\n"
     << "<text x=\"10\" y=\"18\" font-size=\"13\">" << title << "</text>\n";

  const auto & xs = cols[0];
  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin;
  for (double x : xs) {
    if (std::isfinite(x)) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
    }
  }
  if (!(xmax > xmin)) {
    xmax = xmin + 1.0;
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto & ys = cols[series[s]];
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (double y : ys) {
      if (std::isfinite(y)) {
        lo = std::min(lo, y);
        hi = std::max(hi, y);
      }
    }
    if (!(hi > lo)) {
      hi = lo + 1.0;
      lo -= 1.0;
    }
    const double y0 = kTop + kPanel * static_cast<double>(s);
    const char * colour = s % 2 == 0 ? "#1f3b73" : "#8fb3e8";
    os << "<rect x=\"" << kLeft << "\" y=\"" << y0 << "\" width=\"" << kWidth << "\" height=\""
       << kPanel - 12 << "\" fill=\"none\" stroke=\"#bbb\"/>\n"
       << "<text x=\"8\" y=\"" << y0 + 14 << "\">" << header[series[s]] << "</text>\n"
       << "<text x=\"8\" y=\"" << y0 + 28 << "\" fill=\"#666\">[" << lo << ", " << hi << "]</text>\n";
    std::string points;
    auto flush = [&]() {
        if (!points.empty()) {
          os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\""
             << points << "\"/>\n";
          points.clear();
        }
      };
    for (std::size_t i = 0; i < ys.size(); ++i) {
      if (!std::isfinite(ys[i]) || !std::isfinite(xs[i])) {
        flush();
        continue;
      }
      const double px = kLeft + (xs[i] - xmin) / (xmax - xmin) * kWidth;
      const double py = y0 + (kPanel - 14) * (1.0 - (ys[i] - lo) / (hi - lo)) + 1;
      std::ostringstream pt;
      pt.precision(6);
      pt << px << ',' << py << ' ';
      points += pt.str();
    }
    flush();
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace cine
