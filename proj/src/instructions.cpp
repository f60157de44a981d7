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

#include "cine/instructions.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "cine/errors.hpp"

namespace cine
{

using nlohmann::json;

const JointTarget * InstructionFrame::find(Joint joint) const
{
  for (const JointTarget & t : targets) {
    if (t.joint == joint) {
      return &t;
    }
  }
  return nullptr;
}

std::vector<Joint> default_controlled_joints()
{
  return {Joint::kLeftShoulder, Joint::kRightShoulder, Joint::kLeftHip, Joint::kRightHip};
}

void RecordingInstructions::validate() const
{
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw ValidationError("mu_m", std::nullopt, "margin must be positive and finite");
  }
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const InstructionFrame & fr = frames[f];
    const int idx = static_cast<int>(f) + 1;
    if (!(fr.duration > 0.0) || !std::isfinite(fr.duration)) {
      throw ValidationError("duration_s", idx, "must be positive");
    }
    for (const JointTarget & t : fr.targets) {
      const std::string field = "targets." + std::string(joint_name(t.joint));
      if (!(t.x >= 0.0 && t.x <= 1.0 && t.y >= 0.0 && t.y <= 1.0)) {
        std::ostringstream os;
        os << "target (" << t.x << ", " << t.y << ") outside [0, 1]^2";
        throw ValidationError(field, idx, os.str());
      }
      if (std::find(controlled.begin(), controlled.end(), t.joint) == controlled.end()) {
        throw ValidationError(field, idx, "joint is not in controlled_joints");
      }
    }
  }
}

RecordingInstructions build_instructions(
  const JointTrack & joints, const FocusProfile & focus, std::span<const double> durations,
  double mu, std::vector<Joint> controlled)
{
  const std::size_t n = joints.size();
  if (n == 0) {
    throw ConfigError("cannot build instructions for an empty frame range");
  }
  if (focus.size() != n || durations.size() != n) {
    throw ConfigError("joint track, focus profile and durations must cover the same frames");
  }
  if (!(mu > 0.0)) {
    throw ConfigError("margin mu must be positive");
  }
  RecordingInstructions ins;
  ins.mu = mu;
  ins.controlled = std::move(controlled);
  ins.frames.resize(n);
  for (std::size_t f = 0; f < n; ++f) {
    InstructionFrame & fr = ins.frames[f];
    fr.duration = durations[f];
    fr.focus = focus.focused[f];
    for (const Joint j : ins.controlled) {
      const TrackedJoint & t = joints.frames[f][static_cast<std::size_t>(index_of(j))];
      if (t.valid) {
        fr.targets.push_back({j, t.x, t.y});
      }
    }
  }
  ins.validate();
  return ins;
}

DofTargets dof_targets(const FocusTriple & focus, double distance_m, double mu)
{
  constexpr double kInfinity = std::numeric_limits<double>::infinity();
  const double closer = std::max(0.0, distance_m - mu);
  const double farther = distance_m + mu;
  const auto [fg, subject, bg] = focus;
  DofTargets t;
  t.near_m = fg ? 0.0 : subject ? closer : bg ? farther : kInfinity;
  t.far_m = bg ? kInfinity : subject ? farther : fg ? closer : -kInfinity;
  return t;
}

json instructions_to_json(const RecordingInstructions & ins)
{
  json doc;
  doc["mu_m"] = ins.mu;
  json names = json::array();
  for (const Joint j : ins.controlled) {
    names.push_back(joint_name(j));
  }
  doc["controlled_joints"] = std::move(names);
  json frames = json::array();
  for (const InstructionFrame & fr : ins.frames) {
    json targets = json::array();
    for (const JointTarget & t : fr.targets) {
      targets.push_back({{"joint", joint_name(t.joint)}, {"x", t.x}, {"y", t.y}});
    }
    frames.push_back(
    {
      {"duration_s", fr.duration},
      {"targets", std::move(targets)},
      {"focus", {fr.focus[0], fr.focus[1], fr.focus[2]}},
    });
  }
  doc["frames"] = std::move(frames);
  return doc;
}

namespace
{

[[noreturn]] void fail(const std::string & field, std::optional<int> frame, const std::string & what)
{
  throw ValidationError(field, frame, what);
}

const json & member(const json & obj, const char * key, std::optional<int> frame)
{
  if (!obj.is_object() || !obj.contains(key)) {
    fail(key, frame, "missing required field");
  }
  return obj.at(key);
}

double number(const json & v, const std::string & field, std::optional<int> frame)
{
  if (!v.is_number() || !std::isfinite(v.get<double>())) {
    fail(field, frame, "expected a finite number");
  }
  return v.get<double>();
}

Joint joint(const json & v, const std::string & field, std::optional<int> frame)
{
  if (!v.is_string()) {
    fail(field, frame, "expected a joint name");
  }
  const auto j = joint_from_name(v.get<std::string>());
  if (!j) {
    fail(field, frame, "unknown joint '" + v.get<std::string>() + "'");
  }
  return *j;
}

bool flag(const json & v, const std::string & field, std::optional<int> frame)
{
  if (v.is_boolean()) {
    return v.get<bool>();
  }
  if (v.is_number_integer() && (v.get<int>() == 0 || v.get<int>() == 1)) {
    return v.get<int>() == 1;
  }
  fail(field, frame, "expected a boolean");
}

}  // namespace

RecordingInstructions parse_instructions(const json & doc)
{
  if (!doc.is_object()) {
    fail("<document>", std::nullopt, "expected an object");
  }
  RecordingInstructions ins;
  ins.mu = number(member(doc, "mu_m", std::nullopt), "mu_m", std::nullopt);
  const json & names = member(doc, "controlled_joints", std::nullopt);
  if (!names.is_array()) {
    fail("controlled_joints", std::nullopt, "expected an array");
  }
  ins.controlled.clear();
  for (const json & n : names) {
    ins.controlled.push_back(joint(n, "controlled_joints", std::nullopt));
  }
  const json & frames = member(doc, "frames", std::nullopt);
  if (!frames.is_array()) {
    fail("frames", std::nullopt, "expected an array");
  }
  int idx = 0;
  for (const json & jf : frames) {
    ++idx;
    InstructionFrame fr;
    fr.duration = number(member(jf, "duration_s", idx), "duration_s", idx);
    const json & targets = member(jf, "targets", idx);
    if (!targets.is_array()) {
      fail("targets", idx, "expected an array");
    }
    for (const json & jt : targets) {
      JointTarget t;
      t.joint = joint(member(jt, "joint", idx), "targets.joint", idx);
      const std::string base = "targets." + std::string(joint_name(t.joint));
      t.x = number(member(jt, "x", idx), base + ".x", idx);
      t.y = number(member(jt, "y", idx), base + ".y", idx);
      fr.targets.push_back(t);
    }
    const json & focus = member(jf, "focus", idx);
    if (!focus.is_array() || focus.size() != kRegionCount) {
      fail("focus", idx, "expected three booleans");
    }
    for (int r = 0; r < kRegionCount; ++r) {
      fr.focus[static_cast<std::size_t>(r)] = flag(focus[static_cast<std::size_t>(r)], "focus", idx);
    }
    ins.frames.push_back(std::move(fr));
  }
  ins.validate();
  return ins;
}

RecordingInstructions parse_instructions_text(const std::string & text)
{
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error & e) {
    fail("<document>", std::nullopt, std::string("malformed JSON: ") + e.what());
  }
  return parse_instructions(doc);
}

RecordingInstructions read_instructions(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    fail("<file>", std::nullopt, "cannot open " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_instructions_text(buffer.str());
}

void write_instructions(const RecordingInstructions & ins, const std::filesystem::path & path)
{
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot write " + path.string());
  }
  out << instructions_to_json(ins).dump(2) << '\n';
}

}  // namespace cine
