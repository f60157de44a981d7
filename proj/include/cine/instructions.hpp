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

#ifndef CINE__INSTRUCTIONS_HPP_
#define CINE__INSTRUCTIONS_HPP_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "cine/focus.hpp"
#include "cine/measurements.hpp"
#include "cine/subject.hpp"

namespace cine
{

struct JointTarget
{
  Joint joint = Joint::kChest;
  double x = 0.5;  ///< normalized
  double y = 0.5;

  friend bool operator==(const JointTarget &, const JointTarget &) = default;
};

struct InstructionFrame
{
  double duration = kDefaultFrameDuration;
  std::vector<JointTarget> targets;
  FocusTriple focus{};  ///< foreground, subject, background

  const JointTarget * find(Joint joint) const;

  friend bool operator==(const InstructionFrame &, const InstructionFrame &) = default;
};

inline constexpr double kDefaultMarginM = 1.0;

std::vector<Joint> default_controlled_joints();

struct RecordingInstructions
{
  double mu = kDefaultMarginM;
  std::vector<Joint> controlled = default_controlled_joints();
  std::vector<InstructionFrame> frames;

  /// Throws ValidationError on a non-positive margin or duration, a target
  /// outside [0,1]^2, or a target joint that is not controlled.
  void validate() const;

  std::size_t size() const {return frames.size();}
  friend bool operator==(const RecordingInstructions &, const RecordingInstructions &) = default;
};

/// One instruction per frame. Joints invalid in a frame are left out of
/// that frame's targets.
RecordingInstructions build_instructions(
  const JointTrack & joints, const FocusProfile & focus, std::span<const double> durations,
  double mu = kDefaultMarginM, std::vector<Joint> controlled = default_controlled_joints());

struct DofTargets
{
  double near_m = 0.0;  ///< >= 0 or +inf
  double far_m = 0.0;   ///< may be -inf or +inf
};

/// Requested depth-of-field limits for a focus triple and subject distance.
DofTargets dof_targets(const FocusTriple & focus, double distance_m, double mu);

nlohmann::json instructions_to_json(const RecordingInstructions & ins);
RecordingInstructions parse_instructions(const nlohmann::json & doc);
RecordingInstructions parse_instructions_text(const std::string & text);
RecordingInstructions read_instructions(const std::filesystem::path & path);
void write_instructions(const RecordingInstructions & ins, const std::filesystem::path & path);

}  // namespace cine

#endif  // CINE__INSTRUCTIONS_HPP_
