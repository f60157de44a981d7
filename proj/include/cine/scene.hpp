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

#ifndef CINE__SCENE_HPP_
#define CINE__SCENE_HPP_

#include <array>
#include <climits>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Core>
#include "json.hpp"

#include "cine/camera.hpp"
#include "cine/controller.hpp"
#include "cine/focus.hpp"
#include "cine/instructions.hpp"
#include "cine/measurements.hpp"

namespace cine
{

using Skeleton = std::array<Eigen::Vector3d, kJointCount>;

/// Standing pose of a 1.75 m person in the body frame (x right, y forward, z up).
const Skeleton & default_skeleton();

struct PathSpec
{
  std::vector<Eigen::Vector2d> waypoints{Eigen::Vector2d::Zero()};
  double speed = 0.0;    ///< m/s along the polyline; the actor stops at the last waypoint
  double heading = 0.0;  ///< facing direction (rad from +x) while not moving
};

struct ActorSpec
{
  double scale = 1.0;
  PathSpec path;
  double confidence = 0.9;  ///< detector confidence when fully in focus
  /// Activity window (1-based, inclusive) and per-frame activity probability.
  int first_frame = 1;
  int last_frame = INT_MAX;
  double active_probability = 1.0;
};

struct NoiseSpec
{
  double joint_sigma_px = 0.0;
  double box_sigma_px = 0.0;
  /// Confidence loss per unit of blurred mask fraction, floored at confidence_floor.
  double blur_penalty = 0.5;
  double confidence_floor = 0.05;
  double joint_q = 0.9;
  double dropout = 0.0;       ///< per-detection drop probability
  double focus_glitch = 0.0;  ///< per-frame probability that the focus map is inverted
  bool shuffle = true;        ///< randomize detection and person order
};

struct EnvironmentSpec
{
  bool ground = true;
  std::optional<double> backdrop_y;  ///< vertical wall at y = backdrop_y
};

struct CameraKey
{
  int frame = 1;
  ControlVector controls = CameraState{}.controls();
};

enum class FocusMode
{
  kScripted,  ///< focus distance comes from the keys
  kSubject,   ///< focus distance tracks the subject's chest
};

struct CameraScript
{
  std::vector<CameraKey> keys{CameraKey{}};
  /// Aim the optical axis at the subject's chest plus this offset.
  std::optional<Eigen::Vector3d> look_at_offset;
  FocusMode focus_mode = FocusMode::kScripted;
  double focus_offset_m = 0.0;
  CameraState optics;  ///< sensor, geometry and circle of confusion

  CameraState at(int frame, const Eigen::Vector3d & chest) const;
};

struct SceneSpec
{
  ImageGeometry geometry;
  int frame_count = 100;
  double frame_duration = kDefaultFrameDuration;
  std::uint64_t seed = 1;
  ActorSpec subject;
  std::vector<ActorSpec> distractors;
  NoiseSpec noise;
  EnvironmentSpec environment;
  CameraScript camera;

  /// Throws ConfigError when a count, probability or sigma is out of range.
  void validate() const;
};

Skeleton actor_pose(const ActorSpec & actor, double time);
Eigen::Vector3d actor_velocity(const ActorSpec & actor, double time);
SubjectState subject_state(const ActorSpec & actor, double time);

struct FrameTruth
{
  CameraState camera;
  DepthOfField dof;
  double distance_m = 0.0;  ///< camera to subject chest
  std::optional<int> subject_detection;
  std::optional<int> subject_person;
  BBox box;
  RleMask mask;
  Skeleton joints_world;
  std::array<Eigen::Vector2d, kJointCount> joints_px;
  std::array<bool, kJointCount> joint_visible{};
  RegionMasks regions;
  RegionTriple fractions{};
  FocusTriple focused{};
};

struct GroundTruth
{
  std::vector<FrameTruth> frames;
};

struct Synthesis
{
  MeasurementSequence sequence;
  GroundTruth truth;
};

/// Renders one frame. The noise stream depends only on the seed and frame number.
std::pair<FrameMeasurements, FrameTruth> render_frame(
  const SceneSpec & spec, int frame, double time, const CameraState & cam);

/// Throws ValidationError naming the first frame where the subject is not visible.
Synthesis synthesize(const SceneSpec & spec);

struct TrajectoryRow
{
  int frame = 1;
  double time = 0.0;
  CameraState camera;
  DepthOfField dof;
  double distance_m = 0.0;
  CostTerms cost;
  std::array<Eigen::Vector2d, kJointCount> joints;  ///< true normalized positions
  std::array<bool, kJointCount> joint_visible{};
  int iterations = 0;
};

struct RolloutOptions
{
  ControllerConfig controller;
  std::optional<CameraState> initial;  ///< defaults to the scene's scripted camera at frame 1
  double divergence_cost = 1e6;
};

struct RolloutResult
{
  std::vector<TrajectoryRow> trajectory;
  Synthesis output;
};

/// Closed loop over every instruction frame. Throws SolverError when the
/// planned cost exceeds the divergence limit.
RolloutResult rollout(
  const RecordingInstructions & instructions, const SceneSpec & target,
  const RolloutOptions & options = {});

nlohmann::json scene_to_json(const SceneSpec & spec);
SceneSpec parse_scene(const nlohmann::json & doc);
SceneSpec read_scene(const std::filesystem::path & path);

nlohmann::json truth_to_json(const GroundTruth & truth);

}  // namespace cine

#endif  // CINE__SCENE_HPP_
