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

#ifndef CINE__CONTROLLER_HPP_
#define CINE__CONTROLLER_HPP_

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "cine/camera.hpp"
#include "cine/instructions.hpp"

namespace cine
{

struct CostWeights
{
  double image = 1.0;
  double dof = 1.0;
  /// Hinge reference for zero and minus-infinity distance targets.
  double min_distance_m = 1.0;
  /// Far limits past this distance count as this distance when the target is finite.
  double max_distance_m = 200.0;
  /// Weight pulling the focus distance back below the point where the far limit hits the cap.
  double cap_weight = 100.0;
  /// Joints closer to the image plane than this are treated as not visible.
  double min_depth_m = 0.1;
  double behind_penalty = 10.0;
};

struct JointGoal
{
  Joint joint = Joint::kChest;
  Eigen::Vector3d point = Eigen::Vector3d::Zero();   ///< world position, meters
  Eigen::Vector2d target = Eigen::Vector2d::Constant(0.5);  ///< normalized image position
};

struct StepTarget
{
  std::vector<JointGoal> joints;
  Eigen::Vector3d subject = Eigen::Vector3d::Zero();  ///< chest, defines d_k
  FocusTriple focus{};
  double mu = kDefaultMarginM;
};

struct CostTerms
{
  double image = 0.0;     ///< weighted
  double dof = 0.0;       ///< weighted
  double total = 0.0;
  ControlVector gradient = ControlVector::Zero();  ///< w.r.t. CameraState::controls()
  DofTargets targets;
  bool behind = false;            ///< some joint fell behind the camera
  bool surrogate_active = false;  ///< a sentinel hinge or the far cap contributes
};

/// The cost is `constant` plus the sum of squared residuals; each residual
/// carries its gradient with respect to CameraState::controls().
struct CostResiduals
{
  std::vector<double> values;
  std::vector<ControlVector> jacobian;
  double constant = 0.0;
};

CostTerms evaluate_cost(
  const CameraState & cam, const StepTarget & target, const CostWeights & weights = {},
  CostResiduals * residuals = nullptr);

enum class Optimizer
{
  kLevenbergMarquardt,  ///< bounded Gauss-Newton steps, each a box QP
  kProjectedGradient,   ///< accelerated projected gradient with backtracking
};

struct ControllerConfig
{
  int horizon = 5;
  CostWeights weights;
  /// Rates: [vx, vy, vz] m/s, [yaw, pitch] rad/s, focal mm/s, f-number 1/s, focus m/s.
  ControlVector rate_lower = -(ControlVector() << 2, 2, 2, 1, 1, 100, 10, 10).finished();
  ControlVector rate_upper = (ControlVector() << 2, 2, 2, 1, 1, 100, 10, 10).finished();
  ControlVector state_lower =
    (ControlVector() << -1e4, -1e4, 0.2, -1e9, -1.4, CameraState::kMinFocal,
    CameraState::kMinFNumber, 0.5).finished();
  ControlVector state_upper =
    (ControlVector() << 1e4, 1e4, 100, 1e9, 1.4, CameraState::kMaxFocal,
    CameraState::kMaxFNumber, 1e3).finished();
  Optimizer optimizer = Optimizer::kLevenbergMarquardt;
  int max_iterations = 500;
  double tolerance = 1e-4;

  /// Throws ConfigError on inverted bounds, a horizon below 1 or negative weights.
  void validate() const;
};

/// Euler step clamped to the state bounds.
CameraState apply_action(
  const CameraState & cam, const ControlVector & action, double dt, const ControllerConfig & config);

struct SubjectState
{
  std::array<Eigen::Vector3d, kJointCount> joints;
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
};

/// Targets for one instruction frame with the subject advanced by `elapsed` seconds.
StepTarget make_step_target(
  const SubjectState & subject, const InstructionFrame & frame, double elapsed, double mu);

/// Horizon cost of an action sequence plus its gradient, one entry per action.
double horizon_cost(
  const CameraState & cam, const SubjectState & subject, std::span<const InstructionFrame> window,
  double mu, const ControllerConfig & config, std::span<const ControlVector> actions,
  std::vector<ControlVector> * gradient = nullptr);

struct ControlPlan
{
  std::vector<ControlVector> actions;
  double cost = 0.0;
  double projected_gradient = 0.0;  ///< in rate-normalized units
  int iterations = 0;
  bool converged = false;
};

/// Plans `horizon` actions against the upcoming instruction frames (the
/// last frame is repeated past the end of the window). The caller applies
/// the first action.
ControlPlan control_step(
  const CameraState & cam, const SubjectState & subject, std::span<const InstructionFrame> window,
  double mu, const ControllerConfig & config, std::span<const ControlVector> warm_start = {});

}  // namespace cine

#endif  // CINE__CONTROLLER_HPP_
