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

#ifndef CINE__CAMERA_HPP_
#define CINE__CAMERA_HPP_

#include <Eigen/Core>

#include "cine/rle_mask.hpp"

namespace cine
{

/// World frame: x east, y north, z up (meters). Yaw rotates about +z from +x,
/// positive pitch tilts the optical axis upward.
struct CameraState
{
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  double yaw = 0.0;
  double pitch = 0.0;
  double focal_mm = 35.0;
  double f_number = 4.0;
  double focus_m = 10.0;
  double sensor_width_mm = 36.0;
  double sensor_height_mm = 20.25;
  ImageGeometry geometry{};
  double coc_mm = 0.03;

  static constexpr double kMinFocal = 12.0;
  static constexpr double kMaxFocal = 400.0;
  static constexpr double kMinFNumber = 1.2;
  static constexpr double kMaxFNumber = 22.0;

  /// Throws ConfigError when an intrinsic leaves its physical range.
  void validate() const;

  /// [x, y, z, yaw, pitch, focal_mm, f_number, focus_m]
  Eigen::Matrix<double, 8, 1> controls() const;
  void set_controls(const Eigen::Matrix<double, 8, 1> & u);
};

using ControlVector = Eigen::Matrix<double, 8, 1>;

struct CameraAxes
{
  Eigen::Vector3d forward;
  Eigen::Vector3d right;
  Eigen::Vector3d up;
};

CameraAxes camera_axes(double yaw, double pitch);

struct Projection
{
  Eigen::Vector2d normalized = Eigen::Vector2d::Constant(0.5);
  double depth = 0.0;   ///< along the optical axis, meters
  bool behind = false;  ///< depth <= kMinDepth
  bool inside = false;  ///< normalized in [0,1]^2 and not behind
};

inline constexpr double kMinDepth = 1e-6;

Projection project(const Eigen::Vector3d & point, const CameraState & cam);

/// Normalized coordinates scaled by the image size.
Eigen::Vector2d to_pixels(const Eigen::Vector2d & normalized, const ImageGeometry & geometry);

struct DepthOfField
{
  double near_m = 0.0;
  double far_m = 0.0;  ///< +inf once focus reaches the hyperfocal distance
  double hyperfocal_m = 0.0;
};

DepthOfField thin_lens_dof(const CameraState & cam);
DepthOfField thin_lens_dof(double focal_mm, double f_number, double focus_m, double coc_mm);

/// Partial derivatives of the near/far limits and hyperfocal distance with
/// respect to (focal_mm, f_number, focus_m). Far derivatives are zero when
/// the far limit is infinite.
struct DofJacobian
{
  Eigen::Vector3d near = Eigen::Vector3d::Zero();
  Eigen::Vector3d far = Eigen::Vector3d::Zero();
  Eigen::Vector3d hyperfocal = Eigen::Vector3d::Zero();
};

DofJacobian thin_lens_dof_jacobian(double focal_mm, double f_number, double focus_m, double coc_mm);

}  // namespace cine

#endif  // CINE__CAMERA_HPP_
