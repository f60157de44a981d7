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

#include "cine/camera.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Geometry>

#include "cine/errors.hpp"

namespace cine
{

void CameraState::validate() const
{
  std::ostringstream os;
  if (!(focal_mm >= kMinFocal && focal_mm <= kMaxFocal)) {
    os << "focal length " << focal_mm << " mm outside [12, 400]";
  } else if (!(f_number >= kMinFNumber && f_number <= kMaxFNumber)) {
    os << "f-number " << f_number << " outside [1.2, 22]";
  } else if (!(focus_m > focal_mm * 1e-3)) {
    os << "focus distance " << focus_m << " m must exceed the focal length";
  } else if (!(coc_mm > 0.0)) {
    os << "circle of confusion must be positive";
  } else if (!(sensor_width_mm > 0.0 && sensor_height_mm > 0.0)) {
    os << "sensor size must be positive";
  } else if (!position.allFinite() || !std::isfinite(yaw) || !std::isfinite(pitch)) {
    os << "camera pose must be finite";
  } else {
    return;
  }
  throw ConfigError(os.str());
}

ControlVector CameraState::controls() const
{
  ControlVector u;
  u << position.x(), position.y(), position.z(), yaw, pitch, focal_mm, f_number, focus_m;
  return u;
}

void CameraState::set_controls(const ControlVector & u)
{
  position = u.head<3>();
  yaw = u(3);
  pitch = u(4);
  focal_mm = u(5);
  f_number = u(6);
  focus_m = u(7);
}

CameraAxes camera_axes(double yaw, double pitch)
{
  const double cy = std::cos(yaw);
  const double sy = std::sin(yaw);
  const double cp = std::cos(pitch);
  const double sp = std::sin(pitch);
  CameraAxes axes;
  axes.forward = Eigen::Vector3d(cp * cy, cp * sy, sp);
  axes.right = Eigen::Vector3d(sy, -cy, 0.0);
  axes.up = axes.right.cross(axes.forward);
  return axes;
}

Projection project(const Eigen::Vector3d & point, const CameraState & cam)
{
  const CameraAxes axes = camera_axes(cam.yaw, cam.pitch);
  const Eigen::Vector3d rel = point - cam.position;
  Projection p;
  p.depth = axes.forward.dot(rel);
  if (p.depth <= kMinDepth) {
    p.behind = true;
    return p;
  }
  const double xs = cam.focal_mm * axes.right.dot(rel) / p.depth;
  const double ys = cam.focal_mm * axes.up.dot(rel) / p.depth;
  p.normalized = Eigen::Vector2d(0.5 + xs / cam.sensor_width_mm, 0.5 - ys / cam.sensor_height_mm);
  p.inside = p.normalized.x() >= 0.0 && p.normalized.x() <= 1.0 &&
    p.normalized.y() >= 0.0 && p.normalized.y() <= 1.0;
  return p;
}

Eigen::Vector2d to_pixels(const Eigen::Vector2d & normalized, const ImageGeometry & geometry)
{
  return {normalized.x() * geometry.width, normalized.y() * geometry.height};
}

DepthOfField thin_lens_dof(double focal_mm, double f_number, double focus_m, double coc_mm)
{
  const double f = focal_mm * 1e-3;
  const double c = coc_mm * 1e-3;
  const double k = f * f / (f_number * c);
  DepthOfField dof;
  dof.hyperfocal_m = k + f;
  dof.near_m = focus_m * k / (k + focus_m - f);
  dof.far_m = focus_m < dof.hyperfocal_m ? focus_m * k / (k - focus_m + f) :
    std::numeric_limits<double>::infinity();
  return dof;
}

DepthOfField thin_lens_dof(const CameraState & cam)
{
  return thin_lens_dof(cam.focal_mm, cam.f_number, cam.focus_m, cam.coc_mm);
}

DofJacobian thin_lens_dof_jacobian(double focal_mm, double f_number, double focus_m, double coc_mm)
{
  const double f = focal_mm * 1e-3;
  const double c = coc_mm * 1e-3;
  const double s = focus_m;
  const double k = f * f / (f_number * c);
  const double dk_df = 2.0 * f / (f_number * c) * 1e-3;  // per mm
  const double dk_dn = -k / f_number;

  DofJacobian jac;
  const double dn_den = k + s - f;
  const double dn_dk = s * (s - f) / (dn_den * dn_den);
  jac.near(0) = dn_dk * dk_df + s * k / (dn_den * dn_den) * 1e-3;
  jac.near(1) = dn_dk * dk_dn;
  jac.near(2) = k * (k - f) / (dn_den * dn_den);

  if (s < k + f) {
    const double e = k - s + f;
    const double df_dk = s * (f - s) / (e * e);
    jac.far(0) = df_dk * dk_df - s * k / (e * e) * 1e-3;
    jac.far(1) = df_dk * dk_dn;
    jac.far(2) = k * (k + f) / (e * e);
  }

  jac.hyperfocal(0) = dk_df + 1e-3;
  jac.hyperfocal(1) = dk_dn;
  return jac;
}

}  // namespace cine
