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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cine/camera.hpp"
#include "cine/errors.hpp"
#include "oracles.hpp"

namespace cine
{
namespace
{

CameraState random_camera(std::mt19937_64 & rng)
{
  std::uniform_real_distribution<double> pos(-20.0, 20.0);
  std::uniform_real_distribution<double> ang(-3.0, 3.0);
  std::uniform_real_distribution<double> pitch(-1.2, 1.2);
  std::uniform_real_distribution<double> focal(12.0, 400.0);
  std::uniform_real_distribution<double> fnum(1.2, 22.0);
  CameraState c;
  c.position = Eigen::Vector3d(pos(rng), pos(rng), 0.5 + std::abs(pos(rng)) * 0.1);
  c.yaw = ang(rng);
  c.pitch = pitch(rng);
  c.focal_mm = focal(rng);
  c.f_number = fnum(rng);
  c.focus_m = c.focal_mm * 1e-3 + std::exp(std::uniform_real_distribution<double>(-2.0, 6.0)(rng));
  return c;
}

TEST(Camera, PointOnOpticalAxisProjectsToCenter)
{
  CameraState c;
  c.position = Eigen::Vector3d(1.0, 2.0, 1.5);
  c.yaw = 0.7;
  c.pitch = -0.2;
  const CameraAxes ax = camera_axes(c.yaw, c.pitch);
  const Projection p = project(c.position + 7.0 * ax.forward, c);
  EXPECT_NEAR(p.normalized.x(), 0.5, 1e-12);
  EXPECT_NEAR(p.normalized.y(), 0.5, 1e-12);
  EXPECT_NEAR(p.depth, 7.0, 1e-12);
  EXPECT_TRUE(p.inside);
}

TEST(Camera, AxesAreOrthonormalAndRightHanded)
{
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    const CameraState c = random_camera(rng);
    const CameraAxes ax = camera_axes(c.yaw, c.pitch);
    EXPECT_NEAR(ax.forward.norm(), 1.0, 1e-12);
    EXPECT_NEAR(ax.right.norm(), 1.0, 1e-12);
    EXPECT_NEAR(ax.up.norm(), 1.0, 1e-12);
    EXPECT_NEAR(ax.forward.dot(ax.right), 0.0, 1e-12);
    EXPECT_NEAR(ax.up.dot(ax.right), 0.0, 1e-12);
    EXPECT_NEAR(ax.right.cross(ax.up).dot(ax.forward), -1.0, 1e-12);
    EXPECT_NEAR(ax.right.z(), 0.0, 1e-15);  // no roll
  }
}

TEST(Camera, DoublingFocalLengthDoublesOffsetFromCenter)
{
  CameraState c;
  c.position = Eigen::Vector3d(0.0, 0.0, 1.6);
  const Eigen::Vector3d point(10.0, -0.8, 2.1);
  const Eigen::Vector2d a = project(point, c).normalized - Eigen::Vector2d::Constant(0.5);
  c.focal_mm *= 2.0;
  const Eigen::Vector2d b = project(point, c).normalized - Eigen::Vector2d::Constant(0.5);
  EXPECT_NEAR(b.x(), 2.0 * a.x(), 1e-12);
  EXPECT_NEAR(b.y(), 2.0 * a.y(), 1e-12);
  EXPECT_GT(a.x(), 0.0);  // point to the camera's right
  EXPECT_LT(a.y(), 0.0);  // above center
}

TEST(Camera, MatchesHomogeneousMatrixProjection)
{
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> off(-5.0, 5.0);
  int checked = 0;
  for (int i = 0; i < 500; ++i) {
    const CameraState c = random_camera(rng);
    const CameraAxes ax = camera_axes(c.yaw, c.pitch);
    const Eigen::Vector3d point = c.position + 10.0 * ax.forward + Eigen::Vector3d(off(rng), off(rng), off(rng));
    const Projection p = project(point, c);
    if (p.behind) {
      continue;
    }
    const Eigen::Vector2d ref = oracle::homogeneous_projection(point, c);
    EXPECT_NEAR(p.normalized.x(), ref.x(), 1e-9 * std::max(1.0, std::abs(ref.x())));
    EXPECT_NEAR(p.normalized.y(), ref.y(), 1e-9 * std::max(1.0, std::abs(ref.y())));
    ++checked;
  }
  EXPECT_GT(checked, 400);
}

TEST(Camera, PointsBehindAreFlagged)
{
  CameraState c;
  const Projection p = project(Eigen::Vector3d(-3.0, 0.0, 0.0), c);
  EXPECT_TRUE(p.behind);
  EXPECT_FALSE(p.inside);
}

TEST(ThinLens, HyperfocalOfFiftyMillimetreAtF2)
{
  const DepthOfField d = thin_lens_dof(50.0, 2.0, 10.0, 0.03);
  EXPECT_NEAR(d.hyperfocal_m, 0.05 * 0.05 / (2.0 * 0.03e-3) + 0.05, 1e-12);
  EXPECT_NEAR(d.hyperfocal_m, 41.7167, 1e-4);
  // Focused at H the near limit is H/2 and the far limit is infinite.
  const DepthOfField at_h = thin_lens_dof(50.0, 2.0, d.hyperfocal_m, 0.03);
  EXPECT_NEAR(at_h.near_m, d.hyperfocal_m / 2.0, 1e-9);
  EXPECT_TRUE(std::isinf(at_h.far_m));
}

TEST(ThinLens, FarLimitInfiniteBeyondHyperfocal)
{
  const DepthOfField d = thin_lens_dof(35.0, 8.0, 100.0, 0.03);
  ASSERT_LT(d.hyperfocal_m, 100.0);
  EXPECT_TRUE(std::isinf(d.far_m) && d.far_m > 0.0);
  EXPECT_LT(d.near_m, 100.0);
}

TEST(ThinLens, BlurCircleEqualsCocAtLimits)
{
  std::mt19937_64 rng(1000);
  const double coc = 0.03;
  for (int i = 0; i < 1000; ++i) {
    const CameraState c = random_camera(rng);
    const DepthOfField d = thin_lens_dof(c.focal_mm, c.f_number, c.focus_m, coc);
    const double near_blur = oracle::ray_trace_blur_mm(c.focal_mm, c.f_number, c.focus_m, d.near_m);
    EXPECT_NEAR(near_blur / coc, 1.0, 1e-6) << "state " << i;
    if (std::isfinite(d.far_m)) {
      const double far_blur = oracle::ray_trace_blur_mm(c.focal_mm, c.f_number, c.focus_m, d.far_m);
      EXPECT_NEAR(far_blur / coc, 1.0, 1e-6) << "state " << i;
      EXPECT_LT(d.near_m, c.focus_m);
      EXPECT_GT(d.far_m, c.focus_m);
    }
  }
}

TEST(ThinLens, DepthOfFieldGrowsWithFNumberAndShrinksWithFocalLength)
{
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    CameraState c = random_camera(rng);
    c.f_number = std::min(c.f_number, 20.0);
    c.focal_mm = std::min(c.focal_mm, 390.0);
    const DepthOfField base = thin_lens_dof(c);
    const DepthOfField wider = thin_lens_dof(c.focal_mm, c.f_number + 1.0, c.focus_m, c.coc_mm);
    EXPECT_LE(wider.near_m, base.near_m + 1e-12);
    EXPECT_GE(wider.far_m, base.far_m);
    const DepthOfField longer = thin_lens_dof(c.focal_mm + 10.0, c.f_number, c.focus_m, c.coc_mm);
    EXPECT_GE(longer.near_m, base.near_m - 1e-12);
    EXPECT_LE(longer.far_m, base.far_m);
  }
}

TEST(ThinLens, LimitsIncreaseWithFocusDistance)
{
  double prev_near = 0.0;
  double prev_far = 0.0;
  for (double s = 0.5; s < 60.0; s += 0.25) {
    const DepthOfField d = thin_lens_dof(50.0, 2.8, s, 0.03);
    EXPECT_GT(d.near_m, prev_near);
    EXPECT_TRUE(d.far_m > prev_far || std::isinf(d.far_m));
    prev_near = d.near_m;
    prev_far = d.far_m;
  }
}

TEST(ThinLens, JacobianMatchesCentralDifferences)
{
  std::mt19937_64 rng(21);
  for (int i = 0; i < 200; ++i) {
    const CameraState c = random_camera(rng);
    const DofJacobian jac = thin_lens_dof_jacobian(c.focal_mm, c.f_number, c.focus_m, c.coc_mm);
    const Eigen::Vector3d x(c.focal_mm, c.f_number, c.focus_m);
    for (int k = 0; k < 3; ++k) {
      const double h = 1e-6 * std::max(1.0, std::abs(x(k)));
      Eigen::Vector3d xp = x;
      Eigen::Vector3d xm = x;
      xp(k) += h;
      xm(k) -= h;
      const DepthOfField dp = thin_lens_dof(xp(0), xp(1), xp(2), c.coc_mm);
      const DepthOfField dm = thin_lens_dof(xm(0), xm(1), xm(2), c.coc_mm);
      const double fd_near = (dp.near_m - dm.near_m) / (2.0 * h);
      EXPECT_NEAR(jac.near(k), fd_near, 1e-5 * std::max(1.0, std::abs(fd_near)));
      const double fd_h = (dp.hyperfocal_m - dm.hyperfocal_m) / (2.0 * h);
      EXPECT_NEAR(jac.hyperfocal(k), fd_h, 1e-5 * std::max(1.0, std::abs(fd_h)));
      if (std::isfinite(dp.far_m) && std::isfinite(dm.far_m) && dp.far_m < 1e4) {
        const double fd_far = (dp.far_m - dm.far_m) / (2.0 * h);
        EXPECT_NEAR(jac.far(k), fd_far, 1e-4 * std::max(1.0, std::abs(fd_far)));
      }
    }
  }
}

TEST(CameraState, ValidateRejectsOutOfRangeIntrinsics)
{
  CameraState c;
  EXPECT_NO_THROW(c.validate());
  c.focal_mm = 8.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = CameraState{};
  c.f_number = 40.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = CameraState{};
  c.focus_m = 0.01;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(CameraState, ControlsRoundTrip)
{
  std::mt19937_64 rng(9);
  const CameraState c = random_camera(rng);
  CameraState d;
  d.set_controls(c.controls());
  EXPECT_EQ(d.controls(), c.controls());
}

}  // namespace
}  // namespace cine
