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

#include <random>

#include "cine/controller.hpp"
#include "cine/errors.hpp"
#include "oracles.hpp"

namespace cine
{
namespace
{

double relative_error(const ControlVector & a, const ControlVector & b)
{
  return (a - b).norm() / std::max({a.norm(), b.norm(), 1e-8});
}

TEST(EvaluateCost, GradientMatchesCentralDifferences)
{
  std::mt19937_64 rng(200);
  for (int i = 0; i < 200; ++i) {
    const oracle::ControllerCase c = oracle::random_controller_case(rng);
    const CostTerms terms = evaluate_cost(c.camera, c.target);
    const ControlVector fd = oracle::numeric_cost_gradient(c, {});
    EXPECT_LT(relative_error(terms.gradient, fd), 1e-5) << "case " << i;
  }
}

TEST(EvaluateCost, ResidualsReproduceTotal)
{
  std::mt19937_64 rng(201);
  for (int i = 0; i < 50; ++i) {
    const oracle::ControllerCase c = oracle::random_controller_case(rng);
    CostResiduals r;
    const CostTerms terms = evaluate_cost(c.camera, c.target, {}, &r);
    ASSERT_EQ(r.values.size(), r.jacobian.size());
    double sum = r.constant;
    ControlVector g = ControlVector::Zero();
    for (std::size_t k = 0; k < r.values.size(); ++k) {
      sum += r.values[k] * r.values[k];
      g += 2.0 * r.values[k] * r.jacobian[k];
    }
    EXPECT_NEAR(sum, terms.total, 1e-9 * std::max(1.0, terms.total));
    EXPECT_NEAR(terms.total, terms.image + terms.dof, 1e-9 * std::max(1.0, terms.total));
    EXPECT_LT(relative_error(g, terms.gradient), 1e-12);
  }
}

TEST(EvaluateCost, ZeroWhenJointsAndDepthOfFieldAreOnTarget)
{
  CameraState cam;
  cam.position = Eigen::Vector3d(0.0, 0.0, 1.5);
  cam.focal_mm = 50.0;
  StepTarget t;
  t.subject = Eigen::Vector3d(8.0, 0.5, 1.3);
  t.focus = {false, true, false};
  t.mu = 1.0;
  for (const Eigen::Vector3d & p : {Eigen::Vector3d(8.0, 0.7, 1.45), Eigen::Vector3d(8.0, 0.3, 0.95)}) {
    t.joints.push_back({Joint::kLeftShoulder, p, project(p, cam).normalized});
  }
  const double d = (t.subject - cam.position).norm();
  const oracle::LensSolution lens = oracle::lens_for_limits(cam.focal_mm, cam.coc_mm, d - 1.0, d + 1.0);
  cam.f_number = lens.f_number;
  cam.focus_m = lens.focus_m;
  const CostTerms terms = evaluate_cost(cam, t);
  EXPECT_LT(terms.total, 1e-18);
  EXPECT_LT(terms.gradient.norm(), 1e-8);
  EXPECT_FALSE(terms.surrogate_active);
  EXPECT_FALSE(terms.behind);
}

TEST(EvaluateCost, JointBehindCameraIsPenalized)
{
  CameraState cam;
  StepTarget t;
  t.subject = Eigen::Vector3d(5.0, 0.0, 0.0);
  t.joints.push_back({Joint::kLeftHip, Eigen::Vector3d(-2.0, 0.0, 0.0), Eigen::Vector2d(0.5, 0.5)});
  CostWeights w;
  const CostTerms terms = evaluate_cost(cam, t, w);
  EXPECT_TRUE(terms.behind);
  EXPECT_NEAR(terms.image, w.behind_penalty + (2.0 + w.min_depth_m) * (2.0 + w.min_depth_m), 1e-12);
  EXPECT_GT(terms.gradient(0), 0.0);  // descent moves the camera back along -x
}

TEST(EvaluateCost, SentinelTargetsUseHinges)
{
  CameraState cam;
  cam.focal_mm = 35.0;
  cam.f_number = 8.0;
  StepTarget t;
  t.subject = Eigen::Vector3d(10.0, 0.0, 0.0);
  t.focus = {false, false, true};  // far target is +inf
  const DepthOfField dof = thin_lens_dof(cam);
  cam.focus_m = dof.hyperfocal_m * 1.01;  // far limit already infinite
  const CostTerms at_inf = evaluate_cost(cam, t);
  EXPECT_TRUE(std::isinf(at_inf.targets.far_m));
  const DepthOfField now = thin_lens_dof(cam);
  EXPECT_NEAR(at_inf.dof, (now.near_m - 11.0) * (now.near_m - 11.0), 1e-9);
}

TEST(EvaluateCost, FarCapKeepsCostFinite)
{
  CameraState cam;
  cam.focal_mm = 24.0;
  cam.f_number = 16.0;
  cam.focus_m = 300.0;  // beyond the hyperfocal distance
  StepTarget t;
  t.subject = Eigen::Vector3d(10.0, 0.0, 0.0);
  t.focus = {false, true, false};
  const CostTerms terms = evaluate_cost(cam, t);
  EXPECT_TRUE(std::isfinite(terms.total));
  EXPECT_TRUE(terms.surrogate_active);
  EXPECT_GT(terms.gradient(7), 0.0);
}

TEST(ApplyAction, ClampsRatesAndStates)
{
  ControllerConfig config;
  CameraState cam;
  ControlVector u = ControlVector::Constant(1e3);
  const CameraState next = apply_action(cam, u, 0.5, config);
  const ControlVector step = next.controls() - cam.controls();
  for (int i = 0; i < 8; ++i) {
    EXPECT_LE(step(i), 0.5 * config.rate_upper(i) + 1e-12);
    EXPECT_LE(next.controls()(i), config.state_upper(i));
  }
  CameraState low;
  low.f_number = config.state_lower(6) + 0.1;
  const CameraState clamped = apply_action(low, -ControlVector::Constant(1e3), 1.0, config);
  EXPECT_EQ(clamped.f_number, config.state_lower(6));
}

InstructionFrame centered_frame()
{
  InstructionFrame f;
  f.duration = 0.5;
  f.focus = {false, true, false};
  for (const Joint j : default_controlled_joints()) {
    const bool left = j == Joint::kLeftShoulder || j == Joint::kLeftHip;
    const bool upper = j == Joint::kLeftShoulder || j == Joint::kRightShoulder;
    f.targets.push_back({j, left ? 0.47 : 0.53, upper ? 0.4 : 0.6});
  }
  return f;
}

SubjectState standing_subject()
{
  SubjectState s;
  s.joints.fill(Eigen::Vector3d(10.0, 0.0, 1.3));
  s.joints[static_cast<std::size_t>(index_of(Joint::kLeftShoulder))] = Eigen::Vector3d(10.0, 0.2, 1.45);
  s.joints[static_cast<std::size_t>(index_of(Joint::kRightShoulder))] = Eigen::Vector3d(10.0, -0.2, 1.45);
  s.joints[static_cast<std::size_t>(index_of(Joint::kLeftHip))] = Eigen::Vector3d(10.0, 0.12, 0.95);
  s.joints[static_cast<std::size_t>(index_of(Joint::kRightHip))] = Eigen::Vector3d(10.0, -0.12, 0.95);
  s.velocity = Eigen::Vector3d(0.0, 0.3, 0.0);
  return s;
}

TEST(HorizonCost, GradientMatchesCentralDifferences)
{
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  ControllerConfig config;
  CameraState cam;
  cam.position = Eigen::Vector3d(0.0, 0.5, 1.4);
  cam.focal_mm = 40.0;
  const std::vector<InstructionFrame> window(3, centered_frame());
  std::vector<ControlVector> actions(static_cast<std::size_t>(config.horizon));
  for (auto & a : actions) {
    for (int i = 0; i < 8; ++i) {
      a(i) = u(rng) * config.rate_upper(i);
    }
  }
  std::vector<ControlVector> grad;
  horizon_cost(cam, standing_subject(), window, 1.0, config, actions, &grad);
  for (std::size_t k = 0; k < actions.size(); ++k) {
    ControlVector fd;
    for (int i = 0; i < 8; ++i) {
      const double h = 1e-6 * std::max(1.0, std::abs(actions[k](i)));
      auto plus = actions;
      auto minus = actions;
      plus[k](i) += h;
      minus[k](i) -= h;
      fd(i) = (horizon_cost(cam, standing_subject(), window, 1.0, config, plus, nullptr) -
        horizon_cost(cam, standing_subject(), window, 1.0, config, minus, nullptr)) / (2.0 * h);
    }
    EXPECT_LT(relative_error(grad[k], fd), 1e-5) << "step " << k;
  }
}

class ControlStepTest : public ::testing::TestWithParam<Optimizer> {};

TEST_P(ControlStepTest, ReducesHorizonCostWithinRateBounds)
{
  ControllerConfig config;
  config.optimizer = GetParam();
  CameraState cam;
  cam.position = Eigen::Vector3d(0.0, 1.0, 1.4);
  cam.yaw = 0.15;
  cam.focal_mm = 35.0;
  cam.f_number = 4.0;
  cam.focus_m = 20.0;
  const std::vector<InstructionFrame> window(5, centered_frame());
  const SubjectState subject = standing_subject();
  const std::vector<ControlVector> idle(static_cast<std::size_t>(config.horizon), ControlVector::Zero());
  const double before = horizon_cost(cam, subject, window, 1.0, config, idle, nullptr);
  const ControlPlan plan = control_step(cam, subject, window, 1.0, config, {});
  ASSERT_EQ(plan.actions.size(), static_cast<std::size_t>(config.horizon));
  EXPECT_LT(plan.cost, 0.1 * before);
  EXPECT_NEAR(plan.cost, horizon_cost(cam, subject, window, 1.0, config, plan.actions, nullptr), 1e-9);
  for (const ControlVector & a : plan.actions) {
    for (int i = 0; i < 8; ++i) {
      EXPECT_GE(a(i), config.rate_lower(i) - 1e-12);
      EXPECT_LE(a(i), config.rate_upper(i) + 1e-12);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(
  Optimizers, ControlStepTest,
  ::testing::Values(Optimizer::kLevenbergMarquardt, Optimizer::kProjectedGradient));

TEST(ControlStep, LevenbergMarquardtConverges)
{
  ControllerConfig config;
  CameraState cam;
  cam.position = Eigen::Vector3d(0.0, 1.0, 1.4);
  cam.focal_mm = 35.0;
  const std::vector<InstructionFrame> window(5, centered_frame());
  const ControlPlan plan = control_step(cam, standing_subject(), window, 1.0, config, {});
  EXPECT_TRUE(plan.converged);
  EXPECT_LE(plan.projected_gradient, config.tolerance);
}

TEST(ControlStep, EmptyWindowIsAConfigError)
{
  ControllerConfig config;
  EXPECT_THROW(control_step(CameraState{}, standing_subject(), {}, 1.0, config, {}), ConfigError);
}

TEST(ControllerConfig, RejectsInvertedBounds)
{
  ControllerConfig config;
  config.rate_lower(2) = 5.0;
  EXPECT_THROW(config.validate(), ConfigError);
  config = ControllerConfig{};
  config.horizon = 0;
  EXPECT_THROW(config.validate(), ConfigError);
}

}  // namespace
}  // namespace cine
