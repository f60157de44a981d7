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

#include "cine/controller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cine/errors.hpp"
#include "cine/solver.hpp"

namespace cine
{

namespace
{

constexpr int kFocal = 5;
constexpr int kFNumber = 6;
constexpr int kFocus = 7;

// Gradient of a DoF quantity laid out as (focal_mm, f_number, focus_m).
ControlVector lens_gradient(const Eigen::Vector3d & d)
{
  ControlVector g = ControlVector::Zero();
  g.segment<3>(kFocal) = d;
  return g;
}

struct Rotations
{
  CameraAxes axes;
  Eigen::Vector3d forward_yaw;
  Eigen::Vector3d forward_pitch;
  Eigen::Vector3d right_yaw;
  Eigen::Vector3d up_yaw;
  Eigen::Vector3d up_pitch;
};

Rotations rotations(double yaw, double pitch)
{
  const double cy = std::cos(yaw);
  const double sy = std::sin(yaw);
  const double cp = std::cos(pitch);
  const double sp = std::sin(pitch);
  Rotations r;
  r.axes = camera_axes(yaw, pitch);
  r.forward_yaw = Eigen::Vector3d(-cp * sy, cp * cy, 0.0);
  r.forward_pitch = Eigen::Vector3d(-sp * cy, -sp * sy, cp);
  r.right_yaw = Eigen::Vector3d(cy, sy, 0.0);
  r.up_yaw = Eigen::Vector3d(sy * sp, -cy * sp, 0.0);
  r.up_pitch = Eigen::Vector3d(-cy * cp, -sy * cp, -sp);
  return r;
}

class Accumulator
{
public:
  explicit Accumulator(CostResiduals & out) : out_(out) {}

  /// Adds weight * r^2.
  void add(double weight, double r, const ControlVector & dr)
  {
    const double s = std::sqrt(weight);
    out_.values.push_back(s * r);
    out_.jacobian.push_back(s * dr);
    sum_ += weight * r * r;
  }

  void add_constant(double c)
  {
    out_.constant += c;
    sum_ += c;
  }

  double take()
  {
    const double s = sum_;
    sum_ = 0.0;
    return s;
  }

private:
  CostResiduals & out_;
  double sum_ = 0.0;
};

void image_residuals(
  const CameraState & cam, const StepTarget & target, const CostWeights & w, Accumulator & acc,
  CostTerms & out)
{
  const Rotations rot = rotations(cam.yaw, cam.pitch);
  const CameraAxes & ax = rot.axes;
  const double fm = cam.focal_mm;
  const double sw = cam.sensor_width_mm;
  const double sh = cam.sensor_height_mm;

  for (const JointGoal & goal : target.joints) {
    const Eigen::Vector3d p = goal.point - cam.position;
    const double z = ax.forward.dot(p);
    // d z / d (position, yaw, pitch)
    ControlVector dz = ControlVector::Zero();
    dz << -ax.forward, rot.forward_yaw.dot(p), rot.forward_pitch.dot(p), 0.0, 0.0, 0.0;

    if (z < w.min_depth_m) {
      out.behind = true;
      acc.add_constant(w.image * w.behind_penalty);
      acc.add(w.image, w.min_depth_m - z, -dz);
      continue;
    }
    const double a = ax.right.dot(p);
    const double b = ax.up.dot(p);
    ControlVector da = ControlVector::Zero();
    da << -ax.right, rot.right_yaw.dot(p), 0.0, 0.0, 0.0, 0.0;
    ControlVector db = ControlVector::Zero();
    db << -ax.up, rot.up_yaw.dot(p), rot.up_pitch.dot(p), 0.0, 0.0, 0.0;

    const double u = 0.5 + fm * a / (z * sw);
    const double v = 0.5 - fm * b / (z * sh);
    ControlVector du = fm / sw * (da * z - a * dz) / (z * z);
    ControlVector dv = -fm / sh * (db * z - b * dz) / (z * z);
    du(kFocal) = a / (z * sw);
    dv(kFocal) = -b / (z * sh);
    acc.add(w.image, u - goal.target.x(), du);
    acc.add(w.image, v - goal.target.y(), dv);
  }
  out.image = acc.take();
}

void dof_residuals(
  const CameraState & cam, const StepTarget & target, const CostWeights & w, Accumulator & acc,
  CostTerms & out)
{
  const Eigen::Vector3d rel = target.subject - cam.position;
  const double dist = rel.norm();
  ControlVector ddist = ControlVector::Zero();
  if (dist > 0.0) {
    ddist.head<3>() = -rel / dist;
  }
  const DofTargets t = dof_targets(target.focus, dist, target.mu);
  out.targets = t;
  const auto [fg, subject, bg] = target.focus;
  // Slope of each target with respect to the subject distance.
  const double near_slope = fg ? 0.0 : (subject || bg) && t.near_m > 0.0 ? 1.0 : 0.0;
  const double far_slope = bg ? 0.0 : (subject || fg) && t.far_m > 0.0 ? 1.0 : 0.0;

  const DepthOfField dof = thin_lens_dof(cam);
  const DofJacobian jac = thin_lens_dof_jacobian(cam.focal_mm, cam.f_number, cam.focus_m, cam.coc_mm);
  const ControlVector g_near = lens_gradient(jac.near);
  const ControlVector g_far = lens_gradient(jac.far);
  const ControlVector g_hyper = lens_gradient(jac.hyperfocal);
  const double wd = w.dof;

  if (std::isinf(t.near_m)) {
    const double h = std::max(0.0, dof.hyperfocal_m - dof.near_m);
    acc.add(wd, h, h > 0.0 ? ControlVector(g_hyper - g_near) : ControlVector::Zero());
    out.surrogate_active = out.surrogate_active || h > 0.0;
  } else if (t.near_m <= 0.0) {
    const double h = std::max(0.0, dof.near_m - w.min_distance_m);
    acc.add(wd, h, h > 0.0 ? g_near : ControlVector::Zero());
    out.surrogate_active = out.surrogate_active || h > 0.0;
  } else {
    acc.add(wd, dof.near_m - t.near_m, g_near - near_slope * ddist);
  }

  if (t.far_m == std::numeric_limits<double>::infinity()) {
    const double h = std::isinf(dof.far_m) ? 0.0 : std::max(0.0, dof.hyperfocal_m - dof.far_m);
    acc.add(wd, h, h > 0.0 ? ControlVector(g_hyper - g_far) : ControlVector::Zero());
    out.surrogate_active = out.surrogate_active || h > 0.0;
  } else {
    // Focus distance at which the far limit reaches the cap.
    const double f = cam.focal_mm * 1e-3;
    const double k = dof.hyperfocal_m - f;
    const double cap = w.max_distance_m;
    const double s_cap = cap * (k + f) / (k + cap);
    double far_value = dof.far_m;
    ControlVector g_value = g_far;
    if (cam.focus_m >= s_cap) {
      far_value = cap;
      g_value.setZero();
      const double ds_dk = cap * (cap - f) / ((k + cap) * (k + cap));
      ControlVector g_over = ControlVector::Zero();
      g_over(kFocus) = 1.0;
      g_over(kFocal) -= ds_dk * (jac.hyperfocal(0) - 1e-3) + cap / (k + cap) * 1e-3;
      g_over(kFNumber) -= ds_dk * jac.hyperfocal(1);
      acc.add(wd * w.cap_weight, cam.focus_m - s_cap, g_over);
      out.surrogate_active = true;
    } else {
      acc.add(0.0, 0.0, ControlVector::Zero());
    }
    if (t.far_m <= 0.0) {
      const double h = std::max(0.0, far_value - w.min_distance_m);
      acc.add(wd, h, h > 0.0 ? g_value : ControlVector::Zero());
      out.surrogate_active = out.surrogate_active || h > 0.0;
    } else {
      acc.add(wd, far_value - t.far_m, g_value - far_slope * ddist);
    }
  }
  out.dof = acc.take();
}

}  // namespace

CostTerms evaluate_cost(
  const CameraState & cam, const StepTarget & target, const CostWeights & weights,
  CostResiduals * residuals)
{
  CostResiduals local;
  CostResiduals & res = residuals != nullptr ? *residuals : local;
  res = {};
  Accumulator acc(res);
  CostTerms out;
  image_residuals(cam, target, weights, acc, out);
  dof_residuals(cam, target, weights, acc, out);
  out.total = out.image + out.dof;
  for (std::size_t i = 0; i < res.values.size(); ++i) {
    out.gradient += 2.0 * res.values[i] * res.jacobian[i];
  }
  return out;
}

void ControllerConfig::validate() const
{
  if (horizon < 1) {
    throw ConfigError("controller horizon must be at least 1");
  }
  if (!(weights.image >= 0.0) || !(weights.dof >= 0.0) || !(weights.cap_weight >= 0.0)) {
    throw ConfigError("controller weights must be non-negative");
  }
  if (!(weights.min_distance_m >= 0.0) || !(weights.max_distance_m > weights.min_distance_m)) {
    throw ConfigError("controller distance limits must satisfy 0 <= min < max");
  }
  if (max_iterations < 1 || !(tolerance > 0.0)) {
    throw ConfigError("controller needs max_iterations >= 1 and tolerance > 0");
  }
  for (int i = 0; i < 8; ++i) {
    if (!(rate_lower(i) <= rate_upper(i))) {
      throw ConfigError("rate bound " + std::to_string(i) + ": lower exceeds upper");
    }
    if (!(state_lower(i) <= state_upper(i))) {
      throw ConfigError("state bound " + std::to_string(i) + ": lower exceeds upper");
    }
  }
}

CameraState apply_action(
  const CameraState & cam, const ControlVector & action, double dt, const ControllerConfig & config)
{
  CameraState next = cam;
  const ControlVector u = action.cwiseMax(config.rate_lower).cwiseMin(config.rate_upper);
  next.set_controls(
    (cam.controls() + dt * u).cwiseMax(config.state_lower).cwiseMin(config.state_upper));
  return next;
}

StepTarget make_step_target(
  const SubjectState & subject, const InstructionFrame & frame, double elapsed, double mu)
{
  StepTarget t;
  const Eigen::Vector3d shift = elapsed * subject.velocity;
  for (const JointTarget & jt : frame.targets) {
    t.joints.push_back(
      {jt.joint, subject.joints[static_cast<std::size_t>(index_of(jt.joint))] + shift,
        Eigen::Vector2d(jt.x, jt.y)});
  }
  t.subject = subject.joints[static_cast<std::size_t>(index_of(Joint::kChest))] + shift;
  t.focus = frame.focus;
  t.mu = mu;
  return t;
}

namespace
{

// Residuals of the whole horizon with their Jacobian w.r.t. the stacked actions.
struct HorizonModel
{
  double cost = 0.0;
  Eigen::VectorXd residuals;
  Eigen::MatrixXd jacobian;
  Eigen::VectorXd gradient;
};

HorizonModel horizon_model(
  const CameraState & cam, const SubjectState & subject, std::span<const InstructionFrame> window,
  double mu, const ControllerConfig & config, std::span<const ControlVector> actions, bool with_jacobian)
{
  if (window.empty()) {
    throw ConfigError("controller needs at least one upcoming instruction");
  }
  const std::size_t n = actions.size();
  std::vector<ControlVector> mask(n);
  std::vector<double> dts(n);
  std::vector<CostResiduals> steps(n);
  CameraState x = cam;
  double elapsed = 0.0;
  HorizonModel model;
  std::size_t rows = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const InstructionFrame & frame = window[std::min(k, window.size() - 1)];
    const double dt = frame.duration;
    dts[k] = dt;
    const ControlVector u = actions[k].cwiseMax(config.rate_lower).cwiseMin(config.rate_upper);
    const ControlVector raw = x.controls() + dt * u;
    const ControlVector next = raw.cwiseMax(config.state_lower).cwiseMin(config.state_upper);
    for (int i = 0; i < 8; ++i) {
      mask[k](i) = next(i) == raw(i) ? 1.0 : 0.0;
    }
    x.set_controls(next);
    elapsed += dt;
    model.cost += evaluate_cost(
      x, make_step_target(subject, frame, elapsed, mu), config.weights, &steps[k]).total;
    rows += steps[k].values.size();
  }
  if (!with_jacobian) {
    return model;
  }
  model.residuals.resize(static_cast<Eigen::Index>(rows));
  model.jacobian = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(8 * n));
  Eigen::Index row = 0;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < steps[k].values.size(); ++i, ++row) {
      model.residuals(row) = steps[k].values[i];
      // d x_k / d u_j = m_k * ... * m_j * dt_j
      ControlVector chain = steps[k].jacobian[i];
      for (std::size_t j = k + 1; j-- > 0; ) {
        chain = chain.cwiseProduct(mask[j]);
        model.jacobian.block<1, 8>(row, static_cast<Eigen::Index>(8 * j)) = dts[j] * chain.transpose();
      }
    }
  }
  model.gradient = 2.0 * model.jacobian.transpose() * model.residuals;
  return model;
}

}  // namespace

double horizon_cost(
  const CameraState & cam, const SubjectState & subject, std::span<const InstructionFrame> window,
  double mu, const ControllerConfig & config, std::span<const ControlVector> actions,
  std::vector<ControlVector> * gradient)
{
  const HorizonModel m = horizon_model(cam, subject, window, mu, config, actions, gradient != nullptr);
  if (gradient != nullptr) {
    gradient->assign(actions.size(), ControlVector::Zero());
    for (std::size_t k = 0; k < actions.size(); ++k) {
      (*gradient)[k] = m.gradient.segment<8>(static_cast<Eigen::Index>(8 * k));
    }
  }
  return m.cost;
}

namespace
{

using Plan = Eigen::VectorXd;

// Actions in rate-normalized units: u = scale .* z.
struct Scaled
{
  const CameraState & cam;
  const SubjectState & subject;
  std::span<const InstructionFrame> window;
  double mu;
  const ControllerConfig & config;
  int horizon;
  ControlVector scale;
  Plan lower;
  Plan upper;

  std::vector<ControlVector> actions(const Plan & z) const
  {
    std::vector<ControlVector> out(static_cast<std::size_t>(horizon));
    for (int k = 0; k < horizon; ++k) {
      out[static_cast<std::size_t>(k)] = z.segment<8>(8 * k).cwiseProduct(scale);
    }
    return out;
  }

  Plan column_scale() const
  {
    Plan s(8 * horizon);
    for (int k = 0; k < horizon; ++k) {
      s.segment<8>(8 * k) = scale;
    }
    return s;
  }

  HorizonModel model(const Plan & z, bool with_jacobian) const
  {
    HorizonModel m = horizon_model(cam, subject, window, mu, config, actions(z), with_jacobian);
    if (with_jacobian) {
      const Plan s = column_scale();
      m.jacobian = m.jacobian * s.asDiagonal();
      m.gradient = m.gradient.cwiseProduct(s);
    }
    return m;
  }

  Plan project(const Plan & z) const {return z.cwiseMax(lower).cwiseMin(upper);}

  double stationarity(const Plan & z, const Plan & g) const {return (project(z - g) - z).norm();}
};

void projected_gradient(const Scaled & problem, Plan & z, ControlPlan & plan)
{
  const ControllerConfig & config = problem.config;
  HorizonModel m = problem.model(z, true);
  double fz = m.cost;
  Plan g = m.gradient;
  Plan z_prev = z;
  double step = 1.0;
  double pg = problem.stationarity(z, g);
  for (int it = 0; it < config.max_iterations && pg > config.tolerance; ++it) {
    plan.iterations = it + 1;
    const double beta = static_cast<double>(it) / (it + 3.0);
    Plan y = problem.project(z + beta * (z - z_prev));
    HorizonModel my = problem.model(y, true);
    if (my.cost > fz) {
      y = z;
      my.cost = fz;
      my.gradient = g;
    }
    Plan z_next;
    double f_next = 0.0;
    for (;;) {
      z_next = problem.project(y - step * my.gradient);
      f_next = problem.model(z_next, false).cost;
      const Plan d = z_next - y;
      if (f_next <= my.cost + my.gradient.dot(d) + d.squaredNorm() / (2.0 * step) || step < 1e-14) {
        break;
      }
      step *= 0.5;
    }
    z_prev = z;
    if (f_next > fz) {
      continue;  // momentum overshoot; restart from z
    }
    z = z_next;
    m = problem.model(z, true);
    fz = m.cost;
    g = m.gradient;
    pg = problem.stationarity(z, g);
    step = std::min(step * 2.0, 1e6);
  }
  plan.cost = fz;
  plan.projected_gradient = pg;
}

void levenberg_marquardt(const Scaled & problem, Plan & z, ControlPlan & plan)
{
  const ControllerConfig & config = problem.config;
  HorizonModel m = problem.model(z, true);
  double damping = 1e-3;
  double pg = problem.stationarity(z, m.gradient);
  for (int it = 0; it < config.max_iterations && pg > config.tolerance; ++it) {
    plan.iterations = it + 1;
    const Eigen::MatrixXd jtj = m.jacobian.transpose() * m.jacobian;
    const double diag = std::max(1e-12, jtj.diagonal().maxCoeff());
    Eigen::MatrixXd q = jtj;
    q.diagonal().array() += damping * diag;
    BoxQpOptions qp;
    qp.max_iterations = 2000;
    qp.tolerance = 1e-10;
    const BoxQpResult step = solve_box_qp(q, m.gradient, problem.lower - z, problem.upper - z, qp);
    const Plan candidate = problem.project(z + step.x);
    const double f_new = problem.model(candidate, false).cost;
    if (f_new < m.cost) {
      z = candidate;
      m = problem.model(z, true);
      pg = problem.stationarity(z, m.gradient);
      damping = std::max(damping / 3.0, 1e-12);
    } else {
      damping *= 4.0;
      if (damping > 1e12) {
        break;
      }
    }
  }
  plan.cost = m.cost;
  plan.projected_gradient = pg;
}

}  // namespace

ControlPlan control_step(
  const CameraState & cam, const SubjectState & subject, std::span<const InstructionFrame> window,
  double mu, const ControllerConfig & config, std::span<const ControlVector> warm_start)
{
  config.validate();
  if (window.empty()) {
    throw ConfigError("controller needs at least one upcoming instruction");
  }
  const int n = config.horizon;
  ControlVector scale;
  for (int i = 0; i < 8; ++i) {
    const double s = std::max(std::abs(config.rate_lower(i)), std::abs(config.rate_upper(i)));
    scale(i) = s > 0.0 ? s : 1.0;
  }
  Scaled problem{cam, subject, window, mu, config, n, scale, Plan(8 * n), Plan(8 * n)};
  for (int k = 0; k < n; ++k) {
    problem.lower.segment<8>(8 * k) = config.rate_lower.cwiseQuotient(scale);
    problem.upper.segment<8>(8 * k) = config.rate_upper.cwiseQuotient(scale);
  }

  Plan z = Plan::Zero(8 * n);
  for (int k = 0; k < n && static_cast<std::size_t>(k) < warm_start.size(); ++k) {
    z.segment<8>(8 * k) = warm_start[static_cast<std::size_t>(k)].cwiseQuotient(scale);
  }
  z = problem.project(z);

  ControlPlan plan;
  if (config.optimizer == Optimizer::kProjectedGradient) {
    projected_gradient(problem, z, plan);
  } else {
    levenberg_marquardt(problem, z, plan);
  }
  plan.converged = plan.projected_gradient <= config.tolerance;
  plan.actions = problem.actions(z);
  return plan;
}

}  // namespace cine
