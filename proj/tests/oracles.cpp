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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Geometry>

namespace cine::oracle
{

Eigen::MatrixXd dense_smoothing(const SmoothingProblem & problem)
{
  const int nf = problem.frames();
  const int nd = problem.dims();
  const int n = nf * nd;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  auto idx = [nd](int f, int d) {return f * nd + d;};
  for (int f = 0; f < nf; ++f) {
    for (int d = 0; d < nd; ++d) {
      a(idx(f, d), idx(f, d)) += problem.weights(f);
      b(idx(f, d)) += problem.weights(f) * problem.observations(f, d);
      if (f > 0) {
        // lambda (x_f - x_{f-1})^2 contributes a 2x2 Laplacian block.
        a(idx(f, d), idx(f, d)) += problem.continuity;
        a(idx(f - 1, d), idx(f - 1, d)) += problem.continuity;
        a(idx(f, d), idx(f - 1, d)) -= problem.continuity;
        a(idx(f - 1, d), idx(f, d)) -= problem.continuity;
      }
    }
  }
  const Eigen::VectorXd x = a.fullPivLu().solve(b);
  Eigen::MatrixXd out(nf, nd);
  for (int f = 0; f < nf; ++f) {
    for (int d = 0; d < nd; ++d) {
      out(f, d) = x(idx(f, d));
    }
  }
  return out;
}

Eigen::VectorXd enumerate_box_qp(
  const Eigen::MatrixXd & q, const Eigen::VectorXd & g,
  const Eigen::VectorXd & lower, const Eigen::VectorXd & upper)
{
  const int n = static_cast<int>(g.size());
  int total = 1;
  for (int i = 0; i < n; ++i) {
    total *= 3;
  }
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_x = Eigen::VectorXd::Zero(n);
  std::vector<int> status(static_cast<std::size_t>(n));
  for (int code = 0; code < total; ++code) {
    int c = code;
    bool usable = true;
    std::vector<int> free;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
      status[static_cast<std::size_t>(i)] = c % 3;
      c /= 3;
      if (status[static_cast<std::size_t>(i)] == 0) {
        usable = usable && std::isfinite(lower(i));
        x(i) = lower(i);
      } else if (status[static_cast<std::size_t>(i)] == 2) {
        usable = usable && std::isfinite(upper(i));
        x(i) = upper(i);
      } else {
        free.push_back(i);
      }
    }
    if (!usable) {
      continue;
    }
    if (!free.empty()) {
      const int nf = static_cast<int>(free.size());
      Eigen::MatrixXd qff(nf, nf);
      Eigen::VectorXd rhs(nf);
      for (int a = 0; a < nf; ++a) {
        rhs(a) = -0.5 * g(free[static_cast<std::size_t>(a)]);
        for (int j = 0; j < n; ++j) {
          if (status[static_cast<std::size_t>(j)] != 1) {
            rhs(a) -= q(free[static_cast<std::size_t>(a)], j) * x(j);
          }
        }
        for (int b = 0; b < nf; ++b) {
          qff(a, b) = q(free[static_cast<std::size_t>(a)], free[static_cast<std::size_t>(b)]);
        }
      }
      const Eigen::VectorXd sol = qff.completeOrthogonalDecomposition().solve(rhs);
      if ((qff * sol - rhs).norm() > 1e-9 * (1.0 + rhs.norm())) {
        continue;
      }
      for (int a = 0; a < nf; ++a) {
        x(free[static_cast<std::size_t>(a)]) = sol(a);
      }
    }
    bool feasible = true;
    for (int i = 0; i < n; ++i) {
      feasible = feasible && x(i) >= lower(i) - 1e-12 && x(i) <= upper(i) + 1e-12;
    }
    if (!feasible) {
      continue;
    }
    const double f = x.dot(q * x) + g.dot(x);
    if (f < best) {
      best = f;
      best_x = x;
    }
  }
  return best_x;
}

Eigen::VectorXd interior_point_box_qp(
  const Eigen::MatrixXd & q, const Eigen::VectorXd & g,
  const Eigen::VectorXd & lower, const Eigen::VectorXd & upper)
{
  const Eigen::Index n = g.size();
  Eigen::VectorXd x = 0.5 * (lower + upper);
  auto barrier = [&](const Eigen::VectorXd & z, double t) {
      double v = t * (z.dot(q * z) + g.dot(z));
      for (Eigen::Index i = 0; i < n; ++i) {
        const double a = z(i) - lower(i);
        const double b = upper(i) - z(i);
        if (a <= 0.0 || b <= 0.0) {
          return std::numeric_limits<double>::infinity();
        }
        v -= std::log(a) + std::log(b);
      }
      return v;
    };
  for (double t = 1.0; t < 1e16; t *= 4.0) {
    for (int newton = 0; newton < 100; ++newton) {
      Eigen::VectorXd grad = t * (2.0 * q * x + g);
      Eigen::MatrixXd hess = 2.0 * t * q;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double a = x(i) - lower(i);
        const double b = upper(i) - x(i);
        grad(i) += -1.0 / a + 1.0 / b;
        hess(i, i) += 1.0 / (a * a) + 1.0 / (b * b);
      }
      const Eigen::VectorXd dx = -hess.ldlt().solve(grad);
      const double decrement = -grad.dot(dx);
      if (decrement < 1e-14) {
        break;
      }
      double step = 1.0;
      const double f0 = barrier(x, t);
      while (barrier(x + step * dx, t) > f0 - 0.25 * step * decrement && step > 1e-12) {
        step *= 0.5;
      }
      x += step * dx;
    }
  }
  return x;
}

BruteAssignment enumerate_assignment(const AssignmentProblem & problem)
{
  const std::size_t nf = problem.frames.size();
  std::vector<int> counter(nf, 0);
  BruteAssignment best;
  best.objective = std::numeric_limits<double>::infinity();
  while (true) {
    double total = 0.0;
    const Candidate * prev = nullptr;
    for (std::size_t f = 0; f < nf; ++f) {
      if (problem.frames[f].empty()) {
        continue;
      }
      const Candidate & c = problem.frames[f][static_cast<std::size_t>(counter[f])];
      total += problem.gamma * (1.0 - c.confidence);
      if (prev != nullptr) {
        const Eigen::VectorXd diff = c.value - prev->value;
        total += diff.dot(diff);
      }
      prev = &c;
    }
    if (total < best.objective) {
      best.objective = total;
      best.choice.assign(nf, std::nullopt);
      for (std::size_t f = 0; f < nf; ++f) {
        if (!problem.frames[f].empty()) {
          best.choice[f] = counter[f];
        }
      }
    }
    // Odometer increment.
    std::size_t f = 0;
    for (; f < nf; ++f) {
      const int m = static_cast<int>(problem.frames[f].size());
      if (m == 0) {
        continue;
      }
      if (++counter[f] < m) {
        break;
      }
      counter[f] = 0;
    }
    if (f == nf) {
      break;
    }
  }
  return best;
}

namespace
{

Eigen::MatrixXd dense_value_step(
  const AssignmentProblem & problem, const std::vector<std::vector<double>> & alpha)
{
  const int nf = static_cast<int>(problem.frames.size());
  int nd = 0;
  for (const auto & c : problem.frames) {
    if (!c.empty()) {
      nd = static_cast<int>(c.front().value.size());
    }
  }
  const int n = nf * nd;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  for (int f = 0; f < nf; ++f) {
    for (std::size_t m = 0; m < problem.frames[static_cast<std::size_t>(f)].size(); ++m) {
      const Candidate & c = problem.frames[static_cast<std::size_t>(f)][m];
      const double k = c.confidence * alpha[static_cast<std::size_t>(f)][m];
      for (int d = 0; d < nd; ++d) {
        a(f * nd + d, f * nd + d) += k;
        b(f * nd + d) += k * c.value(d);
      }
    }
    if (f > 0) {
      for (int d = 0; d < nd; ++d) {
        a(f * nd + d, f * nd + d) += 1.0;
        a((f - 1) * nd + d, (f - 1) * nd + d) += 1.0;
        a(f * nd + d, (f - 1) * nd + d) -= 1.0;
        a((f - 1) * nd + d, f * nd + d) -= 1.0;
      }
    }
  }
  const Eigen::VectorXd x = a.fullPivLu().solve(b);
  Eigen::MatrixXd out(nf, nd);
  for (int f = 0; f < nf; ++f) {
    for (int d = 0; d < nd; ++d) {
      out(f, d) = x(f * nd + d);
    }
  }
  return out;
}

double objective_of(
  const AssignmentProblem & problem, const Eigen::MatrixXd & r,
  const std::vector<std::vector<double>> & alpha)
{
  double total = 0.0;
  for (std::size_t f = 0; f < problem.frames.size(); ++f) {
    const auto row = static_cast<Eigen::Index>(f);
    if (f > 0) {
      total += (r.row(row) - r.row(row - 1)).squaredNorm();
    }
    for (std::size_t m = 0; m < problem.frames[f].size(); ++m) {
      const Candidate & c = problem.frames[f][m];
      total += c.confidence * alpha[f][m] * (r.row(row).transpose() - c.value).squaredNorm();
    }
  }
  return total;
}

}  // namespace

double grid_search_relaxation(
  const AssignmentProblem & problem, const std::vector<std::vector<double>> & alpha0,
  double clip, double step, int rounds)
{
  std::vector<std::vector<double>> alpha = alpha0;
  Eigen::MatrixXd r = dense_value_step(problem, alpha);
  double value = objective_of(problem, r, alpha);
  const int ticks = static_cast<int>(std::lround((1.0 - 2.0 * clip) / step));
  for (int round = 0; round < rounds; ++round) {
    for (std::size_t f = 0; f < problem.frames.size(); ++f) {
      const auto & cands = problem.frames[f];
      const std::size_t m = cands.size();
      if (m < 2) {
        continue;
      }
      std::vector<double> e(m);
      for (std::size_t k = 0; k < m; ++k) {
        e[k] = cands[k].confidence *
          (r.row(static_cast<Eigen::Index>(f)).transpose() - cands[k].value).squaredNorm();
      }
      double best = std::numeric_limits<double>::infinity();
      std::vector<double> best_a;
      for (int i = 0; i <= ticks; ++i) {
        const double a0 = clip + i * step;
        if (m == 2) {
          const double a1 = 1.0 - a0;
          if (a1 < clip - 1e-12) {
            continue;
          }
          const double v = a0 * e[0] + a1 * e[1];
          if (v < best) {
            best = v;
            best_a = {a0, a1};
          }
          continue;
        }
        for (int j = 0; j <= ticks; ++j) {
          const double a1 = clip + j * step;
          const double a2 = 1.0 - a0 - a1;
          if (a2 < clip - 1e-12) {
            break;
          }
          const double v = a0 * e[0] + a1 * e[1] + a2 * e[2];
          if (v < best) {
            best = v;
            best_a = {a0, a1, a2};
          }
        }
      }
      alpha[f] = best_a;
    }
    r = dense_value_step(problem, alpha);
    const double next = objective_of(problem, r, alpha);
    if (std::abs(next - value) <= 1e-14 * std::abs(value)) {
      value = next;
      break;
    }
    value = next;
  }
  return value;
}

Eigen::MatrixXd random_psd(std::mt19937_64 & rng, int n, int rank)
{
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::MatrixXd a(n, rank);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < rank; ++j) {
      a(i, j) = nd(rng);
    }
  }
  return a * a.transpose() / rank;
}

SmoothingProblem random_smoothing(std::mt19937_64 & rng, int nf, int nd, bool bounded)
{
  std::uniform_real_distribution<double> val(-10.0, 10.0);
  std::uniform_real_distribution<double> wt(0.0, 2.0);
  std::bernoulli_distribution zero(0.2);
  SmoothingProblem p;
  p.observations.resize(nf, nd);
  p.weights.resize(nf);
  for (int f = 0; f < nf; ++f) {
    for (int d = 0; d < nd; ++d) {
      p.observations(f, d) = val(rng);
    }
    p.weights(f) = zero(rng) ? 0.0 : wt(rng);
  }
  p.weights(0) = std::max(p.weights(0), 0.1);
  p.continuity = std::uniform_real_distribution<double>(0.1, 5.0)(rng);
  if (bounded) {
    p.lower = Eigen::VectorXd::Constant(nd, -3.0);
    p.upper = Eigen::VectorXd::Constant(nd, 4.0);
  }
  return p;
}

AssignmentProblem random_assignment(std::mt19937_64 & rng, int nf, int max_m, int dims, double gamma)
{
  std::uniform_int_distribution<int> count(0, max_m);
  std::uniform_real_distribution<double> pos(0.0, 10.0);
  std::uniform_real_distribution<double> conf(0.05, 1.0);
  AssignmentProblem p;
  p.gamma = gamma;
  p.frames.resize(static_cast<std::size_t>(nf));
  for (auto & frame : p.frames) {
    const int m = count(rng);
    for (int k = 0; k < m; ++k) {
      Candidate c;
      c.value.resize(dims);
      for (int d = 0; d < dims; ++d) {
        c.value(d) = pos(rng);
      }
      c.confidence = conf(rng);
      frame.push_back(c);
    }
  }
  if (p.frames.front().empty()) {
    p.frames.front().push_back({Eigen::VectorXd::Constant(dims, 5.0), 0.5});
  }
  return p;
}

double ray_trace_blur_mm(double focal_mm, double f_number, double focus_m, double object_m)
{
  const double f = focal_mm;
  const double s = focus_m * 1e3;
  const double d = object_m * 1e3;
  const double sensor = 1.0 / (1.0 / f - 1.0 / s);
  const double h = 0.5 * f / f_number;
  // Ray from the axial object point to the aperture rim, bent by -h/f.
  const double slope = h / d - h / f;
  return 2.0 * std::abs(h + slope * sensor);
}

Eigen::Vector2d homogeneous_projection(const Eigen::Vector3d & point, const CameraState & cam)
{
  // Camera body frame at rest: optical axis +x, image right -y, image up +z.
  Eigen::Matrix3d rest;
  rest.col(0) = Eigen::Vector3d(0.0, -1.0, 0.0);
  rest.col(1) = Eigen::Vector3d(0.0, 0.0, -1.0);
  rest.col(2) = Eigen::Vector3d(1.0, 0.0, 0.0);
  const Eigen::Matrix3d world_from_cam =
    (Eigen::AngleAxisd(cam.yaw, Eigen::Vector3d::UnitZ()) *
    Eigen::AngleAxisd(-cam.pitch, Eigen::Vector3d::UnitY())).toRotationMatrix() * rest;
  const Eigen::Matrix3d r = world_from_cam.transpose();
  Eigen::Matrix<double, 3, 4> rt;
  rt.leftCols<3>() = r;
  rt.col(3) = -r * cam.position;
  Eigen::Matrix3d k = Eigen::Matrix3d::Zero();
  k(0, 0) = cam.focal_mm / cam.sensor_width_mm;
  k(1, 1) = cam.focal_mm / cam.sensor_height_mm;
  k(0, 2) = 0.5;
  k(1, 2) = 0.5;
  k(2, 2) = 1.0;
  const Eigen::Vector3d x = k * rt * point.homogeneous();
  return x.hnormalized();
}

std::optional<std::vector<double>> dense_binarize(
  const std::vector<double> & b, const BinarizeOptions & options)
{
  const int n = static_cast<int>(b.size());
  const double eps = options.epsilon;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (int f = 0; f < n; ++f) {
    const double bf = b[static_cast<std::size_t>(f)];
    if (options.variant == FocusVariant::kLiteral) {
      a(f, f) += (1.0 - 2.0 * bf) * (1.0 - 2.0 * bf);
    } else {
      a(f, f) += 1.0;
      rhs(f) += 1.0 / (1.0 + std::exp(-options.kappa * (2.0 * bf - 1.0)));
    }
    a(f, f) += eps;
    rhs(f) += eps * bf;
    if (f > 0) {
      a(f, f) += options.continuity;
      a(f - 1, f - 1) += options.continuity;
      a(f, f - 1) -= options.continuity;
      a(f - 1, f) -= options.continuity;
    }
  }
  const Eigen::VectorXd x = a.ldlt().solve(rhs);
  if (x.minCoeff() < 0.0 || x.maxCoeff() > 1.0) {
    return std::nullopt;
  }
  return std::vector<double>(x.data(), x.data() + n);
}

LensSolution lens_for_limits(double focal_mm, double coc_mm, double near_m, double far_m)
{
  // 1/near + 1/far = 2/s, and near (K + s - f) = s K.
  const double f = focal_mm * 1e-3;
  LensSolution out;
  out.focus_m = 2.0 * near_m * far_m / (near_m + far_m);
  const double k = near_m * (out.focus_m - f) / (out.focus_m - near_m);
  out.f_number = f * f / (k * coc_mm * 1e-3);
  return out;
}

ControllerCase random_controller_case(std::mt19937_64 & rng)
{
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> jitter(-0.3, 0.3);
  ControllerCase c;
  const double dist = 3.0 + 27.0 * unit(rng);
  const double bearing = 6.0 * unit(rng) - 3.0;
  const Eigen::Vector3d chest(
    5.0 * unit(rng), 5.0 * unit(rng), 1.3);
  CameraState & cam = c.camera;
  cam.position = chest - dist * Eigen::Vector3d(std::cos(bearing), std::sin(bearing), 0.0);
  cam.position.z() = 0.5 + 2.5 * unit(rng);
  const Eigen::Vector3d look = chest - cam.position;
  cam.yaw = std::atan2(look.y(), look.x()) + 0.1 * jitter(rng);
  cam.pitch = std::atan2(look.z(), look.head<2>().norm()) + 0.1 * jitter(rng);
  cam.focal_mm = 12.0 + 150.0 * unit(rng);
  cam.f_number = 1.2 + 20.0 * unit(rng);
  cam.focus_m = 0.5 + 60.0 * unit(rng);

  StepTarget & t = c.target;
  t.subject = chest;
  t.mu = 0.5 + 1.5 * unit(rng);
  for (int r = 0; r < 3; ++r) {
    t.focus[static_cast<std::size_t>(r)] = unit(rng) < 0.5;
  }
  const Joint joints[] = {Joint::kLeftShoulder, Joint::kRightShoulder, Joint::kLeftHip, Joint::kRightHip};
  const Eigen::Vector3d offsets[] = {{0.0, 0.2, 0.15}, {0.0, -0.2, 0.15}, {0.0, 0.12, -0.35}, {0.0, -0.12, -0.35}};
  for (int i = 0; i < 4; ++i) {
    JointGoal g;
    g.joint = joints[i];
    g.point = chest + offsets[i] + 0.05 * Eigen::Vector3d(jitter(rng), jitter(rng), jitter(rng));
    g.target = Eigen::Vector2d(0.5 + jitter(rng), 0.5 + jitter(rng));
    t.joints.push_back(g);
  }
  return c;
}

ControlVector numeric_cost_gradient(const ControllerCase & c, const CostWeights & weights)
{
  const ControlVector x = c.camera.controls();
  ControlVector g;
  for (int i = 0; i < 8; ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(x(i)));
    CameraState plus = c.camera;
    CameraState minus = c.camera;
    ControlVector xp = x;
    ControlVector xm = x;
    xp(i) += h;
    xm(i) -= h;
    plus.set_controls(xp);
    minus.set_controls(xm);
    g(i) = (evaluate_cost(plus, c.target, weights).total -
      evaluate_cost(minus, c.target, weights).total) / (2.0 * h);
  }
  return g;
}

}  // namespace cine::oracle
