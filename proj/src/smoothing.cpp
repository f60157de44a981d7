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

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "cine/errors.hpp"
#include "cine/solver.hpp"

namespace cine
{

namespace
{

double lower_bound_of(const SmoothingProblem & p, int d)
{
  return p.lower.size() == 0 ? -kInf : p.lower(d);
}

double upper_bound_of(const SmoothingProblem & p, int d)
{
  return p.upper.size() == 0 ? kInf : p.upper(d);
}

// Tridiagonal solve. sub[i] couples row i to i-1, sup[i] couples row i to i+1.
std::vector<double> thomas(
  std::vector<double> sub, std::vector<double> diag, std::vector<double> sup,
  std::vector<double> rhs)
{
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double m = sub[i] / diag[i - 1];
    diag[i] -= m * sup[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0; ) {
    x[i] = (rhs[i] - sup[i] * x[i + 1]) / diag[i];
  }
  return x;
}

struct Chain
{
  std::vector<double> diag;  // w_f + lambda * degree_f
  std::vector<double> rhs;   // w_f * y_f
  double off = 0.0;          // -lambda
};

Chain build_chain(const Eigen::VectorXd & y, const Eigen::VectorXd & w, double lambda)
{
  const auto n = static_cast<std::size_t>(y.size());
  Chain c;
  c.diag.resize(n);
  c.rhs.resize(n);
  c.off = -lambda;
  for (std::size_t i = 0; i < n; ++i) {
    double degree = 0.0;
    if (i > 0) {
      degree += 1.0;
    }
    if (i + 1 < n) {
      degree += 1.0;
    }
    c.diag[i] = w(static_cast<Eigen::Index>(i)) + lambda * degree;
    c.rhs[i] = w(static_cast<Eigen::Index>(i)) * y(static_cast<Eigen::Index>(i));
  }
  return c;
}

// Gradient of the half-objective: H x - b.
std::vector<double> chain_gradient(const Chain & c, const std::vector<double> & x)
{
  const std::size_t n = x.size();
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = c.diag[i] * x[i] - c.rhs[i];
    if (i > 0) {
      v += c.off * x[i - 1];
    }
    if (i + 1 < n) {
      v += c.off * x[i + 1];
    }
    g[i] = v;
  }
  return g;
}

std::vector<double> solve_chain_with_status(
  const Chain & c, const std::vector<int> & status, double lo, double hi)
{
  const std::size_t n = c.diag.size();
  std::vector<double> sub(n, 0.0);
  std::vector<double> diag(n);
  std::vector<double> sup(n, 0.0);
  std::vector<double> rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (status[i] != 0) {
      diag[i] = 1.0;
      rhs[i] = status[i] < 0 ? lo : hi;
      continue;
    }
    diag[i] = c.diag[i];
    rhs[i] = c.rhs[i];
    if (i > 0) {
      sub[i] = c.off;
    }
    if (i + 1 < n) {
      sup[i] = c.off;
    }
  }
  return thomas(std::move(sub), std::move(diag), std::move(sup), std::move(rhs));
}

std::vector<double> solve_chain_dense_fallback(const Chain & c, double lo, double hi)
{
  const auto n = static_cast<Eigen::Index>(c.diag.size());
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd g(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    q(i, i) = c.diag[static_cast<std::size_t>(i)];
    if (i + 1 < n) {
      q(i, i + 1) = c.off;
      q(i + 1, i) = c.off;
    }
    g(i) = -2.0 * c.rhs[static_cast<std::size_t>(i)];
  }
  const BoxQpResult r = solve_box_qp(
    q, g, Eigen::VectorXd::Constant(n, lo), Eigen::VectorXd::Constant(n, hi));
  return {r.x.data(), r.x.data() + n};
}

std::vector<double> solve_chain(const Chain & c, double lo, double hi)
{
  const std::size_t n = c.diag.size();
  std::vector<int> status(n, 0);
  const int max_rounds = 2 * static_cast<int>(n) + 10;
  for (int round = 0; round < max_rounds; ++round) {
    std::vector<double> x = solve_chain_with_status(c, status, lo, hi);
    const std::vector<double> g = chain_gradient(c, x);
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int next = 0;
      if (status[i] == 0) {
        next = x[i] < lo ? -1 : (x[i] > hi ? 1 : 0);
      } else if (status[i] < 0) {
        next = g[i] > 0.0 ? -1 : 0;
      } else {
        next = g[i] < 0.0 ? 1 : 0;
      }
      changed = changed || next != status[i];
      status[i] = next;
    }
    if (!changed) {
      for (double & v : x) {
        v = std::clamp(v, lo, hi);
      }
      return x;
    }
  }
  // The active-set iteration is finite on these M-matrices; cycling would be
  // a rounding artefact, so fall back to the generic engine.
  return solve_chain_dense_fallback(c, lo, hi);
}

}  // namespace

void SmoothingProblem::validate() const
{
  if (frames() < 1) {
    throw ConfigError("smoothing problem needs at least one frame");
  }
  if (dims() < 1) {
    throw ConfigError("smoothing problem needs at least one coordinate");
  }
  if (weights.size() != observations.rows()) {
    throw ConfigError("smoothing weights must have one entry per frame");
  }
  if (!(continuity >= 0.0) || !std::isfinite(continuity)) {
    throw ConfigError("continuity weight must be finite and nonnegative");
  }
  for (Eigen::Index f = 0; f < weights.size(); ++f) {
    if (!(weights(f) >= 0.0) || !std::isfinite(weights(f))) {
      throw ConfigError("smoothing weight of frame " + std::to_string(f) + " is negative or not finite");
    }
  }
  if (!observations.allFinite()) {
    throw ConfigError("smoothing observations must be finite");
  }
  if ((lower.size() != 0 && lower.size() != dims()) || (upper.size() != 0 && upper.size() != dims())) {
    throw ConfigError("smoothing bounds must have one entry per coordinate");
  }
  for (int d = 0; d < dims(); ++d) {
    if (lower_bound_of(*this, d) > upper_bound_of(*this, d)) {
      throw ConfigError("smoothing bounds inverted on coordinate " + std::to_string(d));
    }
  }
}

Eigen::MatrixXd solve_smoothing(const SmoothingProblem & problem)
{
  problem.validate();
  const double total_weight = problem.weights.sum();
  if (total_weight <= 0.0) {
    throw SolverError("degenerate smoothing problem: every frame weight is zero");
  }
  Eigen::MatrixXd out(problem.frames(), problem.dims());
  for (int d = 0; d < problem.dims(); ++d) {
    const double lo = lower_bound_of(problem, d);
    const double hi = upper_bound_of(problem, d);
    if (problem.continuity == 0.0) {
      for (int f = 0; f < problem.frames(); ++f) {
        out(f, d) = std::clamp(problem.observations(f, d), lo, hi);
      }
      continue;
    }
    const Chain chain = build_chain(problem.observations.col(d), problem.weights, problem.continuity);
    const std::vector<double> x = solve_chain(chain, lo, hi);
    for (int f = 0; f < problem.frames(); ++f) {
      out(f, d) = x[static_cast<std::size_t>(f)];
    }
  }
  return out;
}

double smoothing_objective(const SmoothingProblem & problem, const Eigen::MatrixXd & x)
{
  double total = 0.0;
  for (int f = 0; f < problem.frames(); ++f) {
    total += problem.weights(f) * (x.row(f) - problem.observations.row(f)).squaredNorm();
    if (f > 0) {
      total += problem.continuity * (x.row(f) - x.row(f - 1)).squaredNorm();
    }
  }
  return total;
}

double smoothing_kkt_residual(const SmoothingProblem & problem, const Eigen::MatrixXd & x)
{
  double sq = 0.0;
  for (int d = 0; d < problem.dims(); ++d) {
    const Chain chain = build_chain(problem.observations.col(d), problem.weights, problem.continuity);
    std::vector<double> xd(static_cast<std::size_t>(problem.frames()));
    for (int f = 0; f < problem.frames(); ++f) {
      xd[static_cast<std::size_t>(f)] = x(f, d);
    }
    const std::vector<double> g = chain_gradient(chain, xd);
    const double lo = lower_bound_of(problem, d);
    const double hi = upper_bound_of(problem, d);
    for (std::size_t i = 0; i < g.size(); ++i) {
      double r = 2.0 * g[i];
      if (xd[i] <= lo) {
        r = std::min(r, 0.0);
      } else if (xd[i] >= hi) {
        r = std::max(r, 0.0);
      }
      sq += r * r;
    }
  }
  return std::sqrt(sq);
}

}  // namespace cine
