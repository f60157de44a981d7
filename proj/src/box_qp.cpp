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
#include <sstream>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "cine/errors.hpp"
#include "cine/solver.hpp"

namespace cine
{

namespace
{

double objective_of(const Eigen::MatrixXd & q, const Eigen::VectorXd & g, const Eigen::VectorXd & x)
{
  return x.dot(q * x) + g.dot(x);
}

Eigen::VectorXd project(const Eigen::VectorXd & x, const Eigen::VectorXd & lo, const Eigen::VectorXd & hi)
{
  return x.cwiseMax(lo).cwiseMin(hi);
}

double projected_gradient_norm(
  const Eigen::VectorXd & x, const Eigen::VectorXd & grad,
  const Eigen::VectorXd & lo, const Eigen::VectorXd & hi)
{
  double sq = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double r = grad(i);
    if (x(i) <= lo(i)) {
      r = std::min(r, 0.0);
    } else if (x(i) >= hi(i)) {
      r = std::max(r, 0.0);
    }
    sq += r * r;
  }
  return std::sqrt(sq);
}

// Newton step restricted to the coordinates that are not held at a bound by
// the gradient. Returns false when the reduced system is singular.
bool subspace_newton(
  const Eigen::MatrixXd & q, const Eigen::VectorXd & g,
  const Eigen::VectorXd & lo, const Eigen::VectorXd & hi, Eigen::VectorXd & x)
{
  const Eigen::VectorXd grad = 2.0 * q * x + g;
  std::vector<Eigen::Index> free;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const bool held_low = x(i) <= lo(i) && grad(i) >= 0.0;
    const bool held_high = x(i) >= hi(i) && grad(i) <= 0.0;
    if (!held_low && !held_high) {
      free.push_back(i);
    }
  }
  if (free.empty()) {
    return true;
  }
  const auto nf = static_cast<Eigen::Index>(free.size());
  Eigen::MatrixXd qff(nf, nf);
  Eigen::VectorXd rhs(nf);
  for (Eigen::Index a = 0; a < nf; ++a) {
    double r = -0.5 * g(free[static_cast<std::size_t>(a)]);
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      if (std::find(free.begin(), free.end(), j) == free.end()) {
        r -= q(free[static_cast<std::size_t>(a)], j) * x(j);
      }
    }
    rhs(a) = r;
    for (Eigen::Index b = 0; b < nf; ++b) {
      qff(a, b) = q(free[static_cast<std::size_t>(a)], free[static_cast<std::size_t>(b)]);
    }
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(qff);
  if (ldlt.info() != Eigen::Success) {
    return false;
  }
  const Eigen::VectorXd sol = ldlt.solve(rhs);
  if (!sol.allFinite()) {
    return false;
  }
  // Backtrack along the Newton direction, projecting onto the box.
  const double f0 = objective_of(q, g, x);
  Eigen::VectorXd dir = Eigen::VectorXd::Zero(x.size());
  for (Eigen::Index a = 0; a < nf; ++a) {
    dir(free[static_cast<std::size_t>(a)]) = sol(a) - x(free[static_cast<std::size_t>(a)]);
  }
  for (double t = 1.0; t > 1e-6; t *= 0.5) {
    const Eigen::VectorXd cand = project(x + t * dir, lo, hi);
    if (objective_of(q, g, cand) <= f0) {
      x = cand;
      return true;
    }
  }
  return true;
}

}  // namespace

BoxQpResult solve_box_qp(
  const Eigen::MatrixXd & q, const Eigen::VectorXd & g,
  const Eigen::VectorXd & lower, const Eigen::VectorXd & upper,
  const BoxQpOptions & options)
{
  const Eigen::Index n = g.size();
  if (q.rows() != n || q.cols() != n || lower.size() != n || upper.size() != n) {
    throw ConfigError("box QP dimensions do not agree");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (lower(i) > upper(i)) {
      throw ConfigError("box QP bounds inverted on coordinate " + std::to_string(i));
    }
  }
  const Eigen::MatrixXd sym = 0.5 * (q + q.transpose());
  const double scale = std::max(1.0, sym.cwiseAbs().maxCoeff());

  // Curvature probe along the eigenvector of the smallest eigenvalue.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  const Eigen::VectorXd probe = eig.eigenvectors().col(0);
  const double curvature = probe.dot(sym * probe);
  if (curvature < -1e-10 * scale) {
    std::ostringstream os;
    os << "quadratic form is not positive semidefinite (curvature " << curvature
       << " along probe direction)";
    throw SolverError(os.str());
  }
  const double lmax = std::max(eig.eigenvalues().maxCoeff(), 1e-300);
  const double step = 1.0 / (2.0 * lmax);

  Eigen::VectorXd start = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::isfinite(lower(i)) && std::isfinite(upper(i))) {
      start(i) = 0.5 * (lower(i) + upper(i));
    }
  }
  Eigen::VectorXd x = project(start, lower, upper);
  Eigen::VectorXd y = x;
  double t = 1.0;
  double fx = objective_of(sym, g, x);
  const double gmax = g.cwiseAbs().maxCoeff();

  BoxQpResult result;
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    // Accelerated projected gradient with restart on objective increase.
    const Eigen::VectorXd grad_y = 2.0 * sym * y + g;
    const Eigen::VectorXd next = project(y - step * grad_y, lower, upper);
    const double fnext = objective_of(sym, g, next);
    if (fnext > fx) {
      y = x;
      t = 1.0;
      continue;
    }
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = next + ((t - 1.0) / tn) * (next - x);
    y = project(y, lower, upper);
    x = next;
    fx = fnext;
    t = tn;

    if (it % 10 == 9) {
      Eigen::VectorXd polished = x;
      if (subspace_newton(sym, g, lower, upper, polished)) {
        const double fp = objective_of(sym, g, polished);
        if (fp <= fx) {
          x = polished;
          fx = fp;
          y = x;
          t = 1.0;
        }
      }
    }
    const double pg = projected_gradient_norm(x, 2.0 * sym * x + g, lower, upper);
    const double tol = options.tolerance * std::max({1.0, gmax, scale * x.cwiseAbs().maxCoeff()});
    if (pg <= tol) {
      result.converged = true;
      break;
    }
  }
  result.x = x;
  result.objective = fx;
  result.iterations = it;
  return result;
}

}  // namespace cine
