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

#ifndef CINE__SOLVER_HPP_
#define CINE__SOLVER_HPP_

/**
 * @file
 * @brief Deterministic optimizers shared by the extraction stages.
 *
 * Temporal smoothing problems have the form
 * \f[
 *   \min_X \sum_{f=2}^{F} \lambda \|X_f - X_{f-1}\|^2 + \sum_{f=1}^{F} w_f \|X_f - y_f\|^2
 *   \quad \textrm{s.t.} \quad l \le X_f \le u .
 * \f]
 * Coordinates decouple, so each one is a tridiagonal Stieltjes system solved
 * with a primal-dual active set iteration over the Thomas algorithm.
 */

#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace cine
{

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct SmoothingProblem
{
  Eigen::MatrixXd observations;  ///< F x D, row f is y_f
  Eigen::VectorXd weights;       ///< F, nonnegative
  double continuity = 1.0;       ///< lambda
  Eigen::VectorXd lower;         ///< D; empty means unbounded
  Eigen::VectorXd upper;         ///< D; empty means unbounded

  int frames() const {return static_cast<int>(observations.rows());}
  int dims() const {return static_cast<int>(observations.cols());}
  void validate() const;
};

/// Returns the F x D minimizer. Throws SolverError for a singular problem.
Eigen::MatrixXd solve_smoothing(const SmoothingProblem & problem);

/// Objective value of a candidate solution (no bound check).
double smoothing_objective(const SmoothingProblem & problem, const Eigen::MatrixXd & x);

/// Norm of the projected gradient; zero exactly at a KKT point.
double smoothing_kkt_residual(const SmoothingProblem & problem, const Eigen::MatrixXd & x);

struct BoxQpOptions
{
  int max_iterations = 20000;
  double tolerance = 1e-12;  ///< projected-gradient norm, relative to max(1, |g|)
};

struct BoxQpResult
{
  Eigen::VectorXd x;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Minimizes x'Qx + g'x over lower <= x <= upper for symmetric PSD Q.
/// Throws SolverError when a probe direction exposes negative curvature.
BoxQpResult solve_box_qp(
  const Eigen::MatrixXd & q, const Eigen::VectorXd & g,
  const Eigen::VectorXd & lower, const Eigen::VectorXd & upper,
  const BoxQpOptions & options = {});

struct Candidate
{
  Eigen::VectorXd value;
  double confidence = 1.0;
};

struct AssignmentProblem
{
  std::vector<std::vector<Candidate>> frames;
  double gamma = 0.0;  ///< weight of the (1 - confidence) node cost

  void validate() const;
};

struct AssignmentResult
{
  std::vector<std::optional<int>> choice;  ///< per frame; nullopt for empty frames
  double objective = 0.0;
};

/// Exact Viterbi minimizer; ties go to the lowest candidate index.
/// Throws NoSubjectError when every frame is empty.
AssignmentResult solve_assignment(const AssignmentProblem & problem);

/// Objective of an arbitrary choice vector, bridging empty frames.
double assignment_objective(
  const AssignmentProblem & problem, const std::vector<std::optional<int>> & choice);

struct RelaxedOptions
{
  double continuity = 1.0;
  std::optional<double> temperature;  ///< default 0.1 * (median candidate spacing)^2
  double clip = 1e-3;                 ///< alpha kept inside [clip, 1 - clip]
  int max_iterations = 200;
  double tolerance = 1e-8;            ///< relative objective change
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

struct RelaxedResult
{
  Eigen::MatrixXd value;                     ///< F x D
  std::vector<std::vector<double>> alpha;    ///< per frame, per candidate
  double objective = 0.0;
  /// Relaxed objective of the clipped Viterbi assignment (the starting point).
  double assignment_objective = 0.0;
  std::vector<double> history;               ///< objective after every iteration
  int iterations = 0;
  bool converged = false;
};

RelaxedResult solve_relaxed_selection(
  const AssignmentProblem & problem, const RelaxedOptions & options = {});

/// sum_{f>=2} lambda |R_f - R_{f-1}|^2 + sum_{f,m} c alpha |R_f - r_m|^2
double relaxed_objective(
  const AssignmentProblem & problem, const Eigen::MatrixXd & value,
  const std::vector<std::vector<double>> & alpha, double continuity);

/// Euclidean projection onto {sum a = 1, lo <= a_i <= hi}.
std::vector<double> project_capped_simplex(const std::vector<double> & v, double lo, double hi);

/// 0.1 * median(pairwise same-frame candidate distance)^2, or 1 when no pairs exist.
double default_temperature(const AssignmentProblem & problem);

}  // namespace cine

#endif  // CINE__SOLVER_HPP_
