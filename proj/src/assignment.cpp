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
#include <limits>
#include <numeric>
#include <string>

#include "cine/errors.hpp"
#include "cine/solver.hpp"

namespace cine
{

void AssignmentProblem::validate() const
{
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw ConfigError("assignment node weight gamma must be finite and nonnegative");
  }
  Eigen::Index dims = -1;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    for (const Candidate & c : frames[f]) {
      if (dims < 0) {
        dims = c.value.size();
      }
      if (c.value.size() != dims || dims == 0) {
        throw ConfigError("assignment candidates must share one nonzero dimension");
      }
      if (!c.value.allFinite() || !std::isfinite(c.confidence)) {
        throw ConfigError("assignment candidate in frame " + std::to_string(f) + " is not finite");
      }
    }
  }
}

AssignmentResult solve_assignment(const AssignmentProblem & problem)
{
  problem.validate();
  const std::size_t nframes = problem.frames.size();
  AssignmentResult result;
  result.choice.assign(nframes, std::nullopt);

  // back[f][m] is the predecessor index in the previous non-empty frame.
  std::vector<std::vector<int>> back(nframes);
  std::vector<double> cost_prev;
  int prev_frame = -1;
  for (std::size_t f = 0; f < nframes; ++f) {
    const auto & cands = problem.frames[f];
    if (cands.empty()) {
      continue;
    }
    std::vector<double> cost(cands.size());
    back[f].assign(cands.size(), -1);
    for (std::size_t m = 0; m < cands.size(); ++m) {
      const double node = problem.gamma * (1.0 - cands[m].confidence);
      if (prev_frame < 0) {
        cost[m] = node;
        continue;
      }
      const auto & prev = problem.frames[static_cast<std::size_t>(prev_frame)];
      double best = std::numeric_limits<double>::infinity();
      int best_k = 0;
      for (std::size_t k = 0; k < prev.size(); ++k) {
        const double v = cost_prev[k] + (cands[m].value - prev[k].value).squaredNorm();
        if (v < best) {
          best = v;
          best_k = static_cast<int>(k);
        }
      }
      cost[m] = node + best;
      back[f][m] = best_k;
    }
    cost_prev = std::move(cost);
    prev_frame = static_cast<int>(f);
  }
  if (prev_frame < 0) {
    throw NoSubjectError("no candidates in any frame");
  }
  const auto best_it = std::min_element(cost_prev.begin(), cost_prev.end());
  result.objective = *best_it;
  int m = static_cast<int>(best_it - cost_prev.begin());
  for (int f = prev_frame; f >= 0; --f) {
    if (problem.frames[static_cast<std::size_t>(f)].empty()) {
      continue;
    }
    result.choice[static_cast<std::size_t>(f)] = m;
    m = back[static_cast<std::size_t>(f)][static_cast<std::size_t>(m)];
  }
  return result;
}

double assignment_objective(
  const AssignmentProblem & problem, const std::vector<std::optional<int>> & choice)
{
  double total = 0.0;
  const Candidate * prev = nullptr;
  for (std::size_t f = 0; f < problem.frames.size(); ++f) {
    if (!choice[f]) {
      continue;
    }
    const Candidate & c = problem.frames[f][static_cast<std::size_t>(*choice[f])];
    total += problem.gamma * (1.0 - c.confidence);
    if (prev != nullptr) {
      total += (c.value - prev->value).squaredNorm();
    }
    prev = &c;
  }
  return total;
}

std::vector<double> project_capped_simplex(const std::vector<double> & v, double lo, double hi)
{
  const std::size_t n = v.size();
  if (n == 0) {
    return {};
  }
  if (n == 1) {
    return {1.0};
  }
  auto mass = [&](double shift) {
      double s = 0.0;
      for (const double x : v) {
        s += std::clamp(x - shift, lo, hi);
      }
      return s;
    };
  double a = *std::min_element(v.begin(), v.end()) - hi;
  double b = *std::max_element(v.begin(), v.end()) - lo;
  for (int it = 0; it < 200 && b - a > 0.0; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid == a || mid == b) {
      break;
    }
    if (mass(mid) > 1.0) {
      a = mid;
    } else {
      b = mid;
    }
  }
  std::vector<double> out(n);
  const double shift = 0.5 * (a + b);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::clamp(v[i] - shift, lo, hi);
  }
  // Spread the bisection residue over the coordinates that are not pinned.
  const double residue = 1.0 - std::accumulate(out.begin(), out.end(), 0.0);
  std::size_t free = 0;
  for (const double x : out) {
    free += (x > lo && x < hi) ? 1 : 0;
  }
  if (free > 0) {
    for (double & x : out) {
      if (x > lo && x < hi) {
        x += residue / static_cast<double>(free);
      }
    }
  }
  return out;
}

double default_temperature(const AssignmentProblem & problem)
{
  std::vector<double> spacing;
  for (const auto & cands : problem.frames) {
    for (std::size_t a = 0; a < cands.size(); ++a) {
      for (std::size_t b = a + 1; b < cands.size(); ++b) {
        spacing.push_back((cands[a].value - cands[b].value).norm());
      }
    }
  }
  if (spacing.empty()) {
    return 1.0;
  }
  const auto mid = spacing.begin() + static_cast<std::ptrdiff_t>(spacing.size() / 2);
  std::nth_element(spacing.begin(), mid, spacing.end());
  const double median = *mid;
  return median > 0.0 ? 0.1 * median * median : 1.0;
}

double relaxed_objective(
  const AssignmentProblem & problem, const Eigen::MatrixXd & value,
  const std::vector<std::vector<double>> & alpha, double continuity)
{
  double total = 0.0;
  for (std::size_t f = 0; f < problem.frames.size(); ++f) {
    const auto row = static_cast<Eigen::Index>(f);
    if (f > 0) {
      total += continuity * (value.row(row) - value.row(row - 1)).squaredNorm();
    }
    const auto & cands = problem.frames[f];
    for (std::size_t m = 0; m < cands.size(); ++m) {
      total += cands[m].confidence * alpha[f][m] *
        (value.row(row).transpose() - cands[m].value).squaredNorm();
    }
  }
  return total;
}

namespace
{

std::vector<double> capped_vertex(std::size_t n, std::size_t pick, double clip)
{
  if (n == 1) {
    return {1.0};
  }
  std::vector<double> a(n, clip);
  a[pick] = 1.0 - clip * static_cast<double>(n - 1);
  return a;
}

Eigen::MatrixXd value_step(
  const AssignmentProblem & problem, const std::vector<std::vector<double>> & alpha,
  Eigen::Index dims, const RelaxedOptions & options)
{
  const auto nframes = static_cast<Eigen::Index>(problem.frames.size());
  SmoothingProblem sp;
  sp.observations = Eigen::MatrixXd::Zero(nframes, dims);
  sp.weights = Eigen::VectorXd::Zero(nframes);
  sp.continuity = options.continuity;
  sp.lower = options.lower;
  sp.upper = options.upper;
  for (Eigen::Index f = 0; f < nframes; ++f) {
    const auto & cands = problem.frames[static_cast<std::size_t>(f)];
    double w = 0.0;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(dims);
    for (std::size_t m = 0; m < cands.size(); ++m) {
      const double k = cands[m].confidence * alpha[static_cast<std::size_t>(f)][m];
      w += k;
      acc += k * cands[m].value;
    }
    if (w > 0.0) {
      sp.weights(f) = w;
      sp.observations.row(f) = (acc / w).transpose();
    }
  }
  return solve_smoothing(sp);
}

}  // namespace

RelaxedResult solve_relaxed_selection(const AssignmentProblem & problem, const RelaxedOptions & options)
{
  if (!(options.clip > 0.0 && options.clip < 0.5)) {
    throw ConfigError("relaxed selection clip must lie in (0, 0.5)");
  }
  const AssignmentResult start = solve_assignment(problem);
  Eigen::Index dims = 0;
  for (const auto & cands : problem.frames) {
    if (!cands.empty()) {
      dims = cands.front().value.size();
      break;
    }
  }
  const double tau0 = options.temperature.value_or(default_temperature(problem));
  if (!(tau0 > 0.0)) {
    throw ConfigError("relaxed selection temperature must be positive");
  }

  const std::size_t nframes = problem.frames.size();
  std::vector<std::vector<double>> alpha(nframes);
  for (std::size_t f = 0; f < nframes; ++f) {
    const std::size_t n = problem.frames[f].size();
    if (n == 0) {
      continue;
    }
    const double clip = std::min(options.clip, 0.5 / static_cast<double>(n));
    alpha[f] = capped_vertex(n, static_cast<std::size_t>(*start.choice[f]), clip);
  }

  RelaxedResult result;
  Eigen::MatrixXd value = value_step(problem, alpha, dims, options);
  double objective = relaxed_objective(problem, value, alpha, options.continuity);
  result.assignment_objective = objective;
  result.history.push_back(objective);

  int it = 1;
  for (; it <= options.max_iterations; ++it) {
    // The temperature is annealed so the softmin proposal approaches the
    // clipped vertex; proposals that would raise a frame's attachment cost
    // are rejected, which keeps the objective non-increasing.
    const double tau = tau0 * std::pow(0.5, it);
    for (std::size_t f = 0; f < nframes; ++f) {
      const auto & cands = problem.frames[f];
      const std::size_t n = cands.size();
      if (n <= 1) {
        continue;
      }
      const double clip = std::min(options.clip, 0.5 / static_cast<double>(n));
      std::vector<double> cost(n);
      for (std::size_t m = 0; m < n; ++m) {
        cost[m] = cands[m].confidence *
          (value.row(static_cast<Eigen::Index>(f)).transpose() - cands[m].value).squaredNorm();
      }
      const double cmin = *std::min_element(cost.begin(), cost.end());
      std::vector<double> soft(n);
      double z = 0.0;
      for (std::size_t m = 0; m < n; ++m) {
        soft[m] = std::exp(-(cost[m] - cmin) / tau);
        z += soft[m];
      }
      for (double & s : soft) {
        s /= z;
      }
      const std::vector<double> proposal = project_capped_simplex(soft, clip, 1.0 - clip);
      double current = 0.0;
      double proposed = 0.0;
      for (std::size_t m = 0; m < n; ++m) {
        current += alpha[f][m] * cost[m];
        proposed += proposal[m] * cost[m];
      }
      if (proposed <= current) {
        alpha[f] = proposal;
      }
    }
    Eigen::MatrixXd next_value = value_step(problem, alpha, dims, options);
    const double next = relaxed_objective(problem, next_value, alpha, options.continuity);
    const double change = std::abs(objective - next);
    value = std::move(next_value);
    objective = next;
    result.history.push_back(objective);
    const bool annealed = tau <= tau0 * 1e-12;
    if (annealed && change <= options.tolerance * std::max(std::abs(objective), 1e-300)) {
      result.converged = true;
      break;
    }
  }
  result.iterations = std::min(it, options.max_iterations);
  result.value = std::move(value);
  result.alpha = std::move(alpha);
  result.objective = objective;
  return result;
}

}  // namespace cine
