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

#include "cine/focus.hpp"

#include <algorithm>
#include <cmath>

#include "cine/errors.hpp"
#include "cine/solver.hpp"

namespace cine
{

std::string_view region_name(Region region)
{
  switch (region) {
    case Region::kForeground:
      return "foreground";
    case Region::kSubject:
      return "subject";
    case Region::kBackground:
      return "background";
  }
  return "background";
}

const RleMask & RegionMasks::operator[](Region r) const
{
  switch (r) {
    case Region::kForeground:
      return foreground;
    case Region::kSubject:
      return subject;
    case Region::kBackground:
      break;
  }
  return background;
}

RegionMasks partition_regions(const RleMask & subject)
{
  const ImageGeometry & g = subject.geometry();
  RegionMasks out;
  out.subject = subject;
  const int last = subject.last_row();
  if (last < 0) {
    out.foreground = RleMask::empty(g);
  } else {
    const auto above = static_cast<std::uint32_t>((last + 1) * g.width);
    const auto below = static_cast<std::uint32_t>(g.pixel_count()) - above;
    out.foreground = RleMask(g, {above, below});
  }
  out.background = ~(out.foreground | out.subject);
  return out;
}

double focus_fraction(const RleMask & focus, const RleMask & region)
{
  const std::int64_t n = region.count();
  if (n == 0) {
    return 0.0;
  }
  return static_cast<double>(focus.count_and(region)) / static_cast<double>(n);
}

std::string_view to_string(FocusVariant variant)
{
  return variant == FocusVariant::kLiteral ? "literal" : "anchored";
}

std::optional<FocusVariant> focus_variant_from_string(std::string_view name)
{
  if (name == "anchored") {
    return FocusVariant::kAnchored;
  }
  if (name == "literal") {
    return FocusVariant::kLiteral;
  }
  return std::nullopt;
}

namespace
{

double logistic(double z)
{
  return 1.0 / (1.0 + std::exp(-z));
}

void check(std::span<const double> b, const BinarizeOptions & options)
{
  if (!(options.continuity >= 0.0) || !(options.epsilon > 0.0) || !(options.kappa > 0.0)) {
    throw ConfigError("binarization needs continuity >= 0, epsilon > 0 and kappa > 0");
  }
  for (std::size_t f = 0; f < b.size(); ++f) {
    if (!(b[f] >= 0.0 && b[f] <= 1.0)) {
      throw ValidationError("focus_fraction", static_cast<int>(f) + 1, "must lie in [0, 1]");
    }
  }
}

}  // namespace

std::vector<double> binarize_focus(std::span<const double> b, const BinarizeOptions & options)
{
  check(b, options);
  const auto n = static_cast<Eigen::Index>(b.size());
  if (n == 0) {
    return {};
  }
  const double lambda = options.continuity;
  const double eps = options.epsilon;
  Eigen::VectorXd x;

  if (options.variant == FocusVariant::kLiteral) {
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd g(n);
    for (Eigen::Index f = 0; f < n; ++f) {
      const double a = 1.0 - 2.0 * b[static_cast<std::size_t>(f)];
      q(f, f) = a * a + eps;
      g(f) = -2.0 * eps * b[static_cast<std::size_t>(f)];
      if (f > 0) {
        q(f, f) += lambda;
        q(f - 1, f - 1) += lambda;
        q(f, f - 1) -= lambda;
        q(f - 1, f) -= lambda;
      }
    }
    x = solve_box_qp(q, g, Eigen::VectorXd::Zero(n), Eigen::VectorXd::Ones(n)).x;
  } else {
    SmoothingProblem sp;
    sp.observations.resize(n, 1);
    sp.weights = Eigen::VectorXd::Constant(n, 1.0 + eps);
    sp.continuity = lambda;
    sp.lower = Eigen::VectorXd::Zero(1);
    sp.upper = Eigen::VectorXd::Ones(1);
    for (Eigen::Index f = 0; f < n; ++f) {
      const double bf = b[static_cast<std::size_t>(f)];
      sp.observations(f, 0) = (logistic(options.kappa * (2.0 * bf - 1.0)) + eps * bf) / (1.0 + eps);
    }
    x = solve_smoothing(sp).col(0);
  }

  std::vector<double> out(b.size());
  for (Eigen::Index f = 0; f < n; ++f) {
    out[static_cast<std::size_t>(f)] = std::clamp(x(f), 0.0, 1.0);
  }
  return out;
}

double binarize_objective(
  std::span<const double> b, std::span<const double> smoothed, const BinarizeOptions & options)
{
  if (b.size() != smoothed.size()) {
    throw ConfigError("binarize_objective: length mismatch");
  }
  double total = 0.0;
  for (std::size_t f = 0; f < b.size(); ++f) {
    const double x = smoothed[f];
    if (f > 0) {
      const double d = x - smoothed[f - 1];
      total += options.continuity * d * d;
    }
    double attach = 0.0;
    if (options.variant == FocusVariant::kLiteral) {
      attach = x * (1.0 - 2.0 * b[f]);
    } else {
      attach = x - logistic(options.kappa * (2.0 * b[f] - 1.0));
    }
    total += attach * attach + options.epsilon * (x - b[f]) * (x - b[f]);
  }
  return total;
}

std::vector<bool> threshold_focus(std::span<const double> smoothed, double theta)
{
  std::vector<bool> out(smoothed.size());
  for (std::size_t f = 0; f < smoothed.size(); ++f) {
    out[f] = smoothed[f] >= theta;
  }
  return out;
}

FocusProfile focus_profile(std::vector<RegionTriple> raw, const FocusOptions & options)
{
  FocusProfile p;
  p.raw = std::move(raw);
  const std::size_t n = p.raw.size();
  p.smoothed.resize(n);
  p.focused.resize(n);
  std::vector<double> column(n);
  for (int r = 0; r < kRegionCount; ++r) {
    for (std::size_t f = 0; f < n; ++f) {
      column[f] = p.raw[f][static_cast<std::size_t>(r)];
    }
    const std::vector<double> smoothed = binarize_focus(column, options.binarize);
    const std::vector<bool> on = threshold_focus(smoothed, options.theta);
    for (std::size_t f = 0; f < n; ++f) {
      p.smoothed[f][static_cast<std::size_t>(r)] = smoothed[f];
      p.focused[f][static_cast<std::size_t>(r)] = on[f];
    }
  }
  return p;
}

std::vector<RleMask> subject_masks(const MeasurementSequence & seq, const SubjectTrack & track)
{
  std::vector<RleMask> out;
  out.reserve(seq.frames.size());
  for (std::size_t f = 0; f < seq.frames.size(); ++f) {
    const auto & det = f < track.mask_detection.size() ? track.mask_detection[f] : std::nullopt;
    if (det) {
      out.push_back(seq.frames[f].detections[static_cast<std::size_t>(*det)].mask);
    } else {
      out.push_back(RleMask::empty(seq.geometry));
    }
  }
  return out;
}

std::vector<RegionTriple> region_fractions(
  const MeasurementSequence & seq, std::span<const RegionMasks> regions)
{
  if (regions.size() != seq.frames.size()) {
    throw ConfigError("region masks must cover every frame");
  }
  std::vector<RegionTriple> out(seq.frames.size());
  for (std::size_t f = 0; f < seq.frames.size(); ++f) {
    const RleMask & focus = seq.frames[f].focus.mask;
    for (int r = 0; r < kRegionCount; ++r) {
      out[f][static_cast<std::size_t>(r)] = focus_fraction(focus, regions[f][static_cast<Region>(r)]);
    }
  }
  return out;
}

FocusProfile extract_focus(
  const MeasurementSequence & seq, std::span<const RleMask> subjects, const FocusOptions & options)
{
  std::vector<RegionMasks> regions;
  regions.reserve(subjects.size());
  for (const RleMask & m : subjects) {
    regions.push_back(partition_regions(m));
  }
  return focus_profile(region_fractions(seq, regions), options);
}

}  // namespace cine
