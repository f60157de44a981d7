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

#ifndef CINE__FOCUS_HPP_
#define CINE__FOCUS_HPP_

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cine/measurements.hpp"
#include "cine/subject.hpp"

namespace cine
{

enum class Region : int
{
  kForeground = 0,
  kSubject = 1,
  kBackground = 2,
};

inline constexpr int kRegionCount = 3;

std::string_view region_name(Region region);

struct RegionMasks
{
  RleMask foreground;
  RleMask subject;
  RleMask background;

  const RleMask & operator[](Region r) const;
};

/// Subject = the mask, foreground = every row below its lowest row,
/// background = the rest. An empty subject leaves the whole image as background.
RegionMasks partition_regions(const RleMask & subject);

/// Fraction of region pixels that are in focus; 0 for an empty region.
double focus_fraction(const RleMask & focus, const RleMask & region);

enum class FocusVariant
{
  kAnchored,  ///< pulls B toward a logistic sharpening of b
  kLiteral,   ///< B^2 (1 - 2b)^2 attachment, drives B to 0 unless b = 0.5
};

std::string_view to_string(FocusVariant variant);
std::optional<FocusVariant> focus_variant_from_string(std::string_view name);

struct BinarizeOptions
{
  FocusVariant variant = FocusVariant::kAnchored;
  // Above 0.75 a lone glitch inside a long run is pulled back across 0.5.
  double continuity = 2.0;
  double epsilon = 1e-6;
  double kappa = 6.0;
};

std::vector<double> binarize_focus(std::span<const double> b, const BinarizeOptions & options = {});

/// Objective minimized by binarize_focus, constant terms included.
double binarize_objective(
  std::span<const double> b, std::span<const double> smoothed, const BinarizeOptions & options = {});

inline constexpr double kDefaultFocusThreshold = 0.5;

std::vector<bool> threshold_focus(std::span<const double> smoothed, double theta = kDefaultFocusThreshold);

using RegionTriple = std::array<double, kRegionCount>;
using FocusTriple = std::array<bool, kRegionCount>;

struct FocusProfile
{
  std::vector<RegionTriple> raw;       ///< b per frame and region
  std::vector<RegionTriple> smoothed;  ///< B
  std::vector<FocusTriple> focused;

  std::size_t size() const {return raw.size();}
};

struct FocusOptions
{
  BinarizeOptions binarize;
  double theta = kDefaultFocusThreshold;
};

/// Binarizes and thresholds each region's fraction sequence independently.
FocusProfile focus_profile(std::vector<RegionTriple> raw, const FocusOptions & options = {});

/// Per-frame subject masks chosen by the track (empty where none was found).
std::vector<RleMask> subject_masks(const MeasurementSequence & seq, const SubjectTrack & track);

std::vector<RegionTriple> region_fractions(
  const MeasurementSequence & seq, std::span<const RegionMasks> regions);

FocusProfile extract_focus(
  const MeasurementSequence & seq, std::span<const RleMask> subjects, const FocusOptions & options = {});

}  // namespace cine

#endif  // CINE__FOCUS_HPP_
