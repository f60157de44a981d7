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

#ifndef CINE__MEASUREMENTS_HPP_
#define CINE__MEASUREMENTS_HPP_

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "cine/rle_mask.hpp"

namespace cine
{

/// Fixed body-joint schema. The order is the serialization order.
enum class Joint : int
{
  kHead = 0,
  kNeck,
  kChest,
  kLeftShoulder,
  kRightShoulder,
  kLeftElbow,
  kRightElbow,
  kLeftWrist,
  kRightWrist,
  kLeftHip,
  kRightHip,
  kLeftKnee,
  kRightKnee,
  kLeftAnkle,
  kRightAnkle,
};

inline constexpr int kJointCount = 15;

std::string_view joint_name(Joint joint);
std::optional<Joint> joint_from_name(std::string_view name);
constexpr int index_of(Joint joint) {return static_cast<int>(joint);}

struct JointPoint
{
  double x = 0.0;
  double y = 0.0;
  double q = 0.0;
  bool visible = false;

  friend bool operator==(const JointPoint &, const JointPoint &) = default;
};

struct JointObservation
{
  std::array<JointPoint, kJointCount> joints{};

  const JointPoint & operator[](Joint j) const {return joints[static_cast<std::size_t>(j)];}
  JointPoint & operator[](Joint j) {return joints[static_cast<std::size_t>(j)];}

  friend bool operator==(const JointObservation &, const JointObservation &) = default;
};

struct PersonDetection
{
  BBox bbox;
  RleMask mask;
  double confidence = 0.0;

  friend bool operator==(const PersonDetection &, const PersonDetection &) = default;
};

struct FocusMap
{
  RleMask mask;  ///< true = pixel in focus

  friend bool operator==(const FocusMap &, const FocusMap &) = default;
};

struct FrameMeasurements
{
  int frame_index = 1;
  double duration = 0.5;
  ImageGeometry geometry;
  std::vector<PersonDetection> detections;
  std::vector<JointObservation> persons;
  FocusMap focus;
  /// Set when a box or visible joint had to be clamped into the image.
  bool clamped = false;

  friend bool operator==(const FrameMeasurements &, const FrameMeasurements &) = default;
};

struct MeasurementSequence
{
  ImageGeometry geometry;
  std::vector<FrameMeasurements> frames;

  std::size_t size() const {return frames.size();}
  friend bool operator==(const MeasurementSequence &, const MeasurementSequence &) = default;
};

inline constexpr double kDefaultFrameDuration = 0.5;

/// Number of true mask pixels inside the half-open box.
std::int64_t mask_pixels_in_bbox(const RleMask & mask, const BBox & box);

/// Pixel a joint position falls on: rounded, then clamped into the image.
std::array<int, 2> joint_pixel(const JointPoint & point, const ImageGeometry & geometry);

/// Visible joints whose rounded pixel lies on a true mask pixel.
int joints_in_mask(const JointObservation & obs, const RleMask & mask);

}  // namespace cine

#endif  // CINE__MEASUREMENTS_HPP_
