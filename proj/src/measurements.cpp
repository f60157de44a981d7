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

#include "cine/measurements.hpp"

#include <algorithm>
#include <cmath>

namespace cine
{

namespace
{

constexpr std::array<std::string_view, kJointCount> kJointNames = {
  "head", "neck", "chest",
  "left_shoulder", "right_shoulder",
  "left_elbow", "right_elbow",
  "left_wrist", "right_wrist",
  "left_hip", "right_hip",
  "left_knee", "right_knee",
  "left_ankle", "right_ankle",
};

}  // namespace

std::string_view joint_name(Joint joint)
{
  return kJointNames[static_cast<std::size_t>(joint)];
}

std::optional<Joint> joint_from_name(std::string_view name)
{
  for (std::size_t i = 0; i < kJointNames.size(); ++i) {
    if (kJointNames[i] == name) {
      return static_cast<Joint>(i);
    }
  }
  return std::nullopt;
}

std::int64_t mask_pixels_in_bbox(const RleMask & mask, const BBox & box)
{
  return mask.count_in_box(box);
}

std::array<int, 2> joint_pixel(const JointPoint & point, const ImageGeometry & geometry)
{
  const int x = static_cast<int>(std::lround(point.x));
  const int y = static_cast<int>(std::lround(point.y));
  return {std::clamp(x, 0, geometry.width - 1), std::clamp(y, 0, geometry.height - 1)};
}

int joints_in_mask(const JointObservation & obs, const RleMask & mask)
{
  int count = 0;
  for (const JointPoint & p : obs.joints) {
    if (!p.visible) {
      continue;
    }
    const auto [x, y] = joint_pixel(p, mask.geometry());
    if (mask.at(x, y)) {
      ++count;
    }
  }
  return count;
}

}  // namespace cine
