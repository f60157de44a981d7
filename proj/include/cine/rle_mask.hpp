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

#ifndef CINE__RLE_MASK_HPP_
#define CINE__RLE_MASK_HPP_

#include <cstdint>
#include <span>
#include <vector>

namespace cine
{

struct ImageGeometry
{
  int width = 320;
  int height = 180;

  static constexpr int kMinSide = 16;

  /// Throws ValidationError when either side is below kMinSide.
  void validate() const;
  std::int64_t pixel_count() const {return std::int64_t{width} * height;}
  double diagonal() const;

  friend bool operator==(const ImageGeometry &, const ImageGeometry &) = default;
};

/// Axis-aligned box in pixel coordinates. A pixel (x, y) with integer
/// center belongs to the box when left <= x < right and top <= y < bottom.
struct BBox
{
  double left = 0.0;
  double top = 0.0;
  double right = 0.0;
  double bottom = 0.0;

  double width() const {return right - left;}
  double height() const {return bottom - top;}
  bool valid() const {return left < right && top < bottom;}

  /// Clamps every side to [0, width] x [0, height]. Returns true if anything moved.
  bool clamp_to(const ImageGeometry & geometry);

  friend bool operator==(const BBox &, const BBox &) = default;
};

/// Binary mask stored as alternating run lengths in row-major order.
/// The first run always counts false pixels (it may be zero).
class RleMask
{
public:
  RleMask() = default;

  /// Validates that the runs cover the geometry exactly.
  RleMask(ImageGeometry geometry, std::vector<std::uint32_t> runs);

  static RleMask empty(ImageGeometry geometry);
  static RleMask full(ImageGeometry geometry);
  /// Row-major grid, nonzero = true.
  static RleMask encode(ImageGeometry geometry, std::span<const std::uint8_t> grid);

  std::vector<std::uint8_t> decode() const;

  const ImageGeometry & geometry() const {return geometry_;}
  const std::vector<std::uint32_t> & runs() const {return runs_;}

  std::int64_t count() const;
  bool at(int x, int y) const;

  /// True pixels whose integer centers fall in the half-open box.
  std::int64_t count_in_box(const BBox & box) const;
  /// Pixels true in both masks. Geometries must match.
  std::int64_t count_and(const RleMask & other) const;

  /// Lowest row holding a true pixel, or -1 for an empty mask.
  int last_row() const;

  RleMask operator&(const RleMask & other) const;
  RleMask operator|(const RleMask & other) const;
  RleMask operator~() const;

  friend bool operator==(const RleMask &, const RleMask &) = default;

private:
  ImageGeometry geometry_{};
  std::vector<std::uint32_t> runs_;
};

}  // namespace cine

#endif  // CINE__RLE_MASK_HPP_
