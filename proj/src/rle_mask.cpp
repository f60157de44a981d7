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

#include "cine/rle_mask.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cine/errors.hpp"

namespace cine
{

void ImageGeometry::validate() const
{
  if (width < kMinSide) {
    throw ValidationError("width", std::nullopt, "image width must be >= 16, got " + std::to_string(width));
  }
  if (height < kMinSide) {
    throw ValidationError("height", std::nullopt, "image height must be >= 16, got " + std::to_string(height));
  }
}

double ImageGeometry::diagonal() const
{
  return std::hypot(static_cast<double>(width), static_cast<double>(height));
}

bool BBox::clamp_to(const ImageGeometry & geometry)
{
  const BBox before = *this;
  const double w = geometry.width;
  const double h = geometry.height;
  left = std::clamp(left, 0.0, w);
  right = std::clamp(right, 0.0, w);
  top = std::clamp(top, 0.0, h);
  bottom = std::clamp(bottom, 0.0, h);
  return !(before == *this);
}

namespace
{

// Drops empty runs after the first and merges neighbours of equal value so
// that equal masks always share one representation.
std::vector<std::uint32_t> canonical_runs(const std::vector<std::uint32_t> & raw)
{
  std::vector<std::uint32_t> out;
  out.reserve(raw.size());
  bool value = false;
  bool out_value = true;  // value of out.back()
  for (std::size_t i = 0; i < raw.size(); ++i, value = !value) {
    if (raw[i] == 0 && i != 0) {
      continue;
    }
    if (!out.empty() && out_value == value) {
      out.back() += raw[i];
    } else {
      out.push_back(raw[i]);
      out_value = value;
    }
  }
  if (out.empty()) {
    out.push_back(0);
  }
  return out;
}

template<typename Op>
std::vector<std::uint32_t> combine(
  const std::vector<std::uint32_t> & a, const std::vector<std::uint32_t> & b, Op op)
{
  std::vector<std::uint32_t> out;
  std::size_t ia = 0;
  std::size_t ib = 0;
  std::uint32_t left_a = a.empty() ? 0 : a[0];
  std::uint32_t left_b = b.empty() ? 0 : b[0];
  bool va = false;
  bool vb = false;
  bool current = false;
  std::uint32_t current_len = 0;
  auto advance = [](const std::vector<std::uint32_t> & runs, std::size_t & idx, std::uint32_t & left,
      bool & value) {
      while (left == 0 && idx + 1 < runs.size()) {
        ++idx;
        left = runs[idx];
        value = !value;
      }
    };
  advance(a, ia, left_a, va);
  advance(b, ib, left_b, vb);
  while (left_a > 0 && left_b > 0) {
    const std::uint32_t step = std::min(left_a, left_b);
    const bool v = op(va, vb);
    if (v == current) {
      current_len += step;
    } else {
      out.push_back(current_len);
      current = v;
      current_len = step;
    }
    left_a -= step;
    left_b -= step;
    advance(a, ia, left_a, va);
    advance(b, ib, left_b, vb);
  }
  out.push_back(current_len);
  return canonical_runs(out);
}

}  // namespace

RleMask::RleMask(ImageGeometry geometry, std::vector<std::uint32_t> runs)
: geometry_(geometry)
{
  const std::uint64_t total = std::accumulate(runs.begin(), runs.end(), std::uint64_t{0});
  if (static_cast<std::int64_t>(total) != geometry.pixel_count()) {
    throw ValidationError(
            "runs", std::nullopt,
            "run lengths sum to " + std::to_string(total) + " but the image has " +
            std::to_string(geometry.pixel_count()) + " pixels");
  }
  runs_ = canonical_runs(runs);
}

RleMask RleMask::empty(ImageGeometry geometry)
{
  return RleMask(geometry, {static_cast<std::uint32_t>(geometry.pixel_count())});
}

RleMask RleMask::full(ImageGeometry geometry)
{
  return RleMask(geometry, {0u, static_cast<std::uint32_t>(geometry.pixel_count())});
}

RleMask RleMask::encode(ImageGeometry geometry, std::span<const std::uint8_t> grid)
{
  if (static_cast<std::int64_t>(grid.size()) != geometry.pixel_count()) {
    throw ValidationError("grid", std::nullopt, "grid size does not match geometry");
  }
  std::vector<std::uint32_t> runs{0};
  bool value = false;
  for (const std::uint8_t px : grid) {
    const bool v = px != 0;
    if (v != value) {
      runs.push_back(0);
      value = v;
    }
    ++runs.back();
  }
  return RleMask(geometry, std::move(runs));
}

std::vector<std::uint8_t> RleMask::decode() const
{
  std::vector<std::uint8_t> grid(static_cast<std::size_t>(geometry_.pixel_count()), 0);
  std::size_t pos = 0;
  bool value = false;
  for (const std::uint32_t run : runs_) {
    if (value) {
      std::fill_n(grid.begin() + static_cast<std::ptrdiff_t>(pos), run, std::uint8_t{1});
    }
    pos += run;
    value = !value;
  }
  return grid;
}

std::int64_t RleMask::count() const
{
  std::int64_t total = 0;
  for (std::size_t i = 1; i < runs_.size(); i += 2) {
    total += runs_[i];
  }
  return total;
}

bool RleMask::at(int x, int y) const
{
  if (x < 0 || y < 0 || x >= geometry_.width || y >= geometry_.height) {
    return false;
  }
  const std::int64_t target = std::int64_t{y} * geometry_.width + x;
  std::int64_t pos = 0;
  bool value = false;
  for (const std::uint32_t run : runs_) {
    if (target < pos + run) {
      return value;
    }
    pos += run;
    value = !value;
  }
  return false;
}

std::int64_t RleMask::count_in_box(const BBox & box) const
{
  const std::int64_t w = geometry_.width;
  const std::int64_t x0 = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil(box.left)));
  const std::int64_t x1 = std::min<std::int64_t>(w, static_cast<std::int64_t>(std::ceil(box.right)));
  const std::int64_t y0 = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil(box.top)));
  const std::int64_t y1 = std::min<std::int64_t>(
    geometry_.height, static_cast<std::int64_t>(std::ceil(box.bottom)));
  if (x0 >= x1 || y0 >= y1) {
    return 0;
  }
  std::int64_t total = 0;
  std::int64_t pos = 0;
  bool value = false;
  for (const std::uint32_t run : runs_) {
    const std::int64_t begin = pos;
    const std::int64_t end = pos + run;
    pos = end;
    const bool is_true = value;
    value = !value;
    if (!is_true || run == 0) {
      continue;
    }
    const std::int64_t row_first = std::max(begin / w, y0);
    const std::int64_t row_last = std::min((end - 1) / w, y1 - 1);
    for (std::int64_t row = row_first; row <= row_last; ++row) {
      const std::int64_t c0 = std::max(begin - row * w, x0);
      const std::int64_t c1 = std::min(end - row * w, x1);
      if (c1 > c0) {
        total += c1 - c0;
      }
    }
    if (begin / w >= y1) {
      break;
    }
  }
  return total;
}

std::int64_t RleMask::count_and(const RleMask & other) const
{
  if (!(geometry_ == other.geometry_)) {
    throw ValidationError("geometry", std::nullopt, "mask geometries differ");
  }
  return (*this & other).count();
}

int RleMask::last_row() const
{
  std::int64_t pos = 0;
  std::int64_t last_true_end = -1;
  bool value = false;
  for (const std::uint32_t run : runs_) {
    pos += run;
    if (value && run > 0) {
      last_true_end = pos;
    }
    value = !value;
  }
  if (last_true_end < 0) {
    return -1;
  }
  return static_cast<int>((last_true_end - 1) / geometry_.width);
}

RleMask RleMask::operator&(const RleMask & other) const
{
  RleMask out;
  out.geometry_ = geometry_;
  out.runs_ = combine(runs_, other.runs_, [](bool a, bool b) {return a && b;});
  return out;
}

RleMask RleMask::operator|(const RleMask & other) const
{
  RleMask out;
  out.geometry_ = geometry_;
  out.runs_ = combine(runs_, other.runs_, [](bool a, bool b) {return a || b;});
  return out;
}

RleMask RleMask::operator~() const
{
  RleMask out;
  out.geometry_ = geometry_;
  if (runs_.front() == 0) {
    out.runs_.assign(runs_.begin() + 1, runs_.end());
  } else {
    out.runs_.reserve(runs_.size() + 1);
    out.runs_.push_back(0);
    out.runs_.insert(out.runs_.end(), runs_.begin(), runs_.end());
  }
  if (out.runs_.empty()) {
    out.runs_.push_back(0);
  }
  return out;
}

}  // namespace cine
