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

#ifndef CINE__STYLE_HPP_
#define CINE__STYLE_HPP_

#include <string>
#include <utility>
#include <vector>

#include "cine/instructions.hpp"

namespace cine
{

struct StyleWeights
{
  double delta = 1.0;
  double eta = 1.0;
};

struct StyleFrame
{
  std::size_t source = 0;  ///< frame index in the source sequence
  std::size_t output = 0;
  int delta = 0;           ///< regions whose focus class differs, 0..3
  double eta = 0.0;        ///< mean normalized distance over shared joints
  int shared_joints = 0;
  double j = 0.0;
};

struct StyleReport
{
  StyleWeights weights;
  std::vector<StyleFrame> frames;
  double mean_delta = 0.0;
  double mean_eta = 0.0;
  double mean_j = 0.0;
  double max_j = 0.0;
};

/// Frame-by-frame comparison; frame counts must match.
StyleReport compare_style(
  const RecordingInstructions & source, const RecordingInstructions & output,
  const StyleWeights & weights = {});

/// Compares the frame pairs listed in the alignment.
StyleReport compare_style(
  const RecordingInstructions & source, const RecordingInstructions & output,
  const std::vector<std::pair<std::size_t, std::size_t>> & alignment,
  const StyleWeights & weights = {});

std::string style_report_csv(const StyleReport & report);
std::string style_report_summary(const StyleReport & report);

}  // namespace cine

#endif  // CINE__STYLE_HPP_
