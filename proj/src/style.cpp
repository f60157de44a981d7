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

#include "cine/style.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cine/errors.hpp"

namespace cine
{

namespace
{

StyleFrame compare_frame(const InstructionFrame & a, const InstructionFrame & b, const StyleWeights & w)
{
  StyleFrame out;
  for (int r = 0; r < kRegionCount; ++r) {
    out.delta += a.focus[static_cast<std::size_t>(r)] != b.focus[static_cast<std::size_t>(r)];
  }
  double sum = 0.0;
  for (const JointTarget & ta : a.targets) {
    const JointTarget * tb = b.find(ta.joint);
    if (tb == nullptr) {
      continue;
    }
    sum += std::hypot(ta.x - tb->x, ta.y - tb->y);
    ++out.shared_joints;
  }
  out.eta = out.shared_joints > 0 ? sum / out.shared_joints : 0.0;
  out.j = w.delta * out.delta + w.eta * out.eta;
  return out;
}

}  // namespace

StyleReport compare_style(
  const RecordingInstructions & source, const RecordingInstructions & output,
  const StyleWeights & weights)
{
  if (source.size() != output.size()) {
    throw ValidationError(
      "frames", std::nullopt,
      "frame counts differ (" + std::to_string(source.size()) + " vs " +
      std::to_string(output.size()) + ") and no alignment was given");
  }
  std::vector<std::pair<std::size_t, std::size_t>> identity(source.size());
  for (std::size_t f = 0; f < identity.size(); ++f) {
    identity[f] = {f, f};
  }
  return compare_style(source, output, identity, weights);
}

StyleReport compare_style(
  const RecordingInstructions & source, const RecordingInstructions & output,
  const std::vector<std::pair<std::size_t, std::size_t>> & alignment,
  const StyleWeights & weights)
{
  if (!(weights.delta >= 0.0) || !(weights.eta >= 0.0)) {
    throw ConfigError("style weights must be non-negative");
  }
  StyleReport report;
  report.weights = weights;
  for (const auto & [s, o] : alignment) {
    if (s >= source.size() || o >= output.size()) {
      throw ValidationError("alignment", std::nullopt, "frame pair out of range");
    }
    StyleFrame fr = compare_frame(source.frames[s], output.frames[o], weights);
    fr.source = s;
    fr.output = o;
    report.frames.push_back(fr);
  }
  if (report.frames.empty()) {
    return report;
  }
  for (const StyleFrame & fr : report.frames) {
    report.mean_delta += fr.delta;
    report.mean_eta += fr.eta;
    report.mean_j += fr.j;
    report.max_j = std::max(report.max_j, fr.j);
  }
  const auto n = static_cast<double>(report.frames.size());
  report.mean_delta /= n;
  report.mean_eta /= n;
  report.mean_j /= n;
  return report;
}

std::string style_report_csv(const StyleReport & report)
{
  std::ostringstream os;
  os.precision(17);
  os << "source_frame,output_frame,delta,eta,shared_joints,j\n";
  for (const StyleFrame & fr : report.frames) {
    os << fr.source + 1 << ',' << fr.output + 1 << ',' << fr.delta << ',' << fr.eta << ','
       << fr.shared_joints << ',' << fr.j << '\n';
  }
  return os.str();
}

std::string style_report_summary(const StyleReport & report)
{
  std::ostringstream os;
  os << "frames compared: " << report.frames.size() << '\n'
     << "weights: delta " << report.weights.delta << ", eta " << report.weights.eta << '\n'
     << "mean delta: " << report.mean_delta << '\n'
     << "mean eta:   " << report.mean_eta << '\n'
     << "mean J:     " << report.mean_j << '\n'
     << "max J:      " << report.max_j << '\n';
  return os.str();
}

}  // namespace cine
