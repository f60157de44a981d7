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

#ifndef CINE__PIPELINE_HPP_
#define CINE__PIPELINE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "cine/controller.hpp"
#include "cine/focus.hpp"
#include "cine/instructions.hpp"
#include "cine/measurement_io.hpp"
#include "cine/scene.hpp"
#include "cine/style.hpp"
#include "cine/subject.hpp"

namespace cine
{

struct PipelineConfig
{
  TrackingOptions tracking;
  JointSmoothingOptions joints;
  FocusOptions focus;
  double mu = kDefaultMarginM;
  std::vector<Joint> controlled = default_controlled_joints();
  StyleWeights style;
  double style_threshold = 0.25;
  ControllerConfig controller;
  ParseOptions parse;
  std::optional<std::uint64_t> seed;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// Overrides the fields present in `doc` (unknown keys are rejected).
void apply_config(const nlohmann::json & doc, PipelineConfig & config);
nlohmann::json config_to_json(const PipelineConfig & config);

struct ExtractionResult
{
  SubjectExtraction subject;
  FocusProfile focus;
  RecordingInstructions instructions;
};

ExtractionResult extract(const MeasurementSequence & seq, const PipelineConfig & config = {});

std::string subject_trace_csv(const MeasurementSequence & seq, const ExtractionResult & result);
std::string focus_trace_csv(const FocusProfile & focus);
std::string trajectory_csv(const std::vector<TrajectoryRow> & rows);

/// Stacked line charts, one panel per numeric column against the first column.
std::string csv_to_svg(const std::string & csv, const std::string & title);

}  // namespace cine

#endif  // CINE__PIPELINE_HPP_
