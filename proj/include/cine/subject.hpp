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

#ifndef CINE__SUBJECT_HPP_
#define CINE__SUBJECT_HPP_

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "cine/measurements.hpp"
#include "cine/solver.hpp"

namespace cine
{

enum class TrackingMode
{
  kDp,        ///< Viterbi selection, then confidence-weighted smoothing
  kRelaxed,   ///< alternating minimization of the alpha relaxation
  kAblation,  ///< per-frame most confident detection, no continuity in the selection
};

std::string_view to_string(TrackingMode mode);
std::optional<TrackingMode> tracking_mode_from_string(std::string_view name);

struct TrackingOptions
{
  TrackingMode mode = TrackingMode::kDp;
  double continuity = 1.0;
  /// Node weight of the selection; default (0.05 * image diagonal)^2.
  std::optional<double> gamma;
  /// Relaxed-mode temperature and clip.
  std::optional<double> temperature;
  double clip = 1e-3;
};

struct SubjectTrack
{
  std::vector<BBox> boxes;                  ///< R_f, one per frame
  std::vector<std::optional<int>> chosen;   ///< detection index the selection settled on
  std::vector<std::optional<int>> mask_detection;  ///< detection whose mask is M_f
  bool converged = true;                    ///< relaxed mode only

  std::size_t size() const {return boxes.size();}
};

/// Throws NoSubjectError when fewer than half of the frames carry a detection.
SubjectTrack track_main_subject(const MeasurementSequence & seq, const TrackingOptions & options = {});

/// Detection whose mask has the most pixels inside the box; nullopt when
/// every count is zero. Ties go to the lowest index.
std::optional<int> select_subject_mask(const FrameMeasurements & frame, const BBox & box);

/// Person with the most visible joints on the mask; nullopt when the best
/// count is zero. Ties go to the lowest index.
std::optional<int> select_subject_joints(const FrameMeasurements & frame, const RleMask & mask);

struct TrackedJoint
{
  double x = 0.0;  ///< normalized by image width
  double y = 0.0;  ///< normalized by image height
  bool valid = false;
};

struct JointTrack
{
  std::vector<std::array<TrackedJoint, kJointCount>> frames;
  std::array<bool, kJointCount> valid{};  ///< joint usable anywhere in the track

  std::size_t size() const {return frames.size();}
};

struct JointSmoothingOptions
{
  double continuity = 20.0;
  /// Joints missing in more than this fraction of frames are dropped.
  double max_missing_fraction = 0.6;
};

/// Per-joint temporal smoothing weighted by the joint confidences. Frames
/// without a selected observation contribute weight zero.
JointTrack smooth_joints(
  const std::vector<std::optional<JointObservation>> & selected, const ImageGeometry & geometry,
  const JointSmoothingOptions & options = {});

struct SubjectExtraction
{
  SubjectTrack track;
  std::vector<std::optional<int>> person;  ///< selected joint observation per frame
  JointTrack joints;
};

SubjectExtraction extract_subject(
  const MeasurementSequence & seq, const TrackingOptions & tracking = {},
  const JointSmoothingOptions & smoothing = {});

}  // namespace cine

#endif  // CINE__SUBJECT_HPP_
