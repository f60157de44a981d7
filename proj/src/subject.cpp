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

#include "cine/subject.hpp"

#include <algorithm>
#include <string>

#include "cine/errors.hpp"

namespace cine
{

std::string_view to_string(TrackingMode mode)
{
  switch (mode) {
    case TrackingMode::kDp:
      return "dp";
    case TrackingMode::kRelaxed:
      return "relaxed";
    case TrackingMode::kAblation:
      return "ablation";
  }
  return "dp";
}

std::optional<TrackingMode> tracking_mode_from_string(std::string_view name)
{
  if (name == "dp") {
    return TrackingMode::kDp;
  }
  if (name == "relaxed") {
    return TrackingMode::kRelaxed;
  }
  if (name == "ablation") {
    return TrackingMode::kAblation;
  }
  return std::nullopt;
}

namespace
{

Eigen::VectorXd box_vector(const BBox & b)
{
  return Eigen::Vector4d(b.left, b.top, b.right, b.bottom);
}

BBox vector_box(const Eigen::Ref<const Eigen::RowVectorXd> & v)
{
  return {v(0), v(1), v(2), v(3)};
}

void require_enough_detections(const MeasurementSequence & seq)
{
  std::vector<int> empty;
  for (const auto & f : seq.frames) {
    if (f.detections.empty()) {
      empty.push_back(f.frame_index);
    }
  }
  const std::size_t present = seq.frames.size() - empty.size();
  if (seq.frames.empty() || 2 * present < seq.frames.size()) {
    std::string msg = "main subject needs detections in at least half of the frames; empty frames:";
    for (const int idx : empty) {
      msg += " " + std::to_string(idx);
    }
    throw NoSubjectError(msg);
  }
}

}  // namespace

SubjectTrack track_main_subject(const MeasurementSequence & seq, const TrackingOptions & options)
{
  require_enough_detections(seq);
  const ImageGeometry & geometry = seq.geometry;
  const auto nframes = static_cast<Eigen::Index>(seq.frames.size());

  AssignmentProblem problem;
  const double diag = geometry.diagonal();
  problem.gamma = options.gamma.value_or(0.05 * diag * 0.05 * diag);
  for (const auto & f : seq.frames) {
    std::vector<Candidate> cands;
    for (const auto & d : f.detections) {
      cands.push_back({box_vector(d.bbox), d.confidence});
    }
    problem.frames.push_back(std::move(cands));
  }

  const Eigen::Vector4d lower = Eigen::Vector4d::Zero();
  const Eigen::Vector4d upper(geometry.width, geometry.height, geometry.width, geometry.height);

  SubjectTrack track;
  track.chosen.assign(seq.frames.size(), std::nullopt);
  Eigen::MatrixXd boxes;

  if (options.mode == TrackingMode::kRelaxed) {
    RelaxedOptions ro;
    ro.continuity = options.continuity;
    ro.temperature = options.temperature;
    ro.clip = options.clip;
    ro.lower = lower;
    ro.upper = upper;
    const RelaxedResult r = solve_relaxed_selection(problem, ro);
    boxes = r.value;
    track.converged = r.converged;
    for (std::size_t f = 0; f < r.alpha.size(); ++f) {
      if (!r.alpha[f].empty()) {
        const auto it = std::max_element(r.alpha[f].begin(), r.alpha[f].end());
        track.chosen[f] = static_cast<int>(it - r.alpha[f].begin());
      }
    }
  } else {
    if (options.mode == TrackingMode::kDp) {
      track.chosen = solve_assignment(problem).choice;
    } else {
      for (std::size_t f = 0; f < problem.frames.size(); ++f) {
        const auto & cands = problem.frames[f];
        for (std::size_t m = 0; m < cands.size(); ++m) {
          if (!track.chosen[f] ||
            cands[m].confidence > cands[static_cast<std::size_t>(*track.chosen[f])].confidence)
          {
            track.chosen[f] = static_cast<int>(m);
          }
        }
      }
    }
    SmoothingProblem sp;
    sp.observations = Eigen::MatrixXd::Zero(nframes, 4);
    sp.weights = Eigen::VectorXd::Zero(nframes);
    sp.continuity = options.continuity;
    sp.lower = lower;
    sp.upper = upper;
    for (Eigen::Index f = 0; f < nframes; ++f) {
      const auto & choice = track.chosen[static_cast<std::size_t>(f)];
      if (!choice) {
        continue;
      }
      const Candidate & c = problem.frames[static_cast<std::size_t>(f)][static_cast<std::size_t>(*choice)];
      sp.observations.row(f) = c.value.transpose();
      sp.weights(f) = c.confidence;
    }
    boxes = solve_smoothing(sp);
  }

  track.boxes.reserve(seq.frames.size());
  track.mask_detection.reserve(seq.frames.size());
  for (Eigen::Index f = 0; f < nframes; ++f) {
    BBox box = vector_box(boxes.row(f));
    box.clamp_to(geometry);
    track.boxes.push_back(box);
    track.mask_detection.push_back(select_subject_mask(seq.frames[static_cast<std::size_t>(f)], box));
  }
  return track;
}

std::optional<int> select_subject_mask(const FrameMeasurements & frame, const BBox & box)
{
  std::optional<int> best;
  std::int64_t best_count = 0;
  for (std::size_t m = 0; m < frame.detections.size(); ++m) {
    const std::int64_t n = mask_pixels_in_bbox(frame.detections[m].mask, box);
    if (n > best_count) {
      best_count = n;
      best = static_cast<int>(m);
    }
  }
  return best;
}

std::optional<int> select_subject_joints(const FrameMeasurements & frame, const RleMask & mask)
{
  std::optional<int> best;
  int best_count = 0;
  for (std::size_t p = 0; p < frame.persons.size(); ++p) {
    const int n = joints_in_mask(frame.persons[p], mask);
    if (n > best_count) {
      best_count = n;
      best = static_cast<int>(p);
    }
  }
  return best;
}

JointTrack smooth_joints(
  const std::vector<std::optional<JointObservation>> & selected, const ImageGeometry & geometry,
  const JointSmoothingOptions & options)
{
  const auto nframes = static_cast<Eigen::Index>(selected.size());
  JointTrack track;
  track.frames.resize(selected.size());
  if (nframes == 0) {
    return track;
  }
  const double w = geometry.width;
  const double h = geometry.height;
  for (int j = 0; j < kJointCount; ++j) {
    SmoothingProblem sp;
    sp.observations = Eigen::MatrixXd::Zero(nframes, 2);
    sp.weights = Eigen::VectorXd::Zero(nframes);
    sp.continuity = options.continuity;
    sp.lower = Eigen::Vector2d(0.0, 0.0);
    sp.upper = Eigen::Vector2d(w, h);
    Eigen::Index first = -1;
    Eigen::Index last = -1;
    Eigen::Index observed = 0;
    for (Eigen::Index f = 0; f < nframes; ++f) {
      const auto & obs = selected[static_cast<std::size_t>(f)];
      if (!obs) {
        continue;
      }
      const JointPoint & p = obs->joints[static_cast<std::size_t>(j)];
      if (!p.visible || p.q <= 0.0) {
        continue;
      }
      sp.observations(f, 0) = p.x;
      sp.observations(f, 1) = p.y;
      sp.weights(f) = p.q;
      first = first < 0 ? f : first;
      last = f;
      ++observed;
    }
    const double missing = 1.0 - static_cast<double>(observed) / static_cast<double>(nframes);
    if (observed == 0 || missing > options.max_missing_fraction) {
      continue;
    }
    track.valid[static_cast<std::size_t>(j)] = true;
    const Eigen::MatrixXd x = solve_smoothing(sp);
    for (Eigen::Index f = first; f <= last; ++f) {
      TrackedJoint & t = track.frames[static_cast<std::size_t>(f)][static_cast<std::size_t>(j)];
      t.x = std::clamp(x(f, 0) / w, 0.0, 1.0);
      t.y = std::clamp(x(f, 1) / h, 0.0, 1.0);
      t.valid = true;
    }
  }
  return track;
}

SubjectExtraction extract_subject(
  const MeasurementSequence & seq, const TrackingOptions & tracking,
  const JointSmoothingOptions & smoothing)
{
  SubjectExtraction out;
  out.track = track_main_subject(seq, tracking);
  std::vector<std::optional<JointObservation>> selected(seq.frames.size());
  out.person.assign(seq.frames.size(), std::nullopt);
  for (std::size_t f = 0; f < seq.frames.size(); ++f) {
    const auto & det = out.track.mask_detection[f];
    if (!det) {
      continue;
    }
    const FrameMeasurements & frame = seq.frames[f];
    out.person[f] = select_subject_joints(frame, frame.detections[static_cast<std::size_t>(*det)].mask);
    if (out.person[f]) {
      selected[f] = frame.persons[static_cast<std::size_t>(*out.person[f])];
    }
  }
  out.joints = smooth_joints(selected, seq.geometry, smoothing);
  return out;
}

}  // namespace cine
