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

#include <gtest/gtest.h>

#include <numbers>

#include "cine/errors.hpp"
#include "cine/measurement_io.hpp"
#include "cine/pipeline.hpp"
#include "cine/scene.hpp"
#include "scenarios.hpp"

namespace cine
{
namespace
{

SceneSpec static_scene()
{
  SceneSpec s = scenario::walking(1, 0.0);
  s.frame_count = 20;
  s.subject.path.speed = 0.0;
  s.subject.path.heading = -std::numbers::pi / 2;  // facing the camera
  s.noise.shuffle = false;
  s.frame_duration = kDefaultFrameDuration;
  return s;
}

TEST(Synthesize, SameSeedIsBitIdentical)
{
  const SceneSpec spec = scenario::tracking(17);
  const Synthesis a = synthesize(spec);
  const Synthesis b = synthesize(spec);
  EXPECT_EQ(serialize_sequence(a.sequence), serialize_sequence(b.sequence));
  EXPECT_EQ(truth_to_json(a.truth).dump(), truth_to_json(b.truth).dump());
}

TEST(Synthesize, DifferentSeedsDiffer)
{
  EXPECT_NE(
    serialize_sequence(synthesize(scenario::tracking(1)).sequence),
    serialize_sequence(synthesize(scenario::tracking(2)).sequence));
}

TEST(Synthesize, OutputIsStrictSchemaValid)
{
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const Synthesis syn = synthesize(scenario::tracking(seed));
    const ParsedSequence p = parse_sequence_text(serialize_sequence(syn.sequence), ParseOptions{true});
    EXPECT_TRUE(p.warnings.empty());
    EXPECT_EQ(p.sequence.size(), 40u);
  }
}

TEST(Synthesize, ZeroNoiseStaticSceneExtractsTheTruth)
{
  const Synthesis syn = synthesize(static_scene());
  const ExtractionResult r = extract(syn.sequence);
  const double w = syn.sequence.geometry.width;
  const double h = syn.sequence.geometry.height;
  for (std::size_t f = 0; f < syn.truth.frames.size(); ++f) {
    const FrameTruth & t = syn.truth.frames[f];
    EXPECT_EQ(r.subject.track.chosen[f], t.subject_detection);
    EXPECT_EQ(r.subject.track.mask_detection[f], t.subject_detection);
    EXPECT_EQ(r.subject.person[f], t.subject_person);
    for (int j = 0; j < kJointCount; ++j) {
      const auto js = static_cast<std::size_t>(j);
      if (!t.joint_visible[js]) {
        continue;
      }
      const TrackedJoint & tj = r.subject.joints.frames[f][js];
      ASSERT_TRUE(tj.valid) << joint_name(static_cast<Joint>(j));
      EXPECT_NEAR(tj.x, t.joints_px[js].x() / w, 1e-9);
      EXPECT_NEAR(tj.y, t.joints_px[js].y() / h, 1e-9);
    }
    EXPECT_NEAR(r.focus.raw[f][1], t.fractions[1], 1e-12);
    EXPECT_EQ(r.focus.focused[f][1], t.focused[1]);
  }
}

TEST(Synthesize, SubjectFocusModeKeepsSubjectSharp)
{
  const Synthesis syn = synthesize(static_scene());
  for (const FrameTruth & t : syn.truth.frames) {
    EXPECT_GE(t.distance_m, t.dof.near_m);
    EXPECT_LE(t.distance_m, t.dof.far_m);
    EXPECT_TRUE(t.focused[1]);
    EXPECT_GT(t.fractions[1], 0.9);
  }
}

TEST(Synthesize, NearerPersonOccludesFartherOne)
{
  SceneSpec s = static_scene();
  s.frame_count = 1;
  s.subject.path.waypoints = {{0.3, 10.0}};
  const auto alone = synthesize(s).truth.frames[0].mask.count();
  ActorSpec blocker;
  blocker.path.waypoints = {{0.0, 6.0}};
  s.distractors.push_back(blocker);
  const Synthesis syn = synthesize(s);
  EXPECT_LT(syn.truth.frames[0].mask.count(), alone);
  EXPECT_GT(syn.truth.frames[0].mask.count(), 0);
}

TEST(Synthesize, InvisibleSubjectIsAValidationError)
{
  SceneSpec s = static_scene();
  s.subject.path.waypoints = {{0.0, -10.0}};  // behind the camera
  EXPECT_THROW(synthesize(s), ValidationError);
}

TEST(SceneSpec, JsonRoundTrip)
{
  const SceneSpec spec = scenario::transfer_source();
  const nlohmann::json doc = scene_to_json(spec);
  EXPECT_EQ(scene_to_json(parse_scene(doc)), doc);
}

TEST(SceneSpec, UnknownFieldIsRejected)
{
  nlohmann::json doc = scene_to_json(scenario::tracking(1));
  doc["weather"] = "rain";
  EXPECT_THROW(parse_scene(doc), Error);
}

TEST(SceneSpec, ValidateRejectsBadProbabilities)
{
  SceneSpec s = scenario::tracking(1);
  s.noise.dropout = 1.5;
  EXPECT_THROW(s.validate(), ConfigError);
}

TEST(Rollout, FollowsCenteredInstructionsOnAStaticScene)
{
  SceneSpec s = static_scene();
  s.frame_count = 12;
  const ExtractionResult source = extract(synthesize(s).sequence);
  const RolloutResult rr = rollout(source.instructions, s);
  ASSERT_EQ(rr.trajectory.size(), 12u);
  // Same scene, same start: the controller should hold the shot.
  for (std::size_t k = 2; k < rr.trajectory.size(); ++k) {
    for (const JointTarget & t : source.instructions.frames[k].targets) {
      const Eigen::Vector2d p = rr.trajectory[k].joints[static_cast<std::size_t>(index_of(t.joint))];
      EXPECT_NEAR(p.x(), t.x, 0.02);
      EXPECT_NEAR(p.y(), t.y, 0.02);
    }
  }
}

}  // namespace
}  // namespace cine
