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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>

#include "cine/errors.hpp"
#include "cine/instructions.hpp"
#include "cine/style.hpp"

namespace cine
{
namespace
{

constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct TruthRow
{
  FocusTriple focus;
  double near;
  double far;
};

// d = 10 m, mu = 1 m, written out by hand.
const TruthRow kTruthTable[] = {
  {{false, false, false}, kInfinity, -kInfinity},
  {{false, false, true}, 11.0, kInfinity},
  {{false, true, false}, 9.0, 11.0},
  {{false, true, true}, 9.0, kInfinity},
  {{true, false, false}, 0.0, 9.0},
  {{true, false, true}, 0.0, kInfinity},
  {{true, true, false}, 0.0, 11.0},
  {{true, true, true}, 0.0, kInfinity},
};

TEST(DofTargets, AllEightFocusCombinations)
{
  for (const TruthRow & row : kTruthTable) {
    const DofTargets t = dof_targets(row.focus, 10.0, 1.0);
    EXPECT_EQ(t.near_m, row.near) << row.focus[0] << row.focus[1] << row.focus[2];
    EXPECT_EQ(t.far_m, row.far) << row.focus[0] << row.focus[1] << row.focus[2];
  }
}

TEST(DofTargets, NearTargetNeverNegative)
{
  const DofTargets subject = dof_targets({false, true, false}, 0.4, 1.0);
  EXPECT_EQ(subject.near_m, 0.0);
  EXPECT_EQ(subject.far_m, 1.4);
  const DofTargets fg = dof_targets({true, false, false}, 0.4, 1.0);
  EXPECT_EQ(fg.far_m, 0.0);
}

TEST(DofTargets, FocusedSubjectWindowHasWidthTwoMu)
{
  for (double d = 2.0; d < 50.0; d += 3.7) {
    const DofTargets t = dof_targets({false, true, false}, d, 0.75);
    EXPECT_NEAR(t.far_m - t.near_m, 1.5, 1e-12);
  }
}

RecordingInstructions sample_instructions()
{
  RecordingInstructions ins;
  ins.mu = 1.5;
  for (int f = 0; f < 4; ++f) {
    InstructionFrame frame;
    frame.duration = 0.25 + 0.1 * f;
    frame.focus = {f % 2 == 0, true, f == 3};
    for (const Joint j : ins.controlled) {
      frame.targets.push_back({j, 0.4 + 0.01 * f + 0.001 * index_of(j), 0.3 + 0.02 * f});
    }
    ins.frames.push_back(frame);
  }
  return ins;
}

TEST(Instructions, JsonRoundTripIsExact)
{
  const RecordingInstructions ins = sample_instructions();
  const nlohmann::json doc = instructions_to_json(ins);
  EXPECT_EQ(parse_instructions(doc), ins);
  EXPECT_EQ(parse_instructions_text(doc.dump()), ins);
}

TEST(Instructions, FileRoundTrip)
{
  const RecordingInstructions ins = sample_instructions();
  const auto path = std::filesystem::temp_directory_path() / "cine_instructions_roundtrip.json";
  write_instructions(ins, path);
  EXPECT_EQ(read_instructions(path), ins);
  std::filesystem::remove(path);
}

TEST(Instructions, FocusFlagsAcceptZeroAndOne)
{
  nlohmann::json doc = instructions_to_json(sample_instructions());
  doc["frames"][0]["focus"] = {1, 0, 1};
  const RecordingInstructions ins = parse_instructions(doc);
  EXPECT_EQ(ins.frames[0].focus, (FocusTriple{true, false, true}));
}

TEST(Instructions, ValidationNamesTheField)
{
  RecordingInstructions ins = sample_instructions();
  ins.frames[2].targets[0].x = 1.2;
  try {
    ins.validate();
    FAIL() << "expected ValidationError";
  } catch (const ValidationError & e) {
    EXPECT_EQ(e.frame(), 3);  // frames are 1-based
  }
  ins = sample_instructions();
  ins.mu = 0.0;
  EXPECT_THROW(ins.validate(), ValidationError);
  ins = sample_instructions();
  ins.frames[1].duration = 0.0;
  EXPECT_THROW(ins.validate(), ValidationError);
  ins = sample_instructions();
  ins.frames[1].targets.push_back({Joint::kHead, 0.5, 0.5});
  EXPECT_THROW(ins.validate(), ValidationError);
}

TEST(Instructions, MalformedJsonIsRejected)
{
  EXPECT_THROW(parse_instructions_text("{\"mu_m\": 1, \"frames\": ["), ValidationError);
  nlohmann::json doc = instructions_to_json(sample_instructions());
  doc["frames"][1]["focus"] = {true, false};
  EXPECT_THROW(parse_instructions(doc), ValidationError);
}

TEST(BuildInstructions, CopiesValidTargetsAndFocus)
{
  JointTrack joints;
  joints.frames.resize(3);
  joints.valid[static_cast<std::size_t>(index_of(Joint::kLeftShoulder))] = true;
  for (std::size_t f = 0; f < 3; ++f) {
    auto & t = joints.frames[f][static_cast<std::size_t>(index_of(Joint::kLeftShoulder))];
    t = {0.1 * static_cast<double>(f + 1), 0.5, f != 1};
  }
  FocusProfile focus = focus_profile(std::vector<RegionTriple>(3, RegionTriple{0.0, 1.0, 0.0}));
  const std::vector<double> durations = {0.5, 0.5, 0.25};
  const RecordingInstructions ins = build_instructions(joints, focus, durations);
  ASSERT_EQ(ins.size(), 3u);
  ASSERT_NE(ins.frames[0].find(Joint::kLeftShoulder), nullptr);
  EXPECT_DOUBLE_EQ(ins.frames[0].find(Joint::kLeftShoulder)->x, 0.1);
  EXPECT_EQ(ins.frames[1].find(Joint::kLeftShoulder), nullptr);
  EXPECT_EQ(ins.frames[2].find(Joint::kRightHip), nullptr);
  EXPECT_EQ(ins.frames[2].duration, 0.25);
  EXPECT_EQ(ins.frames[2].focus, (FocusTriple{false, true, false}));
}

TEST(Style, IdenticalInstructionsScoreZero)
{
  const RecordingInstructions ins = sample_instructions();
  const StyleReport r = compare_style(ins, ins);
  EXPECT_EQ(r.mean_j, 0.0);
  EXPECT_EQ(r.max_j, 0.0);
  for (const StyleFrame & f : r.frames) {
    EXPECT_EQ(f.shared_joints, 4);
  }
}

TEST(Style, HandComputedFrame)
{
  RecordingInstructions a = sample_instructions();
  RecordingInstructions b = a;
  b.frames[0].focus = {!a.frames[0].focus[0], a.frames[0].focus[1], !a.frames[0].focus[2]};
  b.frames[0].targets[0].x += 0.03;
  b.frames[0].targets[0].y += 0.04;  // 0.05 away, three other joints exact
  const StyleReport r = compare_style(a, b, StyleWeights{2.0, 10.0});
  EXPECT_EQ(r.frames[0].delta, 2);
  EXPECT_NEAR(r.frames[0].eta, 0.05 / 4.0, 1e-12);
  EXPECT_NEAR(r.frames[0].j, 2.0 * 2 + 10.0 * 0.05 / 4.0, 1e-12);
  EXPECT_NEAR(r.mean_j, r.frames[0].j / 4.0, 1e-12);
}

TEST(Style, SymmetricNonNegativeAndMonotoneInWeights)
{
  RecordingInstructions a = sample_instructions();
  RecordingInstructions b = a;
  for (auto & f : b.frames) {
    f.focus[2] = !f.focus[2];
    f.targets[1].y += 0.1;
  }
  const StyleReport ab = compare_style(a, b);
  const StyleReport ba = compare_style(b, a);
  EXPECT_DOUBLE_EQ(ab.mean_j, ba.mean_j);
  EXPECT_GT(ab.mean_j, 0.0);
  const StyleReport heavier = compare_style(a, b, StyleWeights{2.0, 1.0});
  EXPECT_GT(heavier.mean_j, ab.mean_j);
}

TEST(Style, FrameCountMismatchIsAnError)
{
  RecordingInstructions a = sample_instructions();
  RecordingInstructions b = a;
  b.frames.pop_back();
  EXPECT_THROW(compare_style(a, b), ValidationError);
}

TEST(Style, CsvHasOneRowPerFrame)
{
  const RecordingInstructions a = sample_instructions();
  const std::string csv = style_report_csv(compare_style(a, a));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
}

}  // namespace
}  // namespace cine
