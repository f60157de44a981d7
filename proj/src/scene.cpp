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

#include "cine/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>

#include "cine/errors.hpp"

namespace cine
{

namespace
{

constexpr double kInfinity = std::numeric_limits<double>::infinity();

Eigen::Vector3d v3(double x, double y, double z) {return {x, y, z};}

struct Bone
{
  Joint a;
  Joint b;
  double radius;
};

constexpr std::array<Bone, 17> kBones{{
  {Joint::kHead, Joint::kNeck, 0.10},
  {Joint::kNeck, Joint::kChest, 0.09},
  {Joint::kChest, Joint::kLeftHip, 0.13},
  {Joint::kChest, Joint::kRightHip, 0.13},
  {Joint::kLeftShoulder, Joint::kRightShoulder, 0.07},
  {Joint::kNeck, Joint::kLeftShoulder, 0.06},
  {Joint::kNeck, Joint::kRightShoulder, 0.06},
  {Joint::kLeftShoulder, Joint::kLeftElbow, 0.055},
  {Joint::kRightShoulder, Joint::kRightElbow, 0.055},
  {Joint::kLeftElbow, Joint::kLeftWrist, 0.045},
  {Joint::kRightElbow, Joint::kRightWrist, 0.045},
  {Joint::kLeftHip, Joint::kRightHip, 0.11},
  {Joint::kLeftHip, Joint::kLeftKnee, 0.075},
  {Joint::kRightHip, Joint::kRightKnee, 0.075},
  {Joint::kLeftKnee, Joint::kLeftAnkle, 0.06},
  {Joint::kRightKnee, Joint::kRightAnkle, 0.06},
  {Joint::kChest, Joint::kNeck, 0.12},
}};

std::size_t ji(Joint j) {return static_cast<std::size_t>(index_of(j));}

struct PathPoint
{
  Eigen::Vector2d position;
  Eigen::Vector2d direction;
  double travelled = 0.0;
  bool moving = false;
};

PathPoint locate(const PathSpec & path, double time)
{
  PathPoint out;
  out.position = path.waypoints.front();
  out.direction = Eigen::Vector2d(std::cos(path.heading), std::sin(path.heading));
  double remaining = std::max(0.0, path.speed * time);
  for (std::size_t i = 1; i < path.waypoints.size(); ++i) {
    const Eigen::Vector2d seg = path.waypoints[i] - path.waypoints[i - 1];
    const double len = seg.norm();
    if (len <= 0.0) {
      continue;
    }
    out.direction = seg / len;
    if (remaining < len) {
      out.position = path.waypoints[i - 1] + remaining * out.direction;
      out.travelled += remaining;
      out.moving = path.speed > 0.0;
      return out;
    }
    remaining -= len;
    out.travelled += len;
    out.position = path.waypoints[i];
  }
  return out;
}

bool active(const ActorSpec & actor, int frame, double draw)
{
  return frame >= actor.first_frame && frame <= actor.last_frame && draw < actor.active_probability;
}

}  // namespace

const Skeleton & default_skeleton()
{
  static const Skeleton skeleton = [] {
      Skeleton s;
      s[ji(Joint::kHead)] = v3(0.0, 0.0, 1.65);
      s[ji(Joint::kNeck)] = v3(0.0, 0.0, 1.50);
      s[ji(Joint::kChest)] = v3(0.0, 0.0, 1.30);
      s[ji(Joint::kLeftShoulder)] = v3(-0.19, 0.0, 1.45);
      s[ji(Joint::kRightShoulder)] = v3(0.19, 0.0, 1.45);
      s[ji(Joint::kLeftElbow)] = v3(-0.24, 0.0, 1.16);
      s[ji(Joint::kRightElbow)] = v3(0.24, 0.0, 1.16);
      s[ji(Joint::kLeftWrist)] = v3(-0.26, 0.0, 0.90);
      s[ji(Joint::kRightWrist)] = v3(0.26, 0.0, 0.90);
      s[ji(Joint::kLeftHip)] = v3(-0.10, 0.0, 0.95);
      s[ji(Joint::kRightHip)] = v3(0.10, 0.0, 0.95);
      s[ji(Joint::kLeftKnee)] = v3(-0.10, 0.0, 0.52);
      s[ji(Joint::kRightKnee)] = v3(0.10, 0.0, 0.52);
      s[ji(Joint::kLeftAnkle)] = v3(-0.10, 0.0, 0.08);
      s[ji(Joint::kRightAnkle)] = v3(0.10, 0.0, 0.08);
      return s;
    }();
  return skeleton;
}

Skeleton actor_pose(const ActorSpec & actor, double time)
{
  const PathPoint at = locate(actor.path, time);
  Skeleton body = default_skeleton();
  if (at.moving) {
    // Limbs swing along the walking direction, one stride per 1.4 m.
    const double phase = 2.0 * std::numbers::pi * at.travelled / (1.4 * actor.scale);
    const double s = std::sin(phase);
    body[ji(Joint::kLeftKnee)].y() += 0.12 * s;
    body[ji(Joint::kRightKnee)].y() -= 0.12 * s;
    body[ji(Joint::kLeftAnkle)].y() += 0.20 * s;
    body[ji(Joint::kRightAnkle)].y() -= 0.20 * s;
    body[ji(Joint::kLeftElbow)].y() -= 0.07 * s;
    body[ji(Joint::kRightElbow)].y() += 0.07 * s;
    body[ji(Joint::kLeftWrist)].y() -= 0.15 * s;
    body[ji(Joint::kRightWrist)].y() += 0.15 * s;
  }
  const Eigen::Vector3d forward(at.direction.x(), at.direction.y(), 0.0);
  const Eigen::Vector3d right(at.direction.y(), -at.direction.x(), 0.0);
  const Eigen::Vector3d origin(at.position.x(), at.position.y(), 0.0);
  Skeleton world;
  for (std::size_t i = 0; i < world.size(); ++i) {
    const Eigen::Vector3d & b = body[i];
    world[i] = origin + actor.scale * (b.x() * right + b.y() * forward + b.z() * Eigen::Vector3d::UnitZ());
  }
  return world;
}

Eigen::Vector3d actor_velocity(const ActorSpec & actor, double time)
{
  const PathPoint at = locate(actor.path, time);
  if (!at.moving) {
    return Eigen::Vector3d::Zero();
  }
  return actor.path.speed * Eigen::Vector3d(at.direction.x(), at.direction.y(), 0.0);
}

SubjectState subject_state(const ActorSpec & actor, double time)
{
  SubjectState s;
  s.joints = actor_pose(actor, time);
  s.velocity = actor_velocity(actor, time);
  return s;
}

CameraState CameraScript::at(int frame, const Eigen::Vector3d & chest) const
{
  if (keys.empty()) {
    throw ConfigError("camera script needs at least one key");
  }
  ControlVector c = keys.front().controls;
  if (frame >= keys.back().frame) {
    c = keys.back().controls;
  } else {
    for (std::size_t i = 1; i < keys.size(); ++i) {
      if (frame < keys[i].frame) {
        const CameraKey & a = keys[i - 1];
        const CameraKey & b = keys[i];
        const double w = frame <= a.frame ? 0.0 :
          static_cast<double>(frame - a.frame) / static_cast<double>(b.frame - a.frame);
        c = (1.0 - w) * a.controls + w * b.controls;
        break;
      }
    }
  }
  CameraState cam = optics;
  cam.set_controls(c);
  if (look_at_offset) {
    const Eigen::Vector3d d = chest + *look_at_offset - cam.position;
    cam.yaw = std::atan2(d.y(), d.x());
    cam.pitch = std::atan2(d.z(), std::hypot(d.x(), d.y()));
  }
  if (focus_mode == FocusMode::kSubject) {
    cam.focus_m = std::max((chest - cam.position).norm() + focus_offset_m, 2e-3 * cam.focal_mm);
  }
  return cam;
}

void SceneSpec::validate() const
{
  geometry.validate();
  auto probability = [](double p, const char * name) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw ConfigError(std::string(name) + " must lie in [0, 1]");
      }
    };
  if (frame_count < 1) {
    throw ConfigError("frame_count must be at least 1");
  }
  if (!(frame_duration > 0.0)) {
    throw ConfigError("frame_duration_s must be positive");
  }
  if (!(noise.joint_sigma_px >= 0.0) || !(noise.box_sigma_px >= 0.0)) {
    throw ConfigError("noise sigmas must be non-negative");
  }
  probability(noise.dropout, "noise.dropout");
  probability(noise.focus_glitch, "noise.focus_glitch");
  probability(noise.joint_q, "noise.joint_q");
  probability(noise.confidence_floor, "noise.confidence_floor");
  auto check_actor = [&](const ActorSpec & a) {
      if (!(a.scale > 0.0)) {
        throw ConfigError("actor scale must be positive");
      }
      if (a.path.waypoints.empty() || !(a.path.speed >= 0.0)) {
        throw ConfigError("actor path needs a waypoint and a non-negative speed");
      }
      probability(a.confidence, "actor confidence");
      probability(a.active_probability, "actor active_probability");
    };
  check_actor(subject);
  for (const ActorSpec & d : distractors) {
    check_actor(d);
  }
  if (camera.keys.empty()) {
    throw ConfigError("camera script needs at least one key");
  }
  for (std::size_t i = 1; i < camera.keys.size(); ++i) {
    if (camera.keys[i].frame <= camera.keys[i - 1].frame) {
      throw ConfigError("camera keys must have strictly increasing frames");
    }
  }
}

namespace
{

struct PersonRender
{
  Skeleton world;
  std::array<Projection, kJointCount> proj;
  std::array<double, kJointCount> distance{};
  std::vector<double> depth;  ///< per pixel, +inf outside the silhouette
};

void rasterize(PersonRender & p, const CameraState & cam, const ImageGeometry & g)
{
  p.depth.assign(static_cast<std::size_t>(g.pixel_count()), kInfinity);
  const double px_per_mm = g.width / cam.sensor_width_mm;
  for (const Bone & bone : kBones) {
    const Projection & pa = p.proj[ji(bone.a)];
    const Projection & pb = p.proj[ji(bone.b)];
    if (pa.behind || pb.behind || pa.depth < 0.05 || pb.depth < 0.05) {
      continue;
    }
    const Eigen::Vector2d a = to_pixels(pa.normalized, g);
    const Eigen::Vector2d b = to_pixels(pb.normalized, g);
    const double ra = bone.radius * cam.focal_mm / pa.depth * px_per_mm;
    const double rb = bone.radius * cam.focal_mm / pb.depth * px_per_mm;
    const double da = p.distance[ji(bone.a)];
    const double db = p.distance[ji(bone.b)];
    const double rmax = std::max(ra, rb);
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x(), b.x()) - rmax)));
    const int x1 = std::min(g.width - 1, static_cast<int>(std::ceil(std::max(a.x(), b.x()) + rmax)));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y(), b.y()) - rmax)));
    const int y1 = std::min(g.height - 1, static_cast<int>(std::ceil(std::max(a.y(), b.y()) + rmax)));
    const Eigen::Vector2d ab = b - a;
    const double len2 = ab.squaredNorm();
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const Eigen::Vector2d q(x, y);
        const double t = len2 > 0.0 ? std::clamp((q - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
        const double r = ra + t * (rb - ra);
        if ((q - (a + t * ab)).squaredNorm() > r * r) {
          continue;
        }
        double & cell = p.depth[static_cast<std::size_t>(y) * static_cast<std::size_t>(g.width) +
          static_cast<std::size_t>(x)];
        cell = std::min(cell, da + t * (db - da));
      }
    }
  }
}

std::vector<double> environment_depth(const EnvironmentSpec & env, const CameraState & cam, const ImageGeometry & g)
{
  std::vector<double> depth(static_cast<std::size_t>(g.pixel_count()), kInfinity);
  const CameraAxes ax = camera_axes(cam.yaw, cam.pitch);
  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x < g.width; ++x) {
      const double su = (static_cast<double>(x) / g.width - 0.5) * cam.sensor_width_mm / cam.focal_mm;
      const double sv = (0.5 - static_cast<double>(y) / g.height) * cam.sensor_height_mm / cam.focal_mm;
      const Eigen::Vector3d d = ax.forward + su * ax.right + sv * ax.up;
      double best = kInfinity;
      if (env.ground && d.z() < 0.0 && cam.position.z() > 0.0) {
        best = std::min(best, -cam.position.z() / d.z());
      }
      if (env.backdrop_y && d.y() != 0.0) {
        const double t = (*env.backdrop_y - cam.position.y()) / d.y();
        if (t > 0.0) {
          best = std::min(best, t);
        }
      }
      depth[static_cast<std::size_t>(y) * static_cast<std::size_t>(g.width) + static_cast<std::size_t>(x)] =
        best * d.norm();
    }
  }
  return depth;
}

BBox extents(const std::vector<std::uint8_t> & grid, const ImageGeometry & g)
{
  int x0 = g.width;
  int y0 = g.height;
  int x1 = -1;
  int y1 = -1;
  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x < g.width; ++x) {
      if (grid[static_cast<std::size_t>(y) * static_cast<std::size_t>(g.width) + static_cast<std::size_t>(x)]) {
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
      }
    }
  }
  if (x1 < 0) {
    return {};
  }
  return {static_cast<double>(x0), static_cast<double>(y0), x1 + 1.0, y1 + 1.0};
}

bool in_focus(double distance, const DepthOfField & dof)
{
  if (std::isinf(distance)) {
    return std::isinf(dof.far_m);
  }
  return distance >= dof.near_m && distance <= dof.far_m;
}

}  // namespace

std::pair<FrameMeasurements, FrameTruth> render_frame(
  const SceneSpec & spec, int frame, double time, const CameraState & cam)
{
  const ImageGeometry & g = spec.geometry;
  const auto npix = static_cast<std::size_t>(g.pixel_count());
  std::seed_seq seq{
    static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
    static_cast<std::uint32_t>(frame)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  CameraState camera = cam;
  camera.geometry = g;
  const DepthOfField dof = thin_lens_dof(camera);

  // Actor 0 is the subject; distractors follow.
  std::vector<const ActorSpec *> actors{&spec.subject};
  std::vector<int> actor_id{0};
  for (std::size_t i = 0; i < spec.distractors.size(); ++i) {
    const double draw = uniform(rng);
    if (active(spec.distractors[i], frame, draw)) {
      actors.push_back(&spec.distractors[i]);
      actor_id.push_back(static_cast<int>(i) + 1);
    }
  }

  std::vector<PersonRender> people(actors.size());
  for (std::size_t p = 0; p < actors.size(); ++p) {
    PersonRender & pr = people[p];
    pr.world = actor_pose(*actors[p], time);
    for (std::size_t j = 0; j < static_cast<std::size_t>(kJointCount); ++j) {
      pr.proj[j] = project(pr.world[j], camera);
      pr.distance[j] = (pr.world[j] - camera.position).norm();
    }
    rasterize(pr, camera, g);
  }

  std::vector<double> distance = environment_depth(spec.environment, camera, g);
  std::vector<int> owner(npix, -1);
  for (std::size_t i = 0; i < npix; ++i) {
    double best = kInfinity;
    for (std::size_t p = 0; p < people.size(); ++p) {
      if (people[p].depth[i] < best) {
        best = people[p].depth[i];
        owner[i] = static_cast<int>(p);
      }
    }
    if (owner[i] >= 0) {
      distance[i] = best;
    }
  }

  std::vector<std::uint8_t> focus_grid(npix);
  for (std::size_t i = 0; i < npix; ++i) {
    focus_grid[i] = in_focus(distance[i], dof) ? 1 : 0;
  }
  const RleMask focus = RleMask::encode(g, focus_grid);

  FrameTruth truth;
  truth.camera = camera;
  truth.dof = dof;
  truth.joints_world = people[0].world;
  truth.distance_m = (people[0].world[ji(Joint::kChest)] - camera.position).norm();
  for (std::size_t j = 0; j < static_cast<std::size_t>(kJointCount); ++j) {
    const Projection & pj = people[0].proj[j];
    truth.joints_px[j] = to_pixels(pj.normalized, g);
    truth.joint_visible[j] = !pj.behind && pj.inside;
  }

  struct Candidate
  {
    PersonDetection detection;
    JointObservation person;
    bool subject = false;
    bool dropped = false;
  };
  std::vector<Candidate> found;
  std::vector<std::uint8_t> grid(npix);
  for (std::size_t p = 0; p < people.size(); ++p) {
    for (std::size_t i = 0; i < npix; ++i) {
      grid[i] = owner[i] == static_cast<int>(p) ? 1 : 0;
    }
    const RleMask mask = RleMask::encode(g, grid);
    const BBox box = extents(grid, g);
    // Draws happen for every person so the stream does not depend on visibility.
    const double drop = uniform(rng);
    std::array<double, 4> box_noise{};
    for (double & n : box_noise) {
      n = normal(rng);
    }
    std::array<double, 2 * kJointCount> joint_noise{};
    for (double & n : joint_noise) {
      n = normal(rng);
    }
    if (p == 0) {
      truth.mask = mask;
      truth.box = box;
    }
    if (mask.count() == 0) {
      continue;
    }
    Candidate c;
    c.subject = p == 0;
    c.dropped = drop < spec.noise.dropout;
    const double blurred = 1.0 - focus_fraction(focus, mask);
    c.detection.confidence = std::clamp(
      actors[p]->confidence - spec.noise.blur_penalty * blurred, spec.noise.confidence_floor, 1.0);
    c.detection.mask = mask;
    const double sb = spec.noise.box_sigma_px;
    BBox noisy{box.left + sb * box_noise[0], box.top + sb * box_noise[1],
      box.right + sb * box_noise[2], box.bottom + sb * box_noise[3]};
    noisy.clamp_to(g);
    c.detection.bbox = noisy.valid() ? noisy : box;
    const double sj = spec.noise.joint_sigma_px;
    for (std::size_t j = 0; j < static_cast<std::size_t>(kJointCount); ++j) {
      const Projection & pj = people[p].proj[j];
      JointPoint & pt = c.person.joints[j];
      if (pj.behind || !pj.inside) {
        continue;
      }
      const Eigen::Vector2d px = to_pixels(pj.normalized, g);
      pt.x = std::clamp(px.x() + sj * joint_noise[2 * j], 0.0, static_cast<double>(g.width));
      pt.y = std::clamp(px.y() + sj * joint_noise[2 * j + 1], 0.0, static_cast<double>(g.height));
      pt.q = spec.noise.joint_q;
      pt.visible = true;
    }
    found.push_back(std::move(c));
  }

  truth.regions.subject = truth.mask;
  {
    double nearest = kInfinity;
    for (std::size_t i = 0; i < npix; ++i) {
      if (owner[i] == 0) {
        nearest = std::min(nearest, distance[i]);
      }
    }
    std::vector<std::uint8_t> fg(npix);
    std::vector<std::uint8_t> bg(npix);
    for (std::size_t i = 0; i < npix; ++i) {
      if (owner[i] == 0) {
        continue;
      }
      (distance[i] < nearest ? fg : bg)[i] = 1;
    }
    truth.regions.foreground = RleMask::encode(g, fg);
    truth.regions.background = RleMask::encode(g, bg);
  }
  for (int r = 0; r < kRegionCount; ++r) {
    const RleMask & region = truth.regions[static_cast<Region>(r)];
    truth.fractions[static_cast<std::size_t>(r)] = focus_fraction(focus, region);
    truth.focused[static_cast<std::size_t>(r)] =
      region.count() > 0 && truth.fractions[static_cast<std::size_t>(r)] >= kDefaultFocusThreshold;
  }
  truth.focused[1] = truth.mask.count() > 0 && truth.distance_m >= dof.near_m && truth.distance_m <= dof.far_m;

  const bool glitch = uniform(rng) < spec.noise.focus_glitch;

  std::vector<std::size_t> det_order;
  for (std::size_t i = 0; i < found.size(); ++i) {
    if (!found[i].dropped) {
      det_order.push_back(i);
    }
  }
  std::vector<std::size_t> person_order = det_order;
  if (spec.noise.shuffle) {
    std::shuffle(det_order.begin(), det_order.end(), rng);
    std::shuffle(person_order.begin(), person_order.end(), rng);
  }

  FrameMeasurements m;
  m.frame_index = frame;
  m.duration = spec.frame_duration;
  m.geometry = g;
  m.focus.mask = glitch ? ~focus : focus;
  for (std::size_t k = 0; k < det_order.size(); ++k) {
    if (found[det_order[k]].subject) {
      truth.subject_detection = static_cast<int>(k);
    }
    m.detections.push_back(found[det_order[k]].detection);
  }
  for (std::size_t k = 0; k < person_order.size(); ++k) {
    if (found[person_order[k]].subject) {
      truth.subject_person = static_cast<int>(k);
    }
    m.persons.push_back(found[person_order[k]].person);
  }
  return {std::move(m), std::move(truth)};
}

Synthesis synthesize(const SceneSpec & spec)
{
  spec.validate();
  Synthesis out;
  out.sequence.geometry = spec.geometry;
  for (int f = 1; f <= spec.frame_count; ++f) {
    const double time = (f - 1) * spec.frame_duration;
    const Eigen::Vector3d chest = actor_pose(spec.subject, time)[ji(Joint::kChest)];
    auto [frame, truth] = render_frame(spec, f, time, spec.camera.at(f, chest));
    if (truth.mask.count() == 0) {
      throw ValidationError("subject", f, "main subject is not visible to the scripted camera");
    }
    out.sequence.frames.push_back(std::move(frame));
    out.truth.frames.push_back(std::move(truth));
  }
  return out;
}

RolloutResult rollout(
  const RecordingInstructions & instructions, const SceneSpec & target, const RolloutOptions & options)
{
  target.validate();
  instructions.validate();
  options.controller.validate();
  if (instructions.frames.empty()) {
    throw ConfigError("rollout needs at least one instruction frame");
  }
  const std::span<const InstructionFrame> frames(instructions.frames);
  RolloutResult out;
  out.output.sequence.geometry = target.geometry;

  CameraState cam = options.initial.value_or(
    target.camera.at(1, actor_pose(target.subject, 0.0)[ji(Joint::kChest)]));
  cam.geometry = target.geometry;
  cam.validate();

  std::vector<ControlVector> warm;
  double time = 0.0;
  for (std::size_t k = 0; k < frames.size(); ++k) {
    if (k > 0) {
      time += frames[k].duration;
    }
    auto [meas, truth] = render_frame(target, static_cast<int>(k) + 1, time, cam);
    meas.duration = frames[k].duration;

    const SubjectState subject = subject_state(target.subject, time);
    TrajectoryRow row;
    row.frame = static_cast<int>(k) + 1;
    row.time = time;
    row.camera = cam;
    row.dof = truth.dof;
    row.distance_m = truth.distance_m;
    row.cost = evaluate_cost(
      cam, make_step_target(subject, frames[k], 0.0, instructions.mu), options.controller.weights);
    for (std::size_t j = 0; j < static_cast<std::size_t>(kJointCount); ++j) {
      row.joints[j] = truth.joints_px[j].cwiseQuotient(
        Eigen::Vector2d(target.geometry.width, target.geometry.height));
      row.joint_visible[j] = truth.joint_visible[j];
    }

    if (k + 1 < frames.size()) {
      const ControlPlan plan = control_step(
        cam, subject, frames.subspan(k + 1), instructions.mu, options.controller, warm);
      row.iterations = plan.iterations;
      if (!std::isfinite(plan.cost) || plan.cost > options.divergence_cost) {
        std::ostringstream os;
        os << "controller diverged at frame " << k + 1 << ": horizon cost " << plan.cost
           << " exceeds " << options.divergence_cost;
        throw SolverError(os.str());
      }
      cam = apply_action(cam, plan.actions.front(), frames[k + 1].duration, options.controller);
      warm.assign(plan.actions.begin() + 1, plan.actions.end());
      warm.push_back(plan.actions.back());
    }
    out.trajectory.push_back(row);
    out.output.sequence.frames.push_back(std::move(meas));
    out.output.truth.frames.push_back(std::move(truth));
  }
  return out;
}

}  // namespace cine
