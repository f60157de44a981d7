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

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include "cine/errors.hpp"
#include "cine/scene.hpp"

namespace cine
{

using nlohmann::json;

namespace
{

json vec(const Eigen::Ref<const Eigen::VectorXd> & v)
{
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out.push_back(v(i));
  }
  return out;
}

json actor_to_json(const ActorSpec & a)
{
  json waypoints = json::array();
  for (const auto & w : a.path.waypoints) {
    waypoints.push_back(vec(w));
  }
  json out{
    {"scale", a.scale},
    {"path", {{"waypoints", waypoints}, {"speed", a.path.speed}, {"heading", a.path.heading}}},
    {"confidence", a.confidence},
    {"first_frame", a.first_frame},
    {"active_probability", a.active_probability},
  };
  if (a.last_frame != INT_MAX) {
    out["last_frame"] = a.last_frame;
  }
  return out;
}

// Reads optional members with type checks; errors name the dotted path.
class Fields
{
public:
  Fields(const json & obj, std::string path, std::initializer_list<const char *> known)
  : obj_(obj), path_(std::move(path))
  {
    if (!obj.is_object()) {
      fail("", "expected an object");
    }
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool ok = false;
      for (const char * k : known) {
        ok = ok || it.key() == k;
      }
      if (!ok) {
        fail(it.key(), "unknown field");
      }
    }
  }

  [[noreturn]] void fail(const std::string & key, const std::string & what) const
  {
    throw ValidationError(name(key), std::nullopt, what);
  }

  std::string name(const std::string & key) const
  {
    if (path_.empty()) {
      return key;
    }
    return key.empty() ? path_ : path_ + "." + key;
  }

  const json * find(const char * key) const
  {
    return obj_.contains(key) ? &obj_.at(key) : nullptr;
  }

  void number(const char * key, double & out) const
  {
    if (const json * v = find(key)) {
      if (!v->is_number() || !std::isfinite(v->get<double>())) {
        fail(key, "expected a finite number");
      }
      out = v->get<double>();
    }
  }

  template<typename Int>
  void integer(const char * key, Int & out) const
  {
    if (const json * v = find(key)) {
      if (!v->is_number_integer()) {
        fail(key, "expected an integer");
      }
      out = v->get<Int>();
    }
  }

  void boolean(const char * key, bool & out) const
  {
    if (const json * v = find(key)) {
      if (!v->is_boolean()) {
        fail(key, "expected a boolean");
      }
      out = v->get<bool>();
    }
  }

  Eigen::VectorXd vector(const json & v, const std::string & key, Eigen::Index size) const
  {
    if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != size) {
      fail(key, "expected an array of " + std::to_string(size) + " numbers");
    }
    Eigen::VectorXd out(size);
    for (Eigen::Index i = 0; i < size; ++i) {
      const json & e = v[static_cast<std::size_t>(i)];
      if (!e.is_number()) {
        fail(key, "expected an array of " + std::to_string(size) + " numbers");
      }
      out(i) = e.get<double>();
    }
    return out;
  }

private:
  const json & obj_;
  std::string path_;
};

ActorSpec parse_actor(const json & j, const std::string & path)
{
  const Fields f(j, path,
    {"scale", "path", "confidence", "first_frame", "last_frame", "active_probability"});
  ActorSpec a;
  f.number("scale", a.scale);
  f.number("confidence", a.confidence);
  f.integer("first_frame", a.first_frame);
  f.integer("last_frame", a.last_frame);
  f.number("active_probability", a.active_probability);
  if (const json * p = f.find("path")) {
    const Fields pf(*p, f.name("path"), {"waypoints", "speed", "heading"});
    pf.number("speed", a.path.speed);
    pf.number("heading", a.path.heading);
    if (const json * w = pf.find("waypoints")) {
      if (!w->is_array() || w->empty()) {
        pf.fail("waypoints", "expected a non-empty array of [x, y]");
      }
      a.path.waypoints.clear();
      for (const json & pt : *w) {
        a.path.waypoints.push_back(pf.vector(pt, "waypoints", 2));
      }
    }
  }
  return a;
}

CameraScript parse_camera(const json & j)
{
  const Fields f(j, "camera",
    {"keys", "look_at_offset", "focus_mode", "focus_offset_m", "sensor_mm", "coc_mm"});
  CameraScript script;
  f.number("focus_offset_m", script.focus_offset_m);
  f.number("coc_mm", script.optics.coc_mm);
  if (const json * s = f.find("sensor_mm")) {
    const Eigen::VectorXd v = f.vector(*s, "sensor_mm", 2);
    script.optics.sensor_width_mm = v(0);
    script.optics.sensor_height_mm = v(1);
  }
  if (const json * l = f.find("look_at_offset")) {
    if (!l->is_null()) {
      script.look_at_offset = Eigen::Vector3d(f.vector(*l, "look_at_offset", 3));
    }
  }
  if (const json * m = f.find("focus_mode")) {
    if (*m == "scripted") {
      script.focus_mode = FocusMode::kScripted;
    } else if (*m == "subject") {
      script.focus_mode = FocusMode::kSubject;
    } else {
      f.fail("focus_mode", "expected \"scripted\" or \"subject\"");
    }
  }
  if (const json * keys = f.find("keys")) {
    if (!keys->is_array() || keys->empty()) {
      f.fail("keys", "expected a non-empty array");
    }
    script.keys.clear();
    for (const json & k : *keys) {
      const Fields kf(k, "camera.keys[]",
        {"frame", "position", "yaw", "pitch", "focal_mm", "f_number", "focus_m"});
      CameraState cam;
      CameraKey key;
      kf.integer("frame", key.frame);
      if (const json * p = kf.find("position")) {
        cam.position = kf.vector(*p, "position", 3);
      }
      kf.number("yaw", cam.yaw);
      kf.number("pitch", cam.pitch);
      kf.number("focal_mm", cam.focal_mm);
      kf.number("f_number", cam.f_number);
      kf.number("focus_m", cam.focus_m);
      key.controls = cam.controls();
      script.keys.push_back(key);
    }
  }
  return script;
}

}  // namespace

json scene_to_json(const SceneSpec & spec)
{
  json doc;
  doc["geometry"] = {{"width", spec.geometry.width}, {"height", spec.geometry.height}};
  doc["frame_count"] = spec.frame_count;
  doc["frame_duration_s"] = spec.frame_duration;
  doc["seed"] = spec.seed;
  doc["subject"] = actor_to_json(spec.subject);
  json distractors = json::array();
  for (const ActorSpec & d : spec.distractors) {
    distractors.push_back(actor_to_json(d));
  }
  doc["distractors"] = std::move(distractors);
  const NoiseSpec & n = spec.noise;
  doc["noise"] = {
    {"joint_sigma_px", n.joint_sigma_px}, {"box_sigma_px", n.box_sigma_px},
    {"blur_penalty", n.blur_penalty}, {"confidence_floor", n.confidence_floor},
    {"joint_q", n.joint_q}, {"dropout", n.dropout}, {"focus_glitch", n.focus_glitch},
    {"shuffle", n.shuffle},
  };
  doc["environment"] = {{"ground", spec.environment.ground}};
  if (spec.environment.backdrop_y) {
    doc["environment"]["backdrop_y"] = *spec.environment.backdrop_y;
  }
  const CameraScript & c = spec.camera;
  json keys = json::array();
  for (const CameraKey & k : c.keys) {
    keys.push_back(
    {
      {"frame", k.frame}, {"position", vec(k.controls.head<3>())}, {"yaw", k.controls(3)},
      {"pitch", k.controls(4)}, {"focal_mm", k.controls(5)}, {"f_number", k.controls(6)},
      {"focus_m", k.controls(7)},
    });
  }
  doc["camera"] = {
    {"keys", std::move(keys)},
    {"focus_mode", c.focus_mode == FocusMode::kSubject ? "subject" : "scripted"},
    {"focus_offset_m", c.focus_offset_m},
    {"sensor_mm", {c.optics.sensor_width_mm, c.optics.sensor_height_mm}},
    {"coc_mm", c.optics.coc_mm},
  };
  if (c.look_at_offset) {
    doc["camera"]["look_at_offset"] = vec(*c.look_at_offset);
  }
  return doc;
}

SceneSpec parse_scene(const json & doc)
{
  const Fields f(doc, "",
    {"geometry", "frame_count", "frame_duration_s", "seed", "subject", "distractors", "noise",
      "environment", "camera"});
  SceneSpec spec;
  if (const json * g = f.find("geometry")) {
    const Fields gf(*g, "geometry", {"width", "height"});
    gf.integer("width", spec.geometry.width);
    gf.integer("height", spec.geometry.height);
  }
  f.integer("frame_count", spec.frame_count);
  f.number("frame_duration_s", spec.frame_duration);
  f.integer("seed", spec.seed);
  if (const json * s = f.find("subject")) {
    spec.subject = parse_actor(*s, "subject");
  }
  if (const json * d = f.find("distractors")) {
    if (!d->is_array()) {
      f.fail("distractors", "expected an array");
    }
    for (const json & a : *d) {
      spec.distractors.push_back(parse_actor(a, "distractors[]"));
    }
  }
  if (const json * n = f.find("noise")) {
    const Fields nf(*n, "noise",
      {"joint_sigma_px", "box_sigma_px", "blur_penalty", "confidence_floor", "joint_q", "dropout",
        "focus_glitch", "shuffle"});
    NoiseSpec & ns = spec.noise;
    nf.number("joint_sigma_px", ns.joint_sigma_px);
    nf.number("box_sigma_px", ns.box_sigma_px);
    nf.number("blur_penalty", ns.blur_penalty);
    nf.number("confidence_floor", ns.confidence_floor);
    nf.number("joint_q", ns.joint_q);
    nf.number("dropout", ns.dropout);
    nf.number("focus_glitch", ns.focus_glitch);
    nf.boolean("shuffle", ns.shuffle);
  }
  if (const json * e = f.find("environment")) {
    const Fields ef(*e, "environment", {"ground", "backdrop_y"});
    ef.boolean("ground", spec.environment.ground);
    if (const json * b = ef.find("backdrop_y"); b != nullptr && !b->is_null()) {
      double y = 0.0;
      ef.number("backdrop_y", y);
      spec.environment.backdrop_y = y;
    }
  }
  if (const json * c = f.find("camera")) {
    spec.camera = parse_camera(*c);
  }
  spec.camera.optics.geometry = spec.geometry;
  try {
    spec.validate();
  } catch (const ConfigError & e) {
    throw ValidationError("scene", std::nullopt, e.what());
  }
  return spec;
}

SceneSpec read_scene(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("<file>", std::nullopt, "cannot open " + path.string());
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error & e) {
    throw ValidationError("<document>", std::nullopt, std::string("malformed JSON: ") + e.what());
  }
  return parse_scene(doc);
}

json truth_to_json(const GroundTruth & truth)
{
  json frames = json::array();
  for (std::size_t f = 0; f < truth.frames.size(); ++f) {
    const FrameTruth & t = truth.frames[f];
    json joints = json::array();
    for (int j = 0; j < kJointCount; ++j) {
      const auto idx = static_cast<std::size_t>(j);
      joints.push_back(
      {
        {"name", joint_name(static_cast<Joint>(j))}, {"x", t.joints_px[idx].x()},
        {"y", t.joints_px[idx].y()}, {"visible", t.joint_visible[idx]},
        {"world", vec(t.joints_world[idx])},
      });
    }
    frames.push_back(
    {
      {"index", static_cast<int>(f) + 1},
      {"camera", vec(t.camera.controls())},
      {"near_m", std::isinf(t.dof.near_m) ? json(nullptr) : json(t.dof.near_m)},
      {"far_m", std::isinf(t.dof.far_m) ? json(nullptr) : json(t.dof.far_m)},
      {"distance_m", t.distance_m},
      {"subject_detection", t.subject_detection ? json(*t.subject_detection) : json(nullptr)},
      {"subject_person", t.subject_person ? json(*t.subject_person) : json(nullptr)},
      {"bbox", {t.box.left, t.box.top, t.box.right, t.box.bottom}},
      {"mask_rle", t.mask.runs()},
      {"joints", std::move(joints)},
      {"fractions", t.fractions},
      {"focus", t.focused},
    });
  }
  return {{"frames", std::move(frames)}};
}

}  // namespace cine
