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

#include "cine/measurement_io.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include "cine/errors.hpp"

namespace cine
{

using nlohmann::json;

namespace
{

class Reader
{
public:
  Reader(const ParseOptions & options, std::vector<std::string> & warnings)
  : options_(options), warnings_(warnings) {}

  void set_frame(std::optional<int> frame) {frame_ = frame;}

  [[noreturn]] void fail(const std::string & field, const std::string & what) const
  {
    throw ValidationError(field, frame_, what);
  }

  const json & object(const json & parent, const std::string & key, const std::string & path) const
  {
    if (!parent.contains(key)) {
      fail(path, "missing required field");
    }
    return parent.at(key);
  }

  void check_keys(
    const json & obj, std::initializer_list<std::string_view> known, const std::string & path)
  {
    if (!obj.is_object()) {
      fail(path, "expected an object");
    }
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool found = false;
      for (const auto k : known) {
        found = found || it.key() == k;
      }
      if (found) {
        continue;
      }
      const std::string name = path.empty() ? it.key() : path + "." + it.key();
      if (options_.strict) {
        fail(name, "unknown field");
      }
      std::string msg = "ignoring unknown field '" + name + "'";
      if (frame_) {
        msg = "frame " + std::to_string(*frame_) + ": " + msg;
      }
      warnings_.push_back(std::move(msg));
    }
  }

  double number(const json & v, const std::string & field) const
  {
    if (!v.is_number()) {
      fail(field, "expected a number");
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
      fail(field, "expected a finite number");
    }
    return d;
  }

  std::int64_t integer(const json & v, const std::string & field) const
  {
    if (!v.is_number_integer()) {
      fail(field, "expected an integer");
    }
    return v.get<std::int64_t>();
  }

  double unit_interval(const json & v, const std::string & field) const
  {
    const double d = number(v, field);
    if (d < 0.0 || d > 1.0) {
      std::ostringstream os;
      os << "value " << d << " outside [0, 1]";
      fail(field, os.str());
    }
    return d;
  }

  RleMask mask(const json & v, const ImageGeometry & geometry, const std::string & field) const
  {
    if (!v.is_array()) {
      fail(field, "expected an array of run lengths");
    }
    std::vector<std::uint32_t> runs;
    runs.reserve(v.size());
    std::int64_t total = 0;
    for (const auto & r : v) {
      if (!r.is_number_integer() || r.get<std::int64_t>() < 0) {
        fail(field, "run lengths must be non-negative integers");
      }
      total += r.get<std::int64_t>();
      if (total > geometry.pixel_count()) {
        break;
      }
      runs.push_back(static_cast<std::uint32_t>(r.get<std::int64_t>()));
    }
    if (total != geometry.pixel_count()) {
      fail(
        field, "geometry mismatch: runs cover " + std::to_string(total) + " pixels, image has " +
        std::to_string(geometry.pixel_count()));
    }
    return RleMask(geometry, std::move(runs));
  }

private:
  const ParseOptions & options_;
  std::vector<std::string> & warnings_;
  std::optional<int> frame_;
};

PersonDetection read_detection(
  Reader & rd, const json & d, const ImageGeometry & geometry, bool & clamped)
{
  rd.check_keys(d, {"bbox", "mask_rle", "confidence"}, "detections[]");
  PersonDetection det;
  const json & box = rd.object(d, "bbox", "bbox");
  if (!box.is_array() || box.size() != 4) {
    rd.fail("bbox", "expected [left, top, right, bottom]");
  }
  det.bbox.left = rd.number(box[0], "bbox");
  det.bbox.top = rd.number(box[1], "bbox");
  det.bbox.right = rd.number(box[2], "bbox");
  det.bbox.bottom = rd.number(box[3], "bbox");
  if (det.bbox.clamp_to(geometry)) {
    clamped = true;
  }
  if (!det.bbox.valid()) {
    rd.fail("bbox", "box is empty after clamping to the image (need left < right, top < bottom)");
  }
  det.mask = rd.mask(rd.object(d, "mask_rle", "mask_rle"), geometry, "mask_rle");
  det.confidence = rd.unit_interval(rd.object(d, "confidence", "confidence"), "confidence");
  return det;
}

JointObservation read_person(
  Reader & rd, const json & p, const ImageGeometry & geometry, bool & clamped)
{
  rd.check_keys(p, {"joints"}, "persons[]");
  const json & joints = rd.object(p, "joints", "joints");
  if (!joints.is_array() || joints.size() != static_cast<std::size_t>(kJointCount)) {
    rd.fail("joints", "expected exactly 15 joints");
  }
  JointObservation obs;
  for (int i = 0; i < kJointCount; ++i) {
    const json & j = joints[static_cast<std::size_t>(i)];
    rd.check_keys(j, {"name", "x", "y", "q", "visible"}, "joints[]");
    const json & name = rd.object(j, "name", "name");
    const auto expected = joint_name(static_cast<Joint>(i));
    if (!name.is_string() || name.get<std::string>() != expected) {
      rd.fail("name", "joint " + std::to_string(i) + " must be named '" + std::string(expected) + "'");
    }
    JointPoint & pt = obs.joints[static_cast<std::size_t>(i)];
    pt.x = rd.number(rd.object(j, "x", "x"), "x");
    pt.y = rd.number(rd.object(j, "y", "y"), "y");
    pt.q = rd.unit_interval(rd.object(j, "q", "q"), "q");
    const json & vis = rd.object(j, "visible", "visible");
    if (!vis.is_boolean()) {
      rd.fail("visible", "expected a boolean");
    }
    pt.visible = vis.get<bool>();
    if (pt.visible) {
      const double cx = std::clamp(pt.x, 0.0, static_cast<double>(geometry.width));
      const double cy = std::clamp(pt.y, 0.0, static_cast<double>(geometry.height));
      if (cx != pt.x || cy != pt.y) {
        clamped = true;
        pt.x = cx;
        pt.y = cy;
      }
    }
  }
  return obs;
}

}  // namespace

ParsedSequence parse_sequence(const json & doc, const ParseOptions & options)
{
  ParsedSequence out;
  Reader rd(options, out.warnings);
  rd.check_keys(doc, {"geometry", "frames"}, "");

  const json & g = rd.object(doc, "geometry", "geometry");
  rd.check_keys(g, {"width", "height"}, "geometry");
  ImageGeometry geometry;
  geometry.width = static_cast<int>(rd.integer(rd.object(g, "width", "width"), "width"));
  geometry.height = static_cast<int>(rd.integer(rd.object(g, "height", "height"), "height"));
  geometry.validate();
  out.sequence.geometry = geometry;

  const json & frames = rd.object(doc, "frames", "frames");
  if (!frames.is_array()) {
    rd.fail("frames", "expected an array");
  }
  int previous = 0;
  for (const json & f : frames) {
    rd.set_frame(std::nullopt);
    if (!f.is_object()) {
      rd.fail("frames", "each frame must be an object");
    }
    const std::int64_t index = rd.integer(rd.object(f, "index", "index"), "index");
    if (index < 1) {
      rd.fail("index", "frame index must be >= 1");
    }
    rd.set_frame(static_cast<int>(index));
    if (index <= previous) {
      rd.fail(
        "index", "frame indices must be strictly increasing (previous " +
        std::to_string(previous) + ")");
    }
    previous = static_cast<int>(index);
    rd.check_keys(f, {"index", "duration_s", "detections", "persons", "focus_rle"}, "frames[]");

    FrameMeasurements frame;
    frame.frame_index = static_cast<int>(index);
    frame.geometry = geometry;
    frame.duration = kDefaultFrameDuration;
    if (f.contains("duration_s")) {
      frame.duration = rd.number(f.at("duration_s"), "duration_s");
      if (frame.duration <= 0.0) {
        rd.fail("duration_s", "duration must be positive");
      }
    }
    if (f.contains("detections")) {
      const json & dets = f.at("detections");
      if (!dets.is_array()) {
        rd.fail("detections", "expected an array");
      }
      for (const json & d : dets) {
        frame.detections.push_back(read_detection(rd, d, geometry, frame.clamped));
      }
    }
    if (f.contains("persons")) {
      const json & persons = f.at("persons");
      if (!persons.is_array()) {
        rd.fail("persons", "expected an array");
      }
      for (const json & p : persons) {
        frame.persons.push_back(read_person(rd, p, geometry, frame.clamped));
      }
    }
    frame.focus.mask = rd.mask(rd.object(f, "focus_rle", "focus_rle"), geometry, "focus_rle");
    if (frame.clamped) {
      out.warnings.push_back(
        "frame " + std::to_string(index) + ": clamped out-of-image box or joint coordinates");
    }
    out.sequence.frames.push_back(std::move(frame));
  }
  return out;
}

ParsedSequence parse_sequence_text(const std::string & text, const ParseOptions & options)
{
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error & e) {
    throw ValidationError("<document>", std::nullopt, std::string("malformed JSON: ") + e.what());
  }
  return parse_sequence(doc, options);
}

ParsedSequence parse_sequence(const std::filesystem::path & path, const ParseOptions & options)
{
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("<file>", std::nullopt, "cannot open " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_sequence_text(buffer.str(), options);
}

json sequence_to_json(const MeasurementSequence & sequence)
{
  json doc;
  doc["geometry"] = {{"width", sequence.geometry.width}, {"height", sequence.geometry.height}};
  json frames = json::array();
  for (const FrameMeasurements & f : sequence.frames) {
    json jf;
    jf["index"] = f.frame_index;
    jf["duration_s"] = f.duration;
    json dets = json::array();
    for (const PersonDetection & d : f.detections) {
      dets.push_back(
      {
        {"bbox", {d.bbox.left, d.bbox.top, d.bbox.right, d.bbox.bottom}},
        {"mask_rle", d.mask.runs()},
        {"confidence", d.confidence},
      });
    }
    jf["detections"] = std::move(dets);
    json persons = json::array();
    for (const JointObservation & p : f.persons) {
      json joints = json::array();
      for (int i = 0; i < kJointCount; ++i) {
        const JointPoint & pt = p.joints[static_cast<std::size_t>(i)];
        joints.push_back(
        {
          {"name", joint_name(static_cast<Joint>(i))},
          {"x", pt.x}, {"y", pt.y}, {"q", pt.q}, {"visible", pt.visible},
        });
      }
      persons.push_back({{"joints", std::move(joints)}});
    }
    jf["persons"] = std::move(persons);
    jf["focus_rle"] = f.focus.mask.runs();
    frames.push_back(std::move(jf));
  }
  doc["frames"] = std::move(frames);
  return doc;
}

std::string serialize_sequence(const MeasurementSequence & sequence)
{
  return sequence_to_json(sequence).dump();
}

void write_sequence(const MeasurementSequence & sequence, const std::filesystem::path & path)
{
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot write " + path.string());
  }
  out << serialize_sequence(sequence) << '\n';
}

}  // namespace cine
