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

#ifndef CINE__MEASUREMENT_IO_HPP_
#define CINE__MEASUREMENT_IO_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "cine/measurements.hpp"

namespace cine
{

struct ParseOptions
{
  /// Unknown fields are errors when set, warnings otherwise.
  bool strict = false;
};

struct ParsedSequence
{
  MeasurementSequence sequence;
  std::vector<std::string> warnings;
};

ParsedSequence parse_sequence(const nlohmann::json & doc, const ParseOptions & options = {});
ParsedSequence parse_sequence_text(const std::string & text, const ParseOptions & options = {});
ParsedSequence parse_sequence(const std::filesystem::path & path, const ParseOptions & options = {});

nlohmann::json sequence_to_json(const MeasurementSequence & sequence);
/// Compact, key-sorted JSON text.
std::string serialize_sequence(const MeasurementSequence & sequence);
void write_sequence(const MeasurementSequence & sequence, const std::filesystem::path & path);

}  // namespace cine

#endif  // CINE__MEASUREMENT_IO_HPP_
