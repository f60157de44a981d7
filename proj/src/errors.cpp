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

#include "cine/errors.hpp"

namespace cine
{

namespace
{

std::string format_validation(
  const std::string & field, std::optional<int> frame, const std::string & what)
{
  std::string msg;
  if (frame) {
    msg += "frame " + std::to_string(*frame) + ": ";
  }
  msg += "field '" + field + "': " + what;
  return msg;
}

}  // namespace

ValidationError::ValidationError(
  std::string field, std::optional<int> frame, const std::string & what)
: Error(format_validation(field, frame, what)), field_(std::move(field)), frame_(frame)
{
}

}  // namespace cine
