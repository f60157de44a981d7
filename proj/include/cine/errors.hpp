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

#ifndef CINE__ERRORS_HPP_
#define CINE__ERRORS_HPP_

#include <optional>
#include <stdexcept>
#include <string>

namespace cine
{

/// Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Input data breaks the schema or a type invariant.
class ValidationError : public Error
{
public:
  ValidationError(std::string field, std::optional<int> frame, const std::string & what);

  const std::string & field() const noexcept {return field_;}
  std::optional<int> frame() const noexcept {return frame_;}

private:
  std::string field_;
  std::optional<int> frame_;
};

/// Invalid option values (bounds inverted, non-positive margins, ...).
class ConfigError : public Error
{
public:
  using Error::Error;
};

/// A numerical routine could not produce a solution.
class SolverError : public Error
{
public:
  using Error::Error;
};

/// No main subject can be identified in the sequence.
class NoSubjectError : public SolverError
{
public:
  using SolverError::SolverError;
};

}  // namespace cine

#endif  // CINE__ERRORS_HPP_
