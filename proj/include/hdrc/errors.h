// Copyright 2026 The hdrc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HDRC_ERRORS_H_
#define HDRC_ERRORS_H_

#include <stdexcept>
#include <string>

namespace hdrc {

// All library failures derive from Error. The CLI maps the data-side kinds
// to exit code 2 and ModelError to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed container or file header (bad magic, unsupported version, ...).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Payload damage: truncated scanlines, length mismatches, undecodable streams.
class CorruptionError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

// Argument outside its documented domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// Checkpoint/model problems: version mismatch, model id mismatch, corrupt
// checkpoint.
class ModelError : public Error {
 public:
  using Error::Error;
};

// Non-finite loss or similar optimization failure.
class TrainingFault : public Error {
 public:
  using Error::Error;
};

}  // namespace hdrc

#endif  // HDRC_ERRORS_H_
