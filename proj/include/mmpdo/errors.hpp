// Copyright 2026 The mmpdo Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace mmpdo {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller passed arguments that are inconsistent (bad index, dims mismatch).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// An input violated a documented precondition on its numerical content,
/// e.g. a matrix that should be Hermitian is not.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Eigensolver failure or a result that is numerically unusable.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// The request exceeds a dense-size or window cap.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Rounding at the requested bit count cannot produce a valid state.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

class InvalidChannelError : public Error {
 public:
  InvalidChannelError(const std::string& what, double cp_defect, double tp_defect)
      : Error(what), cp_defect_(cp_defect), tp_defect_(tp_defect) {}

  double cp_defect() const { return cp_defect_; }
  double tp_defect() const { return tp_defect_; }

 private:
  double cp_defect_;
  double tp_defect_;
};

/// Malformed document. The message always names the offending line or field.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace mmpdo
