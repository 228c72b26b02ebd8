// Copyright 2026 The pathtomo Authors
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

#ifndef PATHTOMO_ERRORS_HPP
#define PATHTOMO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pathtomo {

/// Base class for all pathtomo errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define PATHTOMO_DEFINE_ERROR(Name)      \
  class Name : public Error {            \
   public:                               \
    using Error::Error;                  \
  }

PATHTOMO_DEFINE_ERROR(NonUnitaryInput);
PATHTOMO_DEFINE_ERROR(IndexOutOfRange);
PATHTOMO_DEFINE_ERROR(UnknownMode);
PATHTOMO_DEFINE_ERROR(DuplicateAncilla);
PATHTOMO_DEFINE_ERROR(UnknownLabel);
PATHTOMO_DEFINE_ERROR(DivisionByZeroSingles);
PATHTOMO_DEFINE_ERROR(SingularTransferMatrix);
PATHTOMO_DEFINE_ERROR(InsufficientDesign);
PATHTOMO_DEFINE_ERROR(OutOfRange);
PATHTOMO_DEFINE_ERROR(CalibrationRange);
PATHTOMO_DEFINE_ERROR(MissingPhaseBin);
PATHTOMO_DEFINE_ERROR(ParseError);
// Internal-consistency failures (e.g. a rate that came out significantly
// negative); these indicate a bug rather than bad user input.
PATHTOMO_DEFINE_ERROR(InternalError);

#undef PATHTOMO_DEFINE_ERROR

}  // namespace pathtomo

#endif
