// Copyright 2026 The zzforge Authors
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

namespace zzforge {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input/precondition failures. The CLI maps these to exit code 1.
struct NonHermitian : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct Unsupported : Error { using Error::Error; };
struct WrongTopology : Error { using Error::Error; };
struct NearResonance : Error { using Error::Error; };
struct AmbiguousLabel : Error { using Error::Error; };
struct NoRoot : Error { using Error::Error; };
struct OutOfRange : Error { using Error::Error; };
struct ConstraintViolated : Error { using Error::Error; };
struct SingularChi : Error { using Error::Error; };
struct NotBlockDiagonal : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };

// Numerical failures. The CLI maps these to exit code 2.
struct NotConverged : Error { using Error::Error; };
struct FitFailed : Error { using Error::Error; };

}  // namespace zzforge
