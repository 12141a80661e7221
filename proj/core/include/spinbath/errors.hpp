/* Copyright 2026 The spinbath Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <stdexcept>
#include <string>

namespace spinbath {

// Exception hierarchy. The CLI maps these onto exit codes
// (usage 2, data 3, numerical 4).

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DegenerateConfiguration : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a nonlinear fit or distribution fit cannot converge.
class FitFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class QuadratureError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IntegrationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// No revival maxima could be located in a modulated trace.
class EnvelopeFailure : public DataError {
 public:
  using DataError::DataError;
};

/// Emits a warning line on stderr. Replaceable for tests.
void warn(const std::string& message);

using WarningSink = void (*)(const std::string&);
WarningSink set_warning_sink(WarningSink sink);

}  // namespace spinbath
