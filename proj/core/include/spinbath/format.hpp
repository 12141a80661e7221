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

#include <string>
#include <string_view>
#include <vector>

namespace spinbath {

/// Shortest decimal text that round-trips to the same double ("inf"/"nan" for
/// non-finite values).
std::string format_double(double value);

/// Parses a CSV field as double; throws DataError with `context` on failure.
double parse_double(std::string_view field, std::string_view context);

/// Splits one CSV line on commas (no quoting; fields are trimmed).
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace spinbath
