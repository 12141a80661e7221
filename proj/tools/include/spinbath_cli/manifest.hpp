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

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace spinbath::cli {

std::string sha256_hex(const std::string& bytes);

/// Writes `content` to `path` (creating parent directories) and returns its
/// SHA-256. Throws DataError naming the path on failure.
std::string write_file(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

struct OutputRecord {
  std::string path;  // relative to the output directory
  std::string sha256;
  std::size_t bytes = 0;
};

/// Run provenance: command line, resolved config and output checksums.
/// `created_utc` is the only field that differs between identical reruns.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  std::string config_ini;
  nlohmann::json config;
  std::string created_utc;
  std::vector<OutputRecord> outputs;

  /// Writes the file under `dir` and records it.
  void emit(const std::filesystem::path& dir, const std::string& relative, const std::string& content);
  nlohmann::json to_json() const;
  /// Writes manifest.json under `dir`.
  void write(const std::filesystem::path& dir) const;
};

std::string utc_timestamp();
std::string code_version();

}  // namespace spinbath::cli
