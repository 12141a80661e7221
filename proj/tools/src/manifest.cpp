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

#include "spinbath_cli/manifest.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "spinbath/errors.hpp"

#ifndef SPINBATH_VERSION
#define SPINBATH_VERSION "0.0.0"
#endif

namespace spinbath::cli {

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw DataError("sha256: digest failed");
  }
  std::string hex;
  hex.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    char byte[3];
    std::snprintf(byte, sizeof byte, "%02x", digest[i]);
    hex += byte;
  }
  return hex;
}

std::string write_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw DataError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out << content;
  out.close();
  if (!out) throw DataError("write failed for " + path.string());
  return sha256_hex(content);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void RunManifest::emit(const std::filesystem::path& dir, const std::string& relative,
                       const std::string& content) {
  const auto digest = write_file(dir / relative, content);
  outputs.push_back({relative, digest, content.size()});
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json files = nlohmann::json::array();
  for (const auto& o : outputs) files.push_back({{"path", o.path}, {"sha256", o.sha256}, {"bytes", o.bytes}});
  return {{"tool", "spinbath"},
          {"version", code_version()},
          {"command", command},
          {"argv", argv},
          {"config", config},
          {"config_ini", config_ini},
          {"created_utc", created_utc},
          {"outputs", files}};
}

void RunManifest::write(const std::filesystem::path& dir) const {
  write_file(dir / (command + ".manifest.json"), to_json().dump(2) + "\n");
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  char text[32];
  std::strftime(text, sizeof text, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return text;
}

std::string code_version() { return SPINBATH_VERSION; }

}  // namespace spinbath::cli
