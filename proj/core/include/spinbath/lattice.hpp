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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spinbath/vector3.hpp"

namespace spinbath {

/// The four normalized [111]-family directions of the diamond lattice.
const std::array<Vector3, 4>& crystal_axes();

/// Converts a defect concentration in ppm (relative to carbon sites) to a
/// number density in spins per nm^3. Throws InvalidArgument for c < 0.
double ppm_to_number_density(double ppm);

/// A single substitutional nitrogen (P1) centre.
struct BathSpin {
  Vector3 position;          // nm, NV at origin
  int nuclear_projection = 0;  // m_I of 14N, {-1, 0, +1}
  int jahn_teller_axis = 0;    // index into crystal_axes()
  double electron_projection = 0.5;  // s, {-1/2, +1/2}

  const Vector3& jt_axis() const { return crystal_axes()[static_cast<std::size_t>(jahn_teller_axis)]; }
  bool operator==(const BathSpin&) const = default;
};

enum class PlacementMode {
  /// Distinct carbon lattice sites, each occupied with probability c * 1e-6.
  Lattice,
  /// Uniform positions with a nearest-neighbour-distance hard core.
  Continuum,
};

std::string to_string(PlacementMode mode);
PlacementMode placement_from_string(const std::string& name);

struct BathConfiguration {
  std::vector<BathSpin> spins;
  double concentration_ppm = 0.0;
  double box_half_width_nm = 0.0;
  int quantization_axis_index = 0;
  std::uint64_t seed = 0;

  const Vector3& quantization_axis() const {
    return crystal_axes()[static_cast<std::size_t>(quantization_axis_index)];
  }
  std::size_t size() const { return spins.size(); }
  bool operator==(const BathConfiguration&) const = default;
};

struct BathOptions {
  PlacementMode placement = PlacementMode::Lattice;
  int quantization_axis_index = 0;
};

/// Number of spins expected in a cube of half-width `half_width_nm`.
double expected_spin_count(double ppm, double half_width_nm);

/// Half-width giving `target_count` expected spins at concentration `ppm`.
double half_width_for_count(double ppm, double target_count);

/// Draws one random bath around an NV at the origin. Pure function of its
/// arguments. Throws InvalidArgument for c <= 0 and DegenerateConfiguration if
/// the box is too small to hold a single expected spin.
BathConfiguration generate_bath(double ppm, double box_half_width_nm, std::uint64_t seed,
                                const BathOptions& options = {});

nlohmann::json to_json(const BathConfiguration& config);
BathConfiguration bath_from_json(const nlohmann::json& j);

}  // namespace spinbath
