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

#include "spinbath/lattice.hpp"

#include <cmath>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "spinbath/constants.hpp"
#include "spinbath/errors.hpp"
#include "spinbath/rng.hpp"

namespace spinbath {

namespace {

constexpr double kInvSqrt3 = 0.57735026918962576451;

// Fractional coordinates of the 8 atoms in the conventional diamond cell.
constexpr std::array<std::array<double, 3>, 8> kBasis{{
    {0.0, 0.0, 0.0},
    {0.0, 0.5, 0.5},
    {0.5, 0.0, 0.5},
    {0.5, 0.5, 0.0},
    {0.25, 0.25, 0.25},
    {0.25, 0.75, 0.75},
    {0.75, 0.25, 0.75},
    {0.75, 0.75, 0.25},
}};

// Enumerates lattice sites inside [-h, h]^3 without materializing them.
class SiteIndex {
 public:
  explicit SiteIndex(double half_width) {
    const double a = PhysicalConstants::lattice_constant_nm;
    std::uint64_t offset = 0;
    for (std::size_t b = 0; b < kBasis.size(); ++b) {
      std::uint64_t count = 1;
      for (int d = 0; d < 3; ++d) {
        const auto lo = static_cast<std::int64_t>(std::ceil(-half_width / a - kBasis[b][d]));
        const auto hi = static_cast<std::int64_t>(std::floor(half_width / a - kBasis[b][d]));
        lo_[b][d] = lo;
        extent_[b][d] = hi >= lo ? static_cast<std::uint64_t>(hi - lo + 1) : 0;
        count *= extent_[b][d];
      }
      start_[b] = offset;
      offset += count;
    }
    total_ = offset;
  }

  std::uint64_t total() const { return total_; }

  Vector3 position(std::uint64_t index) const {
    std::size_t b = kBasis.size() - 1;
    while (start_[b] > index) --b;
    std::uint64_t local = index - start_[b];
    std::array<std::int64_t, 3> cell{};
    for (int d = 2; d >= 0; --d) {
      cell[d] = lo_[b][d] + static_cast<std::int64_t>(local % extent_[b][d]);
      local /= extent_[b][d];
    }
    const double a = PhysicalConstants::lattice_constant_nm;
    return {(static_cast<double>(cell[0]) + kBasis[b][0]) * a,
            (static_cast<double>(cell[1]) + kBasis[b][1]) * a,
            (static_cast<double>(cell[2]) + kBasis[b][2]) * a};
  }

 private:
  std::array<std::array<std::int64_t, 3>, 8> lo_{};
  std::array<std::array<std::uint64_t, 3>, 8> extent_{};
  std::array<std::uint64_t, 8> start_{};
  std::uint64_t total_ = 0;
};

// Spatial hash for the continuum hard-core check.
class CellGrid {
 public:
  explicit CellGrid(double cell) : cell_(cell) {}

  bool too_close(const Vector3& p, double r_min) const {
    const auto key = cell_of(p);
    for (int dx = -1; dx <= 1; ++dx) {
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dz = -1; dz <= 1; ++dz) {
          auto it = cells_.find(pack(key[0] + dx, key[1] + dy, key[2] + dz));
          if (it == cells_.end()) continue;
          for (const auto& q : it->second) {
            if ((p - q).norm2() < r_min * r_min) return true;
          }
        }
      }
    }
    return false;
  }

  void insert(const Vector3& p) {
    const auto key = cell_of(p);
    cells_[pack(key[0], key[1], key[2])].push_back(p);
  }

 private:
  std::array<std::int64_t, 3> cell_of(const Vector3& p) const {
    return {static_cast<std::int64_t>(std::floor(p.x / cell_)),
            static_cast<std::int64_t>(std::floor(p.y / cell_)),
            static_cast<std::int64_t>(std::floor(p.z / cell_))};
  }
  static std::uint64_t pack(std::int64_t i, std::int64_t j, std::int64_t k) {
    constexpr std::int64_t kBias = 1 << 20;
    return (static_cast<std::uint64_t>(i + kBias) << 42) |
           (static_cast<std::uint64_t>(j + kBias) << 21) | static_cast<std::uint64_t>(k + kBias);
  }

  double cell_;
  std::unordered_map<std::uint64_t, std::vector<Vector3>> cells_;
};

BathSpin random_internal_state(Rng& rng, const Vector3& position) {
  BathSpin spin;
  spin.position = position;
  spin.nuclear_projection = static_cast<int>(rng.below(3)) - 1;
  spin.jahn_teller_axis = static_cast<int>(rng.below(4));
  spin.electron_projection = rng.below(2) == 0 ? -0.5 : 0.5;
  return spin;
}

std::vector<Vector3> lattice_positions(double ppm, double half_width, const Vector3& axis,
                                       Rng& rng) {
  const SiteIndex sites(half_width);
  // The NV occupies the origin (N) and its neighbouring vacancy along the axis.
  const Vector3 vacancy = axis * PhysicalConstants::nearest_neighbor_nm;
  auto reserved = [&](const Vector3& p) {
    return p.norm2() < 1e-12 || (p - vacancy).norm2() < 1e-12;
  };
  const std::uint64_t available = sites.total() >= 2 ? sites.total() - 2 : 0;
  std::binomial_distribution<std::int64_t> occupancy(static_cast<std::int64_t>(available),
                                                     ppm * 1e-6);
  const auto count = static_cast<std::size_t>(occupancy(rng.engine()));

  std::vector<Vector3> positions;
  positions.reserve(count);
  std::unordered_set<std::uint64_t> taken;
  taken.reserve(count * 2);
  while (positions.size() < count) {
    const std::uint64_t index = rng.below(sites.total());
    if (taken.contains(index)) continue;
    const Vector3 p = sites.position(index);
    if (reserved(p)) continue;
    taken.insert(index);
    positions.push_back(p);
  }
  return positions;
}

std::vector<Vector3> continuum_positions(double ppm, double half_width, Rng& rng) {
  const double r_min = PhysicalConstants::nearest_neighbor_nm;
  std::poisson_distribution<std::int64_t> poisson(expected_spin_count(ppm, half_width));
  const auto count = static_cast<std::size_t>(poisson(rng.engine()));
  std::vector<Vector3> positions;
  positions.reserve(count);
  CellGrid grid(r_min);
  grid.insert({0.0, 0.0, 0.0});
  while (positions.size() < count) {
    const Vector3 p{rng.uniform(-half_width, half_width), rng.uniform(-half_width, half_width),
                    rng.uniform(-half_width, half_width)};
    if (grid.too_close(p, r_min)) continue;
    grid.insert(p);
    positions.push_back(p);
  }
  return positions;
}

}  // namespace

const std::array<Vector3, 4>& crystal_axes() {
  static const std::array<Vector3, 4> axes{{
      {kInvSqrt3, kInvSqrt3, kInvSqrt3},
      {kInvSqrt3, -kInvSqrt3, -kInvSqrt3},
      {-kInvSqrt3, kInvSqrt3, -kInvSqrt3},
      {-kInvSqrt3, -kInvSqrt3, kInvSqrt3},
  }};
  return axes;
}

double ppm_to_number_density(double ppm) {
  if (!(ppm >= 0.0) || !std::isfinite(ppm)) {
    throw InvalidArgument("concentration must be a finite nonnegative ppm value");
  }
  return ppm * PhysicalConstants::ppm_to_density;
}

std::string to_string(PlacementMode mode) {
  return mode == PlacementMode::Lattice ? "lattice" : "continuum";
}

PlacementMode placement_from_string(const std::string& name) {
  if (name == "lattice") return PlacementMode::Lattice;
  if (name == "continuum") return PlacementMode::Continuum;
  throw InvalidArgument("unknown placement mode '" + name + "'");
}

double expected_spin_count(double ppm, double half_width_nm) {
  const double side = 2.0 * half_width_nm;
  return ppm_to_number_density(ppm) * side * side * side;
}

double half_width_for_count(double ppm, double target_count) {
  if (!(ppm > 0.0) || !(target_count > 0.0)) {
    throw InvalidArgument("half_width_for_count needs positive concentration and count");
  }
  return 0.5 * std::cbrt(target_count / ppm_to_number_density(ppm));
}

BathConfiguration generate_bath(double ppm, double box_half_width_nm, std::uint64_t seed,
                                const BathOptions& options) {
  if (!(ppm > 0.0) || !std::isfinite(ppm)) {
    throw InvalidArgument("generate_bath: concentration must be positive");
  }
  if (!(ppm <= 1e6)) throw InvalidArgument("generate_bath: concentration above 10^6 ppm");
  if (options.quantization_axis_index < 0 || options.quantization_axis_index > 3) {
    throw InvalidArgument("generate_bath: quantization axis index must be in [0, 3]");
  }
  const double expected = expected_spin_count(ppm, box_half_width_nm);
  if (!(box_half_width_nm >= PhysicalConstants::lattice_constant_nm) || expected < 1.0) {
    throw DegenerateConfiguration("generate_bath: box half-width " +
                                  std::to_string(box_half_width_nm) +
                                  " nm holds fewer than one expected spin");
  }
  if (expected < 10.0) {
    warn("generate_bath: only " + std::to_string(expected) + " spins expected in the box");
  }

  BathConfiguration config;
  config.concentration_ppm = ppm;
  config.box_half_width_nm = box_half_width_nm;
  config.quantization_axis_index = options.quantization_axis_index;
  config.seed = seed;

  Rng rng(seed);
  const auto positions =
      options.placement == PlacementMode::Lattice
          ? lattice_positions(ppm, box_half_width_nm, config.quantization_axis(), rng)
          : continuum_positions(ppm, box_half_width_nm, rng);
  config.spins.reserve(positions.size());
  for (const auto& p : positions) config.spins.push_back(random_internal_state(rng, p));
  return config;
}

nlohmann::json to_json(const BathConfiguration& config) {
  nlohmann::json spins = nlohmann::json::array();
  for (const auto& s : config.spins) {
    spins.push_back({{"x", s.position.x},
                     {"y", s.position.y},
                     {"z", s.position.z},
                     {"m_i", s.nuclear_projection},
                     {"jt_axis_index", s.jahn_teller_axis},
                     {"s", s.electron_projection}});
  }
  const auto& q = config.quantization_axis();
  return {{"seed", config.seed},
          {"concentration_ppm", config.concentration_ppm},
          {"box_half_width_nm", config.box_half_width_nm},
          {"quantization_axis", {q.x, q.y, q.z}},
          {"spins", std::move(spins)}};
}

BathConfiguration bath_from_json(const nlohmann::json& j) {
  try {
    BathConfiguration config;
    config.seed = j.at("seed").get<std::uint64_t>();
    config.concentration_ppm = j.at("concentration_ppm").get<double>();
    config.box_half_width_nm = j.at("box_half_width_nm").get<double>();
    const auto& q = j.at("quantization_axis");
    const Vector3 axis{q.at(0).get<double>(), q.at(1).get<double>(), q.at(2).get<double>()};
    config.quantization_axis_index = -1;
    for (int k = 0; k < 4; ++k) {
      if ((crystal_axes()[static_cast<std::size_t>(k)] - axis).norm() < 1e-9) {
        config.quantization_axis_index = k;
      }
    }
    if (config.quantization_axis_index < 0) {
      throw DataError("quantization_axis is not a [111] crystal axis");
    }
    for (const auto& s : j.at("spins")) {
      BathSpin spin;
      spin.position = {s.at("x").get<double>(), s.at("y").get<double>(), s.at("z").get<double>()};
      spin.nuclear_projection = s.at("m_i").get<int>();
      spin.jahn_teller_axis = s.at("jt_axis_index").get<int>();
      spin.electron_projection = s.at("s").get<double>();
      if (spin.nuclear_projection < -1 || spin.nuclear_projection > 1 ||
          spin.jahn_teller_axis < 0 || spin.jahn_teller_axis > 3 ||
          std::abs(std::abs(spin.electron_projection) - 0.5) > 0.0 || !spin.position.finite()) {
        throw DataError("invalid bath spin entry");
      }
      config.spins.push_back(spin);
    }
    return config;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed bath configuration JSON: ") + e.what());
  }
}

}  // namespace spinbath
