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

#include <numbers>

namespace spinbath {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// CODATA 2018 values plus diamond lattice data. All derived quantities are
/// computed, never typed in, so they stay consistent with the inputs.
struct PhysicalConstants {
  /// Electron gyromagnetic ratio, rad s^-1 T^-1.
  static constexpr double gamma_e = 1.76085963023e11;
  /// Reduced Planck constant, J s.
  static constexpr double hbar = 1.054571817e-34;
  /// mu0 / 4pi, T m / A.
  static constexpr double mu0_over_4pi = 1.00000000055e-7;
  /// Diamond conventional cubic lattice constant, nm.
  static constexpr double lattice_constant_nm = 0.3567;
  static constexpr int atoms_per_cell = 8;
  /// Carbon-carbon nearest-neighbour distance, sqrt(3)/4 a, nm.
  static constexpr double nearest_neighbor_nm = 0.4330127018922193 * lattice_constant_nm;

  /// Electron-electron dipolar prefactor (mu0/4pi) gamma_e^2 hbar in rad s^-1 nm^3.
  static constexpr double dipolar_prefactor = mu0_over_4pi * gamma_e * gamma_e * hbar * 1e27;

  /// Carbon atoms per nm^3.
  static constexpr double diamond_atomic_density =
      atoms_per_cell / (lattice_constant_nm * lattice_constant_nm * lattice_constant_nm);

  /// Spins per nm^3 for a concentration of one ppm.
  static constexpr double ppm_to_density = diamond_atomic_density * 1e-6;
};

static_assert(PhysicalConstants::dipolar_prefactor > 0.0);
static_assert(PhysicalConstants::diamond_atomic_density >= 176.0 &&
              PhysicalConstants::diamond_atomic_density <= 176.5);

}  // namespace spinbath
