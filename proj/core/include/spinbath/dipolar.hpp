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

#include <cstddef>
#include <string>
#include <vector>

#include "spinbath/lattice.hpp"
#include "spinbath/vector3.hpp"

namespace spinbath {

/// Angular form of the secular coefficients.
enum class DipolarConvention {
  /// c_par = J0/r^3 (1 - 2cos^2), c_perp = J0/(2r^3) (1 - sin^2/4). Default.
  Reference,
  /// Textbook secular form: c_par = J0/r^3 (1 - 3cos^2), c_perp = -c_par/4.
  Textbook,
};

std::string to_string(DipolarConvention convention);
DipolarConvention convention_from_string(const std::string& name);

/// Secular dipolar coefficients of one pair, in rad/s.
struct PairCoupling {
  double c_parallel = 0.0;
  double c_perp = 0.0;
};

/// Coefficients for separation `r` (nm) with the polar angle measured from
/// `axis`. Throws InvalidArgument on zero separation.
PairCoupling coupling_coefficients(const Vector3& r, const Vector3& axis,
                                   DipolarConvention convention = DipolarConvention::Reference);

struct NvCouplingSummary {
  double delta_single = 0.0;               // rad/s
  std::vector<double> per_spin_couplings;  // c_par(NV -> spin i), rad/s
};

/// Delta_single = sqrt(sum_i (c_par_i / 2)^2). Flip-flop terms with the NV are
/// dropped (the zero-field splitting makes them non-secular).
NvCouplingSummary nv_bath_coupling(const BathConfiguration& config,
                                   DipolarConvention convention = DipolarConvention::Reference);

/// Mean |c_par| over bath pairs. Exhaustive when `pair_sample_size` covers
/// every pair, otherwise a uniform sample seeded from config.seed.
double mean_abs_coupling(const BathConfiguration& config, std::size_t pair_sample_size,
                         DipolarConvention convention = DipolarConvention::Reference);

/// Packed upper-triangular table of bath-bath couplings. Shared by the
/// pairwise kernels so each 1/r^3 is evaluated once per configuration.
class CouplingTable {
 public:
  CouplingTable(const BathConfiguration& config, DipolarConvention convention);

  std::size_t spin_count() const { return n_; }
  std::size_t pair_count() const { return n_ * (n_ - 1) / 2; }
  /// Linear index of pair (i, j) with i < j.
  std::size_t index(std::size_t i, std::size_t j) const {
    return i * (2 * n_ - i - 1) / 2 + (j - i - 1);
  }
  const PairCoupling& at(std::size_t i, std::size_t j) const {
    return i < j ? pairs_[index(i, j)] : pairs_[index(j, i)];
  }
  const std::vector<PairCoupling>& pairs() const { return pairs_; }

 private:
  std::size_t n_ = 0;
  std::vector<PairCoupling> pairs_;
};

}  // namespace spinbath
