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

#include "spinbath/dipolar.hpp"

#include <cmath>

#include "spinbath/constants.hpp"
#include "spinbath/errors.hpp"
#include "spinbath/parallel.hpp"
#include "spinbath/rng.hpp"

namespace spinbath {

namespace {

constexpr std::uint64_t kPairSampleStream = 0x7061697273ULL;

}  // namespace

std::string to_string(DipolarConvention convention) {
  return convention == DipolarConvention::Reference ? "reference" : "textbook";
}

DipolarConvention convention_from_string(const std::string& name) {
  if (name == "reference") return DipolarConvention::Reference;
  if (name == "textbook") return DipolarConvention::Textbook;
  throw InvalidArgument("unknown dipolar convention '" + name + "'");
}

PairCoupling coupling_coefficients(const Vector3& r, const Vector3& axis,
                                   DipolarConvention convention) {
  const double r2 = r.norm2();
  if (!(r2 > 0.0)) throw InvalidArgument("coupling_coefficients: zero separation");
  const double r_norm = std::sqrt(r2);
  const double scale = PhysicalConstants::dipolar_prefactor / (r2 * r_norm);
  const double cos_theta = r.dot(axis) / r_norm;
  const double cos2 = cos_theta * cos_theta;
  if (convention == DipolarConvention::Textbook) {
    const double c_par = scale * (1.0 - 3.0 * cos2);
    return {c_par, -0.25 * c_par};
  }
  const double sin2 = 1.0 - cos2;
  return {scale * (1.0 - 2.0 * cos2), 0.5 * scale * (1.0 - 0.25 * sin2)};
}

NvCouplingSummary nv_bath_coupling(const BathConfiguration& config,
                                   DipolarConvention convention) {
  NvCouplingSummary summary;
  summary.per_spin_couplings.reserve(config.size());
  CompensatedSum sum;
  for (const auto& spin : config.spins) {
    const double c = coupling_coefficients(spin.position, config.quantization_axis(), convention)
                         .c_parallel;
    summary.per_spin_couplings.push_back(c);
    sum += 0.25 * c * c;
  }
  summary.delta_single = std::sqrt(sum.value());
  return summary;
}

double mean_abs_coupling(const BathConfiguration& config, std::size_t pair_sample_size,
                         DipolarConvention convention) {
  const std::size_t n = config.size();
  if (n < 2) throw InvalidArgument("mean_abs_coupling: need at least two bath spins");
  if (pair_sample_size == 0) throw InvalidArgument("mean_abs_coupling: empty pair sample");
  const std::size_t total = n * (n - 1) / 2;
  const auto& axis = config.quantization_axis();
  auto pair_value = [&](std::size_t i, std::size_t j) {
    return std::abs(coupling_coefficients(config.spins[i].position - config.spins[j].position,
                                          axis, convention)
                        .c_parallel);
  };
  CompensatedSum sum;
  if (pair_sample_size >= total) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) sum += pair_value(i, j);
    }
    return sum.value() / static_cast<double>(total);
  }
  Rng rng(derive_seed(config.seed, 0, kPairSampleStream));
  for (std::size_t k = 0; k < pair_sample_size; ++k) {
    const auto i = static_cast<std::size_t>(rng.below(n));
    auto j = static_cast<std::size_t>(rng.below(n - 1));
    if (j >= i) ++j;
    sum += pair_value(i, j);
  }
  return sum.value() / static_cast<double>(pair_sample_size);
}

CouplingTable::CouplingTable(const BathConfiguration& config, DipolarConvention convention)
    : n_(config.size()) {
  pairs_.resize(n_ > 1 ? pair_count() : 0);
  const auto& axis = config.quantization_axis();
  std::size_t k = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      pairs_[k++] = coupling_coefficients(config.spins[i].position - config.spins[j].position,
                                          axis, convention);
    }
  }
}

}  // namespace spinbath
