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

#include <functional>

#include <Eigen/Dense>

namespace spinbath {

struct LeastSquaresOptions {
  int max_iterations = 500;
  /// Relative cost / step tolerance for convergence.
  double tolerance = 1e-14;
  double initial_damping = 1e-3;
  /// Box constraints; empty means unbounded.
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

struct LeastSquaresResult {
  Eigen::VectorXd params;
  /// (J^T J)^-1 scaled by the residual variance; zero-sized when singular.
  Eigen::MatrixXd covariance;
  Eigen::VectorXd residuals;
  double cost = 0.0;  // 0.5 * |r|^2
  int iterations = 0;
  bool converged = false;
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using JacobianFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

/// Levenberg-Marquardt with Marquardt diagonal scaling and projection onto
/// the box constraints. The Jacobian falls back to central differences when
/// `jacobian` is empty.
LeastSquaresResult levenberg_marquardt(const ResidualFn& residual, Eigen::VectorXd initial,
                                       const LeastSquaresOptions& options = {},
                                       const JacobianFn& jacobian = {});

Eigen::MatrixXd numeric_jacobian(const ResidualFn& residual, const Eigen::VectorXd& params);

}  // namespace spinbath
