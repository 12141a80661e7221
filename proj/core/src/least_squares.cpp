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

#include "spinbath/least_squares.hpp"

#include <algorithm>
#include <cmath>

namespace spinbath {

namespace {

Eigen::VectorXd project(Eigen::VectorXd p, const LeastSquaresOptions& o) {
  if (o.lower.size() == p.size()) p = p.cwiseMax(o.lower);
  if (o.upper.size() == p.size()) p = p.cwiseMin(o.upper);
  return p;
}

}  // namespace

Eigen::MatrixXd numeric_jacobian(const ResidualFn& residual, const Eigen::VectorXd& params) {
  const Eigen::VectorXd r0 = residual(params);
  Eigen::MatrixXd jac(r0.size(), params.size());
  for (Eigen::Index k = 0; k < params.size(); ++k) {
    const double h = 1e-6 * std::max(std::abs(params[k]), 1e-8);
    Eigen::VectorXd plus = params;
    Eigen::VectorXd minus = params;
    plus[k] += h;
    minus[k] -= h;
    jac.col(k) = (residual(plus) - residual(minus)) / (2.0 * h);
  }
  return jac;
}

LeastSquaresResult levenberg_marquardt(const ResidualFn& residual, Eigen::VectorXd initial,
                                       const LeastSquaresOptions& options,
                                       const JacobianFn& jacobian) {
  auto jac_of = [&](const Eigen::VectorXd& p) {
    return jacobian ? jacobian(p) : numeric_jacobian(residual, p);
  };
  LeastSquaresResult result;
  Eigen::VectorXd p = project(std::move(initial), options);
  Eigen::VectorXd r = residual(p);
  double cost = 0.5 * r.squaredNorm();
  double lambda = options.initial_damping;
  const Eigen::Index n = p.size();

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    result.iterations = iter + 1;
    const Eigen::MatrixXd J = jac_of(p);
    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;
    if (g.lpNorm<Eigen::Infinity>() <= 1e-300) {
      result.converged = true;
      break;
    }
    bool improved = false;
    for (int attempt = 0; attempt < 40; ++attempt) {
      Eigen::MatrixXd A = JtJ;
      for (Eigen::Index k = 0; k < n; ++k) A(k, k) += lambda * std::max(JtJ(k, k), 1e-300);
      const Eigen::VectorXd step = A.ldlt().solve(-g);
      if (!step.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      const Eigen::VectorXd trial = project(p + step, options);
      const Eigen::VectorXd r_trial = residual(trial);
      const double trial_cost = r_trial.allFinite() ? 0.5 * r_trial.squaredNorm() : INFINITY;
      if (trial_cost <= cost) {
        const double rel_drop = (cost - trial_cost) / std::max(cost, 1e-300);
        const double rel_step = (trial - p).norm() / std::max(p.norm(), 1e-300);
        p = trial;
        r = r_trial;
        cost = trial_cost;
        lambda = std::max(lambda / 10.0, 1e-15);
        improved = true;
        if (rel_drop < options.tolerance || rel_step < options.tolerance || cost == 0.0) {
          result.converged = true;
        }
        break;
      }
      lambda *= 10.0;
    }
    if (!improved) {
      // No descent direction left: p is a local minimum to working precision.
      result.converged = true;
      break;
    }
    if (result.converged) break;
  }

  result.params = p;
  result.residuals = r;
  result.cost = cost;
  const Eigen::MatrixXd J = jac_of(p);
  const Eigen::MatrixXd JtJ = J.transpose() * J;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(JtJ);
  if (lu.isInvertible()) {
    const double dof = std::max<double>(static_cast<double>(r.size() - n), 1.0);
    result.covariance = lu.inverse() * (2.0 * cost / dof);
  }
  return result;
}

}  // namespace spinbath
