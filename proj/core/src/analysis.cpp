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

#include "spinbath/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "spinbath/errors.hpp"
#include "spinbath/format.hpp"
#include "spinbath/least_squares.hpp"
#include "spinbath/rng.hpp"

namespace spinbath {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct StretchedModel {
  std::span<const double> t;
  std::span<const double> y;
  double t_scale;  // fit works in t / t_scale

  Eigen::VectorXd residual(const Eigen::VectorXd& q) const {
    Eigen::VectorXd r(static_cast<Eigen::Index>(t.size()));
    const double T = t_scale * std::exp(q[1]);
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double g = t[i] > 0.0 ? std::pow(t[i] / T, q[2]) : 0.0;
      r[static_cast<Eigen::Index>(i)] = q[0] * std::exp(-g) - y[i];
    }
    return r;
  }

  Eigen::MatrixXd jacobian(const Eigen::VectorXd& q) const {
    Eigen::MatrixXd J(static_cast<Eigen::Index>(t.size()), 3);
    const double T = t_scale * std::exp(q[1]);
    for (std::size_t i = 0; i < t.size(); ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      if (t[i] <= 0.0) {
        J.row(row) << 1.0, 0.0, 0.0;
        continue;
      }
      const double ls = std::log(t[i] / T);
      const double g = std::exp(q[2] * ls);
      const double e = std::exp(-g);
      J(row, 0) = e;
      J(row, 1) = q[0] * e * g * q[2];
      J(row, 2) = -q[0] * e * g * ls;
    }
    return J;
  }
};

double first_crossing(std::span<const double> t, std::span<const double> y, double level) {
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (y[i] < level) {
      const double f = (y[i - 1] - level) / (y[i - 1] - y[i]);
      return t[i - 1] + f * (t[i] - t[i - 1]);
    }
  }
  return -1.0;
}

double sigma_inverse_t(const SamplePoint& p) {
  return p.has_t_interval() ? 0.5 * (1.0 / p.t_ci_low - 1.0 / p.t_ci_high) : 0.0;
}

}  // namespace

double StretchedExpFit::operator()(double t) const {
  return c0 * std::exp(-std::pow(t / t_char, p));
}

StretchedExpFit fit_stretched_exp(const DecayCurve& curve, const StretchedExpOptions& options) {
  const DecayCurve view = curve.coherence_view();
  return fit_stretched_exp(view.times, view.values, options);
}

StretchedExpFit fit_stretched_exp(std::span<const double> times, std::span<const double> y,
                                  const StretchedExpOptions& options) {
  if (times.size() != y.size()) throw InvalidArgument("fit_stretched_exp: size mismatch");
  if (times.size() < 8) {
    throw InvalidArgument("fit_stretched_exp: need at least 8 points, got " +
                          std::to_string(times.size()));
  }
  validate_time_grid(times);
  for (double v : y) {
    if (!std::isfinite(v)) throw InvalidArgument("fit_stretched_exp: non-finite value");
  }
  const double c0_init = y[0];
  if (!(c0_init > 0.0)) throw InvalidArgument("fit_stretched_exp: first value must be positive");
  const double crossing = first_crossing(times, y, c0_init / std::numbers::e);
  if (!(crossing > 0.0)) {
    throw InvalidArgument("fit_stretched_exp: curve never drops below C0/e; range too short");
  }

  const StretchedModel model{times, y, crossing};
  LeastSquaresOptions lso;
  lso.lower = Eigen::Vector3d(1e-12, -30.0, 0.2);
  lso.upper = Eigen::Vector3d(1.5, 30.0, 6.0);
  auto residual = [&](const Eigen::VectorXd& q) { return model.residual(q); };
  auto jacobian = [&](const Eigen::VectorXd& q) { return model.jacobian(q); };

  Rng jitter(options.jitter_seed);
  std::optional<LeastSquaresResult> best;
  int attempts = 0;
  std::ostringstream diagnostics;
  for (int attempt = 0; attempt <= options.max_restarts; ++attempt) {
    Eigen::VectorXd init(3);
    init << std::min(c0_init, 1.5), 0.0, 1.0;
    if (attempt > 0) {
      init[0] *= jitter.uniform(0.8, 1.2);
      init[1] += jitter.uniform(-0.5, 0.5);
      init[2] = jitter.uniform(0.5, 3.0);
    }
    const auto fit = levenberg_marquardt(residual, init, lso, jacobian);
    attempts = attempt;
    diagnostics << " [attempt " << attempt << ": cost " << format_double(fit.cost)
                << ", iterations " << fit.iterations << "]";
    if (fit.converged && fit.params.allFinite() && (!best || fit.cost < best->cost)) best = fit;
    if (best) break;
  }
  if (!best) throw FitFailure("fit_stretched_exp: no restart converged;" + diagnostics.str());

  StretchedExpFit out;
  out.c0 = best->params[0];
  out.t_char = crossing * std::exp(best->params[1]);
  out.p = best->params[2];
  out.converged = true;
  out.restarts_used = attempts;
  out.n_points = times.size();
  out.residual_norm = std::sqrt(2.0 * best->cost);
  if (best->covariance.rows() == 3) {
    const Eigen::Vector3d d(1.0, out.t_char, 1.0);
    out.covariance = d.asDiagonal() * best->covariance * d.asDiagonal();
    out.c0_err = std::sqrt(std::max(out.covariance(0, 0), 0.0));
    out.t_char_err = std::sqrt(std::max(out.covariance(1, 1), 0.0));
    out.p_err = std::sqrt(std::max(out.covariance(2, 2), 0.0));
  }
  return out;
}

std::string to_string(Basis b) {
  return b == Basis::SingleQuantum ? "single_quantum" : "double_quantum";
}
std::string to_string(IsotopeClass c) {
  return c == IsotopeClass::C13Natural ? "c13_natural" : "c12_enriched";
}
std::string to_string(Measurement m) { return m == Measurement::T2 ? "t2" : "t2star"; }

Basis basis_from_string(const std::string& name) {
  if (name == "single_quantum") return Basis::SingleQuantum;
  if (name == "double_quantum") return Basis::DoubleQuantum;
  throw InvalidArgument("unknown basis '" + name + "'");
}

IsotopeClass isotope_class_from_string(const std::string& name) {
  if (name == "c13_natural") return IsotopeClass::C13Natural;
  if (name == "c12_enriched") return IsotopeClass::C12Enriched;
  throw InvalidArgument("unknown isotope class '" + name + "'");
}

Measurement measurement_from_string(const std::string& name) {
  if (name == "t2") return Measurement::T2;
  if (name == "t2star") return Measurement::T2Star;
  throw InvalidArgument("unknown measurement '" + name + "'");
}

bool SamplePoint::has_t_interval() const {
  return std::isfinite(t_ci_low) && std::isfinite(t_ci_high) && t_ci_low > 0.0 &&
         t_ci_high > t_ci_low;
}

SamplePoint normalize_basis(const SamplePoint& point) {
  if (point.basis_normalized) throw InvalidArgument("normalize_basis: point is already normalized");
  SamplePoint out = point;
  if (point.basis != Basis::DoubleQuantum) return out;
  if (point.measurement != Measurement::T2Star) {
    warn("normalize_basis: double-quantum correction applies to T2* only; T2 row left as is");
    return out;
  }
  out.t_seconds *= 2.0;
  out.t_ci_low *= 2.0;
  out.t_ci_high *= 2.0;
  out.basis = Basis::SingleQuantum;
  out.basis_normalized = true;
  return out;
}

std::string sample_csv_header() {
  return "concentration_ppm,concentration_err_ppm,t_seconds,t_ci_low,t_ci_high,p,basis,"
         "isotope_class,measurement";
}

std::string to_csv(std::span<const SamplePoint> points) {
  std::string out = sample_csv_header() + '\n';
  for (const auto& p : points) {
    out += format_double(p.concentration_ppm) + ',' + format_double(p.concentration_err_ppm) + ',' +
           format_double(p.t_seconds) + ',' + format_double(p.t_ci_low) + ',' +
           format_double(p.t_ci_high) + ',' + (std::isnan(p.p) ? "" : format_double(p.p)) + ',' +
           to_string(p.basis) + ',' + to_string(p.isotope_class) + ',' +
           to_string(p.measurement) + '\n';
  }
  return out;
}

std::vector<SamplePoint> read_sample_points(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> columns;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    columns = split_csv_line(line);
    break;
  }
  if (columns.empty()) throw DataError("sample table: missing header row");
  const auto expected = split_csv_line(sample_csv_header());
  std::vector<std::size_t> pos(expected.size());
  for (std::size_t k = 0; k < expected.size(); ++k) {
    const auto it = std::find(columns.begin(), columns.end(), expected[k]);
    if (it == columns.end()) throw DataError("sample table: missing column '" + expected[k] + "'");
    pos[k] = static_cast<std::size_t>(it - columns.begin());
  }

  std::vector<SamplePoint> points;
  std::vector<std::string> problems;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto f = split_csv_line(line);
    if (f.size() != columns.size()) {
      problems.push_back("row " + std::to_string(row) + ": expected " +
                         std::to_string(columns.size()) + " fields, got " + std::to_string(f.size()));
      continue;
    }
    auto number = [&](std::size_t k, double fallback) {
      const auto& s = f[pos[k]];
      return s.empty() ? fallback : parse_double(s, expected[k]);
    };
    try {
      SamplePoint p;
      p.concentration_ppm = number(0, NAN);
      p.concentration_err_ppm = number(1, 0.0);
      p.t_seconds = number(2, NAN);
      p.t_ci_low = number(3, 0.0);
      p.t_ci_high = number(4, 0.0);
      p.p = number(5, NAN);
      p.basis = basis_from_string(f[pos[6]]);
      p.isotope_class = isotope_class_from_string(f[pos[7]]);
      p.measurement = measurement_from_string(f[pos[8]]);
      if (!(p.concentration_ppm > 0.0) || !std::isfinite(p.concentration_ppm)) {
        throw DataError("concentration_ppm must be positive");
      }
      if (!(p.t_seconds > 0.0) || !std::isfinite(p.t_seconds)) {
        throw DataError("t_seconds must be positive");
      }
      if (p.concentration_err_ppm < 0.0) throw DataError("concentration_err_ppm must be nonnegative");
      points.push_back(p);
    } catch (const std::exception& e) {
      problems.push_back("row " + std::to_string(row) + ": " + e.what());
    }
  }
  if (!problems.empty()) {
    std::string msg = "sample table: " + std::to_string(problems.size()) + " invalid row(s)";
    for (const auto& p : problems) msg += "\n  " + p;
    throw DataError(msg);
  }
  return points;
}

std::string to_string(ScalingMethod m) {
  return m == ScalingMethod::WeightedLeastSquares ? "wls" : "odr";
}

double ScalingFit::predict_t(double ppm) const {
  return 1.0 / (rate_per_ppm * ppm + intercept.value_or(0.0));
}

ScalingFit fit_scaling(std::span<const SamplePoint> input, bool include_offset) {
  if (input.size() < 3) throw InvalidArgument("fit_scaling: need at least 3 points");
  std::vector<SamplePoint> pts(input.begin(), input.end());
  for (const auto& p : pts) {
    if (!(p.concentration_ppm > 0.0) || !(p.t_seconds > 0.0)) {
      throw InvalidArgument("fit_scaling: concentrations and times must be positive");
    }
  }
  std::sort(pts.begin(), pts.end(), [](const SamplePoint& a, const SamplePoint& b) {
    return std::tie(a.concentration_ppm, a.t_seconds) < std::tie(b.concentration_ppm, b.t_seconds);
  });
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].concentration_ppm == pts[i - 1].concentration_ppm) {
      throw InvalidArgument("fit_scaling: concentrations must be distinct");
    }
  }

  const auto n = static_cast<Eigen::Index>(pts.size());
  const Eigen::Index k = include_offset ? 2 : 1;
  Eigen::VectorXd x(n), y(n), sx(n), sy(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& p = pts[static_cast<std::size_t>(i)];
    x[i] = p.concentration_ppm;
    y[i] = 1.0 / p.t_seconds;
    sx[i] = p.concentration_err_ppm;
    sy[i] = sigma_inverse_t(p);
  }
  const bool y_weighted = (sy.array() > 0.0).all();
  const bool odr = y_weighted && (sx.array() > 0.0).all();

  Eigen::MatrixXd X(n, k);
  X.col(0) = x;
  if (include_offset) X.col(1).setOnes();
  const Eigen::VectorXd w =
      y_weighted ? Eigen::VectorXd(sy.array().square().inverse()) : Eigen::VectorXd::Ones(n);
  const Eigen::MatrixXd A = X.transpose() * w.asDiagonal() * X;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (lu.rank() < k) throw FitFailure("fit_scaling: singular design matrix");
  Eigen::VectorXd beta = lu.solve(X.transpose() * w.asDiagonal() * y);
  const double dof = std::max<double>(static_cast<double>(n - k), 1.0);

  ScalingFit fit;
  fit.n_points = pts.size();
  if (!odr) {
    const Eigen::VectorXd r = y - X * beta;
    fit.chi2 = r.dot(w.asDiagonal() * r);
    fit.covariance = lu.inverse() * (fit.chi2 / dof);
    fit.method = ScalingMethod::WeightedLeastSquares;
  } else {
    auto residual = [&](const Eigen::VectorXd& b) {
      const double off = include_offset ? b[1] : 0.0;
      return Eigen::VectorXd(((y - b[0] * x).array() - off) /
                             (sy.array().square() + b[0] * b[0] * sx.array().square()).sqrt());
    };
    const auto res = levenberg_marquardt(residual, beta);
    if (!res.converged || !res.params.allFinite()) {
      throw FitFailure("fit_scaling: orthogonal distance fit did not converge");
    }
    beta = res.params;
    fit.chi2 = 2.0 * res.cost;
    fit.covariance = res.covariance.size() ? res.covariance : Eigen::MatrixXd::Zero(k, k);
    fit.method = ScalingMethod::OrthogonalDistance;
  }

  fit.rate_per_ppm = beta[0];
  if (!(fit.rate_per_ppm > 0.0)) {
    throw FitFailure("fit_scaling: fitted rate is not positive (" + format_double(beta[0]) + ")");
  }
  fit.rate_err = std::sqrt(std::max(fit.covariance(0, 0), 0.0));
  if (include_offset) {
    fit.intercept = beta[1];
    fit.intercept_err = std::sqrt(std::max(fit.covariance(1, 1), 0.0));
    if (beta[1] > 0.0) {
      fit.t_other = 1.0 / beta[1];
      fit.t_other_err = fit.intercept_err / (beta[1] * beta[1]);
    } else {
      warn("fit_scaling: intercept is not positive; t_other reported as infinite");
      fit.t_other = kInf;
      fit.t_other_err = kInf;
    }
  }
  return fit;
}

PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw InvalidArgument("fit_power_law: need at least 2 paired points");
  }
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd ly(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (!(x[k] > 0.0) || !(y[k] > 0.0)) throw InvalidArgument("fit_power_law: values must be positive");
    X(i, 0) = std::log(x[k]);
    X(i, 1) = 1.0;
    ly[i] = std::log(y[k]);
  }
  const Eigen::Matrix2d A = X.transpose() * X;
  if (std::abs(A.determinant()) <= 0.0) throw FitFailure("fit_power_law: x values are not distinct");
  const Eigen::Vector2d beta = A.ldlt().solve(X.transpose() * ly);
  const Eigen::VectorXd r = ly - X * beta;
  PowerLawFit fit;
  fit.exponent = beta[0];
  fit.prefactor = std::exp(beta[1]);
  if (n > 2) {
    const double s2 = r.squaredNorm() / static_cast<double>(n - 2);
    fit.exponent_err = std::sqrt(s2 * A.inverse()(0, 0));
  }
  return fit;
}

DecayCurve extract_envelope(const DecayCurve& curve, double spacing) {
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    throw InvalidArgument("extract_envelope: revival spacing must be positive");
  }
  validate_time_grid(curve.times);
  if (curve.times.empty()) throw EnvelopeFailure("extract_envelope: empty curve");
  const double t0 = curve.times.front();
  const double t1 = curve.times.back();

  DecayCurve out;
  out.sequence = curve.sequence;
  out.scale = curve.scale;
  out.metadata = curve.metadata;
  out.metadata["revival_spacing_s"] = spacing;
  const bool has_err = curve.stderrs.size() == curve.size();
  const bool has_ref = curve.reference.size() == curve.size();

  const auto first = static_cast<long long>(std::ceil(t0 / spacing));
  for (long long m = first; static_cast<double>(m) * spacing <= t1; ++m) {
    const double c = static_cast<double>(m) * spacing;
    const auto lo = std::lower_bound(curve.times.begin(), curve.times.end(), c - 0.1 * spacing);
    const auto hi = std::upper_bound(curve.times.begin(), curve.times.end(), c + 0.1 * spacing);
    if (lo == hi) {
      throw EnvelopeFailure("extract_envelope: no samples within 10% of t = " + format_double(c) + " s");
    }
    const auto a = static_cast<std::size_t>(lo - curve.times.begin());
    const auto b = static_cast<std::size_t>(hi - curve.times.begin());
    std::size_t best = a;
    for (std::size_t i = a + 1; i < b; ++i) {
      if (curve.values[i] > curve.values[best]) best = i;
    }
    out.times.push_back(curve.times[best]);
    out.values.push_back(curve.values[best]);
    if (has_err) out.stderrs.push_back(curve.stderrs[best]);
    if (has_ref) out.reference.push_back(curve.reference[best]);
  }
  if (out.times.empty()) throw EnvelopeFailure("extract_envelope: no revival maxima in range");
  return out;
}

nlohmann::json to_json(const StretchedExpFit& f) {
  return {{"c0", f.c0},
          {"c0_err", f.c0_err},
          {"t_char_s", f.t_char},
          {"t_char_err_s", f.t_char_err},
          {"p", f.p},
          {"p_err", f.p_err},
          {"residual_norm", f.residual_norm},
          {"converged", f.converged},
          {"restarts_used", f.restarts_used},
          {"n_points", f.n_points}};
}

nlohmann::json to_json(const ScalingFit& f) {
  nlohmann::json j = {{"rate_per_ppm_rad_s", f.rate_per_ppm},
                      {"rate_err_rad_s", f.rate_err},
                      {"inverse_rate_s_ppm", 1.0 / f.rate_per_ppm},
                      {"method", to_string(f.method)},
                      {"chi2", f.chi2},
                      {"n_points", f.n_points}};
  if (f.intercept) {
    j["intercept_per_s"] = *f.intercept;
    j["intercept_err_per_s"] = f.intercept_err;
    j["t_other_s"] = std::isfinite(*f.t_other) ? nlohmann::json(*f.t_other) : nlohmann::json("inf");
    j["t_other_err_s"] = std::isfinite(f.t_other_err) ? nlohmann::json(f.t_other_err) : nlohmann::json("inf");
  }
  nlohmann::json cov = nlohmann::json::array();
  for (Eigen::Index r = 0; r < f.covariance.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < f.covariance.cols(); ++c) row.push_back(f.covariance(r, c));
    cov.push_back(row);
  }
  j["covariance"] = cov;
  return j;
}

}  // namespace spinbath
