/*
 * Copyright 2026 The augmetric Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "augmetric/frechet.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace augmetric {

namespace {

constexpr double kSymmetryTolerance = 1e-10;  // relative to the largest entry
constexpr double kEigenClampEps = 1e-10;      // relative to the largest eigenvalue

void require_symmetric(const Eigen::MatrixXd& s, const char* what) {
  if (s.rows() != s.cols()) {
    throw ArgumentError(std::string(what) + ": matrix must be square, got " +
                        std::to_string(s.rows()) + "x" + std::to_string(s.cols()));
  }
  double scale = s.cwiseAbs().maxCoeff();
  double asym = (s - s.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance * scale + 1e-300) {
    throw ArgumentError(std::string(what) + ": matrix is not symmetric (max asymmetry " +
                        std::to_string(asym) + ")");
  }
}

}  // namespace

void FeatureDistribution::validate() const {
  if (n < 2) {
    throw ArgumentError("FeatureDistribution: need n >= 2 samples, got " + std::to_string(n));
  }
  if (cov.rows() != mean.size() || cov.cols() != mean.size()) {
    throw ArgumentError("FeatureDistribution: covariance is " + std::to_string(cov.rows()) +
                        "x" + std::to_string(cov.cols()) + " but mean has dimension " +
                        std::to_string(mean.size()));
  }
  require_symmetric(cov, "FeatureDistribution");
}

MatrixSqrtResult sqrt_psd(const Eigen::MatrixXd& s) {
  require_symmetric(s, "sqrt_psd");
  Eigen::MatrixXd sym = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw NumericError("sqrt_psd: eigendecomposition did not converge");
  }
  Eigen::VectorXd lambda = solver.eigenvalues();
  double lambda_max = lambda.size() > 0 ? lambda.maxCoeff() : 0.0;
  double report_threshold = kEigenClampEps * std::max(lambda_max, 0.0);

  MatrixSqrtResult result;
  Eigen::VectorXd sqrt_lambda(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    double v = lambda(i);
    if (v < 0.0) {
      if (v < -report_threshold) result.clamped_negative_mass += -v;
      v = 0.0;
    }
    sqrt_lambda(i) = std::sqrt(v);
  }
  const Eigen::MatrixXd& vectors = solver.eigenvectors();
  Eigen::MatrixXd root = vectors * sqrt_lambda.asDiagonal() * vectors.transpose();
  result.root = 0.5 * (root + root.transpose());
  return result;
}

FidResult frechet_distance(const FeatureDistribution& r, const FeatureDistribution& s) {
  r.validate();
  s.validate();
  if (r.dim() != s.dim()) {
    throw ShapeError("frechet_distance: dimension mismatch, " + std::to_string(r.dim()) +
                     " vs " + std::to_string(s.dim()));
  }

  FidResult out;
  out.mean_term = (r.mean - s.mean).squaredNorm();

  MatrixSqrtResult root_r = sqrt_psd(r.cov);
  Eigen::MatrixXd inner_product = root_r.root * s.cov * root_r.root;
  MatrixSqrtResult inner = sqrt_psd(inner_product);

  out.trace_term = r.cov.trace() + s.cov.trace() - 2.0 * inner.root.trace();
  out.clamped_negative_eigenvalue_mass =
      root_r.clamped_negative_mass + inner.clamped_negative_mass;
  out.value = out.mean_term + out.trace_term;
  if (out.value < 0.0) out.value = 0.0;  // roundoff below zero
  if (!std::isfinite(out.value)) {
    throw NumericError("frechet_distance: non-finite result");
  }
  return out;
}

}  // namespace augmetric
