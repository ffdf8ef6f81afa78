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

#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "augmetric/error.hpp"

namespace augmetric {

// Gaussian summary of an embedded dataset: sample mean, unbiased sample
// covariance, and the number of rows that produced them.
struct FeatureDistribution {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  std::int64_t n = 0;

  int dim() const { return static_cast<int>(mean.size()); }

  // Enforces cov symmetric within 1e-10 relative, square, matching the mean
  // dimension, and n >= 2. Throws ArgumentError.
  void validate() const;
};

struct MatrixSqrtResult {
  Eigen::MatrixXd root;
  // Total |lambda| over eigenvalues below -eps * lambda_max that were clamped
  // to zero. Negatives inside the tolerance band are clamped silently.
  double clamped_negative_mass = 0.0;
};

// Symmetric PSD square root via eigendecomposition of the symmetrised input.
// All linear algebra is double precision. Throws ArgumentError if the input
// is non-symmetric beyond tolerance.
MatrixSqrtResult sqrt_psd(const Eigen::MatrixXd& s);

struct FidResult {
  double value = 0.0;       // mean_term + trace_term, clamped at 0
  double mean_term = 0.0;   // |mu_r - mu_s|^2
  double trace_term = 0.0;  // Tr(S_r) + Tr(S_s) - 2 Tr((S_r^1/2 S_s S_r^1/2)^1/2)
  double clamped_negative_eigenvalue_mass = 0.0;
};

// Frechet distance between two Gaussians. The trace term uses the symmetric
// product form (S_r^1/2 S_s S_r^1/2)^1/2, equal to (S_r S_s)^1/2 for PSD
// inputs, so only symmetric PSD square roots are ever taken.
FidResult frechet_distance(const FeatureDistribution& r, const FeatureDistribution& s);

}  // namespace augmetric
