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

#include <array>
#include <span>
#include <string>
#include <vector>

#include "augmetric/error.hpp"

namespace augmetric {

// Candidate models for mean DSC as a function of dataset similarity x (FID),
// each predicting an improvement above the unaugmented baseline DSC0:
//   f(x; c)          = DSC0 + c
//   g(x; m, c)       = DSC0 + m*x + c
//   h(x; A, mu, sig) = DSC0 + A * exp(-((ln x - mu)^2) / (2 sig^2))
//   k(x; a, c)       = DSC0 + a/x + c
enum class Family { constant, linear, log_normal, reciprocal };

inline constexpr std::array<Family, 4> kAllFamilies = {
    Family::constant, Family::linear, Family::log_normal, Family::reciprocal};

char family_letter(Family family);          // 'f', 'g', 'h', 'k'
Family family_from_name(const std::string& name);
int param_count(Family family);             // 1, 2, 3, 2
std::vector<std::string> param_names(Family family);

// Mean DSC of the unaugmented model. Valid range [0, 1).
struct Baseline {
  double dsc0 = 0.0;
  Baseline() = default;
  explicit Baseline(double value);
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

// Axis-aligned box of uniform priors, one closed interval per parameter.
struct PriorBox {
  std::vector<Interval> bounds;

  explicit PriorBox(std::vector<Interval> intervals);
  std::size_t dims() const { return bounds.size(); }
  double log_volume() const;
  bool contains(std::span<const double> params) const;
  std::vector<double> clamp(std::span<const double> params) const;
};

// The model value at x. Throws ArgumentError for a wrong parameter count and
// for x <= 0 with the log-normal / reciprocal families.
double eval_model(Family family, std::span<const double> params, double x, Baseline base);

// Uniform priors: c in [0, 1-DSC0]; m in [-0.01, 0]; A in [0, 1-DSC0];
// mu in [0, 5]; sigma in [0, 5]; a in [0, 1].
PriorBox default_priors(Family family, Baseline base);

struct WganLosses {
  double critic_loss = 0.0;
  double generator_loss = 0.0;
};

// critic = -(mean(real) - mean(fake)), generator = -mean(fake).
WganLosses wgan_losses(std::span<const double> real_scores,
                       std::span<const double> fake_scores);

// Canonical report form, e.g. "h(A=0.057,mu=4.552,sigma=0.467)".
std::string format_model(Family family, std::span<const double> params);

// Accepts "A=0.057,mu=4.552,sigma=0.467" or bare "0.057,4.552,0.467".
std::vector<double> parse_params(Family family, const std::string& text);

}  // namespace augmetric
