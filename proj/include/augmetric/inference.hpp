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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "augmetric/error.hpp"
#include "augmetric/models.hpp"

namespace augmetric {

// One training run: the average test DSC of a model trained with an
// augmentation dataset whose similarity to the training data is `fid`.
struct SampleRecord {
  std::string dataset_id;
  double fid = 0.0;
  int run_index = 0;
  double avg_dsc = 0.0;
};

// Per-dataset summary: mean of the run averages with its standard error.
struct AggregatedPoint {
  std::string dataset_id;
  double fid = 0.0;   // x_i
  double mean = 0.0;  // y_i
  double sem = 0.0;   // sigma_i
  int n = 0;
};

struct AggregateOptions {
  // Replaces a zero standard error (all samples identical) and warns; set to
  // 0 to make zero-sem points a hard error instead.
  double jitter_floor = 1e-6;
  // Sample counts below this draw a warning, not an error.
  int recommended_samples = 30;
};

// Groups samples by dataset_id and reduces each group to an AggregatedPoint
// (mean, sem = stddev_{n-1} / sqrt(n)). Output is sorted by (fid, dataset_id)
// so it is invariant to input order and run_index relabeling. Points whose
// minimum sample sits more than 4 sem below the mean are flagged as
// low-outlier candidates in the diagnostics.
std::vector<AggregatedPoint> aggregate(std::span<const SampleRecord> samples,
                                       const AggregateOptions& options = {},
                                       Diagnostics* diag = nullptr);

// Natural-log Gaussian likelihood of the points under the model:
// sum_i [ -ln(sqrt(2 pi) sigma_i) - (y_i - M(x_i, theta))^2 / (2 sigma_i^2) ].
double log_likelihood(std::span<const AggregatedPoint> points, Family family,
                      std::span<const double> params, Baseline base);

enum class EvidenceMethod { grid, monte_carlo };

struct QuadSpec {
  EvidenceMethod method = EvidenceMethod::grid;
  // 0 picks the default: 201 nodes per axis for 1-2 parameters, 101 for 3.
  int nodes_per_axis = 0;
  std::int64_t mc_samples = 200000;
  std::uint64_t mc_seed = 0x5eedcafe;
  int threads = 1;
};

struct EvidenceResult {
  double log10_evidence = 0.0;
  EvidenceMethod method = EvidenceMethod::grid;
  std::int64_t nodes_or_samples = 0;
  std::optional<double> mc_standard_error;  // log10 units, monte_carlo only
  // Largest log10 likelihood seen during integration; the prior-averaging
  // bound guarantees log10_evidence <= this value.
  double max_log10_likelihood = 0.0;
};

// log10 of the prior-averaged likelihood over the box,
//   evidence = (1 / prod R_i) * integral exp(loglik) dtheta,
// via an iterated trapezoid rule (grid) or uniform sampling (monte_carlo),
// both accumulated with log-sum-exp. Throws NumericError if the likelihood
// is non-finite anywhere or the evidence underflows to zero.
EvidenceResult log_evidence(std::span<const AggregatedPoint> points, Family family,
                            const PriorBox& priors, Baseline base,
                            const QuadSpec& quad = {});

// log10 K = e1 - e2 (equal model priors).
double log10_bayes_factor(const EvidenceResult& e1, const EvidenceResult& e2);

struct FitResult {
  std::vector<double> params;
  double log_likelihood = 0.0;
};

// Bounded maximum-likelihood fit: multi-start Nelder-Mead over the prior box
// with 32 Halton starts and coordinate clipping. Deterministic. Throws
// FitError when there are fewer points than parameters.
FitResult best_fit(std::span<const AggregatedPoint> points, Family family,
                   const PriorBox& priors, Baseline base);

struct ComparisonRow {
  Family family = Family::constant;
  EvidenceResult evidence;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;       // in f, g, h, k order
  std::vector<Family> highlight;         // argmax, plus runner-up iff gap <= 0.5
};

// Highest-evidence family, plus the runner-up when the log10 Bayes factor
// between them is <= 1/2 (neither model substantially preferred).
std::vector<Family> highlight_rule(std::span<const std::pair<Family, double>> evidences);

// Evidences for all four families under their default priors.
ComparisonTable compare_models(std::span<const AggregatedPoint> points, Baseline base,
                               const QuadSpec& quad = {});

// CSV with header "dataset_id,fid,run,avg_dsc". Rejects fid <= 0 and
// avg_dsc outside [0, 1] with the offending line number.
std::vector<SampleRecord> read_samples_csv(std::istream& in, const std::string& name);
std::vector<SampleRecord> read_samples_csv(const std::filesystem::path& path);
void write_samples_csv(std::span<const SampleRecord> samples, std::ostream& out);
void write_samples_csv(std::span<const SampleRecord> samples,
                       const std::filesystem::path& path);

// Table-2-style CSV: family,log10_evidence,method,nodes_or_samples,
// mc_standard_error,highlight.
void write_comparison_csv(const ComparisonTable& table, std::ostream& out);

}  // namespace augmetric
