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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "augmetric/error.hpp"
#include "augmetric/inference.hpp"
#include "augmetric/models.hpp"

namespace augmetric {

// Flat "key = value" configuration with dotted keys and '#' comments.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in, const std::string& name);
  static KeyValueConfig parse_file(const std::filesystem::path& path);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  long get_int(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  std::vector<std::string> get_list(const std::string& key) const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::string name_;
  std::map<std::string, Entry> entries_;

  [[noreturn]] void missing(const std::string& key) const;
  [[noreturn]] void bad_value(const std::string& key, const char* expected) const;
};

enum class SweepKind { count_sweep, fid_sweep };

struct SweepDataset {
  std::string id;
  double fid = 0.0;
};

// One (dataset, increment, repeat) unit of work with its derived seed.
struct SweepTask {
  std::string group_id;  // dataset id, suffixed with "+N%" for multi-increment plans
  std::string dataset_id;
  double fid = 0.0;
  int increment = 0;
  int repeat = 0;
  std::uint64_t seed = 0;
};

struct SweepPlan {
  SweepKind kind = SweepKind::fid_sweep;
  int base_size = 650;
  std::vector<int> increments;  // cumulative counts (count_sweep) or % (fid_sweep)
  std::vector<SweepDataset> datasets;
  int samples_per_point = 30;
  std::uint64_t seed = 0;
  std::vector<SweepTask> tasks;  // dataset x increment x repeat
};

// Materialises the run matrix from a config:
//   kind = fid_sweep | count_sweep
//   base_size = 650
//   increments = 25,50,75,99
//   samples_per_point = 30
//   seed = 42
//   datasets = blur_low,blur_high
//   dataset.blur_low.fid = 6.068
// fid_sweep increments must be drawn from {25, 50, 75, 99}; increments must
// be strictly increasing.
SweepPlan plan_sweep(const KeyValueConfig& config);
SweepPlan plan_sweep_file(const std::filesystem::path& path);

// Reads an externally produced samples CSV; per-line validation errors carry
// line numbers, and an empty file is a dataset error.
std::vector<SampleRecord> ingest_results(const std::filesystem::path& path);

// Self-test oracle: one record per plan task with
// avg_dsc ~ Normal(eval_model(family, params, fid), noise_sd), clamped to
// [0, 1]. Per-task RNG streams derive from (seed, task index) so output is
// identical for any execution order.
std::vector<SampleRecord> simulate_runs(const SweepPlan& plan, Family family,
                                        std::span<const double> params, Baseline base,
                                        double noise_sd, std::uint64_t seed);

// Checks that every plan task appears exactly once in the records; returns
// human-readable descriptions of missing or duplicated tasks (empty = ok).
std::vector<std::string> verify_plan_coverage(const SweepPlan& plan,
                                              std::span<const SampleRecord> records);

struct SeriesReport {
  std::string name;
  Baseline base;
  std::vector<AggregatedPoint> points;
  ComparisonTable comparison;
  Family fit_family = Family::log_normal;
  std::optional<FitResult> fit;
};

// Writes, per series: comparison_<name>.csv, plot_<name>.csv (x,y,sem,
// fitted_y), and curve_<name>.csv (200 log-spaced samples of the fitted
// model spanning exactly [min fid, max fid]); plus one bestfit.csv row per
// log-normal fit in Appendix-style column order (curve,A,mu,sigma).
void render_report(std::span<const SeriesReport> reports,
                   const std::filesystem::path& out_dir);

// Aggregates records into one series, runs the model comparison, and fits
// the log-normal family (when there are enough points). The building block
// behind the report CLI.
SeriesReport build_series_report(std::span<const SampleRecord> records,
                                 const std::string& name, Baseline base,
                                 const QuadSpec& quad = {}, Diagnostics* diag = nullptr);

}  // namespace augmetric
