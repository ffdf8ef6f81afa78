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

#include "augmetric/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "augmetric/rng.hpp"

namespace augmetric {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string slugify(const std::string& name) {
  std::string out;
  for (char c : name) {
    out += (std::isalnum(static_cast<unsigned char>(c)) != 0) ? c : '_';
  }
  return out.empty() ? "series" : out;
}

std::string format_g(double v, const char* fmt = "%.12g") {
  char buf[48];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write report file: " + path.string());
  return out;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in, const std::string& name) {
  KeyValueConfig config;
  config.name_ = name;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(name + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(name + ":" + std::to_string(line_no) + ": empty key");
    }
    if (config.entries_.count(key) != 0) {
      throw ConfigError(name + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    config.entries_[key] = Entry{value, line_no};
  }
  return config;
}

KeyValueConfig KeyValueConfig::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path.string());
  return parse(in, path.string());
}

void KeyValueConfig::missing(const std::string& key) const {
  throw ConfigError(name_ + ": missing required key '" + key + "'");
}

void KeyValueConfig::bad_value(const std::string& key, const char* expected) const {
  auto it = entries_.find(key);
  throw ConfigError(name_ + ":" + std::to_string(it->second.line) + ": key '" + key +
                    "' expects " + expected + ", got '" + it->second.value + "'");
}

bool KeyValueConfig::has(const std::string& key) const { return entries_.count(key) != 0; }

std::string KeyValueConfig::get_string(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) missing(key);
  return it->second.value;
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

double KeyValueConfig::get_double(const std::string& key) const {
  std::string v = get_string(key);
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return d;
  } catch (const std::exception&) {
    bad_value(key, "a number");
  }
}

long KeyValueConfig::get_int(const std::string& key) const {
  std::string v = get_string(key);
  try {
    std::size_t pos = 0;
    long n = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return n;
  } catch (const std::exception&) {
    bad_value(key, "an integer");
  }
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  std::string v = get_string(key);
  try {
    std::size_t pos = 0;
    std::uint64_t n = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return n;
  } catch (const std::exception&) {
    bad_value(key, "an unsigned integer");
  }
}

std::vector<std::string> KeyValueConfig::get_list(const std::string& key) const {
  std::string v = get_string(key);
  std::vector<std::string> out;
  std::istringstream in(v);
  std::string part;
  while (std::getline(in, part, ',')) {
    std::string t = trim(part);
    if (!t.empty()) out.push_back(t);
  }
  if (out.empty()) bad_value(key, "a comma-separated list");
  return out;
}

SweepPlan plan_sweep(const KeyValueConfig& config) {
  SweepPlan plan;
  std::string kind = config.get_string("kind");
  if (kind == "fid_sweep") {
    plan.kind = SweepKind::fid_sweep;
  } else if (kind == "count_sweep") {
    plan.kind = SweepKind::count_sweep;
  } else {
    throw ConfigError("plan: key 'kind' must be fid_sweep or count_sweep, got '" + kind + "'");
  }
  plan.base_size = static_cast<int>(config.get_int("base_size"));
  if (plan.base_size <= 0) throw ConfigError("plan: base_size must be positive");
  plan.samples_per_point = static_cast<int>(config.get_int("samples_per_point"));
  if (plan.samples_per_point < 1) throw ConfigError("plan: samples_per_point must be >= 1");
  plan.seed = config.get_u64("seed", 0);

  for (const std::string& inc : config.get_list("increments")) {
    try {
      plan.increments.push_back(std::stoi(inc));
    } catch (const std::exception&) {
      throw ConfigError("plan: bad increment '" + inc + "'");
    }
  }
  for (std::size_t i = 1; i < plan.increments.size(); ++i) {
    if (plan.increments[i] <= plan.increments[i - 1]) {
      throw ConfigError("plan: increments must be strictly increasing");
    }
  }
  if (plan.kind == SweepKind::fid_sweep) {
    for (int inc : plan.increments) {
      if (inc != 25 && inc != 50 && inc != 75 && inc != 99) {
        throw ConfigError("plan: fid_sweep increments must be drawn from {25, 50, 75, 99}");
      }
    }
  } else {
    for (int inc : plan.increments) {
      if (inc <= 0) throw ConfigError("plan: count_sweep increments must be positive");
    }
  }

  for (const std::string& id : config.get_list("datasets")) {
    double fid = config.get_double("dataset." + id + ".fid");
    if (!(fid > 0.0)) {
      throw ConfigError("plan: dataset." + id + ".fid must be > 0");
    }
    plan.datasets.push_back(SweepDataset{id, fid});
  }

  bool multi_increment = plan.increments.size() > 1;
  std::uint64_t task_index = 0;
  for (int inc : plan.increments) {
    for (const auto& ds : plan.datasets) {
      std::string group = ds.id;
      if (multi_increment) group += "+" + std::to_string(inc) + "%";
      for (int rep = 0; rep < plan.samples_per_point; ++rep) {
        plan.tasks.push_back(SweepTask{group, ds.id, ds.fid, inc, rep,
                                       splitmix64_at(plan.seed, task_index)});
        ++task_index;
      }
    }
  }
  return plan;
}

SweepPlan plan_sweep_file(const std::filesystem::path& path) {
  return plan_sweep(KeyValueConfig::parse_file(path));
}

std::vector<SampleRecord> ingest_results(const std::filesystem::path& path) {
  return read_samples_csv(path);
}

std::vector<SampleRecord> simulate_runs(const SweepPlan& plan, Family family,
                                        std::span<const double> params, Baseline base,
                                        double noise_sd, std::uint64_t seed) {
  if (!(noise_sd >= 0.0)) throw ArgumentError("simulate_runs: noise_sd must be >= 0");
  PriorBox priors = default_priors(family, base);
  if (!priors.contains(params)) {
    throw ArgumentError("simulate_runs: parameters " + format_model(family, params) +
                        " fall outside the default priors");
  }
  std::vector<SampleRecord> records;
  records.reserve(plan.tasks.size());
  for (std::size_t i = 0; i < plan.tasks.size(); ++i) {
    const SweepTask& task = plan.tasks[i];
    CounterRng rng = CounterRng::stream(seed, i);
    double value = eval_model(family, params, task.fid, base) + noise_sd * rng.normal();
    value = std::clamp(value, 0.0, 1.0);
    records.push_back(SampleRecord{task.group_id, task.fid, task.repeat, value});
  }
  return records;
}

std::vector<std::string> verify_plan_coverage(const SweepPlan& plan,
                                              std::span<const SampleRecord> records) {
  std::map<std::pair<std::string, int>, int> counts;
  for (const auto& r : records) counts[{r.dataset_id, r.run_index}] += 1;
  std::vector<std::string> problems;
  std::set<std::pair<std::string, int>> planned;
  for (const auto& task : plan.tasks) {
    auto key = std::make_pair(task.group_id, task.repeat);
    planned.insert(key);
    auto it = counts.find(key);
    if (it == counts.end()) {
      problems.push_back("missing: " + task.group_id + " run " + std::to_string(task.repeat));
    } else if (it->second > 1) {
      problems.push_back("duplicated: " + task.group_id + " run " +
                         std::to_string(task.repeat) + " appears " +
                         std::to_string(it->second) + " times");
    }
  }
  for (const auto& [key, count] : counts) {
    (void)count;
    if (planned.find(key) == planned.end()) {
      problems.push_back("unplanned: " + key.first + " run " + std::to_string(key.second));
    }
  }
  return problems;
}

void render_report(std::span<const SeriesReport> reports,
                   const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw DataError("cannot create report directory: " + out_dir.string());

  std::vector<std::pair<std::string, const SeriesReport*>> lognormal_fits;
  for (const auto& report : reports) {
    std::string slug = slugify(report.name);

    {
      auto out = open_csv(out_dir / ("comparison_" + slug + ".csv"));
      write_comparison_csv(report.comparison, out);
    }

    {
      auto out = open_csv(out_dir / ("plot_" + slug + ".csv"));
      out << "x,y,sem,fitted_y\n";
      for (const auto& p : report.points) {
        out << format_g(p.fid, "%.17g") << "," << format_g(p.mean, "%.17g") << ","
            << format_g(p.sem, "%.17g") << ",";
        if (report.fit.has_value()) {
          out << format_g(eval_model(report.fit_family, report.fit->params, p.fid, report.base),
                          "%.12g");
        }
        out << "\n";
      }
    }

    if (report.fit.has_value()) {
      if (report.points.empty()) throw ArgumentError("render_report: fit without points");
      double x_min = report.points.front().fid;
      double x_max = report.points.back().fid;
      for (const auto& p : report.points) {
        x_min = std::min(x_min, p.fid);
        x_max = std::max(x_max, p.fid);
      }
      auto out = open_csv(out_dir / ("curve_" + slug + ".csv"));
      out << "x,fitted_y\n";
      const int kCurveSamples = 200;
      double ln_min = std::log(x_min), ln_max = std::log(x_max);
      for (int i = 0; i < kCurveSamples; ++i) {
        double x = i == 0                  ? x_min
                   : i == kCurveSamples - 1 ? x_max
                                            : std::exp(ln_min + (ln_max - ln_min) * i /
                                                       (kCurveSamples - 1));
        out << format_g(x, "%.17g") << ","
            << format_g(eval_model(report.fit_family, report.fit->params, x, report.base),
                        "%.12g")
            << "\n";
      }
      if (report.fit_family == Family::log_normal) {
        lognormal_fits.emplace_back(report.name, &report);
      }
    }
  }

  if (!lognormal_fits.empty()) {
    auto out = open_csv(out_dir / "bestfit.csv");
    out << "curve,A,mu,sigma\n";
    for (const auto& [name, report] : lognormal_fits) {
      const auto& p = report->fit->params;
      out << name << "," << format_g(p[0]) << "," << format_g(p[1]) << "," << format_g(p[2])
          << "\n";
    }
  }
}

SeriesReport build_series_report(std::span<const SampleRecord> records,
                                 const std::string& name, Baseline base,
                                 const QuadSpec& quad, Diagnostics* diag) {
  SeriesReport report;
  report.name = name;
  report.base = base;
  report.points = aggregate(records, AggregateOptions{}, diag);
  report.comparison = compare_models(report.points, base, quad);
  report.fit_family = Family::log_normal;
  if (report.points.size() >= static_cast<std::size_t>(param_count(Family::log_normal))) {
    report.fit = best_fit(report.points, Family::log_normal,
                          default_priors(Family::log_normal, base), base);
  } else {
    maybe_warn(diag, "report: only " + std::to_string(report.points.size()) +
                         " points; skipping the log-normal fit");
  }
  return report;
}

}  // namespace augmetric
