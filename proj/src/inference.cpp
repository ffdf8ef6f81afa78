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

#include "augmetric/inference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "augmetric/parallel.hpp"
#include "augmetric/rng.hpp"

namespace augmetric {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLn10 = std::numbers::ln10;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Online log-sum-exp accumulator; result depends only on the insertion order.
class LogSumExp {
 public:
  void add(double v) {
    if (v == kNegInf) return;
    if (max_ == kNegInf) {
      max_ = v;
      sum_ = 1.0;
    } else if (v <= max_) {
      sum_ += std::exp(v - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - v) + 1.0;
      max_ = v;
    }
  }
  double value() const { return max_ == kNegInf ? kNegInf : max_ + std::log(sum_); }

 private:
  double max_ = kNegInf;
  double sum_ = 0.0;
};

// Per-point constants hoisted out of the likelihood inner loop.
struct PreparedPoint {
  double x;
  double y;
  double log_norm;     // -ln(sqrt(2 pi) sigma_i)
  double inv_two_var;  // 1 / (2 sigma_i^2)
};

std::vector<PreparedPoint> prepare_points(std::span<const AggregatedPoint> points) {
  std::vector<PreparedPoint> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    if (!(p.sem > 0.0)) {
      throw ArgumentError("log_likelihood: sigma_i must be > 0 for dataset '" +
                          p.dataset_id + "'");
    }
    out.push_back(PreparedPoint{p.fid, p.mean,
                                -std::log(std::sqrt(2.0 * std::numbers::pi) * p.sem),
                                1.0 / (2.0 * p.sem * p.sem)});
  }
  return out;
}

double log_likelihood_prepared(std::span<const PreparedPoint> points, Family family,
                               std::span<const double> params, Baseline base) {
  double acc = 0.0;
  for (const auto& p : points) {
    double residual = p.y - eval_model(family, params, p.x, base);
    acc += p.log_norm - residual * residual * p.inv_two_var;
  }
  return acc;
}

[[noreturn]] void throw_nonfinite(Family family, std::span<const double> params) {
  std::ostringstream out;
  out << "log_evidence: non-finite likelihood at theta = (";
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i > 0) out << ", ";
    out << format_double(params[i]);
  }
  out << ") for family " << family_letter(family);
  throw NumericError(out.str());
}

int default_nodes(std::size_t dims) { return dims <= 2 ? 201 : 101; }

}  // namespace

std::vector<AggregatedPoint> aggregate(std::span<const SampleRecord> samples,
                                       const AggregateOptions& options, Diagnostics* diag) {
  std::map<std::string, std::vector<const SampleRecord*>> groups;
  for (const auto& s : samples) {
    if (!(s.fid > 0.0)) {
      throw DataError("aggregate: fid must be > 0 for dataset '" + s.dataset_id + "'");
    }
    if (!(s.avg_dsc >= 0.0 && s.avg_dsc <= 1.0)) {
      throw DataError("aggregate: avg_dsc outside [0, 1] for dataset '" + s.dataset_id + "'");
    }
    groups[s.dataset_id].push_back(&s);
  }

  std::vector<AggregatedPoint> points;
  points.reserve(groups.size());
  for (const auto& [id, records] : groups) {
    if (records.size() < 2) {
      throw SampleSizeError("aggregate: dataset '" + id + "' has " +
                            std::to_string(records.size()) + " samples, need at least 2");
    }
    double fid_min = records.front()->fid, fid_max = records.front()->fid;
    double sum = 0.0;
    for (const auto* r : records) {
      fid_min = std::min(fid_min, r->fid);
      fid_max = std::max(fid_max, r->fid);
      sum += r->avg_dsc;
    }
    if (fid_max - fid_min > 1e-9 * std::max(std::abs(fid_max), 1.0)) {
      throw DataError("aggregate: dataset '" + id + "' has inconsistent fid values (" +
                      format_double(fid_min) + " vs " + format_double(fid_max) + ")");
    }
    int n = static_cast<int>(records.size());
    double mean = sum / n;
    double ss = 0.0;
    double min_sample = records.front()->avg_dsc;
    for (const auto* r : records) {
      ss += (r->avg_dsc - mean) * (r->avg_dsc - mean);
      min_sample = std::min(min_sample, r->avg_dsc);
    }
    double sem = std::sqrt(ss / (n - 1)) / std::sqrt(static_cast<double>(n));
    if (sem == 0.0) {
      if (options.jitter_floor > 0.0) {
        sem = options.jitter_floor;
        maybe_warn(diag, "aggregate: dataset '" + id +
                             "' has zero sample spread; sem floored to " +
                             format_double(options.jitter_floor));
      } else {
        throw DataError("aggregate: dataset '" + id +
                        "' has zero sample spread (sem = 0); enable a jitter floor to "
                        "proceed");
      }
    }
    if (n < options.recommended_samples) {
      maybe_warn(diag, "aggregate: dataset '" + id + "' has only " + std::to_string(n) +
                           " samples (recommended " +
                           std::to_string(options.recommended_samples) + ")");
    }
    if (min_sample < mean - 4.0 * sem) {
      maybe_warn(diag, "aggregate: dataset '" + id +
                           "' has a low outlier more than 4 sem below the mean");
    }
    points.push_back(AggregatedPoint{id, records.front()->fid, mean, sem, n});
  }
  std::sort(points.begin(), points.end(), [](const AggregatedPoint& a, const AggregatedPoint& b) {
    return a.fid != b.fid ? a.fid < b.fid : a.dataset_id < b.dataset_id;
  });
  return points;
}

double log_likelihood(std::span<const AggregatedPoint> points, Family family,
                      std::span<const double> params, Baseline base) {
  auto prepared = prepare_points(points);
  return log_likelihood_prepared(prepared, family, params, base);
}

EvidenceResult log_evidence(std::span<const AggregatedPoint> points, Family family,
                            const PriorBox& priors, Baseline base, const QuadSpec& quad) {
  std::size_t dims = static_cast<std::size_t>(param_count(family));
  if (priors.dims() != dims) {
    throw ArgumentError("log_evidence: prior box has " + std::to_string(priors.dims()) +
                        " intervals, family " + std::string(1, family_letter(family)) +
                        " needs " + std::to_string(dims));
  }
  if (points.empty()) throw SampleSizeError("log_evidence: no data points");
  auto prepared = prepare_points(points);

  EvidenceResult result;
  result.method = quad.method;

  if (quad.method == EvidenceMethod::grid) {
    int nodes = quad.nodes_per_axis > 0 ? quad.nodes_per_axis : default_nodes(dims);
    if (nodes < 2) throw ArgumentError("log_evidence: need at least 2 nodes per axis");
    result.nodes_or_samples = 1;
    for (std::size_t j = 0; j < dims; ++j) {
      result.nodes_or_samples *= nodes;
    }

    std::vector<double> step(dims);
    for (std::size_t j = 0; j < dims; ++j) {
      step[j] = priors.bounds[j].width() / (nodes - 1);
    }
    auto axis_value = [&](std::size_t j, int i) { return priors.bounds[j].lo + i * step[j]; };
    auto axis_log_weight = [&](std::size_t j, int i) {
      return std::log(step[j]) + ((i == 0 || i == nodes - 1) ? std::log(0.5) : 0.0);
    };

    // One chunk per outer-axis node, combined in index order, so the result
    // is identical for any thread count.
    std::vector<double> chunk_lse(static_cast<std::size_t>(nodes), kNegInf);
    std::vector<double> chunk_max(static_cast<std::size_t>(nodes), kNegInf);
    std::vector<std::string> chunk_error(static_cast<std::size_t>(nodes));
    parallel_for(static_cast<std::size_t>(nodes), quad.threads, [&](std::size_t i0) {
      try {
        LogSumExp lse;
        double max_ll = kNegInf;
        std::vector<double> theta(dims);
        std::vector<int> index(dims, 0);
        theta[0] = axis_value(0, static_cast<int>(i0));
        double w0 = axis_log_weight(0, static_cast<int>(i0));
        // Odometer over the remaining axes.
        bool done = false;
        while (!done) {
          double wlog = w0;
          for (std::size_t j = 1; j < dims; ++j) {
            theta[j] = axis_value(j, index[j]);
            wlog += axis_log_weight(j, index[j]);
          }
          double ll = log_likelihood_prepared(prepared, family, theta, base);
          if (std::isnan(ll) || ll == std::numeric_limits<double>::infinity()) {
            throw_nonfinite(family, theta);
          }
          max_ll = std::max(max_ll, ll);
          lse.add(ll + wlog);
          done = true;
          for (std::size_t j = dims; j-- > 1;) {
            if (++index[j] < nodes) {
              done = false;
              break;
            }
            index[j] = 0;
          }
          if (dims == 1) done = true;
        }
        chunk_lse[i0] = lse.value();
        chunk_max[i0] = max_ll;
      } catch (const Error& e) {
        chunk_error[i0] = e.what();
      }
    });
    for (const auto& err : chunk_error) {
      if (!err.empty()) throw NumericError(err);
    }
    LogSumExp total;
    double max_ll = kNegInf;
    for (int i0 = 0; i0 < nodes; ++i0) {
      total.add(chunk_lse[static_cast<std::size_t>(i0)]);
      max_ll = std::max(max_ll, chunk_max[static_cast<std::size_t>(i0)]);
    }
    double ln_integral = total.value();
    if (ln_integral == kNegInf) {
      throw NumericError("log_evidence: likelihood underflows to zero over the whole grid");
    }
    result.log10_evidence = (ln_integral - priors.log_volume()) / kLn10;
    result.max_log10_likelihood = max_ll / kLn10;
  } else {
    std::int64_t n = quad.mc_samples;
    if (n < 2) throw ArgumentError("log_evidence: need at least 2 Monte Carlo samples");
    result.nodes_or_samples = n;

    std::vector<double> lls(static_cast<std::size_t>(n));
    std::vector<std::string> errors(static_cast<std::size_t>(n));
    parallel_for(static_cast<std::size_t>(n), quad.threads, [&](std::size_t t) {
      try {
        CounterRng rng = CounterRng::stream(quad.mc_seed, t);
        std::vector<double> theta(dims);
        for (std::size_t j = 0; j < dims; ++j) {
          theta[j] = rng.uniform(priors.bounds[j].lo, priors.bounds[j].hi);
        }
        double ll = log_likelihood_prepared(prepared, family, theta, base);
        if (std::isnan(ll) || ll == std::numeric_limits<double>::infinity()) {
          throw_nonfinite(family, theta);
        }
        lls[t] = ll;
      } catch (const Error& e) {
        errors[t] = e.what();
      }
    });
    for (const auto& err : errors) {
      if (!err.empty()) throw NumericError(err);
    }

    double max_ll = kNegInf;
    for (double ll : lls) max_ll = std::max(max_ll, ll);
    if (max_ll == kNegInf) {
      throw NumericError("log_evidence: likelihood underflows to zero for every sample");
    }
    double sum = 0.0;
    for (double ll : lls) sum += std::exp(ll - max_ll);
    double mean_shifted = sum / static_cast<double>(n);
    double ss = 0.0;
    for (double ll : lls) {
      double d = std::exp(ll - max_ll) - mean_shifted;
      ss += d * d;
    }
    double se_shifted = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
    // Evidence = E_uniform[exp(loglik)]; the prior volume cancels.
    result.log10_evidence = (max_ll + std::log(mean_shifted)) / kLn10;
    result.mc_standard_error = se_shifted / mean_shifted / kLn10;
    result.max_log10_likelihood = max_ll / kLn10;
  }

  // Prior averaging can never beat the maximum likelihood.
  if (result.log10_evidence > result.max_log10_likelihood + 1e-9) {
    throw NumericError("log_evidence: evidence exceeds the maximum likelihood bound");
  }
  if (!std::isfinite(result.log10_evidence)) {
    throw NumericError("log_evidence: non-finite evidence");
  }
  return result;
}

double log10_bayes_factor(const EvidenceResult& e1, const EvidenceResult& e2) {
  return e1.log10_evidence - e2.log10_evidence;
}

namespace {

// Radical-inverse (Halton) sequence for deterministic quasi-random starts.
double halton(std::uint64_t index, int base) {
  double result = 0.0;
  double f = 1.0;
  while (index > 0) {
    f /= base;
    result += f * static_cast<double>(index % static_cast<std::uint64_t>(base));
    index /= static_cast<std::uint64_t>(base);
  }
  return result;
}

constexpr int kHaltonBases[3] = {2, 3, 5};
constexpr int kFitStarts = 32;

struct NelderMeadResult {
  std::vector<double> params;
  double value = kNegInf;  // maximized objective
};

// Nelder-Mead ascent on the box-clipped objective. Every candidate vertex is
// clamped per coordinate before evaluation, which pins boundary optima.
NelderMeadResult nelder_mead_max(
    const PriorBox& box, std::span<const double> start,
    const std::function<double(std::span<const double>)>& objective) {
  const std::size_t d = box.dims();
  const double alpha = 1.0, gamma = 2.0, rho = 0.5, shrink = 0.5;
  const int max_iter = 600 * static_cast<int>(d);

  std::vector<std::vector<double>> simplex;
  simplex.push_back(box.clamp(start));
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> v = simplex[0];
    double step = 0.05 * box.bounds[j].width();
    v[j] = v[j] + step <= box.bounds[j].hi ? v[j] + step : v[j] - step;
    simplex.push_back(box.clamp(v));
  }
  std::vector<double> values(d + 1);
  for (std::size_t i = 0; i <= d; ++i) values[i] = objective(simplex[i]);

  std::vector<std::size_t> order(d + 1);
  for (int iter = 0; iter < max_iter; ++iter) {
    for (std::size_t i = 0; i <= d; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    std::size_t best = order[0], worst = order[d];
    std::size_t second_worst = order[d - 1];

    double spread = values[best] - values[worst];
    double diameter = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      double lo = simplex[0][j], hi = simplex[0][j];
      for (std::size_t i = 1; i <= d; ++i) {
        lo = std::min(lo, simplex[i][j]);
        hi = std::max(hi, simplex[i][j]);
      }
      diameter = std::max(diameter, (hi - lo) / std::max(box.bounds[j].width(), 1e-300));
    }
    if (spread <= 1e-13 * (std::abs(values[best]) + 1.0) && diameter <= 1e-11) break;

    std::vector<double> centroid(d, 0.0);
    for (std::size_t i = 0; i <= d; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < d; ++j) centroid[j] += simplex[i][j];
    }
    for (std::size_t j = 0; j < d; ++j) centroid[j] /= static_cast<double>(d);

    auto blend = [&](double t) {
      std::vector<double> v(d);
      for (std::size_t j = 0; j < d; ++j) {
        v[j] = centroid[j] + t * (centroid[j] - simplex[worst][j]);
      }
      return box.clamp(v);
    };

    std::vector<double> reflected = blend(alpha);
    double reflected_value = objective(reflected);
    if (reflected_value > values[best]) {
      std::vector<double> expanded = blend(gamma);
      double expanded_value = objective(expanded);
      if (expanded_value > reflected_value) {
        simplex[worst] = std::move(expanded);
        values[worst] = expanded_value;
      } else {
        simplex[worst] = std::move(reflected);
        values[worst] = reflected_value;
      }
      continue;
    }
    if (reflected_value > values[second_worst]) {
      simplex[worst] = std::move(reflected);
      values[worst] = reflected_value;
      continue;
    }
    std::vector<double> contracted = blend(-rho);
    double contracted_value = objective(contracted);
    if (contracted_value > values[worst]) {
      simplex[worst] = std::move(contracted);
      values[worst] = contracted_value;
      continue;
    }
    for (std::size_t i = 0; i <= d; ++i) {
      if (i == best) continue;
      for (std::size_t j = 0; j < d; ++j) {
        simplex[i][j] = simplex[best][j] + shrink * (simplex[i][j] - simplex[best][j]);
      }
      simplex[i] = box.clamp(simplex[i]);
      values[i] = objective(simplex[i]);
    }
  }

  NelderMeadResult out;
  std::size_t best = 0;
  for (std::size_t i = 1; i <= d; ++i) {
    if (values[i] > values[best]) best = i;
  }
  out.params = simplex[best];
  out.value = values[best];
  return out;
}

}  // namespace

FitResult best_fit(std::span<const AggregatedPoint> points, Family family,
                   const PriorBox& priors, Baseline base) {
  std::size_t dims = static_cast<std::size_t>(param_count(family));
  if (priors.dims() != dims) {
    throw ArgumentError("best_fit: prior box has " + std::to_string(priors.dims()) +
                        " intervals, family " + std::string(1, family_letter(family)) +
                        " needs " + std::to_string(dims));
  }
  if (points.size() < dims) {
    throw FitError("best_fit: " + std::to_string(points.size()) + " points cannot determine " +
                   std::to_string(dims) + " parameters");
  }
  auto prepared = prepare_points(points);
  auto objective = [&](std::span<const double> params) {
    return log_likelihood_prepared(prepared, family, params, base);
  };

  FitResult best;
  best.log_likelihood = kNegInf;
  for (int s = 1; s <= kFitStarts; ++s) {
    std::vector<double> start(dims);
    for (std::size_t j = 0; j < dims; ++j) {
      start[j] = priors.bounds[j].lo +
                 priors.bounds[j].width() * halton(static_cast<std::uint64_t>(s), kHaltonBases[j]);
    }
    NelderMeadResult run = nelder_mead_max(priors, start, objective);
    if (run.value > best.log_likelihood) {
      best.log_likelihood = run.value;
      best.params = std::move(run.params);
    }
  }
  if (!std::isfinite(best.log_likelihood)) {
    throw NumericError("best_fit: likelihood is non-finite over every start");
  }
  return best;
}

std::vector<Family> highlight_rule(std::span<const std::pair<Family, double>> evidences) {
  if (evidences.empty()) return {};
  std::size_t best = 0;
  for (std::size_t i = 1; i < evidences.size(); ++i) {
    if (evidences[i].second > evidences[best].second) best = i;
  }
  std::vector<Family> highlight{evidences[best].first};
  if (evidences.size() > 1) {
    std::size_t runner_up = best == 0 ? 1 : 0;
    for (std::size_t i = 0; i < evidences.size(); ++i) {
      if (i == best) continue;
      if (evidences[i].second > evidences[runner_up].second) runner_up = i;
    }
    if (evidences[best].second - evidences[runner_up].second <= 0.5) {
      highlight.push_back(evidences[runner_up].first);
    }
  }
  return highlight;
}

ComparisonTable compare_models(std::span<const AggregatedPoint> points, Baseline base,
                               const QuadSpec& quad) {
  ComparisonTable table;
  std::vector<std::pair<Family, double>> evidences;
  for (Family family : kAllFamilies) {
    PriorBox priors = default_priors(family, base);
    EvidenceResult ev = log_evidence(points, family, priors, base, quad);
    evidences.emplace_back(family, ev.log10_evidence);
    table.rows.push_back(ComparisonRow{family, std::move(ev)});
  }
  table.highlight = highlight_rule(evidences);
  return table;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

std::vector<SampleRecord> read_samples_csv(std::istream& in, const std::string& name) {
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != "dataset_id,fid,run,avg_dsc") {
    throw FormatError(name + ": expected header 'dataset_id,fid,run,avg_dsc'");
  }
  std::vector<SampleRecord> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto fields = split_line(line);
    if (fields.size() != 4) {
      throw FormatError(name + ":" + std::to_string(line_no) + ": expected 4 fields, got " +
                        std::to_string(fields.size()));
    }
    SampleRecord r;
    r.dataset_id = fields[0];
    try {
      std::size_t pos = 0;
      r.fid = std::stod(fields[1], &pos);
      if (pos != fields[1].size()) throw std::invalid_argument("trailing");
      pos = 0;
      r.run_index = std::stoi(fields[2], &pos);
      if (pos != fields[2].size()) throw std::invalid_argument("trailing");
      pos = 0;
      r.avg_dsc = std::stod(fields[3], &pos);
      if (pos != fields[3].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw FormatError(name + ":" + std::to_string(line_no) + ": malformed numeric field");
    }
    if (r.dataset_id.empty()) {
      throw FormatError(name + ":" + std::to_string(line_no) + ": empty dataset_id");
    }
    if (!(r.fid > 0.0)) {
      throw FormatError(name + ":" + std::to_string(line_no) + ": fid must be > 0, got " +
                        fields[1]);
    }
    if (!(r.avg_dsc >= 0.0 && r.avg_dsc <= 1.0)) {
      throw FormatError(name + ":" + std::to_string(line_no) +
                        ": avg_dsc outside [0, 1], got " + fields[3]);
    }
    records.push_back(std::move(r));
  }
  if (records.empty()) throw DataError(name + ": no sample records");
  return records;
}

std::vector<SampleRecord> read_samples_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open samples CSV: " + path.string());
  return read_samples_csv(in, path.string());
}

void write_samples_csv(std::span<const SampleRecord> samples, std::ostream& out) {
  out << "dataset_id,fid,run,avg_dsc\n";
  for (const auto& s : samples) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%.17g,%d,%.17g", s.fid, s.run_index, s.avg_dsc);
    out << s.dataset_id << "," << buf << "\n";
  }
}

void write_samples_csv(std::span<const SampleRecord> samples,
                       const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write samples CSV: " + path.string());
  write_samples_csv(samples, out);
  if (!out) throw DataError("write failed: " + path.string());
}

void write_comparison_csv(const ComparisonTable& table, std::ostream& out) {
  out << "family,log10_evidence,method,nodes_or_samples,mc_standard_error,highlight\n";
  for (const auto& row : table.rows) {
    bool highlighted = std::find(table.highlight.begin(), table.highlight.end(),
                                 row.family) != table.highlight.end();
    char value[48];
    std::snprintf(value, sizeof(value), "%.12g", row.evidence.log10_evidence);
    out << family_letter(row.family) << "," << value << ","
        << (row.evidence.method == EvidenceMethod::grid ? "grid" : "mc") << ","
        << row.evidence.nodes_or_samples << ",";
    if (row.evidence.mc_standard_error.has_value()) {
      std::snprintf(value, sizeof(value), "%.6g", *row.evidence.mc_standard_error);
      out << value;
    }
    out << "," << (highlighted ? 1 : 0) << "\n";
  }
}

}  // namespace augmetric
