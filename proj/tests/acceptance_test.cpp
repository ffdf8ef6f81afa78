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

// Acceptance suite: one criterion per function, one pass/fail line each.
// Every tolerance is pinned in code next to the check it guards.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "augmetric/augment.hpp"
#include "augmetric/features.hpp"
#include "augmetric/frechet.hpp"
#include "augmetric/image.hpp"
#include "augmetric/inference.hpp"
#include "augmetric/models.hpp"
#include "augmetric/pipeline.hpp"
#include "augmetric/rng.hpp"
#include "test_support.hpp"

using namespace augmetric;
using augmetric::testing::normal_cdf;
using augmetric::testing::random_image;
using augmetric::testing::random_mask;
using augmetric::testing::scratch_dir;
using augmetric::testing::synthetic_six_points;
using augmetric::testing::texture_corpus;

namespace {

struct Failure {
  std::string reason;
};

void require(bool ok, const std::string& reason) {
  if (!ok) throw Failure{reason};
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void require_runtime(std::chrono::steady_clock::time_point start, double limit,
                     const char* what) {
  double elapsed = seconds_since(start);
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%s took %.1f s, limit %.0f s", what, elapsed, limit);
  require(elapsed < limit, buf);
}

FeatureDistribution make_dist(Eigen::VectorXd mean, Eigen::MatrixXd cov) {
  FeatureDistribution d;
  d.mean = std::move(mean);
  d.cov = std::move(cov);
  d.n = 100;
  return d;
}

Eigen::MatrixXd random_spd(int dim, CounterRng& rng) {
  Eigen::MatrixXd m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) m(i, j) = rng.normal();
  }
  return m * m.transpose() / dim + 0.05 * Eigen::MatrixXd::Identity(dim, dim);
}

// --- criterion 1 -----------------------------------------------------------

void criterion_fid_closed_forms() {
  auto start = std::chrono::steady_clock::now();
  CounterRng rng(1001);

  // 25 one-dimensional pairs against the scalar closed form.
  for (int trial = 0; trial < 25; ++trial) {
    double mu_r = rng.uniform(-3, 3), mu_s = rng.uniform(-3, 3);
    double var_r = rng.uniform(0.1, 4.0), var_s = rng.uniform(0.1, 4.0);
    auto r = make_dist(Eigen::VectorXd::Constant(1, mu_r),
                       Eigen::MatrixXd::Constant(1, 1, var_r));
    auto s = make_dist(Eigen::VectorXd::Constant(1, mu_s),
                       Eigen::MatrixXd::Constant(1, 1, var_s));
    double expected =
        (mu_r - mu_s) * (mu_r - mu_s) +
        (std::sqrt(var_r) - std::sqrt(var_s)) * (std::sqrt(var_r) - std::sqrt(var_s));
    double got = frechet_distance(r, s).value;
    require(std::abs(got - expected) <= 1e-9 * std::max(expected, 1.0),
            "1-D closed form mismatch");
  }

  // 25 diagonal-covariance pairs against the per-dimension closed form.
  for (int trial = 0; trial < 25; ++trial) {
    int dim = 2 + static_cast<int>(rng.next_u64() % 15);
    Eigen::VectorXd mu_r(dim), mu_s(dim), var_r(dim), var_s(dim);
    for (int d = 0; d < dim; ++d) {
      mu_r(d) = rng.uniform(-3, 3);
      mu_s(d) = rng.uniform(-3, 3);
      var_r(d) = rng.uniform(0.1, 4.0);
      var_s(d) = rng.uniform(0.1, 4.0);
    }
    double expected = 0.0;
    for (int d = 0; d < dim; ++d) {
      expected += (mu_r(d) - mu_s(d)) * (mu_r(d) - mu_s(d));
      expected += var_r(d) + var_s(d) - 2.0 * std::sqrt(var_r(d) * var_s(d));
    }
    auto r = make_dist(mu_r, var_r.asDiagonal());
    auto s = make_dist(mu_s, var_s.asDiagonal());
    double got = frechet_distance(r, s).value;
    require(std::abs(got - expected) <= 1e-9 * std::max(expected, 1.0),
            "diagonal closed form mismatch");
  }

  // FID(P, P) <= 1e-6 for 20 random dense distributions, dim up to 64.
  for (int trial = 0; trial < 20; ++trial) {
    int dim = 2 + static_cast<int>(rng.next_u64() % 63);
    Eigen::VectorXd mu(dim);
    for (int d = 0; d < dim; ++d) mu(d) = rng.uniform(-2, 2);
    auto p = make_dist(mu, random_spd(dim, rng));
    require(frechet_distance(p, p).value <= 1e-6, "FID(P,P) above 1e-6");
  }
  require_runtime(start, 5.0, "criterion 1");
}

// --- criterion 2 -----------------------------------------------------------

void criterion_matrix_sqrt() {
  auto start = std::chrono::steady_clock::now();
  CounterRng rng(1002);
  for (int trial = 0; trial < 100; ++trial) {
    int dim = 2 + static_cast<int>(rng.next_u64() % 127);
    Eigen::MatrixXd a = random_spd(dim, rng);
    Eigen::MatrixXd root = sqrt_psd(a).root;
    double rel = (root * root - a).norm() / a.norm();
    require(rel < 1e-8, "sqrt reconstruction error " + std::to_string(rel));
  }
  require_runtime(start, 30.0, "criterion 2");
}

// --- criterion 3 -----------------------------------------------------------

void criterion_dsc_fixtures() {
  BinaryMask x(3, 3), y(3, 3);
  // |X| = 4, |Y| = 2, overlap 2.
  x.data = {1, 1, 0, 1, 1, 0, 0, 0, 0};
  y.data = {1, 1, 0, 0, 0, 0, 0, 0, 0};
  require(dsc(x, y).value() == 2.0 / 3.0, "2/3 fixture not exact");

  BinaryMask empty(3, 3);
  require(!dsc(empty, empty).has_value(), "0/0 must be undefined");
  require(dsc(x, empty).value() == 0.0, "one-empty must be 0");

  // Exclusion rule: disregard pairs with no real or predicted mask.
  std::vector<std::pair<BinaryMask, BinaryMask>> pairs = {{x, x}, {x, y}, {empty, empty}};
  require(average_dsc(pairs) == (1.0 + 2.0 / 3.0) / 2.0,
          "undefined pairs must be excluded from the mean");

  bool threw = false;
  try {
    std::vector<std::pair<BinaryMask, BinaryMask>> all_empty = {{empty, empty}};
    average_dsc(all_empty);
  } catch (const SampleSizeError&) {
    threw = true;
  }
  require(threw, "all-undefined input must raise an empty-sample error");
}

// --- criterion 4 -----------------------------------------------------------

void criterion_evidence_oracle() {
  auto start = std::chrono::steady_clock::now();
  Baseline base(0.5);

  // Analytic oracle: one point, y - dsc0 = 0.1, sigma = 0.05, prior [0, 0.5]:
  // evidence = 2 (Phi(8) - Phi(-2)).
  std::vector<AggregatedPoint> single = {{"p", 20.0, 0.6, 0.05, 30}};
  double oracle = std::log10(2.0 * (normal_cdf(8.0) - normal_cdf(-2.0)));
  EvidenceResult grid =
      log_evidence(single, Family::constant, default_priors(Family::constant, base), base);
  require(std::abs(grid.log10_evidence - oracle) < 1e-4,
          "analytic oracle off by " + std::to_string(grid.log10_evidence - oracle));

  // Grid vs Monte Carlo on all four families over the 6-point dataset.
  auto points = synthetic_six_points();
  for (Family family : kAllFamilies) {
    PriorBox priors = default_priors(family, base);
    QuadSpec gq;
    gq.threads = 2;
    EvidenceResult g = log_evidence(points, family, priors, base, gq);
    QuadSpec mq;
    mq.method = EvidenceMethod::monte_carlo;
    mq.threads = 2;
    EvidenceResult m = log_evidence(points, family, priors, base, mq);
    double gap = std::abs(g.log10_evidence - m.log10_evidence);
    require(m.mc_standard_error.has_value(), "MC must report a standard error");
    require(gap <= 3.0 * *m.mc_standard_error,
            std::string("family ") + family_letter(family) + ": grid-MC gap " +
                std::to_string(gap) + " exceeds 3 se = " +
                std::to_string(3.0 * *m.mc_standard_error));
  }
  require_runtime(start, 60.0, "criterion 4");
}

// --- criterion 5 -----------------------------------------------------------

void criterion_evidence_bound_and_convergence() {
  Baseline base(0.5);
  auto points = synthetic_six_points();
  std::vector<AggregatedPoint> single = {{"p", 20.0, 0.6, 0.05, 30}};

  for (const auto& dataset : {points, single}) {
    for (Family family : kAllFamilies) {
      PriorBox priors = default_priors(family, base);
      QuadSpec q;
      q.threads = 2;
      EvidenceResult coarse = log_evidence(dataset, family, priors, base, q);
      require(coarse.log10_evidence <= coarse.max_log10_likelihood + 1e-12,
              "evidence exceeds the prior-averaging bound");

      QuadSpec fine;
      fine.threads = 2;
      fine.nodes_per_axis = param_count(family) == 3 ? 202 : 402;
      EvidenceResult refined = log_evidence(dataset, family, priors, base, fine);
      double drift = std::abs(refined.log10_evidence - coarse.log10_evidence);
      require(drift < 1e-3, std::string("family ") + family_letter(family) +
                                ": doubling nodes moved evidence by " +
                                std::to_string(drift));
    }
  }
}

// --- criterion 6 -----------------------------------------------------------

void criterion_table_interface() {
  using P = std::pair<Family, double>;
  std::vector<P> standard_25 = {{Family::constant, 7.661},
                                {Family::linear, 5.598},
                                {Family::log_normal, 7.661},
                                {Family::reciprocal, 5.132}};
  auto both = highlight_rule(standard_25);
  require(both.size() == 2 && both[0] == Family::constant && both[1] == Family::log_normal,
          "tied column must highlight f and h");

  std::vector<P> synthetic_25 = {{Family::constant, 17.77},
                                 {Family::linear, 17.10},
                                 {Family::log_normal, 18.45},
                                 {Family::reciprocal, 17.59}};
  auto single = highlight_rule(synthetic_25);
  require(single.size() == 1 && single[0] == Family::log_normal,
          "0.68 gap must highlight h alone");

  EvidenceResult h, g;
  h.log10_evidence = 18.45;
  g.log10_evidence = 17.10;
  require(std::abs(log10_bayes_factor(h, g) - 1.35) < 1e-12,
          "log10 K for 18.45 vs 17.10 must be 1.35");
}

// --- criterion 7 -----------------------------------------------------------

void criterion_model_recovery() {
  auto start = std::chrono::steady_clock::now();
  Baseline base(0.5);
  std::vector<double> truth = {0.057, 4.552, 0.467};
  const double noise_sd = 0.016;

  std::ostringstream cfg;
  cfg << "kind = fid_sweep\nbase_size = 650\nincrements = 99\nsamples_per_point = 30\n"
      << "seed = 7\ndatasets = d0,d1,d2,d3,d4,d5,d6,d7\n";
  for (int i = 0; i < 8; ++i) {
    double fid = 13.0 * std::pow(260.0 / 13.0, i / 7.0);
    cfg << "dataset.d" << i << ".fid = " << fid << "\n";
  }
  std::istringstream cfg_in(cfg.str());
  SweepPlan plan = plan_sweep(KeyValueConfig::parse(cfg_in, "recovery.cfg"));

  int comparison_wins = 0;
  int fit_recoveries = 0;
  const int kSeeds = 50;
  for (int seed = 0; seed < kSeeds; ++seed) {
    auto records = simulate_runs(plan, Family::log_normal, truth, base, noise_sd,
                                 static_cast<std::uint64_t>(seed));
    auto points = aggregate(records);

    QuadSpec quad;
    quad.threads = 2;
    ComparisonTable table = compare_models(points, base, quad);
    if (!table.highlight.empty() && table.highlight[0] == Family::log_normal) {
      ++comparison_wins;
    }

    FitResult fit = best_fit(points, Family::log_normal,
                             default_priors(Family::log_normal, base), base);
    bool within = true;
    for (std::size_t j = 0; j < 3; ++j) {
      within = within && std::abs(fit.params[j] - truth[j]) <= 0.10 * truth[j];
    }
    if (within) ++fit_recoveries;
  }
  require(comparison_wins >= 45, "compare_models selected h in only " +
                                     std::to_string(comparison_wins) + "/50 seeds");
  require(fit_recoveries >= 45, "best_fit recovered the truth within 10% in only " +
                                    std::to_string(fit_recoveries) + "/50 seeds");
  require_runtime(start, 600.0, "criterion 7");
}

// --- criterion 8 -----------------------------------------------------------

void criterion_blur_monotonicity() {
  const int kImages = 100;
  const int kSide = 64;
  auto corpus = texture_corpus(kImages, kSide, 4242);

  ReferenceEmbedder embedder(48, 11);
  auto embed_corpus = [&](const std::vector<GrayImage>& images) {
    FeatureSet fs;
    fs.dim = 48;
    for (const auto& img : images) fs.append_row(embedder.embed(img));
    return fit_gaussian(fs);
  };
  FeatureDistribution source = embed_corpus(corpus);

  // The four published blur ranges, weakest to strongest.
  const std::pair<double, double> ranges[4] = {
      {0.010, 0.200}, {0.200, 1.000}, {1.000, 3.000}, {3.000, 7.000}};
  double previous = -1.0;
  for (int level = 0; level < 4; ++level) {
    std::vector<GrayImage> blurred;
    blurred.reserve(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      CounterRng rng = CounterRng::stream(5000 + static_cast<std::uint64_t>(level), i);
      blurred.push_back(
          gaussian_blur(corpus[i], rng.uniform(ranges[level].first, ranges[level].second)));
    }
    double fid = frechet_distance(source, embed_corpus(blurred)).value;
    require(fid > previous, "blur level " + std::to_string(level) + " FID " +
                                std::to_string(fid) + " not above previous " +
                                std::to_string(previous));
    previous = fid;
  }
}

// --- criterion 9 -----------------------------------------------------------

void criterion_pipeline_determinism() {
  auto run_pipeline = [](const std::filesystem::path& out, int threads) {
    std::istringstream cfg(
        "kind = fid_sweep\nbase_size = 650\nincrements = 99\nsamples_per_point = 30\n"
        "seed = 12\ndatasets = a,b,c,d,e\ndataset.a.fid = 14\ndataset.b.fid = 33\n"
        "dataset.c.fid = 80\ndataset.d.fid = 150\ndataset.e.fid = 250\n");
    SweepPlan plan = plan_sweep(KeyValueConfig::parse(cfg, "det.cfg"));
    Baseline base(0.5);
    std::vector<double> params = {0.057, 4.552, 0.467};
    auto records = simulate_runs(plan, Family::log_normal, params, base, 0.016, 99);
    require(verify_plan_coverage(plan, records).empty(), "plan coverage gap");

    write_samples_csv(records, out / "samples.csv");
    QuadSpec quad;
    quad.threads = threads;
    SeriesReport report = build_series_report(records, "det", base, quad);
    std::vector<SeriesReport> reports;
    reports.push_back(std::move(report));
    render_report(reports, out);
  };

  auto read_file = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    require(static_cast<bool>(in), "missing report file " + p.string());
    return std::string(std::istreambuf_iterator<char>(in), {});
  };

  auto d1 = scratch_dir("acc_det1");
  auto d2 = scratch_dir("acc_det2");
  auto d3 = scratch_dir("acc_det3");
  run_pipeline(d1, 1);
  run_pipeline(d2, 1);
  run_pipeline(d3, 4);
  for (const char* name : {"samples.csv", "comparison_det.csv", "plot_det.csv",
                           "curve_det.csv", "bestfit.csv"}) {
    std::string reference = read_file(d1 / name);
    require(reference == read_file(d2 / name),
            std::string(name) + " differs between two identical runs");
    require(reference == read_file(d3 / name),
            std::string(name) + " differs between serial and parallel runs");
  }
  std::filesystem::remove_all(d1);
  std::filesystem::remove_all(d2);
  std::filesystem::remove_all(d3);
}

// --- criterion 10 ----------------------------------------------------------

void criterion_round_trips() {
  CounterRng rng(1010);
  for (int trial = 0; trial < 50; ++trial) {
    int w = 2 + static_cast<int>(rng.next_u64() % 40);
    int h = 2 + static_cast<int>(rng.next_u64() % 40);
    GrayImage scan = random_image(w, h, rng);
    BinaryMask mask = random_mask(w, h, rng);
    auto [scan2, mask2] = unpack(pack(scan, mask));
    require(scan2 == scan && mask2 == mask, "pack/unpack round trip not bit-exact");
  }

  auto dir = scratch_dir("acc_feat");
  FeatureSet fs;
  fs.dim = 32;
  for (int r = 0; r < 20; ++r) {
    std::vector<float> row(32);
    for (auto& v : row) v = static_cast<float>(rng.normal());
    fs.append_row(row);
  }
  save_features(fs, dir / "rt.feat");
  FeatureSet loaded = load_features(dir / "rt.feat");
  require(loaded.dim == fs.dim && loaded.values == fs.values,
          "feature file round trip not bit-exact");
  std::filesystem::remove_all(dir);
}

}  // namespace

int main() {
  struct Criterion {
    int number;
    const char* name;
    std::function<void()> run;
  };
  std::vector<Criterion> criteria = {
      {1, "FID matches closed forms; FID(P,P) ~ 0", criterion_fid_closed_forms},
      {2, "matrix square root reconstructs SPD inputs", criterion_matrix_sqrt},
      {3, "DSC fixtures exact, undefined pairs excluded", criterion_dsc_fixtures},
      {4, "evidence matches the analytic oracle; grid agrees with MC",
       criterion_evidence_oracle},
      {5, "evidence bounded by max likelihood; grid converged",
       criterion_evidence_bound_and_convergence},
      {6, "published-table highlight rule and Bayes factors", criterion_table_interface},
      {7, "model recovery from simulated runs", criterion_model_recovery},
      {8, "blur levels produce strictly increasing FID", criterion_blur_monotonicity},
      {9, "pipeline is byte-deterministic", criterion_pipeline_determinism},
      {10, "pack/unpack and feature files are bit-exact", criterion_round_trips},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    try {
      criterion.run();
      std::printf("[PASS] criterion %d: %s\n", criterion.number, criterion.name);
    } catch (const Failure& f) {
      ++failures;
      std::printf("[FAIL] criterion %d: %s -- %s\n", criterion.number, criterion.name,
                  f.reason.c_str());
    } catch (const std::exception& e) {
      ++failures;
      std::printf("[FAIL] criterion %d: %s -- unexpected error: %s\n", criterion.number,
                  criterion.name, e.what());
    }
    std::fflush(stdout);
  }
  if (failures == 0) {
    std::printf("all %zu acceptance criteria passed\n", criteria.size());
  } else {
    std::printf("%d acceptance criteria FAILED\n", failures);
  }
  return failures == 0 ? 0 : 1;
}
