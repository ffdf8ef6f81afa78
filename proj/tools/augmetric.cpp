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

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <vector>

#include "augmetric/augment.hpp"
#include "augmetric/features.hpp"
#include "augmetric/frechet.hpp"
#include "augmetric/image.hpp"
#include "augmetric/inference.hpp"
#include "augmetric/models.hpp"
#include "augmetric/pipeline.hpp"
#include "augmetric/pnm.hpp"

namespace fs = std::filesystem;
using namespace augmetric;

namespace {

void print_warnings(const Diagnostics& diag) {
  for (const auto& w : diag.warnings) std::cerr << "warning: " << w << "\n";
}

bool is_feat_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open: " + path.string());
  char magic[4] = {};
  in.read(magic, 4);
  return in && magic[0] == 'F' && magic[1] == 'E' && magic[2] == 'A' && magic[3] == 'T';
}

FeatureDistribution distribution_from_input(const fs::path& path, const EmbedderSpec& spec,
                                            int threads) {
  FeatureSet fs_set = is_feat_file(path) ? load_features(path)
                                         : embed_dataset(load_manifest(path), spec, threads);
  return fit_gaussian(fs_set);
}

std::vector<std::pair<fs::path, fs::path>> pair_mask_files(const fs::path& pred,
                                                           const fs::path& truth) {
  std::vector<std::pair<fs::path, fs::path>> pairs;
  if (fs::is_directory(pred) != fs::is_directory(truth)) {
    throw DataError("dsc: --pred and --truth must both be files or both directories");
  }
  if (!fs::is_directory(pred)) {
    pairs.emplace_back(pred, truth);
    return pairs;
  }
  std::vector<fs::path> names;
  for (const auto& entry : fs::directory_iterator(pred)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pgm") {
      names.push_back(entry.path().filename());
    }
  }
  std::sort(names.begin(), names.end());
  for (const auto& name : names) {
    fs::path other = truth / name;
    if (!fs::exists(other)) {
      throw DataError("dsc: no matching truth mask for " + name.string());
    }
    pairs.emplace_back(pred / name, other);
  }
  if (pairs.empty()) throw DataError("dsc: no .pgm files found in " + pred.string());
  return pairs;
}

QuadSpec make_quad(const std::string& method, int nodes, std::int64_t mc_samples,
                   std::uint64_t mc_seed, int threads) {
  QuadSpec quad;
  if (method == "grid") {
    quad.method = EvidenceMethod::grid;
  } else if (method == "mc") {
    quad.method = EvidenceMethod::monte_carlo;
  } else {
    throw ConfigError("--method must be grid or mc, got '" + method + "'");
  }
  quad.nodes_per_axis = nodes;
  quad.mc_samples = mc_samples;
  quad.mc_seed = mc_seed;
  quad.threads = threads;
  return quad;
}

void print_evidence_row(std::ostream& out, Family family, const EvidenceResult& ev) {
  char value[48];
  std::snprintf(value, sizeof(value), "%.12g", ev.log10_evidence);
  out << family_letter(family) << "," << value << ","
      << (ev.method == EvidenceMethod::grid ? "grid" : "mc") << "," << ev.nodes_or_samples
      << ",";
  if (ev.mc_standard_error.has_value()) {
    std::snprintf(value, sizeof(value), "%.6g", *ev.mc_standard_error);
    out << value;
  }
  out << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"augmetric: dataset similarity (FID), Dice scoring, augmentation, and "
               "Bayesian model comparison for segmentation experiments"};
  app.require_subcommand(1);

  // dsc
  auto* dsc_cmd = app.add_subcommand("dsc", "Average Dice score of predicted vs truth masks");
  std::string dsc_pred, dsc_truth;
  dsc_cmd->add_option("--pred", dsc_pred, "Predicted mask PGM file or directory")->required();
  dsc_cmd->add_option("--truth", dsc_truth, "Ground-truth mask PGM file or directory")
      ->required();

  // fid
  auto* fid_cmd = app.add_subcommand("fid", "Frechet distance between two datasets");
  std::string fid_a, fid_b, fid_embedder = "reference";
  std::uint32_t fid_dim = 256;
  std::uint64_t fid_seed = 1;
  int fid_threads = 1;
  fid_cmd->add_option("--a", fid_a, "Manifest or FEAT feature file")->required();
  fid_cmd->add_option("--b", fid_b, "Manifest or FEAT feature file")->required();
  fid_cmd->add_option("--embedder", fid_embedder, "Embedder kind (reference)");
  fid_cmd->add_option("--dim", fid_dim, "Reference embedder output dimension");
  fid_cmd->add_option("--seed", fid_seed, "Reference embedder projection seed");
  fid_cmd->add_option("--threads", fid_threads, "Worker threads");

  // augment
  auto* aug_cmd = app.add_subcommand("augment", "Build an augmented dataset");
  std::string aug_in, aug_spec, aug_out;
  std::uint64_t aug_seed = 0;
  int aug_threads = 1;
  aug_cmd->add_option("--in", aug_in, "Source manifest")->required();
  aug_cmd->add_option("--spec", aug_spec, "hflip | blur:smin,smax | noise:smin,smax")
      ->required();
  aug_cmd->add_option("--seed", aug_seed, "Augmentation seed");
  aug_cmd->add_option("--out", aug_out, "Output directory")->required();
  aug_cmd->add_option("--threads", aug_threads, "Worker threads");

  // pack / unpack
  auto* pack_cmd = app.add_subcommand("pack", "Pack scan + mask into an RGB training image");
  std::string pack_scan, pack_mask, pack_out;
  pack_cmd->add_option("--scan", pack_scan, "Scan PGM")->required();
  pack_cmd->add_option("--mask", pack_mask, "Mask PGM")->required();
  pack_cmd->add_option("--out", pack_out, "Output PPM")->required();

  auto* unpack_cmd = app.add_subcommand("unpack", "Recover scan + mask from a packed image");
  std::string unpack_in, unpack_scan, unpack_mask;
  unpack_cmd->add_option("--in", unpack_in, "Packed PPM")->required();
  unpack_cmd->add_option("--scan", unpack_scan, "Output scan PGM")->required();
  unpack_cmd->add_option("--mask", unpack_mask, "Output mask PGM")->required();

  // evidence
  auto* ev_cmd = app.add_subcommand("evidence", "log10 model evidences from samples");
  std::string ev_samples, ev_family = "all", ev_method = "grid";
  double ev_dsc0 = 0.0;
  int ev_nodes = 0, ev_threads = 1;
  std::int64_t ev_mc_samples = 200000;
  std::uint64_t ev_mc_seed = 0x5eedcafe;
  ev_cmd->add_option("--samples", ev_samples, "Samples CSV")->required();
  ev_cmd->add_option("--dsc0", ev_dsc0, "Unaugmented baseline mean DSC")->required();
  ev_cmd->add_option("--family", ev_family, "f|g|h|k|all");
  ev_cmd->add_option("--method", ev_method, "grid|mc");
  ev_cmd->add_option("--nodes", ev_nodes, "Grid nodes per axis (0 = default)");
  ev_cmd->add_option("--mc-samples", ev_mc_samples, "Monte Carlo sample count");
  ev_cmd->add_option("--mc-seed", ev_mc_seed, "Monte Carlo seed");
  ev_cmd->add_option("--threads", ev_threads, "Worker threads");

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "Bounded maximum-likelihood fit");
  std::string fit_samples, fit_family = "h";
  double fit_dsc0 = 0.0;
  fit_cmd->add_option("--samples", fit_samples, "Samples CSV")->required();
  fit_cmd->add_option("--dsc0", fit_dsc0, "Unaugmented baseline mean DSC")->required();
  fit_cmd->add_option("--family", fit_family, "f|g|h|k");

  // compare
  auto* cmp_cmd = app.add_subcommand("compare", "Model comparison table with highlights");
  std::string cmp_samples, cmp_method = "grid";
  double cmp_dsc0 = 0.0;
  int cmp_nodes = 0, cmp_threads = 1;
  std::int64_t cmp_mc_samples = 200000;
  std::uint64_t cmp_mc_seed = 0x5eedcafe;
  cmp_cmd->add_option("--samples", cmp_samples, "Samples CSV")->required();
  cmp_cmd->add_option("--dsc0", cmp_dsc0, "Unaugmented baseline mean DSC")->required();
  cmp_cmd->add_option("--method", cmp_method, "grid|mc");
  cmp_cmd->add_option("--nodes", cmp_nodes, "Grid nodes per axis (0 = default)");
  cmp_cmd->add_option("--mc-samples", cmp_mc_samples, "Monte Carlo sample count");
  cmp_cmd->add_option("--mc-seed", cmp_mc_seed, "Monte Carlo seed");
  cmp_cmd->add_option("--threads", cmp_threads, "Worker threads");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Generate samples from a model + plan");
  std::string sim_plan, sim_family = "h", sim_params, sim_out;
  double sim_dsc0 = 0.0, sim_noise = 0.0;
  std::uint64_t sim_seed = 0;
  sim_cmd->add_option("--plan", sim_plan, "Sweep plan config file")->required();
  sim_cmd->add_option("--family", sim_family, "f|g|h|k");
  sim_cmd->add_option("--params", sim_params, "e.g. A=0.057,mu=4.552,sigma=0.467")->required();
  sim_cmd->add_option("--dsc0", sim_dsc0, "Unaugmented baseline mean DSC")->required();
  sim_cmd->add_option("--noise", sim_noise, "Per-run Gaussian noise sd")->required();
  sim_cmd->add_option("--seed", sim_seed, "Simulation seed");
  sim_cmd->add_option("--out", sim_out, "Output CSV (default: stdout)");

  // report
  auto* rep_cmd = app.add_subcommand("report", "Comparison + best-fit + plot-data files");
  std::string rep_samples, rep_out, rep_series = "series", rep_method = "grid";
  double rep_dsc0 = 0.0;
  int rep_nodes = 0, rep_threads = 1;
  rep_cmd->add_option("--samples", rep_samples, "Samples CSV")->required();
  rep_cmd->add_option("--dsc0", rep_dsc0, "Unaugmented baseline mean DSC")->required();
  rep_cmd->add_option("--out", rep_out, "Output directory")->required();
  rep_cmd->add_option("--series", rep_series, "Series name used in file names");
  rep_cmd->add_option("--method", rep_method, "grid|mc");
  rep_cmd->add_option("--nodes", rep_nodes, "Grid nodes per axis (0 = default)");
  rep_cmd->add_option("--threads", rep_threads, "Worker threads");

  dsc_cmd->callback([&] {
    auto pairs = pair_mask_files(dsc_pred, dsc_truth);
    std::vector<std::optional<double>> scores;
    for (const auto& [p, t] : pairs) {
      scores.push_back(dsc(read_mask_pgm(p), read_mask_pgm(t)));
    }
    std::size_t excluded = 0;
    for (const auto& s : scores) excluded += !s.has_value();
    if (excluded > 0) {
      std::cerr << "warning: excluded " << excluded << " pair(s) with undefined DSC\n";
    }
    std::printf("%.10g\n", average_dsc(scores));
  });

  fid_cmd->callback([&] {
    if (fid_embedder != "reference") {
      throw ConfigError("--embedder must be 'reference' (external features load from FEAT "
                        "files directly)");
    }
    EmbedderSpec spec = EmbedderSpec::reference(fid_dim, fid_seed);
    FeatureDistribution a = distribution_from_input(fid_a, spec, fid_threads);
    FeatureDistribution b = distribution_from_input(fid_b, spec, fid_threads);
    FidResult r = frechet_distance(a, b);
    std::printf("%.10g\n", r.value);
    std::printf("mean_term=%.10g trace_term=%.10g clamped_negative_eigenvalue_mass=%.4g "
                "dim=%d n_a=%lld n_b=%lld\n",
                r.mean_term, r.trace_term, r.clamped_negative_eigenvalue_mass, a.dim(),
                static_cast<long long>(a.n), static_cast<long long>(b.n));
  });

  aug_cmd->callback([&] {
    DatasetManifest src = load_manifest(aug_in);
    AugmentationSpec spec = AugmentationSpec::parse(aug_spec, aug_seed);
    Diagnostics diag;
    build_augmented_dataset(src, spec, aug_out, aug_threads, &diag);
    print_warnings(diag);
    std::cout << (fs::path(aug_out) / "manifest.txt").string() << "\n";
  });

  pack_cmd->callback([&] {
    write_ppm(pack(read_pgm(pack_scan), read_mask_pgm(pack_mask)), pack_out);
  });

  unpack_cmd->callback([&] {
    auto [scan, mask] = unpack(read_ppm(unpack_in));
    write_pgm(scan, unpack_scan);
    write_mask_pgm(mask, unpack_mask);
  });

  ev_cmd->callback([&] {
    auto records = read_samples_csv(fs::path(ev_samples));
    Diagnostics diag;
    auto points = aggregate(records, AggregateOptions{}, &diag);
    print_warnings(diag);
    Baseline base(ev_dsc0);
    QuadSpec quad = make_quad(ev_method, ev_nodes, ev_mc_samples, ev_mc_seed, ev_threads);
    std::cout << "family,log10_evidence,method,nodes_or_samples,mc_standard_error\n";
    if (ev_family == "all") {
      for (Family family : kAllFamilies) {
        print_evidence_row(std::cout, family,
                           log_evidence(points, family, default_priors(family, base), base,
                                        quad));
      }
    } else {
      Family family = family_from_name(ev_family);
      print_evidence_row(std::cout, family,
                         log_evidence(points, family, default_priors(family, base), base,
                                      quad));
    }
  });

  fit_cmd->callback([&] {
    auto records = read_samples_csv(fs::path(fit_samples));
    Diagnostics diag;
    auto points = aggregate(records, AggregateOptions{}, &diag);
    print_warnings(diag);
    Baseline base(fit_dsc0);
    Family family = family_from_name(fit_family);
    FitResult fit = best_fit(points, family, default_priors(family, base), base);
    std::cout << "family";
    for (const auto& name : param_names(family)) std::cout << "," << name;
    std::cout << ",log_likelihood\n" << family_letter(family);
    for (double p : fit.params) std::printf(",%.12g", p);
    std::printf(",%.12g\n", fit.log_likelihood);
  });

  cmp_cmd->callback([&] {
    auto records = read_samples_csv(fs::path(cmp_samples));
    Diagnostics diag;
    auto points = aggregate(records, AggregateOptions{}, &diag);
    print_warnings(diag);
    Baseline base(cmp_dsc0);
    QuadSpec quad = make_quad(cmp_method, cmp_nodes, cmp_mc_samples, cmp_mc_seed, cmp_threads);
    write_comparison_csv(compare_models(points, base, quad), std::cout);
  });

  sim_cmd->callback([&] {
    SweepPlan plan = plan_sweep_file(sim_plan);
    Family family = family_from_name(sim_family);
    std::vector<double> params = parse_params(family, sim_params);
    auto records = simulate_runs(plan, family, params, Baseline(sim_dsc0), sim_noise, sim_seed);
    if (sim_out.empty()) {
      write_samples_csv(records, std::cout);
    } else {
      write_samples_csv(records, fs::path(sim_out));
      std::cout << sim_out << "\n";
    }
  });

  rep_cmd->callback([&] {
    auto records = ingest_results(rep_samples);
    Baseline base(rep_dsc0);
    QuadSpec quad = make_quad(rep_method, rep_nodes, 200000, 0x5eedcafe, rep_threads);
    Diagnostics diag;
    SeriesReport report = build_series_report(records, rep_series, base, quad, &diag);
    print_warnings(diag);
    std::vector<SeriesReport> reports;
    reports.push_back(std::move(report));
    render_report(reports, rep_out);
    for (const auto& entry : fs::directory_iterator(rep_out)) {
      std::cout << entry.path().string() << "\n";
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
