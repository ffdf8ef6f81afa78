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
#include <optional>
#include <string>
#include <vector>

#include "augmetric/error.hpp"
#include "augmetric/image.hpp"
#include "augmetric/rng.hpp"

namespace augmetric {

enum class AugmentationKind { horizontal_flip, gaussian_blur, additive_noise };

// One augmentation recipe. For blur, [lo, hi] is the per-image sigma range;
// for noise it is the per-image scale-factor range; unused for flips.
struct AugmentationSpec {
  AugmentationKind kind = AugmentationKind::horizontal_flip;
  double lo = 0.0;
  double hi = 0.0;
  std::uint64_t seed = 0;

  static AugmentationSpec horizontal_flip(std::uint64_t seed);
  static AugmentationSpec gaussian_blur(double sigma_min, double sigma_max,
                                        std::uint64_t seed);
  static AugmentationSpec additive_noise(double scale_min, double scale_max,
                                         std::uint64_t seed);

  // Canonical text, e.g. "blur(sigma_min=0.2,sigma_max=1,seed=7)". Parses its
  // own output and the short CLI form "blur:0.2,1" (seed supplied separately).
  std::string canonical_text() const;
  static AugmentationSpec parse(const std::string& text, std::uint64_t seed = 0);
};

struct ManifestEntry {
  std::string scan_path;
  std::string mask_path;
};

// Ordered list of (scan, mask) file pairs plus provenance. Paths are stored
// as written in the manifest file and resolved against base_dir.
struct DatasetManifest {
  std::string id;
  std::vector<ManifestEntry> entries;
  std::optional<AugmentationSpec> provenance;
  std::filesystem::path base_dir;

  std::filesystem::path resolve_scan(std::size_t i) const;
  std::filesystem::path resolve_mask(std::size_t i) const;
};

// Line-oriented manifest file: header "augmetric-manifest v1", optional
// "# id:" and "# spec:" comments, then one "scan<TAB>mask" entry per line.
DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

GrayImage hflip(const GrayImage& img);
BinaryMask hflip(const BinaryMask& mask);
PackedImage hflip(const PackedImage& img);

// Separable Gaussian convolution, kernel radius ceil(3*sigma), reflect
// padding, kernel normalised to sum 1, rounded to 8 bits once at the end.
// sigma = 0 returns the image unchanged.
GrayImage gaussian_blur(const GrayImage& img, double sigma);

// Adds a per-pixel standard-normal noise field scaled by a single factor,
// then min-max renormalises the result to span [0, 255]. A flat result
// (degenerate renormalisation) maps to the all-zero image with a warning.
GrayImage add_noise(const GrayImage& img, double scale, CounterRng& rng,
                    Diagnostics* diag = nullptr);

// Applies `spec` to every entry of `src`, writing images and a manifest.txt
// into out_dir. Per-image parameters come from CounterRng::stream(spec.seed,
// image_index), so serial and parallel runs produce identical bytes. Masks
// are flipped for flips and copied unchanged for blur/noise.
DatasetManifest build_augmented_dataset(const DatasetManifest& src,
                                        const AugmentationSpec& spec,
                                        const std::filesystem::path& out_dir,
                                        int threads = 1,
                                        Diagnostics* diag = nullptr);

}  // namespace augmetric
