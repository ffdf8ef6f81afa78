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
#include <span>
#include <string>
#include <vector>

#include "augmetric/augment.hpp"
#include "augmetric/frechet.hpp"
#include "augmetric/image.hpp"

namespace augmetric {

// Per-image feature vectors, one row per image, stored row-major as float32
// to match the on-disk format bit for bit.
struct FeatureSet {
  std::uint32_t dim = 0;
  std::vector<float> values;  // row_count() * dim
  std::string source_id;

  std::size_t row_count() const { return dim == 0 ? 0 : values.size() / dim; }
  std::span<const float> row(std::size_t i) const {
    return std::span<const float>(values.data() + i * dim, dim);
  }
  void append_row(std::span<const float> row);
};

struct EmbedderSpec {
  enum class Kind { reference, external };
  Kind kind = Kind::reference;
  std::uint32_t dim = 256;
  std::uint64_t seed = 0;
  std::filesystem::path file;

  static EmbedderSpec reference(std::uint32_t dim, std::uint64_t seed);
  static EmbedderSpec external(std::filesystem::path file);
};

// Deterministic stand-in for the pretrained feature network: mean-pool the
// image to 32x32 (area-weighted for non-divisible sizes), scale intensities
// to [0, 1], and project by a fixed seeded random matrix (dim x 1024,
// standard-normal entries drawn once from the seed).
class ReferenceEmbedder {
 public:
  static constexpr int kPooledSide = 32;
  static constexpr int kInputDim = kPooledSide * kPooledSide;

  ReferenceEmbedder(std::uint32_t dim, std::uint64_t seed);

  std::vector<float> embed(const GrayImage& img) const;

  std::uint32_t dim() const { return dim_; }
  // Row-major dim x 1024 projection entries; exposed so tests can replay the
  // projection independently.
  const std::vector<double>& projection() const { return projection_; }

  // Area-weighted mean pooling to a 32x32 grid of [0, 1] intensities.
  static std::vector<double> pool_to_unit_grid(const GrayImage& img);

 private:
  std::uint32_t dim_;
  std::vector<double> projection_;
};

std::vector<float> embed(const GrayImage& img, const EmbedderSpec& spec);

// One row per manifest entry, order preserved regardless of thread count.
FeatureSet embed_dataset(const DatasetManifest& manifest, const EmbedderSpec& spec,
                         int threads = 1);

// Feature file format (bit-exact): magic "FEAT", version u16 = 1, count u32,
// dim u32, then count*dim IEEE-754 float32, row-major, little-endian.
void save_features(const FeatureSet& fs, const std::filesystem::path& path);
FeatureSet load_features(const std::filesystem::path& path);

// Sample mean and unbiased (n-1) sample covariance, computed in double.
FeatureDistribution fit_gaussian(const FeatureSet& fs);

}  // namespace augmetric
