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

#include "augmetric/features.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "augmetric/parallel.hpp"
#include "augmetric/pnm.hpp"
#include "augmetric/rng.hpp"

namespace augmetric {

namespace {

constexpr char kMagic[4] = {'F', 'E', 'A', 'T'};
constexpr std::uint16_t kVersion = 1;

void put_u16_le(std::ostream& out, std::uint16_t v) {
  char b[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
  out.write(b, 2);
}

void put_u32_le(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

std::uint16_t get_u16_le(std::istream& in) {
  unsigned char b[2];
  in.read(reinterpret_cast<char*>(b), 2);
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

std::uint32_t get_u32_le(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void FeatureSet::append_row(std::span<const float> row) {
  if (row.size() != dim) {
    throw ShapeError("FeatureSet: row has length " + std::to_string(row.size()) +
                     ", expected " + std::to_string(dim));
  }
  values.insert(values.end(), row.begin(), row.end());
}

EmbedderSpec EmbedderSpec::reference(std::uint32_t dim, std::uint64_t seed) {
  if (dim < 2) throw ArgumentError("EmbedderSpec: dim must be >= 2");
  EmbedderSpec s;
  s.kind = Kind::reference;
  s.dim = dim;
  s.seed = seed;
  return s;
}

EmbedderSpec EmbedderSpec::external(std::filesystem::path file) {
  EmbedderSpec s;
  s.kind = Kind::external;
  s.file = std::move(file);
  return s;
}

ReferenceEmbedder::ReferenceEmbedder(std::uint32_t dim, std::uint64_t seed) : dim_(dim) {
  if (dim < 2) throw ArgumentError("ReferenceEmbedder: dim must be >= 2");
  projection_.resize(static_cast<std::size_t>(dim) * kInputDim);
  CounterRng rng = CounterRng::stream(seed, 0);
  for (double& entry : projection_) entry = rng.normal();
}

std::vector<double> ReferenceEmbedder::pool_to_unit_grid(const GrayImage& img) {
  if (img.width <= 0 || img.height <= 0 || img.data.empty()) {
    throw ArgumentError("embed: zero-area image");
  }
  const int side = kPooledSide;
  std::vector<double> grid(static_cast<std::size_t>(side) * side, 0.0);
  double cell_h = static_cast<double>(img.height) / side;
  double cell_w = static_cast<double>(img.width) / side;
  for (int oy = 0; oy < side; ++oy) {
    double y0 = oy * cell_h, y1 = (oy + 1) * cell_h;
    int iy0 = static_cast<int>(std::floor(y0));
    int iy1 = std::min(img.height, static_cast<int>(std::ceil(y1)));
    for (int ox = 0; ox < side; ++ox) {
      double x0 = ox * cell_w, x1 = (ox + 1) * cell_w;
      int ix0 = static_cast<int>(std::floor(x0));
      int ix1 = std::min(img.width, static_cast<int>(std::ceil(x1)));
      double acc = 0.0;
      for (int iy = iy0; iy < iy1; ++iy) {
        double wy = std::min<double>(iy + 1, y1) - std::max<double>(iy, y0);
        for (int ix = ix0; ix < ix1; ++ix) {
          double wx = std::min<double>(ix + 1, x1) - std::max<double>(ix, x0);
          acc += wy * wx * img.at(ix, iy);
        }
      }
      grid[static_cast<std::size_t>(oy) * side + ox] = acc / (cell_h * cell_w * 255.0);
    }
  }
  return grid;
}

std::vector<float> ReferenceEmbedder::embed(const GrayImage& img) const {
  std::vector<double> grid = pool_to_unit_grid(img);
  std::vector<float> out(dim_);
  for (std::uint32_t i = 0; i < dim_; ++i) {
    const double* row = projection_.data() + static_cast<std::size_t>(i) * kInputDim;
    double acc = 0.0;
    for (int j = 0; j < kInputDim; ++j) acc += row[j] * grid[static_cast<std::size_t>(j)];
    out[i] = static_cast<float>(acc);
  }
  return out;
}

std::vector<float> embed(const GrayImage& img, const EmbedderSpec& spec) {
  if (spec.kind != EmbedderSpec::Kind::reference) {
    throw ArgumentError("embed: external feature sets are loaded, not computed");
  }
  return ReferenceEmbedder(spec.dim, spec.seed).embed(img);
}

FeatureSet embed_dataset(const DatasetManifest& manifest, const EmbedderSpec& spec,
                         int threads) {
  if (spec.kind == EmbedderSpec::Kind::external) {
    return load_features(spec.file);
  }
  if (manifest.entries.empty()) throw DataError("embed_dataset: empty manifest");
  ReferenceEmbedder embedder(spec.dim, spec.seed);

  std::vector<std::vector<float>> rows(manifest.entries.size());
  std::vector<std::string> failures(manifest.entries.size());
  parallel_for(manifest.entries.size(), threads, [&](std::size_t i) {
    try {
      rows[i] = embedder.embed(read_pgm(manifest.resolve_scan(i)));
    } catch (const Error& e) {
      failures[i] = "entry " + std::to_string(i) + " (" + manifest.entries[i].scan_path +
                    "): " + e.what();
    }
  });
  for (const auto& f : failures) {
    if (!f.empty()) throw DataError("embed_dataset: " + f);
  }

  FeatureSet fs;
  fs.dim = spec.dim;
  fs.source_id = manifest.id;
  fs.values.reserve(rows.size() * spec.dim);
  for (const auto& row : rows) fs.append_row(row);
  return fs;
}

void save_features(const FeatureSet& fs, const std::filesystem::path& path) {
  if (fs.dim == 0 || fs.values.size() % fs.dim != 0) {
    throw ArgumentError("save_features: inconsistent dim/value sizes");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out.write(kMagic, 4);
  put_u16_le(out, kVersion);
  put_u32_le(out, static_cast<std::uint32_t>(fs.row_count()));
  put_u32_le(out, fs.dim);
  for (float v : fs.values) put_u32_le(out, std::bit_cast<std::uint32_t>(v));
  if (!out) throw DataError("write failed: " + path.string());
}

FeatureSet load_features(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open for reading: " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw FormatError(path.string() + ": bad magic, not a FEAT file");
  }
  std::uint16_t version = get_u16_le(in);
  if (!in || version != kVersion) {
    throw FormatError(path.string() + ": unsupported FEAT version " + std::to_string(version));
  }
  std::uint32_t count = get_u32_le(in);
  std::uint32_t dim = get_u32_le(in);
  if (!in) throw FormatError(path.string() + ": truncated header");
  if (dim < 1) throw FormatError(path.string() + ": dim must be positive");
  FeatureSet fs;
  fs.dim = dim;
  fs.source_id = path.stem().string();
  fs.values.resize(static_cast<std::size_t>(count) * dim);
  for (std::size_t i = 0; i < fs.values.size(); ++i) {
    std::uint32_t bits = get_u32_le(in);
    if (!in) throw FormatError(path.string() + ": truncated payload");
    fs.values[i] = std::bit_cast<float>(bits);
  }
  char extra;
  if (in.read(&extra, 1)) {
    throw FormatError(path.string() + ": trailing bytes after payload");
  }
  return fs;
}

FeatureDistribution fit_gaussian(const FeatureSet& fs) {
  std::size_t n = fs.row_count();
  if (n < 2) {
    throw SampleSizeError("fit_gaussian: covariance needs at least 2 rows, got " +
                          std::to_string(n));
  }
  const Eigen::Index dim = fs.dim;
  FeatureDistribution dist;
  dist.n = static_cast<std::int64_t>(n);
  dist.mean = Eigen::VectorXd::Zero(dim);

  Eigen::MatrixXd rows(static_cast<Eigen::Index>(n), dim);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = fs.row(i);
    for (Eigen::Index j = 0; j < dim; ++j) {
      rows(static_cast<Eigen::Index>(i), j) = static_cast<double>(row[static_cast<std::size_t>(j)]);
    }
  }
  dist.mean = rows.colwise().mean();
  Eigen::MatrixXd centered = rows.rowwise() - dist.mean.transpose();
  dist.cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
  dist.cov = 0.5 * (dist.cov + dist.cov.transpose()).eval();
  return dist;
}

}  // namespace augmetric
