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

#include "augmetric/image.hpp"

#include <string>

namespace augmetric {

namespace {

void require_positive_dims(int w, int h, const char* what) {
  if (w <= 0 || h <= 0) {
    throw ArgumentError(std::string(what) + ": dimensions must be positive, got " +
                        std::to_string(w) + "x" + std::to_string(h));
  }
}

void require_same_shape(int wa, int ha, int wb, int hb, const char* what) {
  if (wa != wb || ha != hb) {
    throw ShapeError(std::string(what) + ": dimension mismatch, " + std::to_string(wa) +
                     "x" + std::to_string(ha) + " vs " + std::to_string(wb) + "x" +
                     std::to_string(hb));
  }
}

}  // namespace

GrayImage::GrayImage(int w, int h, std::uint8_t fill) : width(w), height(h) {
  require_positive_dims(w, h, "GrayImage");
  data.assign(static_cast<std::size_t>(w) * h, fill);
}

BinaryMask::BinaryMask(int w, int h, bool fill) : width(w), height(h) {
  require_positive_dims(w, h, "BinaryMask");
  data.assign(static_cast<std::size_t>(w) * h, fill ? 1 : 0);
}

std::size_t BinaryMask::set_count() const {
  std::size_t n = 0;
  for (std::uint8_t v : data) n += (v != 0);
  return n;
}

std::optional<double> dsc(const BinaryMask& x, const BinaryMask& y) {
  require_same_shape(x.width, x.height, y.width, y.height, "dsc");
  std::size_t cx = 0, cy = 0, inter = 0;
  for (std::size_t i = 0; i < x.data.size(); ++i) {
    bool a = x.data[i] != 0;
    bool b = y.data[i] != 0;
    cx += a;
    cy += b;
    inter += (a && b);
  }
  if (cx + cy == 0) return std::nullopt;
  return 2.0 * static_cast<double>(inter) / static_cast<double>(cx + cy);
}

double average_dsc(std::span<const std::optional<double>> scores) {
  double sum = 0.0;
  std::size_t defined = 0;
  for (const auto& s : scores) {
    if (s.has_value()) {
      sum += *s;
      ++defined;
    }
  }
  if (defined == 0) {
    throw SampleSizeError("average_dsc: every pair has an undefined DSC (both masks empty)");
  }
  return sum / static_cast<double>(defined);
}

double average_dsc(std::span<const std::pair<BinaryMask, BinaryMask>> pairs) {
  std::vector<std::optional<double>> scores;
  scores.reserve(pairs.size());
  for (const auto& [x, y] : pairs) scores.push_back(dsc(x, y));
  return average_dsc(std::span<const std::optional<double>>(scores));
}

PackedImage pack(const GrayImage& scan, const BinaryMask& mask) {
  require_same_shape(scan.width, scan.height, mask.width, mask.height, "pack");
  PackedImage p;
  p.width = scan.width;
  p.height = scan.height;
  p.red = scan.data;
  p.green.resize(scan.data.size());
  p.blue.assign(scan.data.size(), 0);
  for (std::size_t i = 0; i < mask.data.size(); ++i) {
    p.green[i] = mask.data[i] != 0 ? kPackedMaskGreen : 0;
  }
  return p;
}

std::pair<GrayImage, BinaryMask> unpack(const PackedImage& p) {
  GrayImage scan;
  scan.width = p.width;
  scan.height = p.height;
  scan.data = p.red;
  BinaryMask mask;
  mask.width = p.width;
  mask.height = p.height;
  mask.data.resize(p.green.size());
  for (std::size_t i = 0; i < p.green.size(); ++i) {
    mask.data[i] = p.green[i] > kUnpackGreenThreshold ? 1 : 0;
  }
  return {std::move(scan), std::move(mask)};
}

}  // namespace augmetric
