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
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "augmetric/error.hpp"

namespace augmetric {

// 8-bit grayscale raster (an OCT B-scan), row-major.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 0);

  std::uint8_t& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
  std::size_t pixel_count() const { return data.size(); }

  bool operator==(const GrayImage&) const = default;
};

// Binary segmentation mask (fluid / not fluid), row-major, values 0 or 1.
struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  BinaryMask() = default;
  BinaryMask(int w, int h, bool fill = false);

  std::uint8_t& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }

  // |X|: number of set pixels.
  std::size_t set_count() const;

  bool operator==(const BinaryMask&) const = default;
};

// GAN training image: scan in the red channel, half-intensity mask in the
// green channel, blue identically zero. Channels are stored planar.
struct PackedImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> red;
  std::vector<std::uint8_t> green;
  std::vector<std::uint8_t> blue;

  bool operator==(const PackedImage&) const = default;
};

// round(255 * 0.5), half away from zero.
inline constexpr std::uint8_t kPackedMaskGreen = 128;
// Green values above this unpack to a set mask pixel; midpoint below 128 so
// a lossy 8-bit round trip still lands on the right side.
inline constexpr std::uint8_t kUnpackGreenThreshold = 63;

// Dice similarity coefficient 2|X∩Y| / (|X| + |Y|).
//
// Returns nullopt for the undefined 0/0 case (both masks empty). A pair with
// exactly one empty mask scores 0. Throws ShapeError on dimension mismatch.
std::optional<double> dsc(const BinaryMask& x, const BinaryMask& y);

// Mean DSC over pairs with a defined score; undefined pairs are excluded from
// both numerator and denominator. Throws SampleSizeError if every pair is
// undefined.
double average_dsc(std::span<const std::pair<BinaryMask, BinaryMask>> pairs);

// Same exclusion rule applied to precomputed per-pair scores.
double average_dsc(std::span<const std::optional<double>> scores);

// Builds the packed training image: red = scan, green = 128 * mask, blue = 0.
PackedImage pack(const GrayImage& scan, const BinaryMask& mask);

// Recovers (scan, mask) from a packed image; exact inverse of pack.
std::pair<GrayImage, BinaryMask> unpack(const PackedImage& p);

}  // namespace augmetric
