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

#include <filesystem>

#include "augmetric/image.hpp"

namespace augmetric {

// Binary PGM (P5) and PPM (P6), 8-bit only. Masks are written with
// 0 = background, 255 = fluid; on read, values >= 128 count as fluid.

GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const GrayImage& img, const std::filesystem::path& path);

BinaryMask read_mask_pgm(const std::filesystem::path& path);
void write_mask_pgm(const BinaryMask& mask, const std::filesystem::path& path);

PackedImage read_ppm(const std::filesystem::path& path);
void write_ppm(const PackedImage& img, const std::filesystem::path& path);

}  // namespace augmetric
