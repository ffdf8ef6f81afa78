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

#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "augmetric/image.hpp"
#include "augmetric/pnm.hpp"
#include "test_support.hpp"

using namespace augmetric;
using augmetric::testing::random_image;
using augmetric::testing::random_mask;
using augmetric::testing::scratch_dir;

namespace {

BinaryMask mask3x3(std::initializer_list<int> bits) {
  BinaryMask m(3, 3);
  std::size_t i = 0;
  for (int b : bits) m.data[i++] = b ? 1 : 0;
  return m;
}

}  // namespace

TEST_CASE("dsc: perfect overlap is 1, disjoint is 0") {
  BinaryMask a = mask3x3({1, 1, 0, 0, 0, 0, 0, 0, 0});
  CHECK(dsc(a, a).value() == 1.0);

  BinaryMask b = mask3x3({0, 0, 1, 0, 0, 0, 0, 0, 0});
  CHECK(dsc(a, b).value() == 0.0);
}

TEST_CASE("dsc: hand-counted 2/3 fixture") {
  // |X| = 4, |Y| = 2, |X n Y| = 2 -> 2*2 / (4+2) = 2/3.
  BinaryMask x = mask3x3({1, 1, 0, 1, 1, 0, 0, 0, 0});
  BinaryMask y = mask3x3({1, 1, 0, 0, 0, 0, 0, 0, 0});
  CHECK(dsc(x, y).value() == 2.0 / 3.0);
}

TEST_CASE("dsc: both empty is undefined, one empty scores 0") {
  BinaryMask empty(3, 3);
  CHECK_FALSE(dsc(empty, empty).has_value());

  BinaryMask one = mask3x3({1, 0, 0, 0, 0, 0, 0, 0, 0});
  CHECK(dsc(one, empty).value() == 0.0);
  CHECK(dsc(empty, one).value() == 0.0);
}

TEST_CASE("dsc: dimension mismatch is a shape error") {
  BinaryMask a(3, 3), b(2, 3);
  CHECK_THROWS_AS(dsc(a, b), ShapeError);
}

TEST_CASE("dsc: symmetric, and 1 on any nonempty self-pair") {
  CounterRng rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    BinaryMask x = random_mask(8, 6, rng);
    BinaryMask y = random_mask(8, 6, rng);
    auto xy = dsc(x, y);
    auto yx = dsc(y, x);
    CHECK(xy.has_value() == yx.has_value());
    if (xy.has_value()) {
      CHECK(*xy == *yx);
      CHECK(*xy >= 0.0);
      CHECK(*xy <= 1.0);
    }
    if (x.set_count() > 0) CHECK(dsc(x, x).value() == 1.0);
  }
}

TEST_CASE("average_dsc: exclusion rule and singleton mean") {
  std::vector<std::optional<double>> scores = {1.0, 0.5, std::nullopt};
  CHECK(average_dsc(scores) == 0.75);

  std::vector<std::optional<double>> one = {2.0 / 3.0};
  CHECK(average_dsc(one) == 2.0 / 3.0);

  std::vector<std::optional<double>> none = {std::nullopt, std::nullopt};
  CHECK_THROWS_AS(average_dsc(none), SampleSizeError);
}

TEST_CASE("average_dsc over k copies of one pair equals its dsc") {
  CounterRng rng(5);
  BinaryMask x = random_mask(6, 6, rng);
  BinaryMask y = random_mask(6, 6, rng);
  auto single = dsc(x, y);
  REQUIRE(single.has_value());
  std::vector<std::pair<BinaryMask, BinaryMask>> pairs(7, {x, y});
  CHECK(average_dsc(pairs) == doctest::Approx(*single).epsilon(1e-15));
}

TEST_CASE("pack: channel contract") {
  GrayImage scan(2, 1);
  scan.at(0, 0) = 200;
  scan.at(1, 0) = 0;
  BinaryMask mask(2, 1);
  mask.at(0, 0) = 1;
  mask.at(1, 0) = 1;

  PackedImage p = pack(scan, mask);
  CHECK(p.red[0] == 200);
  CHECK(p.green[0] == 128);
  CHECK(p.blue[0] == 0);
  CHECK(p.red[1] == 0);
  CHECK(p.green[1] == 128);
  CHECK(p.blue[1] == 0);

  BinaryMask none(2, 1);
  PackedImage q = pack(scan, none);
  CHECK(q.green == std::vector<std::uint8_t>{0, 0});
}

TEST_CASE("unpack thresholds the green channel") {
  PackedImage p;
  p.width = 2;
  p.height = 1;
  p.red = {10, 20};
  p.green = {128, 0};
  p.blue = {0, 0};
  auto [scan, mask] = unpack(p);
  CHECK(scan.data == std::vector<std::uint8_t>{10, 20});
  CHECK(mask.data == std::vector<std::uint8_t>{1, 0});
}

TEST_CASE("unpack(pack(s, m)) is the identity, bit-exact") {
  CounterRng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    GrayImage scan = random_image(9, 7, rng);
    BinaryMask mask = random_mask(9, 7, rng);
    auto [scan2, mask2] = unpack(pack(scan, mask));
    CHECK(scan2 == scan);
    CHECK(mask2 == mask);
  }
}

TEST_CASE("pgm and ppm round trips through files") {
  auto dir = scratch_dir("pnm");
  CounterRng rng(3);

  GrayImage img = random_image(13, 5, rng);
  write_pgm(img, dir / "img.pgm");
  CHECK(read_pgm(dir / "img.pgm") == img);

  BinaryMask mask = random_mask(13, 5, rng);
  write_mask_pgm(mask, dir / "mask.pgm");
  CHECK(read_mask_pgm(dir / "mask.pgm") == mask);

  PackedImage packed = pack(img, mask);
  write_ppm(packed, dir / "packed.ppm");
  CHECK(read_ppm(dir / "packed.ppm") == packed);

  std::filesystem::remove_all(dir);
}

TEST_CASE("pnm rejects bad headers and truncation") {
  auto dir = scratch_dir("pnm_bad");
  {
    std::ofstream out(dir / "bad.pgm", std::ios::binary);
    out << "P4\n2 2\n255\n"
        << "aaaa";
  }
  CHECK_THROWS_AS(read_pgm(dir / "bad.pgm"), FormatError);
  {
    std::ofstream out(dir / "trunc.pgm", std::ios::binary);
    out << "P5\n4 4\n255\n"
        << "ab";
  }
  CHECK_THROWS_AS(read_pgm(dir / "trunc.pgm"), FormatError);
  {
    std::ofstream out(dir / "deep.pgm", std::ios::binary);
    out << "P5\n2 2\n65535\n"
        << "aaaaaaaa";
  }
  CHECK_THROWS_AS(read_pgm(dir / "deep.pgm"), FormatError);
  CHECK_THROWS_AS(read_pgm(dir / "missing.pgm"), DataError);
  std::filesystem::remove_all(dir);
}
