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

#include "augmetric/pnm.hpp"

#include <fstream>
#include <string>

namespace augmetric {

namespace {

[[noreturn]] void bad_file(const std::filesystem::path& path, const std::string& why) {
  throw FormatError(path.string() + ": " + why);
}

// Skips whitespace and '#' comments, then reads one unsigned decimal token.
int read_header_int(std::istream& in, const std::filesystem::path& path) {
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  if (c == EOF || !std::isdigit(c)) bad_file(path, "malformed header");
  long value = 0;
  while (c != EOF && std::isdigit(c)) {
    value = value * 10 + (c - '0');
    if (value > 1 << 30) bad_file(path, "header value out of range");
    c = in.get();
  }
  if (c != EOF) in.unget();
  return static_cast<int>(value);
}

struct PnmHeader {
  int width = 0;
  int height = 0;
};

PnmHeader read_header(std::istream& in, const std::filesystem::path& path,
                      const char* magic) {
  char m0 = 0, m1 = 0;
  in.get(m0);
  in.get(m1);
  if (!in || m0 != magic[0] || m1 != magic[1]) {
    bad_file(path, std::string("expected ") + magic + " magic");
  }
  PnmHeader h;
  h.width = read_header_int(in, path);
  h.height = read_header_int(in, path);
  int maxval = read_header_int(in, path);
  if (h.width <= 0 || h.height <= 0) bad_file(path, "non-positive dimensions");
  if (maxval != 255) bad_file(path, "only 8-bit (maxval 255) images are supported");
  int sep = in.get();
  if (sep == EOF || !std::isspace(sep)) bad_file(path, "missing header separator");
  return h;
}

void read_payload(std::istream& in, const std::filesystem::path& path,
                  std::uint8_t* dst, std::size_t count) {
  in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(count));
  if (static_cast<std::size_t>(in.gcount()) != count) bad_file(path, "truncated pixel data");
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open for reading: " + path.string());
  return in;
}

}  // namespace

GrayImage read_pgm(const std::filesystem::path& path) {
  auto in = open_in(path);
  PnmHeader h = read_header(in, path, "P5");
  GrayImage img(h.width, h.height);
  read_payload(in, path, img.data.data(), img.data.size());
  return img;
}

void write_pgm(const GrayImage& img, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data.data()),
            static_cast<std::streamsize>(img.data.size()));
  if (!out) throw DataError("write failed: " + path.string());
}

BinaryMask read_mask_pgm(const std::filesystem::path& path) {
  GrayImage raw = read_pgm(path);
  BinaryMask mask;
  mask.width = raw.width;
  mask.height = raw.height;
  mask.data.resize(raw.data.size());
  for (std::size_t i = 0; i < raw.data.size(); ++i) {
    mask.data[i] = raw.data[i] >= 128 ? 1 : 0;
  }
  return mask;
}

void write_mask_pgm(const BinaryMask& mask, const std::filesystem::path& path) {
  GrayImage raw;
  raw.width = mask.width;
  raw.height = mask.height;
  raw.data.resize(mask.data.size());
  for (std::size_t i = 0; i < mask.data.size(); ++i) {
    raw.data[i] = mask.data[i] != 0 ? 255 : 0;
  }
  write_pgm(raw, path);
}

PackedImage read_ppm(const std::filesystem::path& path) {
  auto in = open_in(path);
  PnmHeader h = read_header(in, path, "P6");
  std::size_t pixels = static_cast<std::size_t>(h.width) * h.height;
  std::vector<std::uint8_t> interleaved(pixels * 3);
  read_payload(in, path, interleaved.data(), interleaved.size());
  PackedImage img;
  img.width = h.width;
  img.height = h.height;
  img.red.resize(pixels);
  img.green.resize(pixels);
  img.blue.resize(pixels);
  for (std::size_t i = 0; i < pixels; ++i) {
    img.red[i] = interleaved[3 * i];
    img.green[i] = interleaved[3 * i + 1];
    img.blue[i] = interleaved[3 * i + 2];
  }
  return img;
}

void write_ppm(const PackedImage& img, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "P6\n" << img.width << " " << img.height << "\n255\n";
  std::size_t pixels = static_cast<std::size_t>(img.width) * img.height;
  std::vector<std::uint8_t> interleaved(pixels * 3);
  for (std::size_t i = 0; i < pixels; ++i) {
    interleaved[3 * i] = img.red[i];
    interleaved[3 * i + 1] = img.green[i];
    interleaved[3 * i + 2] = img.blue[i];
  }
  out.write(reinterpret_cast<const char*>(interleaved.data()),
            static_cast<std::streamsize>(interleaved.size()));
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace augmetric
