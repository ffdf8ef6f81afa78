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

#include "augmetric/augment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "augmetric/parallel.hpp"
#include "augmetric/pnm.hpp"

namespace augmetric {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void validate_range(double lo, double hi, const char* what) {
  if (!(lo >= 0.0) || !(hi >= 0.0) || !(lo <= hi)) {
    throw ArgumentError(std::string(what) + ": need 0 <= lo <= hi, got [" +
                        format_double(lo) + ", " + format_double(hi) + "]");
  }
}

// Reflect an out-of-range index back into [0, n): ...cba|abc...|cba...
int reflect_index(int i, int n) {
  if (n == 1) return 0;
  int period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

std::uint8_t round_to_byte(double v) {
  double r = std::floor(v + 0.5);  // half away from zero for non-negative v
  if (r < 0.0) r = 0.0;
  if (r > 255.0) r = 255.0;
  return static_cast<std::uint8_t>(r);
}

}  // namespace

AugmentationSpec AugmentationSpec::horizontal_flip(std::uint64_t seed) {
  AugmentationSpec s;
  s.kind = AugmentationKind::horizontal_flip;
  s.seed = seed;
  return s;
}

AugmentationSpec AugmentationSpec::gaussian_blur(double sigma_min, double sigma_max,
                                                 std::uint64_t seed) {
  validate_range(sigma_min, sigma_max, "gaussian_blur spec");
  AugmentationSpec s;
  s.kind = AugmentationKind::gaussian_blur;
  s.lo = sigma_min;
  s.hi = sigma_max;
  s.seed = seed;
  return s;
}

AugmentationSpec AugmentationSpec::additive_noise(double scale_min, double scale_max,
                                                  std::uint64_t seed) {
  validate_range(scale_min, scale_max, "additive_noise spec");
  AugmentationSpec s;
  s.kind = AugmentationKind::additive_noise;
  s.lo = scale_min;
  s.hi = scale_max;
  s.seed = seed;
  return s;
}

std::string AugmentationSpec::canonical_text() const {
  std::ostringstream out;
  switch (kind) {
    case AugmentationKind::horizontal_flip:
      out << "hflip(seed=" << seed << ")";
      break;
    case AugmentationKind::gaussian_blur:
      out << "blur(sigma_min=" << format_double(lo) << ",sigma_max=" << format_double(hi)
          << ",seed=" << seed << ")";
      break;
    case AugmentationKind::additive_noise:
      out << "noise(scale_min=" << format_double(lo) << ",scale_max=" << format_double(hi)
          << ",seed=" << seed << ")";
      break;
  }
  return out.str();
}

namespace {

// Splits "a=1,b=2" / "1,2" argument bodies.
std::vector<std::string> split_csv(const std::string& body) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : body) {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) parts.push_back(cur);
  return parts;
}

double parse_double_arg(const std::string& text, const std::string& context) {
  try {
    std::size_t pos = 0;
    double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ArgumentError("augmentation spec: bad number '" + text + "' in " + context);
  }
}

std::string arg_value(const std::string& part, const std::string& key) {
  auto eq = part.find('=');
  if (eq == std::string::npos) return part;
  std::string name = part.substr(0, eq);
  if (name != key) {
    throw ArgumentError("augmentation spec: expected '" + key + "', got '" + name + "'");
  }
  return part.substr(eq + 1);
}

}  // namespace

AugmentationSpec AugmentationSpec::parse(const std::string& text, std::uint64_t seed) {
  std::string kind_word;
  std::string body;
  auto paren = text.find('(');
  auto colon = text.find(':');
  if (paren != std::string::npos && text.back() == ')') {
    kind_word = text.substr(0, paren);
    body = text.substr(paren + 1, text.size() - paren - 2);
  } else if (colon != std::string::npos) {
    kind_word = text.substr(0, colon);
    body = text.substr(colon + 1);
  } else {
    kind_word = text;
  }

  auto parts = split_csv(body);
  std::uint64_t parsed_seed = seed;
  // Trailing "seed=N" is accepted in canonical form for any kind.
  if (!parts.empty() && parts.back().rfind("seed=", 0) == 0) {
    parsed_seed = std::stoull(parts.back().substr(5));
    parts.pop_back();
  }

  if (kind_word == "hflip" || kind_word == "flip") {
    if (!parts.empty()) throw ArgumentError("augmentation spec: hflip takes no parameters");
    return horizontal_flip(parsed_seed);
  }
  if (kind_word == "blur") {
    if (parts.size() != 2) {
      throw ArgumentError("augmentation spec: blur needs sigma_min,sigma_max");
    }
    return gaussian_blur(parse_double_arg(arg_value(parts[0], "sigma_min"), "blur"),
                         parse_double_arg(arg_value(parts[1], "sigma_max"), "blur"),
                         parsed_seed);
  }
  if (kind_word == "noise") {
    if (parts.size() != 2) {
      throw ArgumentError("augmentation spec: noise needs scale_min,scale_max");
    }
    return additive_noise(parse_double_arg(arg_value(parts[0], "scale_min"), "noise"),
                          parse_double_arg(arg_value(parts[1], "scale_max"), "noise"),
                          parsed_seed);
  }
  throw ArgumentError("augmentation spec: unknown kind '" + kind_word + "'");
}

std::filesystem::path DatasetManifest::resolve_scan(std::size_t i) const {
  std::filesystem::path p = entries[i].scan_path;
  return p.is_absolute() ? p : base_dir / p;
}

std::filesystem::path DatasetManifest::resolve_mask(std::size_t i) const {
  std::filesystem::path p = entries[i].mask_path;
  return p.is_absolute() ? p : base_dir / p;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "augmetric-manifest v1") {
    throw FormatError(path.string() + ": missing 'augmetric-manifest v1' header");
  }
  DatasetManifest m;
  m.id = path.stem().string();
  m.base_dir = path.parent_path();
  int line_no = 1;
  std::set<std::string> seen_paths;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("# id: ", 0) == 0) {
        m.id = line.substr(6);
      } else if (line.rfind("# spec: ", 0) == 0) {
        m.provenance = AugmentationSpec::parse(line.substr(8));
      }
      continue;
    }
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) +
                        ": expected 'scan<TAB>mask'");
    }
    ManifestEntry e{line.substr(0, tab), line.substr(tab + 1)};
    for (const auto& p : {e.scan_path, e.mask_path}) {
      if (!seen_paths.insert(p).second) {
        throw FormatError(path.string() + ":" + std::to_string(line_no) +
                          ": duplicate path '" + p + "'");
      }
    }
    m.entries.push_back(std::move(e));
  }
  if (m.entries.empty()) throw FormatError(path.string() + ": manifest has no entries");
  return m;
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write manifest: " + path.string());
  out << "augmetric-manifest v1\n";
  out << "# id: " << manifest.id << "\n";
  if (manifest.provenance.has_value()) {
    out << "# spec: " << manifest.provenance->canonical_text() << "\n";
  }
  for (const auto& e : manifest.entries) {
    out << e.scan_path << "\t" << e.mask_path << "\n";
  }
  if (!out) throw DataError("write failed: " + path.string());
}

GrayImage hflip(const GrayImage& img) {
  GrayImage out = img;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      out.at(x, y) = img.at(img.width - 1 - x, y);
    }
  }
  return out;
}

BinaryMask hflip(const BinaryMask& mask) {
  BinaryMask out = mask;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      out.at(x, y) = mask.at(mask.width - 1 - x, y);
    }
  }
  return out;
}

PackedImage hflip(const PackedImage& img) {
  PackedImage out = img;
  auto flip_channel = [&](const std::vector<std::uint8_t>& src,
                          std::vector<std::uint8_t>& dst) {
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        dst[static_cast<std::size_t>(y) * img.width + x] =
            src[static_cast<std::size_t>(y) * img.width + (img.width - 1 - x)];
      }
    }
  };
  flip_channel(img.red, out.red);
  flip_channel(img.green, out.green);
  flip_channel(img.blue, out.blue);
  return out;
}

GrayImage gaussian_blur(const GrayImage& img, double sigma) {
  if (!(sigma >= 0.0)) {
    throw ArgumentError("gaussian_blur: sigma must be >= 0, got " + format_double(sigma));
  }
  if (sigma == 0.0 || img.data.empty()) return img;

  int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    double w = std::exp(-0.5 * (i / sigma) * (i / sigma));
    kernel[static_cast<std::size_t>(i + radius)] = w;
    sum += w;
  }
  for (double& w : kernel) w /= sum;

  int w = img.width, h = img.height;
  std::vector<double> horiz(img.data.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        acc += kernel[static_cast<std::size_t>(i + radius)] *
               img.at(reflect_index(x + i, w), y);
      }
      horiz[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  GrayImage out;
  out.width = w;
  out.height = h;
  out.data.resize(img.data.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        acc += kernel[static_cast<std::size_t>(i + radius)] *
               horiz[static_cast<std::size_t>(reflect_index(y + i, h)) * w + x];
      }
      out.data[static_cast<std::size_t>(y) * w + x] = round_to_byte(acc);
    }
  }
  return out;
}

GrayImage add_noise(const GrayImage& img, double scale, CounterRng& rng,
                    Diagnostics* diag) {
  if (!(scale >= 0.0)) {
    throw ArgumentError("add_noise: scale must be >= 0, got " + format_double(scale));
  }
  std::vector<double> field(img.data.size());
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    field[i] = img.data[i] + scale * rng.normal();
    lo = std::min(lo, field[i]);
    hi = std::max(hi, field[i]);
  }
  GrayImage out;
  out.width = img.width;
  out.height = img.height;
  out.data.resize(img.data.size());
  if (!(hi > lo)) {
    maybe_warn(diag, "add_noise: flat result, renormalisation is degenerate; emitting zeros");
    std::fill(out.data.begin(), out.data.end(), 0);
    return out;
  }
  double span = hi - lo;
  for (std::size_t i = 0; i < field.size(); ++i) {
    out.data[i] = round_to_byte(255.0 * (field[i] - lo) / span);
  }
  return out;
}

DatasetManifest build_augmented_dataset(const DatasetManifest& src,
                                        const AugmentationSpec& spec,
                                        const std::filesystem::path& out_dir,
                                        int threads, Diagnostics* diag) {
  if (src.entries.empty()) throw DataError("build_augmented_dataset: empty source manifest");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw DataError("cannot create output directory: " + out_dir.string());

  const char* kind_word = spec.kind == AugmentationKind::horizontal_flip ? "hflip"
                          : spec.kind == AugmentationKind::gaussian_blur ? "blur"
                                                                         : "noise";
  DatasetManifest out;
  out.id = src.id + "+" + kind_word;
  out.base_dir = out_dir;
  out.provenance = spec;
  out.entries.resize(src.entries.size());

  std::vector<std::string> failures(src.entries.size());
  parallel_for(src.entries.size(), threads, [&](std::size_t i) {
    char name[32];
    std::snprintf(name, sizeof(name), "%05zu", i);
    std::string scan_name = std::string(name) + "_scan.pgm";
    std::string mask_name = std::string(name) + "_mask.pgm";
    try {
      GrayImage scan = read_pgm(src.resolve_scan(i));
      BinaryMask mask = read_mask_pgm(src.resolve_mask(i));
      CounterRng rng = CounterRng::stream(spec.seed, i);
      GrayImage aug_scan;
      BinaryMask aug_mask;
      switch (spec.kind) {
        case AugmentationKind::horizontal_flip:
          aug_scan = hflip(scan);
          aug_mask = hflip(mask);
          break;
        case AugmentationKind::gaussian_blur:
          aug_scan = gaussian_blur(scan, rng.uniform(spec.lo, spec.hi));
          aug_mask = mask;
          break;
        case AugmentationKind::additive_noise:
          aug_scan = add_noise(scan, rng.uniform(spec.lo, spec.hi), rng, nullptr);
          aug_mask = mask;
          break;
      }
      write_pgm(aug_scan, out_dir / scan_name);
      write_mask_pgm(aug_mask, out_dir / mask_name);
      out.entries[i] = ManifestEntry{scan_name, mask_name};
    } catch (const Error& e) {
      failures[i] = std::string("entry ") + std::to_string(i) + " (" +
                    src.entries[i].scan_path + "): " + e.what();
    }
  });
  for (const auto& f : failures) {
    if (!f.empty()) throw DataError("build_augmented_dataset: " + f);
  }
  maybe_warn(diag, "augmented " + std::to_string(out.entries.size()) + " images with " +
                       spec.canonical_text());
  save_manifest(out, out_dir / "manifest.txt");
  return out;
}

}  // namespace augmetric
