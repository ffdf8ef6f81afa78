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

#include "augmetric/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace augmetric {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void require_param_count(Family family, std::size_t got) {
  std::size_t want = static_cast<std::size_t>(param_count(family));
  if (got != want) {
    throw ArgumentError(std::string("eval_model: family ") + family_letter(family) +
                        " takes " + std::to_string(want) + " parameters, got " +
                        std::to_string(got));
  }
}

}  // namespace

char family_letter(Family family) {
  switch (family) {
    case Family::constant: return 'f';
    case Family::linear: return 'g';
    case Family::log_normal: return 'h';
    case Family::reciprocal: return 'k';
  }
  return '?';
}

Family family_from_name(const std::string& name) {
  if (name == "f" || name == "constant") return Family::constant;
  if (name == "g" || name == "linear") return Family::linear;
  if (name == "h" || name == "log_normal" || name == "lognormal") return Family::log_normal;
  if (name == "k" || name == "reciprocal") return Family::reciprocal;
  throw ArgumentError("unknown model family '" + name + "' (expected f, g, h, or k)");
}

int param_count(Family family) {
  switch (family) {
    case Family::constant: return 1;
    case Family::linear: return 2;
    case Family::log_normal: return 3;
    case Family::reciprocal: return 2;
  }
  return 0;
}

std::vector<std::string> param_names(Family family) {
  switch (family) {
    case Family::constant: return {"c"};
    case Family::linear: return {"m", "c"};
    case Family::log_normal: return {"A", "mu", "sigma"};
    case Family::reciprocal: return {"a", "c"};
  }
  return {};
}

Baseline::Baseline(double value) : dsc0(value) {
  if (!(value >= 0.0) || !(value < 1.0)) {
    throw ArgumentError("Baseline: DSC0 must lie in [0, 1), got " + format_double(value));
  }
}

PriorBox::PriorBox(std::vector<Interval> intervals) : bounds(std::move(intervals)) {
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    if (!(bounds[i].lo < bounds[i].hi)) {
      throw ArgumentError("PriorBox: interval " + std::to_string(i) +
                          " must satisfy lo < hi, got [" + format_double(bounds[i].lo) +
                          ", " + format_double(bounds[i].hi) + "]");
    }
  }
}

double PriorBox::log_volume() const {
  double acc = 0.0;
  for (const auto& b : bounds) acc += std::log(b.width());
  return acc;
}

bool PriorBox::contains(std::span<const double> params) const {
  if (params.size() != bounds.size()) return false;
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    if (params[i] < bounds[i].lo || params[i] > bounds[i].hi) return false;
  }
  return true;
}

std::vector<double> PriorBox::clamp(std::span<const double> params) const {
  std::vector<double> out(params.begin(), params.end());
  for (std::size_t i = 0; i < bounds.size() && i < out.size(); ++i) {
    out[i] = std::clamp(out[i], bounds[i].lo, bounds[i].hi);
  }
  return out;
}

double eval_model(Family family, std::span<const double> params, double x, Baseline base) {
  require_param_count(family, params.size());
  switch (family) {
    case Family::constant:
      return base.dsc0 + params[0];
    case Family::linear:
      return base.dsc0 + params[0] * x + params[1];
    case Family::log_normal: {
      if (!(x > 0.0)) {
        throw ArgumentError("eval_model: log-normal family needs x > 0, got " +
                            format_double(x));
      }
      double amplitude = params[0], mu = params[1], sigma = params[2];
      double delta = std::log(x) - mu;
      if (sigma == 0.0) {
        // sigma -> 0 limit: a spike at x = exp(mu).
        return base.dsc0 + (delta == 0.0 ? amplitude : 0.0);
      }
      double z = delta / sigma;
      return base.dsc0 + amplitude * std::exp(-0.5 * z * z);
    }
    case Family::reciprocal:
      if (!(x > 0.0)) {
        throw ArgumentError("eval_model: reciprocal family needs x > 0, got " +
                            format_double(x));
      }
      return base.dsc0 + params[0] / x + params[1];
  }
  throw ArgumentError("eval_model: unknown family");
}

PriorBox default_priors(Family family, Baseline base) {
  double c_hi = 1.0 - base.dsc0;
  switch (family) {
    case Family::constant:
      return PriorBox({{0.0, c_hi}});
    case Family::linear:
      return PriorBox({{-0.01, 0.0}, {0.0, c_hi}});
    case Family::log_normal:
      return PriorBox({{0.0, c_hi}, {0.0, 5.0}, {0.0, 5.0}});
    case Family::reciprocal:
      return PriorBox({{0.0, 1.0}, {0.0, c_hi}});
  }
  throw ArgumentError("default_priors: unknown family");
}

WganLosses wgan_losses(std::span<const double> real_scores,
                       std::span<const double> fake_scores) {
  if (real_scores.empty() || fake_scores.empty()) {
    throw ArgumentError("wgan_losses: score vectors must be nonempty");
  }
  auto mean = [](std::span<const double> v) {
    double acc = 0.0;
    for (double s : v) acc += s;
    return acc / static_cast<double>(v.size());
  };
  double mean_real = mean(real_scores);
  double mean_fake = mean(fake_scores);
  return WganLosses{-(mean_real - mean_fake), -mean_fake};
}

std::string format_model(Family family, std::span<const double> params) {
  require_param_count(family, params.size());
  auto names = param_names(family);
  std::ostringstream out;
  out << family_letter(family) << "(";
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i > 0) out << ",";
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%s=%.12g", names[i].c_str(), params[i]);
    out << buf;
  }
  out << ")";
  return out.str();
}

std::vector<double> parse_params(Family family, const std::string& text) {
  auto names = param_names(family);
  std::vector<double> out;
  std::string body = text;
  // Accept the full canonical form "h(...)" as well.
  auto paren = body.find('(');
  if (paren != std::string::npos && body.back() == ')') {
    body = body.substr(paren + 1, body.size() - paren - 2);
  }
  std::istringstream in(body);
  std::string part;
  while (std::getline(in, part, ',')) {
    auto eq = part.find('=');
    std::string value = part;
    if (eq != std::string::npos) {
      std::string name = part.substr(0, eq);
      if (out.size() >= names.size() || name != names[out.size()]) {
        throw ArgumentError("parse_params: unexpected parameter '" + name + "' for family " +
                            std::string(1, family_letter(family)));
      }
      value = part.substr(eq + 1);
    }
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(value, &pos));
      if (pos != value.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ArgumentError("parse_params: bad number '" + value + "'");
    }
  }
  if (out.size() != names.size()) {
    throw ArgumentError("parse_params: family " + std::string(1, family_letter(family)) +
                        " takes " + std::to_string(names.size()) + " parameters, got " +
                        std::to_string(out.size()));
  }
  return out;
}

}  // namespace augmetric
