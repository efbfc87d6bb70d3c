// Copyright 2026 luxsim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lux/common.hpp"

namespace lux {

enum class CurveKind { ldc, lsc };

// Axially symmetric polar profile over incidence angle, knots in degrees on
// [0, 180]. LDC values are relative intensity (peak-normalized candela/klm),
// LSC values are relative response in [0, 1].
class DistributionCurve {
 public:
  DistributionCurve(CurveKind kind, std::vector<double> angles_deg,
                    std::vector<double> values)
      : kind_(kind), angles_(std::move(angles_deg)), values_(std::move(values)) {
    validate();
  }

  CurveKind kind() const { return kind_; }
  const std::vector<double>& angles_deg() const { return angles_; }
  const std::vector<double>& values() const { return values_; }

  // Piecewise-linear interpolation; exact at knots. theta in [0, pi].
  double eval(double theta_rad) const {
    if (!(theta_rad >= -1e-12 && theta_rad <= kPi + 1e-12))
      throw ValidationError("curve angle out of range [0, pi]");
    const double deg = std::clamp(rad_to_deg(theta_rad), 0.0, 180.0);
    auto it = std::lower_bound(angles_.begin(), angles_.end(), deg);
    if (it == angles_.begin()) return values_.front();
    if (it == angles_.end()) return values_.back();
    const size_t hi = static_cast<size_t>(it - angles_.begin());
    const size_t lo = hi - 1;
    if (angles_[hi] == deg) return values_[hi];
    const double w = (deg - angles_[lo]) / (angles_[hi] - angles_[lo]);
    return values_[lo] + w * (values_[hi] - values_[lo]);
  }

 private:
  void validate() const {
    if (angles_.size() < 2 || angles_.size() != values_.size())
      throw ValidationError("curve needs matching angle/value lists with >= 2 knots");
    if (angles_.front() != 0.0) throw ValidationError("curve must start at 0 degrees");
    if (angles_.back() != 180.0) throw ValidationError("curve must end at 180 degrees");
    for (size_t k = 1; k < angles_.size(); ++k)
      if (!(angles_[k] > angles_[k - 1]))
        throw ValidationError("curve angles must be strictly ascending");
    for (double v : values_) {
      if (!std::isfinite(v) || v < 0.0)
        throw ValidationError("curve values must be finite and >= 0");
      if (kind_ == CurveKind::lsc && v > 1.0)
        throw ValidationError("LSC values must be <= 1");
    }
    if (kind_ == CurveKind::lsc) {
      // sanity on the response shape: no gain toward grazing incidence
      const DistributionCurve& c = *this;
      if (c.raw_at(90.0) > c.raw_at(0.0) + 1e-12)
        throw ValidationError("LSC response at 90 degrees exceeds response at 0");
    }
  }

  double raw_at(double deg) const {
    auto it = std::lower_bound(angles_.begin(), angles_.end(), deg);
    if (it == angles_.begin()) return values_.front();
    if (it == angles_.end()) return values_.back();
    const size_t hi = static_cast<size_t>(it - angles_.begin());
    const size_t lo = hi - 1;
    if (angles_[hi] == deg) return values_[hi];
    const double w = (deg - angles_[lo]) / (angles_[hi] - angles_[lo]);
    return values_[lo] + w * (values_[hi] - values_[lo]);
  }

  CurveKind kind_;
  std::vector<double> angles_;
  std::vector<double> values_;
};

// Canonical baseline curves sampled every `resolution_deg` degrees.
//   isotropic      LDC, 1 everywhere
//   isotropic_lsc  LSC, 1 on [0, 90], 0 beyond
//   lambertian     LDC, max(cos, 0)
//   cosine_lsc     LSC, max(cos, 0) ("cosine" accepted as an alias)
inline DistributionCurve make_standard(std::string_view name, double resolution_deg) {
  if (resolution_deg <= 0.0 ||
      std::abs(std::round(180.0 / resolution_deg) * resolution_deg - 180.0) > 1e-9)
    throw ValidationError("resolution must divide 180 degrees");
  const int n = static_cast<int>(std::round(180.0 / resolution_deg));
  std::vector<double> angles(n + 1), values(n + 1);
  for (int k = 0; k <= n; ++k) angles[k] = k * resolution_deg;
  auto fill = [&](auto f) {
    for (int k = 0; k <= n; ++k) values[k] = f(angles[k]);
  };
  if (name == "isotropic") {
    fill([](double) { return 1.0; });
    return DistributionCurve(CurveKind::ldc, std::move(angles), std::move(values));
  }
  if (name == "isotropic_lsc") {
    fill([](double deg) { return deg <= 90.0 ? 1.0 : 0.0; });
    return DistributionCurve(CurveKind::lsc, std::move(angles), std::move(values));
  }
  auto clamped_cos = [](double deg) {
    return deg >= 90.0 ? 0.0 : std::cos(deg_to_rad(deg));
  };
  if (name == "lambertian") {
    fill(clamped_cos);
    return DistributionCurve(CurveKind::ldc, std::move(angles), std::move(values));
  }
  if (name == "cosine_lsc" || name == "cosine") {
    fill(clamped_cos);
    return DistributionCurve(CurveKind::lsc, std::move(angles), std::move(values));
  }
  throw ValidationError("unknown standard curve: " + std::string(name));
}

// Text format: one `angle value` pair per line, `#` comments. Angles must
// arrive sorted; unsorted input is rejected rather than silently sorted.
inline DistributionCurve load_curve(const std::string& path, CurveKind kind) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open curve file: " + path);
  std::vector<double> angles, values;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double a, v;
    if (!(ls >> a)) continue;  // blank
    if (!(ls >> v))
      throw ParseError(path + ":" + std::to_string(lineno) + ": expected `angle value`");
    if (!angles.empty() && a <= angles.back())
      throw ValidationError(path + ":" + std::to_string(lineno) + ": unsorted angles");
    angles.push_back(a);
    values.push_back(v);
  }
  return DistributionCurve(kind, std::move(angles), std::move(values));
}

}  // namespace lux
