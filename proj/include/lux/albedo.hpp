// Copyright 2026 luxsim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "lux/geometry.hpp"

namespace lux {

struct AlbedoEstimate {
  double rho = 0.0;       // clamped to [0, 1)
  double rho_raw = 0.0;   // least-squares scale before clamping
  double residual = 0.0;  // ||observed - rho_raw * predicted||
};

// First-order spherical-harmonics irradiance basis at a surface normal,
// coefficient order [dc, x, y, z].
inline Eigen::Vector4d sh_basis(const Vec3& n) {
  return Eigen::Vector4d(1.0, n.x(), n.y(), n.z());
}

// Least-squares albedo from multi-illumination observations of one patch.
// Each observation k pairs an intensity with the lighting coefficients
// (4-vector, order [dc, x, y, z]) of its illumination condition; the model is
// intensity_k = rho * dot(coeffs_k, sh_basis(normal)).
inline AlbedoEstimate estimate_albedo(const std::vector<double>& observations,
                                      const std::vector<Eigen::Vector4d>& lighting_coeffs,
                                      const Vec3& normal) {
  const size_t n = observations.size();
  if (n < 4 || lighting_coeffs.size() != n)
    throw ValidationError("insufficient illumination diversity");

  const Eigen::Vector4d basis = sh_basis(normal);
  Eigen::MatrixXd design(n, 4);
  for (size_t k = 0; k < n; ++k)
    design.row(static_cast<Eigen::Index>(k)) =
        lighting_coeffs[k].cwiseProduct(basis).transpose();

  // Rank check over the columns the normal actually activates; a zero basis
  // component makes that lighting dimension irrelevant, not deficient.
  std::vector<int> active;
  for (int c = 0; c < 4; ++c)
    if (std::abs(basis[c]) > 1e-12) active.push_back(c);
  Eigen::MatrixXd reduced(n, active.size());
  for (size_t c = 0; c < active.size(); ++c)
    reduced.col(static_cast<Eigen::Index>(c)) = design.col(active[c]);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(reduced);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 0.0 || sv(0) / sv(sv.size() - 1) >= 1e8)
    throw ValidationError("insufficient illumination diversity");

  Eigen::VectorXd predicted = design.rowwise().sum();
  Eigen::VectorXd observed(n);
  for (size_t k = 0; k < n; ++k) observed(static_cast<Eigen::Index>(k)) = observations[k];

  AlbedoEstimate est;
  const double denom = predicted.squaredNorm();
  est.rho_raw = denom > 0.0 ? predicted.dot(observed) / denom : 0.0;
  est.residual = (observed - est.rho_raw * predicted).norm();
  est.rho = std::clamp(est.rho_raw, 0.0, std::nextafter(1.0, 0.0));
  return est;
}

}  // namespace lux
