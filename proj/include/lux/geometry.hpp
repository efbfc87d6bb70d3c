// Copyright 2026 luxsim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "lux/common.hpp"

namespace lux {

using Vec3 = Eigen::Vector3d;

// Branchless-ish tangent frame around a unit axis (Duff et al. style).
inline void orthonormal_basis(const Vec3& n, Vec3& t, Vec3& b) {
  const double sign = std::copysign(1.0, n.z());
  const double a = -1.0 / (sign + n.z());
  const double c = n.x() * n.y() * a;
  t = Vec3(1.0 + sign * n.x() * n.x() * a, sign * c, -sign * n.x());
  b = Vec3(c, sign + n.y() * n.y() * a, -n.y());
}

struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Vec3 apply_dir(const Vec3& d) const { return rotation * d; }

  static RigidTransform identity() { return {}; }

  static RigidTransform axis_angle(const Vec3& axis, double angle_rad,
                                   const Vec3& translation = Vec3::Zero()) {
    RigidTransform t;
    t.rotation = Eigen::AngleAxisd(angle_rad, axis.normalized()).toRotationMatrix();
    t.translation = translation;
    return t;
  }
};

// Low-distortion square-to-triangle map (Heitz); uniform for uniform (u,v).
inline Vec3 sample_triangle(const Vec3& v0, const Vec3& v1, const Vec3& v2,
                            double u, double v) {
  if (u + v > 1.0) {
    u = 1.0 - u;
    v = 1.0 - v;
  }
  return v0 + u * (v1 - v0) + v * (v2 - v0);
}

inline double triangle_area(const Vec3& v0, const Vec3& v1, const Vec3& v2) {
  return 0.5 * (v1 - v0).cross(v2 - v0).norm();
}

// Cosine-weighted direction about `axis` from two uniforms; pdf = cos(theta)/pi.
inline Vec3 cosine_sample_hemisphere(const Vec3& axis, double u1, double u2) {
  const double r = std::sqrt(u1);
  const double phi = 2.0 * kPi * u2;
  const double z = std::sqrt(std::max(0.0, 1.0 - u1));
  Vec3 t, b;
  orthonormal_basis(axis, t, b);
  return (t * (r * std::cos(phi)) + b * (r * std::sin(phi)) + axis * z).normalized();
}

}  // namespace lux
