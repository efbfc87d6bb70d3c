// Copyright 2026 luxsim contributors
// SPDX-License-Identifier: Apache-2.0
//
// Shared scene-construction helpers for the test suites.

#pragma once

#include <vector>

#include "lux/scene.hpp"

namespace testing_support {

// Quad around `center`, normal = right x up.
inline lux::Patch make_quad(int id, const lux::Vec3& center, double half_w, double half_h,
                            const lux::Vec3& right, const lux::Vec3& up,
                            double reflectance = 0.5) {
  lux::Patch p;
  p.id = id;
  p.vertices = {center - right * half_w - up * half_h, center + right * half_w - up * half_h,
                center + right * half_w + up * half_h, center - right * half_w + up * half_h};
  p.reflectance = reflectance;
  p.finalize();
  return p;
}

// Two coaxial parallel unit squares facing each other across `distance`.
inline std::vector<lux::Patch> parallel_unit_squares(double distance) {
  std::vector<lux::Patch> patches;
  patches.push_back(make_quad(1, {0, 0, 0}, 0.5, 0.5, {1, 0, 0}, {0, 1, 0}));
  patches.push_back(make_quad(2, {0, 0, distance}, 0.5, 0.5, {-1, 0, 0}, {0, 1, 0}));
  return patches;
}

// Closed unit-cube interior, all normals inward, uniform reflectance.
inline lux::Scene closed_cube(double rho = 0.5) {
  using lux::Vec3;
  lux::Scene s;
  s.patches.push_back(make_quad(1, {0.5, 0.5, 0.0}, 0.5, 0.5, {1, 0, 0}, {0, 1, 0}, rho));
  s.patches.push_back(make_quad(2, {0.5, 0.5, 1.0}, 0.5, 0.5, {-1, 0, 0}, {0, 1, 0}, rho));
  s.patches.push_back(make_quad(3, {0.5, 0.0, 0.5}, 0.5, 0.5, {0, 0, 1}, {1, 0, 0}, rho));
  s.patches.push_back(make_quad(4, {0.5, 1.0, 0.5}, 0.5, 0.5, {1, 0, 0}, {0, 0, 1}, rho));
  s.patches.push_back(make_quad(5, {0.0, 0.5, 0.5}, 0.5, 0.5, {0, 1, 0}, {0, 0, 1}, rho));
  s.patches.push_back(make_quad(6, {1.0, 0.5, 0.5}, 0.5, 0.5, {0, 0, 1}, {0, 1, 0}, rho));
  s.finalize();
  return s;
}

inline lux::Scene scene_of(std::vector<lux::Patch> patches) {
  lux::Scene s;
  s.patches = std::move(patches);
  s.finalize();
  return s;
}

}  // namespace testing_support
