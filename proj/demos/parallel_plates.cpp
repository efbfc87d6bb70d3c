// Copyright 2026 luxsim contributors
// SPDX-License-Identifier: Apache-2.0
//
// Minimal walkthrough: Monte Carlo form factor between two facing unit
// squares, then a two-patch radiosity solve on top of it.

#include <cstdio>

#include "lux/form_factor.hpp"
#include "lux/radiosity.hpp"

int main() {
  lux::Patch a, b;
  a.id = 1;
  a.vertices = {{-0.5, -0.5, 0}, {0.5, -0.5, 0}, {0.5, 0.5, 0}, {-0.5, 0.5, 0}};
  a.reflectance = 0.5;
  a.finalize();
  b.id = 2;
  b.vertices = {{0.5, -0.5, 1}, {-0.5, -0.5, 1}, {-0.5, 0.5, 1}, {0.5, 0.5, 1}};
  b.reflectance = 0.5;
  b.finalize();

  for (int samples : {16, 64, 256, 1024}) {
    auto est = lux::form_factor_pair(a, b, samples, 7);
    std::printf("samples %5d  F = %.5f  (std error %.5f)\n", samples, est.value,
                est.std_error);
  }

  lux::RadiosityProblem p;
  const double f = lux::form_factor_pair(a, b, 4096, 7).value;
  p.transport.setZero(2, 2);
  p.transport(0, 1) = f;
  p.transport(1, 0) = f;
  p.reflectance = Eigen::Vector2d(0.5, 0.5);
  p.emission = Eigen::Vector2d(1000.0, 0.0);
  lux::Solution sol = lux::solve_direct(p);
  std::printf("\nemitter B = %.2f lm/m^2, receiver B = %.2f lm/m^2, receiver H = %.2f lux\n",
              sol.exitance(0), sol.exitance(1), sol.irradiance(1));
  return 0;
}
