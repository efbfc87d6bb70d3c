// Copyright 2026 luxsim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "lux/dali.hpp"
#include "lux/form_factor.hpp"
#include "lux/scene.hpp"

namespace lux {

// Linear system B = E + diag(rho) * F * B over a transport operator, with an
// optional sensing operator for the reported irradiance H.
struct RadiosityProblem {
  Eigen::MatrixXd transport;                 // plain or LDC-weighted coupling
  std::optional<Eigen::MatrixXd> sensing;    // LSC-weighted readout, if any
  Eigen::VectorXd reflectance;               // per patch, < 1
  Eigen::VectorXd emission;                  // lm/m^2, >= 0

  void validate() const {
    const Eigen::Index n = transport.rows();
    if (transport.cols() != n || reflectance.size() != n || emission.size() != n ||
        (sensing && (sensing->rows() != n || sensing->cols() != n)))
      throw ValidationError("radiosity problem dimensions disagree");
    if (n == 0) throw ValidationError("empty radiosity problem");
    if (reflectance.maxCoeff() >= 1.0 || reflectance.minCoeff() < 0.0)
      throw ValidationError("reflectance out of range");
    if (emission.minCoeff() < 0.0) throw ValidationError("emission must be >= 0");
  }
};

struct Solution {
  Eigen::VectorXd exitance;    // B, lm/m^2
  Eigen::VectorXd irradiance;  // H, lux (sensing operator when present)
  int iterations = 0;
  double residual = 0.0;
};

namespace detail {

inline Solution finish_solution(const RadiosityProblem& p, Eigen::VectorXd b, int iters) {
  Solution sol;
  sol.irradiance = p.sensing ? (*p.sensing * b).eval() : (p.transport * b).eval();
  sol.residual =
      (b - p.emission - p.reflectance.asDiagonal() * (p.transport * b)).lpNorm<Eigen::Infinity>();
  sol.exitance = std::move(b);
  sol.iterations = iters;
  return sol;
}

}  // namespace detail

// Dense LU factorization of (I - diag(rho) F). Bounded at n <= 4096.
inline Solution solve_direct(const RadiosityProblem& p) {
  p.validate();
  const Eigen::Index n = p.transport.rows();
  if (n > 4096) throw ValidationError("solve_direct is bounded at n <= 4096");
  Eigen::MatrixXd system = -(p.reflectance.asDiagonal() * p.transport);
  system.diagonal().array() += 1.0;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
  Eigen::VectorXd b = lu.solve(p.emission);
  Solution sol = detail::finish_solution(p, std::move(b), 0);
  const double scale = std::max(1.0, p.emission.lpNorm<Eigen::Infinity>());
  if (!(sol.residual <= 1e-10 * scale))
    throw NumericError("direct solve did not reach residual bound (singular system?)",
                       sol.residual);
  return sol;
}

enum class IterScheme { jacobi, gauss_seidel };

inline IterScheme parse_scheme(const std::string& s) {
  if (s == "jacobi") return IterScheme::jacobi;
  if (s == "gauss_seidel" || s == "gauss-seidel") return IterScheme::gauss_seidel;
  throw ValidationError("unknown iteration scheme: " + s);
}

// Stationary iteration on B = E + diag(rho) F B; converges because
// rho < 1 and row sums of F stay <= 1. The sweep loop drives the residual a
// decade below the requested bound so the field error itself stays within
// tol * max(1, ||E||inf).
inline Solution solve_iterative(const RadiosityProblem& p, double tol, int max_iters,
                                IterScheme scheme) {
  p.validate();
  if (!(tol > 0.0)) throw ValidationError("tolerance must be > 0");
  const Eigen::Index n = p.transport.rows();
  const double scale = std::max(1.0, p.emission.lpNorm<Eigen::Infinity>());
  Eigen::VectorXd b = p.emission;
  double residual = 0.0;
  for (int iter = 1; iter <= max_iters; ++iter) {
    if (scheme == IterScheme::jacobi) {
      b = p.emission + p.reflectance.asDiagonal() * (p.transport * b);
    } else {
      for (Eigen::Index r = 0; r < n; ++r)
        b(r) = p.emission(r) + p.reflectance(r) * p.transport.row(r).dot(b);
    }
    residual = (b - p.emission - p.reflectance.asDiagonal() * (p.transport * b))
                   .lpNorm<Eigen::Infinity>();
    if (residual <= 0.05 * tol * scale) return detail::finish_solution(p, std::move(b), iter);
  }
  throw NumericError("iterative solve did not converge within " +
                         std::to_string(max_iters) + " iterations",
                     residual);
}

// Emission vector for the scene's luminaires at the given arc levels
// (lm/m^2 over each luminaire's emissive patch area).
inline Eigen::VectorXd emission_vector(const Scene& scene, const std::vector<int>& levels) {
  if (levels.size() != scene.luminaires.size())
    throw ValidationError("level vector length must match luminaire count");
  Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(scene.patches.size()));
  for (size_t l = 0; l < scene.luminaires.size(); ++l) {
    const Luminaire& lum = scene.luminaires[l];
    const auto& patch_idx = scene.emitter_patches(lum.id);
    if (patch_idx.empty()) continue;
    const double area = scene.emitter_area(lum.id);
    const double flux = lum.total_flux * dali::level_to_flux(levels[l]);
    for (int p : patch_idx) e(p) += flux / area;
  }
  return e;
}

inline Eigen::VectorXd emission_vector(const Scene& scene) {
  std::vector<int> levels;
  levels.reserve(scene.luminaires.size());
  for (const Luminaire& l : scene.luminaires) levels.push_back(l.level);
  return emission_vector(scene, levels);
}

inline RadiosityProblem make_problem(const Scene& scene, const TransportSystem& sys,
                                     const Eigen::VectorXd& emission) {
  RadiosityProblem p;
  p.transport = sys.transport.values;
  if (sys.sensing) p.sensing = sys.sensing->values;
  const Eigen::Index n = static_cast<Eigen::Index>(scene.patches.size());
  p.reflectance.resize(n);
  for (Eigen::Index k = 0; k < n; ++k)
    p.reflectance(k) = scene.patches[static_cast<size_t>(k)].reflectance;
  p.emission = emission;
  return p;
}

}  // namespace lux
