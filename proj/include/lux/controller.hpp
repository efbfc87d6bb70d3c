// Copyright 2026 luxsim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "lux/perception.hpp"
#include "lux/radiosity.hpp"

namespace lux {

// Per-luminaire arc levels, indexed like Scene::luminaires.
using DimmingVector = std::vector<int>;

inline DimmingVector full_lit(size_t n) { return DimmingVector(n, 254); }

inline int active_count(const DimmingVector& d) {
  int c = 0;
  for (int l : d) c += l > 0 ? 1 : 0;
  return c;
}

struct PowerModel {
  std::vector<double> power_full;  // watts at level 254, per luminaire
  double standby = 0.0;            // watts at level 0

  static PowerModel from_scene(const Scene& scene, double standby = 0.0) {
    PowerModel m;
    m.standby = standby;
    for (const Luminaire& l : scene.luminaires) m.power_full.push_back(l.power_full);
    return m;
  }

  double power(size_t luminaire, int level) const {
    return standby + (power_full[luminaire] - standby) * dali::level_to_flux(level);
  }

  double total(const DimmingVector& levels) const {
    double w = 0.0;
    for (size_t l = 0; l < power_full.size(); ++l) w += power(l, levels[l]);
    return w;
  }

  double full_total() const { return total(full_lit(power_full.size())); }
  double delta_watt(const DimmingVector& levels) const { return full_total() - total(levels); }
};

// Per-occupant comfort bound: a floor on perceived lux and/or a cap on the
// drop versus the full-lit baseline.
struct ComfortConstraint {
  std::optional<double> max_delta_lux;
  std::optional<double> min_lux;

  bool satisfied(double lux, double delta_lux) const {
    if (max_delta_lux && delta_lux > *max_delta_lux + 1e-12) return false;
    if (min_lux && lux < *min_lux - 1e-12) return false;
    return true;
  }
};

// Everything the dimming optimizer needs, reduced to linear responses:
// occupant readings are additive over luminaires (superposition), scaled by
// the arc-level flux fraction.
struct ConfigModel {
  Eigen::MatrixXd occupant_readings;  // (occupant, luminaire) lux at full output
  PowerModel power;

  size_t luminaire_count() const { return power.power_full.size(); }

  double occupant_lux(int occupant, const DimmingVector& levels) const {
    double lux = 0.0;
    for (size_t l = 0; l < luminaire_count(); ++l)
      lux += dali::level_to_flux(levels[l]) *
             occupant_readings(occupant, static_cast<Eigen::Index>(l));
    return lux;
  }
};

// Per-luminaire radiosity solutions at full output plus the responses needed
// to recombine any dimming configuration by superposition.
struct SolutionCache {
  uint64_t scene_fingerprint = 0;
  std::vector<Solution> per_luminaire;  // luminaire at 254, everything else off
  ConfigModel model;
  int rays = 0;
  uint64_t seed = 0;

  Solution combine(const DimmingVector& levels) const {
    Solution out;
    if (per_luminaire.empty()) return out;
    const Eigen::Index n = per_luminaire.front().exitance.size();
    out.exitance = Eigen::VectorXd::Zero(n);
    out.irradiance = Eigen::VectorXd::Zero(n);
    double residual = 0.0;
    for (size_t l = 0; l < per_luminaire.size(); ++l) {
      const double f = dali::level_to_flux(levels[l]);
      if (f == 0.0) continue;
      out.exitance += f * per_luminaire[l].exitance;
      out.irradiance += f * per_luminaire[l].irradiance;
      residual += f * per_luminaire[l].residual;
    }
    out.residual = residual;
    return out;
  }
};

// Occupant responses use a per-occupant ray set shared across luminaires so
// the superposed reading is exactly linear in the levels.
inline void recompute_readings(SolutionCache& cache, const Scene& scene,
                               const VisibilityIndex& index) {
  const size_t nl = scene.luminaires.size();
  cache.model.occupant_readings.resize(static_cast<Eigen::Index>(scene.occupants.size()),
                                       static_cast<Eigen::Index>(nl));
  for (size_t o = 0; o < scene.occupants.size(); ++o)
    for (size_t l = 0; l < nl; ++l)
      cache.model.occupant_readings(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(l)) =
          occupant_perceived_lux(scene, cache.per_luminaire[l], index, scene.occupants[o],
                                 cache.rays, cache.seed);
}

// One direct factorization, one back-solve per luminaire.
inline SolutionCache build_cache(const Scene& scene, const TransportSystem& sys,
                                 const VisibilityIndex& index, int rays, uint64_t seed) {
  SolutionCache cache;
  cache.scene_fingerprint = scene.fingerprint();
  cache.rays = rays;
  cache.seed = seed;
  cache.model.power = PowerModel::from_scene(scene);

  const size_t nl = scene.luminaires.size();
  RadiosityProblem p = make_problem(scene, sys, emission_vector(scene, full_lit(nl)));
  Eigen::MatrixXd system = -(p.reflectance.asDiagonal() * p.transport);
  system.diagonal().array() += 1.0;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);

  cache.per_luminaire.resize(nl);
  for (size_t l = 0; l < nl; ++l) {
    DimmingVector only_l(nl, 0);
    only_l[l] = 254;
    p.emission = emission_vector(scene, only_l);
    Eigen::VectorXd b = lu.solve(p.emission);
    cache.per_luminaire[l] = detail::finish_solution(p, std::move(b), 0);
  }
  recompute_readings(cache, scene, index);
  return cache;
}

struct ConfigEval {
  double delta_watt = 0.0;
  std::vector<double> occupant_lux;
  std::vector<double> occupant_delta_lux;

  bool satisfies(const ComfortConstraint& c) const {
    for (size_t o = 0; o < occupant_lux.size(); ++o)
      if (!c.satisfied(occupant_lux[o], occupant_delta_lux[o])) return false;
    return true;
  }
};

inline ConfigEval evaluate_config(const ConfigModel& model, const DimmingVector& levels) {
  if (levels.size() != model.luminaire_count())
    throw ValidationError("dimming vector length must match luminaire count");
  for (int l : levels)
    if (l < 0 || l > 254) throw ValidationError("arc level out of range 0..254");
  ConfigEval eval;
  eval.delta_watt = model.power.delta_watt(levels);
  const DimmingVector full = full_lit(model.luminaire_count());
  for (Eigen::Index o = 0; o < model.occupant_readings.rows(); ++o) {
    const double lux = model.occupant_lux(static_cast<int>(o), levels);
    const double lux_full = model.occupant_lux(static_cast<int>(o), full);
    eval.occupant_lux.push_back(lux);
    eval.occupant_delta_lux.push_back(lux_full - lux);
  }
  return eval;
}

inline ConfigEval evaluate_config(const Scene& scene, const SolutionCache& cache,
                                  const DimmingVector& levels) {
  if (scene.fingerprint() != cache.scene_fingerprint)
    throw ValidationError("solution cache is stale (scene fingerprint mismatch)");
  return evaluate_config(cache.model, levels);
}

struct OptimizeResult {
  DimmingVector levels;
  bool feasible = false;
  ConfigEval eval;
};

// Exhaustive search over |levels|^n configurations. Maximizes the power
// saving; ties break toward fewer active luminaires, then the
// lexicographically smallest vector. Infeasible constraints return full-lit
// with the feasible flag cleared.
inline OptimizeResult optimize_exhaustive(const ConfigModel& model,
                                          const ComfortConstraint& constraint,
                                          std::vector<int> level_set,
                                          long max_space = 1000000) {
  const size_t n = model.luminaire_count();
  if (level_set.empty()) throw ValidationError("level set must not be empty");
  std::sort(level_set.begin(), level_set.end());
  level_set.erase(std::unique(level_set.begin(), level_set.end()), level_set.end());
  double space = 1.0;
  for (size_t k = 0; k < n; ++k) space *= static_cast<double>(level_set.size());
  if (space > static_cast<double>(max_space))
    throw ValidationError("search-space bound exceeded");

  OptimizeResult best;
  best.levels = full_lit(n);
  best.eval = evaluate_config(model, best.levels);
  best.feasible = best.eval.satisfies(constraint);
  bool found = best.feasible;

  std::vector<size_t> odo(n, 0);
  DimmingVector candidate(n);
  while (true) {
    for (size_t k = 0; k < n; ++k) candidate[k] = level_set[odo[k]];
    ConfigEval eval = evaluate_config(model, candidate);
    if (eval.satisfies(constraint)) {
      bool better = false;
      if (!found) {
        better = true;
      } else if (eval.delta_watt > best.eval.delta_watt) {
        better = true;
      } else if (eval.delta_watt == best.eval.delta_watt) {
        const int ca = active_count(candidate), cb = active_count(best.levels);
        better = ca < cb || (ca == cb && candidate < best.levels);
      }
      if (better) {
        best.levels = candidate;
        best.eval = eval;
        best.feasible = true;
        found = true;
      }
    }
    size_t k = 0;
    while (k < n && ++odo[k] == level_set.size()) odo[k++] = 0;
    if (k == n) break;
  }
  if (!found) {
    best.levels = full_lit(n);
    best.eval = evaluate_config(model, best.levels);
    best.feasible = false;
  }
  return best;
}

// Greedy descent from full-lit: repeatedly applies the single-luminaire
// reduction with the largest power saving that keeps every occupant
// constraint satisfied, trying luminaires outside any view frustum first
// (hidden, then partial, then visible).
inline OptimizeResult optimize_greedy(const ConfigModel& model,
                                      const ComfortConstraint& constraint,
                                      std::vector<int> level_set,
                                      const std::vector<VfoaVisibility>& visibility_class) {
  const size_t n = model.luminaire_count();
  if (level_set.empty()) throw ValidationError("level set must not be empty");
  std::sort(level_set.begin(), level_set.end());
  level_set.erase(std::unique(level_set.begin(), level_set.end()), level_set.end());

  OptimizeResult result;
  result.levels = full_lit(n);

  auto next_lower = [&level_set](int level) -> std::optional<int> {
    auto it = std::lower_bound(level_set.begin(), level_set.end(), level);
    if (it == level_set.begin()) return std::nullopt;
    return *(it - 1);
  };

  struct Candidate {
    int rank;  // 0 hidden, 1 partial, 2 visible
    double saving;
    size_t luminaire;
    int to_level;
  };

  while (true) {
    std::vector<Candidate> candidates;
    for (size_t l = 0; l < n; ++l) {
      const auto lower = next_lower(result.levels[l]);
      if (!lower) continue;
      const double saving =
          model.power.power(l, result.levels[l]) - model.power.power(l, *lower);
      const int rank = l < visibility_class.size()
                           ? static_cast<int>(visibility_class[l])
                           : static_cast<int>(VfoaVisibility::visible);
      candidates.push_back({rank, saving, l, *lower});
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
      if (a.rank != b.rank) return a.rank < b.rank;
      if (a.saving != b.saving) return a.saving > b.saving;
      return a.luminaire < b.luminaire;
    });
    bool applied = false;
    for (const Candidate& c : candidates) {
      DimmingVector trial = result.levels;
      trial[c.luminaire] = c.to_level;
      ConfigEval eval = evaluate_config(model, trial);
      if (eval.satisfies(constraint)) {
        result.levels = std::move(trial);
        applied = true;
        break;
      }
    }
    if (!applied) break;
  }
  result.eval = evaluate_config(model, result.levels);
  result.feasible = result.eval.satisfies(constraint);
  return result;
}

struct EnergyReport {
  double delta_watt = 0.0;
  double overhead_watt = 0.0;
  double duration_hours = 0.0;
  double kwh_saved = 0.0;
  double full_kwh = 0.0;
  double percent_saved = 0.0;

  // The accounting, spelled out so reports are auditable.
  static constexpr const char* kFormula =
      "kWh_saved = (delta_watt - overhead_w) * hours / 1000; "
      "percent = 100 * kWh_saved / ((P_full_lit + overhead_w) * hours / 1000)";
};

inline EnergyReport energy_report(const DimmingVector& levels, const PowerModel& power,
                                  double duration_hours, double overhead_watt = 0.0) {
  if (!(duration_hours > 0.0)) throw ValidationError("duration must be > 0");
  EnergyReport r;
  r.delta_watt = power.delta_watt(levels);
  r.overhead_watt = overhead_watt;
  r.duration_hours = duration_hours;
  r.kwh_saved = (r.delta_watt - overhead_watt) * duration_hours / 1000.0;
  r.full_kwh = (power.full_total() + overhead_watt) * duration_hours / 1000.0;
  r.percent_saved = r.full_kwh > 0.0 ? 100.0 * r.kwh_saved / r.full_kwh : 0.0;
  return r;
}

}  // namespace lux
