// Copyright 2026 luxsim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lux/controller.hpp"
#include "lux/gateway.hpp"
#include "lux/scene.hpp"

namespace lux {

enum class ControlPolicy { none, ils_greedy, ils_exhaustive };

inline const char* to_string(ControlPolicy p) {
  switch (p) {
    case ControlPolicy::none: return "none";
    case ControlPolicy::ils_greedy: return "ils-greedy";
    case ControlPolicy::ils_exhaustive: return "ils-exhaustive";
  }
  return "?";
}

inline ControlPolicy parse_policy(const std::string& s) {
  if (s == "none") return ControlPolicy::none;
  if (s == "ils-greedy" || s == "greedy") return ControlPolicy::ils_greedy;
  if (s == "ils-exhaustive" || s == "exhaustive") return ControlPolicy::ils_exhaustive;
  throw ValidationError("unknown control policy: " + s);
}

struct OccupantPose {
  int occupant_id = 0;
  std::optional<Vec3> head;
  std::optional<double> heading;  // radians
};

struct ScenarioStep {
  double time_s = 0.0;
  std::vector<OccupantPose> poses;
  std::optional<std::vector<int>> available;  // luminaire ids allowed on
};

struct Scenario {
  std::string scene_path;
  ControlPolicy policy = ControlPolicy::none;
  ComfortConstraint constraint;
  std::vector<int> level_set = {0, 254};
  std::vector<ScenarioStep> steps;
  double report_hours = 8.0;
  double overhead_watt = 0.0;
};

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  Scenario sc;
  try {
    sc.scene_path = j.at("scene").get<std::string>();
    if (sc.scene_path.empty() || sc.scene_path[0] != '/')
      sc.scene_path = detail::dirname(path) + "/" + sc.scene_path;
    sc.policy = parse_policy(j.value("policy", std::string("none")));
    if (j.contains("constraint")) {
      const auto& c = j["constraint"];
      if (c.contains("max_delta_lux")) sc.constraint.max_delta_lux = c["max_delta_lux"].get<double>();
      if (c.contains("min_lux")) sc.constraint.min_lux = c["min_lux"].get<double>();
      if (sc.constraint.max_delta_lux && *sc.constraint.max_delta_lux < 0)
        throw ValidationError("constraint thresholds must be >= 0");
      if (sc.constraint.min_lux && *sc.constraint.min_lux < 0)
        throw ValidationError("constraint thresholds must be >= 0");
    }
    if (j.contains("levels")) sc.level_set = j["levels"].get<std::vector<int>>();
    sc.report_hours = j.value("report_hours", 8.0);
    sc.overhead_watt = j.value("overhead_w", 0.0);
    double last_t = -std::numeric_limits<double>::infinity();
    for (const auto& stepj : j.at("timeline")) {
      ScenarioStep step;
      step.time_s = stepj.at("t").get<double>();
      if (!(step.time_s > last_t))
        throw ValidationError("timeline times must be strictly increasing");
      last_t = step.time_s;
      for (const auto& pj : stepj.value("occupants", nlohmann::json::array())) {
        OccupantPose pose;
        pose.occupant_id = pj.at("id").get<int>();
        if (pj.contains("head")) pose.head = detail::parse_vec3(pj["head"], "pose head");
        if (pj.contains("heading_deg")) pose.heading = deg_to_rad(pj["heading_deg"].get<double>());
        step.poses.push_back(pose);
      }
      if (stepj.contains("available"))
        step.available = stepj["available"].get<std::vector<int>>();
      sc.steps.push_back(std::move(step));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return sc;
}

struct StepLog {
  double time_s = 0.0;
  DimmingVector levels;
  double delta_watt = 0.0;
  std::vector<double> occupant_lux;
  std::vector<double> occupant_delta_lux;
  std::vector<VfoaVisibility> visibility;  // per luminaire, worst over occupants
  bool infeasible = false;
};

struct SimulationResult {
  std::vector<StepLog> steps;
  EnergyReport final_report;
  DimmingVector final_levels;
};

struct SimulateOptions {
  int samples = 32;
  int rays = 4096;
  uint64_t seed = 1;
  WeightMode mode = WeightMode::ldc_lsc;
  int threads = 1;
  // When set, commands travel as gateway protocol lines; otherwise the bus
  // is driven in-process.
  std::function<std::string(const std::string&)> send_line;
};

// Runs the timeline: per step, update occupant poses, classify luminaire
// visibility, run the policy, push level changes over DALI, and log the
// occupant readings. Infeasible steps fall back to full-lit and the run
// continues.
inline SimulationResult run_scenario(const Scenario& scenario, Scene scene,
                                     dali::Bus& bus, const SimulateOptions& opt) {
  TransportSystem sys = assemble_system(scene, opt.samples, opt.seed, opt.mode, opt.threads);
  const VisibilityIndex index(scene);
  const size_t nl = scene.luminaires.size();

  for (const Luminaire& l : scene.luminaires)
    bus.attach(l.dali_short_address);

  auto send = [&](const std::string& line) -> std::string {
    if (opt.send_line) return opt.send_line(line);
    dali::Gateway local(bus);
    return local.handle_line(line);
  };

  // the bus starts at the scene's configured levels
  DimmingVector current(nl, 0);
  for (size_t l = 0; l < nl; ++l) {
    current[l] = scene.luminaires[l].level;
    send("DAPC " + std::to_string(scene.luminaires[l].dali_short_address) + " " +
         std::to_string(current[l]));
  }

  SolutionCache cache = build_cache(scene, sys, index, opt.rays, opt.seed);

  SimulationResult result;
  for (const ScenarioStep& step : scenario.steps) {
    for (const OccupantPose& pose : step.poses) {
      for (Occupant& o : scene.occupants) {
        if (o.id != pose.occupant_id) continue;
        if (pose.head) o.head_position = *pose.head;
        if (pose.heading) o.heading = *pose.heading;
      }
    }

    // poses changed, so occupant responses must be rebuilt; geometry and the
    // per-luminaire solutions are unchanged
    recompute_readings(cache, scene, index);

    std::vector<VfoaVisibility> vis(nl, VfoaVisibility::hidden);
    for (size_t l = 0; l < nl; ++l) {
      for (const Occupant& o : scene.occupants) {
        const VfoaVisibility v = luminaire_in_vfoa(scene, o, scene.luminaires[l], index);
        if (static_cast<int>(v) > static_cast<int>(vis[l])) vis[l] = v;
      }
    }

    StepLog log;
    log.time_s = step.time_s;
    log.visibility = vis;

    DimmingVector target = current;
    switch (scenario.policy) {
      case ControlPolicy::none:
        break;
      case ControlPolicy::ils_greedy: {
        OptimizeResult r = optimize_greedy(cache.model, scenario.constraint,
                                           scenario.level_set, vis);
        target = r.levels;
        log.infeasible = !r.feasible;
        break;
      }
      case ControlPolicy::ils_exhaustive: {
        OptimizeResult r =
            optimize_exhaustive(cache.model, scenario.constraint, scenario.level_set);
        target = r.levels;
        if (!r.feasible) {
          log.infeasible = true;
          target = full_lit(nl);  // fallback
        }
        break;
      }
    }
    if (step.available) {
      for (size_t l = 0; l < nl; ++l) {
        const int id = scene.luminaires[l].id;
        if (std::find(step.available->begin(), step.available->end(), id) ==
            step.available->end())
          target[l] = 0;
      }
    }

    for (size_t l = 0; l < nl; ++l) {
      if (target[l] == current[l]) continue;
      const std::string reply =
          send("DAPC " + std::to_string(scene.luminaires[l].dali_short_address) + " " +
               std::to_string(target[l]));
      if (reply != "OK") throw IoError("gateway rejected command: " + reply);
      current[l] = target[l];
    }

    ConfigEval eval = evaluate_config(scene, cache, current);
    log.levels = current;
    log.delta_watt = eval.delta_watt;
    log.occupant_lux = eval.occupant_lux;
    log.occupant_delta_lux = eval.occupant_delta_lux;
    result.steps.push_back(std::move(log));
  }

  result.final_levels = current;
  result.final_report = energy_report(current, PowerModel::from_scene(scene),
                                      scenario.report_hours, scenario.overhead_watt);
  return result;
}

}  // namespace lux
