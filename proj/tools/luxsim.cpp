// Copyright 2026 luxsim contributors
// SPDX-License-Identifier: Apache-2.0
//
// luxsim: radiosity light estimation and DALI dimming control, end to end.
// Subcommands: validate, solve, map, sense, optimize, simulate, report.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "lux/lux.hpp"

namespace {

namespace fs = std::filesystem;

struct CommonFlags {
  std::string scene_path;
  int samples = 256;
  int rays = 4096;
  uint64_t seed = 1;
  double tol = 1e-9;
  std::string mode = "ldc+lsc";
  int threads = 1;
  std::string out_dir = "out";
};

void write_meta(const std::string& out_dir, const std::string& command,
                const nlohmann::json& flags) {
  nlohmann::json meta;
  meta["command"] = command;
  meta["flags"] = flags;
  meta["version"] = lux::kVersion;
  std::ofstream out(out_dir + "/meta.json");
  if (!out) throw lux::IoError("cannot write " + out_dir + "/meta.json");
  out << meta.dump(1) << "\n";
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw lux::IoError("cannot create output directory " + dir);
}

void write_solution_csv(const lux::Scene& scene, const lux::Solution& sol,
                        const std::string& path) {
  std::ofstream out(path);
  if (!out) throw lux::IoError("cannot write " + path);
  out << "patch_id,B,H\n";
  char buf[96];
  for (size_t k = 0; k < scene.patches.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%d,%.12g,%.12g\n", scene.patches[k].id,
                  sol.exitance(static_cast<Eigen::Index>(k)),
                  sol.irradiance(static_cast<Eigen::Index>(k)));
    out << buf;
  }
}

lux::Solution read_solution_csv(const lux::Scene& scene, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw lux::IoError("cannot open solution file: " + path);
  lux::Solution sol;
  const auto n = static_cast<Eigen::Index>(scene.patches.size());
  sol.exitance = Eigen::VectorXd::Zero(n);
  sol.irradiance = Eigen::VectorXd::Zero(n);
  std::string line;
  std::getline(in, line);  // header
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    int id;
    double b, h;
    if (std::sscanf(line.c_str(), "%d,%lf,%lf", &id, &b, &h) != 3)
      throw lux::ParseError(path + ": bad solution row: " + line);
    const int idx = scene.patch_index(id);
    if (idx < 0) throw lux::ValidationError(path + ": unknown patch id " + std::to_string(id));
    sol.exitance(idx) = b;
    sol.irradiance(idx) = h;
    ++rows;
  }
  if (rows != static_cast<int>(scene.patches.size()))
    throw lux::ValidationError(path + ": row count does not match the scene");
  return sol;
}

std::string levels_string(const lux::DimmingVector& levels) {
  std::string s;
  for (size_t k = 0; k < levels.size(); ++k) {
    if (k) s += "|";
    s += std::to_string(levels[k]);
  }
  return s;
}

int run_validate(const CommonFlags& f) {
  lux::Scene scene = lux::load_scene(f.scene_path);
  std::printf("ok: %zu patches, %zu luminaires, %zu sensors, %zu occupants\n",
              scene.patches.size(), scene.luminaires.size(), scene.sensors.size(),
              scene.occupants.size());
  return 0;
}

int run_solve(const CommonFlags& f, const std::string& solver, bool export_ff,
              const std::string& diff_against) {
  lux::Scene scene = lux::load_scene(f.scene_path);
  ensure_dir(f.out_dir);
  const lux::WeightMode mode = lux::parse_weight_mode(f.mode);
  lux::TransportSystem sys = lux::assemble_system(scene, f.samples, f.seed, mode, f.threads);
  lux::RadiosityProblem problem = lux::make_problem(scene, sys, lux::emission_vector(scene));
  lux::Solution sol;
  if (solver == "direct") {
    sol = lux::solve_direct(problem);
  } else {
    sol = lux::solve_iterative(problem, f.tol, 100000, lux::parse_scheme(solver));
  }
  write_solution_csv(scene, sol, f.out_dir + "/solution.csv");
  if (export_ff) {
    lux::save_matrix(sys.reading_matrix(), f.out_dir + "/ff.bin");
    lux::save_matrix_csv(sys.reading_matrix(), f.out_dir + "/ff.csv");
  }
  if (!diff_against.empty()) {
    lux::Solution other = read_solution_csv(scene, diff_against);
    std::ofstream out(f.out_dir + "/hdiff.csv");
    if (!out) throw lux::IoError("cannot write " + f.out_dir + "/hdiff.csv");
    out << "patch_id,H,H_other,delta\n";
    char buf[128];
    for (size_t k = 0; k < scene.patches.size(); ++k) {
      const auto i = static_cast<Eigen::Index>(k);
      std::snprintf(buf, sizeof buf, "%d,%.12g,%.12g,%.12g\n", scene.patches[k].id,
                    sol.irradiance(i), other.irradiance(i),
                    sol.irradiance(i) - other.irradiance(i));
      out << buf;
    }
  }
  write_meta(f.out_dir, "solve",
             {{"scene", f.scene_path},
              {"samples", f.samples},
              {"seed", f.seed},
              {"tol", f.tol},
              {"mode", f.mode},
              {"solver", solver},
              {"threads", f.threads},
              {"iterations", sol.iterations},
              {"residual", sol.residual}});
  std::printf("solved %zu patches (mode %s, residual %.3g)\n", scene.patches.size(),
              lux::to_string(mode), sol.residual);
  return 0;
}

int run_map(const CommonFlags& f, const std::string& solution_path, double grid, double plane) {
  lux::Scene scene = lux::load_scene(f.scene_path);
  lux::Solution sol = read_solution_csv(scene, solution_path);
  ensure_dir(f.out_dir);
  lux::VisibilityIndex index(scene);
  lux::LuxRaster raster = lux::incident_map(scene, sol, index, grid, plane, f.rays, f.seed);
  if (raster.empty_warning)
    std::fprintf(stderr, "warning: plane z=%g is outside the scene bounds; raster is empty\n",
                 plane);
  lux::write_raster_csv(raster, f.out_dir + "/map.csv");
  lux::write_raster_pgm(raster, f.out_dir + "/map.pgm");
  write_meta(f.out_dir, "map",
             {{"scene", f.scene_path},
              {"solution", solution_path},
              {"grid", grid},
              {"plane", plane},
              {"rays", f.rays},
              {"seed", f.seed}});
  std::printf("map %dx%d cells, max %.1f lux\n", raster.nx, raster.ny, raster.max_value());
  return 0;
}

int run_sense(const CommonFlags& f, const std::string& solution_path,
              const std::string& receivers_path, const std::string& out_path) {
  lux::Scene scene = lux::load_scene(f.scene_path);
  lux::Solution sol = read_solution_csv(scene, solution_path);
  lux::VisibilityIndex index(scene);
  auto receivers = lux::load_receivers_csv(receivers_path);
  lux::evaluate_receivers_csv(scene, sol, index, receivers, f.rays, f.seed, out_path);
  std::printf("evaluated %zu receivers -> %s\n", receivers.size(), out_path.c_str());
  return 0;
}

void write_optimize_report(const std::string& out_dir, const lux::Scene& scene,
                           const lux::OptimizeResult& result, const lux::EnergyReport& energy,
                           const std::string& policy) {
  std::ofstream txt(out_dir + "/report.txt");
  if (!txt) throw lux::IoError("cannot write " + out_dir + "/report.txt");
  txt << "policy: " << policy << "\n";
  txt << "levels: " << levels_string(result.levels) << "\n";
  txt << "feasible: " << (result.feasible ? "yes" : "no (full-lit fallback)") << "\n";
  char buf[160];
  std::snprintf(buf, sizeof buf, "delta_watt: %.6f\n", result.eval.delta_watt);
  txt << buf;
  for (size_t o = 0; o < result.eval.occupant_lux.size(); ++o) {
    std::snprintf(buf, sizeof buf, "occupant %d: lux %.3f, delta_lux %.3f\n",
                  scene.occupants[o].id, result.eval.occupant_lux[o],
                  result.eval.occupant_delta_lux[o]);
    txt << buf;
  }
  std::snprintf(buf, sizeof buf, "kwh_saved: %.6f\npercent_saved: %.4f\n", energy.kwh_saved,
                energy.percent_saved);
  txt << buf;
  txt << "formula: " << lux::EnergyReport::kFormula << "\n";

  std::ofstream csv(out_dir + "/report.csv");
  csv << "levels,delta_watt";
  for (size_t o = 0; o < result.eval.occupant_lux.size(); ++o)
    csv << ",occ" << scene.occupants[o].id << "_delta_lux";
  csv << ",kwh_saved,percent_saved\n";
  csv << levels_string(result.levels);
  std::snprintf(buf, sizeof buf, ",%.9g", result.eval.delta_watt);
  csv << buf;
  for (double d : result.eval.occupant_delta_lux) {
    std::snprintf(buf, sizeof buf, ",%.9g", d);
    csv << buf;
  }
  std::snprintf(buf, sizeof buf, ",%.9g,%.9g\n", energy.kwh_saved, energy.percent_saved);
  csv << buf;
}

int run_optimize(const CommonFlags& f, const std::string& policy, const std::string& levels_csv,
                 double max_delta_lux, double min_lux, double hours, double overhead) {
  lux::Scene scene = lux::load_scene(f.scene_path);
  ensure_dir(f.out_dir);
  const lux::WeightMode mode = lux::parse_weight_mode(f.mode);
  lux::TransportSystem sys = lux::assemble_system(scene, f.samples, f.seed, mode, f.threads);
  lux::VisibilityIndex index(scene);
  lux::SolutionCache cache = lux::build_cache(scene, sys, index, f.rays, f.seed);

  std::vector<int> level_set;
  {
    std::istringstream ls(levels_csv);
    std::string tok;
    while (std::getline(ls, tok, ',')) level_set.push_back(std::stoi(tok));
  }
  lux::ComfortConstraint constraint;
  if (max_delta_lux >= 0) constraint.max_delta_lux = max_delta_lux;
  if (min_lux >= 0) constraint.min_lux = min_lux;

  lux::OptimizeResult result;
  if (policy == "exhaustive") {
    result = lux::optimize_exhaustive(cache.model, constraint, level_set);
  } else if (policy == "greedy") {
    std::vector<lux::VfoaVisibility> vis(scene.luminaires.size(), lux::VfoaVisibility::hidden);
    for (size_t l = 0; l < scene.luminaires.size(); ++l)
      for (const lux::Occupant& o : scene.occupants) {
        const auto v = lux::luminaire_in_vfoa(scene, o, scene.luminaires[l], index);
        if (static_cast<int>(v) > static_cast<int>(vis[l])) vis[l] = v;
      }
    result = lux::optimize_greedy(cache.model, constraint, level_set, vis);
  } else {
    throw lux::ValidationError("unknown policy: " + policy);
  }
  const lux::EnergyReport energy =
      lux::energy_report(result.levels, cache.model.power, hours, overhead);
  write_optimize_report(f.out_dir, scene, result, energy, policy);
  write_meta(f.out_dir, "optimize",
             {{"scene", f.scene_path},
              {"policy", policy},
              {"levels", levels_csv},
              {"max_delta_lux", max_delta_lux},
              {"min_lux", min_lux},
              {"samples", f.samples},
              {"rays", f.rays},
              {"seed", f.seed},
              {"mode", f.mode},
              {"hours", hours},
              {"overhead_w", overhead}});
  std::printf("%s: levels %s, delta_watt %.3f, %s\n", policy.c_str(),
              levels_string(result.levels).c_str(), result.eval.delta_watt,
              result.feasible ? "feasible" : "infeasible (full-lit)");
  return 0;
}

int run_simulate(const CommonFlags& f, const std::string& scenario_path, int gateway_port) {
  lux::Scenario scenario = lux::load_scenario(scenario_path);
  lux::Scene scene = lux::load_scene(scenario.scene_path);
  ensure_dir(f.out_dir);

  lux::dali::Bus bus;
  lux::SimulateOptions opt;
  opt.samples = f.samples;
  opt.rays = f.rays;
  opt.seed = f.seed;
  opt.mode = lux::parse_weight_mode(f.mode);
  opt.threads = f.threads;

  std::unique_ptr<lux::dali::GatewayServer> server;
  std::unique_ptr<lux::dali::GatewayClient> client;
  if (gateway_port >= 0) {
    server = std::make_unique<lux::dali::GatewayServer>(bus);
    const int port = server->start(gateway_port);
    client = std::make_unique<lux::dali::GatewayClient>("127.0.0.1", port);
    opt.send_line = [&client](const std::string& line) { return client->request(line); };
  }

  lux::SimulationResult result = lux::run_scenario(scenario, scene, bus, opt);
  if (server) server->stop();

  std::ofstream timeline(f.out_dir + "/timeline.csv");
  if (!timeline) throw lux::IoError("cannot write " + f.out_dir + "/timeline.csv");
  timeline << "t,levels,delta_watt";
  for (const auto& o : scene.occupants)
    timeline << ",occ" << o.id << "_lux,occ" << o.id << "_delta_lux";
  timeline << ",infeasible\n";
  char buf[160];
  for (const auto& step : result.steps) {
    std::snprintf(buf, sizeof buf, "%.9g,%s,%.9g", step.time_s,
                  levels_string(step.levels).c_str(), step.delta_watt);
    timeline << buf;
    for (size_t o = 0; o < step.occupant_lux.size(); ++o) {
      std::snprintf(buf, sizeof buf, ",%.9g,%.9g", step.occupant_lux[o],
                    step.occupant_delta_lux[o]);
      timeline << buf;
    }
    timeline << "," << (step.infeasible ? 1 : 0) << "\n";
  }
  bus.write_log(f.out_dir + "/frames.log");

  std::ofstream report(f.out_dir + "/report.txt");
  report << "final levels: " << levels_string(result.final_levels) << "\n";
  std::snprintf(buf, sizeof buf,
                "delta_watt: %.6f\nhours: %.3f\noverhead_w: %.3f\nkwh_saved: %.6f\n"
                "percent_saved: %.4f\n",
                result.final_report.delta_watt, result.final_report.duration_hours,
                result.final_report.overhead_watt, result.final_report.kwh_saved,
                result.final_report.percent_saved);
  report << buf;
  report << "formula: " << lux::EnergyReport::kFormula << "\n";

  write_meta(f.out_dir, "simulate",
             {{"scenario", scenario_path},
              {"samples", f.samples},
              {"rays", f.rays},
              {"seed", f.seed},
              {"mode", f.mode},
              {"gateway", gateway_port >= 0}});
  std::printf("simulated %zu steps, final levels %s, saved %.4f kWh (%.2f%%)\n",
              result.steps.size(), levels_string(result.final_levels).c_str(),
              result.final_report.kwh_saved, result.final_report.percent_saved);
  return 0;
}

int run_report(const CommonFlags& f, const std::string& keep_csv, const std::string& levels_csv,
               double hours, double overhead, double standby) {
  lux::Scene scene = lux::load_scene(f.scene_path);
  lux::PowerModel power = lux::PowerModel::from_scene(scene, standby);
  lux::DimmingVector levels;
  if (!levels_csv.empty()) {
    std::istringstream ls(levels_csv);
    std::string tok;
    while (std::getline(ls, tok, ',')) levels.push_back(std::stoi(tok));
    if (levels.size() != scene.luminaires.size())
      throw lux::ValidationError("--levels length must match the luminaire count");
  } else {
    levels.assign(scene.luminaires.size(), 0);
    std::istringstream ls(keep_csv);
    std::string tok;
    while (std::getline(ls, tok, ',')) {
      const int id = std::stoi(tok);
      const int idx = scene.luminaire_index(id);
      if (idx < 0) throw lux::ValidationError("unknown luminaire id " + tok);
      levels[static_cast<size_t>(idx)] = 254;
    }
  }
  lux::EnergyReport r = lux::energy_report(levels, power, hours, overhead);
  std::printf("levels: %s\n", levels_string(levels).c_str());
  std::printf("delta_watt: %.6f\n", r.delta_watt);
  std::printf("kwh_saved: %.6f over %.3f h (overhead %.1f W)\n", r.kwh_saved, hours, overhead);
  std::printf("percent_saved: %.4f%%\n", r.percent_saved);
  std::printf("formula: %s\n", lux::EnergyReport::kFormula);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"radiosity light estimation and DALI dimming control"};
  app.require_subcommand(1);

  CommonFlags f;
  auto add_common = [&f](CLI::App* cmd, bool needs_scene = true) {
    if (needs_scene) cmd->add_option("--scene", f.scene_path, "scene file")->required();
    cmd->add_option("--samples", f.samples, "form-factor samples per patch pair");
    cmd->add_option("--rays", f.rays, "receiver rays");
    cmd->add_option("--seed", f.seed, "Monte Carlo seed");
    cmd->add_option("--tol", f.tol, "iterative solver tolerance");
    cmd->add_option("--mode", f.mode, "weighting mode: plain|ldc|lsc|ldc+lsc");
    cmd->add_option("--threads", f.threads, "assembly worker threads");
    cmd->add_option("--out-dir", f.out_dir, "output directory");
  };

  auto* validate = app.add_subcommand("validate", "parse and validate a scene file");
  add_common(validate);

  auto* solve = app.add_subcommand("solve", "assemble form factors and solve the light field");
  add_common(solve);
  std::string solver = "direct";
  bool export_ff = false;
  std::string diff_against;
  solve->add_option("--solver", solver, "direct|jacobi|gauss_seidel");
  solve->add_flag("--export-ff", export_ff, "also export the coupling matrix");
  solve->add_option("--diff-against", diff_against, "solution csv to diff H against");

  auto* map = app.add_subcommand("map", "raster the illuminance on a horizontal plane");
  add_common(map);
  std::string solution_path = "out/solution.csv";
  double grid = 0.25, plane = 0.75;
  map->add_option("--solution", solution_path, "solution csv from `solve`");
  map->add_option("--grid", grid, "cell size in meters");
  map->add_option("--plane", plane, "plane height in meters");

  auto* sense = app.add_subcommand("sense", "evaluate a batch of virtual luxmeters");
  add_common(sense);
  std::string receivers_path, sense_out = "sense.csv";
  sense->add_option("--solution", solution_path, "solution csv from `solve`");
  sense->add_option("--receivers", receivers_path, "receiver batch csv")->required();
  sense->add_option("--out", sense_out, "output csv");

  auto* optimize = app.add_subcommand("optimize", "choose a dimming vector");
  add_common(optimize);
  std::string policy = "exhaustive", levels_csv = "0,254";
  double max_delta_lux = -1, min_lux = -1, hours = 8.0, overhead = 0.0;
  optimize->add_option("--policy", policy, "greedy|exhaustive");
  optimize->add_option("--levels", levels_csv, "allowed arc levels, comma separated");
  optimize->add_option("--max-delta-lux", max_delta_lux, "per-occupant drop bound vs full-lit");
  optimize->add_option("--min-lux", min_lux, "per-occupant perceived floor");
  optimize->add_option("--hours", hours, "report duration");
  optimize->add_option("--overhead-w", overhead, "processing-unit overhead watts");

  auto* simulate = app.add_subcommand("simulate", "run a timeline scenario with control");
  add_common(simulate, false);
  std::string scenario_path;
  int gateway_port = -1;
  simulate->add_option("--scenario", scenario_path, "scenario file")->required();
  simulate->add_option("--gateway-port", gateway_port,
                       "drive commands through a local TCP gateway (0 = ephemeral port)");

  auto* report = app.add_subcommand("report", "energy arithmetic for a configuration");
  add_common(report);
  std::string keep_csv, rep_levels_csv;
  double rep_hours = 8.0, rep_overhead = 0.0, rep_standby = 0.0;
  report->add_option("--keep", keep_csv, "luminaire ids to keep at full, others off");
  report->add_option("--levels", rep_levels_csv, "explicit per-luminaire arc levels");
  report->add_option("--hours", rep_hours, "duration in hours");
  report->add_option("--overhead-w", rep_overhead, "processing-unit overhead watts");
  report->add_option("--standby-w", rep_standby, "per-gear standby watts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (validate->parsed()) return run_validate(f);
    if (solve->parsed()) return run_solve(f, solver, export_ff, diff_against);
    if (map->parsed()) return run_map(f, solution_path, grid, plane);
    if (sense->parsed()) return run_sense(f, solution_path, receivers_path, sense_out);
    if (optimize->parsed())
      return run_optimize(f, policy, levels_csv, max_delta_lux, min_lux, hours, overhead);
    if (simulate->parsed()) return run_simulate(f, scenario_path, gateway_port);
    if (report->parsed())
      return run_report(f, keep_csv, rep_levels_csv, rep_hours, rep_overhead, rep_standby);
  } catch (const lux::NumericError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 2;
  } catch (const lux::ParseError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 1;
  } catch (const lux::ValidationError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 1;
  } catch (const lux::IoError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 3;
  }
  return 0;
}
