// Copyright 2026 luxsim contributors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end miniature: a lit box with one occupant, a two-lamp DALI bus,
// and one greedy dimming pass reported through the gateway protocol.

#include <cstdio>

#include "lux/lux.hpp"

int main() {
  lux::Scene s;
  auto add_face = [&s](int id, lux::Vec3 c, lux::Vec3 right, lux::Vec3 up, double rho) {
    lux::Patch p;
    p.id = id;
    p.vertices = {c - right - up, c + right - up, c + right + up, c - right + up};
    p.reflectance = rho;
    p.finalize();
    s.patches.push_back(p);
  };
  add_face(1, {1.5, 1.5, 0}, {1.5, 0, 0}, {0, 1.5, 0}, 0.3);   // floor
  add_face(2, {1.5, 1.5, 3}, {-1.5, 0, 0}, {0, 1.5, 0}, 0.7);  // ceiling
  add_face(3, {1.5, 0, 1.5}, {0, 0, 1.5}, {1.5, 0, 0}, 0.5);   // south wall
  add_face(4, {1.5, 3, 1.5}, {1.5, 0, 0}, {0, 0, 1.5}, 0.5);   // north wall
  s.patches[1].emitter_id = 1;
  s.patches[3].emitter_id = 2;
  for (int k = 0; k < 2; ++k) {
    lux::Luminaire l;
    l.id = k + 1;
    l.position = {1.5, 1.5 * k, 2.0};
    l.aim = k == 0 ? lux::Vec3(0, 0, -1) : lux::Vec3(0, -1, 0);
    l.total_flux = 5000;
    l.power_full = 48;
    l.dali_short_address = k;
    s.luminaires.push_back(l);
  }
  lux::Occupant who;
  who.id = 1;
  who.head_position = {1.5, 2.2, 1.2};
  who.heading = lux::deg_to_rad(270);  // facing the south wall
  s.occupants.push_back(who);
  s.finalize();

  auto sys = lux::assemble_system(s, 128, 1, lux::WeightMode::ldc_lsc);
  lux::VisibilityIndex index(s);
  auto cache = lux::build_cache(s, sys, index, 2048, 1);

  std::vector<lux::VfoaVisibility> vis;
  for (const auto& l : s.luminaires)
    vis.push_back(lux::luminaire_in_vfoa(s, who, l, index));

  lux::ComfortConstraint comfort;
  comfort.max_delta_lux = 40.0;
  auto choice = lux::optimize_greedy(cache.model, comfort, {0, 128, 254}, vis);

  lux::dali::Bus bus;
  bus.attach(0);
  bus.attach(1);
  lux::dali::Gateway gw(bus);
  for (size_t l = 0; l < s.luminaires.size(); ++l) {
    char line[64];
    std::snprintf(line, sizeof line, "DAPC %d %d", s.luminaires[l].dali_short_address,
                  choice.levels[l]);
    std::printf("%-12s -> %s\n", line, gw.handle_line(line).c_str());
  }
  auto eval = lux::evaluate_config(s, cache, choice.levels);
  std::printf("delta_watt %.1f, occupant delta_lux %.1f\n", eval.delta_watt,
              eval.occupant_delta_lux[0]);
  return 0;
}
