// Copyright 2026 luxsim contributors
// SPDX-License-Identifier: Apache-2.0
//
// Generates the bundled room4 fixtures: an open-plan office replica
// (6 x 9 x 3 m, 8 ceiling luminaires in four rows of two, desks, a
// ceiling-hung baffle, two occupants, nine sensor cells) plus the closed-cube
// fixture and the dynamic control scenario.
//
//   make_room4 <output-dir>

#include <fstream>
#include <iostream>
#include <vector>

#include "lux/lux.hpp"

namespace {

using lux::Patch;
using lux::Scene;
using lux::Vec3;

constexpr double kRoomX = 6.0;
constexpr double kRoomY = 9.0;
constexpr double kRoomZ = 3.0;
constexpr double kCell = 1.0 / 3.0;

constexpr double kRhoFloor = 0.30;
constexpr double kRhoCeiling = 0.70;
constexpr double kRhoWall = 0.35;
constexpr double kRhoDesk = 0.35;
constexpr double kRhoBaffle = 0.40;

constexpr double kLumFlux = 10000.0;  // lm
constexpr double kLumPower = 96.8;    // W
constexpr double kLumZ = 2.99;
constexpr double kBaffleY = 4.5;
constexpr double kBaffleBottom = 2.10;

int next_id = 1;

Patch quad(std::vector<Vec3> verts, double rho) {
  Patch p;
  p.id = next_id++;
  p.vertices = std::move(verts);
  p.reflectance = rho;
  p.finalize();
  return p;
}

// Tiled axis-aligned rectangle in the plane held by `origin`, spanned by
// u_dir*u_len and v_dir*v_len, split into nu x nv cells. `skip` may drop
// cells (for luminaire cutouts).
template <typename Skip>
void tile(Scene& s, const Vec3& origin, const Vec3& u_dir, double u_len, int nu,
          const Vec3& v_dir, double v_len, int nv, double rho, Skip skip) {
  const double du = u_len / nu, dv = v_len / nv;
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      if (skip(i, j)) continue;
      const Vec3 a = origin + u_dir * (i * du) + v_dir * (j * dv);
      s.patches.push_back(quad({a, a + u_dir * du, a + u_dir * du + v_dir * dv, a + v_dir * dv},
                               rho));
    }
}

void tile(Scene& s, const Vec3& origin, const Vec3& u_dir, double u_len, int nu,
          const Vec3& v_dir, double v_len, int nv, double rho) {
  tile(s, origin, u_dir, u_len, nu, v_dir, v_len, nv, rho, [](int, int) { return false; });
}

struct LumPos {
  double x, y;
};

// two columns, four rows; ids 1..8 row-major from the south wall
const LumPos kLuminaires[8] = {
    {2.0, 1.125}, {4.0, 1.125}, {2.0, 3.375}, {4.0, 3.375},
    {2.0, 5.625}, {4.0, 5.625}, {2.0, 7.875}, {4.0, 7.875},
};
constexpr double kPanelHalfX = 0.5;        // 1.0 m wide
constexpr double kPanelHalfY = 1.0 / 3.0;  // 0.667 m deep

Scene build_room4() {
  Scene s;
  next_id = 1;

  const int nx = static_cast<int>(kRoomX / kCell);  // 18
  const int ny = static_cast<int>(kRoomY / kCell);  // 27
  const int nz = static_cast<int>(kRoomZ / kCell);  // 9

  // floor (z=0, normal up)
  tile(s, {0, 0, 0}, {1, 0, 0}, kRoomX, nx, {0, 1, 0}, kRoomY, ny, kRhoFloor);
  const int first_floor_patch = 0;

  // ceiling (z=3, normal down), cells under luminaire panels cut out
  auto in_panel = [](int i, int j) {
    const double cx = (i + 0.5) * kCell;
    const double cy = (j + 0.5) * kCell;
    for (const auto& l : kLuminaires)
      if (std::abs(cx - l.x) < kPanelHalfX && std::abs(cy - l.y) < kPanelHalfY) return true;
    return false;
  };
  tile(s, {0, 0, kRoomZ}, {0, 1, 0}, kRoomY, ny, {1, 0, 0}, kRoomX, nx, kRhoCeiling, in_panel);

  // walls (normals inward)
  tile(s, {0, 0, 0}, {0, 0, 1}, kRoomZ, nz, {0, 1, 0}, kRoomY, ny, kRhoWall);       // x = 0
  tile(s, {kRoomX, 0, 0}, {0, 1, 0}, kRoomY, ny, {0, 0, 1}, kRoomZ, nz, kRhoWall);  // x = 6
  tile(s, {0, 0, 0}, {1, 0, 0}, kRoomX, nx, {0, 0, 1}, kRoomZ, nz, kRhoWall);       // y = 0
  tile(s, {0, kRoomY, 0}, {0, 0, 1}, kRoomZ, nz, {1, 0, 0}, kRoomX, nx, kRhoWall);  // y = 9

  // ceiling-hung baffle across the room at y = 4.5, south face reflective
  tile(s, {0, kBaffleY, kBaffleBottom}, {1, 0, 0}, kRoomX, nx, {0, 0, 1},
       kRoomZ - kBaffleBottom, 2, kRhoBaffle);

  // luminaire panels (normal down) and their drivers
  for (int k = 0; k < 8; ++k) {
    const auto& lp = kLuminaires[k];
    const Vec3 c(lp.x, lp.y, kLumZ);
    Patch panel = quad({c + Vec3(-kPanelHalfX, -kPanelHalfY, 0), c + Vec3(-kPanelHalfX, kPanelHalfY, 0),
                        c + Vec3(kPanelHalfX, kPanelHalfY, 0), c + Vec3(kPanelHalfX, -kPanelHalfY, 0)},
                       0.0);
    panel.emitter_id = k + 1;
    s.patches.push_back(panel);
    lux::Luminaire l;
    l.id = k + 1;
    l.position = c;
    l.aim = Vec3(0, 0, -1);
    l.ldc_ref = "lambertian";
    l.ldc = lux::make_standard("lambertian", 5.0);
    l.total_flux = kLumFlux;
    l.power_full = kLumPower;
    l.dali_short_address = k;
    s.luminaires.push_back(l);
  }

  // four desks, 1.5 x 0.75 at 0.75 m height
  const double desk_y[2] = {1.3, 7.0};
  const double desk_x[2] = {2.0, 4.0};
  std::vector<int> desk_center_patches;
  for (double dy : desk_y)
    for (double dx : desk_x) {
      const size_t first = s.patches.size();
      tile(s, {dx - 0.75, dy - 0.375, 0.75}, {1, 0, 0}, 1.5, 4, {0, 1, 0}, 0.75, 2, kRhoDesk);
      desk_center_patches.push_back(s.patches[first + 5].id);  // an inner cell
    }

  // occupants: standing at the south desks, facing north (math heading 90)
  for (int k = 0; k < 2; ++k) {
    lux::Occupant o;
    o.id = k + 1;
    o.head_position = Vec3(desk_x[k], 1.7, 1.7);
    o.heading = lux::deg_to_rad(90.0);
    o.cone_half_angle = lux::deg_to_rad(40.0);
    s.occupants.push_back(o);
  }

  // nine sensor cells: the four desk cells plus five floor spots
  std::vector<int> sensor_patches = desk_center_patches;
  auto floor_cell_id = [&](double x, double y) {
    const int i = static_cast<int>(x / kCell);
    const int j = static_cast<int>(y / kCell);
    return s.patches[static_cast<size_t>(first_floor_patch + i * ny + j)].id;
  };
  sensor_patches.push_back(floor_cell_id(1.0, 2.2));
  sensor_patches.push_back(floor_cell_id(5.0, 2.2));
  sensor_patches.push_back(floor_cell_id(3.0, 4.0));
  sensor_patches.push_back(floor_cell_id(1.0, 6.7));
  sensor_patches.push_back(floor_cell_id(5.0, 6.7));
  for (size_t k = 0; k < sensor_patches.size(); ++k) {
    lux::LuxmeterSpec m;
    m.id = static_cast<int>(k + 1);
    const Patch& p = s.patches[static_cast<size_t>(
        [&] {  // find the index for the centroid report
          for (size_t q = 0; q < s.patches.size(); ++q)
            if (s.patches[q].id == sensor_patches[k]) return static_cast<int>(q);
          return 0;
        }())];
    m.position = p.centroid + Vec3(0, 0, 0.02);
    m.facing = Vec3(0, 0, 1);
    m.lsc_ref = "cosine";
    m.patch_id = sensor_patches[k];
    s.sensors.push_back(m);
  }

  s.finalize();
  return s;
}

Scene build_cube() {
  Scene s;
  next_id = 1;
  auto face = [&](const Vec3& c, const Vec3& right, const Vec3& up) {
    return quad({c - right * 0.5 - up * 0.5, c + right * 0.5 - up * 0.5,
                 c + right * 0.5 + up * 0.5, c - right * 0.5 + up * 0.5},
                0.5);
  };
  s.patches.push_back(face({0.5, 0.5, 0.0}, {1, 0, 0}, {0, 1, 0}));
  s.patches.push_back(face({0.5, 0.5, 1.0}, {-1, 0, 0}, {0, 1, 0}));
  s.patches.push_back(face({0.5, 0.0, 0.5}, {0, 0, 1}, {1, 0, 0}));
  s.patches.push_back(face({0.5, 1.0, 0.5}, {1, 0, 0}, {0, 0, 1}));
  s.patches.push_back(face({0.0, 0.5, 0.5}, {0, 1, 0}, {0, 0, 1}));
  s.patches.push_back(face({1.0, 0.5, 0.5}, {0, 0, 1}, {0, 1, 0}));
  // every face emits uniformly so the solved field is symmetric
  for (int k = 0; k < 6; ++k) {
    s.patches[static_cast<size_t>(k)].emitter_id = k + 1;
    lux::Luminaire l;
    l.id = k + 1;
    l.position = s.patches[static_cast<size_t>(k)].centroid;
    l.aim = s.patches[static_cast<size_t>(k)].normal;
    l.ldc_ref = "isotropic";
    l.ldc = lux::make_standard("isotropic", 5.0);
    l.total_flux = 100.0;
    l.power_full = 10.0;
    l.dali_short_address = k;
    s.luminaires.push_back(l);
  }
  s.finalize();
  return s;
}

const char* kScenario = R"({
 "scene": "room4.scene",
 "policy": "ils-exhaustive",
 "constraint": {"max_delta_lux": 200},
 "levels": [0, 254],
 "report_hours": 8,
 "overhead_w": 0,
 "timeline": [
  {"t": 0, "occupants": [
    {"id": 1, "head": [2.0, 7.6, 1.7], "heading_deg": 270},
    {"id": 2, "head": [4.0, 7.6, 1.7], "heading_deg": 270}
  ]},
  {"t": 10, "occupants": [
    {"id": 1, "head": [2.0, 1.7, 1.7], "heading_deg": 90},
    {"id": 2, "head": [4.0, 1.7, 1.7], "heading_deg": 90}
  ]},
  {"t": 20, "occupants": [
    {"id": 1, "head": [2.0, 1.7, 1.7], "heading_deg": 90},
    {"id": 2, "head": [4.0, 1.7, 1.7], "heading_deg": 90}
  ]},
  {"t": 30, "occupants": [
    {"id": 1, "head": [2.0, 7.6, 1.7], "heading_deg": 270},
    {"id": 2, "head": [4.0, 7.6, 1.7], "heading_deg": 270}
  ]}
 ]
})";

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_room4 <output-dir>\n";
    return 1;
  }
  const std::string dir = argv[1];
  Scene room4 = build_room4();
  lux::save_scene(room4, dir + "/room4.scene");
  std::cout << "room4.scene: " << room4.patches.size() << " patches, "
            << room4.luminaires.size() << " luminaires\n";
  Scene cube = build_cube();
  lux::save_scene(cube, dir + "/cube.scene");
  std::ofstream scenario(dir + "/room4_dynamic.scenario");
  scenario << kScenario;
  std::cout << "wrote " << dir << "/room4.scene, cube.scene, room4_dynamic.scenario\n";
  return 0;
}
