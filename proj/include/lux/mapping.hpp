// Copyright 2026 luxsim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "lux/perception.hpp"

namespace lux {

// Horizontal-plane illuminance raster. Values in lux at cell centers.
struct LuxRaster {
  double x0 = 0, y0 = 0;  // center of cell (0, 0)
  double cell = 0;
  int nx = 0, ny = 0;
  std::vector<double> lux;  // row-major, y-major rows
  double plane_z = 0;
  bool empty_warning = false;

  double at(int ix, int iy) const { return lux[static_cast<size_t>(iy) * nx + ix]; }
  double max_value() const {
    double m = 0.0;
    for (double v : lux) m = std::max(m, v);
    return m;
  }
};

// Samples the solved field on a grid at the given height with up-facing
// cosine-response virtual luxmeters. A plane outside the scene bounds yields
// an empty raster with the warning flag set.
inline LuxRaster incident_map(const Scene& scene, const Solution& sol,
                              const VisibilityIndex& index, double grid_m, double plane_z,
                              int rays = 256, uint64_t seed = 1) {
  if (!(grid_m > 0.0)) throw ValidationError("grid resolution must be > 0");
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (const Patch& p : scene.patches)
    for (const Vec3& v : p.vertices) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
  LuxRaster raster;
  raster.cell = grid_m;
  raster.plane_z = plane_z;
  if (plane_z < lo.z() || plane_z > hi.z()) {
    raster.empty_warning = true;
    return raster;
  }
  raster.nx = std::max(1, static_cast<int>(std::floor((hi.x() - lo.x()) / grid_m)));
  raster.ny = std::max(1, static_cast<int>(std::floor((hi.y() - lo.y()) / grid_m)));
  raster.x0 = lo.x() + grid_m / 2.0;
  raster.y0 = lo.y() + grid_m / 2.0;
  raster.lux.resize(static_cast<size_t>(raster.nx) * raster.ny, 0.0);
  Receiver r;
  r.axis = Vec3(0, 0, 1);
  r.acceptance = AcceptanceRegion::hemisphere;
  r.lsc = make_standard("cosine_lsc", 5.0);
  for (int iy = 0; iy < raster.ny; ++iy) {
    for (int ix = 0; ix < raster.nx; ++ix) {
      r.id = iy * raster.nx + ix;
      r.position = Vec3(raster.x0 + ix * grid_m, raster.y0 + iy * grid_m, plane_z);
      raster.lux[static_cast<size_t>(r.id)] =
          virtual_luxmeter(scene, sol, index, r, rays, seed);
    }
  }
  return raster;
}

inline void write_raster_csv(const LuxRaster& raster, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write raster csv: " + path);
  out << "x,y,lux\n";
  char buf[96];
  for (int iy = 0; iy < raster.ny; ++iy)
    for (int ix = 0; ix < raster.nx; ++ix) {
      std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g\n", raster.x0 + ix * raster.cell,
                    raster.y0 + iy * raster.cell, raster.at(ix, iy));
      out << buf;
    }
}

// 16-bit PGM at a fixed scale: one level = one lux, clamped at 65535.
// Row 0 is the northernmost (max y) row.
inline void write_raster_pgm(const LuxRaster& raster, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write raster pgm: " + path);
  out << "P5\n" << std::max(raster.nx, 1) << " " << std::max(raster.ny, 1) << "\n65535\n";
  if (raster.lux.empty()) {
    out.put(0);
    out.put(0);
    return;
  }
  for (int iy = raster.ny - 1; iy >= 0; --iy)
    for (int ix = 0; ix < raster.nx; ++ix) {
      const long v = std::clamp(std::lround(raster.at(ix, iy)), 0l, 65535l);
      out.put(static_cast<char>(v >> 8));
      out.put(static_cast<char>(v & 0xff));
    }
}

}  // namespace lux
