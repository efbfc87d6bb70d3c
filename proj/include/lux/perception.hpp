// Copyright 2026 luxsim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lux/bvh.hpp"
#include "lux/radiosity.hpp"
#include "lux/scene.hpp"

namespace lux {

enum class AcceptanceRegion { hemisphere, cone };

// Point receiver: a virtual luxmeter, or an occupant's view frustum modeled
// as one. The LSC is the full angular response (an ideal cosine-corrected
// meter has LSC = cos theta), so the reading is the integral of
// L(omega) * LSC(theta) over the acceptance region.
struct Receiver {
  int id = 0;
  Vec3 position = Vec3::Zero();
  Vec3 axis = Vec3(0, 0, 1);
  AcceptanceRegion acceptance = AcceptanceRegion::hemisphere;
  double cone_half_angle = kPi / 2.0;
  DistributionCurve lsc = make_standard("cosine_lsc", 5.0);

  void validate() const {
    if (std::abs(axis.norm() - 1.0) > 1e-9)
      throw ValidationError("receiver axis must be unit length");
    if (acceptance == AcceptanceRegion::cone &&
        !(cone_half_angle > 0.0 && cone_half_angle <= kPi / 2.0))
      throw ValidationError("cone half-angle out of (0, 90]");
  }
};

// Monte Carlo reading in lux. Directions are cosine-weighted over the full
// hemisphere about the axis; cone acceptance is an indicator on the same
// sample set, so widening the cone only ever adds non-negative terms (nested
// sampling). Radiance along a ray is B/pi of the first patch hit, 0 on miss.
inline double virtual_luxmeter(const Scene& scene, const Solution& sol,
                               const VisibilityIndex& index, const Receiver& r, int rays,
                               uint64_t seed) {
  if (rays < 1) throw ValidationError("rays must be >= 1");
  r.validate();
  Rng rng(hash_mix(seed, static_cast<uint64_t>(r.id)));
  int g = 1;
  while (g * g < rays) ++g;
  const double cos_limit =
      r.acceptance == AcceptanceRegion::cone ? std::cos(r.cone_half_angle) : 0.0;
  double sum = 0.0;
  for (int k = 0; k < rays; ++k) {
    const int cell = k % (g * g);
    const double u1 = (cell % g + rng.next_double()) / g;
    const double u2 = (cell / g + rng.next_double()) / g;
    const Vec3 dir = cosine_sample_hemisphere(r.axis, u1, u2);
    const double cos_theta = r.axis.dot(dir);
    if (cos_theta <= 1e-9) continue;
    if (cos_theta < cos_limit - 1e-15) continue;  // outside the cone
    auto hit = index.first_hit(r.position, dir);
    if (!hit) continue;
    const int pidx = scene.patch_index(hit->patch_id);
    if (pidx < 0) continue;
    const double radiance = sol.exitance(pidx) / kPi;
    const double theta = std::acos(std::clamp(cos_theta, -1.0, 1.0));
    // importance correction for the cosine-weighted pdf cos/pi
    sum += radiance * r.lsc.eval(theta) * kPi / cos_theta;
  }
  return sum / rays;
}

// Occupant's perceived illuminance: the virtual luxmeter placed between the
// eyes, aimed along the quantized VFOA bin center (or the raw heading in
// oracle mode), with cone acceptance.
inline double occupant_perceived_lux(const Scene& scene, const Solution& sol,
                                     const VisibilityIndex& index, const Occupant& o,
                                     int rays, uint64_t seed, bool use_raw_heading = false) {
  Receiver r;
  r.id = o.id;
  r.position = o.head_position;
  r.axis = o.vfoa_axis(use_raw_heading);
  r.acceptance = AcceptanceRegion::cone;
  r.cone_half_angle = o.cone_half_angle;
  r.lsc = o.lsc;
  return virtual_luxmeter(scene, sol, index, r, rays, seed);
}

enum class VfoaVisibility { hidden, partial, visible };

inline const char* to_string(VfoaVisibility v) {
  switch (v) {
    case VfoaVisibility::hidden: return "hidden";
    case VfoaVisibility::partial: return "partial";
    case VfoaVisibility::visible: return "visible";
  }
  return "?";
}

// Classifies a luminaire against an occupant's view cone by testing a fixed
// 4x4 grid of points on each emissive patch: visible when every point is
// inside the cone with a clear line of sight, hidden when none is.
inline VfoaVisibility luminaire_in_vfoa(const Scene& scene, const Occupant& o,
                                        const Luminaire& l, const VisibilityIndex& index,
                                        bool use_raw_heading = false) {
  const Vec3 axis = o.vfoa_axis(use_raw_heading);
  const double cos_limit = std::cos(o.cone_half_angle);
  const auto& patch_idx = scene.emitter_patches(l.id);
  int seen = 0, total = 0;
  constexpr int kGrid = 4;
  for (int pi : patch_idx) {
    const Patch& p = scene.patches[static_cast<size_t>(pi)];
    for (int a = 0; a < kGrid; ++a) {
      for (int b = 0; b < kGrid; ++b) {
        ++total;
        const Vec3 point = p.grid_point((a + 0.5) / kGrid, (b + 0.5) / kGrid);
        const Vec3 diff = point - o.head_position;
        const double dist = diff.norm();
        if (dist < 1e-12) continue;
        if (axis.dot(diff / dist) < cos_limit) continue;
        if (index.segment_occluded(o.head_position, point, p.id)) continue;
        ++seen;
      }
    }
  }
  if (total == 0 || seen == 0) return VfoaVisibility::hidden;
  if (seen == total) return VfoaVisibility::visible;
  return VfoaVisibility::partial;
}

// ---------------------------------------------------------------------------
// Batch receiver evaluation: CSV in (id,x,y,z,ax,ay,az,type[,lsc]) -> (id,lux)
// type is `hemisphere` or `cone:<half-angle deg>`.
// ---------------------------------------------------------------------------

inline std::vector<Receiver> load_receivers_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open receivers file: " + path);
  std::vector<Receiver> receivers;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#' || line.rfind("id,", 0) == 0) continue;
    std::istringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() < 8)
      throw ParseError(path + ":" + std::to_string(lineno) + ": expected id,x,y,z,ax,ay,az,type");
    Receiver r;
    r.id = std::stoi(fields[0]);
    r.position = Vec3(std::stod(fields[1]), std::stod(fields[2]), std::stod(fields[3]));
    r.axis = Vec3(std::stod(fields[4]), std::stod(fields[5]), std::stod(fields[6])).normalized();
    const std::string& type = fields[7];
    if (type == "hemisphere") {
      r.acceptance = AcceptanceRegion::hemisphere;
    } else if (type.rfind("cone:", 0) == 0) {
      r.acceptance = AcceptanceRegion::cone;
      r.cone_half_angle = deg_to_rad(std::stod(type.substr(5)));
    } else {
      throw ParseError(path + ":" + std::to_string(lineno) + ": unknown receiver type " + type);
    }
    if (fields.size() > 8 && !fields[8].empty())
      r.lsc = make_standard(fields[8] == "cosine" ? "cosine_lsc" : fields[8], 5.0);
    receivers.push_back(std::move(r));
  }
  return receivers;
}

inline void evaluate_receivers_csv(const Scene& scene, const Solution& sol,
                                   const VisibilityIndex& index,
                                   const std::vector<Receiver>& receivers, int rays,
                                   uint64_t seed, const std::string& out_path) {
  std::ofstream out(out_path);
  if (!out) throw IoError("cannot write receiver output: " + out_path);
  out << "id,lux\n";
  char buf[64];
  for (const Receiver& r : receivers) {
    const double lux = virtual_luxmeter(scene, sol, index, r, rays, seed);
    std::snprintf(buf, sizeof buf, "%d,%.9g\n", r.id, lux);
    out << buf;
  }
}

}  // namespace lux
