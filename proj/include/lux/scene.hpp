// Copyright 2026 luxsim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lux/geometry.hpp"
#include "lux/photometry.hpp"

namespace lux {

// ---------------------------------------------------------------------------
// Heading quantization
// ---------------------------------------------------------------------------

// Scenes store mathematical headings (radians, CCW from +X in the floor
// plane, +Y = North). Quantization works in compass angles (clockwise from
// North); boundary angles fall into the clockwise-next sector.
enum class Bearing { N, NE, E, SE, S, SW, W, NW };

inline const char* to_string(Bearing b) {
  switch (b) {
    case Bearing::N: return "N";
    case Bearing::NE: return "NE";
    case Bearing::E: return "E";
    case Bearing::SE: return "SE";
    case Bearing::S: return "S";
    case Bearing::SW: return "SW";
    case Bearing::W: return "W";
    case Bearing::NW: return "NW";
  }
  return "?";
}

inline double compass_from_heading(double heading_rad) {
  double c = kPi / 2.0 - heading_rad;
  c = std::fmod(c, 2.0 * kPi);
  if (c < 0) c += 2.0 * kPi;
  return c;
}

inline Bearing quantize_heading(double compass_rad, int bins = 4) {
  if (bins != 4 && bins != 8) throw ValidationError("bins must be 4 or 8");
  double c = std::fmod(compass_rad, 2.0 * kPi);
  if (c < 0) c += 2.0 * kPi;
  const double width = 2.0 * kPi / bins;
  const int idx = static_cast<int>(std::floor((c + width / 2.0) / width)) % bins;
  static const Bearing four[4] = {Bearing::N, Bearing::E, Bearing::S, Bearing::W};
  static const Bearing eight[8] = {Bearing::N,  Bearing::NE, Bearing::E,  Bearing::SE,
                                   Bearing::S,  Bearing::SW, Bearing::W,  Bearing::NW};
  return bins == 4 ? four[idx] : eight[idx];
}

// Horizontal unit vector of a bearing in the scene frame (+Y = North).
inline Vec3 bearing_axis(Bearing b) {
  switch (b) {
    case Bearing::N: return {0, 1, 0};
    case Bearing::NE: return {std::sqrt(0.5), std::sqrt(0.5), 0};
    case Bearing::E: return {1, 0, 0};
    case Bearing::SE: return {std::sqrt(0.5), -std::sqrt(0.5), 0};
    case Bearing::S: return {0, -1, 0};
    case Bearing::SW: return {-std::sqrt(0.5), -std::sqrt(0.5), 0};
    case Bearing::W: return {-1, 0, 0};
    case Bearing::NW: return {-std::sqrt(0.5), std::sqrt(0.5), 0};
  }
  return {0, 1, 0};
}

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

constexpr double kCoplanarTolerance = 1e-6;  // meters

// 3D facet: the unit of light transport. Normal and area derive from the
// vertex winding (right-handed).
struct Patch {
  int id = 0;
  std::vector<Vec3> vertices;  // 3 or 4, coplanar
  double reflectance = 0.0;    // in [0, 1)
  std::optional<int> emitter_id;

  // derived
  Vec3 normal = Vec3::Zero();
  double area = 0.0;
  Vec3 centroid = Vec3::Zero();
  double tri0_area = 0.0;  // split areas for uniform sampling

  void finalize() {
    if (vertices.size() != 3 && vertices.size() != 4)
      throw ValidationError("patch " + std::to_string(id) + ": needs 3 or 4 vertices");
    // Newell normal respects winding and is robust for near-degenerate quads
    Vec3 n = Vec3::Zero();
    for (size_t k = 0; k < vertices.size(); ++k) {
      const Vec3& a = vertices[k];
      const Vec3& b = vertices[(k + 1) % vertices.size()];
      n.x() += (a.y() - b.y()) * (a.z() + b.z());
      n.y() += (a.z() - b.z()) * (a.x() + b.x());
      n.z() += (a.x() - b.x()) * (a.y() + b.y());
    }
    const double len = n.norm();
    if (len < 1e-15)
      throw ValidationError("patch " + std::to_string(id) + ": degenerate (zero area)");
    normal = n / len;

    centroid = Vec3::Zero();
    for (const Vec3& v : vertices) centroid += v;
    centroid /= static_cast<double>(vertices.size());

    for (const Vec3& v : vertices)
      if (std::abs(normal.dot(v - centroid)) > kCoplanarTolerance)
        throw ValidationError("patch " + std::to_string(id) + ": non-coplanar patch");

    tri0_area = triangle_area(vertices[0], vertices[1], vertices[2]);
    area = tri0_area;
    if (vertices.size() == 4)
      area += triangle_area(vertices[0], vertices[2], vertices[3]);
    if (!(area > 0.0))
      throw ValidationError("patch " + std::to_string(id) + ": area must be > 0");
  }

  // Measure-preserving map from the unit square onto the patch.
  Vec3 point_at(double u, double v) const {
    if (vertices.size() == 3) return sample_triangle(vertices[0], vertices[1], vertices[2], u, v);
    const double split = tri0_area / area;
    if (u < split)
      return sample_triangle(vertices[0], vertices[1], vertices[2], u / split, v);
    return sample_triangle(vertices[0], vertices[2], vertices[3],
                           (u - split) / (1.0 - split), v);
  }

  // Geometric lattice point (bilinear for quads); not area-uniform, meant for
  // deterministic coverage grids rather than Monte Carlo estimators.
  Vec3 grid_point(double u, double v) const {
    if (vertices.size() == 3) return sample_triangle(vertices[0], vertices[1], vertices[2], u, v);
    const Vec3 bottom = vertices[0] + u * (vertices[1] - vertices[0]);
    const Vec3 top = vertices[3] + u * (vertices[2] - vertices[3]);
    return bottom + v * (top - bottom);
  }
};

struct Luminaire {
  int id = 0;
  Vec3 position = Vec3::Zero();
  Vec3 aim = Vec3(0, 0, -1);
  std::string ldc_ref = "lambertian";  // name or file path, as written in the scene file
  DistributionCurve ldc = make_standard("lambertian", 5.0);
  double total_flux = 0.0;  // lumens at full output
  double power_full = 0.0;  // watts at full output
  int dali_short_address = 0;
  int level = 254;  // arc level 0..254
};

struct LuxmeterSpec {
  int id = 0;
  Vec3 position = Vec3::Zero();
  Vec3 facing = Vec3(0, 0, 1);
  std::string lsc_ref = "cosine";
  DistributionCurve lsc = make_standard("cosine_lsc", 5.0);
  std::optional<int> patch_id;  // designates a scene patch as the sensor surface
};

struct Occupant {
  int id = 0;
  Vec3 head_position = Vec3::Zero();
  double heading = 0.0;  // radians, CCW from +X
  int vfoa_bins = 4;
  double cone_half_angle = deg_to_rad(30.0);
  std::string lsc_ref = "cosine";
  DistributionCurve lsc = make_standard("cosine_lsc", 5.0);

  Bearing vfoa_bin() const {
    return quantize_heading(compass_from_heading(heading), vfoa_bins);
  }
  Vec3 vfoa_axis(bool use_raw_heading = false) const {
    if (use_raw_heading) return {std::cos(heading), std::sin(heading), 0.0};
    return bearing_axis(vfoa_bin());
  }
};

struct Scene {
  std::vector<Patch> patches;
  std::vector<Luminaire> luminaires;
  std::vector<LuxmeterSpec> sensors;
  std::vector<Occupant> occupants;
  std::string units = "m";

  int patch_index(int id) const {
    auto it = patch_index_.find(id);
    return it == patch_index_.end() ? -1 : it->second;
  }
  int luminaire_index(int id) const {
    for (size_t k = 0; k < luminaires.size(); ++k)
      if (luminaires[k].id == id) return static_cast<int>(k);
    return -1;
  }

  // Patches carrying a given luminaire's emission, and their total area.
  const std::vector<int>& emitter_patches(int luminaire_id) const {
    static const std::vector<int> empty;
    auto it = emitter_patches_.find(luminaire_id);
    return it == emitter_patches_.end() ? empty : it->second;
  }
  double emitter_area(int luminaire_id) const {
    double a = 0.0;
    for (int p : emitter_patches(luminaire_id)) a += patches[p].area;
    return a;
  }

  // Sensor attached to a patch, if any (index into sensors).
  int sensor_on_patch(int patch_idx) const {
    auto it = sensor_of_patch_.find(patch_idx);
    return it == sensor_of_patch_.end() ? -1 : it->second;
  }

  void finalize() {
    patch_index_.clear();
    emitter_patches_.clear();
    sensor_of_patch_.clear();
    if (patches.empty()) throw ValidationError("scene needs at least one patch");
    for (size_t k = 0; k < patches.size(); ++k) {
      Patch& p = patches[k];
      p.finalize();
      if (!(p.reflectance >= 0.0 && p.reflectance < 1.0))
        throw ValidationError("patch " + std::to_string(p.id) + ": reflectance out of range");
      if (!patch_index_.emplace(p.id, static_cast<int>(k)).second)
        throw ValidationError("duplicate id: patch " + std::to_string(p.id));
    }
    std::map<int, bool> lum_ids, dali_addrs;
    for (const Luminaire& l : luminaires) {
      if (!lum_ids.emplace(l.id, true).second)
        throw ValidationError("duplicate id: luminaire " + std::to_string(l.id));
      if (l.dali_short_address < 0 || l.dali_short_address > 63)
        throw ValidationError("luminaire " + std::to_string(l.id) + ": DALI short address out of range");
      if (!dali_addrs.emplace(l.dali_short_address, true).second)
        throw ValidationError("duplicate DALI short address " + std::to_string(l.dali_short_address));
      if (l.total_flux < 0 || l.power_full < 0)
        throw ValidationError("luminaire " + std::to_string(l.id) + ": flux and power must be >= 0");
      if (l.level < 0 || l.level > 254)
        throw ValidationError("luminaire " + std::to_string(l.id) + ": level out of range");
      if (std::abs(l.aim.norm() - 1.0) > 1e-9)
        throw ValidationError("luminaire " + std::to_string(l.id) + ": aim must be unit length");
    }
    for (size_t k = 0; k < patches.size(); ++k) {
      if (!patches[k].emitter_id) continue;
      const int lid = *patches[k].emitter_id;
      if (!lum_ids.count(lid))
        throw ValidationError("patch " + std::to_string(patches[k].id) +
                              ": emitter " + std::to_string(lid) + " does not resolve");
      emitter_patches_[lid].push_back(static_cast<int>(k));
    }
    std::map<int, bool> sensor_ids;
    for (const LuxmeterSpec& s : sensors) {
      if (!sensor_ids.emplace(s.id, true).second)
        throw ValidationError("duplicate id: sensor " + std::to_string(s.id));
      if (std::abs(s.facing.norm() - 1.0) > 1e-9)
        throw ValidationError("sensor " + std::to_string(s.id) + ": facing must be unit length");
      if (s.patch_id) {
        const int pi = patch_index(*s.patch_id);
        if (pi < 0)
          throw ValidationError("sensor " + std::to_string(s.id) + ": patch " +
                                std::to_string(*s.patch_id) + " does not resolve");
        sensor_of_patch_[pi] = static_cast<int>(&s - sensors.data());
      }
    }
    std::map<int, bool> occ_ids;
    for (const Occupant& o : occupants) {
      if (!occ_ids.emplace(o.id, true).second)
        throw ValidationError("duplicate id: occupant " + std::to_string(o.id));
      if (!(o.cone_half_angle > 0.0 && o.cone_half_angle <= kPi / 2.0))
        throw ValidationError("occupant " + std::to_string(o.id) + ": cone half-angle out of (0, 90]");
      if (o.vfoa_bins != 4 && o.vfoa_bins != 8)
        throw ValidationError("occupant " + std::to_string(o.id) + ": bins must be 4 or 8");
    }
  }

  // Geometry/photometry fingerprint; changes invalidate cached solutions.
  uint64_t fingerprint() const {
    uint64_t h = 0xcbf29ce484222325ull;
    auto add = [&h](const void* p, size_t n) { h = fnv1a(p, n, h); };
    for (const Patch& p : patches) {
      add(&p.id, sizeof p.id);
      for (const Vec3& v : p.vertices) add(v.data(), 3 * sizeof(double));
      add(&p.reflectance, sizeof p.reflectance);
      const int e = p.emitter_id.value_or(-1);
      add(&e, sizeof e);
    }
    for (const Luminaire& l : luminaires) {
      add(&l.id, sizeof l.id);
      add(l.position.data(), 3 * sizeof(double));
      add(l.aim.data(), 3 * sizeof(double));
      add(&l.total_flux, sizeof l.total_flux);
      add(&l.power_full, sizeof l.power_full);
      add(l.ldc_ref.data(), l.ldc_ref.size());
    }
    for (const LuxmeterSpec& s : sensors) {
      add(&s.id, sizeof s.id);
      add(s.lsc_ref.data(), s.lsc_ref.size());
      const int pid = s.patch_id.value_or(-1);
      add(&pid, sizeof pid);
    }
    return h;
  }

 private:
  std::map<int, int> patch_index_;
  std::map<int, std::vector<int>> emitter_patches_;
  std::map<int, int> sensor_of_patch_;
};

// ---------------------------------------------------------------------------
// Scene file I/O (JSON)
// ---------------------------------------------------------------------------

namespace detail {

inline std::string dirname(const std::string& path) {
  const auto pos = path.find_last_of('/');
  return pos == std::string::npos ? std::string(".") : path.substr(0, pos);
}

inline DistributionCurve resolve_curve(const std::string& ref, CurveKind kind,
                                       const std::string& base_dir) {
  if (ref == "isotropic")
    return kind == CurveKind::ldc ? make_standard("isotropic", 5.0)
                                  : make_standard("isotropic_lsc", 5.0);
  if (ref == "lambertian" || ref == "cosine" || ref == "cosine_lsc" || ref == "isotropic_lsc")
    return make_standard(ref, 5.0);
  const std::string path = ref.front() == '/' ? ref : base_dir + "/" + ref;
  return load_curve(path, kind);
}

inline Vec3 parse_vec3(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3)
    throw ParseError(what + ": expected [x, y, z]");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

}  // namespace detail

inline Scene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scene file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  const std::string base = detail::dirname(path);
  Scene s;
  try {
    if (j.contains("meta") && j["meta"].contains("units"))
      s.units = j["meta"]["units"].get<std::string>();
    for (const auto& pj : j.value("patches", nlohmann::json::array())) {
      Patch p;
      p.id = pj.at("id").get<int>();
      for (const auto& vj : pj.at("vertices"))
        p.vertices.push_back(detail::parse_vec3(vj, "patch vertex"));
      p.reflectance = pj.at("reflectance").get<double>();
      if (pj.contains("emitter") && !pj["emitter"].is_null())
        p.emitter_id = pj["emitter"].get<int>();
      s.patches.push_back(std::move(p));
    }
    for (const auto& lj : j.value("luminaires", nlohmann::json::array())) {
      Luminaire l;
      l.id = lj.at("id").get<int>();
      l.position = detail::parse_vec3(lj.at("position"), "luminaire position");
      l.aim = detail::parse_vec3(lj.at("aim"), "luminaire aim");
      l.ldc_ref = lj.value("ldc", std::string("lambertian"));
      l.ldc = detail::resolve_curve(l.ldc_ref, CurveKind::ldc, base);
      l.total_flux = lj.at("flux_lm").get<double>();
      l.power_full = lj.at("power_w").get<double>();
      l.dali_short_address = lj.at("dali").get<int>();
      l.level = lj.value("level", 254);
      s.luminaires.push_back(std::move(l));
    }
    for (const auto& sj : j.value("sensors", nlohmann::json::array())) {
      LuxmeterSpec m;
      m.id = sj.at("id").get<int>();
      m.position = detail::parse_vec3(sj.at("position"), "sensor position");
      m.facing = detail::parse_vec3(sj.at("facing"), "sensor facing");
      m.lsc_ref = sj.value("lsc", std::string("cosine"));
      m.lsc = detail::resolve_curve(m.lsc_ref, CurveKind::lsc, base);
      if (sj.contains("patch") && !sj["patch"].is_null())
        m.patch_id = sj["patch"].get<int>();
      s.sensors.push_back(std::move(m));
    }
    for (const auto& oj : j.value("occupants", nlohmann::json::array())) {
      Occupant o;
      o.id = oj.at("id").get<int>();
      o.head_position = detail::parse_vec3(oj.at("head"), "occupant head");
      o.heading = deg_to_rad(oj.at("heading_deg").get<double>());
      o.cone_half_angle = deg_to_rad(oj.value("cone_deg", 30.0));
      o.vfoa_bins = oj.value("bins", 4);
      o.lsc_ref = oj.value("lsc", std::string("cosine"));
      o.lsc = detail::resolve_curve(o.lsc_ref, CurveKind::lsc, base);
      s.occupants.push_back(std::move(o));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  s.finalize();
  return s;
}

inline void save_scene(const Scene& s, const std::string& path) {
  nlohmann::json j;
  j["meta"] = {{"units", s.units}};
  auto vec = [](const Vec3& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); };
  j["patches"] = nlohmann::json::array();
  for (const Patch& p : s.patches) {
    nlohmann::json pj;
    pj["id"] = p.id;
    pj["vertices"] = nlohmann::json::array();
    for (const Vec3& v : p.vertices) pj["vertices"].push_back(vec(v));
    pj["reflectance"] = p.reflectance;
    if (p.emitter_id) pj["emitter"] = *p.emitter_id;
    j["patches"].push_back(std::move(pj));
  }
  j["luminaires"] = nlohmann::json::array();
  for (const Luminaire& l : s.luminaires) {
    nlohmann::json lj;
    lj["id"] = l.id;
    lj["position"] = vec(l.position);
    lj["aim"] = vec(l.aim);
    lj["ldc"] = l.ldc_ref;
    lj["flux_lm"] = l.total_flux;
    lj["power_w"] = l.power_full;
    lj["dali"] = l.dali_short_address;
    if (l.level != 254) lj["level"] = l.level;
    j["luminaires"].push_back(std::move(lj));
  }
  j["sensors"] = nlohmann::json::array();
  for (const LuxmeterSpec& m : s.sensors) {
    nlohmann::json sj;
    sj["id"] = m.id;
    sj["position"] = vec(m.position);
    sj["facing"] = vec(m.facing);
    sj["lsc"] = m.lsc_ref;
    if (m.patch_id) sj["patch"] = *m.patch_id;
    j["sensors"].push_back(std::move(sj));
  }
  j["occupants"] = nlohmann::json::array();
  for (const Occupant& o : s.occupants) {
    nlohmann::json oj;
    oj["id"] = o.id;
    oj["head"] = vec(o.head_position);
    oj["heading_deg"] = rad_to_deg(o.heading);
    oj["cone_deg"] = rad_to_deg(o.cone_half_angle);
    if (o.vfoa_bins != 4) oj["bins"] = o.vfoa_bins;
    if (o.lsc_ref != "cosine") oj["lsc"] = o.lsc_ref;
    j["occupants"].push_back(std::move(oj));
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write scene file: " + path);
  out << j.dump(1) << "\n";
}

}  // namespace lux
