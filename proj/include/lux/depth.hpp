// Copyright 2026 luxsim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lux/scene.hpp"

namespace lux {

// Depth map in meters (0 = invalid) with pinhole intrinsics. Camera frame:
// +Z forward along the view axis, +X right, +Y down (image convention).
struct DepthImage {
  int width = 0;
  int height = 0;
  std::vector<double> depth;  // row-major, meters
  double fx = 0, fy = 0, cx = 0, cy = 0;

  double at(int x, int y) const { return depth[static_cast<size_t>(y) * width + x]; }
  double& at(int x, int y) { return depth[static_cast<size_t>(y) * width + x]; }

  void validate() const {
    if (width <= 0 || height <= 0 || depth.size() != static_cast<size_t>(width) * height)
      throw ValidationError("depth image dimensions inconsistent");
    if (!(fx > 0.0 && fy > 0.0)) throw ValidationError("focal lengths must be > 0");
    for (double d : depth)
      if (!std::isfinite(d) || d < 0.0)
        throw ValidationError("depth values must be finite and >= 0");
  }

  Vec3 backproject(double px, double py, double z) const {
    return Vec3((px - cx) / fx * z, (py - cy) / fy * z, z);
  }
};

// 16-bit PGM, one level = 1 mm, plus a JSON sidecar {fx, fy, cx, cy}.
inline DepthImage load_depth_pgm(const std::string& pgm_path, const std::string& intrinsics_path) {
  std::ifstream in(pgm_path, std::ios::binary);
  if (!in) throw IoError("cannot open depth image: " + pgm_path);
  std::string magic;
  in >> magic;
  if (magic != "P5") throw ParseError(pgm_path + ": expected binary PGM (P5)");
  auto next_int = [&in, &pgm_path]() {
    // skip whitespace and comments
    int c;
    while ((c = in.peek()) != EOF && (std::isspace(c) || c == '#')) {
      if (c == '#') in.ignore(1 << 16, '\n');
      else in.get();
    }
    long v;
    if (!(in >> v)) throw ParseError(pgm_path + ": truncated header");
    return v;
  };
  DepthImage img;
  img.width = static_cast<int>(next_int());
  img.height = static_cast<int>(next_int());
  const long maxval = next_int();
  if (maxval != 65535) throw ParseError(pgm_path + ": expected 16-bit PGM (maxval 65535)");
  in.get();  // single whitespace after maxval
  img.depth.resize(static_cast<size_t>(img.width) * img.height);
  std::vector<unsigned char> raw(img.depth.size() * 2);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<size_t>(in.gcount()) != raw.size())
    throw ParseError(pgm_path + ": truncated pixel data");
  for (size_t k = 0; k < img.depth.size(); ++k) {
    const unsigned mm = (static_cast<unsigned>(raw[2 * k]) << 8) | raw[2 * k + 1];
    img.depth[k] = mm / 1000.0;
  }

  std::ifstream intr(intrinsics_path);
  if (!intr) throw IoError("cannot open intrinsics file: " + intrinsics_path);
  nlohmann::json j;
  try {
    intr >> j;
    img.fx = j.at("fx").get<double>();
    img.fy = j.at("fy").get<double>();
    img.cx = j.at("cx").get<double>();
    img.cy = j.at("cy").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(intrinsics_path + ": " + e.what());
  }
  img.validate();
  return img;
}

inline void save_depth_pgm(const DepthImage& img, const std::string& pgm_path,
                           const std::string& intrinsics_path) {
  std::ofstream out(pgm_path, std::ios::binary);
  if (!out) throw IoError("cannot write depth image: " + pgm_path);
  out << "P5\n" << img.width << " " << img.height << "\n65535\n";
  for (double d : img.depth) {
    const unsigned mm = static_cast<unsigned>(
        std::clamp(std::llround(d * 1000.0), 0ll, 65535ll));
    out.put(static_cast<char>(mm >> 8));
    out.put(static_cast<char>(mm & 0xff));
  }
  nlohmann::json j = {{"fx", img.fx}, {"fy", img.fy}, {"cx", img.cx}, {"cy", img.cy}};
  std::ofstream intr(intrinsics_path);
  if (!intr) throw IoError("cannot write intrinsics file: " + intrinsics_path);
  intr << j.dump(1) << "\n";
}

// Median pass over valid neighbors, then a joint spatial/range bilateral
// pass. Invalid (0) pixels never enter a filter support and stay 0.
inline DepthImage denoise_depth(const DepthImage& img, int median_window,
                                double sigma_spatial_px, double sigma_range_m) {
  if (median_window < 1 || median_window % 2 == 0)
    throw ValidationError("median window must be odd and >= 1");
  img.validate();
  const int r = median_window / 2;

  DepthImage med = img;
  std::vector<double> vals;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      if (img.at(x, y) == 0.0) continue;
      vals.clear();
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= img.width || ny >= img.height) continue;
          const double d = img.at(nx, ny);
          if (d > 0.0) vals.push_back(d);
        }
      std::nth_element(vals.begin(), vals.begin() + vals.size() / 2, vals.end());
      med.at(x, y) = vals[vals.size() / 2];
    }
  }

  const int br = std::max(1, static_cast<int>(std::ceil(2.0 * sigma_spatial_px)));
  DepthImage out = med;
  for (int y = 0; y < med.height; ++y) {
    for (int x = 0; x < med.width; ++x) {
      const double center = med.at(x, y);
      if (center == 0.0) continue;
      double wsum = 0.0, dsum = 0.0;
      for (int dy = -br; dy <= br; ++dy)
        for (int dx = -br; dx <= br; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= med.width || ny >= med.height) continue;
          const double d = med.at(nx, ny);
          if (d == 0.0) continue;
          const double ws = std::exp(-(dx * dx + dy * dy) /
                                     (2.0 * sigma_spatial_px * sigma_spatial_px));
          const double dr = d - center;
          const double wr = std::exp(-(dr * dr) / (2.0 * sigma_range_m * sigma_range_m));
          wsum += ws * wr;
          dsum += ws * wr * d;
        }
      out.at(x, y) = dsum / wsum;
    }
  }
  return out;
}

struct DepthMeshResult {
  std::vector<Patch> patches;
  bool empty_warning = false;  // no block had complete valid depth
};

// One quad per cell x cell pixel block with fully valid depth; blocks touching
// any invalid pixel are skipped so holes stay holes. Quads that back-project
// non-planar split into two triangles to keep the patch invariants. Normals
// are flipped toward the camera.
inline DepthMeshResult depth_to_patches(const DepthImage& img, const RigidTransform& camera_pose,
                                        int cell, double default_reflectance = 0.5) {
  if (cell < 1) throw ValidationError("cell size must be >= 1");
  img.validate();
  DepthMeshResult result;
  int next_id = 1;
  const Vec3 cam_center = camera_pose.apply(Vec3::Zero());
  for (int by = 0; by + cell < img.height; by += cell) {
    for (int bx = 0; bx + cell < img.width; bx += cell) {
      bool valid = true;
      for (int y = by; y <= by + cell && valid; ++y)
        for (int x = bx; x <= bx + cell; ++x)
          if (img.at(x, y) == 0.0) {
            valid = false;
            break;
          }
      if (!valid) continue;
      auto corner = [&](int px, int py) {
        return camera_pose.apply(img.backproject(px, py, img.at(px, py)));
      };
      // CCW seen from the camera (camera looks along +Z, image +Y down)
      Vec3 c00 = corner(bx, by);
      Vec3 c10 = corner(bx + cell, by);
      Vec3 c11 = corner(bx + cell, by + cell);
      Vec3 c01 = corner(bx, by + cell);

      auto emit = [&](std::vector<Vec3> verts) {
        Patch p;
        p.id = next_id++;
        p.vertices = std::move(verts);
        p.reflectance = default_reflectance;
        p.finalize();
        if (p.normal.dot(cam_center - p.centroid) < 0.0) {
          std::reverse(p.vertices.begin(), p.vertices.end());
          p.finalize();
        }
        result.patches.push_back(std::move(p));
      };

      const Vec3 n = (c10 - c00).cross(c01 - c00);
      const double nlen = n.norm();
      const bool planar =
          nlen > 1e-15 && std::abs(n.normalized().dot(c11 - c00)) <= kCoplanarTolerance;
      if (planar) {
        emit({c00, c10, c11, c01});
      } else {
        emit({c00, c10, c11});
        emit({c00, c11, c01});
      }
    }
  }
  result.empty_warning = result.patches.empty();
  return result;
}

}  // namespace lux
