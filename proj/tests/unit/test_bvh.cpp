// Copyright 2026 luxsim contributors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include "lux/bvh.hpp"
#include "support/builders.hpp"
#include "support/oracles.hpp"

using lux::Vec3;
using lux::VisibilityIndex;
using testing_support::make_quad;

TEST_CASE("empty scene blocks nothing") {
  VisibilityIndex index;
  CHECK(lux::visibility(Vec3(0, 0, 0), Vec3(1, 1, 1), index));
}

TEST_CASE("a panel bisecting the segment blocks it") {
  std::vector<lux::Patch> patches;
  patches.push_back(make_quad(1, {0, 0, 0.5}, 1.0, 1.0, {1, 0, 0}, {0, 1, 0}));
  VisibilityIndex index(patches);
  CHECK_FALSE(lux::visibility(Vec3(0, 0, 0), Vec3(0, 0, 1), index));
  CHECK(lux::visibility(Vec3(2, 2, 0), Vec3(2, 2, 1), index));  // beside the panel
  // excluding the panel opens the segment
  CHECK(lux::visibility(Vec3(0, 0, 0), Vec3(0, 0, 1), index, {1}));
}

TEST_CASE("coincident endpoints are rejected") {
  VisibilityIndex index;
  CHECK_THROWS_AS(lux::visibility(Vec3(1, 2, 3), Vec3(1, 2, 3), index), lux::ValidationError);
}

TEST_CASE("intersection distance is exact for a known hit") {
  std::vector<lux::Patch> patches;
  patches.push_back(make_quad(9, {0, 0, 3.0}, 0.5, 0.5, {1, 0, 0}, {0, 1, 0}));
  VisibilityIndex index(patches);
  auto hit = index.first_hit(Vec3(0.1, -0.2, 0), Vec3(0, 0, 1));
  REQUIRE(hit);
  CHECK(hit->patch_id == 9);
  CHECK(hit->t == Catch::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("first_hit returns the nearest of stacked patches") {
  std::vector<lux::Patch> patches;
  patches.push_back(make_quad(1, {0, 0, 4.0}, 1, 1, {1, 0, 0}, {0, 1, 0}));
  patches.push_back(make_quad(2, {0, 0, 2.0}, 1, 1, {1, 0, 0}, {0, 1, 0}));
  patches.push_back(make_quad(3, {0, 0, 6.0}, 1, 1, {1, 0, 0}, {0, 1, 0}));
  VisibilityIndex index(patches);
  auto hit = index.first_hit(Vec3(0, 0, 0), Vec3(0, 0, 1));
  REQUIRE(hit);
  CHECK(hit->patch_id == 2);
  auto hit2 = index.first_hit(Vec3(0, 0, 0), Vec3(0, 0, 1), 100.0, 2);
  REQUIRE(hit2);
  CHECK(hit2->patch_id == 1);
}

TEST_CASE("triangle patches intersect exactly") {
  lux::Patch tri;
  tri.id = 4;
  tri.vertices = {Vec3(0, 0, 1), Vec3(2, 0, 1), Vec3(0, 2, 1)};
  tri.reflectance = 0.1;
  tri.finalize();
  VisibilityIndex index(std::vector<lux::Patch>{tri});
  CHECK(index.first_hit(Vec3(0.5, 0.5, 0), Vec3(0, 0, 1)).has_value());
  CHECK_FALSE(index.first_hit(Vec3(1.5, 1.5, 0), Vec3(0, 0, 1)).has_value());
}

TEST_CASE("BVH agrees with brute force on 10k random segments in room4") {
  lux::Scene scene = lux::load_scene(std::string(LUX_FIXTURE_DIR) + "/room4.scene");
  VisibilityIndex index(scene);
  lux::Rng rng(2026);
  Vec3 lo = Vec3::Constant(1e18), hi = -lo;
  for (const auto& p : scene.patches)
    for (const auto& v : p.vertices) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
  int disagreements = 0;
  for (int k = 0; k < 10000; ++k) {
    auto rand_point = [&]() {
      return Vec3(lo.x() + rng.next_double() * (hi.x() - lo.x()),
                  lo.y() + rng.next_double() * (hi.y() - lo.y()),
                  lo.z() + rng.next_double() * (hi.z() - lo.z()));
    };
    const Vec3 p = rand_point(), q = rand_point();
    if ((p - q).norm() < 1e-9) continue;
    const bool fast = lux::visibility(p, q, index);
    const bool slow = oracle::brute_force_visible(p, q, scene.patches, {});
    if (fast != slow) ++disagreements;
  }
  CHECK(disagreements == 0);
}
