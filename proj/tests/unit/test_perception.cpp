// Copyright 2026 luxsim contributors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include "lux/perception.hpp"
#include "support/builders.hpp"
#include "support/oracles.hpp"

using lux::AcceptanceRegion;
using lux::Receiver;
using lux::Rng;
using lux::Scene;
using lux::Solution;
using lux::Vec3;
using lux::VisibilityIndex;
using lux::deg_to_rad;
using testing_support::make_quad;

namespace {

Solution exitance_only(const Scene& scene, double value) {
  Solution sol;
  sol.exitance = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(scene.patches.size()), value);
  sol.irradiance = Eigen::VectorXd::Zero(sol.exitance.size());
  return sol;
}

}  // namespace

TEST_CASE("a receiver facing empty space reads zero") {
  Scene scene = testing_support::scene_of(
      {make_quad(1, {0, 0, -5}, 1, 1, {1, 0, 0}, {0, 1, 0})});  // behind the receiver
  VisibilityIndex index(scene);
  Receiver r;
  r.id = 1;
  r.position = Vec3(0, 0, 0);
  r.axis = Vec3(0, 0, 1);
  CHECK(lux::virtual_luxmeter(scene, exitance_only(scene, 300.0), index, r, 512, 1) == 0.0);
}

TEST_CASE("uniform ceiling with cosine response reads the exitance") {
  // 400 x 400 m plane 1 m overhead approximates the infinite ceiling
  Scene scene = testing_support::scene_of(
      {make_quad(1, {0, 0, 1}, 200, 200, {-1, 0, 0}, {0, 1, 0})});
  VisibilityIndex index(scene);
  const double b = 700.0;
  Receiver r;
  r.id = 2;
  r.position = Vec3(0, 0, 0);
  r.axis = Vec3(0, 0, 1);
  const double reading = lux::virtual_luxmeter(scene, exitance_only(scene, b), index, r, 2048, 5);
  CHECK(reading == Catch::Approx(b).epsilon(2e-3));
}

TEST_CASE("narrow acceptance curves approach the on-axis patch solid angle") {
  Scene scene = testing_support::scene_of(
      {make_quad(1, {0, 0, 1}, 50, 50, {-1, 0, 0}, {0, 1, 0})});
  VisibilityIndex index(scene);
  const double b = 450.0;
  Solution sol = exitance_only(scene, b);
  for (double eps_deg : {30.0, 20.0, 10.0}) {
    lux::DistributionCurve narrow(lux::CurveKind::lsc,
                                  {0.0, eps_deg, eps_deg + 0.1, 180.0}, {1.0, 1.0, 0.0, 0.0});
    Receiver r;
    r.id = 3;
    r.position = Vec3(0, 0, 0);
    r.axis = Vec3(0, 0, 1);
    r.lsc = narrow;
    const double reading = lux::virtual_luxmeter(scene, sol, index, r, 60000, 9);
    const double expected =
        (b / lux::kPi) * 2.0 * lux::kPi *
        oracle::simpson([&](double t) { return narrow.eval(t) * std::sin(t); }, 0.0,
                        lux::kPi / 2.0);
    CHECK(reading == Catch::Approx(expected).epsilon(0.08));
  }
}

TEST_CASE("hemispheric occupants match the raw luxmeter at the same pose") {
  Scene scene = testing_support::closed_cube();
  VisibilityIndex index(scene);
  Solution sol = exitance_only(scene, 120.0);
  lux::Occupant o;
  o.id = 7;
  o.head_position = Vec3(0.5, 0.5, 0.5);
  o.heading = deg_to_rad(90.0);  // facing +Y (north bin center)
  o.cone_half_angle = lux::kPi / 2.0;
  Receiver r;
  r.id = 7;  // same id: same ray stream
  r.position = o.head_position;
  r.axis = Vec3(0, 1, 0);
  r.acceptance = AcceptanceRegion::cone;
  r.cone_half_angle = lux::kPi / 2.0;
  const double via_occupant = lux::occupant_perceived_lux(scene, sol, index, o, 1024, 3);
  const double via_luxmeter = lux::virtual_luxmeter(scene, sol, index, r, 1024, 3);
  CHECK(via_occupant == Catch::Approx(via_luxmeter).margin(1e-12));
}

TEST_CASE("an occupant staring at a dark wall reads zero") {
  Scene scene = testing_support::closed_cube();
  VisibilityIndex index(scene);
  Solution sol;
  sol.exitance = Eigen::VectorXd::Zero(6);
  sol.irradiance = Eigen::VectorXd::Zero(6);
  lux::Occupant o;
  o.id = 1;
  o.head_position = Vec3(0.5, 0.5, 0.5);
  o.heading = 0.0;
  CHECK(lux::occupant_perceived_lux(scene, sol, index, o, 512, 1) == 0.0);
}

TEST_CASE("readings scale linearly with the solved field") {
  Scene scene = testing_support::closed_cube();
  VisibilityIndex index(scene);
  Rng rng(13);
  Solution sol;
  sol.exitance.resize(6);
  for (int k = 0; k < 6; ++k) sol.exitance(k) = 100.0 * rng.next_double();
  sol.irradiance = Eigen::VectorXd::Zero(6);
  Receiver r;
  r.id = 4;
  r.position = Vec3(0.4, 0.6, 0.5);
  r.axis = Vec3(0, 0, 1);
  const double base = lux::virtual_luxmeter(scene, sol, index, r, 512, 21);
  Solution scaled = sol;
  scaled.exitance *= 2.5;
  const double big = lux::virtual_luxmeter(scene, scaled, index, r, 512, 21);
  CHECK(big == Catch::Approx(2.5 * base).epsilon(1e-12));
}

TEST_CASE("widening the cone never lowers the reading") {
  Scene scene = testing_support::closed_cube();
  VisibilityIndex index(scene);
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    Solution sol;
    sol.exitance.resize(6);
    for (int k = 0; k < 6; ++k) sol.exitance(k) = 200.0 * rng.next_double();
    sol.irradiance = Eigen::VectorXd::Zero(6);
    Receiver r;
    r.id = static_cast<int>(trial);
    r.position = Vec3(0.2 + 0.6 * rng.next_double(), 0.2 + 0.6 * rng.next_double(),
                      0.2 + 0.6 * rng.next_double());
    const double az = 2 * lux::kPi * rng.next_double();
    const double el = lux::kPi * (rng.next_double() - 0.5);
    r.axis = Vec3(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el));
    r.acceptance = AcceptanceRegion::cone;
    double previous = 0.0;
    for (double half_deg : {10.0, 25.0, 45.0, 70.0, 90.0}) {
      r.cone_half_angle = deg_to_rad(half_deg);
      const double reading = lux::virtual_luxmeter(scene, sol, index, r, 256, 77);
      CHECK(reading >= previous - 1e-12);
      previous = reading;
    }
  }
}

namespace {

Scene occupant_and_luminaire(const Vec3& lum_center, double half, std::vector<lux::Patch> extra = {}) {
  std::vector<lux::Patch> patches;
  // luminaire panel facing back toward the origin along -X
  patches.push_back(make_quad(10, lum_center, half, half, {0, 0, 1}, {0, 1, 0}, 0.0));
  for (auto& p : extra) patches.push_back(std::move(p));
  Scene s = testing_support::scene_of(std::move(patches));
  s.patches[0].emitter_id = 1;
  lux::Luminaire l;
  l.id = 1;
  l.position = lum_center;
  l.aim = Vec3(-1, 0, 0);
  l.total_flux = 1000;
  l.power_full = 50;
  l.dali_short_address = 0;
  s.luminaires.push_back(l);
  lux::Occupant o;
  o.id = 1;
  o.head_position = Vec3(0, 0, 0);
  o.heading = 0.0;  // facing +X (east bin center)
  o.cone_half_angle = deg_to_rad(30.0);
  s.occupants.push_back(o);
  s.finalize();
  return s;
}

}  // namespace

TEST_CASE("luminaire classification: visible, hidden, partial") {
  SECTION("clear on-axis panel is visible") {
    Scene s = occupant_and_luminaire({3, 0, 0}, 0.5);
    VisibilityIndex index(s);
    CHECK(lux::luminaire_in_vfoa(s, s.occupants[0], s.luminaires[0], index) ==
          lux::VfoaVisibility::visible);
  }
  SECTION("panel behind the occupant is hidden") {
    Scene s = occupant_and_luminaire({-3, 0, 0}, 0.5);
    VisibilityIndex index(s);
    CHECK(lux::luminaire_in_vfoa(s, s.occupants[0], s.luminaires[0], index) ==
          lux::VfoaVisibility::hidden);
  }
  SECTION("half-occluding panel yields partial") {
    // wall covering z > 0 midway to the panel: cuts off the upper half of the
    // 4x4 sample grid exactly
    auto blocker = make_quad(20, {1.5, 0, 0.3}, 0.6, 0.3, {0, 1, 0}, {0, 0, 1}, 0.5);
    Scene s = occupant_and_luminaire({3, 0, 0}, 0.5, {blocker});
    VisibilityIndex index(s);
    CHECK(lux::luminaire_in_vfoa(s, s.occupants[0], s.luminaires[0], index) ==
          lux::VfoaVisibility::partial);
  }
  SECTION("cone boundary splits the panel") {
    // panel straddles the 30-degree cone edge: some grid points inside, some out
    Scene s = occupant_and_luminaire({3, 1.73, 0}, 0.5);
    VisibilityIndex index(s);
    CHECK(lux::luminaire_in_vfoa(s, s.occupants[0], s.luminaires[0], index) ==
          lux::VfoaVisibility::partial);
  }
}

TEST_CASE("classification is invariant under floor-plane rigid motion") {
  Rng rng(55);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec3 center(3, 0.8 * (rng.next_double() - 0.5), 0.4 * (rng.next_double() - 0.5));
    Scene s = occupant_and_luminaire(center, 0.5);
    VisibilityIndex index(s);
    const auto base =
        lux::luminaire_in_vfoa(s, s.occupants[0], s.luminaires[0], index, true);

    const double angle = 2 * lux::kPi * rng.next_double();
    const Vec3 shift(10 * rng.next_double(), -5 * rng.next_double(), 2 * rng.next_double());
    const auto xform = lux::RigidTransform::axis_angle(Vec3(0, 0, 1), angle, shift);
    Scene moved = s;
    for (auto& p : moved.patches) {
      for (auto& v : p.vertices) v = xform.apply(v);
    }
    moved.finalize();
    moved.luminaires[0].position = xform.apply(moved.luminaires[0].position);
    moved.luminaires[0].aim = xform.apply_dir(moved.luminaires[0].aim);
    moved.occupants[0].head_position = xform.apply(moved.occupants[0].head_position);
    moved.occupants[0].heading += angle;
    VisibilityIndex moved_index(moved);
    const auto after =
        lux::luminaire_in_vfoa(moved, moved.occupants[0], moved.luminaires[0], moved_index, true);
    CHECK(after == base);
  }
}

TEST_CASE("receiver batch CSV round-trips") {
  Scene scene = testing_support::closed_cube();
  VisibilityIndex index(scene);
  Solution sol = exitance_only(scene, 100.0);
  {
    std::ofstream out("/tmp/receivers_t.csv");
    out << "id,x,y,z,ax,ay,az,type\n";
    out << "1,0.5,0.5,0.5,0,0,1,hemisphere\n";
    out << "2,0.5,0.5,0.5,0,0,1,cone:30\n";
  }
  auto receivers = lux::load_receivers_csv("/tmp/receivers_t.csv");
  REQUIRE(receivers.size() == 2);
  CHECK(receivers[1].acceptance == AcceptanceRegion::cone);
  CHECK(receivers[1].cone_half_angle == Catch::Approx(deg_to_rad(30)));
  lux::evaluate_receivers_csv(scene, sol, index, receivers, 256, 1, "/tmp/receivers_out.csv");
  std::ifstream in("/tmp/receivers_out.csv");
  std::string header, line1, line2;
  std::getline(in, header);
  std::getline(in, line1);
  std::getline(in, line2);
  CHECK(header == "id,lux");
  CHECK(line1.rfind("1,", 0) == 0);
  CHECK(line2.rfind("2,", 0) == 0);
  std::remove("/tmp/receivers_t.csv");
  std::remove("/tmp/receivers_out.csv");
}
