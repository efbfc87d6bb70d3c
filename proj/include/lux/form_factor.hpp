// Copyright 2026 luxsim contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cstring>
#include <fstream>
#include <optional>
#include <thread>
#include <vector>

#include "lux/bvh.hpp"
#include "lux/scene.hpp"

namespace lux {

enum class WeightMode { plain, ldc, lsc, ldc_lsc };

inline const char* to_string(WeightMode m) {
  switch (m) {
    case WeightMode::plain: return "plain";
    case WeightMode::ldc: return "ldc";
    case WeightMode::lsc: return "lsc";
    case WeightMode::ldc_lsc: return "ldc+lsc";
  }
  return "?";
}

inline WeightMode parse_weight_mode(const std::string& s) {
  if (s == "plain") return WeightMode::plain;
  if (s == "ldc" || s == "no_lsc") return WeightMode::ldc;
  if (s == "lsc" || s == "no_ldc") return WeightMode::lsc;
  if (s == "ldc+lsc" || s == "ldc_lsc" || s == "full") return WeightMode::ldc_lsc;
  throw ValidationError("unknown weighting mode: " + s);
}

inline bool has_ldc(WeightMode m) { return m == WeightMode::ldc || m == WeightMode::ldc_lsc; }
inline bool has_lsc(WeightMode m) { return m == WeightMode::lsc || m == WeightMode::ldc_lsc; }

// Offset for shadow-ray origins along the surface normal.
constexpr double kShadowEpsilon = 1e-6;

struct PairEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

namespace detail {

// Stratified sample coordinates: jittered sqrt(n) x sqrt(n) grid. The second
// patch uses an independently jittered grid in shuffled traversal order so the
// pairing does not correlate strata.
struct PairSampler {
  explicit PairSampler(int samples, uint64_t seed) : rng(seed), n(samples) {
    g = 1;
    while (g * g < n) ++g;
    perm.resize(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) perm[static_cast<size_t>(k)] = k;
    for (int k = n - 1; k > 0; --k)
      std::swap(perm[static_cast<size_t>(k)], perm[rng.next_below(static_cast<uint64_t>(k + 1))]);
  }

  void coords(int k, double& u1, double& v1, double& u2, double& v2) {
    const int c1 = k % (g * g);
    u1 = (c1 % g + rng.next_double()) / g;
    v1 = (c1 / g + rng.next_double()) / g;
    const int c2 = perm[static_cast<size_t>(k)] % (g * g);
    u2 = (c2 % g + rng.next_double()) / g;
    v2 = (c2 / g + rng.next_double()) / g;
  }

  Rng rng;
  int n;
  int g;
  std::vector<int> perm;
};

inline double angle_between(const Vec3& unit_axis, const Vec3& unit_dir) {
  return std::acos(std::clamp(unit_axis.dot(unit_dir), -1.0, 1.0));
}

// Solid angle of the spherical triangle (A, B, C), unit vectors from the
// viewpoint (Van Oosterom & Strackee).
inline double spherical_triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double det = a.dot(b.cross(c));
  const double denom = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
  return std::abs(2.0 * std::atan2(det, denom));
}

// Arvo's stratified sampling of a spherical triangle with known area.
inline Vec3 sample_spherical_triangle(const Vec3& a, const Vec3& b, const Vec3& c,
                                      double area, double u1, double u2) {
  auto tangent = [](const Vec3& at, const Vec3& toward) -> Vec3 {
    const Vec3 t = toward - at.dot(toward) * at;
    const double len = t.norm();
    return len > 1e-15 ? Vec3(t / len) : Vec3(at.unitOrthogonal());
  };
  const Vec3 t_ab = tangent(a, b);
  const Vec3 t_ac = tangent(a, c);
  const double alpha = std::acos(std::clamp(t_ab.dot(t_ac), -1.0, 1.0));
  const double cos_c = std::clamp(a.dot(b), -1.0, 1.0);  // arc AB

  const double area_hat = u1 * area;
  const double s = std::sin(area_hat - alpha);
  const double t = std::cos(area_hat - alpha);
  const double u = t - std::cos(alpha);
  const double v = s + std::sin(alpha) * cos_c;
  const double denom = (v * s + u * t) * std::sin(alpha);
  double q = std::abs(denom) > 1e-15 ? ((v * t - u * s) * std::cos(alpha) - v) / denom : 1.0;
  q = std::clamp(q, -1.0, 1.0);
  const Vec3 c_hat = q * a + std::sqrt(std::max(0.0, 1.0 - q * q)) * tangent(a, c);
  const double z = 1.0 - u2 * (1.0 - std::clamp(c_hat.dot(b), -1.0, 1.0));
  return (z * b + std::sqrt(std::max(0.0, 1.0 - z * z)) * tangent(b, c_hat)).normalized();
}

}  // namespace detail

// Monte Carlo estimate of the (optionally curve-weighted) form factor from
// patch `i` to patch `j`: area-sampled radiosity kernel
// cos(theta_i) cos(theta_j) / (pi r^2) with ray-cast visibility. When curves
// are supplied the kernel is multiplied by LDC(theta from i's axis) and
// LSC(theta from j's normal). Deterministic for a fixed seed.
inline PairEstimate form_factor_pair(const Patch& i, const Patch& j, int samples,
                                     uint64_t seed, const VisibilityIndex* index = nullptr,
                                     const DistributionCurve* source_ldc = nullptr,
                                     const Vec3* source_axis = nullptr,
                                     const DistributionCurve* target_lsc = nullptr) {
  if (samples < 1) throw ValidationError("samples must be >= 1");
  if (i.id == j.id) return {0.0, 0.0};
  detail::PairSampler sampler(samples, pair_seed(seed, static_cast<uint64_t>(i.id),
                                                 static_cast<uint64_t>(j.id)));
  const Vec3 axis = source_axis ? *source_axis : i.normal;
  double sum = 0.0, sum_sq = 0.0;
  for (int k = 0; k < samples; ++k) {
    double u1, v1, u2, v2;
    sampler.coords(k, u1, v1, u2, v2);
    const Vec3 x = i.point_at(u1, v1);
    const Vec3 y = j.point_at(u2, v2);
    const Vec3 diff = y - x;
    const double r2 = diff.squaredNorm();
    if (r2 < 1e-18) continue;
    const Vec3 dir = diff / std::sqrt(r2);
    const double cos_i = i.normal.dot(dir);
    const double cos_j = -j.normal.dot(dir);
    if (cos_i <= 0.0 || cos_j <= 0.0) continue;
    double w = cos_i * cos_j / (kPi * r2);
    if (source_ldc) w *= source_ldc->eval(detail::angle_between(axis, dir));
    if (target_lsc) w *= target_lsc->eval(std::acos(std::clamp(cos_j, -1.0, 1.0)));
    if (w == 0.0) continue;
    if (index && index->segment_occluded(x + i.normal * kShadowEpsilon,
                                         y + j.normal * kShadowEpsilon, i.id, j.id))
      continue;
    sum += w;
    sum_sq += w * w;
  }
  const double mean = sum / samples;
  PairEstimate est;
  est.value = j.area * mean;
  if (samples > 1) {
    const double var = std::max(0.0, (sum_sq - sum * sum / samples) / (samples - 1));
    est.std_error = j.area * std::sqrt(var / samples);
  }
  return est;
}

// Dense coupling operator. values(r, c) scales patch c's exitance into the
// irradiance gathered at patch r, so H = values * B; for unweighted kernels
// this equals the classic form factor from r to c. Weighted modes fold the
// emitter LDC in at the source side of each transfer and the sensor LSC in at
// the receiving side.
struct FormFactorMatrix {
  int n = 0;
  WeightMode mode = WeightMode::plain;
  Eigen::MatrixXd values;
  Eigen::MatrixXd std_error;
};

// Transport operator plus, for LSC modes, the sensing operator used to read
// out sensor-patch irradiance. Both come from one sampling pass.
struct TransportSystem {
  FormFactorMatrix transport;  // plain or ldc
  std::optional<FormFactorMatrix> sensing;

  const FormFactorMatrix& reading_matrix() const {
    return sensing ? *sensing : transport;
  }
};

inline TransportSystem assemble_system(const Scene& scene, int samples, uint64_t seed,
                                       WeightMode mode, int threads = 1) {
  const int n = static_cast<int>(scene.patches.size());
  if (n < 2) throw ValidationError("assemble needs at least 2 patches");
  if (samples < 1) throw ValidationError("samples must be >= 1");
  VisibilityIndex index(scene);

  // per-patch photometric roles
  std::vector<const DistributionCurve*> ldc_of(static_cast<size_t>(n), nullptr);
  std::vector<const Vec3*> aim_of(static_cast<size_t>(n), nullptr);
  std::vector<const DistributionCurve*> lsc_of(static_cast<size_t>(n), nullptr);
  if (has_ldc(mode)) {
    for (const Luminaire& l : scene.luminaires)
      for (int p : scene.emitter_patches(l.id)) {
        ldc_of[static_cast<size_t>(p)] = &l.ldc;
        aim_of[static_cast<size_t>(p)] = &l.aim;
      }
  }
  if (has_lsc(mode)) {
    for (int p = 0; p < n; ++p) {
      const int s = scene.sensor_on_patch(p);
      if (s >= 0) lsc_of[static_cast<size_t>(p)] = &scene.sensors[static_cast<size_t>(s)].lsc;
    }
  }

  TransportSystem sys;
  sys.transport.n = n;
  sys.transport.mode = has_ldc(mode) ? WeightMode::ldc : WeightMode::plain;
  sys.transport.values = Eigen::MatrixXd::Zero(n, n);
  sys.transport.std_error = Eigen::MatrixXd::Zero(n, n);
  if (has_lsc(mode)) {
    sys.sensing = FormFactorMatrix{n, mode, Eigen::MatrixXd::Zero(n, n),
                                   Eigen::MatrixXd::Zero(n, n)};
  }

  // Patches that touch (shared edges, wall/floor junctions) put a 1/r^2
  // singularity inside the area-sampled domain, which wrecks the variance
  // estimate. Those pairs switch to solid-angle sampling of the exchange
  // integral, whose integrand is bounded. The rule is a pure function of
  // geometry, so determinism is unaffected.
  std::vector<double> bound_radius(static_cast<size_t>(n), 0.0);
  for (int k = 0; k < n; ++k) {
    const Patch& p = scene.patches[static_cast<size_t>(k)];
    for (const Vec3& v : p.vertices)
      bound_radius[static_cast<size_t>(k)] =
          std::max(bound_radius[static_cast<size_t>(k)], (v - p.centroid).norm());
  }
  auto touching = [&](int a, int b) {
    const Patch& pa = scene.patches[static_cast<size_t>(a)];
    const Patch& pb = scene.patches[static_cast<size_t>(b)];
    const double reach = bound_radius[static_cast<size_t>(a)] +
                         bound_radius[static_cast<size_t>(b)] + 1e-6;
    if ((pa.centroid - pb.centroid).squaredNorm() > reach * reach) return false;
    for (const Vec3& va : pa.vertices)
      for (const Vec3& vb : pb.vertices)
        if ((va - vb).squaredNorm() < 1e-12) return true;
    return false;
  };

  struct Acc {
    double sum = 0.0, sum_sq = 0.0;
    void add(double w) {
      sum += w;
      sum_sq += w * w;
    }
  };

  // weight products for the entry gathered at `r` from `c`; dir_rc points
  // from the point on r toward the point on c
  auto direction_weights = [&](int r, int c, const Vec3& dir_rc, double cos_r, double& w_t,
                               double& w_s) {
    w_t = 1.0;
    const auto* ldc_c = ldc_of[static_cast<size_t>(c)];
    if (ldc_c)  // light leaving c toward r
      w_t = ldc_c->eval(detail::angle_between(*aim_of[static_cast<size_t>(c)], -dir_rc));
    w_s = w_t;
    const auto* lsc_r = lsc_of[static_cast<size_t>(r)];
    if (lsc_r) w_s *= lsc_r->eval(std::acos(std::clamp(cos_r, -1.0, 1.0)));
  };

  auto commit_pair = [&](int a, int b, int n_samples, const Acc& t_ab, const Acc& t_ba,
                         const Acc& s_ab, const Acc& s_ba, double scale_ab, double scale_ba) {
    auto commit = [&](FormFactorMatrix& m, const Acc& ab, const Acc& ba) {
      auto entry = [&](int r, int c, const Acc& acc, double scale) {
        const double mean = acc.sum / n_samples;
        double se = 0.0;
        if (n_samples > 1) {
          const double var = std::max(
              0.0, (acc.sum_sq - acc.sum * acc.sum / n_samples) / (n_samples - 1));
          se = scale * std::sqrt(var / n_samples);
        }
        m.values(r, c) = std::clamp(scale * mean, 0.0, 1.0);
        m.std_error(r, c) = se;
      };
      entry(a, b, ab, scale_ab);
      entry(b, a, ba, scale_ba);
    };
    commit(sys.transport, t_ab, t_ba);
    if (sys.sensing) commit(*sys.sensing, s_ab, s_ba);
  };

  // area x area sampling; one shared sample set serves both directions, so
  // plain-mode reciprocity holds exactly
  auto process_separated = [&](int a, int b) {
    const Patch& pa = scene.patches[static_cast<size_t>(a)];
    const Patch& pb = scene.patches[static_cast<size_t>(b)];
    detail::PairSampler sampler(samples, pair_seed(seed, static_cast<uint64_t>(pa.id),
                                                   static_cast<uint64_t>(pb.id)));
    Acc t_ab, t_ba, s_ab, s_ba;  // t_* transport, s_* sensing; *_ab gathers at a from b
    for (int k = 0; k < samples; ++k) {
      double u1, v1, u2, v2;
      sampler.coords(k, u1, v1, u2, v2);
      const Vec3 x = pa.point_at(u1, v1);
      const Vec3 y = pb.point_at(u2, v2);
      const Vec3 diff = y - x;
      const double r2 = diff.squaredNorm();
      if (r2 < 1e-18) continue;
      const Vec3 dir = diff / std::sqrt(r2);
      const double cos_a = pa.normal.dot(dir);
      const double cos_b = -pb.normal.dot(dir);
      if (cos_a <= 0.0 || cos_b <= 0.0) continue;
      const double kernel = cos_a * cos_b / (kPi * r2);
      if (index.segment_occluded(x + pa.normal * kShadowEpsilon,
                                 y + pb.normal * kShadowEpsilon, pa.id, pb.id))
        continue;
      double wt_ab, ws_ab, wt_ba, ws_ba;
      direction_weights(a, b, dir, cos_a, wt_ab, ws_ab);
      direction_weights(b, a, -dir, cos_b, wt_ba, ws_ba);
      t_ab.add(kernel * wt_ab);
      t_ba.add(kernel * wt_ba);
      if (sys.sensing) {
        s_ab.add(kernel * ws_ab);
        s_ba.add(kernel * ws_ba);
      }
    }
    commit_pair(a, b, samples, t_ab, t_ba, s_ab, s_ba, pb.area, pa.area);
  };

  // Touching pairs: stratified points on the larger patch, Arvo solid-angle
  // directions toward the other. The per-sample value cos * solid_angle / pi
  // is bounded, unlike the raw kernel near a shared edge, and both directions
  // divide one exchange-integral estimate, keeping reciprocity exact.
  auto process_touching = [&](int a, int b) {
    const Patch& pa = scene.patches[static_cast<size_t>(a)];
    const Patch& pb = scene.patches[static_cast<size_t>(b)];
    const bool sample_a = pa.area > pb.area || (pa.area == pb.area && a < b);
    const Patch& from = sample_a ? pa : pb;
    const Patch& onto = sample_a ? pb : pa;
    detail::PairSampler sampler(samples, pair_seed(seed, static_cast<uint64_t>(pa.id),
                                                   static_cast<uint64_t>(pb.id)));
    Acc t_ab, t_ba, s_ab, s_ba;
    for (int k = 0; k < samples; ++k) {
      double u1, v1, u2, v2;
      sampler.coords(k, u1, v1, u2, v2);
      const Vec3 x = from.point_at(u1, v1);
      if (onto.normal.dot(x - onto.vertices[0]) <= 1e-12) continue;  // behind the target
      Vec3 dirs[4];
      const size_t nv = onto.vertices.size();
      bool degenerate = false;
      for (size_t q = 0; q < nv; ++q) {
        const Vec3 d = onto.vertices[q] - x;
        const double len = d.norm();
        if (len < 1e-12) {
          degenerate = true;
          break;
        }
        dirs[q] = d / len;
      }
      if (degenerate) continue;
      const double omega0 = detail::spherical_triangle_area(dirs[0], dirs[1], dirs[2]);
      const double omega1 =
          nv == 4 ? detail::spherical_triangle_area(dirs[0], dirs[2], dirs[3]) : 0.0;
      const double omega = omega0 + omega1;
      if (omega < 1e-14) continue;
      Vec3 dir;
      if (u2 * omega < omega0) {
        dir = detail::sample_spherical_triangle(dirs[0], dirs[1], dirs[2], omega0,
                                                u2 * omega / omega0, v2);
      } else {
        const double u2b = (u2 * omega - omega0) / std::max(omega1, 1e-300);
        dir = detail::sample_spherical_triangle(dirs[0], dirs[2], dirs[3], omega1,
                                                std::min(u2b, 1.0), v2);
      }
      const double cos_from = from.normal.dot(dir);
      if (cos_from <= 0.0) continue;
      const double toward = onto.normal.dot(dir);
      if (std::abs(toward) < 1e-15) continue;
      const double t_hit = onto.normal.dot(onto.vertices[0] - x) / toward;
      if (t_hit <= 0.0) continue;
      const Vec3 y = x + t_hit * dir;
      if (index.segment_occluded(x + from.normal * kShadowEpsilon,
                                 y + onto.normal * kShadowEpsilon, from.id, onto.id))
        continue;
      // symmetric exchange-integral sample, divided per direction at commit
      const double base = from.area * cos_from * omega / kPi;
      // unit direction from the point on a toward the point on b
      const Vec3 ab = sample_a ? dir : -dir;
      const double cos_on_a = pa.normal.dot(ab);
      const double cos_on_b = pb.normal.dot(-ab);
      double wt_ab, ws_ab, wt_ba, ws_ba;
      direction_weights(a, b, ab, cos_on_a, wt_ab, ws_ab);
      direction_weights(b, a, -ab, cos_on_b, wt_ba, ws_ba);
      t_ab.add(base * wt_ab);
      t_ba.add(base * wt_ba);
      if (sys.sensing) {
        s_ab.add(base * ws_ab);
        s_ba.add(base * ws_ba);
      }
    }
    commit_pair(a, b, samples, t_ab, t_ba, s_ab, s_ba, 1.0 / pa.area, 1.0 / pb.area);
  };

  auto process_pair = [&](int a, int b) {
    if (touching(a, b)) process_touching(a, b);
    else process_separated(a, b);
  };

  const int workers = std::max(1, std::min(threads, n - 1));
  if (workers == 1) {
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) process_pair(a, b);
  } else {
    // row-interleaved partition; every (a,b) pair has exactly one owner, so
    // matrix writes are disjoint and the result is worker-count independent
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w]() {
        for (int a = w; a < n; a += workers)
          for (int b = a + 1; b < n; ++b) process_pair(a, b);
      });
    }
    for (auto& th : pool) th.join();
  }
  return sys;
}

// Full matrix in the requested weighting mode.
inline FormFactorMatrix assemble(const Scene& scene, int samples, uint64_t seed,
                                 WeightMode mode, int threads = 1) {
  TransportSystem sys = assemble_system(scene, samples, seed, mode, threads);
  if (has_lsc(mode)) return std::move(*sys.sensing);
  return std::move(sys.transport);
}

// ---------------------------------------------------------------------------
// Matrix export: 8-byte header (uint32 n, uint32 mode tag) + row-major doubles.
// ---------------------------------------------------------------------------

inline void save_matrix(const FormFactorMatrix& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write matrix file: " + path);
  const uint32_t n = static_cast<uint32_t>(m.n);
  const uint32_t tag = static_cast<uint32_t>(m.mode);
  out.write(reinterpret_cast<const char*>(&n), 4);
  out.write(reinterpret_cast<const char*>(&tag), 4);
  for (int r = 0; r < m.n; ++r)
    for (int c = 0; c < m.n; ++c) {
      const double v = m.values(r, c);
      out.write(reinterpret_cast<const char*>(&v), 8);
    }
}

inline FormFactorMatrix load_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open matrix file: " + path);
  uint32_t n = 0, tag = 0;
  in.read(reinterpret_cast<char*>(&n), 4);
  in.read(reinterpret_cast<char*>(&tag), 4);
  if (!in || tag > 3) throw ParseError(path + ": bad matrix header");
  FormFactorMatrix m;
  m.n = static_cast<int>(n);
  m.mode = static_cast<WeightMode>(tag);
  m.values = Eigen::MatrixXd::Zero(m.n, m.n);
  m.std_error = Eigen::MatrixXd::Zero(m.n, m.n);
  for (int r = 0; r < m.n; ++r)
    for (int c = 0; c < m.n; ++c) {
      double v;
      in.read(reinterpret_cast<char*>(&v), 8);
      if (!in) throw ParseError(path + ": truncated matrix payload");
      m.values(r, c) = v;
    }
  return m;
}

inline void save_matrix_csv(const FormFactorMatrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write matrix csv: " + path);
  out.precision(12);
  for (int r = 0; r < m.n; ++r) {
    for (int c = 0; c < m.n; ++c) out << (c ? "," : "") << m.values(r, c);
    out << "\n";
  }
}

}  // namespace lux
