// Acceptance runner: one PASS/FAIL line per primary criterion, nonzero exit on
// any failure. Each check returns an empty string on success, otherwise the
// first violated condition.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "tpms/brick.hpp"
#include "tpms/error.hpp"
#include "tpms/grid.hpp"
#include "tpms/io.hpp"
#include "tpms/mesh.hpp"
#include "tpms/metrics.hpp"
#include "tpms/service.hpp"
#include "tpms/solver.hpp"
// Last: resolv.h, pulled in by httplib, defines _res.
#include "httplib.h"

namespace {

using namespace tpms;
using namespace tpms::oracle;
using nlohmann::json;

constexpr double kPi = std::numbers::pi;

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<Vec3> random_points(std::size_t n, const Vec3& period, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-2.0, 2.0);
  std::vector<Vec3> out(n);
  for (Vec3& p : out) p = Vec3(unit(rng), unit(rng), unit(rng)).cwiseProduct(period);
  return out;
}

bool is_skeletal(SurfaceKind k) {
  return k == SurfaceKind::skeletal_1 || k == SurfaceKind::skeletal_2 || k == SurfaceKind::skeletal_3 ||
         k == SurfaceKind::skeletal_4;
}

// Trapezoid-weighted inside fraction of raw <= t; the library integrates the
// same quadrature independently.
struct DensityOracle {
  std::vector<std::pair<double, double>> sorted;  // (value, weight)
  std::vector<double> cumulative;
  double total = 0.0;

  explicit DensityOracle(const VoxelGrid& raw) {
    for (int k = 0; k < raw.dims.z(); ++k)
      for (int j = 0; j < raw.dims.y(); ++j)
        for (int i = 0; i < raw.dims.x(); ++i) {
          double w = 1.0;
          w *= (i == 0 || i == raw.dims.x() - 1) ? 0.5 : 1.0;
          w *= (j == 0 || j == raw.dims.y() - 1) ? 0.5 : 1.0;
          w *= (k == 0 || k == raw.dims.z() - 1) ? 0.5 : 1.0;
          sorted.emplace_back(raw.at(i, j, k), w);
        }
    std::sort(sorted.begin(), sorted.end());
    double run = 0.0;
    for (const auto& [v, w] : sorted) cumulative.push_back(run += w);
    total = run;
  }

  double operator()(double t) const {
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), std::make_pair(t, 1e300));
    const auto n = it - sorted.begin();
    return n == 0 ? 0.0 : cumulative[n - 1] / total;
  }
};

std::string check_field() {
  const Vec3 period(50.0, 37.0, 61.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (SurfaceKind kind : kAllSurfaces) {
    FieldSpec s;
    s.kind = kind;
    s.period_length = period;
    const std::string name(surface_name(kind));
    const SymmetryInfo info = symmetry_descriptor(kind);
    const auto points = random_points(10000, period, 11);

    for (const Vec3& p : points) {
      const double f = evaluate(s, p);
      if (!std::isfinite(f)) return name + ": non-finite value";
      if (info.symmetry == Symmetry::odd_inversion && std::abs(f + evaluate(s, -p)) > 1e-9)
        return name + ": inversion antisymmetry";
      if (info.symmetry == Symmetry::odd_half_translation && std::abs(f + evaluate(s, p + 0.5 * period)) > 1e-9)
        return name + ": half-translation antisymmetry";
    }

    FieldSpec shifted = s;
    shifted.phase_offset = Vec3(unit(rng), unit(rng), unit(rng));
    for (const Vec3& p : points) {
      const double f = evaluate(shifted, p);
      for (int a = 0; a < 3; ++a) {
        // Scherk kinds are periodic only along their trigonometric axes.
        if (kind == SurfaceKind::scherk_1 && a == 2) continue;
        if (kind == SurfaceKind::scherk_2 && a != 2) continue;
        if (std::abs(evaluate(shifted, p + period[a] * Vec3::Unit(a)) - f) > 1e-9 * (1 + std::abs(f)))
          return name + fmt(": periodicity along axis %d", a);
      }
    }

    const Vec3 h = 1e-4 * period;
    const double floor = 2 * kPi / period.minCoeff();
    int checked = 0;
    for (std::size_t n = 0; n < 2000; ++n) {
      const Vec3& p = points[n];
      if (is_skeletal(kind)) {
        const StrutHit hit = skeletal_oracle(kind, p.cwiseQuotient(period));
        bool smooth = hit.distance > 1e-3;
        for (int a = 0; a < 3 && smooth; ++a)
          for (double sgn : {-1.0, 1.0})
            smooth = smooth &&
                     skeletal_oracle(kind, (p + sgn * h[a] * Vec3::Unit(a)).cwiseQuotient(period)).segment == hit.segment;
        if (!smooth) continue;
      }
      Vec3 fd;
      for (int a = 0; a < 3; ++a) {
        const Vec3 e = h[a] * Vec3::Unit(a);
        fd[a] = (evaluate(s, p + e) - evaluate(s, p - e)) / (2 * h[a]);
      }
      const Vec3 g = gradient(s, p);
      if ((g - fd).norm() > 1e-3 * std::max(g.norm(), floor)) return name + ": gradient vs finite differences";
      ++checked;
    }
    if (checked < 1000) return name + ": too few smooth gradient samples";
  }
  return {};
}

std::string check_mesher() {
  auto sphere = [](int n) {
    return sample([](const Vec3& p) { return p.norm() - 1.0; }, {Vec3::Constant(-1.5), Vec3::Constant(1.5)},
                  Vec3i::Constant(n));
  };
  const TriangleMesh m = marching_cubes(sphere(64));
  const double area = surface_area(m), volume = signed_volume(m);
  if (std::abs(area / (4 * kPi) - 1) > 0.02) return fmt("sphere area %.6f", area);
  if (std::abs(volume / (4 * kPi / 3) - 1) > 0.01) return fmt("sphere volume %.6f", volume);
  if (!closed_two_manifold_edges(m)) return "sphere mesh not closed";

  const TriangleMesh plane = marching_cubes(
      sample([](const Vec3& p) { return p.z() - 0.53; }, {Vec3::Zero(), Vec3::Ones()}, Vec3i::Constant(17)));
  if (std::abs(surface_area(plane) - 1.0) > 1e-6) return "plane area";
  for (const Vec3& v : plane.vertices)
    if (std::abs(v.z() - 0.53) > 1e-6) return "plane vertex off the slice";

  const double coarse = std::abs(surface_area(marching_cubes(sphere(32))) - 4 * kPi);
  const double fine = std::abs(surface_area(marching_cubes(sphere(96))) - 4 * kPi);
  if (!(fine < coarse)) return fmt("refinement error %.3g -> %.3g", coarse, fine);
  return {};
}

std::string check_symmetry_densities() {
  for (SurfaceKind kind : {SurfaceKind::gyroid, SurfaceKind::diamond, SurfaceKind::schwarz_p}) {
    FieldSpec s;
    s.kind = kind;
    const VoxelGrid raw = sample(s, {Vec3::Zero(), Vec3::Constant(50)}, Vec3i::Constant(128));
    const double d = relative_density(transform_inside_negative(raw, SolidMode::network(0.0)));
    const double expected = DensityOracle(raw)(0.0);
    if (std::abs(d - 0.5) > 0.01) return std::string(surface_name(kind)) + fmt(" density %.5f", d);
    if (std::abs(d - expected) > 1e-12) return std::string(surface_name(kind)) + " disagrees with quadrature oracle";
  }
  return {};
}

std::string check_solver() {
  FieldSpec s;
  const VoxelGrid raw = sample(s, {Vec3::Zero(), Vec3::Constant(50)}, Vec3i::Constant(96));
  const DensityOracle oracle(raw);
  const auto [lo, hi] = std::minmax_element(raw.values.begin(), raw.values.end());

  // Monotone premise, measured through the library on a dense sweep.
  double previous = -1.0;
  for (int n = 0; n <= 64; ++n) {
    const double t = *lo + (*hi - *lo) * n / 64.0;
    const double d = relative_density(transform_inside_negative(raw, SolidMode::network(t)));
    if (d < previous) return fmt("density decreases at t=%.4f", t);
    previous = d;
  }

  for (double target : {0.2, 0.3, 0.5, 0.7}) {
    SolveResult r;
    try {
      r = solve_iso_for_density(raw, SolidMode::Kind::network, target);
    } catch (const Error& e) {
      return fmt("target %.1f: ", target) + e.what();
    }
    if (!r.converged) return fmt("target %.1f did not converge", target);
    if (std::abs(r.achieved - target) > 0.005) return fmt("target %.1f achieved %.5f", target, r.achieved);
    if (std::abs(oracle(r.t) - target) > 0.005) return fmt("target %.1f: oracle reads %.5f", target, oracle(r.t));
    // The sweep must also find an admissible level near the solver's answer.
    bool hit = false;
    for (int n = 0; n <= 4000 && !hit; ++n) hit = std::abs(oracle(*lo + (*hi - *lo) * n / 4000.0) - target) <= 0.005;
    if (!hit) return fmt("target %.1f: sweep finds no admissible level", target);
  }
  return {};
}

std::string check_brick_recipe() {
  const BrickSpec spec;
  if (spec.domain_size != Vec3(150, 150, 200) || spec.base_height != 10.0) return "defaults drifted";
  if (spec.resolved_resolution().maxCoeff() != 128) return "default resolution is not 128 on the longest axis";
  const BrickResult r = build_brick(spec);
  if (!r.report.watertight || !closed_two_manifold_edges(r.mesh)) return "not watertight";
  if (!r.report.edge_manifold) return "not edge-manifold";
  if (r.report.component_count != 1 || vertex_components(r.mesh) != 1)
    return fmt("%d components", vertex_components(r.mesh));
  const BoundingBox box = bounding_box(r.mesh);
  if ((box.min.array() < 0).any() || (box.max.array() > spec.domain_size.array()).any()) return "outside envelope";
  if (box.min.z() != 0.0) return "part does not sit on z = 0";
  if (relative_density(slab_z(r.solid, 0.0, spec.base_height)) != 1.0) return "base slab not fully solid";

  // THIN_WALL fires exactly when min_wall < 2 * nozzle, on both sides of it.
  BrickSpec thin;
  thin.mode = {ModeSpec::Kind::sheet, 0.01, SolidMode::Kind::network, std::nullopt};
  thin.field.period_length = Vec3::Constant(20);
  thin.domain_size = Vec3::Constant(20);
  thin.base_height = 0;
  thin.resolution = Vec3i::Constant(48);
  const BrickResult t = build_brick(thin);
  int below = 0, above = 0;
  for (const BrickResult* b : {&r, &t}) {
    const double wall = *b->report.min_wall_mm;
    (wall < 1.2 ? below : above) += 1;
    if (b->report.has_warning(warning::kThinWall) != (wall < 1.2)) return fmt("gate wrong at min_wall %.4f", wall);
  }
  if (below == 0 || above == 0) return "gate exercised on one side only";
  BrickResult probe = r;
  for (double wall : {1.1999999, 1.2, 1.2000001}) {
    probe.report.min_wall_mm = wall;
    const auto w = validate_constraints(probe, spec);
    const bool flagged = std::find(w.begin(), w.end(), warning::kThinWall) != w.end();
    if (flagged != (wall < 1.2)) return fmt("gate wrong at boundary %.7f", wall);
  }
  return {};
}

std::string check_stl_round_trip() {
  for (SurfaceKind kind :
       {SurfaceKind::gyroid, SurfaceKind::diamond, SurfaceKind::schwarz_p, SurfaceKind::neovius, SurfaceKind::lidinoid}) {
    BrickSpec s;
    s.field.kind = kind;
    s.resolution = Vec3i(48, 48, 64);
    const TriangleMesh m = build_brick(s).mesh;
    const std::string bytes = stl_binary_bytes(m);
    const TriangleMesh back = read_stl_binary(bytes);
    const std::string name(surface_name(kind));
    if (back.triangles.size() != m.triangles.size()) return name + ": triangle count changed";
    for (std::size_t t = 0; t < m.triangles.size(); ++t)
      for (int c = 0; c < 3; ++c)
        for (int a = 0; a < 3; ++a) {
          const float want = static_cast<float>(m.vertices[m.triangles[t][c]][a]);
          const float got = static_cast<float>(back.vertices[back.triangles[t][c]][a]);
          if (std::memcmp(&want, &got, sizeof want) != 0) return name + ": coordinate bits changed";
        }
    // Re-encoding reproduces every vertex and attribute byte; normals are
    // recomputed from the float vertices and may round differently.
    const std::string again = stl_binary_bytes(back);
    if (again.size() != bytes.size() || again.compare(0, 84, bytes, 0, 84) != 0) return name + ": re-encoded header differs";
    for (std::size_t at = 84; at < bytes.size(); at += 50)
      if (again.compare(at + 12, 38, bytes, at + 12, 38) != 0) return name + ": re-encoded vertex bytes differ";
  }
  return {};
}

std::string check_service() {
  const std::string body = R"({"surface":"diamond","period_mm":40,"resolution":48})";
  std::string first_id, first_mesh;
  for (int round = 0; round < 2; ++round) {
    // A fresh service each round: identical ids and bytes come from content, not cache.
    Service service;
    HttpServer server(service);
    const int port = server.bind("127.0.0.1", 0);
    server.start();
    httplib::Client cli("127.0.0.1", port);

    auto a = cli.Post("/api/generate", body, "application/json");
    auto b = cli.Post("/api/generate", body, "application/json");
    if (!a || !b || a->status != 200 || b->status != 200) return "generate failed";
    const std::string id = json::parse(a->body)["id"];
    if (json::parse(b->body)["id"] != id) return "ids differ across repeats";
    if (id != job_id(brick_spec_from_json(json::parse(body)))) return "id is not the content hash";
    if (service.builds_started() != 1) return "repeat request rebuilt the job";

    auto m1 = cli.Get("/api/mesh/" + id + ".stl");
    auto m2 = cli.Get("/api/mesh/" + id + ".stl");
    if (!m1 || !m2 || m1->status != 200) return "mesh endpoint failed";
    if (m1->body != m2->body) return "mesh bytes differ across repeats";
    if (round == 0) {
      first_id = id;
      first_mesh = m1->body;
    } else if (id != first_id || m1->body != first_mesh) {
      return "fresh service produced a different id or mesh";
    }

    for (const char* bad : {"{oops", R"({"surface":"torus"})", R"({"mode":{"type":"sheet"}})",
                            R"({"domain_mm":[300,150,200]})", R"({"base_mm":-1})"}) {
      auto r = cli.Post("/api/generate", bad, "application/json");
      if (!r || r->status != 422) return std::string("invalid spec not rejected with 422: ") + bad;
    }
    server.stop();
  }
  return {};
}

struct Criterion {
  const char* name;
  double budget_s;
  std::function<std::string()> check;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"field correctness", 5, check_field},
      {"mesher oracle", 30, check_mesher},
      {"symmetry densities", 60, check_symmetry_densities},
      {"solver", 120, check_solver},
      {"brick recipe", 120, check_brick_recipe},
      {"stl round trip", 0, check_stl_round_trip},
      {"service contract", 0, check_service},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string why;
    try {
      why = c.check();
    } catch (const std::exception& e) {
      why = std::string("threw ") + e.what();
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (why.empty() && c.budget_s > 0 && elapsed > c.budget_s) why = fmt("over budget (%.1f s > %.0f s)", elapsed, c.budget_s);
    if (why.empty()) {
      std::printf("PASS %s (%.2f s)\n", c.name, elapsed);
    } else {
      std::printf("FAIL %s (%.2f s): %s\n", c.name, elapsed, why.c_str());
      ++failures;
    }
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
