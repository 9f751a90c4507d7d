#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <queue>

#include "oracles.hpp"
#include "tpms/grid.hpp"
#include "tpms/mesh.hpp"
#include "tpms/metrics.hpp"

namespace tpms {
namespace {

using namespace oracle;

constexpr double kPi = std::numbers::pi;

TriangleMesh sphere_mesh(int n) {
  const VoxelGrid g = sample([](const Vec3& p) { return p.norm() - 1.0; }, {Vec3::Constant(-1.5), Vec3::Constant(1.5)},
                             Vec3i::Constant(n));
  return marching_cubes(g);
}

VoxelGrid constant_grid(const Vec3i& dims, double v, const Vec3& spacing = Vec3::Ones()) {
  VoxelGrid g;
  g.dims = dims;
  g.spacing = spacing;
  g.values.assign(static_cast<std::size_t>(dims.prod()), v);
  return g;
}

TEST(AreaVolume, UnitCube) {
  const AreaVolume av = area_volume(box_mesh(Vec3::Zero(), Vec3::Ones()));
  EXPECT_NEAR(av.area, 6.0, 1e-12);
  EXPECT_NEAR(av.volume, 1.0, 1e-12);
  EXPECT_NEAR(av.signed_volume, 1.0, 1e-12);
  EXPECT_TRUE(av.warnings.empty());
}

TEST(AreaVolume, SphereMatchesAnalyticValues) {
  const AreaVolume av = area_volume(sphere_mesh(64));
  EXPECT_NEAR(av.area / (4 * kPi), 1.0, 0.02);
  EXPECT_NEAR(av.volume / (4 * kPi / 3), 1.0, 0.01);
}

TEST(AreaVolume, MirroredMeshKeepsMagnitudes) {
  TriangleMesh m = sphere_mesh(24);
  const AreaVolume before = area_volume(m);
  for (Vec3& v : m.vertices) v.x() = -v.x();
  const AreaVolume after = area_volume(m);
  EXPECT_NEAR(after.area, before.area, 1e-12 * before.area);
  EXPECT_NEAR(after.volume, before.volume, 1e-12 * before.volume);
  EXPECT_NEAR(after.signed_volume, -before.signed_volume, 1e-12 * before.volume);
}

TEST(AreaVolume, RigidRotationInvariance) {
  TriangleMesh m = sphere_mesh(24);
  for (Vec3& v : m.vertices) v += Vec3(0.3, -0.2, 0.1);
  const AreaVolume before = area_volume(m);
  const Eigen::Matrix3d r = Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  for (Vec3& v : m.vertices) v = r * v + Vec3(5, -7, 2);
  const AreaVolume after = area_volume(m);
  EXPECT_NEAR(after.area, before.area, 1e-6 * before.area);
  EXPECT_NEAR(after.volume, before.volume, 1e-6 * before.volume);
}

TEST(AreaVolume, OpenMeshIsFlagged) {
  TriangleMesh m = box_mesh(Vec3::Zero(), Vec3::Ones());
  m.triangles.pop_back();
  const AreaVolume av = area_volume(m);
  ASSERT_EQ(av.warnings.size(), 1u);
  EXPECT_EQ(av.warnings[0], warning::kNotWatertight);
}

TEST(RelativeDensity, AllInside) { EXPECT_EQ(relative_density(constant_grid(Vec3i(5, 6, 7), -1.0)), 1.0); }

TEST(RelativeDensity, TrapezoidWeights) {
  // Inside on the x = 0 layer only: half a cell column out of (n-1) cells.
  VoxelGrid g = constant_grid(Vec3i(5, 3, 3), 1.0);
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 3; ++j) g.values[g.index(0, j, k)] = -1.0;
  EXPECT_NEAR(relative_density(g), 0.5 / 4.0, 1e-15);
}

TEST(RelativeDensity, AntisymmetricKindsAreHalf) {
  for (SurfaceKind kind : {SurfaceKind::schwarz_p, SurfaceKind::gyroid}) {
    FieldSpec s;
    s.kind = kind;
    const VoxelGrid g = sample(s, {Vec3::Zero(), Vec3::Constant(50)}, Vec3i::Constant(128));
    EXPECT_NEAR(relative_density(g), 0.5, 0.01) << surface_name(kind);
  }
}

TEST(RelativeDensity, MonotoneInIsoLevel) {
  FieldSpec s;
  const VoxelGrid g = sample(s, {Vec3::Zero(), Vec3::Constant(50)}, Vec3i::Constant(40));
  double previous = 0.0;
  for (int n = -15; n <= 15; ++n) {
    const double d = relative_density(transform_inside_negative(g, SolidMode::network(0.1 * n)));
    EXPECT_GE(d, previous);
    previous = d;
  }
}

TEST(RelativeDensity, AgreesWithCappedMeshVolume) {
  FieldSpec s;
  s.kind = SurfaceKind::diamond;
  const Domain d{Vec3::Zero(), Vec3::Constant(50)};
  const VoxelGrid g = transform_inside_negative(sample(s, d, Vec3i::Constant(128)), SolidMode::network(0.4));
  const TriangleMesh m = weld_and_clean(cap_boundary(g, marching_cubes(g)));
  EXPECT_NEAR(area_volume(m).volume / d.volume(), relative_density(g), 0.02);
}

TEST(TopologyCheck, ClosedCube) {
  const TopologyReport t = topology_check(box_mesh(Vec3::Zero(), Vec3::Ones()));
  EXPECT_TRUE(t.watertight);
  EXPECT_TRUE(t.edge_manifold);
  EXPECT_TRUE(t.consistent_winding);
  EXPECT_EQ(t.component_count, 1);
  EXPECT_EQ(t.euler_characteristic, 2);
}

TEST(TopologyCheck, CubeMissingAFace) {
  TriangleMesh m = box_mesh(Vec3::Zero(), Vec3::Ones());
  m.triangles.resize(10);
  const TopologyReport t = topology_check(m);
  EXPECT_FALSE(t.watertight);
  EXPECT_TRUE(t.consistent_winding);
  EXPECT_EQ(t.component_count, 1);
  EXPECT_EQ(t.boundary_edges, 4u);
}

TEST(TopologyCheck, TwoDisjointCubes) {
  const TriangleMesh m = merged(box_mesh(Vec3::Zero(), Vec3::Ones()), box_mesh(Vec3::Constant(3), Vec3::Constant(4)));
  const TopologyReport t = topology_check(m);
  EXPECT_TRUE(t.watertight);
  EXPECT_EQ(t.component_count, 2);
}

TEST(TopologyCheck, FlippedTriangleBreaksWinding) {
  TriangleMesh m = box_mesh(Vec3::Zero(), Vec3::Ones());
  std::swap(m.triangles[0][1], m.triangles[0][2]);
  const TopologyReport t = topology_check(m);
  EXPECT_FALSE(t.consistent_winding);
  EXPECT_FALSE(t.watertight);
  EXPECT_TRUE(t.edge_manifold);
}

TEST(TopologyCheck, FinEdgeIsNonManifold) {
  TriangleMesh m = box_mesh(Vec3::Zero(), Vec3::Ones());
  m.vertices.push_back(Vec3(0.5, 0.5, 2));
  m.triangles.push_back(Vec3i(4, 5, 8));
  const TopologyReport t = topology_check(m);
  EXPECT_FALSE(t.edge_manifold);
  EXPECT_FALSE(t.watertight);
  EXPECT_EQ(t.non_manifold_edges, 1u);
}

TEST(OverhangFraction, UprightCube) {
  EXPECT_NEAR(overhang_fraction(box_mesh(Vec3::Zero(), Vec3::Ones()), 45.0), 1.0 / 6.0, 1e-12);
}

TEST(OverhangFraction, FlatPlate) {
  EXPECT_NEAR(overhang_fraction(box_mesh(Vec3::Zero(), Vec3(100, 100, 1e-3))), 0.5, 1e-4);
}

TEST(OverhangFraction, SphereMatchesCapArea) {
  EXPECT_NEAR(overhang_fraction(sphere_mesh(64), 45.0), (1 - std::cos(kPi / 4)) / 2, 0.01);
}

TEST(OverhangFraction, StaysInUnitInterval) {
  const TriangleMesh m = sphere_mesh(16);
  for (double deg : {1.0, 30.0, 45.0, 60.0, 89.0}) {
    const double f = overhang_fraction(m, deg);
    EXPECT_GE(f, 0.0);
    EXPECT_LE(f, 1.0);
  }
  TriangleMesh top = box_mesh(Vec3::Zero(), Vec3::Ones());
  top.triangles.erase(top.triangles.begin(), top.triangles.begin() + 2);  // no bottom face
  EXPECT_EQ(overhang_fraction(top), 0.0);
}

// Independent erosion oracle: multi-source BFS from outside nodes and the
// exterior, 6-connectivity. Depth 1 marks inside nodes touching the outside.
double erosion_oracle(const VoxelGrid& g) {
  const Vec3i d = g.dims;
  std::vector<int> depth(g.values.size(), 0);
  std::queue<Vec3i> frontier;
  for (int k = 0; k < d.z(); ++k)
    for (int j = 0; j < d.y(); ++j)
      for (int i = 0; i < d.x(); ++i) {
        if (g.at(i, j, k) > 0.0) continue;
        bool touches = i == 0 || j == 0 || k == 0 || i == d.x() - 1 || j == d.y() - 1 || k == d.z() - 1;
        for (int a = 0; a < 3 && !touches; ++a)
          for (int s : {-1, 1}) {
            Vec3i q(i, j, k);
            q[a] += s;
            if (g.at(q.x(), q.y(), q.z()) > 0.0) touches = true;
          }
        if (touches) {
          depth[g.index(i, j, k)] = 1;
          frontier.push(Vec3i(i, j, k));
        }
      }
  int deepest = frontier.empty() ? 0 : 1;
  while (!frontier.empty()) {
    const Vec3i p = frontier.front();
    frontier.pop();
    const int next = depth[g.index(p.x(), p.y(), p.z())] + 1;
    for (int a = 0; a < 3; ++a)
      for (int s : {-1, 1}) {
        Vec3i q = p;
        q[a] += s;
        if ((q.array() < 0).any() || (q.array() >= d.array()).any()) continue;
        const std::size_t n = g.index(q.x(), q.y(), q.z());
        if (g.values[n] > 0.0 || depth[n] != 0) continue;
        depth[n] = next;
        deepest = std::max(deepest, next);
        frontier.push(q);
      }
  }
  return 2.0 * deepest * g.pitch();
}

TEST(MinWall, SlabFiveVoxelsThick) {
  VoxelGrid g = constant_grid(Vec3i(20, 20, 21), 1.0);
  for (int k = 8; k < 13; ++k)
    for (int j = 0; j < 20; ++j)
      for (int i = 0; i < 20; ++i) g.values[g.index(i, j, k)] = -1.0;
  const double w = min_wall(g);
  EXPECT_GE(w, 4.0);
  EXPECT_LE(w, 6.0);
}

TEST(MinWall, EmptyGridIsZero) { EXPECT_EQ(min_wall(constant_grid(Vec3i(6, 6, 6), 1.0)), 0.0); }

TEST(MinWall, MatchesErosionOracle) {
  FieldSpec s;
  const VoxelGrid raw = sample(s, {Vec3::Zero(), Vec3::Constant(50)}, Vec3i::Constant(64));
  for (double t : {0.1, 0.3, 0.6}) {
    const VoxelGrid g = transform_inside_negative(raw, SolidMode::sheet(t));
    EXPECT_EQ(min_wall(g), erosion_oracle(g)) << t;
  }
  const VoxelGrid n = transform_inside_negative(raw, SolidMode::network(-0.5));
  EXPECT_EQ(min_wall(n), erosion_oracle(n));
}

TEST(MinWall, GrowsWithSheetThickness) {
  FieldSpec s;
  const VoxelGrid raw = sample(s, {Vec3::Zero(), Vec3::Constant(50)}, Vec3i::Constant(64));
  const double w2 = min_wall(transform_inside_negative(raw, SolidMode::sheet(0.2)));
  const double w4 = min_wall(transform_inside_negative(raw, SolidMode::sheet(0.4)));
  const double w8 = min_wall(transform_inside_negative(raw, SolidMode::sheet(0.8)));
  EXPECT_LE(w2, w4);
  EXPECT_LE(w4, w8);
  EXPECT_LT(w2, w8);
}

TEST(MeshReport, JsonRoundTripKeepsNulls) {
  MeshReport r = measure_mesh(box_mesh(Vec3::Zero(), Vec3(2, 3, 4)));
  EXPECT_NEAR(r.surface_area, 2 * (6 + 8 + 12), 1e-12);
  EXPECT_NEAR(r.enclosed_volume, 24, 1e-12);
  const nlohmann::json j = to_json(r);
  EXPECT_TRUE(j["relative_density"].is_null());
  EXPECT_TRUE(j["min_wall_mm"].is_null());
  for (const char* key : {"surface_area", "enclosed_volume", "relative_density", "watertight", "edge_manifold",
                          "consistent_winding", "component_count", "overhang_area_fraction", "min_wall_mm",
                          "warnings"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  r.relative_density = 0.25;
  r.min_wall_mm = 1.5;
  r.warnings = {warning::kThinWall};
  const MeshReport back = report_from_json(to_json(r));
  EXPECT_EQ(to_json(back), to_json(r));
  EXPECT_TRUE(back.has_warning("THIN_WALL"));
}

}  // namespace
}  // namespace tpms
