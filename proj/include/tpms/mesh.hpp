#pragma once

#include <vector>

#include "tpms/field.hpp"
#include "tpms/grid.hpp"

namespace tpms {

/// Indexed triangle mesh. Triangles wind counter-clockwise seen from outside.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Vec3i> triangles;

  bool empty() const { return triangles.empty(); }
};

/// Interpolated crossings keep at least this fraction of a cell edge away
/// from both end nodes, so no sliver triangles reach the output.
inline constexpr double kEdgeClearance = 1e-3;

/// Zero samples are nudged by this fraction of the value range before lookup.
inline constexpr double kZeroPerturbation = 1e-9;

/// Zero level set of an inside-negative grid, normals pointing towards
/// increasing values. Vertices on shared cell edges are shared.
TriangleMesh marching_cubes(const VoxelGrid& grid);

/// Closes `mesh` (built by marching_cubes from `grid`) with planar caps over
/// the inside regions of the six domain faces. Throws Error(CapFailure) when
/// the result is not closed and consistently wound.
TriangleMesh cap_boundary(const VoxelGrid& grid, const TriangleMesh& mesh);

/// Merges vertices closer than `eps` (negative: 1e-6 of the bounding-box
/// diagonal), then drops degenerate triangles, cancelling opposite pairs and
/// orphan vertices. Surviving elements keep their relative order.
TriangleMesh weld_and_clean(const TriangleMesh& mesh, double eps = -1.0);

double triangle_area(const TriangleMesh& mesh, const Vec3i& tri);
Vec3 triangle_normal(const TriangleMesh& mesh, const Vec3i& tri);

struct BoundingBox {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();
};
BoundingBox bounding_box(const TriangleMesh& mesh);

}  // namespace tpms
