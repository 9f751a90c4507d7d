#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tpms/grid.hpp"
#include "tpms/mesh.hpp"

namespace tpms {

namespace warning {
inline constexpr const char* kThinWall = "THIN_WALL";
inline constexpr const char* kOverhang = "OVERHANG";
inline constexpr const char* kMultiComponent = "MULTI_COMPONENT";
inline constexpr const char* kEnvelope = "ENVELOPE";
inline constexpr const char* kNotWatertight = "NOT_WATERTIGHT";
}  // namespace warning

struct AreaVolume {
  double area = 0.0;
  /// Absolute divergence-theorem volume; only meaningful for closed meshes.
  double volume = 0.0;
  /// Signed volume, positive for outward-wound closed meshes.
  double signed_volume = 0.0;
  std::vector<std::string> warnings;
};

AreaVolume area_volume(const TriangleMesh& mesh);

struct TopologyReport {
  bool watertight = true;
  bool edge_manifold = true;
  bool consistent_winding = true;
  int component_count = 0;
  std::size_t boundary_edges = 0;
  std::size_t non_manifold_edges = 0;
  long euler_characteristic = 0;
};

/// Edge-adjacency analysis. Watertight means every edge is used by exactly two
/// triangles traversing it in opposite directions; edge-manifold only asks for
/// at most two. Components are counted over triangles connected by vertices.
TopologyReport topology_check(const TriangleMesh& mesh);

/// Inside (value <= 0) fraction with trapezoid weights: boundary samples count
/// 1/2 on faces, 1/4 on edges and 1/8 on corners.
double relative_density(const VoxelGrid& grid);

/// Area fraction of triangles whose outward normal lies within
/// (90 - threshold_deg) degrees of -z, building along +z.
double overhang_fraction(const TriangleMesh& mesh, double threshold_deg = 45.0);

/// Feature-size estimate from 6-neighbourhood erosion of the inside mask:
/// twice the deepest erosion step, times the grid pitch. Nodes outside the
/// grid count as outside. Returns 0 for an empty solid.
double min_wall(const VoxelGrid& grid);

struct MeshReport {
  double surface_area = 0.0;
  double enclosed_volume = 0.0;
  std::optional<double> relative_density;
  bool watertight = false;
  bool edge_manifold = false;
  bool consistent_winding = false;
  int component_count = 0;
  double overhang_area_fraction = 0.0;
  std::optional<double> min_wall_mm;
  std::vector<std::string> warnings;

  bool has_warning(const std::string& code) const;
};

/// Mesh-only measurements; grid-derived fields stay empty.
MeshReport measure_mesh(const TriangleMesh& mesh);

nlohmann::json to_json(const MeshReport& report);
MeshReport report_from_json(const nlohmann::json& j);

}  // namespace tpms
