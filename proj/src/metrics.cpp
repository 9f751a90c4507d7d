#include "tpms/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <numbers>
#include <numeric>
#include <unordered_map>

namespace tpms {
namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void join(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

struct EdgeUse {
  int forward = 0;   // traversed low -> high
  int backward = 0;  // traversed high -> low
};

}  // namespace

AreaVolume area_volume(const TriangleMesh& mesh) {
  AreaVolume out;
  double six_volume = 0.0;
  for (const Vec3i& t : mesh.triangles) {
    const Vec3& a = mesh.vertices[t[0]];
    const Vec3& b = mesh.vertices[t[1]];
    const Vec3& c = mesh.vertices[t[2]];
    out.area += 0.5 * (b - a).cross(c - a).norm();
    six_volume += a.dot(b.cross(c));
  }
  out.signed_volume = six_volume / 6.0;
  out.volume = std::abs(out.signed_volume);
  if (!topology_check(mesh).watertight) out.warnings.emplace_back(warning::kNotWatertight);
  return out;
}

TopologyReport topology_check(const TriangleMesh& mesh) {
  TopologyReport out;
  std::unordered_map<std::uint64_t, EdgeUse> edges;
  edges.reserve(mesh.triangles.size() * 2);
  DisjointSets sets(mesh.vertices.size());
  std::vector<bool> used(mesh.vertices.size(), false);

  for (const Vec3i& t : mesh.triangles) {
    for (int corner = 0; corner < 3; ++corner) {
      const auto from = static_cast<std::uint32_t>(t[corner]);
      const auto to = static_cast<std::uint32_t>(t[(corner + 1) % 3]);
      const std::uint64_t key = (static_cast<std::uint64_t>(std::min(from, to)) << 32) | std::max(from, to);
      EdgeUse& use = edges[key];
      (from < to ? use.forward : use.backward) += 1;
      sets.join(from, to);
      used[from] = true;
    }
  }

  for (const auto& [key, use] : edges) {
    const int count = use.forward + use.backward;
    if (count == 1) ++out.boundary_edges;
    if (count > 2) ++out.non_manifold_edges;
    if (count >= 2 && (use.forward != 1 || use.backward != 1)) out.consistent_winding = false;
  }
  out.edge_manifold = out.non_manifold_edges == 0;
  out.watertight = out.edge_manifold && out.boundary_edges == 0 && out.consistent_winding;

  long vertex_count = 0;
  std::vector<bool> root_seen(mesh.vertices.size(), false);
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    if (!used[v]) continue;
    ++vertex_count;
    const std::size_t root = sets.find(v);
    if (!root_seen[root]) {
      root_seen[root] = true;
      ++out.component_count;
    }
  }
  out.euler_characteristic =
      vertex_count - static_cast<long>(edges.size()) + static_cast<long>(mesh.triangles.size());
  return out;
}

double relative_density(const VoxelGrid& grid) {
  auto weight = [](int i, int n) { return (i == 0 || i == n - 1) ? 0.5 : 1.0; };
  double inside = 0.0;
  double total = 0.0;
  for (int k = 0; k < grid.dims.z(); ++k) {
    const double wk = weight(k, grid.dims.z());
    for (int j = 0; j < grid.dims.y(); ++j) {
      const double wjk = wk * weight(j, grid.dims.y());
      const std::size_t row = grid.index(0, j, k);
      for (int i = 0; i < grid.dims.x(); ++i) {
        const double w = wjk * weight(i, grid.dims.x());
        total += w;
        if (grid.values[row + i] <= 0.0) inside += w;
      }
    }
  }
  return total > 0.0 ? inside / total : 0.0;
}

double overhang_fraction(const TriangleMesh& mesh, double threshold_deg) {
  const double limit = std::sin(threshold_deg * std::numbers::pi / 180.0);
  double total = 0.0;
  double overhang = 0.0;
  for (const Vec3i& t : mesh.triangles) {
    const double area = triangle_area(mesh, t);
    total += area;
    if (-triangle_normal(mesh, t).z() > limit) overhang += area;
  }
  return total > 0.0 ? std::clamp(overhang / total, 0.0, 1.0) : 0.0;
}

double min_wall(const VoxelGrid& grid) {
  const int nx = grid.dims.x(), ny = grid.dims.y(), nz = grid.dims.z();
  std::vector<int> depth(grid.values.size(), 0);
  std::deque<std::size_t> frontier;

  auto inside = [&](int i, int j, int k) {
    return i >= 0 && j >= 0 && k >= 0 && i < nx && j < ny && k < nz && grid.at(i, j, k) <= 0.0;
  };
  constexpr int kNeighbours[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};

  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        if (!inside(i, j, k)) continue;
        for (const auto& d : kNeighbours) {
          if (!inside(i + d[0], j + d[1], k + d[2])) {
            const std::size_t n = grid.index(i, j, k);
            depth[n] = 1;
            frontier.push_back(n);
            break;
          }
        }
      }
    }
  }

  int deepest = 0;
  while (!frontier.empty()) {
    const std::size_t n = frontier.front();
    frontier.pop_front();
    deepest = std::max(deepest, depth[n]);
    const int i = static_cast<int>(n % nx);
    const int j = static_cast<int>((n / nx) % ny);
    const int k = static_cast<int>(n / (static_cast<std::size_t>(nx) * ny));
    for (const auto& d : kNeighbours) {
      if (!inside(i + d[0], j + d[1], k + d[2])) continue;
      const std::size_t m = grid.index(i + d[0], j + d[1], k + d[2]);
      if (depth[m] == 0) {
        depth[m] = depth[n] + 1;
        frontier.push_back(m);
      }
    }
  }
  return 2.0 * deepest * grid.pitch();
}

bool MeshReport::has_warning(const std::string& code) const {
  return std::find(warnings.begin(), warnings.end(), code) != warnings.end();
}

MeshReport measure_mesh(const TriangleMesh& mesh) {
  MeshReport report;
  const AreaVolume av = area_volume(mesh);
  const TopologyReport topo = topology_check(mesh);
  report.surface_area = av.area;
  report.enclosed_volume = av.volume;
  report.watertight = topo.watertight;
  report.edge_manifold = topo.edge_manifold;
  report.consistent_winding = topo.consistent_winding;
  report.component_count = topo.component_count;
  report.overhang_area_fraction = overhang_fraction(mesh);
  report.warnings = av.warnings;
  return report;
}

nlohmann::json to_json(const MeshReport& r) {
  nlohmann::json j;
  j["surface_area"] = r.surface_area;
  j["enclosed_volume"] = r.enclosed_volume;
  j["relative_density"] = r.relative_density ? nlohmann::json(*r.relative_density) : nlohmann::json();
  j["watertight"] = r.watertight;
  j["edge_manifold"] = r.edge_manifold;
  j["consistent_winding"] = r.consistent_winding;
  j["component_count"] = r.component_count;
  j["overhang_area_fraction"] = r.overhang_area_fraction;
  j["min_wall_mm"] = r.min_wall_mm ? nlohmann::json(*r.min_wall_mm) : nlohmann::json();
  j["warnings"] = r.warnings;
  return j;
}

MeshReport report_from_json(const nlohmann::json& j) {
  MeshReport r;
  r.surface_area = j.at("surface_area").get<double>();
  r.enclosed_volume = j.at("enclosed_volume").get<double>();
  if (!j.at("relative_density").is_null()) r.relative_density = j["relative_density"].get<double>();
  r.watertight = j.at("watertight").get<bool>();
  r.edge_manifold = j.at("edge_manifold").get<bool>();
  r.consistent_winding = j.at("consistent_winding").get<bool>();
  r.component_count = j.at("component_count").get<int>();
  r.overhang_area_fraction = j.at("overhang_area_fraction").get<double>();
  if (!j.at("min_wall_mm").is_null()) r.min_wall_mm = j["min_wall_mm"].get<double>();
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  return r;
}

}  // namespace tpms
