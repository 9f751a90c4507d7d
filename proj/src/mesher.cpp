#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <unordered_map>

#include "mc_tables.hpp"
#include "tpms/mesh.hpp"
#include "tpms/metrics.hpp"

namespace tpms {
namespace {

constexpr double kDegenerateArea = 1e-12;

std::vector<double> perturbed_values(const VoxelGrid& grid) {
  std::vector<double> values = grid.values;
  if (values.empty()) return values;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double bump = kZeroPerturbation * (*hi - *lo);
  for (double& v : values) {
    if (v == 0.0) v = bump;
  }
  return values;
}

struct Crossing {
  std::uint64_t key;
  Vec3 position;
};

std::uint64_t node_key(std::size_t node) { return static_cast<std::uint64_t>(node) * 4 + 3; }

Vec3i axis_step(int axis) {
  Vec3i step = Vec3i::Zero();
  step[axis] = 1;
  return step;
}

// Zero crossing on the grid edge from `node` to `node + e_axis`. Both the
// mesher and the capper go through here so shared vertices agree bit-for-bit.
// Crossings stay on their edge, clamped away from the nodes, so the table's
// topology is kept and no two vertices coincide. With `snap_zeros`, a sample
// that was exactly zero owns the crossing outright: the vertex is the node
// itself. That is exact for surfaces running through nodes but can pinch the
// surface at saddles, so callers fall back to clamping when it does.
Crossing edge_crossing(const VoxelGrid& grid, const std::vector<double>& values, const Vec3i& node,
                       int axis, bool snap_zeros) {
  const Vec3i next = node + axis_step(axis);
  const std::size_t a = grid.index(node.x(), node.y(), node.z());
  const std::size_t b = grid.index(next.x(), next.y(), next.z());
  const Vec3 pa = grid.position(node.x(), node.y(), node.z());
  const Vec3 pb = grid.position(next.x(), next.y(), next.z());
  if (snap_zeros && grid.values[a] == 0.0) return {node_key(a), pa};
  if (snap_zeros && grid.values[b] == 0.0) return {node_key(b), pb};
  const double t = std::clamp(values[a] / (values[a] - values[b]), kEdgeClearance, 1.0 - kEdgeClearance);
  return {static_cast<std::uint64_t>(a) * 4 + static_cast<std::uint64_t>(axis), pa + t * (pb - pa)};
}

struct PositionHash {
  std::size_t operator()(const Vec3& p) const {
    std::uint64_t h = 1469598103934665603ull;
    for (int i = 0; i < 3; ++i) {
      h ^= std::bit_cast<std::uint64_t>(p[i] + 0.0);
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

struct PositionEqual {
  bool operator()(const Vec3& a, const Vec3& b) const { return a == b; }
};

bool has_repeat(const Vec3i& t) { return t[0] == t[1] || t[1] == t[2] || t[0] == t[2]; }

bool has_exact_zero(const VoxelGrid& grid) {
  return std::find(grid.values.begin(), grid.values.end(), 0.0) != grid.values.end();
}

}  // namespace

double triangle_area(const TriangleMesh& mesh, const Vec3i& tri) {
  const Vec3& a = mesh.vertices[tri[0]];
  return 0.5 * (mesh.vertices[tri[1]] - a).cross(mesh.vertices[tri[2]] - a).norm();
}

Vec3 triangle_normal(const TriangleMesh& mesh, const Vec3i& tri) {
  const Vec3& a = mesh.vertices[tri[0]];
  const Vec3 n = (mesh.vertices[tri[1]] - a).cross(mesh.vertices[tri[2]] - a);
  const double len = n.norm();
  return len > 0.0 ? Vec3(n / len) : Vec3::Zero();
}

BoundingBox bounding_box(const TriangleMesh& mesh) {
  if (mesh.vertices.empty()) return {};
  BoundingBox box{mesh.vertices.front(), mesh.vertices.front()};
  for (const Vec3& v : mesh.vertices) {
    box.min = box.min.cwiseMin(v);
    box.max = box.max.cwiseMax(v);
  }
  return box;
}

namespace {

TriangleMesh extract(const VoxelGrid& grid, bool snap_zeros) {
  TriangleMesh mesh;
  if ((grid.dims.array() < 2).any()) return mesh;
  const std::vector<double> values = perturbed_values(grid);
  std::unordered_map<std::uint64_t, int> ids;

  auto vertex_id = [&](const Crossing& c) {
    auto [it, inserted] = ids.try_emplace(c.key, static_cast<int>(mesh.vertices.size()));
    if (inserted) mesh.vertices.push_back(c.position);
    return it->second;
  };

  for (int k = 0; k + 1 < grid.dims.z(); ++k) {
    for (int j = 0; j + 1 < grid.dims.y(); ++j) {
      for (int i = 0; i + 1 < grid.dims.x(); ++i) {
        const Vec3i cell(i, j, k);
        unsigned config = 0;
        for (int c = 0; c < 8; ++c) {
          const auto& o = detail::kCornerOffset[c];
          if (values[grid.index(i + o[0], j + o[1], k + o[2])] < 0.0) config |= 1u << c;
        }
        if (config == 0 || config == 255) continue;

        std::array<int, 12> edge_ids;
        edge_ids.fill(-1);
        auto edge_vertex = [&](int e) {
          if (edge_ids[e] < 0) {
            const auto& lo = detail::kCornerOffset[detail::kEdgeCorners[e][0]];
            const auto& hi = detail::kCornerOffset[detail::kEdgeCorners[e][1]];
            const int axis = lo[0] != hi[0] ? 0 : (lo[1] != hi[1] ? 1 : 2);
            edge_ids[e] =
                vertex_id(edge_crossing(grid, values, cell + Vec3i(lo[0], lo[1], lo[2]), axis, snap_zeros));
          }
          return edge_ids[e];
        };

        const auto& row = detail::kTriangleTable[config];
        for (int n = 0; n < 16 && row[n] >= 0; n += 3) {
          // The table winds triangles clockwise around the outward normal.
          const Vec3i tri(edge_vertex(row[n]), edge_vertex(row[n + 2]), edge_vertex(row[n + 1]));
          if (!has_repeat(tri)) mesh.triangles.push_back(tri);
        }
      }
    }
  }
  return mesh;
}

TriangleMesh add_caps(const VoxelGrid& grid, const TriangleMesh& mesh, bool snap_zeros) {
  TriangleMesh out = mesh;
  const std::vector<double> values = perturbed_values(grid);
  std::unordered_map<Vec3, int, PositionHash, PositionEqual> by_position;
  for (std::size_t n = 0; n < out.vertices.size(); ++n) {
    by_position.try_emplace(out.vertices[n], static_cast<int>(n));
  }
  auto vertex_id = [&](const Vec3& p) {
    auto [it, inserted] = by_position.try_emplace(p, static_cast<int>(out.vertices.size()));
    if (inserted) out.vertices.push_back(p);
    return it->second;
  };

  for (int a = 0; a < 3; ++a) {
    const int b = (a + 1) % 3;
    const int c = (a + 2) % 3;
    for (int side = 0; side < 2; ++side) {
      const int layer = side == 0 ? 0 : grid.dims[a] - 1;
      for (int ic = 0; ic + 1 < grid.dims[c]; ++ic) {
        for (int ib = 0; ib + 1 < grid.dims[b]; ++ib) {
          // Corners counter-clockwise about +a.
          std::array<Vec3i, 4> corner;
          const std::array<std::array<int, 2>, 4> uv = {{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
          std::array<bool, 4> inside;
          int inside_count = 0;
          for (int q = 0; q < 4; ++q) {
            corner[q][a] = layer;
            corner[q][b] = ib + uv[q][0];
            corner[q][c] = ic + uv[q][1];
            inside[q] = values[grid.index(corner[q].x(), corner[q].y(), corner[q].z())] < 0.0;
            inside_count += inside[q];
          }
          if (inside_count == 0) continue;

          auto node_point = [&](int q) {
            return vertex_id(grid.position(corner[q].x(), corner[q].y(), corner[q].z()));
          };
          // Side q runs from corner q to corner q+1.
          auto crossing_point = [&](int edge) {
            static constexpr std::array<int, 4> kLower = {0, 1, 3, 0};
            const int axis = edge % 2 == 0 ? b : c;
            return vertex_id(edge_crossing(grid, values, corner[kLower[edge]], axis, snap_zeros).position);
          };

          std::vector<std::vector<int>> polygons;
          if (inside_count == 2 && inside[0] == inside[2]) {
            // Ambiguous face: keep the inside corners apart, as the table does.
            const int p = inside[0] ? 0 : 1;
            const int r = p + 2;
            polygons.push_back({crossing_point((p + 3) % 4), node_point(p), crossing_point(p)});
            polygons.push_back({crossing_point(r - 1), node_point(r), crossing_point(r)});
          } else {
            std::vector<int> poly;
            for (int q = 0; q < 4; ++q) {
              const int r = (q + 1) % 4;
              if (inside[q]) poly.push_back(node_point(q));
              if (inside[q] != inside[r]) poly.push_back(crossing_point(q));
            }
            polygons.push_back(std::move(poly));
          }

          for (std::vector<int>& poly : polygons) {
            std::vector<int> ring;
            for (int id : poly) {
              if (ring.empty() || ring.back() != id) ring.push_back(id);
            }
            while (ring.size() > 1 && ring.front() == ring.back()) ring.pop_back();
            for (std::size_t n = 1; n + 1 < ring.size(); ++n) {
              Vec3i tri(ring[0], ring[n], ring[n + 1]);
              if (side == 0) std::swap(tri[1], tri[2]);
              if (!has_repeat(tri)) out.triangles.push_back(tri);
            }
          }
        }
      }
    }
  }

  return out;
}

}  // namespace

TriangleMesh marching_cubes(const VoxelGrid& grid) {
  TriangleMesh mesh = extract(grid, true);
  if (has_exact_zero(grid)) {
    // Snapped vertices are kept only if both the open surface and its capped
    // closure stay manifold; otherwise every crossing is clamped.
    const TopologyReport topo = topology_check(mesh);
    if (!topo.edge_manifold || !topo.consistent_winding || !topology_check(add_caps(grid, mesh, true)).watertight) {
      mesh = extract(grid, false);
    }
  }
  return mesh;
}

TriangleMesh cap_boundary(const VoxelGrid& grid, const TriangleMesh& mesh) {
  // The capper does not know which crossing rule produced `mesh`; try the
  // snapping rule first and accept whichever closes the surface.
  TriangleMesh out = add_caps(grid, mesh, true);
  TopologyReport topo = topology_check(out);
  if (!topo.watertight && has_exact_zero(grid)) {
    out = add_caps(grid, mesh, false);
    topo = topology_check(out);
  }
  if (!topo.watertight) {
    throw Error(ErrorCode::CapFailure, "capped mesh is not closed (" +
                                           std::to_string(topo.boundary_edges) + " open edges, " +
                                           std::to_string(topo.non_manifold_edges) +
                                           " non-manifold edges)");
  }
  return out;
}

TriangleMesh weld_and_clean(const TriangleMesh& mesh, double eps) {
  if (eps < 0.0) {
    const BoundingBox box = bounding_box(mesh);
    eps = 1e-6 * (box.max - box.min).norm();
  }
  const std::size_t n = mesh.vertices.size();
  std::vector<int> rep(n, -1);

  if (eps > 0.0) {
    using Cell = std::array<std::int64_t, 3>;
    std::map<Cell, std::vector<int>> buckets;
    auto cell_of = [eps](const Vec3& p) {
      return Cell{static_cast<std::int64_t>(std::floor(p.x() / eps)),
                  static_cast<std::int64_t>(std::floor(p.y() / eps)),
                  static_cast<std::int64_t>(std::floor(p.z() / eps))};
    };
    for (std::size_t v = 0; v < n; ++v) {
      const Vec3& p = mesh.vertices[v];
      const Cell home = cell_of(p);
      int found = -1;
      for (int dz = -1; dz <= 1 && found < 0; ++dz) {
        for (int dy = -1; dy <= 1 && found < 0; ++dy) {
          for (int dx = -1; dx <= 1 && found < 0; ++dx) {
            auto it = buckets.find({home[0] + dx, home[1] + dy, home[2] + dz});
            if (it == buckets.end()) continue;
            for (int candidate : it->second) {
              if ((mesh.vertices[candidate] - p).norm() <= eps) {
                found = candidate;
                break;
              }
            }
          }
        }
      }
      if (found >= 0) {
        rep[v] = found;
      } else {
        rep[v] = static_cast<int>(v);
        buckets[home].push_back(static_cast<int>(v));
      }
    }
  } else {
    std::unordered_map<Vec3, int, PositionHash, PositionEqual> exact;
    for (std::size_t v = 0; v < n; ++v) {
      rep[v] = exact.try_emplace(mesh.vertices[v], static_cast<int>(v)).first->second;
    }
  }

  std::vector<Vec3i> kept;
  kept.reserve(mesh.triangles.size());
  for (const Vec3i& t : mesh.triangles) {
    const Vec3i r(rep[t[0]], rep[t[1]], rep[t[2]]);
    if (has_repeat(r)) continue;
    const Vec3& a = mesh.vertices[r[0]];
    if (0.5 * (mesh.vertices[r[1]] - a).cross(mesh.vertices[r[2]] - a).norm() <= kDegenerateArea) continue;
    kept.push_back(r);
  }

  // Opposite-facing copies of the same triangle enclose nothing; drop both.
  std::map<std::array<int, 3>, std::vector<std::size_t>> by_vertex_set;
  for (std::size_t t = 0; t < kept.size(); ++t) {
    std::array<int, 3> key = {kept[t][0], kept[t][1], kept[t][2]};
    std::sort(key.begin(), key.end());
    by_vertex_set[key].push_back(t);
  }
  auto parity = [](const Vec3i& t) {
    // Even when the cyclic order matches ascending order.
    const int m = static_cast<int>(std::min_element(t.data(), t.data() + 3) - t.data());
    return t[(m + 1) % 3] < t[(m + 2) % 3];
  };
  std::vector<bool> dropped(kept.size(), false);
  for (auto& [key, group] : by_vertex_set) {
    if (group.size() < 2) continue;
    std::vector<std::size_t> forward, backward;
    for (std::size_t t : group) (parity(kept[t]) ? forward : backward).push_back(t);
    const std::size_t pairs = std::min(forward.size(), backward.size());
    for (std::size_t p = 0; p < pairs; ++p) dropped[forward[p]] = dropped[backward[p]] = true;
  }

  TriangleMesh out;
  std::vector<int> remap(n, -1);
  for (std::size_t t = 0; t < kept.size(); ++t) {
    if (dropped[t]) continue;
    for (int corner = 0; corner < 3; ++corner) remap[kept[t][corner]] = 0;
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (remap[v] == 0) {
      remap[v] = static_cast<int>(out.vertices.size());
      out.vertices.push_back(mesh.vertices[v]);
    }
  }
  for (std::size_t t = 0; t < kept.size(); ++t) {
    if (dropped[t]) continue;
    out.triangles.emplace_back(remap[kept[t][0]], remap[kept[t][1]], remap[kept[t][2]]);
  }
  return out;
}

}  // namespace tpms
