#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

#include "tpms/error.hpp"
#include "tpms/field.hpp"

namespace tpms {

/// Axis-aligned box in millimetres.
struct Domain {
  Vec3 min_corner = Vec3::Zero();
  Vec3 max_corner = Vec3::Ones();

  Vec3 size() const { return max_corner - min_corner; }
  double volume() const { return size().prod(); }
  /// Throws Error(InvalidArgument) unless max_corner > min_corner on every axis.
  void validate() const;
};

/// Regular lattice of samples; nodes sit on the domain corners inclusive and
/// values are stored x-fastest.
struct VoxelGrid {
  Vec3i dims = Vec3i::Constant(2);
  Vec3 origin = Vec3::Zero();
  Vec3 spacing = Vec3::Ones();
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(dims.x()) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(dims.y()) * k);
  }
  double at(int i, int j, int k) const { return values[index(i, j, k)]; }
  Vec3 position(int i, int j, int k) const {
    return origin + Vec3(i, j, k).cwiseProduct(spacing);
  }
  Domain domain() const {
    return {origin, origin + (dims - Vec3i::Ones()).cast<double>().cwiseProduct(spacing)};
  }
  /// Smallest node pitch, the unit in which wall estimates are reported.
  double pitch() const { return spacing.minCoeff(); }
};

inline constexpr std::uint64_t kDefaultMaxVoxels = 512ull * 512ull * 512ull;

/// Sample budget; TPMS_FORGE_MAX_VOXELS overrides the default of 512^3.
std::uint64_t max_voxels();

/// Checks `dims` against the budget without sampling.
void check_dims(const Vec3i& dims, std::uint64_t cap = max_voxels());

using ScalarField = std::function<double(const Vec3&)>;

/// values[i,j,k] = field(origin + (i,j,k) * spacing). Slabs along z are
/// evaluated in parallel; each node is written exactly once, so the result is
/// independent of the thread count. `field` must be safe to call concurrently.
VoxelGrid sample(const ScalarField& field, const Domain& domain, const Vec3i& dims,
                 std::uint64_t cap = max_voxels());

VoxelGrid sample(const FieldSpec& spec, const Domain& domain, const Vec3i& dims,
                 std::uint64_t cap = max_voxels());

/// How a signed field is turned into an inside-negative solid.
struct SolidMode {
  enum class Kind { network, sheet };
  Kind kind = Kind::network;
  double t = 0.0;

  static SolidMode network(double level) { return {Kind::network, level}; }
  static SolidMode sheet(double thickness) { return {Kind::sheet, thickness}; }
};

/// network(t): F - t, so inside is F <= t. sheet(t): |F| - t, inside is |F| <= t.
VoxelGrid transform_inside_negative(const VoxelGrid& grid, const SolidMode& mode);

/// Componentwise min: union of the two solids under the inside-negative rule.
VoxelGrid union_min(const VoxelGrid& a, const VoxelGrid& b);

}  // namespace tpms
