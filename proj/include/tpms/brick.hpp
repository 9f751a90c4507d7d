#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tpms/field.hpp"
#include "tpms/grid.hpp"
#include "tpms/mesh.hpp"
#include "tpms/metrics.hpp"
#include "tpms/solver.hpp"

namespace tpms {

/// Print envelope of the workshop printers, millimetres.
inline const Vec3 kEnvelopeMm(150.0, 150.0, 200.0);
inline constexpr double kDefaultBaseMm = 10.0;
inline constexpr double kDefaultNozzleMm = 0.6;
inline constexpr int kDefaultMaxAxisSamples = 128;
inline constexpr double kOverhangLimit = 0.25;
inline constexpr double kOverhangThresholdDeg = 45.0;
inline constexpr double kDefaultDensityTarget = 0.3;

/// How the lattice solid is chosen: a fixed network iso-level, a fixed sheet
/// thickness, or a target that the solver turns into one of those.
/// The default is a 0.3 relative-density network.
struct ModeSpec {
  enum class Kind { network, sheet, density, wall };
  Kind kind = Kind::density;
  /// Iso-level, sheet half-thickness, density target or wall target (mm).
  double value = kDefaultDensityTarget;
  /// Solid style used when targeting density.
  SolidMode::Kind density_solid = SolidMode::Kind::network;
  std::optional<double> tol;
};

struct BrickSpec {
  FieldSpec field;
  ModeSpec mode;
  Vec3 domain_size = kEnvelopeMm;
  double base_height = kDefaultBaseMm;
  /// Samples per axis; empty means the longest axis gets 128.
  std::optional<Vec3i> resolution;
  double nozzle_mm = kDefaultNozzleMm;
  bool allow_oversize = false;

  Domain domain() const { return {Vec3::Zero(), domain_size}; }
  Vec3i resolved_resolution() const;
  /// Throws InvalidSpec, EnvelopeExceeded or CapExceeded.
  void validate() const;
};

nlohmann::json to_json(const BrickSpec& spec);
/// Missing fields take their defaults. Throws Error(InvalidSpec).
BrickSpec brick_spec_from_json(const nlohmann::json& j);
/// Serialized form with defaults resolved; object keys are sorted, so equal
/// specs give byte-identical strings.
std::string canonical_json(const BrickSpec& spec);

struct BrickResult {
  TriangleMesh mesh;
  MeshReport report;
  BrickSpec spec_echo;
  std::optional<SolveResult> solve;
  /// Inside-negative samples that were meshed (lattice plus base).
  VoxelGrid solid;
};

/// solve (targets only) -> sample -> solidify -> union base -> marching cubes
/// -> caps -> weld -> measure. Throws rather than return an open mesh.
BrickResult build_brick(const BrickSpec& spec);

/// Only the solve step of build_brick. Throws InvalidSpec for fixed modes.
SolveResult solve_brick(const BrickSpec& spec);

std::vector<std::string> validate_constraints(const BrickResult& result, const BrickSpec& spec);

/// Nodes of `grid` whose z lies in [z_lo, z_hi].
VoxelGrid slab_z(const VoxelGrid& grid, double z_lo, double z_hi);

}  // namespace tpms
