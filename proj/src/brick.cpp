#include "tpms/brick.hpp"

#include <cmath>
#include <string>

namespace tpms {
namespace {

using nlohmann::json;

std::string_view mode_name(ModeSpec::Kind kind) {
  switch (kind) {
    case ModeSpec::Kind::network: return "network";
    case ModeSpec::Kind::sheet: return "sheet";
    case ModeSpec::Kind::density: return "density";
    case ModeSpec::Kind::wall: return "wall";
  }
  return "network";
}

std::string_view solid_name(SolidMode::Kind kind) {
  return kind == SolidMode::Kind::sheet ? "sheet" : "network";
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from(const json& j, const char* what) {
  if (j.is_number()) return Vec3::Constant(j.get<double>());
  if (j.is_array() && j.size() == 3) return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
  throw Error(ErrorCode::InvalidSpec, std::string(what) + " must be a number or a 3-array");
}

VoxelGrid base_plate(const VoxelGrid& like, double base_height) {
  VoxelGrid base = like;
  for (int k = 0; k < base.dims.z(); ++k) {
    const double v = base.position(0, 0, k).z() - like.origin.z() - base_height;
    const std::size_t row0 = base.index(0, 0, k);
    std::fill(base.values.begin() + row0,
              base.values.begin() + row0 + static_cast<std::size_t>(base.dims.x()) * base.dims.y(), v);
  }
  return base;
}

SolidMode solid_mode(const BrickSpec& spec, const VoxelGrid& raw, const VoxelGrid* base,
                     std::optional<SolveResult>& solve) {
  switch (spec.mode.kind) {
    case ModeSpec::Kind::network: return SolidMode::network(spec.mode.value);
    case ModeSpec::Kind::sheet: return SolidMode::sheet(spec.mode.value);
    case ModeSpec::Kind::density:
      solve = solve_iso_for_density(raw, spec.mode.density_solid, spec.mode.value,
                                    spec.mode.tol.value_or(kDefaultDensityTolerance), base);
      return {spec.mode.density_solid, solve->t};
    case ModeSpec::Kind::wall:
      solve = solve_thickness_for_wall(raw, spec.mode.value, spec.mode.tol);
      return SolidMode::sheet(solve->t);
  }
  return {};
}

}  // namespace

Vec3i BrickSpec::resolved_resolution() const {
  if (resolution) return *resolution;
  const double longest = domain_size.maxCoeff();
  Vec3i dims;
  for (int a = 0; a < 3; ++a) {
    dims[a] = std::max(2, static_cast<int>(std::lround(kDefaultMaxAxisSamples * domain_size[a] / longest)));
  }
  return dims;
}

void BrickSpec::validate() const {
  field.validate();
  if (!domain_size.allFinite() || (domain_size.array() <= 0.0).any()) {
    throw Error(ErrorCode::InvalidSpec, "domain size must be positive");
  }
  if (!allow_oversize && ((domain_size - kEnvelopeMm).array() > 1e-9).any()) {
    throw Error(ErrorCode::EnvelopeExceeded, "domain exceeds the 150 x 150 x 200 mm print envelope");
  }
  if (!std::isfinite(base_height) || base_height < 0.0) {
    throw Error(ErrorCode::InvalidSpec, "base height must be non-negative");
  }
  if (!std::isfinite(nozzle_mm) || nozzle_mm <= 0.0) {
    throw Error(ErrorCode::InvalidSpec, "nozzle diameter must be positive");
  }
  if (!std::isfinite(mode.value)) throw Error(ErrorCode::InvalidSpec, "mode value must be finite");
  if (mode.kind == ModeSpec::Kind::sheet && mode.value <= 0.0) {
    throw Error(ErrorCode::InvalidSpec, "sheet thickness must be positive");
  }
  if (mode.tol && !(*mode.tol > 0.0)) throw Error(ErrorCode::InvalidSpec, "tolerance must be positive");
  if (resolution && (resolution->array() < 2).any()) {
    throw Error(ErrorCode::InvalidSpec, "resolution needs at least 2 samples per axis");
  }
  check_dims(resolved_resolution());
}

json to_json(const BrickSpec& spec) {
  json mode = {{"type", mode_name(spec.mode.kind)}};
  switch (spec.mode.kind) {
    case ModeSpec::Kind::network: mode["iso"] = spec.mode.value; break;
    case ModeSpec::Kind::sheet: mode["thickness"] = spec.mode.value; break;
    case ModeSpec::Kind::density:
      mode["target"] = spec.mode.value;
      mode["solid"] = solid_name(spec.mode.density_solid);
      mode["tol"] = spec.mode.tol ? json(*spec.mode.tol) : json();
      break;
    case ModeSpec::Kind::wall:
      mode["target_mm"] = spec.mode.value;
      mode["tol_mm"] = spec.mode.tol ? json(*spec.mode.tol) : json();
      break;
  }
  const Vec3i res = spec.resolved_resolution();
  return {
      {"surface", surface_name(spec.field.kind)},
      {"period_mm", vec_json(spec.field.period_length)},
      {"phase_offset", vec_json(spec.field.phase_offset)},
      {"strut_radius", spec.field.strut_radius},
      {"mode", mode},
      {"domain_mm", vec_json(spec.domain_size)},
      {"base_mm", spec.base_height},
      {"resolution", json::array({res.x(), res.y(), res.z()})},
      {"nozzle_mm", spec.nozzle_mm},
      {"allow_oversize", spec.allow_oversize},
  };
}

BrickSpec brick_spec_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidSpec, "brick spec must be a JSON object");
  BrickSpec spec;
  try {
    if (j.contains("surface")) {
      const auto name = j["surface"].get<std::string>();
      const auto kind = parse_surface(name);
      if (!kind) throw Error(ErrorCode::InvalidSpec, "unknown surface '" + name + "'");
      spec.field.kind = *kind;
    }
    if (j.contains("period_mm")) spec.field.period_length = vec_from(j["period_mm"], "period_mm");
    if (j.contains("phase_offset")) spec.field.phase_offset = vec_from(j["phase_offset"], "phase_offset");
    if (j.contains("strut_radius")) spec.field.strut_radius = j["strut_radius"].get<double>();
    if (j.contains("domain_mm")) spec.domain_size = vec_from(j["domain_mm"], "domain_mm");
    if (j.contains("base_mm")) spec.base_height = j["base_mm"].get<double>();
    if (j.contains("nozzle_mm")) spec.nozzle_mm = j["nozzle_mm"].get<double>();
    if (j.contains("allow_oversize")) spec.allow_oversize = j["allow_oversize"].get<bool>();

    if (j.contains("resolution") && !j["resolution"].is_null()) {
      const json& r = j["resolution"];
      if (r.is_number_integer()) {
        // A single count is the sample count of the longest axis.
        const int n = r.get<int>();
        if (n < 2) throw Error(ErrorCode::InvalidSpec, "resolution needs at least 2 samples");
        const double longest = spec.domain_size.maxCoeff();
        Vec3i dims;
        for (int a = 0; a < 3; ++a) {
          dims[a] = std::max(2, static_cast<int>(std::lround(n * spec.domain_size[a] / longest)));
        }
        spec.resolution = dims;
      } else if (r.is_array() && r.size() == 3) {
        spec.resolution = Vec3i(r[0].get<int>(), r[1].get<int>(), r[2].get<int>());
      } else {
        throw Error(ErrorCode::InvalidSpec, "resolution must be an integer or a 3-array");
      }
    }

    if (j.contains("mode")) {
      const json& m = j["mode"];
      const auto type = m.at("type").get<std::string>();
      auto optional_number = [&m](const char* key) -> std::optional<double> {
        if (!m.contains(key) || m[key].is_null()) return std::nullopt;
        return m[key].get<double>();
      };
      if (type == "network") {
        spec.mode = {ModeSpec::Kind::network, optional_number("iso").value_or(0.0), SolidMode::Kind::network, std::nullopt};
      } else if (type == "sheet") {
        spec.mode = {ModeSpec::Kind::sheet, m.at("thickness").get<double>(), SolidMode::Kind::network, std::nullopt};
      } else if (type == "density") {
        spec.mode = {ModeSpec::Kind::density, m.at("target").get<double>(), SolidMode::Kind::network, std::nullopt};
        const auto solid = m.value("solid", std::string("network"));
        if (solid != "network" && solid != "sheet") {
          throw Error(ErrorCode::InvalidSpec, "density solid must be 'network' or 'sheet'");
        }
        spec.mode.density_solid = solid == "sheet" ? SolidMode::Kind::sheet : SolidMode::Kind::network;
        spec.mode.tol = optional_number("tol");
      } else if (type == "wall") {
        spec.mode = {ModeSpec::Kind::wall, m.at("target_mm").get<double>(), SolidMode::Kind::network, std::nullopt};
        spec.mode.tol = optional_number("tol_mm");
      } else {
        throw Error(ErrorCode::InvalidSpec, "unknown mode type '" + type + "'");
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidSpec, e.what());
  }
  return spec;
}

std::string canonical_json(const BrickSpec& spec) { return to_json(spec).dump(); }

VoxelGrid slab_z(const VoxelGrid& grid, double z_lo, double z_hi) {
  int k_lo = grid.dims.z();
  int k_hi = -1;
  for (int k = 0; k < grid.dims.z(); ++k) {
    const double z = grid.position(0, 0, k).z();
    if (z >= z_lo && z <= z_hi) {
      k_lo = std::min(k_lo, k);
      k_hi = std::max(k_hi, k);
    }
  }
  VoxelGrid out;
  out.spacing = grid.spacing;
  if (k_hi < k_lo) {
    out.dims = Vec3i(grid.dims.x(), grid.dims.y(), 0);
    return out;
  }
  out.dims = Vec3i(grid.dims.x(), grid.dims.y(), k_hi - k_lo + 1);
  out.origin = grid.position(0, 0, k_lo);
  const std::size_t layer = static_cast<std::size_t>(grid.dims.x()) * grid.dims.y();
  out.values.assign(grid.values.begin() + grid.index(0, 0, k_lo),
                    grid.values.begin() + grid.index(0, 0, k_hi) + layer);
  return out;
}

BrickResult build_brick(const BrickSpec& spec) {
  spec.validate();
  const Domain domain = spec.domain();
  const Vec3i dims = spec.resolved_resolution();

  BrickResult result;
  result.spec_echo = spec;

  const VoxelGrid raw = sample(spec.field, domain, dims);
  const bool with_base = spec.base_height > 0.0;
  const VoxelGrid base = with_base ? base_plate(raw, spec.base_height) : VoxelGrid{};

  const SolidMode mode = solid_mode(spec, raw, with_base ? &base : nullptr, result.solve);
  const VoxelGrid lattice = transform_inside_negative(raw, mode);
  result.solid = with_base ? union_min(lattice, base) : lattice;

  TriangleMesh mesh = cap_boundary(result.solid, marching_cubes(result.solid));
  result.mesh = weld_and_clean(mesh);

  MeshReport& report = result.report;
  report = measure_mesh(result.mesh);
  report.overhang_area_fraction = overhang_fraction(result.mesh, kOverhangThresholdDeg);
  report.relative_density = relative_density(result.solid);
  // Wall thickness is a property of the lattice; the base would dominate it.
  report.min_wall_mm = min_wall(lattice);
  report.warnings = validate_constraints(result, spec);

  if (!report.watertight) {
    const TopologyReport topo = topology_check(result.mesh);
    throw Error(ErrorCode::NotWatertight,
                "brick mesh failed the closure check (" + std::to_string(topo.boundary_edges) +
                    " open edges, " + std::to_string(topo.non_manifold_edges) + " non-manifold edges)");
  }
  return result;
}

SolveResult solve_brick(const BrickSpec& spec) {
  spec.validate();
  if (spec.mode.kind != ModeSpec::Kind::density && spec.mode.kind != ModeSpec::Kind::wall) {
    throw Error(ErrorCode::InvalidSpec, "solve needs a density or wall target");
  }
  const VoxelGrid raw = sample(spec.field, spec.domain(), spec.resolved_resolution());
  const bool with_base = spec.base_height > 0.0;
  const VoxelGrid base = with_base ? base_plate(raw, spec.base_height) : VoxelGrid{};
  std::optional<SolveResult> solve;
  solid_mode(spec, raw, with_base ? &base : nullptr, solve);
  return *solve;
}

std::vector<std::string> validate_constraints(const BrickResult& result, const BrickSpec& spec) {
  std::vector<std::string> warnings;
  const MeshReport& r = result.report;
  if (r.min_wall_mm && *r.min_wall_mm < 2.0 * spec.nozzle_mm) warnings.emplace_back(warning::kThinWall);
  if (r.overhang_area_fraction > kOverhangLimit) warnings.emplace_back(warning::kOverhang);
  if (r.component_count > 1) warnings.emplace_back(warning::kMultiComponent);
  if (!result.mesh.vertices.empty()) {
    const BoundingBox box = bounding_box(result.mesh);
    const double slack = 1e-9 * std::max(1.0, spec.domain_size.maxCoeff());
    if ((box.min.array() < -slack).any() || ((box.max - spec.domain_size).array() > slack).any()) {
      warnings.emplace_back(warning::kEnvelope);
    }
  }
  if (!r.watertight) warnings.emplace_back(warning::kNotWatertight);
  return warnings;
}

}  // namespace tpms
