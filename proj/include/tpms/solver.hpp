#pragma once

#include <optional>

#include "json.hpp"
#include "tpms/field.hpp"
#include "tpms/grid.hpp"

namespace tpms {

struct SolveResult {
  double t = 0.0;
  double achieved = 0.0;
  int iterations = 0;
  bool converged = false;
};

nlohmann::json to_json(const SolveResult& result);

inline constexpr double kDefaultDensityTolerance = 0.005;
inline constexpr int kMaxBisectionSteps = 60;
inline constexpr int kMonotonicitySweep = 9;

/// Bisection on the iso-level of `raw` (the untransformed field samples) until
/// the solid's relative density is within `tol` of `target`. When `solid_floor`
/// is given it is unioned into the solid before measuring, so the target
/// covers the whole part. The grid is sampled once; only t changes.
SolveResult solve_iso_for_density(const VoxelGrid& raw, SolidMode::Kind mode, double target,
                                  double tol = kDefaultDensityTolerance,
                                  const VoxelGrid* solid_floor = nullptr);

SolveResult solve_iso_for_density(const FieldSpec& field, const Domain& domain, const Vec3i& dims,
                                  SolidMode::Kind mode, double target,
                                  double tol = kDefaultDensityTolerance);

/// Smallest sheet thickness whose min_wall reaches `target_wall` (mm).
/// `tol` defaults to one grid pitch, the resolution of the wall estimate.
SolveResult solve_thickness_for_wall(const VoxelGrid& raw, double target_wall,
                                     std::optional<double> tol = std::nullopt);

SolveResult solve_thickness_for_wall(const FieldSpec& field, const Domain& domain, const Vec3i& dims,
                                     double target_wall, std::optional<double> tol = std::nullopt);

}  // namespace tpms
