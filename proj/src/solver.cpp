#include "tpms/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "tpms/metrics.hpp"

namespace tpms {
namespace {

using Objective = std::function<double(double)>;

struct Bracket {
  double lo;
  double hi;
};

// Objectives here are step functions of t, so the check is a plain ordering
// test on an evenly spaced sweep.
void require_monotone(const Objective& objective, const Bracket& b, const char* what) {
  double previous = -std::numeric_limits<double>::infinity();
  for (int n = 0; n < kMonotonicitySweep; ++n) {
    const double t = b.lo + (b.hi - b.lo) * n / (kMonotonicitySweep - 1);
    const double value = objective(t);
    if (value < previous) {
      std::ostringstream msg;
      msg << what << " decreases between sweep points " << n - 1 << " and " << n << " (t = " << t
          << ", " << previous << " -> " << value << ")";
      throw Error(ErrorCode::NonMonotone, msg.str());
    }
    previous = value;
  }
}

double max_abs(const VoxelGrid& grid) {
  double m = 0.0;
  for (double v : grid.values) m = std::max(m, std::abs(v));
  return m;
}

double density_at(const VoxelGrid& raw, SolidMode::Kind mode, double t, const VoxelGrid* solid_floor) {
  VoxelGrid solid = transform_inside_negative(raw, {mode, t});
  if (solid_floor) solid = union_min(solid, *solid_floor);
  return relative_density(solid);
}

}  // namespace

nlohmann::json to_json(const SolveResult& r) {
  return {{"t", r.t}, {"achieved", r.achieved}, {"iterations", r.iterations}, {"converged", r.converged}};
}

SolveResult solve_iso_for_density(const VoxelGrid& raw, SolidMode::Kind mode, double target, double tol,
                                  const VoxelGrid* solid_floor) {
  if (!(target > 0.0 && target < 1.0)) {
    throw Error(ErrorCode::TargetUnreachable, "density target must lie in (0, 1)");
  }
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  if (raw.values.empty()) throw Error(ErrorCode::InvalidArgument, "empty grid");

  Bracket bracket;
  if (mode == SolidMode::Kind::network) {
    const auto [lo, hi] = std::minmax_element(raw.values.begin(), raw.values.end());
    bracket = {*lo, *hi};
  } else {
    const double top = max_abs(raw);
    if (top <= 0.0) throw Error(ErrorCode::TargetUnreachable, "field is identically zero");
    // Sheet thickness must stay positive; start just above zero.
    bracket = {top * 1e-12, top};
  }
  const Objective density = [&](double t) { return density_at(raw, mode, t, solid_floor); };

  const double d_lo = density(bracket.lo);
  const double d_hi = density(bracket.hi);
  if (target < d_lo || target > d_hi) {
    std::ostringstream msg;
    msg << "target " << target << " outside reachable density range [" << d_lo << ", " << d_hi << "]";
    throw Error(ErrorCode::TargetUnreachable, msg.str());
  }
  require_monotone(density, bracket, "relative density");

  SolveResult best{bracket.lo, d_lo, 0, false};
  auto consider = [&](double t, double d) {
    if (std::abs(d - target) < std::abs(best.achieved - target)) {
      best.t = t;
      best.achieved = d;
    }
  };
  consider(bracket.hi, d_hi);
  if (std::abs(best.achieved - target) <= tol) {
    best.converged = true;
    return best;
  }

  double lo = bracket.lo;
  double hi = bracket.hi;
  for (int step = 1; step <= kMaxBisectionSteps; ++step) {
    const double mid = 0.5 * (lo + hi);
    const double d = density(mid);
    best.iterations = step;
    consider(mid, d);
    if (std::abs(d - target) <= tol) {
      best.t = mid;
      best.achieved = d;
      best.converged = true;
      return best;
    }
    (d < target ? lo : hi) = mid;
  }
  return best;
}

SolveResult solve_iso_for_density(const FieldSpec& field, const Domain& domain, const Vec3i& dims,
                                  SolidMode::Kind mode, double target, double tol) {
  return solve_iso_for_density(sample(field, domain, dims), mode, target, tol);
}

SolveResult solve_thickness_for_wall(const VoxelGrid& raw, double target_wall, std::optional<double> tol) {
  const double pitch = raw.pitch();
  if (!(target_wall > 0.0) || target_wall < 2.0 * pitch) {
    std::ostringstream msg;
    msg << "target wall " << target_wall << " mm is below twice the grid pitch (" << pitch << " mm)";
    throw Error(ErrorCode::ResolutionTooCoarse, msg.str());
  }
  const double tolerance = tol.value_or(pitch);
  if (!(tolerance > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");

  const double top = max_abs(raw);
  if (top <= 0.0) throw Error(ErrorCode::TargetUnreachable, "field is identically zero");
  const Bracket bracket{top * 1e-12, top};
  const Objective wall = [&](double t) {
    return min_wall(transform_inside_negative(raw, SolidMode::sheet(t)));
  };

  const double w_hi = wall(bracket.hi);
  if (w_hi < target_wall) {
    std::ostringstream msg;
    msg << "thickest sheet only reaches " << w_hi << " mm";
    throw Error(ErrorCode::TargetUnreachable, msg.str());
  }
  require_monotone(wall, bracket, "min wall");

  // Invariant: wall(lo) < target <= wall(hi). The estimate moves in whole
  // voxels, so run the bracket down and report its upper end.
  double lo = bracket.lo;
  double hi = bracket.hi;
  double w_at_hi = w_hi;
  double w_at_lo = wall(lo);
  SolveResult result;
  if (w_at_lo >= target_wall) {
    hi = lo;
    w_at_hi = w_at_lo;
  } else {
    for (int step = 1; step <= kMaxBisectionSteps; ++step) {
      const double mid = 0.5 * (lo + hi);
      const double w = wall(mid);
      result.iterations = step;
      if (w >= target_wall) {
        hi = mid;
        w_at_hi = w;
      } else {
        lo = mid;
        w_at_lo = w;
      }
      if (hi - lo <= 1e-9 * top) break;
    }
  }
  result.t = hi;
  result.achieved = w_at_hi;
  result.converged = std::abs(w_at_hi - target_wall) <= tolerance;
  if (!result.converged && lo < hi && std::abs(w_at_lo - target_wall) <= tolerance) {
    // The next voxel step up overshoots; the one below is inside tolerance.
    result.t = lo;
    result.achieved = w_at_lo;
    result.converged = true;
  }
  return result;
}

SolveResult solve_thickness_for_wall(const FieldSpec& field, const Domain& domain, const Vec3i& dims,
                                     double target_wall, std::optional<double> tol) {
  return solve_thickness_for_wall(sample(field, domain, dims), target_wall, tol);
}

}  // namespace tpms
