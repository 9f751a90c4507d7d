#include "tpms/grid.hpp"

#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>

namespace tpms {

void Domain::validate() const {
  if (!min_corner.allFinite() || !max_corner.allFinite() ||
      !(max_corner.array() > min_corner.array()).all()) {
    throw Error(ErrorCode::InvalidArgument, "domain max_corner must exceed min_corner on every axis");
  }
}

std::uint64_t max_voxels() {
  if (const char* env = std::getenv("TPMS_FORGE_MAX_VOXELS")) {
    char* end = nullptr;
    const unsigned long long parsed = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && parsed > 0) return parsed;
  }
  return kDefaultMaxVoxels;
}

void check_dims(const Vec3i& dims, std::uint64_t cap) {
  if ((dims.array() < 2).any()) {
    throw Error(ErrorCode::InvalidArgument, "grid needs at least 2 samples per axis");
  }
  const std::uint64_t count = static_cast<std::uint64_t>(dims.x()) *
                              static_cast<std::uint64_t>(dims.y()) *
                              static_cast<std::uint64_t>(dims.z());
  if (count > cap) {
    throw Error(ErrorCode::CapExceeded, std::to_string(count) + " samples exceed the cap of " +
                                            std::to_string(cap));
  }
}

VoxelGrid sample(const ScalarField& field, const Domain& domain, const Vec3i& dims,
                 std::uint64_t cap) {
  domain.validate();
  check_dims(dims, cap);

  VoxelGrid grid;
  grid.dims = dims;
  grid.origin = domain.min_corner;
  grid.spacing = domain.size().cwiseQuotient((dims - Vec3i::Ones()).cast<double>());
  grid.values.resize(static_cast<std::size_t>(dims.x()) * dims.y() * dims.z());

  const int slabs = dims.z();
  const int workers =
      std::clamp(static_cast<int>(std::thread::hardware_concurrency()), 1, std::max(1, slabs));

  std::mutex error_mutex;
  std::exception_ptr first_error;
  bool non_finite = false;

  auto run = [&](int worker) {
    try {
      for (int k = worker; k < slabs; k += workers) {
        for (int j = 0; j < dims.y(); ++j) {
          for (int i = 0; i < dims.x(); ++i) {
            const double v = field(grid.position(i, j, k));
            if (!std::isfinite(v)) {
              std::lock_guard lock(error_mutex);
              non_finite = true;
              return;
            }
            grid.values[grid.index(i, j, k)] = v;
          }
        }
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };

  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(run, w);
  }

  if (first_error) std::rethrow_exception(first_error);
  if (non_finite) throw Error(ErrorCode::NonFinite, "field returned a non-finite sample");
  return grid;
}

VoxelGrid sample(const FieldSpec& spec, const Domain& domain, const Vec3i& dims, std::uint64_t cap) {
  spec.validate();
  return sample([&spec](const Vec3& p) { return evaluate(spec, p); }, domain, dims, cap);
}

VoxelGrid transform_inside_negative(const VoxelGrid& grid, const SolidMode& mode) {
  if (!std::isfinite(mode.t)) {
    throw Error(ErrorCode::InvalidThickness, "iso-level must be finite");
  }
  if (mode.kind == SolidMode::Kind::sheet && mode.t <= 0.0) {
    throw Error(ErrorCode::InvalidThickness, "sheet thickness must be positive");
  }
  VoxelGrid out = grid;
  if (mode.kind == SolidMode::Kind::network) {
    for (double& v : out.values) v -= mode.t;
  } else {
    for (double& v : out.values) v = std::abs(v) - mode.t;
  }
  return out;
}

VoxelGrid union_min(const VoxelGrid& a, const VoxelGrid& b) {
  if (a.dims != b.dims || a.origin != b.origin || a.spacing != b.spacing ||
      a.values.size() != b.values.size()) {
    throw Error(ErrorCode::GridMismatch, "union_min needs grids with identical geometry");
  }
  VoxelGrid out = a;
  for (std::size_t n = 0; n < out.values.size(); ++n) out.values[n] = std::min(a.values[n], b.values[n]);
  return out;
}

}  // namespace tpms
