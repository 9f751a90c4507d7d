#include "tpms/field.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "tpms/error.hpp"

namespace tpms {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Segment {
  Vec3 a;
  Vec3 b;
};

// Strut graphs of the skeletal kinds, in fractional cell coordinates.
std::vector<Segment> simple_cubic_struts() {
  return {{Vec3(0, 0, 0), Vec3(1, 0, 0)}, {Vec3(0, 0, 0), Vec3(0, 1, 0)}, {Vec3(0, 0, 0), Vec3(0, 0, 1)}};
}

std::vector<Segment> body_centered_struts() {
  std::vector<Segment> out;
  const Vec3 center(0.5, 0.5, 0.5);
  for (int corner = 0; corner < 8; ++corner) {
    out.push_back({center, Vec3(corner & 1, (corner >> 1) & 1, (corner >> 2) & 1)});
  }
  return out;
}

const std::array<Vec3, 4> kFccBasis = {Vec3(0, 0, 0), Vec3(0, 0.5, 0.5), Vec3(0.5, 0, 0.5),
                                       Vec3(0.5, 0.5, 0)};

std::vector<Segment> diamond_struts() {
  const std::array<Vec3, 4> bonds = {Vec3(-0.25, -0.25, -0.25), Vec3(0.25, 0.25, -0.25),
                                     Vec3(0.25, -0.25, 0.25), Vec3(-0.25, 0.25, 0.25)};
  std::vector<Segment> out;
  for (const Vec3& site : kFccBasis) {
    const Vec3 b = site + Vec3::Constant(0.25);
    for (const Vec3& d : bonds) out.push_back({b, b + d});
  }
  return out;
}

std::vector<Segment> octet_struts() {
  const std::array<Vec3, 6> bonds = {Vec3(0.5, 0.5, 0),  Vec3(0.5, -0.5, 0), Vec3(0.5, 0, 0.5),
                                     Vec3(0.5, 0, -0.5), Vec3(0, 0.5, 0.5),  Vec3(0, 0.5, -0.5)};
  std::vector<Segment> out;
  for (const Vec3& site : kFccBasis) {
    for (const Vec3& d : bonds) out.push_back({site, site + d});
  }
  return out;
}

std::span<const Segment> struts_for(SurfaceKind kind) {
  static const std::vector<Segment> sc = simple_cubic_struts();
  static const std::vector<Segment> bcc = body_centered_struts();
  static const std::vector<Segment> dia = diamond_struts();
  static const std::vector<Segment> oct = octet_struts();
  switch (kind) {
    case SurfaceKind::skeletal_1: return sc;
    case SurfaceKind::skeletal_2: return bcc;
    case SurfaceKind::skeletal_3: return dia;
    default: return oct;
  }
}

double box_distance_sq(const Vec3& p, const Vec3& lo, const Vec3& hi) {
  const Vec3 d = (lo - p).cwiseMax(p - hi).cwiseMax(0.0);
  return d.squaredNorm();
}

// Distance from a fractional point to the periodic strut graph; `direction`
// receives the unit vector from the nearest strut point towards the query.
double strut_distance(std::span<const Segment> struts, const Vec3& frac, Vec3& direction) {
  const Vec3 cell = frac.array() - frac.array().floor();
  double best = std::numeric_limits<double>::infinity();
  Vec3 best_offset = Vec3::Zero();
  for (int dz = -1; dz <= 1; ++dz) {
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const Vec3 shift(dx, dy, dz);
        for (const Segment& s : struts) {
          const Vec3 a = s.a + shift;
          const Vec3 b = s.b + shift;
          if (box_distance_sq(cell, a.cwiseMin(b), a.cwiseMax(b)) >= best) continue;
          const Vec3 ab = b - a;
          const double t = std::clamp((cell - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
          const Vec3 offset = cell - (a + t * ab);
          const double d2 = offset.squaredNorm();
          if (d2 < best) {
            best = d2;
            best_offset = offset;
          }
        }
      }
    }
  }
  const double dist = std::sqrt(best);
  direction = dist > 0.0 ? Vec3(best_offset / dist) : Vec3::Zero();
  return dist;
}

bool is_skeletal(SurfaceKind kind) {
  return kind == SurfaceKind::skeletal_1 || kind == SurfaceKind::skeletal_2 ||
         kind == SurfaceKind::skeletal_3 || kind == SurfaceKind::skeletal_4;
}

}  // namespace

std::string_view surface_name(SurfaceKind kind) {
  switch (kind) {
    case SurfaceKind::gyroid: return "gyroid";
    case SurfaceKind::diamond: return "diamond";
    case SurfaceKind::schwarz_p: return "schwarz_p";
    case SurfaceKind::neovius: return "neovius";
    case SurfaceKind::lidinoid: return "lidinoid";
    case SurfaceKind::split_p: return "split_p";
    case SurfaceKind::d_prime: return "d_prime";
    case SurfaceKind::double_gyroid: return "double_gyroid";
    case SurfaceKind::iwp: return "iwp";
    case SurfaceKind::pw_hybrid: return "pw_hybrid";
    case SurfaceKind::scherk_1: return "scherk_1";
    case SurfaceKind::scherk_2: return "scherk_2";
    case SurfaceKind::skeletal_1: return "skeletal_1";
    case SurfaceKind::skeletal_2: return "skeletal_2";
    case SurfaceKind::skeletal_3: return "skeletal_3";
    case SurfaceKind::skeletal_4: return "skeletal_4";
  }
  return "unknown";
}

std::optional<SurfaceKind> parse_surface(std::string_view name) {
  for (SurfaceKind kind : kAllSurfaces) {
    if (surface_name(kind) == name) return kind;
  }
  return std::nullopt;
}

std::string_view symmetry_name(Symmetry symmetry) {
  switch (symmetry) {
    case Symmetry::odd_inversion: return "odd_inversion";
    case Symmetry::odd_half_translation: return "odd_half_translation";
    case Symmetry::none: break;
  }
  return "none";
}

SymmetryInfo symmetry_descriptor(SurfaceKind kind) {
  switch (kind) {
    case SurfaceKind::gyroid:
    case SurfaceKind::diamond:
      return {Symmetry::odd_inversion, true};
    case SurfaceKind::schwarz_p:
    case SurfaceKind::neovius:
      return {Symmetry::odd_half_translation, true};
    case SurfaceKind::scherk_1:
    case SurfaceKind::scherk_2:
      return {Symmetry::none, false};
    default:
      return {Symmetry::none, true};
  }
}

void FieldSpec::validate() const {
  if (!period_length.allFinite() || (period_length.array() <= 0.0).any()) {
    throw Error(ErrorCode::InvalidSpec, "period_length must be finite and strictly positive");
  }
  if (!phase_offset.allFinite()) {
    throw Error(ErrorCode::InvalidSpec, "phase_offset must be finite");
  }
  if (!std::isfinite(strut_radius) || strut_radius <= 0.0) {
    throw Error(ErrorCode::InvalidSpec, "strut_radius must be positive");
  }
}

Vec3 normalization_scale(const FieldSpec& spec) {
  const Vec3 inv = spec.period_length.cwiseInverse();
  switch (spec.kind) {
    case SurfaceKind::scherk_1:
      return Vec3(kTwoPi * inv.x(), kTwoPi * inv.y(), inv.z());
    case SurfaceKind::scherk_2:
      return Vec3(inv.x(), inv.y(), kTwoPi * inv.z());
    default:
      return is_skeletal(spec.kind) ? inv : Vec3(kTwoPi * inv);
  }
}

FieldSample sample_field(const FieldSpec& spec, const Vec3& point) {
  // Fractional position within the period lattice; the trigonometric
  // coordinates are this times 2*pi.
  const Vec3 frac = point.cwiseQuotient(spec.period_length) + spec.phase_offset;
  FieldSample out;
  switch (spec.kind) {
    case SurfaceKind::scherk_1: {
      const double ux = kTwoPi * frac.x();
      const double uy = kTwoPi * frac.y();
      const double ez = std::exp(frac.z());
      out.value = ez * std::cos(ux) - std::cos(uy);
      out.gradient = Vec3(-ez * std::sin(ux), std::sin(uy), ez * std::cos(ux));
      return out;
    }
    case SurfaceKind::scherk_2: {
      const double uz = kTwoPi * frac.z();
      const double shx = std::sinh(frac.x());
      const double shy = std::sinh(frac.y());
      out.value = std::sin(uz) - shx * shy;
      out.gradient = Vec3(-std::cosh(frac.x()) * shy, -shx * std::cosh(frac.y()), std::cos(uz));
      return out;
    }
    default:
      break;
  }
  if (is_skeletal(spec.kind)) {
    Vec3 direction;
    out.value = strut_distance(struts_for(spec.kind), frac, direction) - spec.strut_radius;
    out.gradient = direction;
    return out;
  }
  const Vec3 u = kTwoPi * frac;
  out.value = nodal::value(spec.kind, u);
  out.gradient = nodal::gradient(spec.kind, u);
  return out;
}

double evaluate(const FieldSpec& spec, const Vec3& point) {
  if (nodal::is_trigonometric(spec.kind)) {
    const Vec3 u = kTwoPi * (point.cwiseQuotient(spec.period_length) + spec.phase_offset);
    return nodal::value(spec.kind, u);
  }
  return sample_field(spec, point).value;
}

Vec3 gradient(const FieldSpec& spec, const Vec3& point) {
  return sample_field(spec, point).gradient.cwiseProduct(normalization_scale(spec));
}

}  // namespace tpms
