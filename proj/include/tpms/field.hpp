#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string_view>

#include <Eigen/Dense>

namespace tpms {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
using Vec3 = Vector3<double>;
using Vec3i = Eigen::Vector3i;

enum class SurfaceKind {
  gyroid,
  diamond,
  schwarz_p,
  neovius,
  lidinoid,
  split_p,
  d_prime,
  double_gyroid,
  iwp,
  pw_hybrid,
  scherk_1,
  scherk_2,
  skeletal_1,
  skeletal_2,
  skeletal_3,
  skeletal_4,
};

inline constexpr std::array<SurfaceKind, 16> kAllSurfaces = {
    SurfaceKind::gyroid,     SurfaceKind::diamond,       SurfaceKind::schwarz_p,
    SurfaceKind::neovius,    SurfaceKind::lidinoid,      SurfaceKind::split_p,
    SurfaceKind::d_prime,    SurfaceKind::double_gyroid, SurfaceKind::iwp,
    SurfaceKind::pw_hybrid,  SurfaceKind::scherk_1,      SurfaceKind::scherk_2,
    SurfaceKind::skeletal_1, SurfaceKind::skeletal_2,    SurfaceKind::skeletal_3,
    SurfaceKind::skeletal_4,
};

std::string_view surface_name(SurfaceKind kind);
std::optional<SurfaceKind> parse_surface(std::string_view name);

enum class Symmetry { none, odd_inversion, odd_half_translation };

struct SymmetryInfo {
  Symmetry symmetry = Symmetry::none;
  bool triply_periodic = true;
};

std::string_view symmetry_name(Symmetry symmetry);
SymmetryInfo symmetry_descriptor(SurfaceKind kind);

/// A nodal surface placed in space. Positions are millimetres; one period of
/// the surface spans `period_length` along each axis.
struct FieldSpec {
  SurfaceKind kind = SurfaceKind::gyroid;
  Vec3 period_length = Vec3::Constant(50.0);
  Vec3 phase_offset = Vec3::Zero();
  /// Strut radius of the skeletal kinds, as a fraction of the period.
  double strut_radius = 0.2;

  /// Throws Error(InvalidSpec) on non-positive periods or a bad strut radius.
  void validate() const;
};

/// Value and gradient with respect to the kind's normalized coordinates.
struct FieldSample {
  double value = 0.0;
  Vec3 gradient = Vec3::Zero();
};

double evaluate(const FieldSpec& spec, const Vec3& point);
/// Spatial gradient (per millimetre).
Vec3 gradient(const FieldSpec& spec, const Vec3& point);
FieldSample sample_field(const FieldSpec& spec, const Vec3& point);

/// Derivative of each normalized coordinate with respect to position.
Vec3 normalization_scale(const FieldSpec& spec);

namespace nodal {

template <typename Scalar>
struct AxisTrig {
  Scalar s1, c1, s2, c2;

  explicit AxisTrig(Scalar u)
      : s1(std::sin(u)), c1(std::cos(u)), s2(std::sin(Scalar(2) * u)), c2(std::cos(Scalar(2) * u)) {}
};

// Every trigonometric kind is invariant under the cyclic relabelling
// x -> y -> z -> x, so one partial derivative generates the other two.

/// gyroid: sin x cos y + sin y cos z + sin z cos x
/// schwarz_p: cos x + cos y + cos z
/// diamond: sin x sin y sin z + sin x cos y cos z + cos x sin y cos z + cos x cos y sin z
/// neovius: 3(cos x + cos y + cos z) + 4 cos x cos y cos z
/// iwp: 2(cos x cos y + cos y cos z + cos z cos x) - (cos 2x + cos 2y + cos 2z)
/// lidinoid: 0.5(sin 2x cos y sin z + sin 2y cos z sin x + sin 2z cos x sin y)
///           - 0.5(cos 2x cos 2y + cos 2y cos 2z + cos 2z cos 2x) + 0.15
/// split_p: 1.1(sin 2x sin z cos y + sin 2y sin x cos z + sin 2z sin y cos x)
///          - 0.2(cos 2x cos 2y + cos 2y cos 2z + cos 2z cos 2x) - 0.4(cos 2x + cos 2y + cos 2z)
/// double_gyroid: 2.75(sin 2x sin z cos y + sin 2y sin x cos z + sin 2z sin y cos x)
///                - (cos 2x cos 2y + cos 2y cos 2z + cos 2z cos 2x)
/// d_prime: 0.5(sin x sin y sin z + cos x cos y cos z)
///          - 0.5(cos 2x cos 2y + cos 2y cos 2z + cos 2z cos 2x) - 0.2
/// pw_hybrid: 4(cos x cos y + cos y cos z + cos z cos x) - 3 cos x cos y cos z + 2.4
template <typename Scalar>
Scalar value(SurfaceKind kind, const AxisTrig<Scalar>& x, const AxisTrig<Scalar>& y,
             const AxisTrig<Scalar>& z) {
  const Scalar double_pairs = x.c2 * y.c2 + y.c2 * z.c2 + z.c2 * x.c2;
  switch (kind) {
    case SurfaceKind::gyroid:
      return x.s1 * y.c1 + y.s1 * z.c1 + z.s1 * x.c1;
    case SurfaceKind::schwarz_p:
      return x.c1 + y.c1 + z.c1;
    case SurfaceKind::diamond:
      return x.s1 * y.s1 * z.s1 + x.s1 * y.c1 * z.c1 + x.c1 * y.s1 * z.c1 + x.c1 * y.c1 * z.s1;
    case SurfaceKind::neovius:
      return Scalar(3) * (x.c1 + y.c1 + z.c1) + Scalar(4) * x.c1 * y.c1 * z.c1;
    case SurfaceKind::iwp:
      return Scalar(2) * (x.c1 * y.c1 + y.c1 * z.c1 + z.c1 * x.c1) - (x.c2 + y.c2 + z.c2);
    case SurfaceKind::lidinoid:
      return Scalar(0.5) * (x.s2 * y.c1 * z.s1 + y.s2 * z.c1 * x.s1 + z.s2 * x.c1 * y.s1) -
             Scalar(0.5) * double_pairs + Scalar(0.15);
    case SurfaceKind::split_p:
      return Scalar(1.1) * (x.s2 * z.s1 * y.c1 + y.s2 * x.s1 * z.c1 + z.s2 * y.s1 * x.c1) -
             Scalar(0.2) * double_pairs - Scalar(0.4) * (x.c2 + y.c2 + z.c2);
    case SurfaceKind::double_gyroid:
      return Scalar(2.75) * (x.s2 * z.s1 * y.c1 + y.s2 * x.s1 * z.c1 + z.s2 * y.s1 * x.c1) -
             double_pairs;
    case SurfaceKind::d_prime:
      return Scalar(0.5) * (x.s1 * y.s1 * z.s1 + x.c1 * y.c1 * z.c1) - Scalar(0.5) * double_pairs -
             Scalar(0.2);
    case SurfaceKind::pw_hybrid:
      return Scalar(4) * (x.c1 * y.c1 + y.c1 * z.c1 + z.c1 * x.c1) -
             Scalar(3) * x.c1 * y.c1 * z.c1 + Scalar(2.4);
    default:
      return Scalar(0);
  }
}

/// Partial derivative with respect to the first argument's angle.
template <typename Scalar>
Scalar d_first(SurfaceKind kind, const AxisTrig<Scalar>& x, const AxisTrig<Scalar>& y,
               const AxisTrig<Scalar>& z) {
  switch (kind) {
    case SurfaceKind::gyroid:
      return x.c1 * y.c1 - z.s1 * x.s1;
    case SurfaceKind::schwarz_p:
      return -x.s1;
    case SurfaceKind::diamond:
      return x.c1 * y.s1 * z.s1 + x.c1 * y.c1 * z.c1 - x.s1 * y.s1 * z.c1 - x.s1 * y.c1 * z.s1;
    case SurfaceKind::neovius:
      return Scalar(-3) * x.s1 - Scalar(4) * x.s1 * y.c1 * z.c1;
    case SurfaceKind::iwp:
      return Scalar(-2) * x.s1 * (y.c1 + z.c1) + Scalar(2) * x.s2;
    case SurfaceKind::lidinoid:
      return Scalar(0.5) * (Scalar(2) * x.c2 * y.c1 * z.s1 + y.s2 * z.c1 * x.c1 - z.s2 * x.s1 * y.s1) +
             x.s2 * (y.c2 + z.c2);
    case SurfaceKind::split_p:
      return Scalar(1.1) * (Scalar(2) * x.c2 * z.s1 * y.c1 + y.s2 * x.c1 * z.c1 - z.s2 * y.s1 * x.s1) +
             Scalar(0.4) * x.s2 * (y.c2 + z.c2) + Scalar(0.8) * x.s2;
    case SurfaceKind::double_gyroid:
      return Scalar(2.75) * (Scalar(2) * x.c2 * z.s1 * y.c1 + y.s2 * x.c1 * z.c1 - z.s2 * y.s1 * x.s1) +
             Scalar(2) * x.s2 * (y.c2 + z.c2);
    case SurfaceKind::d_prime:
      return Scalar(0.5) * (x.c1 * y.s1 * z.s1 - x.s1 * y.c1 * z.c1) + x.s2 * (y.c2 + z.c2);
    case SurfaceKind::pw_hybrid:
      return Scalar(-4) * x.s1 * (y.c1 + z.c1) + Scalar(3) * x.s1 * y.c1 * z.c1;
    default:
      return Scalar(0);
  }
}

inline constexpr bool is_trigonometric(SurfaceKind kind) {
  return kind != SurfaceKind::scherk_1 && kind != SurfaceKind::scherk_2 &&
         kind != SurfaceKind::skeletal_1 && kind != SurfaceKind::skeletal_2 &&
         kind != SurfaceKind::skeletal_3 && kind != SurfaceKind::skeletal_4;
}

template <typename Scalar>
Scalar value(SurfaceKind kind, const Vector3<Scalar>& u) {
  return value(kind, AxisTrig<Scalar>(u.x()), AxisTrig<Scalar>(u.y()), AxisTrig<Scalar>(u.z()));
}

template <typename Scalar>
Vector3<Scalar> gradient(SurfaceKind kind, const Vector3<Scalar>& u) {
  const AxisTrig<Scalar> x(u.x()), y(u.y()), z(u.z());
  return {d_first(kind, x, y, z), d_first(kind, y, z, x), d_first(kind, z, x, y)};
}

}  // namespace nodal
}  // namespace tpms
