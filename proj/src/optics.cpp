#include "pev/optics.hpp"

#include <cmath>

namespace pev {

void GeometrySpec::validate() const {
  if (!(screen_distance > 0.0)) throw std::invalid_argument("geometry: X must be > 0");
  if (kind == GeometryKind::Biprism) {
    if (!(apex_x > 0.0 && apex_x < screen_distance))
      throw std::invalid_argument("geometry: biprism apex must satisfy 0 < X' < X");
    if (!(summit_angle > 0.0 && summit_angle < kPi / 2))
      throw std::invalid_argument("geometry: biprism summit angle must be in (0, pi/2)");
    if (!(refractive_index > 1.0))
      throw std::invalid_argument("geometry: biprism index must exceed 1");
  }
  if (kind == GeometryKind::SphericalScreen3D) {
    if (!(band_half_sin > 0.0 && band_half_sin <= 1.0))
      throw std::invalid_argument("geometry: band must be in (0, 1]");
  }
}

Arrival propagate_circular(double y, double beta, double X) {
  const double z = y / X;
  const double cb = std::cos(beta);
  const double sb = std::sin(beta);
  const double disc = 1.0 - z * z * cb * cb;
  if (!(std::fabs(z) < 1.0) || disc < 0.0)
    throw GeometryViolation("propagate_circular: source outside the screen circle");
  const double sin_theta = z * cb * cb + sb * std::sqrt(disc);
  const double theta = std::asin(std::fmin(1.0, std::fmax(-1.0, sin_theta)));
  // Travel distance = chord from (0, y) to the landing point at angle theta.
  const double s = X * std::sqrt(1.0 - 2.0 * z * sin_theta + z * z);
  return {theta, s / kSpeedOfLight, 0.0};
}

Arrival propagate_flat(double y, double beta, double X) {
  if (!(std::fabs(beta) < kPi / 2))
    throw GeometryViolation("propagate_flat: ray parallel to or away from the screen");
  const double landing = X * std::tan(beta) + y;
  const double s = X / std::cos(beta);
  return {landing, s / kSpeedOfLight, 0.0};
}

Arrival propagate_spherical(double y, double z, const std::array<double, 3>& dir, double X) {
  if (!(dir[0] > 0.0)) throw GeometryViolation("propagate_spherical: direction must point forward");
  if (!(y * y + z * z < X * X))
    throw GeometryViolation("propagate_spherical: source outside the screen sphere");
  // |origin + t*dir| = X with |dir| = 1; origin inside guarantees one t > 0.
  const double b = y * dir[1] + z * dir[2];
  const double c = y * y + z * z - X * X;
  const double t = -b + std::sqrt(b * b - c);
  const double lx = t * dir[0];
  const double ly = y + t * dir[1];
  const double lz = z + t * dir[2];
  // Landing angle within the source-separation plane: equals the signed
  // zenith for in-plane arrivals and stays well defined on the axis, where
  // the raw zenith would be dominated by the off-plane elevation.
  const double position = std::atan2(ly, lx);
  return {position, t / kSpeedOfLight, std::fabs(lz) / X};
}

Arrival propagate_biprism(double y, double beta, const GeometrySpec& spec) {
  const double X = spec.screen_distance;
  const double Xp = spec.apex_x;
  const double n = spec.refractive_index;
  const double tan_half = std::tan(spec.summit_angle / 2);
  const double tb = std::tan(beta);

  // Exit point on the face the ray actually crosses: upper face for rays
  // heading into y > 0, lower face otherwise; the apex ray takes the upper
  // branch by convention.
  double exit_x, exit_y;
  int branch;  // +1 upper, -1 lower
  {
    const double xu = (Xp - y * tan_half) / (1.0 + tb * tan_half);
    const double yu = (y + Xp * tb) / (1.0 + tb * tan_half);
    const double xl = (Xp + y * tan_half) / (1.0 - tb * tan_half);
    const double yl = (y + Xp * tb) / (1.0 - tb * tan_half);
    const bool upper_ok = xu <= Xp && yu >= 0.0;
    const bool lower_ok = xl <= Xp && yl <= 0.0;
    if (upper_ok) {
      exit_x = xu;
      exit_y = yu;
      branch = +1;
    } else if (lower_ok) {
      exit_x = xl;
      exit_y = yl;
      branch = -1;
    } else {
      throw GeometryViolation("propagate_biprism: ray does not cross a biprism face");
    }
  }
  if (!(exit_x > 0.0)) throw GeometryViolation("propagate_biprism: ray exits behind the source plane");

  // Tangential velocity is continuous across the face (Snell).
  const double half = spec.summit_angle / 2;
  const double sin_ref = n * std::sin(beta - branch * half);
  if (std::fabs(sin_ref) > 1.0)
    throw TotalInternalReflection("propagate_biprism: total internal reflection at the face");
  const double beta_out = branch * half + std::asin(sin_ref);

  const double landing = (X - exit_x) * std::tan(beta_out) + exit_y;
  const double tof = (n * exit_x / std::cos(beta) + (X - exit_x) / std::cos(beta_out)) / kSpeedOfLight;
  return {landing, tof, 0.0};
}

Arrival propagate(const Messenger& m, const GeometrySpec& spec) {
  switch (spec.kind) {
    case GeometryKind::CircularScreen2D:
      return propagate_circular(m.y, m.beta, spec.screen_distance);
    case GeometryKind::FlatScreen2D:
      return propagate_flat(m.y, m.beta, spec.screen_distance);
    case GeometryKind::SphericalScreen3D:
      return propagate_spherical(m.y, m.z, m.dir, spec.screen_distance);
    case GeometryKind::Biprism:
      return propagate_biprism(m.y, m.beta, spec);
  }
  throw std::invalid_argument("propagate: unknown geometry kind");
}

}  // namespace pev
