#pragma once

#include "pev/core.hpp"

namespace pev {

enum class GeometryKind {
  CircularScreen2D,   // detectors on a semicircle of radius X, position = theta
  FlatScreen2D,       // detectors on the plane x = X, position = y
  SphericalScreen3D,  // detectors on a sphere of radius X, position = signed zenith
  Biprism,            // Fresnel biprism, flat screen at x = X, position = y
};

struct GeometrySpec {
  GeometryKind kind = GeometryKind::CircularScreen2D;
  double screen_distance = 0.0;   // X: screen radius or plane distance (m)
  double apex_x = 0.0;            // X': biprism apex position (m)
  double summit_angle = 0.0;      // alpha: biprism summit angle (rad)
  double refractive_index = 1.0;  // n: biprism glass index
  double band_half_sin = 0.03;    // spherical screens: accepted |z|/X of the
                                  // landing point; arrivals beyond it miss

  bool angular_position() const {
    return kind == GeometryKind::CircularScreen2D || kind == GeometryKind::SphericalScreen3D;
  }
  void validate() const;
};

struct Arrival {
  double position = 0.0;   // theta (rad) or y (m) depending on the geometry
  double tof = 0.0;        // s
  double off_plane = 0.0;  // |z|/X of the landing point (spherical only)
};

// Ray from (0, y) at angle beta onto the circle of radius X centered on the
// source midpoint. Position is the signed angle theta of the landing point.
Arrival propagate_circular(double y, double beta, double X);

// Ray from (0, y) at angle beta onto the plane x = X.
Arrival propagate_flat(double y, double beta, double X);

// Ray from (0, y, z) along `dir` onto the sphere of radius X centered at the
// origin. Position is the signed landing angle in the source-separation
// plane (the zenith from +x for in-plane arrivals).
Arrival propagate_spherical(double y, double z, const std::array<double, 3>& dir, double X);

// Ray from (0, y) at angle beta, refracted once at the biprism face it
// crosses, onto the plane x = X. The source sits inside the glass.
Arrival propagate_biprism(double y, double beta, const GeometrySpec& spec);

// Dispatch on the geometry kind.
Arrival propagate(const Messenger& m, const GeometrySpec& spec);

}  // namespace pev
