#pragma once

#include "pev/core.hpp"

namespace pev {

enum class SourceKind {
  DoubleSlit,    // two uniform strips of width a, centers at +-d/2
  GaussianPair,  // two Gaussian lines, sigma, centers at +-d/2
  CircularPair,  // two uniform discs of radius a/2, centers at +-d/2 (3-D)
  GaussianLine,  // one Gaussian line centered on the axis
};

// How CircularPair picks an emission direction.
enum class DirectionMode {
  Hemisphere,  // uniform over the forward solid-angle hemisphere
  InPlane,     // planar angle beta only, rays stay in their z = const plane
};

struct SourceSpec {
  SourceKind kind = SourceKind::DoubleSlit;
  double a = 0.0;          // slit width / disc diameter (m)
  double d = 0.0;          // center-to-center separation (m)
  double sigma = 0.0;      // Gaussian spread (m)
  double beta_lo = -kPi / 2;  // half-open angular interval [beta_lo, beta_hi)
  double beta_hi = kPi / 2;
  DirectionMode direction = DirectionMode::Hemisphere;

  bool is_three_d() const { return kind == SourceKind::CircularPair; }
  void validate() const;
};

struct SourcePosition {
  double y = 0.0;
  double z = 0.0;
};

// Draws an emission point from the spec's current distribution.
SourcePosition sample_position(const SourceSpec& spec, RngStream& rng);

// Draws the emission direction: the planar angle beta for line sources, a
// unit vector for CircularPair in Hemisphere mode.
struct SourceDirection {
  double beta = 0.0;
  std::array<double, 3> dir{1, 0, 0};
  bool three_d = false;
};
SourceDirection sample_angle(const SourceSpec& spec, RngStream& rng);

// Creates the next messenger, clock set to zero. One messenger is in flight
// at a time: callers must resolve the previous outcome before emitting again.
Messenger emit(const SourceSpec& spec, double frequency, RngStream& rng);

}  // namespace pev
