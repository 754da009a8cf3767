#include "pev/sources.hpp"

#include <cmath>

namespace pev {

void SourceSpec::validate() const {
  switch (kind) {
    case SourceKind::DoubleSlit:
    case SourceKind::CircularPair:
      if (!(a > 0.0)) throw std::invalid_argument("source: a must be > 0");
      if (!(d > a)) throw std::invalid_argument("source: d must exceed a (slits must not overlap)");
      break;
    case SourceKind::GaussianPair:
      if (!(sigma > 0.0)) throw std::invalid_argument("source: sigma must be > 0");
      if (!(d > 0.0)) throw std::invalid_argument("source: d must be > 0");
      break;
    case SourceKind::GaussianLine:
      if (!(sigma > 0.0)) throw std::invalid_argument("source: sigma must be > 0");
      break;
  }
  if (!(beta_lo < beta_hi)) throw std::invalid_argument("source: empty beta range");
  if (beta_lo < -kPi / 2 || beta_hi > kPi / 2)
    throw std::invalid_argument("source: beta range must lie within [-pi/2, pi/2]");
}

SourcePosition sample_position(const SourceSpec& spec, RngStream& rng) {
  spec.validate();
  switch (spec.kind) {
    case SourceKind::DoubleSlit: {
      const double center = rng.uniform() < 0.5 ? -spec.d / 2 : spec.d / 2;
      return {center + rng.uniform(-spec.a / 2, spec.a / 2), 0.0};
    }
    case SourceKind::GaussianPair: {
      const double center = rng.uniform() < 0.5 ? -spec.d / 2 : spec.d / 2;
      return {center + spec.sigma * rng.normal(), 0.0};
    }
    case SourceKind::CircularPair: {
      const double center = rng.uniform() < 0.5 ? -spec.d / 2 : spec.d / 2;
      // Uniform over the disc of radius a/2: r = R*sqrt(u).
      const double r = (spec.a / 2) * std::sqrt(rng.uniform());
      const double ang = rng.uniform(0.0, kTwoPi);
      return {center + r * std::cos(ang), r * std::sin(ang)};
    }
    case SourceKind::GaussianLine:
      return {spec.sigma * rng.normal(), 0.0};
  }
  throw std::invalid_argument("source: unknown kind");
}

SourceDirection sample_angle(const SourceSpec& spec, RngStream& rng) {
  spec.validate();
  SourceDirection out;
  if (spec.kind == SourceKind::CircularPair && spec.direction == DirectionMode::Hemisphere) {
    // Uniform solid angle over the forward (x > 0) hemisphere: the sine of
    // the off-plane elevation is uniform on [-1, 1), the in-plane angle
    // uniform on the beta range.
    const double sin_el = rng.uniform(-1.0, 1.0);
    const double cos_el = std::sqrt(1.0 - sin_el * sin_el);
    const double psi = rng.uniform(spec.beta_lo, spec.beta_hi);
    out.dir = {cos_el * std::cos(psi), cos_el * std::sin(psi), sin_el};
    out.three_d = true;
    return out;
  }
  out.beta = rng.uniform(spec.beta_lo, spec.beta_hi);
  if (spec.kind == SourceKind::CircularPair) {
    out.dir = {std::cos(out.beta), std::sin(out.beta), 0.0};
    out.three_d = true;
  }
  return out;
}

Messenger emit(const SourceSpec& spec, double frequency, RngStream& rng) {
  if (!(frequency > 0.0)) throw std::invalid_argument("emit: frequency must be > 0");
  const SourcePosition pos = sample_position(spec, rng);
  const SourceDirection ang = sample_angle(spec, rng);
  Messenger m;
  m.y = pos.y;
  m.z = pos.z;
  m.beta = ang.beta;
  m.dir = ang.dir;
  m.three_d = ang.three_d;
  m.tof = 0.0;
  m.frequency = frequency;
  return m;
}

}  // namespace pev
