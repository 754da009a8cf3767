#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace pev {

// Speed of light in vacuum, m/s (exact by definition).
inline constexpr double kSpeedOfLight = 299'792'458.0;
inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

// A propagation step produced a ray that cannot reach the detection surface.
struct GeometryViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Refraction angle has no real solution (|n sin| > 1).
struct TotalInternalReflection : GeometryViolation {
  using GeometryViolation::GeometryViolation;
};

// Inconsistent experiment configuration, detected before any event runs.
struct ConfigurationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm_sq() const { return x * x + y * y; }
  double norm() const;
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

// The clock hand of a messenger: a unit 2-vector (cos phi, sin phi).
struct Message {
  double e0 = 1.0;
  double e1 = 0.0;

  static Message from_phase(double phi);
  Vec2 vec() const { return {e0, e1}; }
  double norm_sq() const { return e0 * e0 + e1 * e1; }
};

// Particle-like carrier of a phase clock. Created at the source plane x = 0
// with its clock at zero; the clock advances with the time of flight.
struct Messenger {
  double y = 0.0;                        // source-plane coordinate (m)
  double z = 0.0;                        // second coordinate, 3-D sources (m)
  double beta = 0.0;                     // in-plane emission angle (rad)
  std::array<double, 3> dir{1, 0, 0};    // unit direction, 3-D sources
  bool three_d = false;
  double tof = 0.0;                      // time of flight (s)
  double frequency = 0.0;                // clock frequency (Hz)
};

// Fractional number of clock turns, i.e. frequency*tof mod 1, computed with a
// compensated product so the phase survives tof*frequency >> 2^40.
double phase_cycles(double tof, double frequency);

// Clock hand after flying for `tof` seconds: (cos phi, sin phi) with
// phi = 2*pi*frequency*tof reduced mod 2*pi before the trig evaluation.
Message message_from_tof(double tof, double frequency);

// q = 2*pi/lambda.
double wavenumber(double lambda);

// Half-open position interval [lo, hi) on the detection surface.
struct Window {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double pos) const { return pos >= lo && pos < hi; }
  double center() const { return 0.5 * (lo + hi); }
  double width() const { return hi - lo; }
};

/// Deterministic 64-bit random stream (xoshiro256++ seeded via splitmix64).
///
/// The same seed yields the same sequence on every platform; all sampling in
/// the project draws from this stream so whole runs replay bit-exactly.
/// Single-owner: one stream per sequential experiment. Parallel work derives
/// independent child streams with substream().
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform in [0, 1), 53-bit resolution.
  double uniform();

  // Uniform in [lo, hi).
  double uniform(double lo, double hi);

  // Standard normal via Box-Muller; always consumes exactly two uniforms.
  double normal();

  // Deterministically derived independent stream (for ensembles / workers).
  RngStream substream(std::uint64_t index) const;

  std::uint64_t seed() const { return seed_; }

 private:
  std::array<std::uint64_t, 4> state_{};
  std::uint64_t seed_ = 0;
};

}  // namespace pev
