#include "pev/core.hpp"

#include <cmath>

namespace pev {

double Vec2::norm() const { return std::sqrt(norm_sq()); }

Message Message::from_phase(double phi) { return {std::cos(phi), std::sin(phi)}; }

double phase_cycles(double tof, double frequency) {
  // Two-word product: hi + lo == tof*frequency exactly. fmod by 1 is exact,
  // so the only precision left on the table is what the inputs carry.
  const double hi = tof * frequency;
  const double lo = std::fma(tof, frequency, -hi);
  double frac = std::fmod(hi, 1.0) + lo;
  frac -= std::floor(frac);
  if (frac >= 1.0) frac -= 1.0;
  if (frac < 0.0) frac = 0.0;
  return frac;
}

Message message_from_tof(double tof, double frequency) {
  if (!(tof >= 0.0)) throw std::invalid_argument("message_from_tof: tof must be >= 0");
  if (!(frequency > 0.0)) throw std::invalid_argument("message_from_tof: frequency must be > 0");
  const double phi = kTwoPi * phase_cycles(tof, frequency);
  return {std::cos(phi), std::sin(phi)};
}

double wavenumber(double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("wavenumber: lambda must be > 0");
  return kTwoPi / lambda;
}

namespace {

inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t r = x;
  r = (r ^ (r >> 30)) * 0xBF58476D1CE4E5B9ULL;
  r = (r ^ (r >> 27)) * 0x94D049BB133111EBULL;
  return r ^ (r >> 31);
}

inline std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

}  // namespace

RngStream::RngStream(std::uint64_t seed) : seed_(seed) {
  std::uint64_t sm = seed;
  for (auto& s : state_) s = splitmix64(sm);
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  double v = lo + (hi - lo) * uniform();
  // Rounding can land exactly on hi; keep the half-open contract.
  if (v >= hi) v = std::nextafter(hi, lo);
  return v;
}

double RngStream::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

RngStream RngStream::substream(std::uint64_t index) const {
  std::uint64_t sm = seed_ ^ (0xD1B54A32D192ED03ULL * (index + 1));
  return RngStream(splitmix64(sm));
}

}  // namespace pev
