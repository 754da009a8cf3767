#pragma once

#include <cstdint>
#include <vector>

#include "pev/core.hpp"
#include "pev/optics.hpp"
#include "pev/sources.hpp"

namespace pev {

// Wave-theory reference results. Everything here is independent of the
// detector model; the leading intensity constants are normalized away and
// comparisons against simulated counts go through a fitted scale.

// Bessel function of the first kind, order one. Ascending series for
// |x| <= 12, Hankel asymptotic expansion beyond; absolute error <= 1e-10.
double bessel_j1(double x);

// Two uniform slits of width a separated by d, circular screen:
// sinc^2(q a sin(theta)/2) * cos^2(q d sin(theta)/2), normalized to 1 at 0.
double intensity_slit(double theta, double q, double a, double d);

// Two Gaussian line sources (spread sigma, separation d), flat screen at X.
// Valid in the regime d << X and sigma << X; warns once outside X >= 100*max.
double intensity_gaussian(double y, double q, double sigma, double d, double X);

// Two discs of radius a separated by d, spherical screen:
// (2 J1(q a sin(theta)) / (q a sin(theta)))^2 * cos^2(q d sin(theta)/2).
double intensity_circular(double theta, double q, double a, double d);

struct IntensityProfile {
  std::vector<double> positions;  // strictly increasing (rad or m)
  std::vector<double> values;     // >= 0, arbitrary units

  void validate() const;
};

// Monte Carlo wave amplitude: propagates sampled rays through the geometry
// and coherently averages their clock phases per window. Windows that catch
// no samples report NaN.
struct McProfile {
  std::vector<double> intensity;       // |mean phasor|^2 per window
  std::vector<std::uint64_t> samples;  // rays landing in each window
};
McProfile amplitude_mc(const std::vector<Window>& windows, const SourceSpec& source,
                       const GeometrySpec& geometry, double frequency, std::uint64_t samples,
                       RngStream& rng);

// Event generator driven directly by a known intensity profile: per event one
// uniform r, and every position registers a count when its intensity clears
// r * max. Returns the count fraction per position.
std::vector<double> direct_sampler(const IntensityProfile& profile, std::uint64_t k,
                                   RngStream& rng);

// Limit of the variant-I internal vector under periodic repetition of the
// given message block; approaches the plain average as gamma -> 1.
Vec2 dlm_periodic_limit(const std::vector<Message>& messages, double gamma);

// Closed-form intensity on the window centers for the source/geometry pairs
// that have one. Throws std::invalid_argument for other combinations.
std::vector<double> closed_form_on_windows(const std::vector<Window>& windows,
                                           const SourceSpec& source, const GeometrySpec& geometry,
                                           double lambda);
bool has_closed_form(const SourceSpec& source, const GeometrySpec& geometry);

}  // namespace pev
