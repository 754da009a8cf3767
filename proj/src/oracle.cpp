#include "pev/oracle.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>

namespace pev {

namespace {

double sinc(double x) {
  if (std::fabs(x) < 1e-8) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

// 2 J1(x)/x, the Airy-pattern amplitude factor; -> 1 as x -> 0.
double jinc(double x) {
  if (std::fabs(x) < 1e-6) return 1.0 - x * x / 8.0;
  return 2.0 * bessel_j1(x) / x;
}

int find_window_sorted(const std::vector<Window>& windows, double pos) {
  std::size_t lo = 0, hi = windows.size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (windows[mid].hi <= pos)
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo < windows.size() && windows[lo].contains(pos)) return static_cast<int>(lo);
  return -1;
}

}  // namespace

double bessel_j1(double x) {
  const double ax = std::fabs(x);
  if (ax <= 12.0) {
    // J1(x) = (x/2) sum_m (-1)^m (x^2/4)^m / (m! (m+1)!)
    const double q = -0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int m = 1; m <= 60; ++m) {
      term *= q / (static_cast<double>(m) * (m + 1.0));
      sum += term;
      if (std::fabs(term) < 1e-18 * std::fabs(sum) + 1e-300) break;
    }
    return 0.5 * x * sum;
  }
  // Hankel expansion: J1 = sqrt(2/(pi x)) [P cos(chi) - Q sin(chi)],
  // chi = x - 3 pi/4; coefficients A_m = prod(4 - (2j-1)^2) / (m! 8^m).
  double p = 1.0, qq = 0.0;
  double a = 1.0;
  int sign_p = -1, sign_q = 1;
  double xp = 1.0;
  for (int m = 1; m <= 15; ++m) {
    a *= (4.0 - (2.0 * m - 1.0) * (2.0 * m - 1.0)) / (8.0 * m);
    xp *= ax;
    if (m % 2 == 1) {
      qq += sign_q * a / xp;
      sign_q = -sign_q;
    } else {
      p += sign_p * a / xp;
      sign_p = -sign_p;
    }
  }
  const double chi = ax - 0.75 * kPi;
  const double result = std::sqrt(2.0 / (kPi * ax)) * (p * std::cos(chi) - qq * std::sin(chi));
  return x < 0.0 ? -result : result;
}

double intensity_slit(double theta, double q, double a, double d) {
  const double s = std::sin(theta);
  const double env = sinc(0.5 * q * a * s);
  const double fringe = std::cos(0.5 * q * d * s);
  return env * env * fringe * fringe;
}

double intensity_gaussian(double y, double q, double sigma, double d, double X) {
  if (X < 100.0 * std::fmax(d, sigma)) {
    static std::once_flag warned;
    std::call_once(warned, [] {
      std::fprintf(stderr,
                   "warning: intensity_gaussian outside its validity regime "
                   "(X < 100*max(d, sigma))\n");
    });
  }
  const double qs2 = q * sigma * sigma;  // q sigma^2
  const double b = qs2 * qs2 / (X * X + qs2 * qs2);
  const double cosh_term = std::cosh(b * y * d / (sigma * sigma));
  const double cos_term = std::cos((1.0 - b) * q * y * d / X);
  const double envelope = std::exp(-b * (y * y + d * d / 4.0) / (sigma * sigma));
  return (cosh_term + cos_term) * envelope;
}

double intensity_circular(double theta, double q, double a, double d) {
  const double s = std::sin(theta);
  const double env = jinc(q * a * s);
  const double fringe = std::cos(0.5 * q * d * s);
  return env * env * fringe * fringe;
}

void IntensityProfile::validate() const {
  if (positions.empty() || positions.size() != values.size())
    throw std::invalid_argument("profile: empty or mismatched position/value lists");
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (i > 0 && !(positions[i] > positions[i - 1]))
      throw std::invalid_argument("profile: positions must be strictly increasing");
    if (!(values[i] >= 0.0)) throw std::invalid_argument("profile: values must be >= 0");
  }
}

McProfile amplitude_mc(const std::vector<Window>& windows, const SourceSpec& source,
                       const GeometrySpec& geometry, double frequency, std::uint64_t samples,
                       RngStream& rng) {
  if (samples < 1) throw std::invalid_argument("amplitude_mc: samples must be >= 1");
  source.validate();
  geometry.validate();
  const std::size_t n = windows.size();
  std::vector<double> sum0(n, 0.0), sum1(n, 0.0);
  std::vector<std::uint64_t> hits(n, 0);
  const bool spherical = geometry.kind == GeometryKind::SphericalScreen3D;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const Messenger m = emit(source, frequency, rng);
    const Arrival a = propagate(m, geometry);
    if (spherical && a.off_plane > geometry.band_half_sin) continue;
    const int w = find_window_sorted(windows, a.position);
    if (w < 0) continue;
    const Message msg = message_from_tof(a.tof, frequency);
    sum0[static_cast<std::size_t>(w)] += msg.e0;
    sum1[static_cast<std::size_t>(w)] += msg.e1;
    hits[static_cast<std::size_t>(w)] += 1;
  }
  McProfile out;
  out.intensity.assign(n, std::numeric_limits<double>::quiet_NaN());
  out.samples = std::move(hits);
  for (std::size_t i = 0; i < n; ++i) {
    if (out.samples[i] == 0) continue;
    const double inv = 1.0 / static_cast<double>(out.samples[i]);
    const double re = sum0[i] * inv;
    const double im = sum1[i] * inv;
    out.intensity[i] = re * re + im * im;
  }
  return out;
}

std::vector<double> direct_sampler(const IntensityProfile& profile, std::uint64_t k,
                                   RngStream& rng) {
  profile.validate();
  if (k < 1) throw std::invalid_argument("direct_sampler: k must be >= 1");
  double i_max = 0.0;
  for (double v : profile.values) i_max = std::fmax(i_max, v);
  if (!(i_max > 0.0)) throw std::invalid_argument("direct_sampler: all-zero profile");
  const std::size_t n = profile.values.size();
  std::vector<std::uint64_t> counts(n, 0);
  for (std::uint64_t j = 0; j < k; ++j) {
    const double threshold = rng.uniform() * i_max;
    for (std::size_t i = 0; i < n; ++i) {
      if (profile.values[i] >= threshold) counts[i] += 1;
    }
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = static_cast<double>(counts[i]) / static_cast<double>(k);
  return out;
}

Vec2 dlm_periodic_limit(const std::vector<Message>& messages, double gamma) {
  if (messages.empty()) throw std::invalid_argument("dlm_periodic_limit: need at least one message");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("dlm_periodic_limit: gamma must be in (0,1)");
  const std::size_t k = messages.size();
  Vec2 acc{0.0, 0.0};
  double weight = 1.0;  // gamma^(K-j-1), starting at j = K-1
  for (std::size_t j = k; j-- > 0;) {
    acc = acc + weight * messages[j].vec();
    weight *= gamma;
  }
  const double norm = (1.0 - gamma) / (1.0 - std::pow(gamma, static_cast<double>(k)));
  return norm * acc;
}

bool has_closed_form(const SourceSpec& source, const GeometrySpec& geometry) {
  return (source.kind == SourceKind::DoubleSlit && geometry.kind == GeometryKind::CircularScreen2D) ||
         (source.kind == SourceKind::GaussianPair && geometry.kind == GeometryKind::FlatScreen2D) ||
         (source.kind == SourceKind::CircularPair && geometry.kind == GeometryKind::SphericalScreen3D);
}

std::vector<double> closed_form_on_windows(const std::vector<Window>& windows,
                                           const SourceSpec& source, const GeometrySpec& geometry,
                                           double lambda) {
  const double q = wavenumber(lambda);
  std::vector<double> out;
  out.reserve(windows.size());
  if (source.kind == SourceKind::DoubleSlit && geometry.kind == GeometryKind::CircularScreen2D) {
    for (const auto& w : windows) out.push_back(intensity_slit(w.center(), q, source.a, source.d));
  } else if (source.kind == SourceKind::GaussianPair && geometry.kind == GeometryKind::FlatScreen2D) {
    for (const auto& w : windows)
      out.push_back(intensity_gaussian(w.center(), q, source.sigma, source.d, geometry.screen_distance));
  } else if (source.kind == SourceKind::CircularPair &&
             geometry.kind == GeometryKind::SphericalScreen3D) {
    // The sampled discs have radius a/2; the Airy argument takes that radius.
    for (const auto& w : windows)
      out.push_back(intensity_circular(w.center(), q, source.a / 2.0, source.d));
  } else {
    throw std::invalid_argument("closed_form_on_windows: no closed form for this setup");
  }
  return out;
}

}  // namespace pev
