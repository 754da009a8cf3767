#include "pev/experiments.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace pev {

std::vector<Window> ExperimentConfig::windows() const {
  std::vector<Window> out;
  out.reserve(static_cast<std::size_t>(detectors.count));
  const double step = (detectors.hi - detectors.lo) / detectors.count;
  for (int i = 0; i < detectors.count; ++i) {
    const double hi = i + 1 == detectors.count ? detectors.hi : detectors.lo + (i + 1) * step;
    out.push_back({detectors.lo + i * step, hi});
  }
  return out;
}

void ExperimentConfig::validate() const {
  source.validate();
  geometry.validate();
  dlm.validate();
  click.validate();
  if (!(lambda > 0.0)) throw ConfigurationError("config: lambda must be > 0");
  if (!(budget > 0)) throw ConfigurationError("config: budget must be > 0");
  if (detectors.count < 1) throw ConfigurationError("config: detector count must be >= 1");
  if (!(detectors.lo < detectors.hi)) throw ConfigurationError("config: empty detector span");
  if (geometry.kind == GeometryKind::CircularScreen2D &&
      (detectors.lo < -kPi / 2 || detectors.hi > kPi / 2))
    throw ConfigurationError("config: circular-screen windows must lie in [-pi/2, pi/2]");
  if (geometry.kind == GeometryKind::SphericalScreen3D &&
      (detectors.lo < -kPi || detectors.hi > kPi))
    throw ConfigurationError("config: spherical-screen windows must lie in [-pi, pi]");
  const bool three_d_source = source.is_three_d();
  const bool three_d_screen = geometry.kind == GeometryKind::SphericalScreen3D;
  if (three_d_source != three_d_screen)
    throw ConfigurationError("config: circular-pair sources pair with the spherical screen only");
  if (sweep) {
    if (!(sweep->delta > 0.0)) throw ConfigurationError("sweep: delta_theta must be > 0");
    if (sweep->n_total < 1 || sweep->n_sweeps < 1)
      throw ConfigurationError("sweep: n_total and n_sweeps must be >= 1");
    if (!(sweep->path_lo < sweep->path_hi)) throw ConfigurationError("sweep: empty path");
    if (detectors.count != 1) throw ConfigurationError("sweep: exactly one detector required");
  }
}

std::uint64_t RunResult::total_clicks() const {
  std::uint64_t n = 0;
  for (auto c : clicks) n += c;
  return n;
}

std::uint64_t RunResult::total_received() const {
  std::uint64_t n = 0;
  for (auto c : received) n += c;
  return n;
}

double RunResult::detected_ratio() const {
  return emitted == 0 ? 0.0 : static_cast<double>(total_clicks()) / static_cast<double>(emitted);
}

namespace {

[[noreturn]] void rethrow_with_event(const GeometryViolation& e, std::uint64_t event) {
  throw GeometryViolation("event " + std::to_string(event) + ": " + e.what());
}

}  // namespace

RunResult run_static(const ExperimentConfig& config) {
  config.validate();
  if (config.sweep) throw ConfigurationError("run_static: config carries a sweep section");

  DetectorArray array(config.windows(), config.dlm, config.click);
  RngStream rng(config.seed);
  const double frequency = config.frequency();
  const bool spherical = config.geometry.kind == GeometryKind::SphericalScreen3D;

  RunResult result;
  const std::uint64_t target_received =
      config.budget_kind == BudgetKind::ReceivedPerDetector
          ? config.budget * static_cast<std::uint64_t>(config.detectors.count)
          : 0;
  std::uint64_t received_total = 0;

  while (config.budget_kind == BudgetKind::Emitted ? result.emitted < config.budget
                                                   : received_total < target_received) {
    result.emitted += 1;
    const Messenger m = emit(config.source, frequency, rng);
    Arrival arrival;
    try {
      arrival = propagate(m, config.geometry);
    } catch (const GeometryViolation& e) {
      rethrow_with_event(e, result.emitted);
    }
    if (spherical && arrival.off_plane > config.geometry.band_half_sin) {
      result.missed += 1;
      continue;
    }
    const Outcome out = array.process(arrival, message_from_tof(arrival.tof, frequency), rng);
    if (out.kind == OutcomeKind::Miss) {
      result.missed += 1;
    } else {
      received_total += 1;
    }
    if (received_total == 0 && result.emitted == 10'000'000)
      throw ConfigurationError("run_static: nothing received after 1e7 emissions");
  }

  for (const auto& w : array.windows()) result.positions.push_back(w.center());
  for (const auto& s : array.states()) {
    result.clicks.push_back(s.clicks);
    result.received.push_back(s.received);
  }
  return result;
}

RunResult run_sweep(const ExperimentConfig& config) {
  config.validate();
  if (!config.sweep) throw ConfigurationError("run_sweep: config has no sweep section");
  const SweepSpec& sw = *config.sweep;

  const double span = sw.path_hi - sw.path_lo;
  const double positions_f = span / sw.delta;
  const int n_pos = static_cast<int>(std::llround(positions_f));
  if (n_pos < 1 || std::fabs(positions_f - n_pos) > 1e-6)
    throw ConfigurationError("sweep: path span must be an integer number of steps");
  const std::uint64_t e_visit =
      sw.n_total / (static_cast<std::uint64_t>(n_pos) * static_cast<std::uint64_t>(sw.n_sweeps));
  if (e_visit < 1) throw ConfigurationError("sweep: fewer than one event per detector visit");

  RngStream rng(config.seed);
  const double frequency = config.frequency();
  DetectorState state = initial_state(config.dlm, config.click);

  RunResult result;
  result.positions.resize(static_cast<std::size_t>(n_pos));
  result.clicks.assign(static_cast<std::size_t>(n_pos), 0);
  result.received.assign(static_cast<std::size_t>(n_pos), 0);
  for (int j = 0; j < n_pos; ++j)
    result.positions[static_cast<std::size_t>(j)] = sw.path_lo + (j + 0.5) * sw.delta;

  for (int s = 0; s < sw.n_sweeps; ++s) {
    for (int step = 0; step < n_pos; ++step) {
      const int j = s % 2 == 0 ? step : n_pos - 1 - step;  // back and forth
      const Window aperture{sw.path_lo + j * sw.delta, sw.path_lo + (j + 1) * sw.delta};
      const std::uint64_t clicks_before = state.clicks;
      std::uint64_t got = 0;
      std::uint64_t emitted_this_visit = 0;
      while (got < e_visit) {
        result.emitted += 1;
        if (++emitted_this_visit > 200'000'000)
          throw ConfigurationError("sweep: aperture at position " + std::to_string(j) +
                                   " is starved (no arrivals reach it)");
        const Messenger m = emit(config.source, frequency, rng);
        Arrival arrival;
        try {
          arrival = propagate(m, config.geometry);
        } catch (const GeometryViolation& e) {
          rethrow_with_event(e, result.emitted);
        }
        if (!aperture.contains(arrival.position)) {
          result.discarded += 1;
          continue;
        }
        dlm_update(state, message_from_tof(arrival.tof, frequency), config.dlm);
        apply_click_stage(state, config.click, rng);
        got += 1;
      }
      result.clicks[static_cast<std::size_t>(j)] += state.clicks - clicks_before;
      result.received[static_cast<std::size_t>(j)] += e_visit;
    }
  }
  return result;
}

EfficiencyTrace run_efficiency(const ExperimentConfig& config) {
  config.validate();
  if (config.detectors.count != 1)
    throw ConfigurationError("run_efficiency: exactly one detector required");

  // On-axis point source: every messenger flies the same path, so every
  // message is identical.
  Messenger m;
  m.frequency = config.frequency();
  const Arrival arrival = propagate(m, config.geometry);
  const Window window{config.detectors.lo, config.detectors.hi};
  if (!window.contains(arrival.position))
    throw ConfigurationError("run_efficiency: detector window must contain the on-axis arrival");
  const Message msg = message_from_tof(arrival.tof, m.frequency);

  RngStream rng(config.seed);
  DetectorState state = initial_state(config.dlm, config.click);
  EfficiencyTrace trace;
  trace.clicks_cum.reserve(config.budget);
  for (std::uint64_t k = 0; k < config.budget; ++k) {
    dlm_update(state, msg, config.dlm);
    apply_click_stage(state, config.click, rng);
    trace.clicks_cum.push_back(state.clicks);
  }
  return trace;
}

TransientTrace run_transient(TransientStream stream, std::size_t k_max, std::uint64_t seed,
                             const TransientParams& params) {
  RngStream rng(seed);
  DlmVariant v1{DlmKind::I, params.gamma, params.kappa, params.w0, params.p0};
  DlmVariant v2{DlmKind::II, params.gamma, params.kappa, params.w0, params.p0};
  DetectorState s1 = initial_state(v1, ClickVariant{});
  DetectorState s2 = initial_state(v2, ClickVariant{});

  TransientTrace trace;
  trace.dlm1.reserve(k_max);
  trace.dlm2.reserve(k_max);
  for (std::size_t k = 0; k < k_max; ++k) {
    Message e;
    switch (stream) {
      case TransientStream::SqrtPair: {
        const double r = rng.uniform();
        e = {std::sqrt(r), std::sqrt(1.0 - r)};
        break;
      }
      case TransientStream::HalfTurn:
        e = Message::from_phase(kPi * rng.uniform());
        break;
      case TransientStream::FullTurn:
        e = Message::from_phase(kTwoPi * rng.uniform());
        break;
      case TransientStream::Constant:
        e = params.constant;
        break;
    }
    dlm_update(s1, e, v1);
    dlm_update(s2, e, v2);
    trace.dlm1.push_back(s1.p.norm_sq());
    trace.dlm2.push_back(s2.p.norm_sq());
  }
  return trace;
}

EnsembleResult run_single_shot_ensemble(const ExperimentConfig& config, std::uint64_t screens,
                                        std::uint64_t event_cap) {
  config.validate();
  if (screens < 1) throw ConfigurationError("ensemble: need at least one screen");

  const RngStream master(config.seed);
  const double frequency = config.frequency();
  const bool spherical = config.geometry.kind == GeometryKind::SphericalScreen3D;

  EnsembleResult result;
  const auto windows = config.windows();
  for (const auto& w : windows) result.positions.push_back(w.center());
  result.first_clicks.assign(windows.size(), 0);

  for (std::uint64_t screen = 0; screen < screens; ++screen) {
    RngStream rng = master.substream(screen);
    DetectorArray array(windows, config.dlm, config.click);
    bool clicked = false;
    for (std::uint64_t event = 0; event < event_cap && !clicked; ++event) {
      result.emitted += 1;
      const Messenger m = emit(config.source, frequency, rng);
      Arrival arrival;
      try {
        arrival = propagate(m, config.geometry);
      } catch (const GeometryViolation& e) {
        rethrow_with_event(e, event + 1);
      }
      if (spherical && arrival.off_plane > config.geometry.band_half_sin) {
        result.missed += 1;
        continue;
      }
      const Outcome out = array.process(arrival, message_from_tof(arrival.tof, frequency), rng);
      if (out.kind == OutcomeKind::Miss) {
        result.missed += 1;
        continue;
      }
      result.received += 1;
      if (out.kind == OutcomeKind::Click) {
        result.first_clicks[static_cast<std::size_t>(out.index)] += 1;
        clicked = true;
      }
    }
    if (!clicked) result.no_click_screens += 1;
  }
  return result;
}

double fringe_visibility(const std::vector<double>& values, const std::vector<double>& positions,
                         double lo, double hi) {
  double vmax = -std::numeric_limits<double>::infinity();
  double vmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (positions[i] < lo || positions[i] > hi) continue;
    if (!std::isfinite(values[i])) continue;
    vmax = std::fmax(vmax, values[i]);
    vmin = std::fmin(vmin, values[i]);
  }
  if (!std::isfinite(vmax))
    throw std::invalid_argument("fringe_visibility: no finite values in the region");
  if (vmax + vmin <= 0.0)
    throw std::invalid_argument("fringe_visibility: undefined visibility (all-zero values)");
  return (vmax - vmin) / (vmax + vmin);
}

FitResult fit_and_compare(const std::vector<double>& sim, const std::vector<double>& oracle,
                          const std::vector<double>& positions, double vis_lo, double vis_hi) {
  if (sim.size() != oracle.size() || sim.size() != positions.size() || sim.empty())
    throw std::invalid_argument("fit_and_compare: mismatched or empty profiles");

  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < sim.size(); ++i) {
    if (!std::isfinite(oracle[i]) || !std::isfinite(sim[i])) continue;
    num += sim[i] * oracle[i];
    den += oracle[i] * oracle[i];
  }
  if (!(den > 0.0))
    throw std::invalid_argument("fit_and_compare: undefined visibility (all-zero oracle)");
  const double scale = num / den;

  double sq = 0.0, peak = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < sim.size(); ++i) {
    if (!std::isfinite(oracle[i]) || !std::isfinite(sim[i])) continue;
    const double res = sim[i] - scale * oracle[i];
    sq += res * res;
    peak = std::fmax(peak, scale * oracle[i]);
    n += 1;
  }
  if (!(peak > 0.0))
    throw std::invalid_argument("fit_and_compare: undefined visibility (all-zero fit)");

  FitResult out;
  out.scale = scale;
  out.rms = std::sqrt(sq / static_cast<double>(n)) / peak;
  out.visibility_sim = fringe_visibility(sim, positions, vis_lo, vis_hi);
  out.visibility_oracle = fringe_visibility(oracle, positions, vis_lo, vis_hi);
  return out;
}

FitResult fit_and_compare(const RunResult& sim, const IntensityProfile& oracle) {
  oracle.validate();
  if (sim.positions.size() != oracle.positions.size())
    throw std::invalid_argument("fit_and_compare: window grids differ");
  for (std::size_t i = 0; i < sim.positions.size(); ++i) {
    if (std::fabs(sim.positions[i] - oracle.positions[i]) > 1e-9)
      throw std::invalid_argument("fit_and_compare: window grids differ");
  }
  std::vector<double> counts(sim.clicks.begin(), sim.clicks.end());
  return fit_and_compare(counts, oracle.values, sim.positions, sim.positions.front(),
                         sim.positions.back());
}

}  // namespace pev
