#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pev/detectors.hpp"
#include "pev/oracle.hpp"
#include "pev/optics.hpp"
#include "pev/sources.hpp"

namespace pev {

enum class BudgetKind {
  Emitted,              // budget counts emitted messengers
  ReceivedPerDetector,  // run until mean received per detector hits budget
};

struct DetectorLayout {
  int count = 1;
  double lo = 0.0;  // window span, theta (rad) or y (m)
  double hi = 0.0;
};

// Moving-detector protocol: one detector of aperture delta steps along the
// path, reversing at the ends; it advances after E_visit received events,
// E_visit = n_total / ((span/delta) * n_sweeps).
struct SweepSpec {
  double delta = 0.0;  // step and aperture (rad)
  std::uint64_t n_total = 0;
  int n_sweeps = 1;
  double path_lo = -kPi / 2;
  double path_hi = kPi / 2;
};

struct ExperimentConfig {
  SourceSpec source;
  GeometrySpec geometry;
  DlmVariant dlm;
  ClickVariant click;
  DetectorLayout detectors;
  BudgetKind budget_kind = BudgetKind::Emitted;
  std::uint64_t budget = 0;
  std::uint64_t seed = 1;
  double lambda = 0.0;  // m
  std::optional<SweepSpec> sweep;

  double frequency() const { return kSpeedOfLight / lambda; }
  std::vector<Window> windows() const;
  void validate() const;
};

struct RunResult {
  std::vector<double> positions;  // window centers (rad or m)
  std::vector<std::uint64_t> clicks;
  std::vector<std::uint64_t> received;
  std::uint64_t emitted = 0;
  std::uint64_t missed = 0;     // landed outside every window
  std::uint64_t discarded = 0;  // outside the sweep aperture

  std::uint64_t total_clicks() const;
  std::uint64_t total_received() const;
  double detected_ratio() const;  // clicks / emitted
};

// Fixed detector array fed until the budget is exhausted.
RunResult run_static(const ExperimentConfig& config);

// Moving-detector sweep (requires config.sweep and one detector). Detector
// state is initialized once and never reset while the aperture moves.
RunResult run_sweep(const ExperimentConfig& config);

// Detection-efficiency run: an on-axis point source far from one detector,
// so every arriving messenger carries the same message.
struct EfficiencyTrace {
  std::vector<std::uint64_t> clicks_cum;  // after each received event
  double rate(std::size_t event) const {
    return static_cast<double>(clicks_cum[event]) / static_cast<double>(event + 1);
  }
};
EfficiencyTrace run_efficiency(const ExperimentConfig& config);

// Input message streams for transient traces; r is uniform in [0,1) per event.
enum class TransientStream {
  SqrtPair,  // (sqrt(r), sqrt(1-r))
  HalfTurn,  // (cos pi r, sin pi r)
  FullTurn,  // (cos 2 pi r, sin 2 pi r)
  Constant,  // fixed message
};

struct TransientParams {
  double gamma = 0.999;
  double kappa = 0.9;
  Vec2 p0{1.0, 0.0};
  double w0 = 0.9;
  Message constant{1.0, 0.0};  // Constant stream only
};

// |p_k|^2 per event for variants I and II fed the identical message sequence.
struct TransientTrace {
  std::vector<double> dlm1;
  std::vector<double> dlm2;
};
TransientTrace run_transient(TransientStream stream, std::size_t k_max, std::uint64_t seed,
                             const TransientParams& params = {});

// M independent screens, each run until its first click; the screen is then
// discarded and only the first-click window is kept.
struct EnsembleResult {
  std::vector<double> positions;
  std::vector<std::uint64_t> first_clicks;
  std::uint64_t no_click_screens = 0;
  std::uint64_t emitted = 0;   // across all screens
  std::uint64_t received = 0;
  std::uint64_t missed = 0;
};
EnsembleResult run_single_shot_ensemble(const ExperimentConfig& config, std::uint64_t screens,
                                        std::uint64_t event_cap = 100'000'000);

// Least-squares scale between simulation counts and a reference profile,
// normalized rms residual, and fringe visibilities of both curves.
struct FitResult {
  double scale = 0.0;
  double rms = 0.0;
  double visibility_sim = 0.0;
  double visibility_oracle = 0.0;
};
FitResult fit_and_compare(const std::vector<double>& sim, const std::vector<double>& oracle,
                          const std::vector<double>& positions, double vis_lo, double vis_hi);
FitResult fit_and_compare(const RunResult& sim, const IntensityProfile& oracle);

// (max - min) / (max + min) over the positions inside [lo, hi].
double fringe_visibility(const std::vector<double>& values, const std::vector<double>& positions,
                         double lo, double hi);

}  // namespace pev
