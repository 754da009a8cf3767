#pragma once

#include <cstdint>
#include <vector>

#include "pev/core.hpp"
#include "pev/optics.hpp"

namespace pev {

enum class DlmKind { I, II, III };

// First-stage learning machine parameters. Variant I keeps a fixed learning
// rate gamma; II and III modulate it through an auxiliary variable w that
// tracks recent change (II) or recent mismatch with the input (III).
struct DlmVariant {
  DlmKind kind = DlmKind::I;
  double gamma = 0.999;
  double kappa = 0.9;   // II/III only
  double w0 = 0.9;      // II/III only
  Vec2 p0{0.0, 0.0};

  void validate() const;
};

enum class ClickKind {
  RandomThreshold,   // click iff |p|^2 >= r, r uniform in [0,1)
  DeterministicDlm,  // rate-tracking machine with internal variable z
};

struct ClickVariant {
  ClickKind kind = ClickKind::RandomThreshold;
  double nu = 0.99;  // DeterministicDlm only
  double z0 = 0.0;

  void validate() const;
};

// Per-detector adaptive memory plus counters.
struct DetectorState {
  Vec2 p{0.0, 0.0};
  double w = 0.0;
  double z = 0.0;
  std::uint64_t clicks = 0;
  std::uint64_t received = 0;
};

// Applies one message to the first stage and bumps the received counter.
void dlm_update(DetectorState& state, const Message& e, const DlmVariant& variant);

// Second stage, pseudo-random variant: S = 1 iff |p|^2 >= r.
bool click_random(const Vec2& p, RngStream& rng);

// Second stage, deterministic variant: compares psq against the machine's
// two candidate follow-up states and keeps the closer one.
struct ClickDecision {
  bool click = false;
  double z_next = 0.0;
};
ClickDecision click_deterministic(double z, double psq, double nu);

// Runs the configured second stage on the state's current |p|^2, updating z
// and the click counter. Returns the binary output.
bool apply_click_stage(DetectorState& state, const ClickVariant& click, RngStream& rng);

enum class OutcomeKind { Click, NoClick, Miss };

struct Outcome {
  OutcomeKind kind = OutcomeKind::Miss;
  int index = -1;  // window index for Click/NoClick
};

/// An ordered row of identical, non-communicating detectors. Each detector
/// owns a spatial window; a message is handed to the detector whose window
/// contains the arrival position, all others never see it.
class DetectorArray {
 public:
  DetectorArray(std::vector<Window> windows, const DlmVariant& dlm, const ClickVariant& click);

  // `count` equal windows spanning [lo, hi).
  static DetectorArray uniform(int count, double lo, double hi, const DlmVariant& dlm,
                               const ClickVariant& click);

  Outcome process(const Arrival& arrival, const Message& message, RngStream& rng);

  int find_window(double position) const;  // -1 when no window contains it

  const std::vector<Window>& windows() const { return windows_; }
  const std::vector<DetectorState>& states() const { return states_; }
  const DetectorState& state(int i) const { return states_[static_cast<std::size_t>(i)]; }
  std::uint64_t total_clicks() const;
  std::uint64_t total_received() const;

 private:
  std::vector<Window> windows_;
  std::vector<DetectorState> states_;
  DlmVariant dlm_;
  ClickVariant click_;
  bool uniform_grid_ = false;
  double grid_lo_ = 0.0;
  double grid_step_ = 0.0;
};

// Initial state dictated by the variant pair (p0, w0, z0, zero counters).
DetectorState initial_state(const DlmVariant& dlm, const ClickVariant& click);

}  // namespace pev
