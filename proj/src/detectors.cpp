#include "pev/detectors.hpp"

#include <cmath>

namespace pev {

void DlmVariant::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("dlm: gamma must be in (0,1)");
  if (kind != DlmKind::I) {
    if (!(kappa > 0.0 && kappa < 1.0)) throw std::invalid_argument("dlm: kappa must be in (0,1)");
    if (!(w0 >= 0.0 && w0 <= 1.0)) throw std::invalid_argument("dlm: w0 must be in [0,1]");
  }
  if (!(p0.norm_sq() <= 1.0 + 1e-12)) throw std::invalid_argument("dlm: |p0| must be <= 1");
}

void ClickVariant::validate() const {
  if (kind == ClickKind::DeterministicDlm) {
    if (!(nu > 0.0 && nu < 1.0)) throw std::invalid_argument("click: nu must be in (0,1)");
  }
  if (!(z0 >= 0.0 && z0 <= 1.0)) throw std::invalid_argument("click: z0 must be in [0,1]");
}

void dlm_update(DetectorState& state, const Message& e, const DlmVariant& variant) {
  if (std::fabs(e.norm_sq() - 1.0) > 1e-12)
    throw std::invalid_argument("dlm_update: message must be a unit vector");
  const Vec2 ev = e.vec();
  switch (variant.kind) {
    case DlmKind::I: {
      state.p = variant.gamma * state.p + (1.0 - variant.gamma) * ev;
      break;
    }
    case DlmKind::II: {
      const double mu = variant.gamma * (1.0 - state.w);
      const Vec2 p_new = mu * state.p + (1.0 - mu) * ev;
      state.w = variant.kappa * state.w + (1.0 - variant.kappa) * (p_new - state.p).norm() / 2.0;
      state.p = p_new;
      break;
    }
    case DlmKind::III: {
      const double mu = variant.gamma * (1.0 - state.w);
      const Vec2 p_new = mu * state.p + (1.0 - mu) * ev;
      state.w = variant.kappa * state.w + (1.0 - variant.kappa) * (p_new - ev).norm() / 2.0;
      state.p = p_new;
      break;
    }
  }
  state.received += 1;
}

bool click_random(const Vec2& p, RngStream& rng) {
  return p.norm_sq() >= rng.uniform();
}

ClickDecision click_deterministic(double z, double psq, double nu) {
  const double keep = psq - nu * z;
  const double fire = keep - 1.0 + nu;
  const bool click = !(std::fabs(keep) < std::fabs(fire));
  return {click, nu * z + (1.0 - nu) * (click ? 1.0 : 0.0)};
}

bool apply_click_stage(DetectorState& state, const ClickVariant& click, RngStream& rng) {
  bool s;
  if (click.kind == ClickKind::RandomThreshold) {
    s = click_random(state.p, rng);
  } else {
    const ClickDecision d = click_deterministic(state.z, state.p.norm_sq(), click.nu);
    state.z = d.z_next;
    s = d.click;
  }
  if (s) state.clicks += 1;
  return s;
}

DetectorState initial_state(const DlmVariant& dlm, const ClickVariant& click) {
  DetectorState s;
  s.p = dlm.p0;
  s.w = dlm.kind == DlmKind::I ? 0.0 : dlm.w0;
  s.z = click.z0;
  return s;
}

DetectorArray::DetectorArray(std::vector<Window> windows, const DlmVariant& dlm,
                             const ClickVariant& click)
    : windows_(std::move(windows)), dlm_(dlm), click_(click) {
  dlm_.validate();
  click_.validate();
  if (windows_.empty()) throw ConfigurationError("detector array: no windows");
  for (std::size_t i = 0; i < windows_.size(); ++i) {
    if (!(windows_[i].lo < windows_[i].hi))
      throw ConfigurationError("detector array: empty window");
    if (i > 0 && windows_[i].lo < windows_[i - 1].hi)
      throw ConfigurationError("detector array: windows overlap or are out of order");
  }
  states_.assign(windows_.size(), initial_state(dlm_, click_));

  // Fast index lookup when the windows form a gapless uniform grid.
  const double step = windows_.front().width();
  uniform_grid_ = true;
  for (std::size_t i = 0; i < windows_.size(); ++i) {
    const double expect_lo = windows_.front().lo + static_cast<double>(i) * step;
    if (std::fabs(windows_[i].lo - expect_lo) > 1e-9 * std::fabs(step) ||
        std::fabs(windows_[i].width() - step) > 1e-9 * std::fabs(step)) {
      uniform_grid_ = false;
      break;
    }
  }
  grid_lo_ = windows_.front().lo;
  grid_step_ = step;
}

DetectorArray DetectorArray::uniform(int count, double lo, double hi, const DlmVariant& dlm,
                                     const ClickVariant& click) {
  if (count < 1) throw ConfigurationError("detector array: count must be >= 1");
  if (!(lo < hi)) throw ConfigurationError("detector array: empty span");
  std::vector<Window> windows;
  windows.reserve(static_cast<std::size_t>(count));
  const double step = (hi - lo) / count;
  for (int i = 0; i < count; ++i) {
    windows.push_back({lo + i * step, i + 1 == count ? hi : lo + (i + 1) * step});
  }
  return DetectorArray(std::move(windows), dlm, click);
}

int DetectorArray::find_window(double position) const {
  if (uniform_grid_) {
    const double f = (position - grid_lo_) / grid_step_;
    if (f < 0.0) return -1;
    const auto i = static_cast<std::size_t>(f);
    if (i >= windows_.size()) return -1;
    return windows_[i].contains(position) ? static_cast<int>(i) : -1;
  }
  // Binary search over the ordered windows.
  std::size_t lo = 0, hi = windows_.size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (windows_[mid].hi <= position)
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo < windows_.size() && windows_[lo].contains(position)) return static_cast<int>(lo);
  return -1;
}

Outcome DetectorArray::process(const Arrival& arrival, const Message& message, RngStream& rng) {
  const int idx = find_window(arrival.position);
  if (idx < 0) return {OutcomeKind::Miss, -1};
  DetectorState& st = states_[static_cast<std::size_t>(idx)];
  dlm_update(st, message, dlm_);
  const bool s = apply_click_stage(st, click_, rng);
  return {s ? OutcomeKind::Click : OutcomeKind::NoClick, idx};
}

std::uint64_t DetectorArray::total_clicks() const {
  std::uint64_t n = 0;
  for (const auto& s : states_) n += s.clicks;
  return n;
}

std::uint64_t DetectorArray::total_received() const {
  std::uint64_t n = 0;
  for (const auto& s : states_) n += s.received;
  return n;
}

}  // namespace pev
