#include "pev/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace pev {

namespace {

struct Entry {
  std::string value;
  bool consumed = false;
};

using Section = std::map<std::string, Entry>;

struct RawConfig {
  std::map<std::string, Section> sections;
  std::string name;

  bool has_section(const std::string& s) const { return sections.count(s) > 0; }

  std::optional<std::string> take(const std::string& section, const std::string& key) {
    auto sit = sections.find(section);
    if (sit == sections.end()) return std::nullopt;
    auto kit = sit->second.find(key);
    if (kit == sit->second.end()) return std::nullopt;
    kit->second.consumed = true;
    return kit->second.value;
  }

  [[noreturn]] void missing(const std::string& section, const std::string& key) const {
    throw ConfigurationError(name + ": missing required key [" + section + "] " + key);
  }

  void reject_unconsumed() const {
    for (const auto& [sname, section] : sections) {
      for (const auto& [key, entry] : section) {
        if (!entry.consumed)
          throw ConfigurationError(name + ": unknown key [" + sname + "] " + key);
      }
    }
  }
};

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

RawConfig tokenize(const std::string& text, const std::string& name) {
  RawConfig raw;
  raw.name = name;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigurationError(name + ":" + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      raw.sections[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos || section.empty())
      throw ConfigurationError(name + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigurationError(name + ":" + std::to_string(lineno) + ": empty key or value");
    if (!raw.sections[section].emplace(key, Entry{value, false}).second)
      throw ConfigurationError(name + ": duplicate key [" + section + "] " + key);
  }
  return raw;
}

double parse_number(const RawConfig& raw, const std::string& section, const std::string& key,
                    const std::string& value) {
  double out = 0.0;
  const char* begin = value.data();
  const char* end = begin + value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc{} || ptr != end)
    throw ConfigurationError(raw.name + ": bad number for [" + section + "] " + key + ": '" +
                             value + "'");
  return out;
}

std::uint64_t parse_u64(const RawConfig& raw, const std::string& section, const std::string& key,
                        const std::string& value) {
  std::uint64_t out = 0;
  const char* begin = value.data();
  const char* end = begin + value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc{} || ptr != end)
    throw ConfigurationError(raw.name + ": bad integer for [" + section + "] " + key + ": '" +
                             value + "'");
  return out;
}

// Length keys accept one of the suffixes _nm, _um, _mm, _m.
std::optional<double> take_length(RawConfig& raw, const std::string& section,
                                  const std::string& base) {
  static const std::pair<const char*, double> kUnits[] = {
      {"_nm", 1e-9}, {"_um", 1e-6}, {"_mm", 1e-3}, {"_m", 1.0}};
  std::optional<double> result;
  for (const auto& [suffix, factor] : kUnits) {
    const std::string key = base + suffix;
    if (auto v = raw.take(section, key)) {
      if (result)
        throw ConfigurationError(raw.name + ": [" + section + "] " + base +
                                 " given in more than one unit");
      result = parse_number(raw, section, key, *v) * factor;
    }
  }
  return result;
}

// Angle keys accept _deg or _rad.
std::optional<double> take_angle(RawConfig& raw, const std::string& section,
                                 const std::string& base) {
  std::optional<double> result;
  if (auto v = raw.take(section, base + "_deg"))
    result = parse_number(raw, section, base + "_deg", *v) * kPi / 180.0;
  if (auto v = raw.take(section, base + "_rad")) {
    if (result)
      throw ConfigurationError(raw.name + ": [" + section + "] " + base +
                               " given in more than one unit");
    result = parse_number(raw, section, base + "_rad", *v);
  }
  return result;
}

std::optional<double> take_number(RawConfig& raw, const std::string& section,
                                  const std::string& key) {
  if (auto v = raw.take(section, key)) return parse_number(raw, section, key, *v);
  return std::nullopt;
}

std::optional<std::uint64_t> take_u64(RawConfig& raw, const std::string& section,
                                      const std::string& key) {
  if (auto v = raw.take(section, key)) return parse_u64(raw, section, key, *v);
  return std::nullopt;
}

SourceKind parse_source_kind(const RawConfig& raw, const std::string& v) {
  if (v == "double_slit") return SourceKind::DoubleSlit;
  if (v == "gaussian_pair") return SourceKind::GaussianPair;
  if (v == "circular_pair") return SourceKind::CircularPair;
  if (v == "gaussian_line") return SourceKind::GaussianLine;
  throw ConfigurationError(raw.name + ": unknown source kind '" + v + "'");
}

GeometryKind parse_geometry_kind(const RawConfig& raw, const std::string& v) {
  if (v == "circular") return GeometryKind::CircularScreen2D;
  if (v == "flat") return GeometryKind::FlatScreen2D;
  if (v == "spherical") return GeometryKind::SphericalScreen3D;
  if (v == "biprism") return GeometryKind::Biprism;
  throw ConfigurationError(raw.name + ": unknown geometry kind '" + v + "'");
}

}  // namespace

LoadedConfig parse_config(const std::string& text, const std::string& name) {
  RawConfig raw = tokenize(text, name);
  LoadedConfig cfg;
  cfg.name = name;
  ExperimentConfig& exp = cfg.experiment;

  // [geometry] first: source defaults depend on the biprism angle.
  {
    auto kind = raw.take("geometry", "kind");
    if (!kind) raw.missing("geometry", "kind");
    exp.geometry.kind = parse_geometry_kind(raw, *kind);
    auto X = take_length(raw, "geometry", "X");
    if (!X) raw.missing("geometry", "X_mm");
    exp.geometry.screen_distance = *X;
    if (exp.geometry.kind == GeometryKind::Biprism) {
      auto xp = take_length(raw, "geometry", "Xprime");
      if (!xp) raw.missing("geometry", "Xprime_mm");
      exp.geometry.apex_x = *xp;
      auto alpha = take_angle(raw, "geometry", "alpha");
      if (!alpha) raw.missing("geometry", "alpha_deg");
      exp.geometry.summit_angle = *alpha;
      auto n = take_number(raw, "geometry", "n_refr");
      if (!n) raw.missing("geometry", "n_refr");
      exp.geometry.refractive_index = *n;
    }
    if (exp.geometry.kind == GeometryKind::SphericalScreen3D) {
      if (auto band = take_number(raw, "geometry", "band")) exp.geometry.band_half_sin = *band;
    }
  }

  // [source]
  {
    auto kind = raw.take("source", "kind");
    if (!kind) raw.missing("source", "kind");
    exp.source.kind = parse_source_kind(raw, *kind);
    switch (exp.source.kind) {
      case SourceKind::DoubleSlit:
      case SourceKind::CircularPair: {
        auto a = take_length(raw, "source", "a");
        if (!a) raw.missing("source", "a_nm");
        exp.source.a = *a;
        auto d = take_length(raw, "source", "d");
        if (!d) raw.missing("source", "d_nm");
        exp.source.d = *d;
        break;
      }
      case SourceKind::GaussianPair: {
        auto sigma = take_length(raw, "source", "sigma");
        if (!sigma) raw.missing("source", "sigma_nm");
        exp.source.sigma = *sigma;
        auto d = take_length(raw, "source", "d");
        if (!d) raw.missing("source", "d_nm");
        exp.source.d = *d;
        break;
      }
      case SourceKind::GaussianLine: {
        auto sigma = take_length(raw, "source", "sigma");
        if (!sigma) raw.missing("source", "sigma_mm");
        exp.source.sigma = *sigma;
        break;
      }
    }
    const auto beta_lo = take_angle(raw, "source", "beta_min");
    const auto beta_hi = take_angle(raw, "source", "beta_max");
    if (beta_lo.has_value() != beta_hi.has_value())
      throw ConfigurationError(name + ": beta_min and beta_max must be given together");
    if (beta_lo) {
      exp.source.beta_lo = *beta_lo;
      exp.source.beta_hi = *beta_hi;
    } else if (exp.source.kind == SourceKind::GaussianLine &&
               exp.geometry.kind == GeometryKind::Biprism) {
      // Biprism default: incidence confined to [-alpha/2, alpha/2).
      exp.source.beta_lo = -exp.geometry.summit_angle / 2;
      exp.source.beta_hi = exp.geometry.summit_angle / 2;
    }
    if (auto dir = raw.take("source", "direction")) {
      if (exp.source.kind != SourceKind::CircularPair)
        throw ConfigurationError(name + ": direction applies to circular_pair sources only");
      if (*dir == "hemisphere")
        exp.source.direction = DirectionMode::Hemisphere;
      else if (*dir == "inplane")
        exp.source.direction = DirectionMode::InPlane;
      else
        throw ConfigurationError(name + ": unknown direction mode '" + *dir + "'");
    }
  }

  // [detector]
  {
    auto count = take_u64(raw, "detector", "count");
    if (!count) raw.missing("detector", "count");
    if (*count < 1 || *count > 10'000'000)
      throw ConfigurationError(name + ": detector count out of range");
    exp.detectors.count = static_cast<int>(*count);
    const bool angular = exp.geometry.angular_position();
    const auto lo = angular ? take_angle(raw, "detector", "window_min")
                            : take_length(raw, "detector", "window_min");
    const auto hi = angular ? take_angle(raw, "detector", "window_max")
                            : take_length(raw, "detector", "window_max");
    if (!lo) raw.missing("detector", angular ? "window_min_deg" : "window_min_mm");
    if (!hi) raw.missing("detector", angular ? "window_max_deg" : "window_max_mm");
    exp.detectors.lo = *lo;
    exp.detectors.hi = *hi;
  }

  // [model]
  {
    auto dlm = raw.take("model", "dlm");
    if (!dlm) raw.missing("model", "dlm");
    if (*dlm == "I")
      exp.dlm.kind = DlmKind::I;
    else if (*dlm == "II")
      exp.dlm.kind = DlmKind::II;
    else if (*dlm == "III")
      exp.dlm.kind = DlmKind::III;
    else
      throw ConfigurationError(name + ": unknown dlm variant '" + *dlm + "'");
    auto gamma = take_number(raw, "model", "gamma");
    if (!gamma) raw.missing("model", "gamma");
    exp.dlm.gamma = *gamma;
    if (exp.dlm.kind != DlmKind::I) {
      auto kappa = take_number(raw, "model", "kappa");
      if (!kappa) raw.missing("model", "kappa");
      exp.dlm.kappa = *kappa;
      auto w0 = take_number(raw, "model", "w0");
      if (!w0) raw.missing("model", "w0");
      exp.dlm.w0 = *w0;
    }
    if (auto px = take_number(raw, "model", "p0_x")) exp.dlm.p0.x = *px;
    if (auto py = take_number(raw, "model", "p0_y")) exp.dlm.p0.y = *py;

    auto click = raw.take("model", "click");
    if (!click) raw.missing("model", "click");
    if (*click == "random")
      exp.click.kind = ClickKind::RandomThreshold;
    else if (*click == "deterministic")
      exp.click.kind = ClickKind::DeterministicDlm;
    else
      throw ConfigurationError(name + ": unknown click variant '" + *click + "'");
    if (exp.click.kind == ClickKind::DeterministicDlm) {
      auto nu = take_number(raw, "model", "nu");
      if (!nu) raw.missing("model", "nu");
      exp.click.nu = *nu;
    }
    if (auto z0 = take_number(raw, "model", "z0")) exp.click.z0 = *z0;
  }

  // [run]
  {
    auto lambda = take_length(raw, "run", "lambda");
    if (!lambda) raw.missing("run", "lambda_nm");
    exp.lambda = *lambda;
    if (auto seed = take_u64(raw, "run", "seed")) {
      exp.seed = *seed;
      cfg.seed_in_file = true;
    }
    const auto emitted = take_u64(raw, "run", "budget_emitted");
    const auto per_det = take_u64(raw, "run", "budget_received_per_detector");
    if (emitted.has_value() == per_det.has_value())
      throw ConfigurationError(
          name + ": give exactly one of budget_emitted, budget_received_per_detector");
    if (emitted) {
      exp.budget_kind = BudgetKind::Emitted;
      exp.budget = *emitted;
    } else {
      exp.budget_kind = BudgetKind::ReceivedPerDetector;
      exp.budget = *per_det;
    }
    if (auto v = take_u64(raw, "run", "oracle_samples")) cfg.oracle_samples = *v;
    if (auto v = take_u64(raw, "run", "ensemble_screens")) cfg.ensemble_screens = *v;
    if (auto v = take_u64(raw, "run", "ensemble_event_cap")) cfg.ensemble_event_cap = *v;
    if (auto v = take_u64(raw, "run", "transient_events"))
      cfg.transient_events = static_cast<std::size_t>(*v);
  }

  // [sweep] (optional)
  if (raw.has_section("sweep")) {
    SweepSpec sw;
    auto delta = take_angle(raw, "sweep", "delta_theta");
    if (!delta) raw.missing("sweep", "delta_theta_deg");
    sw.delta = *delta;
    auto total = take_u64(raw, "sweep", "n_total");
    if (!total) raw.missing("sweep", "n_total");
    sw.n_total = *total;
    if (auto lo = take_angle(raw, "sweep", "path_min")) sw.path_lo = *lo;
    if (auto hi = take_angle(raw, "sweep", "path_max")) sw.path_hi = *hi;
    auto list = raw.take("sweep", "n_sweeps");
    if (!list) raw.missing("sweep", "n_sweeps");
    std::istringstream items(*list);
    std::string item;
    while (std::getline(items, item, ',')) {
      item = trim(item);
      const auto v = parse_u64(raw, "sweep", "n_sweeps", item);
      if (v < 1) throw ConfigurationError(name + ": n_sweeps entries must be >= 1");
      cfg.sweep_counts.push_back(static_cast<int>(v));
    }
    if (cfg.sweep_counts.empty()) throw ConfigurationError(name + ": empty n_sweeps list");
    sw.n_sweeps = cfg.sweep_counts.front();
    exp.sweep = sw;
  }

  raw.reject_unconsumed();
  exp.validate();
  return cfg;
}

LoadedConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigurationError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string stem = path;
  if (const auto slash = stem.find_last_of("/\\"); slash != std::string::npos)
    stem.erase(0, slash + 1);
  if (const auto dot = stem.find_last_of('.'); dot != std::string::npos) stem.erase(dot);
  return parse_config(buf.str(), stem);
}

}  // namespace pev
