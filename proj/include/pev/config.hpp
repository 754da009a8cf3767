#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pev/experiments.hpp"

namespace pev {

// Experiment description loaded from an INI-style config file. Physical
// quantities carry their unit in the key name (lambda_nm, X_mm, alpha_deg);
// unknown or missing keys are rejected by name.
struct LoadedConfig {
  ExperimentConfig experiment;
  std::vector<int> sweep_counts;             // n_sweeps values (sweep runs)
  std::uint64_t oracle_samples = 10'000'000; // amplitude_mc sample count
  std::uint64_t ensemble_screens = 10'000;
  std::uint64_t ensemble_event_cap = 100'000'000;
  std::size_t transient_events = 5'000;
  bool seed_in_file = false;
  std::string name;  // config stem, used for output file names
};

LoadedConfig parse_config(const std::string& text, const std::string& name = "config");
LoadedConfig load_config_file(const std::string& path);

}  // namespace pev
