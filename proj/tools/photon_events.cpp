// Command-line front end: runs event-by-event interference experiments from
// INI-style config files and writes CSV profiles plus JSON sidecars.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "pev/config.hpp"
#include "pev/csv.hpp"
#include "pev/experiments.hpp"
#include "pev/oracle.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct GlobalOpts {
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::optional<std::uint64_t> events;
  bool quiet = false;
};

// Seed precedence: --seed, then the config file, then PHOTON_EVENTS_SEED.
void resolve_seed(pev::LoadedConfig& cfg, const GlobalOpts& opts) {
  if (opts.seed) {
    cfg.experiment.seed = *opts.seed;
    return;
  }
  if (cfg.seed_in_file) return;
  if (const char* env = std::getenv("PHOTON_EVENTS_SEED")) {
    cfg.experiment.seed = std::strtoull(env, nullptr, 10);
    return;
  }
  cfg.experiment.seed = 12345;
}

json config_json(const pev::ExperimentConfig& exp) {
  json j;
  const char* source_kind[] = {"double_slit", "gaussian_pair", "circular_pair", "gaussian_line"};
  const char* geometry_kind[] = {"circular", "flat", "spherical", "biprism"};
  const char* dlm_kind[] = {"I", "II", "III"};
  j["source"] = {{"kind", source_kind[static_cast<int>(exp.source.kind)]},
                 {"a_m", exp.source.a},
                 {"d_m", exp.source.d},
                 {"sigma_m", exp.source.sigma},
                 {"beta_lo_rad", exp.source.beta_lo},
                 {"beta_hi_rad", exp.source.beta_hi}};
  if (exp.source.kind == pev::SourceKind::CircularPair)
    j["source"]["direction"] =
        exp.source.direction == pev::DirectionMode::Hemisphere ? "hemisphere" : "inplane";
  j["geometry"] = {{"kind", geometry_kind[static_cast<int>(exp.geometry.kind)]},
                   {"X_m", exp.geometry.screen_distance}};
  if (exp.geometry.kind == pev::GeometryKind::Biprism) {
    j["geometry"]["Xprime_m"] = exp.geometry.apex_x;
    j["geometry"]["alpha_rad"] = exp.geometry.summit_angle;
    j["geometry"]["n_refr"] = exp.geometry.refractive_index;
  }
  if (exp.geometry.kind == pev::GeometryKind::SphericalScreen3D)
    j["geometry"]["band"] = exp.geometry.band_half_sin;
  j["detector"] = {{"count", exp.detectors.count},
                   {"window_lo", exp.detectors.lo},
                   {"window_hi", exp.detectors.hi}};
  j["model"] = {{"dlm", dlm_kind[static_cast<int>(exp.dlm.kind)]},
                {"gamma", exp.dlm.gamma},
                {"click", exp.click.kind == pev::ClickKind::RandomThreshold ? "random"
                                                                            : "deterministic"},
                {"p0", {exp.dlm.p0.x, exp.dlm.p0.y}},
                {"z0", exp.click.z0}};
  if (exp.dlm.kind != pev::DlmKind::I) {
    j["model"]["kappa"] = exp.dlm.kappa;
    j["model"]["w0"] = exp.dlm.w0;
  }
  if (exp.click.kind == pev::ClickKind::DeterministicDlm) j["model"]["nu"] = exp.click.nu;
  j["run"] = {{"lambda_m", exp.lambda},
              {"seed", exp.seed},
              {"budget", exp.budget},
              {"budget_kind", exp.budget_kind == pev::BudgetKind::Emitted
                                  ? "emitted"
                                  : "received_per_detector"}};
  if (exp.sweep) {
    j["sweep"] = {{"delta_rad", exp.sweep->delta},
                  {"n_total", exp.sweep->n_total},
                  {"n_sweeps", exp.sweep->n_sweeps},
                  {"path_lo_rad", exp.sweep->path_lo},
                  {"path_hi_rad", exp.sweep->path_hi}};
  }
  j["version"] = kVersion;
  return j;
}

void write_sidecar(const json& body, const fs::path& csv_path) {
  fs::path p = csv_path;
  p.replace_extension(".json");
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + p.string());
  out << body.dump(2) << '\n';
}

fs::path out_path(const GlobalOpts& opts, const std::string& stem, const std::string& suffix) {
  fs::create_directories(opts.out_dir);
  return fs::path(opts.out_dir) / (stem + suffix + ".csv");
}

int cmd_run(const std::string& config_path, const GlobalOpts& opts) {
  pev::LoadedConfig cfg = pev::load_config_file(config_path);
  resolve_seed(cfg, opts);
  if (opts.events) cfg.experiment.budget = *opts.events;

  const pev::RunResult result = pev::run_static(cfg.experiment);

  std::optional<std::vector<double>> oracle;
  if (pev::has_closed_form(cfg.experiment.source, cfg.experiment.geometry))
    oracle = pev::closed_form_on_windows(cfg.experiment.windows(), cfg.experiment.source,
                                         cfg.experiment.geometry, cfg.experiment.lambda);

  const fs::path csv = out_path(opts, cfg.name, "");
  pev::write_profile(result, oracle ? &*oracle : nullptr, csv.string(),
                     cfg.experiment.geometry.angular_position());
  json side = config_json(cfg.experiment);
  side["result"] = {{"emitted", result.emitted},
                    {"received", result.total_received()},
                    {"clicks", result.total_clicks()},
                    {"missed", result.missed},
                    {"detected_ratio", result.detected_ratio()}};
  write_sidecar(side, csv);

  if (!opts.quiet) {
    std::cout << "emitted " << result.emitted << ", received " << result.total_received()
              << ", clicks " << result.total_clicks() << ", detected/emitted "
              << pev::format_double(result.detected_ratio()) << "\n"
              << "wrote " << csv.string() << "\n";
  }
  return 0;
}

int cmd_sweep(const std::string& config_path, const GlobalOpts& opts) {
  pev::LoadedConfig cfg = pev::load_config_file(config_path);
  resolve_seed(cfg, opts);
  if (!cfg.experiment.sweep)
    throw pev::ConfigurationError(cfg.name + ": sweep subcommand needs a [sweep] section");
  if (opts.events) cfg.experiment.sweep->n_total = *opts.events;

  // One run per n_sweeps value, fanned out to worker threads; each run owns a
  // substream derived from the master seed so results do not depend on the
  // thread schedule.
  const std::vector<int>& counts = cfg.sweep_counts;
  std::vector<pev::RunResult> results(counts.size());
  std::vector<std::string> errors(counts.size());
  {
    std::vector<std::thread> workers;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      workers.emplace_back([&, i] {
        try {
          pev::ExperimentConfig exp = cfg.experiment;
          exp.sweep->n_sweeps = counts[i];
          if (counts.size() > 1)
            exp.seed = pev::RngStream(cfg.experiment.seed).substream(i).seed();
          results[i] = pev::run_sweep(exp);
        } catch (const std::exception& e) {
          errors[i] = e.what();
        }
      });
    }
    for (auto& w : workers) w.join();
  }
  for (const auto& err : errors)
    if (!err.empty()) throw std::runtime_error(err);

  for (std::size_t i = 0; i < counts.size(); ++i) {
    const fs::path csv = out_path(opts, cfg.name, "_sweeps" + std::to_string(counts[i]));
    pev::write_profile(results[i], nullptr, csv.string(), true);
    json side = config_json(cfg.experiment);
    side["sweep"]["n_sweeps"] = counts[i];
    if (counts.size() > 1)  // record the substream seed the run actually used
      side["run"]["seed"] = pev::RngStream(cfg.experiment.seed).substream(i).seed();
    side["result"] = {{"emitted", results[i].emitted},
                      {"received", results[i].total_received()},
                      {"clicks", results[i].total_clicks()},
                      {"discarded", results[i].discarded}};
    write_sidecar(side, csv);
    if (!opts.quiet) std::cout << "wrote " << csv.string() << "\n";
  }
  return 0;
}

int cmd_oracle(const std::string& config_path, const GlobalOpts& opts) {
  pev::LoadedConfig cfg = pev::load_config_file(config_path);
  resolve_seed(cfg, opts);
  if (opts.events) cfg.oracle_samples = *opts.events;
  const auto windows = cfg.experiment.windows();

  std::vector<double> values;
  std::string method;
  if (pev::has_closed_form(cfg.experiment.source, cfg.experiment.geometry)) {
    values = pev::closed_form_on_windows(windows, cfg.experiment.source, cfg.experiment.geometry,
                                         cfg.experiment.lambda);
    method = "closed_form";
  } else {
    pev::RngStream rng(cfg.experiment.seed);
    const auto mc = pev::amplitude_mc(windows, cfg.experiment.source, cfg.experiment.geometry,
                                      cfg.experiment.frequency(), cfg.oracle_samples, rng);
    values = mc.intensity;
    method = "amplitude_mc";
  }

  std::vector<double> positions;
  for (const auto& w : windows) positions.push_back(w.center());
  const fs::path csv = out_path(opts, cfg.name, "_oracle");
  pev::write_oracle_profile(positions, values, csv.string(),
                            cfg.experiment.geometry.angular_position());
  json side = config_json(cfg.experiment);
  side["oracle"] = {{"method", method}, {"samples", method == "amplitude_mc" ? cfg.oracle_samples : 0}};
  write_sidecar(side, csv);
  if (!opts.quiet) std::cout << "wrote " << csv.string() << " (" << method << ")\n";
  return 0;
}

int cmd_transient(const std::string& config_path, const GlobalOpts& opts) {
  pev::LoadedConfig cfg = pev::load_config_file(config_path);
  resolve_seed(cfg, opts);
  if (opts.events) cfg.transient_events = static_cast<std::size_t>(*opts.events);

  pev::TransientParams params;
  params.gamma = cfg.experiment.dlm.gamma;
  params.kappa = cfg.experiment.dlm.kappa;
  params.p0 = cfg.experiment.dlm.p0;
  params.w0 = cfg.experiment.dlm.w0;

  const auto seed = cfg.experiment.seed;
  const auto s1 = pev::run_transient(pev::TransientStream::SqrtPair, cfg.transient_events, seed, params);
  const auto s2 = pev::run_transient(pev::TransientStream::HalfTurn, cfg.transient_events, seed, params);
  const auto s3 = pev::run_transient(pev::TransientStream::FullTurn, cfg.transient_events, seed, params);

  std::vector<double> index(cfg.transient_events);
  for (std::size_t i = 0; i < index.size(); ++i) index[i] = static_cast<double>(i + 1);
  const fs::path csv = out_path(opts, cfg.name, "_transient");
  pev::write_table("event,sqrt_dlm1,sqrt_dlm2,halfturn_dlm1,halfturn_dlm2,fullturn_dlm1,fullturn_dlm2",
                   {index, s1.dlm1, s1.dlm2, s2.dlm1, s2.dlm2, s3.dlm1, s3.dlm2}, csv.string());
  json side = config_json(cfg.experiment);
  side["transient"] = {{"events", cfg.transient_events}};
  write_sidecar(side, csv);
  if (!opts.quiet) std::cout << "wrote " << csv.string() << "\n";
  return 0;
}

int cmd_ensemble(const std::string& config_path, const GlobalOpts& opts) {
  pev::LoadedConfig cfg = pev::load_config_file(config_path);
  resolve_seed(cfg, opts);
  if (opts.events) cfg.ensemble_screens = *opts.events;

  const pev::EnsembleResult res =
      pev::run_single_shot_ensemble(cfg.experiment, cfg.ensemble_screens, cfg.ensemble_event_cap);

  pev::RunResult as_profile;
  as_profile.positions = res.positions;
  as_profile.clicks = res.first_clicks;
  as_profile.received = res.first_clicks;
  const fs::path csv = out_path(opts, cfg.name, "_ensemble");
  pev::write_profile(as_profile, nullptr, csv.string(),
                     cfg.experiment.geometry.angular_position());
  json side = config_json(cfg.experiment);
  side["ensemble"] = {{"screens", cfg.ensemble_screens},
                      {"no_click_screens", res.no_click_screens},
                      {"event_cap", cfg.ensemble_event_cap},
                      {"emitted", res.emitted},
                      {"received", res.received},
                      {"missed", res.missed}};
  write_sidecar(side, csv);
  if (!opts.quiet) {
    std::cout << "screens " << cfg.ensemble_screens << ", no-click " << res.no_click_screens
              << "\nwrote " << csv.string() << "\n";
  }
  return 0;
}

int cmd_compare(const std::string& sim_path, const std::string& oracle_path, bool quiet) {
  const pev::ParsedProfile sim = pev::read_profile(sim_path);
  const pev::ParsedProfile ref = pev::read_profile(oracle_path);
  if (sim.positions.size() != ref.positions.size())
    throw std::runtime_error("compare: profiles have different grids");
  for (std::size_t i = 0; i < sim.positions.size(); ++i)
    if (std::abs(sim.positions[i] - ref.positions[i]) > 1e-6)
      throw std::runtime_error("compare: profiles have different grids");

  // Against a wave-theory profile (|mean phasor|^2 per window) the matching
  // simulation statistic is the per-window click rate; against another run's
  // counts, raw clicks compare directly.
  std::vector<double> sim_values;
  std::vector<double> oracle;
  if (!ref.oracle.empty()) {
    oracle = ref.oracle;
    for (std::size_t i = 0; i < sim.clicks.size(); ++i)
      sim_values.push_back(sim.received[i] > 0 ? static_cast<double>(sim.clicks[i]) /
                                                     static_cast<double>(sim.received[i])
                                               : std::numeric_limits<double>::quiet_NaN());
  } else {
    oracle.assign(ref.clicks.begin(), ref.clicks.end());
    sim_values.assign(sim.clicks.begin(), sim.clicks.end());
  }

  const pev::FitResult fit = pev::fit_and_compare(sim_values, oracle, sim.positions,
                                                  sim.positions.front(), sim.positions.back());
  std::cout << "scale " << pev::format_double(fit.scale) << "\nrms "
            << pev::format_double(fit.rms) << "\nvisibility_sim "
            << pev::format_double(fit.visibility_sim) << "\nvisibility_oracle "
            << pev::format_double(fit.visibility_oracle) << "\n";
  (void)quiet;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-by-event simulator of single-photon interference experiments"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  GlobalOpts opts;
  app.add_option("--seed", opts.seed, "Override the config seed");
  app.add_option("--out", opts.out_dir, "Output directory (default: current)");
  app.add_option("--events", opts.events, "Override the event/sample budget");
  app.add_flag("--quiet", opts.quiet, "Suppress the summary output");

  std::string config_path, sim_csv, oracle_csv;
  auto* run = app.add_subcommand("run", "Run a static-detector experiment");
  run->add_option("config", config_path, "Config file")->required();
  auto* sweep = app.add_subcommand("sweep", "Run the moving-detector sweep protocol");
  sweep->add_option("config", config_path, "Config file")->required();
  auto* oracle = app.add_subcommand("oracle", "Evaluate the wave-theory reference profile");
  oracle->add_option("config", config_path, "Config file")->required();
  auto* transient = app.add_subcommand("transient", "Trace |p|^2 for the detector machines");
  transient->add_option("config", config_path, "Config file")->required();
  auto* ensemble = app.add_subcommand("ensemble", "Aggregate first clicks over fresh screens");
  ensemble->add_option("config", config_path, "Config file")->required();
  auto* compare = app.add_subcommand("compare", "Fit and compare two profile CSVs");
  compare->add_option("sim", sim_csv, "Simulation CSV")->required();
  compare->add_option("oracle", oracle_csv, "Reference CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, opts);
    if (sweep->parsed()) return cmd_sweep(config_path, opts);
    if (oracle->parsed()) return cmd_oracle(config_path, opts);
    if (transient->parsed()) return cmd_transient(config_path, opts);
    if (ensemble->parsed()) return cmd_ensemble(config_path, opts);
    if (compare->parsed()) return cmd_compare(sim_csv, oracle_csv, opts.quiet);
  } catch (const pev::ConfigurationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const pev::GeometryViolation& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
