#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <clocale>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pev/config.hpp"
#include "pev/csv.hpp"
#include "pev/experiments.hpp"

using namespace pev;
namespace fs = std::filesystem;

namespace {

const std::string kSmallConfig = R"(
[source]
kind = double_slit
a_nm = 670
d_nm = 3350
beta_min_deg = -57
beta_max_deg = 57

[geometry]
kind = circular
X_mm = 0.05

[detector]
count = 40
window_min_deg = -57
window_max_deg = 57

[model]
dlm = I
click = random
gamma = 0.999

[run]
lambda_nm = 670
seed = 11
budget_emitted = 50000
)";

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "pev_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(PEV_BIN_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("config: full parse with units") {
  const LoadedConfig cfg = parse_config(kSmallConfig, "small");
  const ExperimentConfig& e = cfg.experiment;
  CHECK(e.source.kind == SourceKind::DoubleSlit);
  CHECK(e.source.a == doctest::Approx(670e-9).epsilon(1e-12));
  CHECK(e.source.d == doctest::Approx(3.35e-6).epsilon(1e-12));
  CHECK(e.source.beta_hi == doctest::Approx(57 * kPi / 180).epsilon(1e-12));
  CHECK(e.geometry.screen_distance == doctest::Approx(0.05e-3).epsilon(1e-12));
  CHECK(e.detectors.count == 40);
  CHECK(e.lambda == doctest::Approx(670e-9).epsilon(1e-12));
  CHECK(e.seed == 11);
  CHECK(e.budget == 50'000);
  CHECK(cfg.seed_in_file);
}

TEST_CASE("config: rejected inputs carry the offending key") {
  auto expect_error = [](std::string needle, std::string text) {
    try {
      parse_config(text, "t");
      FAIL("expected a configuration error for ", needle);
    } catch (const ConfigurationError& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };

  // Unknown key.
  expect_error("frobnicate", kSmallConfig + "frobnicate = 1\n");
  // Missing required key.
  std::string no_gamma = kSmallConfig;
  no_gamma.replace(no_gamma.find("gamma = 0.999"), 13, "");
  expect_error("gamma", no_gamma);
  // Duplicate unit spellings for the same quantity.
  expect_error("more than one unit", kSmallConfig + "\n[run]\nlambda_mm = 1\n");
  // Malformed number.
  std::string bad = kSmallConfig;
  bad.replace(bad.find("0.999"), 5, "fast");
  expect_error("gamma", bad);
  // Both budgets at once.
  expect_error("budget", kSmallConfig + "budget_received_per_detector = 5\n");
  // kappa required for variant II.
  std::string ii = kSmallConfig;
  ii.replace(ii.find("dlm = I\n"), 8, "dlm = II\n");
  expect_error("kappa", ii);
  // nu required for the deterministic click generator.
  std::string det = kSmallConfig;
  det.replace(det.find("click = random"), 14, "click = deterministic");
  expect_error("nu", det);
}

TEST_CASE("config: sweep section with a sweep-count list") {
  const std::string text = kSmallConfig + R"(
[sweep]
delta_theta_deg = 30
n_total = 600
n_sweeps = 1, 25,50
path_min_deg = -90
path_max_deg = 90
)";
  std::string one_detector = text;
  one_detector.replace(one_detector.find("count = 40"), 10, "count = 1");
  const LoadedConfig cfg = parse_config(one_detector, "sweepy");
  REQUIRE(cfg.experiment.sweep.has_value());
  CHECK(cfg.sweep_counts == std::vector<int>{1, 25, 50});
  CHECK(cfg.experiment.sweep->n_sweeps == 1);
  CHECK(cfg.experiment.sweep->n_total == 600);
}

TEST_CASE("config: biprism beta defaults to the summit-angle interval") {
  const std::string text = R"(
[source]
kind = gaussian_line
sigma_mm = 0.531

[geometry]
kind = biprism
X_mm = 60
Xprime_mm = 45
alpha_deg = 1
n_refr = 1.5631

[detector]
count = 10
window_min_mm = -1.4
window_max_mm = 1.4

[model]
dlm = I
click = random
gamma = 0.999

[run]
lambda_nm = 670
seed = 3
budget_emitted = 1000
)";
  const LoadedConfig cfg = parse_config(text, "bp");
  CHECK(cfg.experiment.source.beta_lo == doctest::Approx(-0.5 * kPi / 180).epsilon(1e-12));
  CHECK(cfg.experiment.source.beta_hi == doctest::Approx(0.5 * kPi / 180).epsilon(1e-12));
  CHECK_FALSE(cfg.seed_in_file == false);
}

TEST_CASE("csv: profile round trip at the written precision") {
  RunResult r;
  r.positions = {-0.5, 0.0, 0.75};
  r.clicks = {12, 0, 99};
  r.received = {20, 3, 120};
  const std::vector<double> oracle{1.0, 0.123456789, 0.0};
  const fs::path p = temp_dir() / "roundtrip.csv";
  write_profile(r, &oracle, p.string(), true);

  const ParsedProfile back = read_profile(p.string());
  REQUIRE(back.positions.size() == 3);
  CHECK(back.clicks == r.clicks);
  CHECK(back.received == r.received);
  for (int i = 0; i < 3; ++i) {
    CHECK(back.positions[i] ==
          doctest::Approx(r.positions[i] * 180 / kPi).epsilon(1e-8).scale(1.0));
    CHECK(back.oracle[i] == doctest::Approx(oracle[i]).epsilon(1e-8).scale(1.0));
  }

  const std::string text = slurp(p);
  CHECK(text.find("position,clicks,received,oracle_value\n") == 0);
  CHECK(text.find('\r') == std::string::npos);
}

TEST_CASE("csv: formatting is locale independent") {
  const std::string before = format_double(1234.5678901);
  // Locales with ',' decimal separators must not leak into the output.
  const char* applied = std::setlocale(LC_ALL, "de_DE.UTF-8");
  const std::string after = format_double(1234.5678901);
  std::setlocale(LC_ALL, "C");
  CHECK(before == after);
  CHECK(before.find(',') == std::string::npos);
  INFO("locale available: ", applied != nullptr);
}

TEST_CASE("csv: error paths") {
  RunResult empty;
  CHECK_THROWS(write_profile(empty, nullptr, "/tmp/x.csv", true));
  RunResult r;
  r.positions = {0.0};
  r.clicks = {1};
  r.received = {1};
  CHECK_THROWS(write_profile(r, nullptr, "/nonexistent_dir_zz/x.csv", true));
  CHECK_THROWS(read_profile("/nonexistent_dir_zz/x.csv"));
}

TEST_CASE("binary: run twice with one seed gives byte-identical outputs") {
  const fs::path dir = temp_dir();
  const fs::path cfg = dir / "small.cfg";
  std::ofstream(cfg) << kSmallConfig;

  const fs::path out1 = dir / "out1", out2 = dir / "out2";
  REQUIRE(run_binary("run " + cfg.string() + " --seed 42 --out " + out1.string() + " --quiet") == 0);
  REQUIRE(run_binary("run " + cfg.string() + " --seed 42 --out " + out2.string() + " --quiet") == 0);
  CHECK(slurp(out1 / "small.csv") == slurp(out2 / "small.csv"));
  CHECK(slurp(out1 / "small.json") == slurp(out2 / "small.json"));

  // A different seed must change the counts.
  const fs::path out3 = dir / "out3";
  REQUIRE(run_binary("run " + cfg.string() + " --seed 43 --out " + out3.string() + " --quiet") == 0);
  CHECK(slurp(out1 / "small.csv") != slurp(out3 / "small.csv"));
}

TEST_CASE("binary: oracle then compare against a run") {
  const fs::path dir = temp_dir();
  const fs::path cfg = dir / "small.cfg";
  std::ofstream(cfg) << kSmallConfig;
  const fs::path out = dir / "cmp";
  REQUIRE(run_binary("run " + cfg.string() + " --out " + out.string() + " --quiet") == 0);
  REQUIRE(run_binary("oracle " + cfg.string() + " --out " + out.string() + " --quiet") == 0);
  REQUIRE(run_binary("compare " + (out / "small.csv").string() + " " +
                     (out / "small_oracle.csv").string()) == 0);
}

TEST_CASE("binary: transient, ensemble and sweep subcommands produce tables") {
  const fs::path dir = temp_dir();
  const fs::path out = dir / "aux";

  const fs::path tcfg = dir / "tiny_transient.cfg";
  {
    std::string text = kSmallConfig;
    text += "transient_events = 500\n";
    std::ofstream(tcfg) << text;
  }
  REQUIRE(run_binary("transient " + tcfg.string() + " --out " + out.string() + " --quiet") == 0);
  CHECK(slurp(out / "tiny_transient_transient.csv").find("event,") == 0);

  const fs::path ecfg = dir / "tiny_ensemble.cfg";
  {
    std::string text = kSmallConfig;
    text += "ensemble_screens = 20\n";
    std::ofstream(ecfg) << text;
  }
  REQUIRE(run_binary("ensemble " + ecfg.string() + " --out " + out.string() + " --quiet") == 0);
  const ParsedProfile hist = read_profile((out / "tiny_ensemble_ensemble.csv").string());
  std::uint64_t sum = 0;
  for (auto c : hist.clicks) sum += c;
  CHECK(sum <= 20);

  const fs::path scfg = dir / "tiny_sweep.cfg";
  {
    std::string text = kSmallConfig;
    text.replace(text.find("count = 40"), 10, "count = 1");
    // The sweep path spans the full half circle; emit over all of it.
    text.replace(text.find("beta_min_deg = -57"), 18, "beta_min_deg = -90");
    text.replace(text.find("beta_max_deg = 57"), 17, "beta_max_deg = 90");
    text += R"(
[sweep]
delta_theta_deg = 30
n_total = 600
n_sweeps = 2
path_min_deg = -90
path_max_deg = 90
)";
    std::ofstream(scfg) << text;
  }
  REQUIRE(run_binary("sweep " + scfg.string() + " --out " + out.string() + " --quiet") == 0);
  const ParsedProfile swept = read_profile((out / "tiny_sweep_sweeps2.csv").string());
  CHECK(swept.positions.size() == 6);
}

TEST_CASE("binary: exit codes") {
  const fs::path dir = temp_dir();
  const fs::path bad = dir / "bad.cfg";
  std::ofstream(bad) << kSmallConfig << "mystery_key = 1\n";
  CHECK(run_binary("run " + bad.string() + " --quiet") == 2);
  CHECK(run_binary("run /nonexistent.cfg --quiet") == 2);

  // Geometry violation mid-run: a source wider than the screen circle.
  const fs::path violent = dir / "violent.cfg";
  {
    std::string text = kSmallConfig;
    const auto from = text.find("kind = double_slit");
    text.replace(from, text.find("beta_min_deg") - from,
                 "kind = gaussian_line\nsigma_mm = 0.2\n");
    std::ofstream(violent) << text;
  }
  CHECK(run_binary("run " + violent.string() + " --out " + (dir / "v").string() + " --quiet") == 3);
}

TEST_CASE("binary: a three-window run writes header plus three rows") {
  const fs::path dir = temp_dir();
  const fs::path cfg = dir / "three.cfg";
  {
    std::string text = kSmallConfig;
    text.replace(text.find("count = 40"), 10, "count = 3");
    std::ofstream(cfg) << text;
  }
  const fs::path out = dir / "three_out";
  REQUIRE(run_binary("run " + cfg.string() + " --out " + out.string() + " --quiet") == 0);
  const std::string text = slurp(out / "three.csv");
  std::size_t lines = 0;
  for (char ch : text) lines += ch == '\n';
  CHECK(lines == 4);
}

TEST_CASE("config parser survives mangled input with typed errors only") {
  RngStream rng(4711);
  const std::string garbage = "=#[],x \nqwe0.5";
  for (int trial = 0; trial < 2000; ++trial) {
    std::string text = kSmallConfig;
    // Random point mutations: insert, delete, or truncate.
    const int edits = 1 + static_cast<int>(rng.next_u64() % 4);
    for (int e = 0; e < edits && !text.empty(); ++e) {
      const auto pos = static_cast<std::size_t>(rng.next_u64() % text.size());
      switch (rng.next_u64() % 3) {
        case 0:
          text.insert(pos, 1, garbage[rng.next_u64() % garbage.size()]);
          break;
        case 1:
          text.erase(pos, 1);
          break;
        default:
          text.resize(pos);
          break;
      }
    }
    try {
      parse_config(text, "fuzz");
    } catch (const ConfigurationError&) {
    } catch (const std::invalid_argument&) {
    }
  }
}

TEST_CASE("every shipped preset parses and validates") {
  std::size_t seen = 0;
  for (const auto& entry : fs::directory_iterator(PEV_PRESET_DIR)) {
    if (entry.path().extension() != ".cfg") continue;
    ++seen;
    INFO("preset: ", entry.path().string());
    const LoadedConfig cfg = load_config_file(entry.path().string());
    CHECK(cfg.seed_in_file);  // presets must replay without external seeds
    if (entry.path().filename().string().rfind("fig8", 0) == 0) {
      REQUIRE(cfg.experiment.sweep.has_value());
      CHECK(cfg.sweep_counts == std::vector<int>{1, 25, 50, 100});
    }
  }
  CHECK(seen == 13);
}

TEST_CASE("binary: environment seed is the lowest-precedence fallback") {
  const fs::path dir = temp_dir();
  const fs::path cfg = dir / "noseed.cfg";
  {
    std::string text = kSmallConfig;
    const auto pos = text.find("seed = 11\n");
    text.replace(pos, 10, "");
    std::ofstream(cfg) << text;
  }
  const fs::path o1 = dir / "env1", o2 = dir / "env2", o3 = dir / "env3";
  const std::string base = std::string(PEV_BIN_PATH) + " run " + cfg.string();
  REQUIRE(WEXITSTATUS(std::system(
              ("PHOTON_EVENTS_SEED=77 " + base + " --out " + o1.string() + " --quiet").c_str())) == 0);
  REQUIRE(WEXITSTATUS(std::system(
              ("PHOTON_EVENTS_SEED=77 " + base + " --out " + o2.string() + " --quiet").c_str())) == 0);
  REQUIRE(WEXITSTATUS(std::system(("PHOTON_EVENTS_SEED=78 " + base + " --out " + o3.string() +
                                   " --quiet")
                                      .c_str())) == 0);
  CHECK(slurp(o1 / "noseed.csv") == slurp(o2 / "noseed.csv"));
  CHECK(slurp(o1 / "noseed.csv") != slurp(o3 / "noseed.csv"));
}
