#include <catch_amalgamated.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "adsplit/commands.hpp"
#include "adsplit/config.hpp"
#include "adsplit/csv.hpp"
#include "adsplit/errors.hpp"

using namespace adsplit;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("splitctl_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

// Exit status of the shell command.
int run(const std::string& command) {
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const std::string kSmallKpp = R"({
  // small front so the test stays quick
  "model": {"id": "kpp", "k": 1.0, "diffusion": 1.0},
  "grid": {"n": 201, "x_min": -20, "x_max": 20},
  "controller": {"eta": 1e-5, "dt0": 1e-3},
  "time": {"t0": 0, "t_end": 0.5, "snapshots": [0.25]}
})";

}  // namespace

TEST_CASE("empty config yields the documented defaults", "[cli]") {
  const RunConfig cfg = parse_config_text("");
  CHECK(cfg.model == ModelId::Kpp);
  CHECK(cfg.controller.eps0 == 0.05);
  CHECK(cfg.controller.upsilon == 0.9);
  CHECK(cfg.controller.zeta == 0.9);
  CHECK(cfg.controller.beta == 0.1);
  CHECK(cfg.controller.gamma == 0.95);
  CHECK(cfg.controller.theta == 10.0);
  CHECK(cfg.controller.rejection_offset == 10.0);
  CHECK(cfg.controller.eps_max == 0.999);
  CHECK(cfg.controller.big.b == 0.5);
  CHECK(cfg.controller.small.c == 0.1);
  CHECK(cfg.warnings.size() == 1);
  const RunConfig same = parse_config_text(R"({"model": {"id": "kpp"}})");
  CHECK(config_to_json(same) == config_to_json(cfg));
}

TEST_CASE("printed defaults parse back to the same configuration", "[cli]") {
  for (const char* id : {"kpp", "bz", "discharge"}) {
    const RunConfig cfg = parse_config_text(std::string(R"({"model": {"id": ")") + id + "\"}}");
    const RunConfig again = parse_config_text(config_to_json(cfg).dump());
    CHECK(config_to_json(again) == config_to_json(cfg));
  }
}

TEST_CASE("invariant violations are rejected with the key", "[cli]") {
  try {
    parse_config_text(R"({"controller": {"beta": 0.96}})");
    FAIL("expected a configuration error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("beta") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config_text(R"({"controller": {"etta": 1e-3}})"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"plot": {}})"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"model": {"id": "kpp", "mu": 1}})"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"controller": {"eta": "small"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"time": {"t_end": 1, "snapshots": [2]}})"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"model": {"id": "bz", "monitored": ["z"]}})"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"model": {"id": "heat"}})"), ConfigError);
}

TEST_CASE("large initial shift is accepted with a warning", "[cli]") {
  const RunConfig cfg = parse_config_text(R"({"controller": {"eps0": 0.6, "eps_max": 0.999}})");
  CHECK(cfg.controller.eps0 == 0.6);
  REQUIRE(cfg.warnings.size() == 1);
  CHECK(cfg.warnings[0].find("1/2") != std::string::npos);
}

TEST_CASE("parse errors carry line and column", "[cli]") {
  try {
    parse_config_text("{\n  \"model\": {\"id\": \"kpp\",}\n  oops\n}");
    FAIL("expected a parse error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("model-specific sections", "[cli]") {
  const RunConfig bz = parse_config_text(R"({
    "model": {"id": "bz", "excited_c": 0.3, "monitored": ["b", "c"]},
    "grid": {"n": 101}
  })");
  CHECK(bz.bz.excited_c == 0.3);
  CHECK(bz.bz.n == 101);
  CHECK(bz.make_model().monitored == std::vector<std::size_t>{1, 2});
  const RunConfig d = parse_config_text(R"({
    "model": {"id": "discharge", "recombination_sign": "as-printed"},
    "grid": {"x_max": 0.4},
    "controller": {"probe_policy": "at-steps", "probe_steps": [0, 10]}
  })");
  CHECK(d.discharge.recombination == RecombinationSign::AsPrinted);
  CHECK(d.discharge.gap == 0.4);
  CHECK(d.controller.probe_policy == ProbePolicy::AtSteps);
  CHECK(d.controller.probe_steps == std::vector<std::size_t>{0, 10});
  CHECK_THROWS_AS(parse_config_text(R"({"model": {"id": "discharge"}, "grid": {"x_min": 1}})"),
                  ConfigError);
}

TEST_CASE("csv formatting", "[cli]") {
  CHECK(format_double(0.1) == "1.0000000000000001e-01");
  CHECK(format_double(-3.0) == "-3.0000000000000000e+00");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  const fs::path dir = scratch_dir("csv");
  {
    CsvWriter w(dir / "a.csv", {"x", "y"});
    w << 1.0 << std::size_t{2};
    w.end_row();
    CHECK(fs::exists(dir / "a.csv.partial"));
    CHECK_FALSE(fs::exists(dir / "a.csv"));
    w << 1.0;
    CHECK_THROWS_AS(w.end_row(), Error);
  }
  CsvWriter w(dir / "b.csv", {"x"});
  w << 2.5;
  w.end_row();
  w.commit();
  CHECK(slurp(dir / "b.csv") == "x\n2.5000000000000000e+00\n");
  CHECK_FALSE(fs::exists(dir / "b.csv.partial"));
}

TEST_CASE("run writes steps, snapshots and summary", "[cli]") {
  const fs::path dir = scratch_dir("run");
  const RunConfig cfg = parse_config_text(kSmallKpp);
  std::ostringstream log;
  run_subcommand("run", cfg, dir, log);
  const auto steps = lines(dir / "steps.csv");
  REQUIRE(steps.size() > 1);
  CHECK(steps[0] == "t,dt,eps,err,dt_star,C0,omega,accepted,reason");
  CHECK(fs::exists(dir / "snapshot_000.csv"));
  CHECK(lines(dir / "snapshot_000.csv")[0] == "x,u");
  CHECK(lines(dir / "final.csv").size() == 202);
  const std::string summary = slurp(dir / "summary.csv");
  CHECK(summary.find("normalized_l2_error:max") != std::string::npos);

  // Accepted rows: err < eta and strictly increasing t.
  double last_t = -1.0;
  for (std::size_t i = 1; i < steps.size(); ++i) {
    std::vector<std::string> f;
    std::stringstream row(steps[i]);
    for (std::string c; std::getline(row, c, ',');) f.push_back(c);
    REQUIRE(f.size() >= 8);
    if (f[7] == "1") {
      CHECK(std::stod(f[3]) < 1e-5);
      CHECK(std::stod(f[0]) > last_t);
      last_t = std::stod(f[0]);
    }
  }
}

TEST_CASE("empty run gives a header-only steps file", "[cli]") {
  const fs::path dir = scratch_dir("empty");
  RunConfig cfg = parse_config_text(R"({"grid": {"n": 101}, "time": {"t0": 1, "t_end": 1}})");
  std::ostringstream log;
  run_subcommand("run", cfg, dir, log);
  CHECK(slurp(dir / "steps.csv") == "t,dt,eps,err,dt_star,C0,omega,accepted,reason\n");
}

TEST_CASE("study subcommands need the scalar model", "[cli]") {
  const fs::path dir = scratch_dir("stage");
  const RunConfig cfg = parse_config_text(R"({"model": {"id": "bz"}, "grid": {"n": 101}})");
  std::ostringstream log;
  try {
    run_subcommand("theory", cfg, dir, log);
    FAIL("expected a stage error");
  } catch (const StageError& e) {
    CHECK(e.stage() == "setup");
  }
}

TEST_CASE("theory and study-dtstar tables", "[cli]") {
  const fs::path dir = scratch_dir("theory");
  const RunConfig cfg = parse_config_text(R"({
    "grid": {"n": 1001, "x_min": -40, "x_max": 40},
    "study": {"k": [1], "eps": [0.05], "points": 5}
  })");
  std::ostringstream log;
  run_subcommand("theory", cfg, dir, log);
  const auto theory = lines(dir / "theory.csv");
  REQUIRE(theory.size() == 2);
  CHECK(theory[0] == "k,eps,M1,M2,dt_star_theory");
  CHECK(lines(dir / "profiles_k1.csv")[0] == "x,u0,leading_eps0.05");
  run_subcommand("study-dtstar", cfg, dir, log);
  const auto table = lines(dir / "table.csv");
  REQUIRE(table.size() == 2);
  CHECK(table[0] == "k,eps,dt_star_measured,dt_star_theory,relative_gap");
}

TEST_CASE("splitctl binary: exit codes, override and determinism", "[cli]") {
  const std::string exe = SPLITCTL_PATH;
  const fs::path dir = scratch_dir("binary");
  write(dir / "good.json", kSmallKpp);
  write(dir / "bad.json", R"({"controller": {"beta": 0.99}})");
  const std::string quiet = " 2>/dev/null >/dev/null";

  CHECK(run(exe + " run --config " + (dir / "bad.json").string() + " --out " +
            (dir / "x").string() + quiet) == 2);
  CHECK(run(exe + " fly --config " + (dir / "good.json").string() + " --out " +
            (dir / "x").string() + quiet) != 0);
  CHECK(run(exe + " --print-defaults > " + (dir / "defaults.json").string()) == 0);
  CHECK(slurp(dir / "defaults.json").find("\"gamma\": 0.95") != std::string::npos);

  const std::string good = exe + " run --config " + (dir / "good.json").string();
  REQUIRE(run(good + " --out " + (dir / "a").string() + " --threads 1" + quiet) == 0);
  REQUIRE(run(good + " --out " + (dir / "b").string() + " --threads 3" + quiet) == 0);
  for (const char* f : {"steps.csv", "final.csv", "summary.csv", "snapshot_000.csv"}) {
    INFO(f);
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  }
  REQUIRE(run("SPLITCTL_OUT_DIR=" + (dir / "env").string() + " " + good + " --out " +
              (dir / "ignored").string() + quiet) == 0);
  CHECK(fs::exists(dir / "env" / "steps.csv"));
  CHECK_FALSE(fs::exists(dir / "ignored"));

  // A failing stage exits with 1 and leaves no committed file behind.
  write(dir / "abort.json", R"({
    "grid": {"n": 101},
    "controller": {"dt0": 0.5},
    "solver": {"reaction_max_substeps": 1}
  })");
  CHECK(run(exe + " run --config " + (dir / "abort.json").string() + " --out " +
            (dir / "abort").string() + quiet) == 1);
  CHECK_FALSE(fs::exists(dir / "abort" / "final.csv"));
}
