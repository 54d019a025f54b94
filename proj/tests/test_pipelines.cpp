#include <cmath>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "qmem/errors.hpp"
#include "qmem/pipelines.hpp"

using namespace qmem;
namespace fs = std::filesystem;

namespace {

const char* kSmall = R"({
  "schema_version": 1,
  "medium": { "optical_depth": 8.0 },
  "control": { "omega_over_gamma_c": 3.0 },
  "zeeman": { "Delta_ab_over_2pi_hz": 14000.0 },
  "spectrum": { "points": 41 },
  "larmor": { "points": 41 },
  "counting": { "s": 0.12, "trials": 20000, "seed": 4, "sweep_s": [0.05, 0.12] },
  "pipelines": ["spectrum", "larmor", "counting"]
})";

std::string with(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qmem_test_" + name);
  fs::remove_all(p);
  return p;
}

const Table& table(const FigureDataset& ds, const std::string& name) {
  for (const auto& t : ds.tables)
    if (t.name == name) return t;
  FAIL("missing table " << name);
  throw;
}

}  // namespace

TEST_CASE("an empty medium transmits everything") {
  const RunContext ctx = RunContext::from_text(with(kSmall, R"("optical_depth": 8.0)", R"("optical_depth": 0.0)"));
  const FigureDataset ds = cmd_spectrum(ctx);
  const Table& t = table(ds, "spectrum");
  for (const char* col : {"T_control_on", "T_control_off"})
    for (double v : t.column(col)) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("spectrum at resonance") {
  const FigureDataset ds = cmd_spectrum(RunContext::from_text(kSmall));
  const Table& t = table(ds, "spectrum");
  const std::size_t mid = t.rows.size() / 2;
  CHECK(t.column("delta_over_gamma_c")[mid] == doctest::Approx(0.0));
  CHECK(t.column("T_control_off")[mid] == doctest::Approx(std::exp(-8.0)).epsilon(1e-6));
  CHECK(t.column("T_control_on")[mid] > 0.99);
}

TEST_CASE("zero trials gives analytic curves only") {
  RunContext ctx = RunContext::from_text(kSmall);
  ctx.trials_override = 0;
  const FigureDataset ds = cmd_counting(ctx);
  CHECK(ds.tables.size() == 4);
  const Table& t = table(ds, "counting_source_gsi");
  for (double v : t.column("mc")) CHECK(std::isnan(v));
  CHECK(t.column("analytic")[1] == doctest::Approx(1.24 / 0.12));
  CHECK(ds.diagnostics["monte_carlo"] == false);
}

TEST_CASE("counting with trials matches the analytic curve") {
  const FigureDataset ds = cmd_counting(RunContext::from_text(kSmall));
  const Table& t = table(ds, "counting_source_gsi");
  const auto a = t.column("analytic"), m = t.column("mc"), se = t.column("se");
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(m[i] - a[i]) < 5.0 * se[i]);
  CHECK(table(ds, "counting_trials").rows.size() == 1000);
}

TEST_CASE("zero field leaves the collapse time unidentifiable") {
  const RunContext ctx =
      RunContext::from_text(with(kSmall, R"("Delta_ab_over_2pi_hz": 14000.0)", R"("Delta_ab_over_2pi_hz": 0.0)"));
  const FigureDataset ds = cmd_larmor(ctx);
  CHECK(ds.diagnostics["fit"]["tau_identifiable"] == false);
  for (double v : table(ds, "larmor").column("g_si")) CHECK(v == doctest::Approx(8.0));
}

TEST_CASE("larmor pipeline recovers the splitting") {
  const FigureDataset ds = cmd_larmor(RunContext::from_text(kSmall));
  CHECK(ds.diagnostics["extracted_larmor_hz"].get<double>() == doctest::Approx(14000.0).epsilon(0.05));
  CHECK(ds.diagnostics["fit"]["B"].get<double>() == doctest::Approx(7.0).epsilon(0.02));
}

TEST_CASE("outputs are byte-reproducible and the manifest hashes them") {
  const RunContext ctx = RunContext::from_text(kSmall, "small.json");
  const fs::path a = fresh_dir("a"), b = fresh_dir("b");
  const auto wa = cmd_figures(ctx, a);
  cmd_figures(ctx, b);
  REQUIRE(wa.size() == 3);
  for (const auto& w : wa) {
    for (const auto& f : w.files) {
      if (f.extension() != ".csv") continue;
      CHECK(read_file(f) == read_file(b / f.filename()));
    }
  }
  CHECK(read_file(a / "manifest.json") == read_file(b / "manifest.json"));

  const auto m = nlohmann::json::parse(read_file(a / "manifest.json"));
  CHECK(m["complete"] == true);
  CHECK(m["config_sha256"] == sha256_hex(kSmall));
  for (const auto& d : m["datasets"])
    for (const auto& f : d["files"])
      if (f.contains("sha256")) CHECK(f["sha256"] == sha256_hex(read_file(a / f["file"].get<std::string>())));

  const auto side = nlohmann::json::parse(read_file(a / "counting.json"));
  CHECK(side["config_sha256"] == sha256_hex(kSmall));
  CHECK(side["seed"] == 4);
  CHECK(side["wall_time_s"].get<double>() >= 0.0);

  const Table parsed = parse_csv(read_file(a / "spectrum.csv"), "spectrum");
  CHECK(parsed.columns.front() == "delta_over_gamma_c");
  CHECK(parsed.rows.size() == 41);
}

TEST_CASE("seed override changes Monte Carlo output and is recorded") {
  RunContext ctx = RunContext::from_text(kSmall);
  ctx.seed_override = 11;
  CHECK(ctx.seed() == 11);
  CHECK(ctx.effective_config().counting.source.seed == 11);
  const fs::path dir = fresh_dir("seed");
  run_pipeline(ctx, "counting", dir);
  const auto side = nlohmann::json::parse(read_file(dir / "counting.json"));
  CHECK(side["overrides"]["seed"] == 11);
  CHECK_FALSE(table(cmd_counting(ctx), "counting_source_gsi").column("mc") ==
              table(cmd_counting(RunContext::from_text(kSmall)), "counting_source_gsi").column("mc"));
}

TEST_CASE("a failing pipeline leaves a manifest naming it") {
  RunContext ctx = RunContext::from_file(QMEM_SOURCE_DIR "/tests/data/unconverged.json");
  ctx.config.pipelines = {"spectrum", "store"};
  const fs::path dir = fresh_dir("fail");
  CHECK_THROWS_AS(cmd_figures(ctx, dir), NumericalError);
  const auto m = nlohmann::json::parse(read_file(dir / "manifest.json"));
  CHECK(m["complete"] == false);
  CHECK(m["failed"] == "store");
  CHECK(m["datasets"].size() == 1);
  CHECK_FALSE(fs::exists(dir / "store_cw.csv"));
  CHECK_THROWS_AS(run_pipeline(ctx, "nope", dir), ValidationError);
}
