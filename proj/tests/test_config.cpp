#include <numbers>
#include <regex>
#include <string>

#include "doctest.h"
#include "qmem/config.hpp"
#include "qmem/errors.hpp"

using namespace qmem;

namespace {

const char* kMinimal = R"({
  "schema_version": 1,
  "medium": { "optical_depth": 8.0 },
  "control": { "omega_over_gamma_c": 3.0 },
  "zeeman": { "Delta_ab_over_2pi_hz": 14000.0 },
  "counting": { "s": 0.12 }
})";

std::string error_of(const std::string& text) {
  try {
    parse_config(text, "t.json");
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

bool has_position(const std::string& msg, int line) {
  std::smatch m;
  static const std::regex re(R"(^t\.json:(\d+):(\d+): )");
  return std::regex_search(msg, m, re) && std::stoi(m[1]) == line;
}

}  // namespace

TEST_CASE("default config parses") {
  const ExperimentConfig c = load_config(QMEM_SOURCE_DIR "/configs/default.json");
  CHECK(c.medium.optical_depth == 8.0);
  CHECK(c.control.Omega == doctest::Approx(3.0 * c.scheme.Gamma_c));
  CHECK(c.Delta_ab() == doctest::Approx(2.0 * std::numbers::pi * 14000.0));
  CHECK(c.grid.n_f == 1024);
  CHECK(c.counting.source.trials == 1'000'000);
  CHECK(c.counting.source.detector == DetectorModel::PhotonCounting);
  CHECK(c.counting.sweep_s.size() == 8);
  CHECK(c.pipelines.size() == 4);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("minimal config fills defaults") {
  const ExperimentConfig c = parse_config(kMinimal, "t.json");
  CHECK(c.medium.length == 2e-3);
  CHECK(c.control.t_off == 10e-9);
  CHECK(c.counting.source.epsilon_2 == 0.15);
  CHECK(c.counting.source.w_i == 0.25);
  CHECK(c.counting.source.gates[kD1].width_ns == 140.0);
}

TEST_CASE("round trip through to_json") {
  const ExperimentConfig a = parse_config(kMinimal, "t.json");
  const std::string text = to_json(a).dump(2);
  const ExperimentConfig b = parse_config(text, "rt.json");
  CHECK(to_json(b).dump() == to_json(a).dump());
  CHECK(b.B_z() == doctest::Approx(a.B_z()));
}

TEST_CASE("field specified directly in gauss") {
  const ExperimentConfig c =
      parse_config(replace(kMinimal, R"("Delta_ab_over_2pi_hz": 14000.0)", R"("B_z_gauss": 0.01)"), "t.json");
  CHECK(c.B_z() == 0.01);
  CHECK(c.Delta_ab() > 0.0);
}

TEST_CASE("raman gain input") {
  const ExperimentConfig c = parse_config(replace(kMinimal, R"("s": 0.12)", R"("raman_gain": 0.5)"), "t.json");
  CHECK(c.counting.source.s == doctest::Approx(std::sinh(0.5) * std::sinh(0.5)));
  CHECK(c.counting.s_given_as_gain);
}

TEST_CASE("validation diagnostics name the problem") {
  const std::string no_medium = replace(kMinimal, R"("medium": { "optical_depth": 8.0 },)", "");
  CHECK(error_of(no_medium).find("medium") != std::string::npos);

  const std::string unknown = replace(kMinimal, R"("optical_depth": 8.0)", R"("optical_depth": 8.0, "colour": 1)");
  const std::string e1 = error_of(unknown);
  CHECK(e1.find("colour") != std::string::npos);
  CHECK(has_position(e1, 3));

  const std::string bad_type = replace(kMinimal, R"("s": 0.12)", R"("s": "many")");
  const std::string e2 = error_of(bad_type);
  CHECK(e2.find("\"s\"") != std::string::npos);
  CHECK(has_position(e2, 6));

  const std::string both = replace(kMinimal, R"("s": 0.12)", R"("s": 0.12, "raman_gain": 0.3)");
  CHECK(error_of(both).find("only one") != std::string::npos);

  const std::string neither = replace(kMinimal, R"("omega_over_gamma_c": 3.0)", R"("edge_s": 3e-8)");
  CHECK(error_of(neither).find("omega") != std::string::npos);

  const std::string negative = replace(kMinimal, R"("optical_depth": 8.0)", R"("optical_depth": -1)");
  CHECK(error_of(negative).find("optical_depth") != std::string::npos);

  CHECK(error_of(replace(kMinimal, R"("schema_version": 1)", R"("schema_version": 2)")).find("schema_version") !=
        std::string::npos);
  CHECK(error_of(replace(kMinimal, R"("s": 0.12)", R"("s": 0.12, "detector": "bolometer")")).find("detector") !=
        std::string::npos);
  CHECK_FALSE(error_of(replace(kMinimal, R"("schema_version": 1,)", R"("schema_version": 1, "pipelines": ["x"],)"))
                  .empty());
  CHECK_FALSE(error_of(replace(kMinimal, R"("s": 0.12)", R"("s": 0.12, "epsilon_2": 1.2)")).empty());
}

TEST_CASE("malformed JSON reports its position") {
  const std::string text = "{\n  \"schema_version\": 1,\n  \"medium\": { \"optical_depth\": 8.0 \n}";
  const std::string e = error_of(text);
  CHECK_FALSE(e.empty());
  CHECK(std::regex_search(e, std::regex(R"(^t\.json:\d+:\d+)")));
  CHECK_THROWS_AS(parse_config("[1, 2]", "t.json"), ValidationError);
  CHECK_THROWS_AS(load_config("/nonexistent/qmem.json"), ValidationError);
}
