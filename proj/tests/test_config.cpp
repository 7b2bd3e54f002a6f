#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "srblab/config.hpp"
#include "srblab/errors.hpp"

using namespace srb;
using nlohmann::json;

TEST_CASE("empty document gives the defaults") {
  const ExperimentConfig cfg = parse_config(json::object());
  CHECK(cfg.base.map.gamma == 0.6);
  CHECK(cfg.base.map.amp_ratio() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cfg.base.skew.rho == 0.25);
  CHECK(cfg.base.roof.lambda1 == 11.83);
  CHECK(cfg.axis == Axis::Gamma);
  CHECK(cfg.deltas.size() == 5);
  CHECK(cfg.observables.size() == 9);
  CHECK(cfg.base.eigen.l2 == doctest::Approx((-11.0 - std::sqrt(1201.0)) / 2.0));
}

TEST_CASE("round trip through JSON") {
  json doc = json::parse(R"({
    "model": {"map": {"gamma": 0.65, "amp_ratio": 0.95}, "roof": {"tau0": 0.25}},
    "perturbation": {"axis": "rho", "deltas": [0.04, 0.02]},
    "numerics": {"n": 1024, "section": {"quad_points": 8}, "flow": {"truncation": 15}},
    "observables": ["1", "y"],
    "seed": 7,
    "output": {"dir": "elsewhere"}
  })");
  const ExperimentConfig a = parse_config(doc);
  CHECK(a.axis == Axis::Rho);
  CHECK(a.numerics.n == 1024);
  CHECK(a.numerics.section_lift.quad_points == 8);
  CHECK(a.numerics.flow.truncation == 15.0);
  CHECK(a.output_dir == "elsewhere");
  const ExperimentConfig b = parse_config(to_json(a));
  CHECK(to_json(a).dump() == to_json(b).dump());
  CHECK(a.base == b.base);
}

TEST_CASE("perturbation axes") {
  const ModelParams base;
  CHECK(perturb(base, Axis::Gamma, 0.01).map.gamma == doctest::Approx(0.61));
  CHECK(perturb(base, Axis::Gamma, 0.01).map.amp_ratio() == doctest::Approx(1.0));
  CHECK(perturb(base, Axis::AmpRatio, -0.05).map.amp_ratio() == doctest::Approx(0.95));
  const ModelParams d = perturb(base, Axis::Disc, 0.01);
  CHECK(d.map.disc == 0.01);
  CHECK(d.roof.disc == 0.01);
  CHECK(perturb(base, Axis::Lambda1, 1.0).roof.lambda1 == doctest::Approx(12.83));
  for (const char* name : {"gamma", "amp_ratio", "disc", "rho", "off", "tau0", "lambda1"}) {
    CHECK(to_string(parse_axis(name)) == name);
  }
  CHECK_THROWS_AS(parse_axis("beta"), ConfigError);
}

TEST_CASE("invalid configurations") {
  auto bad = [](const char* text) { return parse_config(json::parse(text)); };
  CHECK_THROWS_AS(bad(R"({"perturbation": {"deltas": [0.01, 0.02]}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"perturbation": {"deltas": [0.01, 0.0]}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"perturbation": {"deltas": []}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"observables": ["x", "w"]})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"numerics": {"n": 1023}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"model": {"map": {"amp_ratio": 1.2}}})"), ConfigError);
  // gamma + delta leaves the expanding range.
  CHECK_THROWS_AS(bad(R"({"model": {"map": {"gamma": 0.55, "amp_ratio": 0.9}},
                          "perturbation": {"deltas": [0.1]}})"),
                  ConfigError);
  CHECK_THROWS_AS(bad(R"({"modle": {}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"numerics": {"n": "big"}})"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}
