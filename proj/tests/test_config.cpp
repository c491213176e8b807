// Copyright (c) 2026 pneusim developers
// SPDX-License-Identifier: Apache-2.0

#include "core/config.hpp"

#include <doctest.h>

#include "core/error.hpp"
#include "testutil.hpp"

using namespace pneusim;
namespace tu = pneusim::testutil;

TEST_SUITE_BEGIN("config");

TEST_CASE("default config validates and round-trips through JSON") {
  const ToolkitConfig cfg = default_config();
  cfg.validate();
  const std::string text = cfg.to_json(false);
  const ToolkitConfig back = ToolkitConfig::from_json(text);
  CHECK(back.to_json(false) == text);
  CHECK(back.materials.body.coefficients[0] == doctest::Approx(1.9e2));
  CHECK(back.materials.limiting.youngs_modulus == doctest::Approx(6.5e6));
  CHECK(back.protocol.n_steps == 10);
  CHECK_FALSE(back.fatigue_resolved);
}

TEST_CASE("snapshot form omits the output directory") {
  ToolkitConfig cfg = default_config();
  cfg.output_dir = "/somewhere/else";
  CHECK(cfg.to_json(true).find("somewhere") == std::string::npos);
  ToolkitConfig other = cfg;
  other.output_dir = "elsewhere";
  CHECK(cfg.to_json(true) == other.to_json(true));
}

TEST_CASE("dimensioned keys without their unit suffix are rejected") {
  try {
    ToolkitConfig::from_json(R"({"geometry": {"chamber_width": 4.0}})");
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Config);
    CHECK(std::string(e.what()).find("chamber_width_mm") != std::string::npos);
  }
  CHECK_THROWS_AS(ToolkitConfig::from_json(R"({"protocol": {"hold_duration": 16}})"), Error);
  CHECK_THROWS_AS(ToolkitConfig::from_json(R"({"unknown_block": {}})"), Error);
}

TEST_CASE("material units convert into kPa") {
  const ToolkitConfig cfg = ToolkitConfig::from_json(R"({
    "materials": {
      "body": {"kind": "yeoh1", "unit": "MPa", "coefficients": [0.005]}
    }
  })");
  CHECK(cfg.materials.body.kind == HyperelasticKind::Yeoh1);
  CHECK(cfg.materials.body.coefficients[0] == doctest::Approx(5.0));  // MPa -> kPa
  CHECK(cfg.materials.body.bulk_penalty == doctest::Approx(2000.0 * 10.0));
}

TEST_CASE("material blocks require an explicit unit") {
  CHECK_THROWS_AS(ToolkitConfig::from_json(R"({
    "materials": {"body": {"kind": "yeoh1", "coefficients": [0.5]}}
  })"),
                  Error);
  CHECK_THROWS_AS(ToolkitConfig::from_json(R"({
    "materials": {"limiting": {"kind": "linear-elastic", "youngs_modulus": 6.5,
                                "poisson_ratio": 0.2}}
  })"),
                  Error);
  CHECK_THROWS_AS(ToolkitConfig::from_json(R"({
    "materials": {"body": {"kind": "yeoh1", "unit": "furlongs", "coefficients": [0.5]}}
  })"),
                  Error);
}

TEST_CASE("fatigue block: calibrate placeholder or a full parameter set") {
  const ToolkitConfig calibrate = ToolkitConfig::from_json(R"({"fatigue": "calibrate"})");
  CHECK_FALSE(calibrate.fatigue_resolved);

  const ToolkitConfig resolved = ToolkitConfig::from_json(R"({
    "fatigue": {"damage_rate_alpha": 0.03, "sigma_ref_kPa": 120.0,
                "softening_gain_gamma": 1.2, "creep_gain_deg_per_s_per_kPa": 0.2}
  })");
  CHECK(resolved.fatigue_resolved);
  CHECK(resolved.fatigue.damage_rate == doctest::Approx(0.03));
  CHECK(resolved.fatigue.creep_onset == doctest::Approx(32.5));  // default

  CHECK_THROWS_AS(ToolkitConfig::from_json(R"({"fatigue": "improvise"})"), Error);
  CHECK_THROWS_AS(ToolkitConfig::from_json(R"({"fatigue": {"damage_cap": 2.0}})"), Error);
}

TEST_CASE("cross-field validation") {
  // Protocol reaching beyond the simulated pressure range.
  CHECK_THROWS_AS(ToolkitConfig::from_json(R"({
    "simulate": {"max_pressure_kPa": 30.0}
  })"),
                  Error);
  // Degenerate geometry.
  CHECK_THROWS_AS(ToolkitConfig::from_json(R"({
    "geometry": {"n_chambers": 0}
  })"),
                  Error);
  CHECK_THROWS_AS(ToolkitConfig::from_json(R"({"trials": 0})"), Error);
}

TEST_CASE("config file IO") {
  const auto dir = tu::scratch_dir("config_io");
  ToolkitConfig cfg = default_config();
  cfg.seed = 777;
  cfg.save(dir / "config.json");
  const ToolkitConfig back = ToolkitConfig::load(dir / "config.json");
  CHECK(back.seed == 777);
  try {
    ToolkitConfig::load(dir / "missing.json");
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Config);
  }
  std::filesystem::remove_all(dir);
}

TEST_SUITE_END();
