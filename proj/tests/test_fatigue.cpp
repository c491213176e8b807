// Copyright (c) 2026 pneusim developers
// SPDX-License-Identifier: Apache-2.0

#include "core/fatigue.hpp"

#include <doctest.h>

#include "core/error.hpp"

using namespace pneusim;

namespace {

FatigueParams demo_params() {
  FatigueParams p;
  p.damage_rate = 0.02;
  p.stress_exponent = 2.0;
  p.sigma_ref = 100.0;
  p.damage_cap = 0.5;
  p.softening_gain = 0.6;
  p.creep_onset = 32.5;
  p.creep_gain = 0.05;
  p.response_time = 0.8;
  return p;
}

}  // namespace

TEST_SUITE_BEGIN("fatigue");

TEST_CASE("cycle update") {
  const FatigueParams p = demo_params();
  DamageState d;

  SUBCASE("zero damage rate leaves damage untouched") {
    FatigueParams frozen = p;
    frozen.damage_rate = 0.0;
    const DamageState next = cycle_update(d, 250.0, frozen);
    CHECK(next.damage == 0.0);
    CHECK(next.cycles == 1);
  }
  SUBCASE("stress below the threshold accumulates nothing") {
    const DamageState next = cycle_update(d, p.sigma_ref, p);
    CHECK(next.damage == 0.0);
    const DamageState next2 = cycle_update(d, 0.5 * p.sigma_ref, p);
    CHECK(next2.damage == 0.0);
  }
  SUBCASE("direct formula evaluation") {
    // alpha (peak/sigma_ref - 1)^m = 0.02 * (2 - 1)^2 = 0.02.
    const DamageState next = cycle_update(d, 2.0 * p.sigma_ref, p);
    CHECK(next.damage == doctest::Approx(0.02).epsilon(1e-14));
    CHECK(next.history.size() == 1);
    CHECK(next.history[0].delta_d == doctest::Approx(0.02));
  }
  SUBCASE("damage is non-decreasing and capped") {
    DamageState s;
    double prev = 0.0;
    for (int k = 0; k < 200; ++k) {
      s = cycle_update(s, 400.0, p);
      CHECK(s.damage >= prev);
      CHECK(s.damage <= p.damage_cap);
      prev = s.damage;
    }
    CHECK(s.damage == doctest::Approx(p.damage_cap));
    CHECK(s.cycles == 200);
  }
  SUBCASE("negative stress is rejected") {
    CHECK_THROWS_AS(cycle_update(d, -1.0, p), Error);
  }
}

TEST_CASE("softened angle") {
  const FatigueParams p = demo_params();

  SUBCASE("identity at zero damage") {
    for (double pr : {0.0, 10.0, 32.5, 40.0, 45.0})
      CHECK(softened_angle(120.0, pr, 0.0, p) == 120.0);
  }
  SUBCASE("identity at and below the onset pressure") {
    for (double d : {0.1, 0.3, 0.5}) {
      CHECK(softened_angle(120.0, p.creep_onset, d, p) == 120.0);
      CHECK(softened_angle(120.0, 10.0, d, p) == 120.0);
    }
  }
  SUBCASE("direct formula evaluation at the top of the ramp") {
    // gamma D r = 0.6 * 0.3 * 1.0 at p = onset + ramp width: 150 * 1.18 = 177.
    CHECK(softened_angle(150.0, p.creep_onset + p.softening_ramp_width, 0.3, p) ==
          doctest::Approx(177.0).epsilon(1e-14));
  }
  SUBCASE("monotone in damage, continuous in pressure") {
    double prev = softened_angle(150.0, 40.0, 0.0, p);
    for (double d : {0.1, 0.2, 0.3, 0.4, 0.5}) {
      const double v = softened_angle(150.0, 40.0, d, p);
      CHECK(v >= prev);
      prev = v;
    }
    const double eps = 1e-9;
    CHECK(softened_angle(150.0, p.creep_onset + eps, 0.3, p) ==
          doctest::Approx(softened_angle(150.0, p.creep_onset - eps, 0.3, p)).epsilon(1e-6));
    const double top = p.creep_onset + p.softening_ramp_width;
    CHECK(softened_angle(150.0, top + eps, 0.3, p) ==
          doctest::Approx(softened_angle(150.0, top - eps, 0.3, p)).epsilon(1e-6));
  }
}

TEST_CASE("creep rate") {
  const FatigueParams p = demo_params();
  CHECK(creep_rate(45.0, 0.0, p) == 0.0);
  CHECK(creep_rate(30.0, 0.4, p) == 0.0);  // below onset
  CHECK(creep_rate(p.creep_onset, 0.4, p) == 0.0);
  // k_c D (p - p_c) = 0.05 * 0.2 * 10 = 0.1 deg/s.
  CHECK(creep_rate(p.creep_onset + 10.0, 0.2, p) == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("parameter validation") {
  FatigueParams p = demo_params();
  p.damage_cap = 1.5;
  CHECK_THROWS_AS(p.validate(), Error);
  p = demo_params();
  p.stress_exponent = 0.5;
  CHECK_THROWS_AS(p.validate(), Error);
  p = demo_params();
  p.response_time = 0.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = demo_params();
  p.sigma_ref = 0.0;  // required because damage_rate > 0
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_SUITE_END();
