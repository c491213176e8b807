// Copyright (c) 2026 pneusim developers
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: end-to-end checks of the toolkit against its contract,
// one PASS/FAIL line per criterion. Slow pieces (calibration, refinement)
// share intermediate artifacts; the process exit code is the number of
// failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "core/analysis.hpp"
#include "core/config.hpp"
#include "core/csvio.hpp"
#include "core/error.hpp"
#include "core/matfit.hpp"
#include "core/toolkit.hpp"
#include "testutil.hpp"

using namespace pneusim;
namespace fs = std::filesystem;
namespace tu = pneusim::testutil;

namespace {

struct Criterion {
  int id;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

std::vector<Criterion> g_results;

void run_criterion(int id, const std::string& title, const std::function<void(Criterion&)>& fn) {
  Criterion c{id, title};
  const auto t0 = std::chrono::steady_clock::now();
  try {
    fn(c);
    c.passed = c.detail.empty();
  } catch (const Error& e) {
    c.passed = false;
    c.detail = std::string("error: ") + e.what();
  } catch (const std::exception& e) {
    c.passed = false;
    c.detail = std::string("exception: ") + e.what();
  }
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << (c.passed ? "PASS" : "FAIL") << " criterion " << id << ": " << title << " ("
            << static_cast<int>(c.seconds * 1000) << " ms)";
  if (!c.detail.empty()) std::cout << " -- " << c.detail;
  std::cout << std::endl;
  g_results.push_back(std::move(c));
}

void expect(Criterion& c, bool ok, const std::string& what) {
  if (!ok && c.detail.empty()) c.detail = what;
}

// ---- criterion 1: material consistency ----------------------------------

void material_consistency(Criterion& c) {
  const std::vector<HyperelasticModel> kinds = {
      make_yeoh({0.5}), make_yeoh({0.5, 0.02}), ecoflex50_yeoh3(), make_mooney_rivlin(1.0, 0.25)};
  std::mt19937_64 rng(0xACCE9701ULL);
  for (const auto& model : kinds) {
    const double scale = small_strain_moduli(model).shear;
    double worst_s = 0.0, worst_t = 0.0;
    for (int k = 0; k < 100; ++k) {
      const Mat2 f = tu::random_gradient(rng, 0.9, 1.1);
      const Mat2 cc = f.transpose() * f;
      const StressTangent st = pk2_stress_and_tangent(model, cc);
      const Mat2 s_fd = tu::fd_pk2(
          [&](const Mat2& x) { return strain_energy_from_C(model, x); }, cc, 1e-6);
      worst_s = std::max(worst_s,
                         (st.stress - s_fd).norm() / std::max(st.stress.norm(), 1e-9 * scale));
      const Tensor4 t_fd = tu::fd_tangent(
          [&](const Mat2& x) { return pk2_stress_and_tangent(model, x).stress; }, cc, 1e-5);
      worst_t = std::max(worst_t, tu::tensor_rel_err(st.tangent, t_fd, 1e-9 * scale));
    }
    expect(c, worst_s < 1e-6,
           to_string(model.kind) + ": stress FD mismatch " + format_double(worst_s));
    expect(c, worst_t < 1e-5,
           to_string(model.kind) + ": tangent FD mismatch " + format_double(worst_t));
  }
}

// ---- criterion 2: fit recovery -------------------------------------------

void fit_recovery(Criterion& c) {
  const std::vector<double> truth = {1.9e2, 9e-4, -4.75e-6};
  const HyperelasticModel gen = make_yeoh(truth);
  UniaxialDataset data;
  data.label = "acceptance";
  for (double lam : {1.1, 1.5, 2.0, 3.0, 5.0, 7.0, 9.0})
    data.samples.push_back({lam, uniaxial_nominal_stress(gen, lam)});
  const FitResult fit = fit_yeoh(data, 3);
  for (int i = 0; i < 3; ++i) {
    const double err = tu::rel_err(fit.model.coefficients[static_cast<std::size_t>(i)],
                                   truth[static_cast<std::size_t>(i)]);
    expect(c, err < 1e-8,
           "coefficient " + std::to_string(i) + " relative error " + format_double(err));
  }
}

// ---- criterion 3: patch test + zero load --------------------------------

void patch_and_zero_load(Criterion& c, const ToolkitConfig& default_cfg) {
  // Homogeneous follower-traction patch against a test-side scalar oracle.
  const HyperelasticModel material = make_yeoh({0.5});
  const double pressure = 0.12;
  const double c10 = material.coefficients[0];
  const double bulk = material.bulk_penalty;
  const auto energy = [&](double c1, double c2) {
    const double j = std::sqrt(c1 * c2);
    const double i1_bar = std::pow(j, -2.0 / 3.0) * (c1 + c2 + 1.0);
    return c10 * (i1_bar - 3.0) + 0.5 * bulk * (j - 1.0) * (j - 1.0);
  };
  const auto cauchy = [&](double a, double b) {
    const double h = 1e-7, c1 = a * a, c2 = b * b, j = a * b;
    const double s1 = (energy(c1 + h, c2) - energy(c1 - h, c2)) / h;
    const double s2 = (energy(c1, c2 + h) - energy(c1, c2 - h)) / h;
    return std::pair<double, double>{c1 * s1 / j, c2 * s2 / j};
  };
  double a = 1.0, b = 1.0;
  for (int it = 0; it < 80; ++it) {
    const auto [syy, szz] = cauchy(a, b);
    const double r1 = syy + pressure, r2 = szz;
    const double h = 1e-7;
    const auto [syy_a, szz_a] = cauchy(a + h, b);
    const auto [syy_b, szz_b] = cauchy(a, b + h);
    const double j11 = (syy_a - syy) / h, j12 = (syy_b - syy) / h;
    const double j21 = (szz_a - szz) / h, j22 = (szz_b - szz) / h;
    const double det = j11 * j22 - j12 * j21;
    a -= (j22 * r1 - j12 * r2) / det;
    b -= (-j21 * r1 + j11 * r2) / det;
  }

  const Mesh mesh = mesh_rectangle(1.0, 1.0, 0.25);
  FemProblem problem;
  problem.mesh = &mesh;
  problem.materials = {material, material, material, {6.5e6, 0.2}};
  for (int n = 0; n < mesh.node_count(); ++n) {
    const Vec2& p = mesh.nodes[static_cast<std::size_t>(n)];
    if (p(0) < 1e-9) problem.fixed_dofs.emplace_back(n, 0);
    if (p(1) < 1e-9) problem.fixed_dofs.emplace_back(n, 1);
  }
  problem.pressure_edges =
      outline_edges_where(mesh, [](const Vec2& mid) { return mid(0) > 1.0 - 1e-9; });
  FemState state = initial_state(problem);
  const NewtonReport rep = newton_solve(problem, state, pressure);
  expect(c, rep.converged, "patch solve did not converge");
  double worst = 0.0;
  for (int n = 0; n < mesh.node_count(); ++n) {
    const Vec2& X = mesh.nodes[static_cast<std::size_t>(n)];
    worst = std::max(worst, std::abs(state.displacement(2 * n) - (a - 1.0) * X(0)));
    worst = std::max(worst, std::abs(state.displacement(2 * n + 1) - (b - 1.0) * X(1)));
  }
  const double scale = std::max(std::abs(a - 1.0), std::abs(b - 1.0));
  expect(c, worst < 0.005 * scale,
         "patch displacement off by " + format_double(worst / scale * 100.0) + "%");

  // Zero pressure on the real geometry: equilibrium at zero displacement.
  const BuiltModel model = build_model(default_cfg);
  const FemProblem pneu = model.problem();
  FemState rest = initial_state(pneu);
  const NewtonReport rest_rep = newton_solve(pneu, rest, 0.0);
  expect(c, rest_rep.converged && rest.displacement.norm() == 0.0,
         "zero-pressure state is not the trivial equilibrium");
}

// ---- criterion 7: angle extraction ---------------------------------------

void angle_extraction(Criterion& c, const Mesh& mesh) {
  VecX u(2 * mesh.node_count());
  for (int n = 0; n < mesh.node_count(); ++n) {
    const Vec2& p = mesh.nodes[static_cast<std::size_t>(n)];
    u(2 * n) = p(1) - p(0);        // clockwise 90 degrees: (y,z) -> (z,-y)
    u(2 * n + 1) = -p(0) - p(1);
  }
  const double ninety = bending_angle(mesh, u);
  expect(c, std::abs(ninety - 90.0) < 1e-9,
         "rigid 90-degree rotation read " + format_double(ninety));

  const double arc_deg = 212.0;
  const double radius = mesh.length / (arc_deg * std::numbers::pi / 180.0);
  for (int n = 0; n < mesh.node_count(); ++n) {
    const Vec2& p = mesh.nodes[static_cast<std::size_t>(n)];
    const double phi = p(0) / radius;
    u(2 * n) = (radius + p(1)) * std::sin(phi) - p(0);
    u(2 * n + 1) = -radius + (radius + p(1)) * std::cos(phi) - p(1);
  }
  const double arc = bending_angle(mesh, u);
  expect(c, std::abs(arc - arc_deg) < 0.5, "212-degree arc map read " + format_double(arc));
}

// ---- shared pipeline state ------------------------------------------------

struct Pipeline {
  ToolkitConfig calibrated;
  StaticCurve curve50;          // calibrated, 0..50 kPa
  bool calibration_ok = false;
  double calibration_seconds = 0.0;
};

int count_failures() {
  int n = 0;
  for (const Criterion& c : g_results)
    if (!c.passed) ++n;
  return n;
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli_path;
  fs::path workdir = "acceptance_work";
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--cli") cli_path = argv[i + 1];
    if (flag == "--workdir") workdir = argv[i + 1];
  }
  fs::remove_all(workdir);
  fs::create_directories(workdir);

  const ToolkitConfig default_cfg = default_config();
  Pipeline pipe;

  run_criterion(1, "material stress/tangent consistency vs finite differences",
                material_consistency);
  run_criterion(2, "order-3 Yeoh fit recovers Ecoflex coefficients to 1e-8", fit_recovery);
  run_criterion(3, "homogeneous traction patch + zero-load equilibrium",
                [&](Criterion& c) { patch_and_zero_load(c, default_cfg); });

  // Criterion 5 work happens first: later criteria reuse the calibrated model.
  run_criterion(5, "static calibration lands 167 deg +/- 2 at 45 kPa, monotone to 50",
                [&](Criterion& c) {
                  const auto t0 = std::chrono::steady_clock::now();
                  CalibrationOutcome outcome = calibrate_command(default_cfg, workdir / "cal");
                  pipe.calibrated = std::move(outcome.config);
                  pipe.calibration_seconds =
                      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                          .count();
                  expect(c, std::abs(outcome.statics.achieved_angle - 167.0) <= 2.0,
                         "achieved angle " + format_double(outcome.statics.achieved_angle));
                  expect(c, outcome.statics.ramps_used <= 12,
                         "used " + std::to_string(outcome.statics.ramps_used) + " ramps");

                  pipe.curve50 = simulate_static_command(pipe.calibrated, workdir / "static").curve;
                  const CurveSample& at45 = pipe.curve50.sample_at(45.0);
                  expect(c, std::abs(at45.angle_deg - 167.0) <= 2.0,
                         "curve at 45 kPa reads " + format_double(at45.angle_deg));
                  for (std::size_t i = 1; i < pipe.curve50.samples.size(); ++i)
                    expect(c,
                           pipe.curve50.samples[i].angle_deg >
                               pipe.curve50.samples[i - 1].angle_deg,
                           "angle not strictly increasing at sample " + std::to_string(i));
                  pipe.calibration_ok = c.detail.empty();
                });

  run_criterion(4, "mesh convergence: theta(45 kPa) within 2% between h=2.5 and h=1.25",
                [&](Criterion& c) {
                  if (!pipe.calibration_ok) {
                    expect(c, false, "skipped: calibration failed");
                    return;
                  }
                  const double coarse = pipe.curve50.sample_at(45.0).angle_deg;
                  ToolkitConfig fine_cfg = pipe.calibrated;
                  fine_cfg.mesh_target_h = 1.25;
                  fine_cfg.simulate_max_pressure = 45.0;
                  const StaticCurve fine = simulate_static_command(fine_cfg, {}).curve;
                  const double fine45 = fine.sample_at(45.0).angle_deg;
                  const double rel = std::abs(coarse - fine45) / fine45;
                  expect(c, rel < 0.02,
                         "theta(45) " + format_double(coarse) + " vs " + format_double(fine45) +
                             " (" + format_double(rel * 100.0) + "%)");
                });

  run_criterion(6, "von Mises hotspot at 50 kPa sits in an interior wall", [&](Criterion& c) {
    if (!pipe.calibration_ok) {
      expect(c, false, "skipped: calibration failed");
      return;
    }
    const CurveSample& at50 = pipe.curve50.sample_at(50.0);
    expect(c, at50.hotspot.kind == RegionKind::InteriorWall,
           "hotspot region is " + to_string(at50.hotspot));
    expect(c, at50.max_vm > 0.0, "hotspot stress is zero");
  });

  run_criterion(7, "angle extraction: rigid 90 deg to 1e-9, arc map 212 deg to 0.5 deg",
                [&](Criterion& c) {
                  const Mesh mesh = generate_mesh(default_cfg.geometry, 2.5);
                  angle_extraction(c, mesh);
                });

  run_criterion(8, "calibrated campaign reproduces the fatigue error growth",
                [&](Criterion& c) {
                  if (!pipe.calibration_ok) {
                    expect(c, false, "skipped: calibration failed");
                    return;
                  }
                  const auto t0 = std::chrono::steady_clock::now();
                  const Campaign campaign =
                      run_campaign(pipe.curve50, pipe.calibrated.fatigue,
                                   pipe.calibrated.protocol, pipe.calibrated.noise,
                                   pipe.calibrated.seed, pipe.calibrated.trials);
                  const CampaignReport report =
                      analyze_campaign(campaign.logs, pipe.calibrated.protocol, pipe.curve50,
                                       pipe.calibrated.to_json(true));
                  const double seconds =
                      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                          .count();

                  const std::vector<double>& nrmse_pct = report.trial_nrmse_pct;
                  expect(c, nrmse_pct.size() == 10, "expected 10 trials");
                  expect(c, nrmse_pct.front() <= 5.0,
                         "trial-1 NRMSE " + format_double(nrmse_pct.front()) + "%");
                  expect(c, std::abs(nrmse_pct.back() - 20.0) <= 2.0,
                         "trial-10 NRMSE " + format_double(nrmse_pct.back()) + "%");
                  for (std::size_t k = 1; k < nrmse_pct.size(); ++k)
                    expect(c, nrmse_pct[k] >= nrmse_pct[k - 1] - 1e-9,
                           "NRMSE decreased between trials " + std::to_string(k) + " and " +
                               std::to_string(k + 1));

                  for (std::size_t t = 0; t < report.trial_errors.size(); ++t)
                    for (const StepError& e : report.trial_errors[t])
                      if (e.pressure <= 25.0 + 1e-9)
                        expect(c, e.abs_error < 5.0,
                               "trial " + std::to_string(t + 1) + " error " +
                                   format_double(e.abs_error) + " deg at " +
                                   format_double(e.pressure) + " kPa");

                  // Trial 2: the two largest deviations sit at 40 and 45 kPa.
                  const auto& trial2 = report.trial_errors[1];
                  std::vector<std::size_t> order(trial2.size());
                  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
                  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
                    return trial2[x].abs_error > trial2[y].abs_error;
                  });
                  const std::set<double> top2 = {trial2[order[0]].pressure,
                                                 trial2[order[1]].pressure};
                  expect(c, top2 == std::set<double>{40.0, 45.0},
                         "trial-2 largest errors at " + format_double(trial2[order[0]].pressure) +
                             " and " + format_double(trial2[order[1]].pressure) + " kPa");

                  // Trial 10: non-plateau exactly at the three highest pressures.
                  const auto& trial10 = report.trial_steps[9];
                  for (const StepSummary& s : trial10) {
                    const bool should_creep = s.pressure >= 35.0 - 1e-9;
                    expect(c, s.plateau != should_creep,
                           "trial-10 step " + format_double(s.pressure) + " kPa " +
                               (s.plateau ? "plateaued" : "did not plateau"));
                  }
                  expect(c, seconds < 30.0,
                         "campaign + analysis took " + format_double(seconds) + " s");
                });

  run_criterion(9, "run-campaign is byte-deterministic for a fixed config and seed",
                [&](Criterion& c) {
                  if (!pipe.calibration_ok) {
                    expect(c, false, "skipped: calibration failed");
                    return;
                  }
                  const fs::path cfg_path = workdir / "cal" / "calibrated_config.json";
                  if (!cli_path.empty()) {
                    const auto invoke = [&](const std::string& out) {
                      std::ostringstream cmd;
                      cmd << cli_path << " run-campaign --config " << cfg_path << " --out "
                          << out << " > " << out << ".log 2>&1";
                      return std::system(cmd.str().c_str());
                    };
                    const fs::path run_a = workdir / "det_a";
                    const fs::path run_b = workdir / "det_b";
                    expect(c, invoke(run_a.string()) == 0, "first CLI run failed");
                    expect(c, invoke(run_b.string()) == 0, "second CLI run failed");
                    if (c.detail.empty())
                      expect(c,
                             read_text_file(run_a / "report.json") ==
                                 read_text_file(run_b / "report.json"),
                             "report.json differs between identical CLI runs");
                  } else {
                    const ToolkitConfig cfg = ToolkitConfig::load(cfg_path);
                    run_campaign_command(cfg, workdir / "det_a", false);
                    run_campaign_command(cfg, workdir / "det_b", false);
                    expect(c,
                           read_text_file(workdir / "det_a" / "report.json") ==
                               read_text_file(workdir / "det_b" / "report.json"),
                           "report.json differs between identical runs");
                  }
                });

  run_criterion(10, "identity-fatigue control: no drift without damage", [&](Criterion& c) {
    if (!pipe.calibration_ok) {
      expect(c, false, "skipped: calibration failed");
      return;
    }
    ToolkitConfig cfg = pipe.calibrated;
    cfg.noise.enabled = false;
    const CampaignOutcome outcome = run_campaign_command(cfg, workdir / "identity", true);
    const fs::path dir = workdir / "identity";
    const std::string p1 = read_text_file(dir / "trial_1_pressure.csv");
    const std::string a1 = read_text_file(dir / "trial_1_angle.csv");
    for (int k = 2; k <= cfg.trials; ++k) {
      expect(c,
             read_text_file(dir / ("trial_" + std::to_string(k) + "_pressure.csv")) == p1,
             "trial " + std::to_string(k) + " pressure log differs from trial 1");
      expect(c, read_text_file(dir / ("trial_" + std::to_string(k) + "_angle.csv")) == a1,
             "trial " + std::to_string(k) + " angle log differs from trial 1");
    }
    for (double v : outcome.report.trial_nrmse_pct)
      expect(c, v == outcome.report.trial_nrmse_pct.front(),
             "NRMSE varies across identity-fatigue trials");
  });

  const int failures = count_failures();
  std::cout << "\n" << (g_results.size() - static_cast<std::size_t>(failures)) << "/"
            << g_results.size() << " criteria passed";
  if (pipe.calibration_seconds > 0.0)
    std::cout << " (calibration " << static_cast<int>(pipe.calibration_seconds) << " s)";
  std::cout << std::endl;
  return failures;
}
