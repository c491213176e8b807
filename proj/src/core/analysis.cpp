// Copyright (c) 2026 pneusim developers
// SPDX-License-Identifier: Apache-2.0

#include "core/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "core/csvio.hpp"
#include "core/error.hpp"
#include "core/svgplot.hpp"

namespace pneusim {

namespace {

double window_median(const TrialLog& log, double t_lo, double t_hi, const char* what) {
  std::vector<double> vals;
  for (std::size_t j = 0; j < log.angle_time.size(); ++j)
    if (log.angle_time[j] >= t_lo - 1e-9 && log.angle_time[j] <= t_hi + 1e-9)
      vals.push_back(log.angle_deg[j]);
  if (vals.empty())
    raise(ErrorCode::LogIntegrity, "trial " + std::to_string(log.trial_index) + ": no " +
                                       std::string(what) + " samples in [" +
                                       format_double(t_lo) + ", " + format_double(t_hi) + "] s");
  std::sort(vals.begin(), vals.end());
  const std::size_t n = vals.size();
  return n % 2 == 1 ? vals[n / 2] : 0.5 * (vals[n / 2 - 1] + vals[n / 2]);
}

}  // namespace

std::vector<StepSummary> extract_steps(const TrialLog& log, const StaircaseProtocol& protocol,
                                       const StaticCurve& curve) {
  protocol.validate();
  std::vector<StepSummary> out;
  for (int k = 0; k < protocol.n_steps; ++k) {
    const double t0 = k * protocol.hold_duration;
    StepSummary s;
    s.pressure = protocol.pressure_of_step(k);
    s.angle_at_mark = window_median(log, t0 + kMarkTime - kMarkHalfWindow,
                                    t0 + kMarkTime + kMarkHalfWindow, "steady-state mark");
    s.angle_at_end = window_median(log, t0 + protocol.hold_duration - kEndWindow,
                                   t0 + protocol.hold_duration - 1e-9, "hold end");
    s.plateau = std::abs(s.angle_at_end - s.angle_at_mark) < kPlateauThreshold;
    s.fem_angle = curve.angle_at(s.pressure);
    out.push_back(s);
  }
  return out;
}

double nrmse(const std::vector<StepSummary>& summaries) {
  if (summaries.empty()) raise(ErrorCode::InvalidArgument, "no steps to score");
  double sq = 0.0;
  double lo = summaries.front().fem_angle;
  double hi = lo;
  for (const StepSummary& s : summaries) {
    const double d = s.angle_at_mark - s.fem_angle;
    sq += d * d;
    lo = std::min(lo, s.fem_angle);
    hi = std::max(hi, s.fem_angle);
  }
  if (!(hi - lo > 1e-9))
    raise(ErrorCode::InvalidArgument,
          "flat FEM curve: the NRMSE normalizer (angle range) is degenerate");
  return 100.0 * std::sqrt(sq / static_cast<double>(summaries.size())) / (hi - lo);
}

std::vector<StepError> per_step_errors(const std::vector<StepSummary>& summaries) {
  std::vector<StepError> out;
  for (const StepSummary& s : summaries)
    out.push_back({s.pressure, std::abs(s.angle_at_mark - s.fem_angle),
                   s.angle_at_end - s.angle_at_mark});
  return out;
}

CampaignReport analyze_campaign(const std::vector<TrialLog>& logs,
                                const StaircaseProtocol& protocol, const StaticCurve& curve,
                                const std::string& config_json) {
  if (logs.empty()) raise(ErrorCode::InvalidArgument, "empty campaign");
  CampaignReport report;
  report.config_json = config_json;
  for (const TrialLog& log : logs) {
    std::vector<StepSummary> steps = extract_steps(log, protocol, curve);
    report.trial_nrmse_pct.push_back(nrmse(steps));
    report.trial_errors.push_back(per_step_errors(steps));
    report.trial_steps.push_back(std::move(steps));
    report.damage_before.push_back(log.damage_before);
  }
  return report;
}

namespace {

nlohmann::json report_to_json(const CampaignReport& report) {
  nlohmann::json j;
  j["trial_nrmse_pct"] = report.trial_nrmse_pct;
  j["damage_before_trial"] = report.damage_before;
  nlohmann::json trials = nlohmann::json::array();
  for (std::size_t t = 0; t < report.trial_steps.size(); ++t) {
    nlohmann::json steps = nlohmann::json::array();
    for (std::size_t k = 0; k < report.trial_steps[t].size(); ++k) {
      const StepSummary& s = report.trial_steps[t][k];
      const StepError& e = report.trial_errors[t][k];
      steps.push_back({{"pressure_kPa", s.pressure},
                       {"angle_at_mark_deg", s.angle_at_mark},
                       {"angle_at_end_deg", s.angle_at_end},
                       {"fem_angle_deg", s.fem_angle},
                       {"plateau", s.plateau},
                       {"abs_error_deg", e.abs_error}});
    }
    trials.push_back({{"trial", t + 1}, {"steps", std::move(steps)}});
  }
  j["trials"] = std::move(trials);
  if (!report.config_json.empty()) j["config"] = nlohmann::json::parse(report.config_json);
  return j;
}

struct Frame {
  SvgCanvas svg;
  AxisScale x, y;

  Frame(double w, double h, double x_lo, double x_hi, double y_lo, double y_hi)
      : svg(w, h),
        x{x_lo, x_hi, 62.0, w - 18.0},
        y{y_lo, y_hi, h - 46.0, 16.0} {}

  void axes(const std::string& x_label, const std::string& y_label) {
    svg.line(x.pix_lo, y.pix_lo, x.pix_hi, y.pix_lo, "black");
    svg.line(x.pix_lo, y.pix_lo, x.pix_lo, y.pix_hi, "black");
    for (double t : nice_ticks(x.data_lo, x.data_hi)) {
      svg.line(x(t), y.pix_lo, x(t), y.pix_lo + 4.0, "black");
      svg.text(x(t), y.pix_lo + 16.0, format_double(t), 10.0, "middle");
    }
    for (double t : nice_ticks(y.data_lo, y.data_hi)) {
      svg.line(x.pix_lo - 4.0, y(t), x.pix_lo, y(t), "black");
      svg.text(x.pix_lo - 6.0, y(t) + 3.5, format_double(t), 10.0, "end");
    }
    svg.text(0.5 * (x.pix_lo + x.pix_hi), svg.height() - 8.0, x_label, 12.0, "middle");
    svg.text(14.0, 0.5 * (y.pix_lo + y.pix_hi), y_label, 12.0, "middle", -90.0);
  }
};

void write_fig8a(const TrialLog& log, const std::filesystem::path& path) {
  double p_hi = 1.0, a_hi = 1.0;
  for (double v : log.pressure_kpa) p_hi = std::max(p_hi, v);
  for (double v : log.angle_deg) a_hi = std::max(a_hi, v);
  const double t_hi = log.pressure_time.empty() ? 1.0 : log.pressure_time.back();

  Frame f(860, 360, 0.0, t_hi, 0.0, a_hi * 1.05);
  AxisScale p_axis{0.0, p_hi * 1.05, f.y.pix_lo, f.y.pix_hi};

  std::vector<std::pair<double, double>> pressure_pts;
  const std::size_t stride = std::max<std::size_t>(1, log.pressure_time.size() / 2000);
  for (std::size_t i = 0; i < log.pressure_time.size(); i += stride)
    pressure_pts.emplace_back(f.x(log.pressure_time[i]), p_axis(log.pressure_kpa[i]));
  f.svg.polyline(pressure_pts, "#1f77b4", 1.0);

  std::vector<std::pair<double, double>> angle_pts;
  for (std::size_t j = 0; j < log.angle_time.size(); ++j)
    angle_pts.emplace_back(f.x(log.angle_time[j]), f.y(log.angle_deg[j]));
  f.svg.polyline(angle_pts, "#ff7f0e", 1.2);

  f.axes("time [s]", "angle [deg]");
  for (double t : nice_ticks(0.0, p_hi * 1.05)) {
    f.svg.line(f.x.pix_hi, p_axis(t), f.x.pix_hi + 4.0, p_axis(t), "#1f77b4");
    f.svg.text(f.x.pix_hi + 6.0, p_axis(t) + 3.5, format_double(t), 10.0);
  }
  f.svg.text(f.x.pix_hi - 4.0, f.y.pix_hi + 4.0, "pressure [kPa]", 11.0, "end");
  write_text_file(path, f.svg.finish());
}

void write_fig8b(const std::vector<StepSummary>& steps, const StaticCurve& curve,
                 const std::filesystem::path& path) {
  double a_hi = 1.0;
  for (const StepSummary& s : steps) a_hi = std::max({a_hi, s.angle_at_end, s.fem_angle});
  const double p_hi = steps.empty() ? 1.0 : steps.back().pressure;

  Frame f(640, 420, -2.0, p_hi + 3.0, 0.0, a_hi * 1.08);
  for (const StepSummary& s : steps) {
    const double x = f.x(s.pressure);
    const double y0 = f.y(s.angle_at_mark);
    const double y1 = f.y(s.angle_at_end);
    f.svg.rect(x - 4.0, std::min(y0, y1), 8.0, std::max(std::abs(y1 - y0), 1.5), "#ff7f0e");
  }
  for (const CurveSample& s : curve.samples)
    if (s.pressure <= p_hi + 1e-9) f.svg.circle(f.x(s.pressure), f.y(s.angle_deg), 3.5, "#1f77b4");
  f.axes("pressure [kPa]", "angle [deg]");
  f.svg.circle(f.x.pix_lo + 14.0, f.y.pix_hi + 8.0, 3.5, "#1f77b4");
  f.svg.text(f.x.pix_lo + 22.0, f.y.pix_hi + 12.0, "model", 11.0);
  f.svg.rect(f.x.pix_lo + 84.0, f.y.pix_hi + 2.0, 8.0, 12.0, "#ff7f0e");
  f.svg.text(f.x.pix_lo + 97.0, f.y.pix_hi + 12.0, "measured 2.5 s .. 16 s", 11.0);
  write_text_file(path, f.svg.finish());
}

void write_fig9(const std::vector<double>& nrmse_pct, const std::filesystem::path& path) {
  double hi = 1.0;
  for (double v : nrmse_pct) hi = std::max(hi, v);
  const int n = static_cast<int>(nrmse_pct.size());
  Frame f(560, 360, 0.5, n + 0.5, 0.0, hi * 1.12);
  const double bw = (f.x.pix_hi - f.x.pix_lo) / std::max(1, n) * 0.62;
  for (int k = 0; k < n; ++k) {
    const double x = f.x(k + 1.0);
    f.svg.rect(x - bw / 2.0, f.y(nrmse_pct[static_cast<std::size_t>(k)]), bw,
               f.y.pix_lo - f.y(nrmse_pct[static_cast<std::size_t>(k)]), "#1f77b4");
  }
  f.axes("trial", "NRMSE [%]");
  write_text_file(path, f.svg.finish());
}

void write_fig10_11(const CampaignReport& report, bool with_extension,
                    const std::filesystem::path& path) {
  const std::size_t n_trials = report.trial_errors.size();
  const std::size_t n_steps = n_trials == 0 ? 0 : report.trial_errors.front().size();
  double hi = 1.0;
  for (const auto& trial : report.trial_errors)
    for (const StepError& e : trial)
      hi = std::max(hi, e.abs_error + (with_extension ? std::max(e.end_extension, 0.0) : 0.0));

  Frame f(980, 420, 0.0, static_cast<double>(n_steps), 0.0, hi * 1.1);
  const double group_w = (f.x.pix_hi - f.x.pix_lo) / std::max<std::size_t>(1, n_steps);
  const double bw = group_w * 0.85 / std::max<std::size_t>(1, n_trials);
  for (std::size_t k = 0; k < n_steps; ++k) {
    for (std::size_t t = 0; t < n_trials; ++t) {
      const StepError& e = report.trial_errors[t][k];
      const double x = f.x.pix_lo + group_w * (k + 0.075) + bw * t;
      const std::string color =
          with_extension ? "black" : trial_color(static_cast<int>(t) + 1);
      f.svg.rect(x, f.y(e.abs_error), bw * 0.9, f.y.pix_lo - f.y(e.abs_error), color);
      if (with_extension && e.end_extension > 0.0)
        f.svg.rect(x, f.y(e.abs_error + e.end_extension), bw * 0.9,
                   f.y(e.abs_error) - f.y(e.abs_error + e.end_extension), "#ff7f0e");
    }
    f.svg.text(f.x.pix_lo + group_w * (k + 0.5), f.y.pix_lo + 16.0,
               format_double(report.trial_errors.front()[k].pressure), 10.0, "middle");
  }
  // Axes drawn manually: the x axis is categorical (one group per step).
  f.svg.line(f.x.pix_lo, f.y.pix_lo, f.x.pix_hi, f.y.pix_lo, "black");
  f.svg.line(f.x.pix_lo, f.y.pix_lo, f.x.pix_lo, f.y.pix_hi, "black");
  for (double t : nice_ticks(0.0, hi * 1.1)) {
    f.svg.line(f.x.pix_lo - 4.0, f.y(t), f.x.pix_lo, f.y(t), "black");
    f.svg.text(f.x.pix_lo - 6.0, f.y(t) + 3.5, format_double(t), 10.0, "end");
  }
  f.svg.text(0.5 * (f.x.pix_lo + f.x.pix_hi), f.svg.height() - 8.0, "pressure step [kPa]", 12.0,
             "middle");
  f.svg.text(14.0, 0.5 * (f.y.pix_lo + f.y.pix_hi),
             with_extension ? "error at mark + hold drift [deg]" : "abs error at mark [deg]",
             12.0, "middle", -90.0);
  write_text_file(path, f.svg.finish());
}

}  // namespace

void write_report(const CampaignReport& report, const std::vector<TrialLog>& logs,
                  const StaticCurve& curve, const std::filesystem::path& dir) {
  if (logs.empty()) raise(ErrorCode::InvalidArgument, "empty campaign");
  ensure_directory(dir);

  write_text_file(dir / "report.json", report_to_json(report).dump(2) + "\n");

  std::ostringstream nrmse_csv;
  nrmse_csv << "trial,nrmse_pct\n";
  for (std::size_t t = 0; t < report.trial_nrmse_pct.size(); ++t)
    nrmse_csv << (t + 1) << "," << format_double(report.trial_nrmse_pct[t]) << "\n";
  write_text_file(dir / "nrmse.csv", nrmse_csv.str());

  std::ostringstream err_csv;
  err_csv << "trial,pressure_kPa,abs_error_deg,end_extension_deg,plateau\n";
  for (std::size_t t = 0; t < report.trial_errors.size(); ++t)
    for (std::size_t k = 0; k < report.trial_errors[t].size(); ++k) {
      const StepError& e = report.trial_errors[t][k];
      err_csv << (t + 1) << "," << format_double(e.pressure) << ","
              << format_double(e.abs_error) << "," << format_double(e.end_extension) << ","
              << (report.trial_steps[t][k].plateau ? 1 : 0) << "\n";
    }
  write_text_file(dir / "step_errors.csv", err_csv.str());

  write_fig8a(logs.front(), dir / "fig8a.svg");
  write_fig8b(report.trial_steps.front(), curve, dir / "fig8b.svg");
  write_fig9(report.trial_nrmse_pct, dir / "fig9.svg");
  write_fig10_11(report, false, dir / "fig10.svg");
  write_fig10_11(report, true, dir / "fig11.svg");
}

}  // namespace pneusim
