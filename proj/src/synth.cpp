// Copyright 2026 The pathtomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pathtomo/synth.hpp"

#include <cmath>
#include <map>
#include <random>

#include <nlohmann/json.hpp>

#include "pathtomo/errors.hpp"

namespace pathtomo {

void ExperimentPlan::validate() const {
  if (!(duration_seconds > 0.0)) throw OutOfRange("durationSeconds must be positive");
  if (!(shutter_period_seconds > 0.0))
    throw OutOfRange("shutterPeriodSeconds must be positive");
  if (!(pulse_rate_hz > 0.0)) throw OutOfRange("pulseRateHz must be positive");
  if (!(flux_per_pulse > 0.0)) throw OutOfRange("fluxPerPulse must be positive");
  if (bin_count < 2) throw OutOfRange("binCount must be at least 2");
}

ExperimentPlan plan_from_json(const nlohmann::json& j) {
  ExperimentPlan plan;
  try {
    plan.duration_seconds = j.value("durationSeconds", plan.duration_seconds);
    plan.shutter_period_seconds =
        j.value("shutterPeriodSeconds", plan.shutter_period_seconds);
    plan.drift_timescale_seconds =
        j.value("driftTimescaleSeconds", plan.drift_timescale_seconds);
    plan.pulse_rate_hz = j.value("pulseRateHz", plan.pulse_rate_hz);
    plan.flux_per_pulse = j.value("fluxPerPulse", plan.flux_per_pulse);
    plan.bin_count = j.value("binCount", plan.bin_count);
    plan.seed = j.value("seed", plan.seed);
    plan.noiseless = j.value("noiseless", plan.noiseless);
    const std::string conv = j.value("convention", "normalized");
    if (conv == "normalized") {
      plan.convention = RateConvention::normalized;
    } else if (conv == "raw") {
      plan.convention = RateConvention::raw;
    } else {
      throw ParseError("convention must be \"normalized\" or \"raw\"");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad experiment plan: ") + e.what());
  }
  plan.validate();
  return plan;
}

nlohmann::json plan_to_json(const ExperimentPlan& plan) {
  return nlohmann::json{
      {"durationSeconds", plan.duration_seconds},
      {"shutterPeriodSeconds", plan.shutter_period_seconds},
      {"driftTimescaleSeconds", plan.drift_timescale_seconds},
      {"pulseRateHz", plan.pulse_rate_hz},
      {"fluxPerPulse", plan.flux_per_pulse},
      {"binCount", plan.bin_count},
      {"seed", plan.seed},
      {"noiseless", plan.noiseless},
      {"convention",
       plan.convention == RateConvention::normalized ? "normalized" : "raw"}};
}

PhaseTrace generate_phase_trace(const ExperimentPlan& plan) {
  plan.validate();
  PhaseTrace trace;
  trace.step_seconds = plan.shutter_period_seconds;
  const auto samples = static_cast<size_t>(plan.duration_seconds / trace.step_seconds);
  trace.phases.reserve(samples);

  std::mt19937_64 rng(plan.seed);
  std::uniform_real_distribution<double> uniform(0.0, 2.0 * M_PI);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Brownian motion with E[first passage of +-2*pi] = L^2 / D.
  double step_sigma = 0.0;
  if (plan.drift_timescale_seconds > 0.0) {
    const double diffusion =
        (2.0 * M_PI) * (2.0 * M_PI) / plan.drift_timescale_seconds;
    step_sigma = std::sqrt(diffusion * trace.step_seconds);
  }

  double phi = uniform(rng);
  for (size_t k = 0; k < samples; ++k) {
    trace.phases.push_back(phi);
    phi += step_sigma == 0.0 ? 0.0 : step_sigma * gauss(rng);
  }
  return trace;
}

double estimate_phase_from_shutter(double intensity, double i_min, double i_max) {
  if (!(i_min < i_max)) throw OutOfRange("shutter calibration needs i_min < i_max");
  const double span = i_max - i_min;
  const double pad = 1e-6 * span;
  if (intensity < i_min - pad || intensity > i_max + pad)
    throw CalibrationRange("shutter intensity outside the calibrated range");
  double x = 2.0 * (intensity - i_min) / span - 1.0;
  x = std::clamp(x, -1.0, 1.0);
  return std::acos(x);
}

std::vector<double> bin_phases(const PhaseTrace& trace, int bin_count) {
  if (bin_count < 2) throw OutOfRange("bin count must be at least 2");
  std::vector<double> seconds(bin_count, 0.0);
  for (double phi : trace.phases) {
    const double folded = std::acos(std::clamp(std::cos(phi), -1.0, 1.0));
    int b = static_cast<int>(folded / M_PI * bin_count);
    b = std::min(b, bin_count - 1);
    seconds[b] += trace.step_seconds;
  }
  return seconds;
}

namespace {

struct RatePoint {
  double raw = 0.0;
  double denom = 1.0;  // singles product, with the 1/2 tap factor for autos
};

// Forward-model rates per (kind, phase), caching the compiled stages.
class PointSource {
 public:
  PointSource(const PathDensityMatrix& rho, const SetupConfig& cfg)
      : path_engine_(cfg), path_rho_(&rho) {}
  PointSource(const VisDensityMatrix& rho, const SetupConfig& cfg)
      : vis_engine_(cfg), vis_rho_(&rho) {}

  RatePoint at(RateKind kind, std::optional<double> phi) {
    if (path_rho_) return from_path(kind, phi);
    return from_vis(kind, phi);
  }

 private:
  template <typename Response, typename Rho>
  static RatePoint evaluate(const Response& resp, const Rho& full) {
    RatePoint p;
    p.raw = clamp_rate((full * resp.pair_op).trace().real());
    const double si = (full * resp.singles_i).trace().real();
    const double sj = (full * resp.singles_j).trace().real();
    p.denom = resp.is_auto ? 0.5 * si * si : si * sj;
    return p;
  }

  RatePoint from_path(RateKind kind, std::optional<double> phi) {
    if (!is_phase_dependent(kind))
      return evaluate(path_engine_->response(kind, std::nullopt), path_rho_->matrix);
    auto it = path_staged_.find(*phi);
    if (it == path_staged_.end())
      it = path_staged_.emplace(*phi, path_engine_->staged_responses(*phi)).first;
    return evaluate(it->second[staged_slot(kind)], path_rho_->matrix);
  }

  RatePoint from_vis(RateKind kind, std::optional<double> phi) {
    const Eigen::Matrix4cd full = vis_rho_->full();
    if (!is_phase_dependent(kind))
      return evaluate(vis_engine_->response(kind, std::nullopt), full);
    auto it = vis_staged_.find(*phi);
    if (it == vis_staged_.end())
      it = vis_staged_.emplace(*phi, vis_engine_->staged_responses(*phi)).first;
    return evaluate(it->second[staged_slot(kind)], full);
  }

  static int staged_slot(RateKind kind) {
    switch (kind) {
      case RateKind::r33: return 0;
      case RateKind::r34: return 1;
      case RateKind::r35: return 2;
      default: return 3;
    }
  }

  std::optional<RateEngine> path_engine_;
  std::optional<VisRateEngine> vis_engine_;
  const PathDensityMatrix* path_rho_ = nullptr;
  const VisDensityMatrix* vis_rho_ = nullptr;
  std::map<double, std::array<RateResponse, 4>> path_staged_;
  std::map<double, std::array<VisRateResponse, 4>> vis_staged_;
};

constexpr int kSidePeaks = 4;

// Draws one record; false when the sample cannot be normalized (all side
// peaks empty).
bool sample_record(const RatePoint& pt, RateKind kind, std::optional<double> phi,
                   double pair_events, double seconds, bool noiseless,
                   RateConvention convention, std::mt19937_64& rng,
                   MeasurementRecord& out) {
  out.kind = kind;
  out.phase = phi;
  out.weight = seconds;
  if (noiseless) {
    if (convention == RateConvention::raw) {
      out.value = pt.raw;
    } else {
      if (pt.denom < 1e-12)
        throw DivisionByZeroSingles("cannot normalize a rate with vanishing singles");
      out.value = pt.raw / pt.denom;
    }
    out.sigma = 1.0;
    return true;
  }

  const double lambda_center = pt.raw * pair_events;
  std::poisson_distribution<long> center_dist(lambda_center);
  const long center = lambda_center > 0.0 ? center_dist(rng) : 0;

  if (convention == RateConvention::raw) {
    out.value = static_cast<double>(center) / pair_events;
    out.sigma = std::sqrt(static_cast<double>(std::max<long>(center, 1))) / pair_events;
    return true;
  }

  const double lambda_side = pt.denom * pair_events;
  long side_total = 0;
  std::poisson_distribution<long> side_dist(lambda_side);
  for (int k = 0; k < kSidePeaks; ++k)
    side_total += lambda_side > 0.0 ? side_dist(rng) : 0;
  if (side_total == 0) return false;

  const double side_mean = static_cast<double>(side_total) / kSidePeaks;
  out.value = static_cast<double>(center) / side_mean;
  // First-order error propagation for the ratio of Poisson counts.
  const double var =
      static_cast<double>(std::max<long>(center, 1)) / (side_mean * side_mean) +
      out.value * out.value / static_cast<double>(side_total);
  out.sigma = std::sqrt(var);
  return true;
}

Campaign run_campaign(PointSource source, const ExperimentPlan& plan) {
  plan.validate();
  const PhaseTrace trace = generate_phase_trace(plan);
  const std::vector<double> bins = bin_phases(trace, plan.bin_count);
  std::mt19937_64 rng(plan.seed * 0x9E3779B97F4A7C15ULL + 1);

  const double events_per_second = plan.pulse_rate_hz * plan.flux_per_pulse;
  Campaign campaign;

  const double total_seconds = trace.duration_seconds();
  for (RateKind kind : {RateKind::r00, RateKind::r01, RateKind::r11}) {
    MeasurementRecord rec;
    if (sample_record(source.at(kind, std::nullopt), kind, std::nullopt,
                      events_per_second * total_seconds, total_seconds,
                      plan.noiseless, plan.convention, rng, rec))
      campaign.records.push_back(rec);
  }

  for (int b = 0; b < plan.bin_count; ++b) {
    if (bins[b] <= 0.0) {
      campaign.skipped_bins.push_back(b);
      continue;
    }
    const double center = (b + 0.5) * M_PI / plan.bin_count;
    for (RateKind kind :
         {RateKind::r33, RateKind::r34, RateKind::r35, RateKind::r45}) {
      MeasurementRecord rec;
      if (sample_record(source.at(kind, center), kind, center,
                        events_per_second * bins[b], bins[b], plan.noiseless,
                        plan.convention, rng, rec))
        campaign.records.push_back(rec);
    }
  }
  return campaign;
}

}  // namespace

Campaign sample_campaign(const PathDensityMatrix& rho, const SetupConfig& cfg,
                         const ExperimentPlan& plan) {
  return run_campaign(PointSource(rho, cfg), plan);
}

Campaign sample_campaign(const VisDensityMatrix& rho, const SetupConfig& cfg,
                         const ExperimentPlan& plan) {
  return run_campaign(PointSource(rho, cfg), plan);
}

std::vector<MeasurementRecord> sample_r_comp_records(const PathDensityMatrix& rho,
                                                     const SetupConfig& cfg,
                                                     double phi1, double phi2,
                                                     double count_scale,
                                                     std::uint64_t seed) {
  if (!(count_scale > 0.0)) throw OutOfRange("count_scale must be positive");
  PointSource source(rho, cfg);
  std::mt19937_64 rng(seed);
  std::vector<MeasurementRecord> records;
  const auto& layout = r_comp_layout();
  for (int i = 0; i < 9; ++i) {
    std::optional<double> phi;
    if (is_phase_dependent(layout[i])) phi = i < 6 ? phi1 : phi2;
    MeasurementRecord rec;
    if (!sample_record(source.at(layout[i], phi), layout[i], phi, count_scale, 1.0,
                       false, RateConvention::normalized, rng, rec))
      throw InternalError("side peaks came out empty at this count scale");
    records.push_back(rec);
  }
  return records;
}

}  // namespace pathtomo
