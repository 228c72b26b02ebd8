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

#ifndef PATHTOMO_SYNTH_HPP
#define PATHTOMO_SYNTH_HPP

#include <cstdint>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pathtomo/distinguishability.hpp"
#include "pathtomo/records.hpp"
#include "pathtomo/states.hpp"
#include "pathtomo/tomography.hpp"

namespace pathtomo {

/// Interferometer phase sampled on a uniform time grid.
struct PhaseTrace {
  double step_seconds = 10.0;
  std::vector<double> phases;  // unwrapped, sample k taken at k * step_seconds

  double duration_seconds() const { return step_seconds * phases.size(); }
};

/// Parameters of a synthetic acquisition run.
struct ExperimentPlan {
  double duration_seconds = 36000.0;
  double shutter_period_seconds = 10.0;  // phase probe cadence
  // Expected time for the drifting phase to move by 2*pi; values <= 0 freeze
  // the phase at its initial value.
  double drift_timescale_seconds = 600.0;
  double pulse_rate_hz = 82e6;
  double flux_per_pulse = 1e-7;  // detected pair events per excitation pulse
  int bin_count = 20;
  std::uint64_t seed = 1;
  bool noiseless = false;
  RateConvention convention = RateConvention::normalized;

  void validate() const;
};

ExperimentPlan plan_from_json(const nlohmann::json& j);
nlohmann::json plan_to_json(const ExperimentPlan& plan);

/// Seeded Gaussian random walk sampled every shutter period, with the step
/// variance tuned so the expected first passage of +-2*pi matches the drift
/// timescale.
PhaseTrace generate_phase_trace(const ExperimentPlan& plan);

/// Phase of a fringe reading: arccos of the rescaled intensity, folded into
/// [0, pi]. Throws CalibrationRange when the intensity leaves the padded
/// calibration span.
double estimate_phase_from_shutter(double intensity, double i_min, double i_max);

/// Acquisition seconds accumulated per phase bin; phases are folded into
/// [0, pi] exactly as a shutter-based estimate would be. Sums to the trace
/// duration.
std::vector<double> bin_phases(const PhaseTrace& trace, int bin_count);

struct Campaign {
  std::vector<MeasurementRecord> records;
  std::vector<int> skipped_bins;  // bins with zero acquisition time
};

/// Full synthetic campaign: drifting phase, binned acquisition, Poisson
/// center- and side-peak counts per bin and rate kind, plus the three
/// phase-independent rates over the whole run. Deterministic per seed.
Campaign sample_campaign(const PathDensityMatrix& rho, const SetupConfig& cfg,
                         const ExperimentPlan& plan);
Campaign sample_campaign(const VisDensityMatrix& rho, const SetupConfig& cfg,
                         const ExperimentPlan& plan);

/// Noisy nine-record minimal set at (phi1, phi2), side-peak normalized, with
/// count_scale expected pair events per measurement.
std::vector<MeasurementRecord> sample_r_comp_records(const PathDensityMatrix& rho,
                                                     const SetupConfig& cfg,
                                                     double phi1, double phi2,
                                                     double count_scale,
                                                     std::uint64_t seed);

}  // namespace pathtomo

#endif
