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

#ifndef PATHTOMO_RECORDS_HPP
#define PATHTOMO_RECORDS_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pathtomo {

/// Detector pairings of the experiment. R00/R01/R11 are measured directly on
/// the source paths; R33/R34/R35/R45 behind the analysis interferometer and
/// depend on its phase. R00, R11 and R33 are auto-correlations (balanced tap
/// in front of two detectors, counted with the 1/2 convention).
enum class RateKind { r00, r01, r11, r33, r34, r35, r45 };

constexpr RateKind kAllRateKinds[] = {RateKind::r00, RateKind::r01, RateKind::r11,
                                      RateKind::r33, RateKind::r34, RateKind::r35,
                                      RateKind::r45};

bool is_phase_dependent(RateKind kind);
bool is_auto_kind(RateKind kind);
std::string to_string(RateKind kind);
RateKind rate_kind_from_string(const std::string& s);

/// One normalized correlation measurement. `phase` is empty for the
/// phase-independent kinds. `value` follows the convention of the pipeline
/// that produced it: side-peak-normalized rates for sampled campaigns (what
/// the maximum-likelihood fits consume) or plain model rates for noiseless
/// "raw" exports (what the linear inversion consumes).
struct MeasurementRecord {
  RateKind kind = RateKind::r00;
  std::optional<double> phase;
  double value = 0.0;
  double sigma = 1.0;
  double weight = 1.0;
};

/// CSV header: pairKind,phaseBinCenter,normalizedRate,sigma,acquisitionWeight
void write_records_csv(std::ostream& out, const std::vector<MeasurementRecord>& records);
void write_records_csv(const std::string& path, const std::vector<MeasurementRecord>& records);
std::vector<MeasurementRecord> read_records_csv(std::istream& in);
std::vector<MeasurementRecord> read_records_csv(const std::string& path);

}  // namespace pathtomo

#endif
