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

#ifndef PATHTOMO_CORRELATIONS_HPP
#define PATHTOMO_CORRELATIONS_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pathtomo/optics.hpp"
#include "pathtomo/records.hpp"
#include "pathtomo/states.hpp"

namespace pathtomo {

/// Clamp floating-point dust on a rate that must be non-negative; anything
/// below -1e-9 is treated as an internal bug.
double clamp_rate(double value);

// ---------------------------------------------------------------------------
// Generic machinery shared by the path and label-resolved forward models.
// Every observable used here (pair counters a†i a†j aj ai and number
// operators) is diagonal in the output Fock basis, so a rate reduces to
// response(k, l) = w_k† diag(d) w_l over lifted input kets w_k.
// ---------------------------------------------------------------------------

/// response(k, l) = w_k† diag(d) w_l for lifted kets given as columns.
Eigen::MatrixXcd diagonal_response(const Eigen::MatrixXcd& lifted_kets,
                                   const Eigen::VectorXd& diag);

/// Diagonal of the normally ordered pair counter between detected lines.
/// mode_to_line maps each Fock mode to a line index; a line's photon number
/// is the summed occupation of its modes. For line_i == line_j the counter
/// is N(N-1) (auto-correlation before the 1/2 tap factor).
Eigen::VectorXd pair_counter_diagonal(const FockBasis& basis,
                                      const std::vector<int>& mode_to_line,
                                      int line_i, int line_j);

/// Diagonal of the line photon-number operator.
Eigen::VectorXd singles_counter_diagonal(const FockBasis& basis,
                                         const std::vector<int>& mode_to_line,
                                         int line_j);

// ---------------------------------------------------------------------------
// Forward model for 3x3 path states.
// ---------------------------------------------------------------------------

/// Response of one measurement to the input state: raw = Re Tr[rho pair_op]
/// (the 1/2 tap factor is folded into pair_op for auto-correlations), and
/// singles_i/singles_j give the detector singles rates used to normalize.
struct RateResponse {
  Eigen::Matrix3cd pair_op;
  Eigen::Matrix3cd singles_i;
  Eigen::Matrix3cd singles_j;
  bool is_auto = false;

  double raw(const PathDensityMatrix& rho) const;
  double normalized(const PathDensityMatrix& rho) const;
};

/// Precomputes measurement responses for a fixed setup. Stateless after
/// construction; safe to share across threads.
class RateEngine {
 public:
  explicit RateEngine(const SetupConfig& cfg);

  /// Response of a rate kind; phi is required for the phase-dependent kinds
  /// and ignored otherwise.
  RateResponse response(RateKind kind, std::optional<double> phi) const;

  /// All four phase-dependent responses (r33, r34, r35, r45) sharing one
  /// compiled stage at phi.
  std::array<RateResponse, 4> staged_responses(double phi) const;

  const SetupConfig& config() const { return cfg_; }

 private:
  SetupConfig cfg_;
};

// Spec-level operations. Detector labels: path0/path1 select direct
// detection on the source paths (no analysis stage); path3/path4/path5
// select detection behind the analysis interferometer at phase phi.

double coincidence_rate(const PathDensityMatrix& rho, const SetupConfig& cfg,
                        double phi, const std::string& i, const std::string& j);

/// (1/2) Tr[rho_out a†i a†i ai ai]: the two-detector rate behind a balanced tap.
double auto_rate(const PathDensityMatrix& rho, const SetupConfig& cfg, double phi,
                 const std::string& i);

double singles_rate(const PathDensityMatrix& rho, const SetupConfig& cfg, double phi,
                    const std::string& j);

/// coincidence / (singles_i * singles_j), or auto / ((1/2) singles_i^2) for
/// i == j; matches the side-peak normalization of sampled campaigns.
double normalized_rate(const PathDensityMatrix& rho, const SetupConfig& cfg,
                       double phi, const std::string& i, const std::string& j);

/// The nine-entry minimal set, in order:
/// (R00, R01, R11, R33(phi1), R34(phi1), R45(phi1), R33(phi2), R34(phi2),
///  R45(phi2)), as raw model rates.
Eigen::Matrix<double, 9, 1> predict_r_comp(const PathDensityMatrix& rho,
                                           const SetupConfig& cfg, double phi1,
                                           double phi2);

/// Rate kinds of the minimal set, positions 0..8; entries 3-5 use phi1 and
/// 6-8 use phi2.
const std::array<RateKind, 9>& r_comp_layout();

/// Singles rate on a detector when only one HOM splitter input is lit: the
/// single-photon interference signal used to track the drifting phase.
/// open_input is 0 or 1 (which input of the HOM splitter carries the photon).
double shutter_singles_rate(const SetupConfig& cfg, double phi, int open_input,
                            const std::string& detector);

}  // namespace pathtomo

#endif
