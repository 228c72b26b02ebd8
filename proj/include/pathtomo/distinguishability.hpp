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

#ifndef PATHTOMO_DISTINGUISHABILITY_HPP
#define PATHTOMO_DISTINGUISHABILITY_HPP

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pathtomo/correlations.hpp"
#include "pathtomo/records.hpp"
#include "pathtomo/states.hpp"
#include "pathtomo/tomography.hpp"

namespace pathtomo {

/// Response of a measurement over the (|2,0>, psi+, |0,2>, psi-) basis.
/// The hidden photon labels a/b are carried through a doubled mode space;
/// the optics is label-blind and coincidences sum over label assignments.
/// All operators are block diagonal between the symmetric and antisymmetric
/// sectors, so cross-block coherences never influence a rate.
struct VisRateResponse {
  Eigen::Matrix4cd pair_op;
  Eigen::Matrix4cd singles_i;
  Eigen::Matrix4cd singles_j;
  bool is_auto = false;

  double raw(const VisDensityMatrix& rho) const;
  double normalized(const VisDensityMatrix& rho) const;
};

/// Response of a detector pair behind an arbitrary spatial transform whose
/// first two lines carry the input photons. line_i == line_j is the
/// auto-correlation (1/2 tap convention).
VisRateResponse vis_response(const ModeTransform& spatial, int line_i, int line_j);

/// Label-resolved mirror of RateEngine.
class VisRateEngine {
 public:
  explicit VisRateEngine(const SetupConfig& cfg);

  VisRateResponse response(RateKind kind, std::optional<double> phi) const;
  std::array<VisRateResponse, 4> staged_responses(double phi) const;

  const SetupConfig& config() const { return cfg_; }

 private:
  SetupConfig cfg_;
};

/// Coincidence (or auto, for i == j) rate of a label-resolved state; same
/// detector-label conventions as the path forward model.
double predict_rate_vis(const VisDensityMatrix& rho, const SetupConfig& cfg,
                        double phi, const std::string& i, const std::string& j);

double normalized_rate_vis(const VisDensityMatrix& rho, const SetupConfig& cfg,
                           double phi, const std::string& i, const std::string& j);

double singles_rate_vis(const VisDensityMatrix& rho, const SetupConfig& cfg,
                        double phi, const std::string& j);

/// Two single photons with mean wavepacket overlap `overlap` interfering on
/// the HOM splitter: symmetric weight (1+overlap)/2 propagated through the
/// splitter, antisymmetric weight (1-overlap)/2 left invariant.
VisDensityMatrix hom_source_vis(double hom_reflectivity, double overlap);

/// A path state is the antisym-free corner of the label-resolved model.
VisDensityMatrix embed_path_state(const PathDensityMatrix& rho);

/// Inverse of embed_path_state; requires antisym_pop <= tol.
PathDensityMatrix collapse_to_path(const VisDensityMatrix& rho, double tol = 1e-9);

struct VisMleResult {
  VisDensityMatrix rho;
  double objective = 0.0;
  bool converged = false;
  long evaluations = 0;
};

/// Ten-parameter weighted least-squares fit (nine triangular parameters for
/// the symmetric block plus one antisymmetric amplitude, jointly trace
/// normalized). Needs an overcomplete record set.
VisMleResult mle_reconstruct_vis(const std::vector<MeasurementRecord>& records,
                                 const SetupConfig& cfg, const MleOptions& opts = {});

}  // namespace pathtomo

#endif
