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

#ifndef PATHTOMO_TOMOGRAPHY_HPP
#define PATHTOMO_TOMOGRAPHY_HPP

#include <array>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pathtomo/correlations.hpp"
#include "pathtomo/records.hpp"
#include "pathtomo/states.hpp"

namespace pathtomo {

/// Real 9-vector parameterization of a Hermitian 3x3 matrix: the three
/// populations, then (Re, Im) of the (2,0)-(1,1), (2,0)-(0,2) and
/// (1,1)-(0,2) coherences.
Eigen::Matrix<double, 9, 1> vectorize_hermitian(const Eigen::Matrix3cd& m);
Eigen::Matrix3cd unvectorize_hermitian(const Eigen::Matrix<double, 9, 1>& p);

struct TransferMatrix {
  Eigen::Matrix<double, 9, 9> m;
  double condition_number = 0.0;
};

/// Linear map from the 9-parameter state vector to the raw minimal rate set
/// at (phi1, phi2), built by feeding the Hermitian basis matrices through the
/// forward model. condition_number is sigma_max / sigma_min.
TransferMatrix build_transfer_matrix(const SetupConfig& cfg, double phi1, double phi2);

/// Condition number above which the minimal design is rejected as singular.
constexpr double kSingularConditionNumber = 1e10;

struct LinearReconstruction {
  PathDensityMatrix raw;         // direct inversion; trace may deviate from 1
  PathDensityMatrix normalized;  // raw divided by its trace
  double raw_trace = 0.0;
  double condition_number = 0.0;
};

/// Inversion of nine raw-rate records laid out like r_comp_layout() (the
/// phase-dependent records must sit at phi1/phi2). Throws
/// SingularTransferMatrix when the design condition number reaches 1e10.
LinearReconstruction linear_reconstruct(const std::vector<MeasurementRecord>& records,
                                        const SetupConfig& cfg, double phi1,
                                        double phi2);

/// Picks the nine-record minimal subset out of a larger record collection:
/// the three phase-independent records plus nearest-phase-bin matches of
/// R33/R34/R45 at phi1 and phi2. Throws MissingPhaseBin when no record lies
/// within half a bin width of a requested phase, InsufficientDesign when a
/// required kind is absent.
std::vector<MeasurementRecord> select_r_comp_subset(
    const std::vector<MeasurementRecord>& records, double phi1, double phi2);

/// Density matrix from the nine-parameter triangular factorization
/// rho(t) = T T† / Tr(T T†): t = (T00, T11, T22, Re T10, Im T10, Re T20,
/// Im T20, Re T21, Im T21). Positive semidefinite with unit trace for any t.
PathDensityMatrix rho_from_cholesky(const Eigen::Matrix<double, 9, 1>& t);
Eigen::Matrix<double, 9, 1> cholesky_from_rho(const PathDensityMatrix& rho);

/// Nearest physical state: eigenvalues clamped to zero, trace renormalized.
PathDensityMatrix project_physical(const PathDensityMatrix& rho);

/// Which model quantity record values are compared against.
enum class RateConvention { normalized, raw };

struct MleOptions {
  int restarts = 8;
  long max_evals = 100000;
  double stall_tol = 1e-12;
  int stall_window = 200;
  std::uint64_t seed = 20202;
  RateConvention convention = RateConvention::normalized;
};

struct MleResult {
  PathDensityMatrix rho;
  double objective = 0.0;
  bool converged = false;
  long evaluations = 0;
};

/// Weighted least-squares fit of rho(t) to the records: minimizes
/// sum_nu (R_nu(t) - R_nu)^2 / sigma_nu^2 over the nine triangular
/// parameters, multi-start simplex descent, deterministic for a fixed seed.
/// Throws InsufficientDesign when the records cannot determine nine
/// parameters. A result with converged == false carries the best point found
/// within the evaluation budget.
MleResult mle_reconstruct(const std::vector<MeasurementRecord>& records,
                          const SetupConfig& cfg, const MleOptions& opts = {});

/// <target| rho |target> for a normalized pure target.
double fidelity(const PathDensityMatrix& rho, const Eigen::Vector3cd& target);

struct ScanPoint {
  double phi1 = 0.0;
  double phi2 = 0.0;
  double fidelity = 0.0;
  bool converged = false;
  bool singular = false;
};

struct ScanSummaryRow {
  double separation = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
  int count = 0;
};

struct ScanResult {
  std::vector<ScanPoint> points;
  std::vector<ScanSummaryRow> summary;  // fidelity stats vs |phi2 - phi1|
};

/// Runs the nine-record reconstruction at every grid point, in parallel over
/// `jobs` workers (0 = hardware concurrency). Grid points whose design is
/// singular are flagged rather than fitted.
ScanResult fidelity_scan(const std::vector<MeasurementRecord>& records,
                         const SetupConfig& cfg,
                         const std::vector<std::pair<double, double>>& grid,
                         int jobs = 0, const MleOptions& opts = {});

struct SourceMetrics {
  double visibility = 0.0;
  double corrected_overlap = 0.0;
};

/// Visibility V = 1 - 2 * r01_normalized (fully distinguishable photons give
/// r01 = 0.5 on a balanced splitter) and the g2-corrected mean wavepacket
/// overlap V + g2.
SourceMetrics source_metrics(double r01_normalized, double g2);

}  // namespace pathtomo

#endif
