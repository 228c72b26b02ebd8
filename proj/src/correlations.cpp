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

#include "pathtomo/correlations.hpp"

#include <cmath>

#include "pathtomo/errors.hpp"

namespace pathtomo {

double clamp_rate(double value) {
  if (value < -1e-9)
    throw InternalError("rate came out significantly negative: " +
                        std::to_string(value));
  return value < 0.0 ? 0.0 : value;
}

Eigen::MatrixXcd diagonal_response(const Eigen::MatrixXcd& lifted_kets,
                                   const Eigen::VectorXd& diag) {
  return lifted_kets.adjoint() * diag.asDiagonal() * lifted_kets;
}

Eigen::VectorXd pair_counter_diagonal(const FockBasis& basis,
                                      const std::vector<int>& mode_to_line,
                                      int line_i, int line_j) {
  Eigen::VectorXd d(basis.dimension());
  for (int s = 0; s < basis.dimension(); ++s) {
    const Occupation& occ = basis.state(s);
    int ni = 0, nj = 0;
    for (int m = 0; m < basis.mode_count(); ++m) {
      if (mode_to_line[m] == line_i) ni += occ[m];
      if (mode_to_line[m] == line_j) nj += occ[m];
    }
    d(s) = line_i == line_j ? static_cast<double>(ni) * (ni - 1)
                            : static_cast<double>(ni) * nj;
  }
  return d;
}

Eigen::VectorXd singles_counter_diagonal(const FockBasis& basis,
                                         const std::vector<int>& mode_to_line,
                                         int line_j) {
  Eigen::VectorXd d(basis.dimension());
  for (int s = 0; s < basis.dimension(); ++s) {
    const Occupation& occ = basis.state(s);
    int nj = 0;
    for (int m = 0; m < basis.mode_count(); ++m)
      if (mode_to_line[m] == line_j) nj += occ[m];
    d(s) = nj;
  }
  return d;
}

double RateResponse::raw(const PathDensityMatrix& rho) const {
  return clamp_rate((rho.matrix * pair_op).trace().real());
}

double RateResponse::normalized(const PathDensityMatrix& rho) const {
  const double si = (rho.matrix * singles_i).trace().real();
  const double sj = (rho.matrix * singles_j).trace().real();
  const double denom = is_auto ? 0.5 * si * si : si * sj;
  if (denom < 1e-12)
    throw DivisionByZeroSingles("singles rate too small to normalize");
  return raw(rho) / denom;
}

namespace {

struct KindGeometry {
  bool staged;
  int line_i;
  int line_j;
};

KindGeometry kind_geometry(RateKind kind) {
  switch (kind) {
    case RateKind::r00: return {false, 0, 0};
    case RateKind::r01: return {false, 0, 1};
    case RateKind::r11: return {false, 1, 1};
    case RateKind::r33: return {true, 0, 0};
    case RateKind::r34: return {true, 0, 1};
    case RateKind::r35: return {true, 0, 2};
    case RateKind::r45: return {true, 1, 2};
  }
  throw InternalError("unreachable rate kind");
}

// The three input basis kets |2,0>, |1,1>, |0,2> on lines (0, 1), embedded
// into the transform's mode space and pushed through the lifted unitary.
Eigen::MatrixXcd lifted_input_kets(const ModeTransform& mt, const FockBasis& basis) {
  Eigen::MatrixXcd kets(basis.dimension(), 3);
  const int m = mt.size();
  Occupation occ(m, 0);
  const std::array<std::pair<int, int>, 3> counts = {{{2, 0}, {1, 1}, {0, 2}}};
  for (int k = 0; k < 3; ++k) {
    std::fill(occ.begin(), occ.end(), 0);
    occ[0] = counts[k].first;
    occ[1] = counts[k].second;
    kets.col(k) = lift_unitary_column(mt.matrix, basis, basis.index_of(occ));
  }
  return kets;
}

RateResponse response_from(const Eigen::MatrixXcd& kets, const FockBasis& basis,
                           const std::vector<int>& mode_to_line, int line_i,
                           int line_j) {
  RateResponse r;
  r.is_auto = line_i == line_j;
  Eigen::MatrixXcd pair =
      diagonal_response(kets, pair_counter_diagonal(basis, mode_to_line, line_i, line_j));
  if (r.is_auto) pair *= 0.5;
  r.pair_op = pair;
  r.singles_i =
      diagonal_response(kets, singles_counter_diagonal(basis, mode_to_line, line_i));
  if (line_i == line_j)
    r.singles_j = r.singles_i;
  else
    r.singles_j =
        diagonal_response(kets, singles_counter_diagonal(basis, mode_to_line, line_j));
  return r;
}

ModeTransform direct_transform() {
  return ModeTransform(Eigen::MatrixXcd::Identity(2, 2), {"path0", "path1"});
}

std::vector<int> identity_lines(int n) {
  std::vector<int> lines(n);
  for (int i = 0; i < n; ++i) lines[i] = i;
  return lines;
}

}  // namespace

RateEngine::RateEngine(const SetupConfig& cfg) : cfg_(cfg) { cfg_.validate(); }

RateResponse RateEngine::response(RateKind kind, std::optional<double> phi) const {
  const KindGeometry g = kind_geometry(kind);
  if (g.staged && !phi)
    throw OutOfRange("phase required for rate kind " + to_string(kind));
  const ModeTransform mt =
      g.staged ? build_analysis_setup(cfg_, *phi) : direct_transform();
  FockBasis basis(mt.size(), 2);
  const Eigen::MatrixXcd kets = lifted_input_kets(mt, basis);
  return response_from(kets, basis, identity_lines(mt.size()), g.line_i, g.line_j);
}

std::array<RateResponse, 4> RateEngine::staged_responses(double phi) const {
  const ModeTransform mt = build_analysis_setup(cfg_, phi);
  FockBasis basis(mt.size(), 2);
  const Eigen::MatrixXcd kets = lifted_input_kets(mt, basis);
  const std::vector<int> lines = identity_lines(mt.size());
  return {response_from(kets, basis, lines, 0, 0),
          response_from(kets, basis, lines, 0, 1),
          response_from(kets, basis, lines, 0, 2),
          response_from(kets, basis, lines, 1, 2)};
}

namespace {

// Detector label -> (staged?, line index). Direct labels live on the source
// paths; staged ones behind the interferometer.
std::pair<bool, int> detector_line(const std::string& label) {
  if (label == "path0") return {false, 0};
  if (label == "path1") return {false, 1};
  if (label == "path3") return {true, 0};
  if (label == "path4") return {true, 1};
  if (label == "path5") return {true, 2};
  throw UnknownLabel("unknown detector label '" + label + "'");
}

RateResponse pair_response(const SetupConfig& cfg, double phi, const std::string& i,
                           const std::string& j) {
  const auto [staged_i, line_i] = detector_line(i);
  const auto [staged_j, line_j] = detector_line(j);
  if (staged_i != staged_j)
    throw UnknownLabel("cannot pair detector '" + i + "' with '" + j + "'");
  const ModeTransform mt =
      staged_i ? build_analysis_setup(cfg, phi) : direct_transform();
  FockBasis basis(mt.size(), 2);
  const Eigen::MatrixXcd kets = lifted_input_kets(mt, basis);
  return response_from(kets, basis, identity_lines(mt.size()), line_i, line_j);
}

}  // namespace

double coincidence_rate(const PathDensityMatrix& rho, const SetupConfig& cfg,
                        double phi, const std::string& i, const std::string& j) {
  if (i == j) throw UnknownLabel("coincidence_rate requires two distinct detectors");
  return pair_response(cfg, phi, i, j).raw(rho);
}

double auto_rate(const PathDensityMatrix& rho, const SetupConfig& cfg, double phi,
                 const std::string& i) {
  return pair_response(cfg, phi, i, i).raw(rho);
}

double singles_rate(const PathDensityMatrix& rho, const SetupConfig& cfg, double phi,
                    const std::string& j) {
  const RateResponse r = pair_response(cfg, phi, j, j);
  return clamp_rate((rho.matrix * r.singles_i).trace().real());
}

double normalized_rate(const PathDensityMatrix& rho, const SetupConfig& cfg,
                       double phi, const std::string& i, const std::string& j) {
  return pair_response(cfg, phi, i, j).normalized(rho);
}

const std::array<RateKind, 9>& r_comp_layout() {
  static const std::array<RateKind, 9> layout = {
      RateKind::r00, RateKind::r01, RateKind::r11, RateKind::r33, RateKind::r34,
      RateKind::r45, RateKind::r33, RateKind::r34, RateKind::r45};
  return layout;
}

Eigen::Matrix<double, 9, 1> predict_r_comp(const PathDensityMatrix& rho,
                                           const SetupConfig& cfg, double phi1,
                                           double phi2) {
  RateEngine engine(cfg);
  Eigen::Matrix<double, 9, 1> out;
  out(0) = engine.response(RateKind::r00, std::nullopt).raw(rho);
  out(1) = engine.response(RateKind::r01, std::nullopt).raw(rho);
  out(2) = engine.response(RateKind::r11, std::nullopt).raw(rho);
  const auto s1 = engine.staged_responses(phi1);
  const auto s2 = engine.staged_responses(phi2);
  out(3) = s1[0].raw(rho);  // R33(phi1)
  out(4) = s1[1].raw(rho);  // R34(phi1)
  out(5) = s1[3].raw(rho);  // R45(phi1)
  out(6) = s2[0].raw(rho);
  out(7) = s2[1].raw(rho);
  out(8) = s2[3].raw(rho);
  return out;
}

double shutter_singles_rate(const SetupConfig& cfg, double phi, int open_input,
                            const std::string& detector) {
  if (open_input != 0 && open_input != 1)
    throw OutOfRange("open_input must be 0 or 1");
  const auto [staged, line] = detector_line(detector);
  if (!staged) throw UnknownLabel("shutter signal is read behind the stage");
  const ModeTransform mt = build_analysis_setup(cfg, phi);
  // Single photon after the HOM splitter: column open_input of the splitter
  // matrix spread over paths 0 and 1, vacuum elsewhere.
  const double r = cfg.hom_reflectivity;
  const double t = 1.0 - r;
  Eigen::VectorXcd probe = Eigen::VectorXcd::Zero(mt.size());
  if (open_input == 0) {
    probe(0) = std::sqrt(t);
    probe(1) = std::sqrt(r);
  } else {
    probe(0) = std::sqrt(r);
    probe(1) = -std::sqrt(t);
  }
  const Eigen::VectorXcd out = mt.matrix * probe;
  return clamp_rate(std::norm(out(line)));
}

}  // namespace pathtomo
