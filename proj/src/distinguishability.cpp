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

#include "pathtomo/distinguishability.hpp"

#include <cmath>
#include <map>
#include <random>

#include "pathtomo/errors.hpp"
#include "pathtomo/nelder_mead.hpp"

namespace pathtomo {

double VisRateResponse::raw(const VisDensityMatrix& rho) const {
  return clamp_rate((rho.full() * pair_op).trace().real());
}

double VisRateResponse::normalized(const VisDensityMatrix& rho) const {
  const Eigen::Matrix4cd full = rho.full();
  const double si = (full * singles_i).trace().real();
  const double sj = (full * singles_j).trace().real();
  const double denom = is_auto ? 0.5 * si * si : si * sj;
  if (denom < 1e-12)
    throw DivisionByZeroSingles("singles rate too small to normalize");
  return raw(rho) / denom;
}

namespace {

// The label-resolved mode space doubles the spatial transform: modes
// 0..M-1 carry label a, modes M..2M-1 label b, and the optics acts the same
// way on both sectors.
Eigen::MatrixXcd doubled_transform(const Eigen::MatrixXcd& u) {
  const int m = static_cast<int>(u.rows());
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(2 * m, 2 * m);
  d.topLeftCorner(m, m) = u;
  d.bottomRightCorner(m, m) = u;
  return d;
}

std::vector<int> doubled_lines(int m) {
  std::vector<int> lines(2 * m);
  for (int i = 0; i < m; ++i) {
    lines[i] = i;
    lines[m + i] = i;
  }
  return lines;
}

Occupation two_mode_ket(int modes, int first, int second) {
  Occupation occ(modes, 0);
  occ[first] += 1;
  occ[second] += 1;
  return occ;
}

// Columns: the four basis states |2,0>, psi+, |0,2>, psi- embedded as
// one-photon-per-label kets and pushed through the doubled transform.
Eigen::MatrixXcd lifted_vis_kets(const Eigen::MatrixXcd& doubled, const FockBasis& basis,
                                 int spatial_modes) {
  const int m = spatial_modes;
  const auto col_for = [&](int mode_a, int mode_b) {
    return lift_unitary_column(doubled, basis,
                               basis.index_of(two_mode_ket(2 * m, mode_a, m + mode_b)));
  };
  const Eigen::VectorXcd a0b0 = col_for(0, 0);
  const Eigen::VectorXcd a0b1 = col_for(0, 1);
  const Eigen::VectorXcd a1b0 = col_for(1, 0);
  const Eigen::VectorXcd a1b1 = col_for(1, 1);
  Eigen::MatrixXcd kets(basis.dimension(), 4);
  kets.col(0) = a0b0;
  kets.col(1) = (a0b1 + a1b0) / std::sqrt(2.0);
  kets.col(2) = a1b1;
  kets.col(3) = (a0b1 - a1b0) / std::sqrt(2.0);
  return kets;
}

}  // namespace

VisRateResponse vis_response(const ModeTransform& spatial, int line_i, int line_j) {
  const int m = spatial.size();
  if (line_i < 0 || line_i >= m || line_j < 0 || line_j >= m)
    throw UnknownLabel("detector line outside the spatial transform");
  const Eigen::MatrixXcd doubled = doubled_transform(spatial.matrix);
  FockBasis basis(2 * m, 2);
  const Eigen::MatrixXcd kets = lifted_vis_kets(doubled, basis, m);
  const std::vector<int> lines = doubled_lines(m);

  VisRateResponse r;
  r.is_auto = line_i == line_j;
  Eigen::MatrixXcd pair =
      diagonal_response(kets, pair_counter_diagonal(basis, lines, line_i, line_j));
  if (r.is_auto) pair *= 0.5;
  r.pair_op = pair;
  r.singles_i = diagonal_response(kets, singles_counter_diagonal(basis, lines, line_i));
  if (line_i == line_j)
    r.singles_j = r.singles_i;
  else
    r.singles_j =
        diagonal_response(kets, singles_counter_diagonal(basis, lines, line_j));
  return r;
}

namespace {

struct KindGeometry {
  bool staged;
  int line_i;
  int line_j;
};

KindGeometry vis_kind_geometry(RateKind kind) {
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

ModeTransform vis_direct_transform() {
  return ModeTransform(Eigen::MatrixXcd::Identity(2, 2), {"path0", "path1"});
}

std::pair<bool, int> vis_detector_line(const std::string& label) {
  if (label == "path0") return {false, 0};
  if (label == "path1") return {false, 1};
  if (label == "path3") return {true, 0};
  if (label == "path4") return {true, 1};
  if (label == "path5") return {true, 2};
  throw UnknownLabel("unknown detector label '" + label + "'");
}

}  // namespace

VisRateEngine::VisRateEngine(const SetupConfig& cfg) : cfg_(cfg) { cfg_.validate(); }

VisRateResponse VisRateEngine::response(RateKind kind, std::optional<double> phi) const {
  const KindGeometry g = vis_kind_geometry(kind);
  if (g.staged && !phi)
    throw OutOfRange("phase required for rate kind " + to_string(kind));
  const ModeTransform mt =
      g.staged ? build_analysis_setup(cfg_, *phi) : vis_direct_transform();
  return vis_response(mt, g.line_i, g.line_j);
}

std::array<VisRateResponse, 4> VisRateEngine::staged_responses(double phi) const {
  const ModeTransform mt = build_analysis_setup(cfg_, phi);
  return {vis_response(mt, 0, 0), vis_response(mt, 0, 1), vis_response(mt, 0, 2),
          vis_response(mt, 1, 2)};
}

namespace {

VisRateResponse vis_pair_response(const SetupConfig& cfg, double phi,
                                  const std::string& i, const std::string& j) {
  const auto [staged_i, line_i] = vis_detector_line(i);
  const auto [staged_j, line_j] = vis_detector_line(j);
  if (staged_i != staged_j)
    throw UnknownLabel("cannot pair detector '" + i + "' with '" + j + "'");
  const ModeTransform mt =
      staged_i ? build_analysis_setup(cfg, phi) : vis_direct_transform();
  return vis_response(mt, line_i, line_j);
}

}  // namespace

double predict_rate_vis(const VisDensityMatrix& rho, const SetupConfig& cfg,
                        double phi, const std::string& i, const std::string& j) {
  return vis_pair_response(cfg, phi, i, j).raw(rho);
}

double normalized_rate_vis(const VisDensityMatrix& rho, const SetupConfig& cfg,
                           double phi, const std::string& i, const std::string& j) {
  return vis_pair_response(cfg, phi, i, j).normalized(rho);
}

double singles_rate_vis(const VisDensityMatrix& rho, const SetupConfig& cfg,
                        double phi, const std::string& j) {
  const VisRateResponse r = vis_pair_response(cfg, phi, j, j);
  return clamp_rate((rho.full() * r.singles_i).trace().real());
}

VisDensityMatrix hom_source_vis(double hom_reflectivity, double overlap) {
  if (!(hom_reflectivity > 0.0 && hom_reflectivity < 1.0))
    throw OutOfRange("hom reflectivity must lie in (0,1)");
  if (!(overlap >= 0.0 && overlap <= 1.0))
    throw OutOfRange("overlap must lie in [0,1]");
  const double r = hom_reflectivity;
  const double t = 1.0 - r;
  // Symmetric part behaves exactly like indistinguishable photons on the
  // splitter; the antisymmetric singlet is invariant up to phase.
  Eigen::Vector3cd sym;
  sym << Complex(std::sqrt(2.0 * t * r), 0.0), Complex(r - t, 0.0),
      Complex(-std::sqrt(2.0 * t * r), 0.0);
  VisDensityMatrix out;
  out.sym_block = 0.5 * (1.0 + overlap) * (sym * sym.adjoint());
  out.antisym_pop = 0.5 * (1.0 - overlap);
  return out;
}

VisDensityMatrix embed_path_state(const PathDensityMatrix& rho) {
  VisDensityMatrix out;
  out.sym_block = rho.matrix;
  out.antisym_pop = 0.0;
  return out;
}

PathDensityMatrix collapse_to_path(const VisDensityMatrix& rho, double tol) {
  if (std::abs(rho.antisym_pop) > tol)
    throw OutOfRange("cannot collapse a state with antisymmetric population " +
                     std::to_string(rho.antisym_pop));
  return PathDensityMatrix(rho.sym_block);
}

namespace {

struct PreparedVisRecord {
  VisRateResponse response;
  double value = 0.0;
  double inv_sigma_sq = 1.0;
};

std::vector<PreparedVisRecord> prepare_vis_records(
    const std::vector<MeasurementRecord>& records, const SetupConfig& cfg) {
  VisRateEngine engine(cfg);
  std::map<RateKind, VisRateResponse> direct;
  std::map<double, std::array<VisRateResponse, 4>> staged;
  std::vector<PreparedVisRecord> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    PreparedVisRecord p;
    if (is_phase_dependent(r.kind)) {
      if (!r.phase) throw OutOfRange("phase-dependent record without phase");
      auto it = staged.find(*r.phase);
      if (it == staged.end())
        it = staged.emplace(*r.phase, engine.staged_responses(*r.phase)).first;
      switch (r.kind) {
        case RateKind::r33: p.response = it->second[0]; break;
        case RateKind::r34: p.response = it->second[1]; break;
        case RateKind::r35: p.response = it->second[2]; break;
        default: p.response = it->second[3]; break;
      }
    } else {
      auto it = direct.find(r.kind);
      if (it == direct.end())
        it = direct.emplace(r.kind, engine.response(r.kind, std::nullopt)).first;
      p.response = it->second;
    }
    if (!(r.sigma > 0.0)) throw OutOfRange("record sigma must be positive");
    p.value = r.value;
    p.inv_sigma_sq = 1.0 / (r.sigma * r.sigma);
    out.push_back(std::move(p));
  }
  return out;
}

// 10-dimensional design row: the symmetric block in the 9-parameter
// vectorization plus the antisymmetric population.
Eigen::VectorXd vis_design_row(const VisRateResponse& r) {
  Eigen::VectorXd row(10);
  const Eigen::Matrix4cd& a = r.pair_op;
  row << a(0, 0).real(), a(1, 1).real(), a(2, 2).real(), 2.0 * a(0, 1).real(),
      2.0 * a(0, 1).imag(), 2.0 * a(0, 2).real(), 2.0 * a(0, 2).imag(),
      2.0 * a(1, 2).real(), 2.0 * a(1, 2).imag(), a(3, 3).real();
  return row;
}

VisDensityMatrix vis_from_params(const Eigen::VectorXd& t) {
  Eigen::Matrix3cd tri = Eigen::Matrix3cd::Zero();
  tri(0, 0) = t(0);
  tri(1, 1) = t(1);
  tri(2, 2) = t(2);
  tri(1, 0) = Complex(t(3), t(4));
  tri(2, 0) = Complex(t(5), t(6));
  tri(2, 1) = Complex(t(7), t(8));
  Eigen::Matrix3cd sym = tri * tri.adjoint();
  const double antisym = t(9) * t(9);
  const double total = sym.trace().real() + antisym;
  VisDensityMatrix out;
  if (total < 1e-300) {
    out.sym_block = Eigen::Matrix3cd::Identity() / 4.0;
    out.antisym_pop = 0.25;
    return out;
  }
  out.sym_block = sym / total;
  out.antisym_pop = antisym / total;
  return out;
}

Eigen::VectorXd params_from_vis(const VisDensityMatrix& rho) {
  Eigen::VectorXd t(10);
  t.head<9>() = cholesky_from_rho(PathDensityMatrix(rho.sym_block));
  t(9) = std::sqrt(std::max(rho.antisym_pop, 0.0));
  return t;
}

constexpr double kPenalty = 1e100;

double vis_model_value(const PreparedVisRecord& p, const VisDensityMatrix& rho,
                       RateConvention convention) {
  const Eigen::Matrix4cd full = rho.full();
  const double raw = (full * p.response.pair_op).trace().real();
  if (convention == RateConvention::raw) return raw;
  const double si = (full * p.response.singles_i).trace().real();
  const double sj = (full * p.response.singles_j).trace().real();
  const double denom = p.response.is_auto ? 0.5 * si * si : si * sj;
  if (denom < 1e-12) return kPenalty;
  return raw / denom;
}

}  // namespace

VisMleResult mle_reconstruct_vis(const std::vector<MeasurementRecord>& records,
                                 const SetupConfig& cfg, const MleOptions& opts) {
  const auto prepared = prepare_vis_records(records, cfg);
  if (prepared.size() < 10)
    throw InsufficientDesign("at least 10 records are required");
  Eigen::MatrixXd design(prepared.size(), 10);
  for (size_t i = 0; i < prepared.size(); ++i)
    design.row(static_cast<Eigen::Index>(i)) = vis_design_row(prepared[i].response);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design);
  const auto& sv = svd.singularValues();
  if (!(sv(0) / sv(sv.size() - 1) < kSingularConditionNumber))
    throw InsufficientDesign("records do not span the ten-parameter design");

  auto objective = [&](const Eigen::VectorXd& t) {
    const VisDensityMatrix rho = vis_from_params(t);
    double total = 0.0;
    for (const auto& p : prepared) {
      const double model = vis_model_value(p, rho, opts.convention);
      if (model >= kPenalty) return kPenalty;
      const double d = model - p.value;
      total += d * d * p.inv_sigma_sq;
    }
    return total;
  };

  std::vector<Eigen::VectorXd> starts;
  {
    VisDensityMatrix mixed;
    mixed.sym_block = Eigen::Matrix3cd::Identity() * 0.25;
    mixed.antisym_pop = 0.25;
    starts.push_back(params_from_vis(mixed));
    starts.push_back(params_from_vis(hom_source_vis(0.5, 0.9)));
  }
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 0.5);
  for (int k = 0; k < opts.restarts; ++k) {
    Eigen::VectorXd t(10);
    for (int i = 0; i < 10; ++i) t(i) = gauss(rng);
    starts.push_back(t);
  }

  NelderMeadOptions nm;
  nm.max_evals = opts.max_evals;
  nm.stall_tol = opts.stall_tol;
  nm.stall_window = opts.stall_window;
  NelderMeadResult r = multistart_minimize(objective, starts, 0.1, nm);

  VisMleResult out;
  out.rho = vis_from_params(r.x);
  out.objective = r.value;
  out.converged = r.converged;
  out.evaluations = r.evaluations;
  return out;
}

}  // namespace pathtomo
