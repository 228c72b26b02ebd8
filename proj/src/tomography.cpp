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

#include "pathtomo/tomography.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <thread>

#include "pathtomo/errors.hpp"
#include "pathtomo/nelder_mead.hpp"

namespace pathtomo {

Eigen::Matrix<double, 9, 1> vectorize_hermitian(const Eigen::Matrix3cd& m) {
  Eigen::Matrix<double, 9, 1> p;
  p << m(0, 0).real(), m(1, 1).real(), m(2, 2).real(), m(0, 1).real(),
      m(0, 1).imag(), m(0, 2).real(), m(0, 2).imag(), m(1, 2).real(),
      m(1, 2).imag();
  return p;
}

Eigen::Matrix3cd unvectorize_hermitian(const Eigen::Matrix<double, 9, 1>& p) {
  Eigen::Matrix3cd m;
  m(0, 0) = p(0);
  m(1, 1) = p(1);
  m(2, 2) = p(2);
  m(0, 1) = Complex(p(3), p(4));
  m(1, 0) = std::conj(m(0, 1));
  m(0, 2) = Complex(p(5), p(6));
  m(2, 0) = std::conj(m(0, 2));
  m(1, 2) = Complex(p(7), p(8));
  m(2, 1) = std::conj(m(1, 2));
  return m;
}

namespace {

// Row of the linear design: raw rate of the response as a functional of the
// 9-parameter vectorization. Tr[E_k A] for the Hermitian basis elements.
Eigen::Matrix<double, 9, 1> design_row(const RateResponse& r) {
  const Eigen::Matrix3cd& a = r.pair_op;
  Eigen::Matrix<double, 9, 1> row;
  row << a(0, 0).real(), a(1, 1).real(), a(2, 2).real(), 2.0 * a(0, 1).real(),
      2.0 * a(0, 1).imag(), 2.0 * a(0, 2).real(), 2.0 * a(0, 2).imag(),
      2.0 * a(1, 2).real(), 2.0 * a(1, 2).imag();
  return row;
}

double condition_of(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  if (smin <= smax * 1e-300 || smin == 0.0)
    return std::numeric_limits<double>::infinity();
  return smax / smin;
}

}  // namespace

TransferMatrix build_transfer_matrix(const SetupConfig& cfg, double phi1, double phi2) {
  RateEngine engine(cfg);
  TransferMatrix tm;
  tm.m.row(0) = design_row(engine.response(RateKind::r00, std::nullopt));
  tm.m.row(1) = design_row(engine.response(RateKind::r01, std::nullopt));
  tm.m.row(2) = design_row(engine.response(RateKind::r11, std::nullopt));
  const auto s1 = engine.staged_responses(phi1);
  const auto s2 = engine.staged_responses(phi2);
  tm.m.row(3) = design_row(s1[0]);
  tm.m.row(4) = design_row(s1[1]);
  tm.m.row(5) = design_row(s1[3]);
  tm.m.row(6) = design_row(s2[0]);
  tm.m.row(7) = design_row(s2[1]);
  tm.m.row(8) = design_row(s2[3]);
  tm.condition_number = condition_of(tm.m);
  return tm;
}

LinearReconstruction linear_reconstruct(const std::vector<MeasurementRecord>& records,
                                        const SetupConfig& cfg, double phi1,
                                        double phi2) {
  const auto& layout = r_comp_layout();
  if (records.size() != 9)
    throw OutOfRange("linear_reconstruct expects exactly 9 records");
  Eigen::Matrix<double, 9, 1> values;
  for (int i = 0; i < 9; ++i) {
    if (records[i].kind != layout[i])
      throw OutOfRange("record " + std::to_string(i) + " has kind " +
                       to_string(records[i].kind) + ", expected " +
                       to_string(layout[i]));
    if (is_phase_dependent(layout[i])) {
      const double want = i < 6 ? phi1 : phi2;
      if (!records[i].phase || std::abs(*records[i].phase - want) > 1e-6)
        throw OutOfRange("record " + std::to_string(i) +
                         " phase does not match the requested pair");
    }
    values(i) = records[i].value;
  }

  TransferMatrix tm = build_transfer_matrix(cfg, phi1, phi2);
  if (!(tm.condition_number < kSingularConditionNumber))
    throw SingularTransferMatrix(
        "transfer matrix is singular at this phase pair (condition number " +
        std::to_string(tm.condition_number) + ")");

  Eigen::Matrix<double, 9, 1> p = tm.m.fullPivLu().solve(values);
  LinearReconstruction out;
  out.raw = PathDensityMatrix(unvectorize_hermitian(p));
  out.raw_trace = out.raw.trace();
  out.normalized = PathDensityMatrix(out.raw.matrix / out.raw_trace);
  out.condition_number = tm.condition_number;
  return out;
}

std::vector<MeasurementRecord> select_r_comp_subset(
    const std::vector<MeasurementRecord>& records, double phi1, double phi2) {
  auto find_direct = [&](RateKind kind) -> const MeasurementRecord& {
    for (const auto& r : records)
      if (r.kind == kind) return r;
    throw InsufficientDesign("records contain no " + to_string(kind) + " entry");
  };

  // Bin width inferred from the distinct phases present.
  std::vector<double> phases;
  for (const auto& r : records)
    if (r.phase) phases.push_back(*r.phase);
  std::sort(phases.begin(), phases.end());
  phases.erase(std::unique(phases.begin(), phases.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               phases.end());
  double width = M_PI;
  for (size_t i = 1; i < phases.size(); ++i)
    width = std::min(width, phases[i] - phases[i - 1]);

  auto find_staged = [&](RateKind kind, double phi) -> const MeasurementRecord& {
    const MeasurementRecord* best = nullptr;
    double best_dist = std::numeric_limits<double>::infinity();
    for (const auto& r : records) {
      if (r.kind != kind || !r.phase) continue;
      const double dist = std::abs(*r.phase - phi);
      if (dist < best_dist) {
        best_dist = dist;
        best = &r;
      }
    }
    if (!best || best_dist > 0.5 * width + 1e-9)
      throw MissingPhaseBin("no " + to_string(kind) + " record within half a bin of phase " +
                            std::to_string(phi));
    return *best;
  };

  std::vector<MeasurementRecord> subset;
  subset.push_back(find_direct(RateKind::r00));
  subset.push_back(find_direct(RateKind::r01));
  subset.push_back(find_direct(RateKind::r11));
  for (double phi : {phi1, phi2}) {
    subset.push_back(find_staged(RateKind::r33, phi));
    subset.push_back(find_staged(RateKind::r34, phi));
    subset.push_back(find_staged(RateKind::r45, phi));
  }
  return subset;
}

PathDensityMatrix rho_from_cholesky(const Eigen::Matrix<double, 9, 1>& t) {
  Eigen::Matrix3cd tri = Eigen::Matrix3cd::Zero();
  tri(0, 0) = t(0);
  tri(1, 1) = t(1);
  tri(2, 2) = t(2);
  tri(1, 0) = Complex(t(3), t(4));
  tri(2, 0) = Complex(t(5), t(6));
  tri(2, 1) = Complex(t(7), t(8));
  Eigen::Matrix3cd rho = tri * tri.adjoint();
  const double tr = rho.trace().real();
  if (tr < 1e-300) return PathDensityMatrix(Eigen::Matrix3cd::Identity() / 3.0);
  return PathDensityMatrix(rho / tr);
}

Eigen::Matrix<double, 9, 1> cholesky_from_rho(const PathDensityMatrix& rho) {
  // Clamp to a strictly positive spectrum so the factorization exists.
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> es(rho.matrix);
  Eigen::Vector3d ev = es.eigenvalues().cwiseMax(1e-12);
  Eigen::Matrix3cd pd =
      es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
  Eigen::LLT<Eigen::Matrix3cd> llt(pd);
  Eigen::Matrix3cd tri = llt.matrixL();
  Eigen::Matrix<double, 9, 1> t;
  t << tri(0, 0).real(), tri(1, 1).real(), tri(2, 2).real(), tri(1, 0).real(),
      tri(1, 0).imag(), tri(2, 0).real(), tri(2, 0).imag(), tri(2, 1).real(),
      tri(2, 1).imag();
  return t;
}

PathDensityMatrix project_physical(const PathDensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> es(rho.matrix);
  Eigen::Vector3d ev = es.eigenvalues().cwiseMax(0.0);
  const double sum = ev.sum();
  if (sum < 1e-300) return PathDensityMatrix(Eigen::Matrix3cd::Identity() / 3.0);
  ev /= sum;
  return PathDensityMatrix(es.eigenvectors() * ev.asDiagonal() *
                           es.eigenvectors().adjoint());
}

namespace {

struct PreparedRecord {
  RateResponse response;
  double value = 0.0;
  double inv_sigma_sq = 1.0;
};

std::vector<PreparedRecord> prepare_records(const std::vector<MeasurementRecord>& records,
                                            const SetupConfig& cfg) {
  RateEngine engine(cfg);
  // Stage compilations grouped by phase; direct responses built once.
  std::map<RateKind, RateResponse> direct;
  std::map<double, std::array<RateResponse, 4>> staged;
  std::vector<PreparedRecord> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    PreparedRecord p;
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

constexpr double kPenalty = 1e100;

double model_value(const PreparedRecord& p, const Eigen::Matrix3cd& rho,
                   RateConvention convention) {
  const double raw = (rho * p.response.pair_op).trace().real();
  if (convention == RateConvention::raw) return raw;
  const double si = (rho * p.response.singles_i).trace().real();
  const double sj = (rho * p.response.singles_j).trace().real();
  const double denom = p.response.is_auto ? 0.5 * si * si : si * sj;
  if (denom < 1e-12) return kPenalty;
  return raw / denom;
}

double objective_at(const std::vector<PreparedRecord>& prepared,
                    const Eigen::Matrix3cd& rho, RateConvention convention) {
  double total = 0.0;
  for (const auto& p : prepared) {
    const double model = model_value(p, rho, convention);
    if (model >= kPenalty) return kPenalty;
    const double d = model - p.value;
    total += d * d * p.inv_sigma_sq;
  }
  return total;
}

void check_design(const std::vector<PreparedRecord>& prepared) {
  if (prepared.size() < 9)
    throw InsufficientDesign("at least 9 records are required");
  Eigen::MatrixXd design(prepared.size(), 9);
  for (size_t i = 0; i < prepared.size(); ++i)
    design.row(static_cast<Eigen::Index>(i)) = design_row(prepared[i].response);
  if (!(condition_of(design) < kSingularConditionNumber))
    throw InsufficientDesign("records do not span an invertible design");
}

// Best-effort linear warm start: pick the best-conditioned pair among the
// distinct record phases, invert the corresponding subset and project.
std::vector<Eigen::Matrix<double, 9, 1>> mle_starts(
    const std::vector<MeasurementRecord>& records, const SetupConfig& cfg,
    const MleOptions& opts) {
  std::vector<Eigen::Matrix<double, 9, 1>> starts;

  std::vector<double> phases;
  for (const auto& r : records)
    if (r.phase) phases.push_back(*r.phase);
  std::sort(phases.begin(), phases.end());
  phases.erase(std::unique(phases.begin(), phases.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               phases.end());
  double best_quality = 0.0;
  double best_a = 0.0, best_b = 0.0;
  for (size_t i = 0; i < phases.size(); ++i) {
    for (size_t j = i + 1; j < phases.size(); ++j) {
      const double d = phases[j] - phases[i];
      const double q = std::min(std::abs(std::sin(d)), std::abs(std::sin(2.0 * d)));
      if (q > best_quality) {
        best_quality = q;
        best_a = phases[i];
        best_b = phases[j];
      }
    }
  }
  if (best_quality > 1e-3) {
    try {
      auto subset = select_r_comp_subset(records, best_a, best_b);
      auto lin = linear_reconstruct(subset, cfg, best_a, best_b);
      starts.push_back(cholesky_from_rho(project_physical(lin.normalized)));
    } catch (const Error&) {
      // fall through to the generic starts
    }
  }

  starts.push_back(
      cholesky_from_rho(PathDensityMatrix(Eigen::Matrix3cd::Identity() / 3.0)));

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 0.5);
  for (int k = 0; k < opts.restarts; ++k) {
    Eigen::Matrix<double, 9, 1> t;
    for (int i = 0; i < 9; ++i) t(i) = gauss(rng);
    starts.push_back(t);
  }
  return starts;
}

}  // namespace

MleResult mle_reconstruct(const std::vector<MeasurementRecord>& records,
                          const SetupConfig& cfg, const MleOptions& opts) {
  const std::vector<PreparedRecord> prepared = prepare_records(records, cfg);
  check_design(prepared);

  auto objective = [&](const Eigen::VectorXd& t) {
    const PathDensityMatrix rho = rho_from_cholesky(t);
    return objective_at(prepared, rho.matrix, opts.convention);
  };

  std::vector<Eigen::VectorXd> starts;
  for (const auto& s : mle_starts(records, cfg, opts)) starts.push_back(s);

  NelderMeadOptions nm;
  nm.max_evals = opts.max_evals;
  nm.stall_tol = opts.stall_tol;
  nm.stall_window = opts.stall_window;
  NelderMeadResult r = multistart_minimize(objective, starts, 0.1, nm);

  MleResult out;
  out.rho = rho_from_cholesky(r.x);
  out.objective = r.value;
  out.converged = r.converged;
  out.evaluations = r.evaluations;
  return out;
}

double fidelity(const PathDensityMatrix& rho, const Eigen::Vector3cd& target) {
  return (target.adjoint() * rho.matrix * target)(0, 0).real();
}

ScanResult fidelity_scan(const std::vector<MeasurementRecord>& records,
                         const SetupConfig& cfg,
                         const std::vector<std::pair<double, double>>& grid,
                         int jobs, const MleOptions& opts) {
  ScanResult result;
  result.points.resize(grid.size());
  if (grid.empty()) return result;

  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(grid.size())));

  const Eigen::Vector3cd target = noon_target();
  std::atomic<size_t> next{0};
  std::vector<std::exception_ptr> failures(static_cast<size_t>(jobs));

  auto worker = [&](int worker_id) {
    try {
      for (size_t i = next.fetch_add(1); i < grid.size(); i = next.fetch_add(1)) {
        ScanPoint& pt = result.points[i];
        pt.phi1 = grid[i].first;
        pt.phi2 = grid[i].second;
        try {
          auto subset = select_r_comp_subset(records, pt.phi1, pt.phi2);
          MleOptions point_opts = opts;
          point_opts.seed = opts.seed + 0x9e37 * i;
          MleResult fit = mle_reconstruct(subset, cfg, point_opts);
          pt.fidelity = fidelity(fit.rho, target);
          pt.converged = fit.converged;
        } catch (const InsufficientDesign&) {
          pt.singular = true;
        }
      }
    } catch (...) {
      failures[static_cast<size_t>(worker_id)] = std::current_exception();
    }
  };

  std::vector<std::thread> pool;
  for (int w = 0; w < jobs; ++w) pool.emplace_back(worker, w);
  for (auto& t : pool) t.join();
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);

  // Fidelity statistics grouped by phase separation, singular cells excluded.
  std::map<long long, std::vector<double>> by_sep;
  for (const auto& pt : result.points) {
    if (pt.singular) continue;
    const long long key = std::llround(std::abs(pt.phi2 - pt.phi1) * 1e9);
    by_sep[key].push_back(pt.fidelity);
  }
  for (const auto& [key, values] : by_sep) {
    ScanSummaryRow row;
    row.separation = static_cast<double>(key) * 1e-9;
    row.count = static_cast<int>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= values.size();
    row.mean = mean;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    row.stddev = values.size() > 1 ? std::sqrt(var / (values.size() - 1)) : 0.0;
    result.summary.push_back(row);
  }
  return result;
}

SourceMetrics source_metrics(double r01_normalized, double g2) {
  if (!(r01_normalized >= 0.0 && r01_normalized <= 1.0))
    throw OutOfRange("normalized r01 must lie in [0,1]");
  if (!(g2 >= 0.0 && g2 < 1.0)) throw OutOfRange("g2 must lie in [0,1)");
  SourceMetrics m;
  m.visibility = 1.0 - 2.0 * r01_normalized;
  m.corrected_overlap = m.visibility + g2;
  return m;
}

}  // namespace pathtomo
