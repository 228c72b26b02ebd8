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

#include <doctest.h>

#include <cmath>
#include <random>

#include "pathtomo/errors.hpp"
#include "pathtomo/optics.hpp"
#include "pathtomo/synth.hpp"
#include "pathtomo/tomography.hpp"
#include "testutil.hpp"

using namespace pathtomo;

TEST_CASE("hermitian vectorization round trip") {
  std::mt19937_64 rng(41);
  const PathDensityMatrix rho = testutil::random_physical_rho(rng);
  const auto p = vectorize_hermitian(rho.matrix);
  CHECK((unvectorize_hermitian(p) - rho.matrix).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("transfer matrix conditioning") {
  const auto cfg = testutil::reference_config();
  for (double base : {0.0, 0.3}) {
    for (double sep : {0.0, M_PI / 2, M_PI})
      CHECK(build_transfer_matrix(cfg, base, base + sep).condition_number >
            kSingularConditionNumber);
    for (double sep : {M_PI / 4, 3 * M_PI / 8})
      CHECK(build_transfer_matrix(cfg, base, base + sep).condition_number < 1e5);
  }
}

TEST_CASE("transfer condition number is symmetric in the phase pair") {
  const auto cfg = testutil::reference_config();
  const double a = build_transfer_matrix(cfg, 0.3, 1.1).condition_number;
  const double b = build_transfer_matrix(cfg, 1.1, 0.3).condition_number;
  CHECK(a == doctest::Approx(b).epsilon(1e-9));
}

TEST_CASE("the quarter-wave pair cannot separate the noon state from a mixture") {
  const auto cfg = testutil::reference_config();
  CHECK(build_transfer_matrix(cfg, M_PI / 4, 3 * M_PI / 4).condition_number >
        kSingularConditionNumber);
  const auto noon_rates = predict_r_comp(build_hom_source(0.5), cfg, M_PI / 4, 3 * M_PI / 4);
  const auto mixed_rates =
      predict_r_comp(state_fixture("mixed"), cfg, M_PI / 4, 3 * M_PI / 4);
  CHECK((noon_rates - mixed_rates).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("linear inversion round trip") {
  const auto cfg = testutil::reference_config();
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 10; ++trial) {
    const PathDensityMatrix rho = testutil::random_physical_rho(rng);
    const auto records = testutil::raw_r_comp_records(rho, cfg, 0.0, M_PI / 4);
    const auto lin = linear_reconstruct(records, cfg, 0.0, M_PI / 4);
    CHECK((lin.raw.matrix - rho.matrix).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(lin.raw_trace == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("linear inversion rejects singular phase pairs") {
  const auto cfg = testutil::reference_config();
  const auto records = testutil::raw_r_comp_records(build_hom_source(0.5), cfg, 0.4, 0.4);
  CHECK_THROWS_AS(linear_reconstruct(records, cfg, 0.4, 0.4), SingularTransferMatrix);
}

TEST_CASE("linear inversion validates the record layout") {
  const auto cfg = testutil::reference_config();
  auto records = testutil::raw_r_comp_records(build_hom_source(0.5), cfg, 0.0, M_PI / 4);
  std::swap(records[0], records[1]);
  CHECK_THROWS_AS(linear_reconstruct(records, cfg, 0.0, M_PI / 4), OutOfRange);
}

TEST_CASE("minimal subset selection by nearest bin") {
  const auto cfg = testutil::reference_config();
  const auto records =
      testutil::noiseless_campaign_records(build_hom_source(0.508), cfg, 20);
  const double c2 = 2.5 * M_PI / 20;
  const double c7 = 7.5 * M_PI / 20;
  const auto subset = select_r_comp_subset(records, c2 + 0.01, c7 - 0.01);
  REQUIRE(subset.size() == 9);
  CHECK(*subset[3].phase == doctest::Approx(c2));
  CHECK(*subset[8].phase == doctest::Approx(c7));

  CHECK_THROWS_AS(select_r_comp_subset(records, c2 + 0.1, -2.0), MissingPhaseBin);
  std::vector<MeasurementRecord> no_direct(records.begin() + 3, records.end());
  CHECK_THROWS_AS(select_r_comp_subset(no_direct, c2, c7), InsufficientDesign);
}

TEST_CASE("triangular parameterization is always physical") {
  std::mt19937_64 rng(43);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::Matrix<double, 9, 1> t;
    for (int i = 0; i < 9; ++i) t(i) = g(rng);
    const PathDensityMatrix rho = rho_from_cholesky(t);
    CHECK(rho.trace() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rho.min_eigenvalue() >= -1e-12);
  }
  // Factorize-and-rebuild fixed point.
  const PathDensityMatrix rho = testutil::random_physical_rho(rng);
  const PathDensityMatrix back = rho_from_cholesky(cholesky_from_rho(rho));
  CHECK((back.matrix - rho.matrix).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("physical projection clamps negative eigenvalues") {
  Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
  m(0, 0) = 0.8;
  m(1, 1) = -0.1;
  m(2, 2) = 0.45;
  const PathDensityMatrix projected = project_physical(PathDensityMatrix(m));
  CHECK(projected.min_eigenvalue() >= -1e-14);
  CHECK(projected.trace() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("least-squares fit recovers a noiseless minimal set") {
  const auto cfg = testutil::reference_config();
  const PathDensityMatrix truth = build_hom_source(0.508);
  const auto records = testutil::normalized_r_comp_records(truth, cfg, 0.0, M_PI / 4);
  const MleResult fit = mle_reconstruct(records, cfg);
  CHECK(fit.objective < 1e-10);
  CHECK((fit.rho.matrix - truth.matrix).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(fit.rho.is_physical());
}

TEST_CASE("least-squares fit in raw convention") {
  const auto cfg = testutil::reference_config();
  const PathDensityMatrix truth = build_hom_source(0.508);
  const auto records = testutil::raw_r_comp_records(truth, cfg, 0.0, M_PI / 4);
  MleOptions opts;
  opts.convention = RateConvention::raw;
  const MleResult fit = mle_reconstruct(records, cfg, opts);
  CHECK(fit.objective < 1e-10);
  CHECK((fit.rho.matrix - truth.matrix).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("fit beats its projected linear warm start") {
  const auto cfg = testutil::reference_config();
  std::mt19937_64 rng(44);
  const PathDensityMatrix truth = testutil::random_physical_rho(rng);
  const auto records = sample_r_comp_records(truth, cfg, 0.0, M_PI / 4, 1e4, 99);
  const MleResult fit = mle_reconstruct(records, cfg);

  // Objective evaluated by hand at the projected linear-inversion point.
  const auto lin = linear_reconstruct(records, cfg, 0.0, M_PI / 4);
  const PathDensityMatrix start = project_physical(lin.normalized);
  RateEngine engine(cfg);
  double warm_objective = 0.0;
  const auto& layout = r_comp_layout();
  for (int i = 0; i < 9; ++i) {
    std::optional<double> phi;
    if (is_phase_dependent(layout[i])) phi = i < 6 ? 0.0 : M_PI / 4;
    const double model = engine.response(layout[i], phi).normalized(start);
    const double d = model - records[i].value;
    warm_objective += d * d / (records[i].sigma * records[i].sigma);
  }
  CHECK(fit.objective <= warm_objective + 1e-12);
}

TEST_CASE("fit output is physical on noisy data") {
  const auto cfg = testutil::reference_config();
  std::mt19937_64 rng(45);
  for (int trial = 0; trial < 5; ++trial) {
    const PathDensityMatrix truth =
        PathDensityMatrix::from_pure(testutil::random_pure3(rng));
    const auto records = sample_r_comp_records(truth, cfg, 0.0, M_PI / 4, 1e4, trial);
    const MleResult fit = mle_reconstruct(records, cfg);
    CHECK(fit.rho.trace() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(fit.rho.min_eigenvalue() >= -1e-9);
  }
}

TEST_CASE("overcomplete noisy fit stays close to the truth") {
  const auto cfg = testutil::reference_config();
  const double r = 0.508, t = 1.0 - r;
  Eigen::Vector3cd truth_ket;
  truth_ket << std::sqrt(2 * t * r), r - t, -std::sqrt(2 * t * r);
  const PathDensityMatrix truth = PathDensityMatrix::from_pure(truth_ket);
  ExperimentPlan plan;
  plan.flux_per_pulse = 4e-8;  // about 1e4 expected counts per record
  plan.seed = 5;
  const Campaign campaign = sample_campaign(truth, cfg, plan);
  CHECK(campaign.records.size() >= 79);
  const MleResult fit = mle_reconstruct(campaign.records, cfg);
  CHECK(fidelity(fit.rho, truth_ket) >= 0.98);
}

TEST_CASE("an exhausted budget reports the best point without converging") {
  const auto cfg = testutil::reference_config();
  const PathDensityMatrix truth = build_hom_source(0.508);
  const auto records = testutil::normalized_r_comp_records(truth, cfg, 0.0, M_PI / 4);
  MleOptions opts;
  opts.max_evals = 60;
  opts.restarts = 1;
  const MleResult fit = mle_reconstruct(records, cfg, opts);
  CHECK(!fit.converged);
  CHECK(fit.rho.is_physical());
  CHECK(fit.objective < 1e100);
}

TEST_CASE("noise is amplified near the singular phase separation") {
  // Around (pi/4, 3pi/4) the design barely constrains the coherence that
  // the noon fidelity depends on, so fits scatter much more than at a
  // quarter-wave separation from the same base phase.
  const auto cfg = testutil::reference_config();
  const PathDensityMatrix truth = build_hom_source(0.508);
  auto scatter = [&](double phi2) {
    std::vector<double> fids;
    for (int s = 0; s < 25; ++s) {
      const auto records =
          sample_r_comp_records(truth, cfg, M_PI / 4, phi2, 1e4, 500 + s);
      MleOptions opts;
      opts.seed = 70 + s;
      fids.push_back(fidelity(mle_reconstruct(records, cfg, opts).rho, noon_target()));
    }
    double mean = 0.0;
    for (double f : fids) mean += f;
    mean /= fids.size();
    double var = 0.0;
    for (double f : fids) var += (f - mean) * (f - mean);
    return std::sqrt(var / (fids.size() - 1));
  };
  const double near_singular = scatter(3 * M_PI / 4 - 0.05);
  const double well_posed = scatter(M_PI / 2);
  CHECK(near_singular > 1.5 * well_posed);
}

TEST_CASE("fit requires an invertible design") {
  const auto cfg = testutil::reference_config();
  const PathDensityMatrix truth = build_hom_source(0.508);
  auto records = testutil::normalized_r_comp_records(truth, cfg, 0.0, M_PI / 4);
  records.pop_back();
  CHECK_THROWS_AS(mle_reconstruct(records, cfg), InsufficientDesign);
  const auto singular = testutil::normalized_r_comp_records(truth, cfg, 0.4, 0.4);
  CHECK_THROWS_AS(mle_reconstruct(singular, cfg), InsufficientDesign);
}

TEST_CASE("fidelity examples and linearity") {
  const Eigen::Vector3cd target = noon_target();
  CHECK(fidelity(build_hom_source(0.5), target) == doctest::Approx(1.0));
  PathDensityMatrix mixed(Eigen::Matrix3cd::Identity() / 3.0);
  CHECK(fidelity(mixed, target) == doctest::Approx(1.0 / 3.0));
  Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
  m(0, 0) = 1.0;
  CHECK(fidelity(PathDensityMatrix(m), target) == doctest::Approx(0.5));

  std::mt19937_64 rng(46);
  const PathDensityMatrix a = testutil::random_physical_rho(rng);
  const PathDensityMatrix b = testutil::random_physical_rho(rng);
  const double w = 0.7;
  const double mix_fid = fidelity(PathDensityMatrix(w * a.matrix + (1 - w) * b.matrix), target);
  CHECK(mix_fid ==
        doctest::Approx(w * fidelity(a, target) + (1 - w) * fidelity(b, target))
            .epsilon(1e-12));
}

TEST_CASE("fidelity scan on noiseless records") {
  const auto cfg = testutil::reference_config();
  const auto records =
      testutil::noiseless_campaign_records(build_hom_source(0.5), cfg, 20);
  std::vector<std::pair<double, double>> grid;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      grid.emplace_back(i * M_PI / 4.0, j * M_PI / 4.0);
  const ScanResult result = fidelity_scan(records, cfg, grid, 2);
  REQUIRE(result.points.size() == grid.size());
  int singular = 0;
  for (const auto& pt : result.points) {
    if (pt.singular) {
      ++singular;
      continue;
    }
    CHECK(pt.fidelity > 0.999);
  }
  CHECK(singular >= 5);  // at least the equal-phase diagonal
  CHECK(!result.summary.empty());
  const ScanResult empty = fidelity_scan(records, cfg, {}, 2);
  CHECK(empty.points.empty());
}

TEST_CASE("source metrics") {
  const SourceMetrics perfect = source_metrics(0.0, 0.0);
  CHECK(perfect.visibility == doctest::Approx(1.0));
  CHECK(perfect.corrected_overlap == doctest::Approx(1.0));

  const SourceMetrics distinguishable = source_metrics(0.5, 0.0);
  CHECK(distinguishable.visibility == doctest::Approx(0.0));
  CHECK(distinguishable.corrected_overlap == doctest::Approx(0.0));

  const SourceMetrics measured = source_metrics(0.0275, 0.03);
  CHECK(measured.visibility == doctest::Approx(0.945).epsilon(1e-12));
  CHECK(measured.corrected_overlap == doctest::Approx(0.975).epsilon(1e-12));

  CHECK_THROWS_AS(source_metrics(-0.1, 0.0), OutOfRange);
  CHECK_THROWS_AS(source_metrics(0.1, 1.0), OutOfRange);
}
