# Copyright 2026 The pathtomo Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math

import numpy as np
import pytest

import pathtomo as pt


def paper_config():
    cfg = pt.SetupConfig()
    cfg.hom_reflectivity = 0.508
    cfg.eta0 = cfg.eta1 = cfg.eta2 = 0.6
    return cfg


def test_basis_states():
    states = pt.basis_states(2, 2)
    assert states == [[2, 0], [1, 1], [0, 2]]
    assert len(pt.basis_states(6, 2)) == 21


def test_lift_unitary_balanced_splitter():
    bs = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    lifted = pt.lift_unitary(bs, 2)
    column = lifted[:, 1]  # image of |1,1>
    assert abs(column[0] - 1 / math.sqrt(2)) < 1e-12
    assert abs(column[1]) < 1e-12
    assert abs(column[2] + 1 / math.sqrt(2)) < 1e-12


def test_hom_source_is_the_noon_state():
    rho = pt.build_hom_source(0.5)
    assert abs(pt.fidelity(rho, pt.noon_target()) - 1.0) < 1e-12
    assert pt.coincidence_rate(rho, pt.SetupConfig(), 0.0, "path0", "path1") < 1e-12


def test_linear_round_trip():
    cfg = paper_config()
    truth = pt.build_hom_source(0.508)
    rates = pt.predict_r_comp(truth, cfg, 0.0, math.pi / 4)
    kinds = [pt.RateKind.r00, pt.RateKind.r01, pt.RateKind.r11,
             pt.RateKind.r33, pt.RateKind.r34, pt.RateKind.r45,
             pt.RateKind.r33, pt.RateKind.r34, pt.RateKind.r45]
    records = []
    for i, kind in enumerate(kinds):
        phase = None
        if pt.is_phase_dependent(kind):
            phase = 0.0 if i < 6 else math.pi / 4
        records.append(pt.MeasurementRecord(kind, phase, float(rates[i]), 1.0, 1.0))
    result = pt.linear_reconstruct(records, cfg, 0.0, math.pi / 4)
    assert np.max(np.abs(result.raw.matrix - truth.matrix)) < 1e-9
    assert abs(result.raw_trace - 1.0) < 1e-9


def test_singular_pair_raises():
    cfg = paper_config()
    _, cond = pt.build_transfer_matrix(cfg, 0.0, math.pi / 2)
    assert cond > 1e10
    truth = pt.build_hom_source(0.508)
    rates = pt.predict_r_comp(truth, cfg, 0.3, 0.3)
    records = []
    kinds = [pt.RateKind.r00, pt.RateKind.r01, pt.RateKind.r11,
             pt.RateKind.r33, pt.RateKind.r34, pt.RateKind.r45,
             pt.RateKind.r33, pt.RateKind.r34, pt.RateKind.r45]
    for i, kind in enumerate(kinds):
        phase = 0.3 if pt.is_phase_dependent(kind) else None
        records.append(pt.MeasurementRecord(kind, phase, float(rates[i]), 1.0, 1.0))
    with pytest.raises(pt.PathtomoError):
        pt.linear_reconstruct(records, cfg, 0.3, 0.3)


def test_campaign_and_mle_fit():
    cfg = paper_config()
    plan = pt.ExperimentPlan()
    plan.duration_seconds = 4000
    plan.flux_per_pulse = 2e-8
    plan.seed = 11
    campaign = pt.sample_campaign(pt.build_hom_source(0.508), cfg, plan)
    assert len(campaign.records) >= 9
    fit = pt.mle_reconstruct(campaign.records, cfg)
    assert fit.converged
    assert fit.rho.is_physical()
    assert pt.fidelity(fit.rho, pt.noon_target()) > 0.9


def test_distinguishability_round_trip():
    vis = pt.hom_source_vis(0.5, 0.975)
    assert abs(vis.antisym_pop - 0.0125) < 1e-12
    dip = pt.normalized_rate_vis(vis, pt.SetupConfig(), 0.0, "path0", "path1")
    assert abs(dip - 0.0125) < 1e-12


def test_source_metrics():
    metrics = pt.source_metrics(0.0275, 0.03)
    assert abs(metrics.visibility - 0.945) < 1e-12
    assert abs(metrics.corrected_overlap - 0.975) < 1e-12


def test_records_csv_round_trip(tmp_path):
    records = [
        pt.MeasurementRecord(pt.RateKind.r00, None, 1.0, 0.1, 100.0),
        pt.MeasurementRecord(pt.RateKind.r34, 0.4, 0.25, 0.02, 50.0),
    ]
    path = str(tmp_path / "records.csv")
    pt.write_records_csv(path, records)
    back = pt.read_records_csv(path)
    assert len(back) == 2
    assert back[0].phase is None
    assert back[1].phase == 0.4
    assert back[1].value == 0.25
