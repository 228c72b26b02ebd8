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

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pathtomo/correlations.hpp"
#include "pathtomo/distinguishability.hpp"
#include "pathtomo/errors.hpp"
#include "pathtomo/fock.hpp"
#include "pathtomo/optics.hpp"
#include "pathtomo/records.hpp"
#include "pathtomo/states.hpp"
#include "pathtomo/synth.hpp"
#include "pathtomo/tomography.hpp"
#include "pathtomo/version.hpp"

namespace py = pybind11;
using namespace pathtomo;

namespace {

FockDensity make_density(const Eigen::MatrixXcd& matrix, int mode_count,
                         int photon_number) {
  FockDensity rho;
  rho.mode_count = mode_count;
  rho.photon_number = photon_number;
  rho.matrix = matrix;
  return rho;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Simulation and tomography of path-entangled two-photon states";
  m.attr("__version__") = kVersion;

  py::register_exception<Error>(m, "PathtomoError");

  // ---- fock ----
  m.def("basis_states", &basis_states, py::arg("mode_count"), py::arg("photon_number"),
        "All photon-number occupations in canonical (descending) order");
  m.def("lift_unitary", &lift_unitary, py::arg("u"), py::arg("photon_number"),
        "Lift a mode unitary to the fixed-photon-number Fock space");
  m.def(
      "normally_ordered_expectation",
      [](const Eigen::MatrixXcd& rho, int mode_count, int photon_number,
         const std::vector<int>& create, const std::vector<int>& annihilate) {
        return normally_ordered_expectation(make_density(rho, mode_count, photon_number),
                                            create, annihilate);
      },
      py::arg("rho"), py::arg("mode_count"), py::arg("photon_number"),
      py::arg("create_modes"), py::arg("annihilate_modes"));

  // ---- states ----
  py::class_<PathDensityMatrix>(m, "PathDensityMatrix")
      .def(py::init<>())
      .def(py::init<const Eigen::Matrix3cd&>(), py::arg("matrix"))
      .def_static("from_pure", &PathDensityMatrix::from_pure, py::arg("amplitudes"))
      .def_readwrite("matrix", &PathDensityMatrix::matrix)
      .def("trace", &PathDensityMatrix::trace)
      .def("purity", &PathDensityMatrix::purity)
      .def("min_eigenvalue", &PathDensityMatrix::min_eigenvalue)
      .def("is_physical", &PathDensityMatrix::is_physical, py::arg("trace_tol") = 1e-9,
           py::arg("eig_tol") = 1e-9);

  py::class_<VisDensityMatrix>(m, "VisDensityMatrix")
      .def(py::init<>())
      .def(py::init([](const Eigen::Matrix3cd& sym, double antisym) {
             VisDensityMatrix v;
             v.sym_block = sym;
             v.antisym_pop = antisym;
             return v;
           }),
           py::arg("sym_block"), py::arg("antisym_pop"))
      .def_readwrite("sym_block", &VisDensityMatrix::sym_block)
      .def_readwrite("antisym_pop", &VisDensityMatrix::antisym_pop)
      .def("trace", &VisDensityMatrix::trace)
      .def("full", &VisDensityMatrix::full)
      .def("is_physical", &VisDensityMatrix::is_physical, py::arg("trace_tol") = 1e-9,
           py::arg("eig_tol") = 1e-9);

  m.def("noon_target", &noon_target);
  m.def("state_fixture", &state_fixture, py::arg("name"));

  // ---- optics ----
  py::enum_<PhaseArm>(m, "PhaseArm")
      .value("upper", PhaseArm::upper)
      .value("lower", PhaseArm::lower);

  py::class_<SetupConfig>(m, "SetupConfig")
      .def(py::init<>())
      .def_readwrite("hom_reflectivity", &SetupConfig::hom_reflectivity)
      .def_readwrite("bs1_reflectivity", &SetupConfig::bs1_reflectivity)
      .def_readwrite("bs2_reflectivity", &SetupConfig::bs2_reflectivity)
      .def_readwrite("eta0", &SetupConfig::eta0)
      .def_readwrite("eta1", &SetupConfig::eta1)
      .def_readwrite("eta2", &SetupConfig::eta2)
      .def_readwrite("phase_arm", &SetupConfig::phase_arm)
      .def("validate", &SetupConfig::validate);

  py::class_<ModeTransform>(m, "ModeTransform")
      .def(py::init<Eigen::MatrixXcd, std::vector<std::string>>(), py::arg("matrix"),
           py::arg("mode_labels"))
      .def_readonly("matrix", &ModeTransform::matrix)
      .def_readonly("mode_labels", &ModeTransform::mode_labels)
      .def("index_of", &ModeTransform::index_of, py::arg("label"));

  m.def("build_analysis_setup", &build_analysis_setup, py::arg("config"), py::arg("phi"));
  m.def("build_hom_source", &build_hom_source, py::arg("hom_reflectivity"));

  // ---- records ----
  py::enum_<RateKind>(m, "RateKind")
      .value("r00", RateKind::r00)
      .value("r01", RateKind::r01)
      .value("r11", RateKind::r11)
      .value("r33", RateKind::r33)
      .value("r34", RateKind::r34)
      .value("r35", RateKind::r35)
      .value("r45", RateKind::r45);

  py::class_<MeasurementRecord>(m, "MeasurementRecord")
      .def(py::init<>())
      .def(py::init([](RateKind kind, std::optional<double> phase, double value,
                       double sigma, double weight) {
             return MeasurementRecord{kind, phase, value, sigma, weight};
           }),
           py::arg("kind"), py::arg("phase") = std::nullopt, py::arg("value") = 0.0,
           py::arg("sigma") = 1.0, py::arg("weight") = 1.0)
      .def_readwrite("kind", &MeasurementRecord::kind)
      .def_readwrite("phase", &MeasurementRecord::phase)
      .def_readwrite("value", &MeasurementRecord::value)
      .def_readwrite("sigma", &MeasurementRecord::sigma)
      .def_readwrite("weight", &MeasurementRecord::weight);

  m.def("is_phase_dependent", &is_phase_dependent, py::arg("kind"));
  m.def(
      "read_records_csv",
      [](const std::string& path) { return read_records_csv(path); }, py::arg("path"));
  m.def(
      "write_records_csv",
      [](const std::string& path, const std::vector<MeasurementRecord>& records) {
        write_records_csv(path, records);
      },
      py::arg("path"), py::arg("records"));

  // ---- correlations ----
  m.def("coincidence_rate", &coincidence_rate, py::arg("rho"), py::arg("config"),
        py::arg("phi"), py::arg("i"), py::arg("j"));
  m.def("auto_rate", &auto_rate, py::arg("rho"), py::arg("config"), py::arg("phi"),
        py::arg("i"));
  m.def("singles_rate", &singles_rate, py::arg("rho"), py::arg("config"), py::arg("phi"),
        py::arg("j"));
  m.def("normalized_rate", &normalized_rate, py::arg("rho"), py::arg("config"),
        py::arg("phi"), py::arg("i"), py::arg("j"));
  m.def("predict_r_comp", &predict_r_comp, py::arg("rho"), py::arg("config"),
        py::arg("phi1"), py::arg("phi2"));
  m.def("shutter_singles_rate", &shutter_singles_rate, py::arg("config"), py::arg("phi"),
        py::arg("open_input"), py::arg("detector"));

  // ---- tomography ----
  py::enum_<RateConvention>(m, "RateConvention")
      .value("normalized", RateConvention::normalized)
      .value("raw", RateConvention::raw);

  m.def(
      "build_transfer_matrix",
      [](const SetupConfig& cfg, double phi1, double phi2) {
        const TransferMatrix tm = build_transfer_matrix(cfg, phi1, phi2);
        return py::make_tuple(Eigen::MatrixXd(tm.m), tm.condition_number);
      },
      py::arg("config"), py::arg("phi1"), py::arg("phi2"),
      "Returns (matrix, condition_number)");

  py::class_<LinearReconstruction>(m, "LinearReconstruction")
      .def_readonly("raw", &LinearReconstruction::raw)
      .def_readonly("normalized", &LinearReconstruction::normalized)
      .def_readonly("raw_trace", &LinearReconstruction::raw_trace)
      .def_readonly("condition_number", &LinearReconstruction::condition_number);

  m.def("linear_reconstruct", &linear_reconstruct, py::arg("records"), py::arg("config"),
        py::arg("phi1"), py::arg("phi2"));
  m.def("select_r_comp_subset", &select_r_comp_subset, py::arg("records"),
        py::arg("phi1"), py::arg("phi2"));
  m.def("rho_from_cholesky", &rho_from_cholesky, py::arg("t"));
  m.def("cholesky_from_rho", &cholesky_from_rho, py::arg("rho"));
  m.def("project_physical", &project_physical, py::arg("rho"));

  py::class_<MleOptions>(m, "MleOptions")
      .def(py::init<>())
      .def_readwrite("restarts", &MleOptions::restarts)
      .def_readwrite("max_evals", &MleOptions::max_evals)
      .def_readwrite("stall_tol", &MleOptions::stall_tol)
      .def_readwrite("stall_window", &MleOptions::stall_window)
      .def_readwrite("seed", &MleOptions::seed)
      .def_readwrite("convention", &MleOptions::convention);

  py::class_<MleResult>(m, "MleResult")
      .def_readonly("rho", &MleResult::rho)
      .def_readonly("objective", &MleResult::objective)
      .def_readonly("converged", &MleResult::converged)
      .def_readonly("evaluations", &MleResult::evaluations);

  m.def("mle_reconstruct", &mle_reconstruct, py::arg("records"), py::arg("config"),
        py::arg("options") = MleOptions{});

  m.def("fidelity", &fidelity, py::arg("rho"), py::arg("target"));

  py::class_<ScanPoint>(m, "ScanPoint")
      .def_readonly("phi1", &ScanPoint::phi1)
      .def_readonly("phi2", &ScanPoint::phi2)
      .def_readonly("fidelity", &ScanPoint::fidelity)
      .def_readonly("converged", &ScanPoint::converged)
      .def_readonly("singular", &ScanPoint::singular);

  py::class_<ScanSummaryRow>(m, "ScanSummaryRow")
      .def_readonly("separation", &ScanSummaryRow::separation)
      .def_readonly("mean", &ScanSummaryRow::mean)
      .def_readonly("stddev", &ScanSummaryRow::stddev)
      .def_readonly("count", &ScanSummaryRow::count);

  py::class_<ScanResult>(m, "ScanResult")
      .def_readonly("points", &ScanResult::points)
      .def_readonly("summary", &ScanResult::summary);

  m.def("fidelity_scan", &fidelity_scan, py::arg("records"), py::arg("config"),
        py::arg("grid"), py::arg("jobs") = 0, py::arg("options") = MleOptions{},
        py::call_guard<py::gil_scoped_release>());

  py::class_<SourceMetrics>(m, "SourceMetrics")
      .def_readonly("visibility", &SourceMetrics::visibility)
      .def_readonly("corrected_overlap", &SourceMetrics::corrected_overlap);

  m.def("source_metrics", &source_metrics, py::arg("r01_normalized"), py::arg("g2"));

  // ---- distinguishability ----
  m.def("hom_source_vis", &hom_source_vis, py::arg("hom_reflectivity"),
        py::arg("overlap"));
  m.def("predict_rate_vis", &predict_rate_vis, py::arg("rho"), py::arg("config"),
        py::arg("phi"), py::arg("i"), py::arg("j"));
  m.def("normalized_rate_vis", &normalized_rate_vis, py::arg("rho"), py::arg("config"),
        py::arg("phi"), py::arg("i"), py::arg("j"));
  m.def("singles_rate_vis", &singles_rate_vis, py::arg("rho"), py::arg("config"),
        py::arg("phi"), py::arg("j"));
  m.def("embed_path_state", &embed_path_state, py::arg("rho"));
  m.def("collapse_to_path", &collapse_to_path, py::arg("rho"), py::arg("tol") = 1e-9);

  py::class_<VisMleResult>(m, "VisMleResult")
      .def_readonly("rho", &VisMleResult::rho)
      .def_readonly("objective", &VisMleResult::objective)
      .def_readonly("converged", &VisMleResult::converged)
      .def_readonly("evaluations", &VisMleResult::evaluations);

  m.def("mle_reconstruct_vis", &mle_reconstruct_vis, py::arg("records"),
        py::arg("config"), py::arg("options") = MleOptions{});

  // ---- synth ----
  py::class_<PhaseTrace>(m, "PhaseTrace")
      .def(py::init<>())
      .def_readwrite("step_seconds", &PhaseTrace::step_seconds)
      .def_readwrite("phases", &PhaseTrace::phases)
      .def("duration_seconds", &PhaseTrace::duration_seconds);

  py::class_<ExperimentPlan>(m, "ExperimentPlan")
      .def(py::init<>())
      .def_readwrite("duration_seconds", &ExperimentPlan::duration_seconds)
      .def_readwrite("shutter_period_seconds", &ExperimentPlan::shutter_period_seconds)
      .def_readwrite("drift_timescale_seconds", &ExperimentPlan::drift_timescale_seconds)
      .def_readwrite("pulse_rate_hz", &ExperimentPlan::pulse_rate_hz)
      .def_readwrite("flux_per_pulse", &ExperimentPlan::flux_per_pulse)
      .def_readwrite("bin_count", &ExperimentPlan::bin_count)
      .def_readwrite("seed", &ExperimentPlan::seed)
      .def_readwrite("noiseless", &ExperimentPlan::noiseless)
      .def_readwrite("convention", &ExperimentPlan::convention)
      .def("validate", &ExperimentPlan::validate);

  py::class_<Campaign>(m, "Campaign")
      .def_readonly("records", &Campaign::records)
      .def_readonly("skipped_bins", &Campaign::skipped_bins);

  m.def("generate_phase_trace", &generate_phase_trace, py::arg("plan"));
  m.def("estimate_phase_from_shutter", &estimate_phase_from_shutter,
        py::arg("intensity"), py::arg("i_min"), py::arg("i_max"));
  m.def("bin_phases", &bin_phases, py::arg("trace"), py::arg("bin_count"));
  m.def("sample_campaign",
        py::overload_cast<const PathDensityMatrix&, const SetupConfig&,
                          const ExperimentPlan&>(&sample_campaign),
        py::arg("rho"), py::arg("config"), py::arg("plan"));
  m.def("sample_campaign",
        py::overload_cast<const VisDensityMatrix&, const SetupConfig&,
                          const ExperimentPlan&>(&sample_campaign),
        py::arg("rho"), py::arg("config"), py::arg("plan"));
  m.def("sample_r_comp_records", &sample_r_comp_records, py::arg("rho"),
        py::arg("config"), py::arg("phi1"), py::arg("phi2"), py::arg("count_scale"),
        py::arg("seed"));
}
