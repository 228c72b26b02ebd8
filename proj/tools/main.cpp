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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <variant>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pathtomo/distinguishability.hpp"
#include "pathtomo/errors.hpp"
#include "pathtomo/synth.hpp"
#include "pathtomo/tomography.hpp"
#include "pathtomo/version.hpp"

namespace {

using nlohmann::json;
using namespace pathtomo;

constexpr int kExitParse = 2;
constexpr int kExitGeneration = 3;
constexpr int kExitSingular = 4;
constexpr int kExitNonConvergence = 5;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json_file(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ParseError("bad JSON in '" + path + "': " + e.what());
  }
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_manifest(const std::string& command, const std::vector<std::string>& inputs,
                    const std::string& config_hash, std::uint64_t seed,
                    const std::vector<std::string>& outputs) {
  json manifest{{"command", command},         {"inputs", inputs},
                {"configHash", config_hash},  {"seed", seed},
                {"outputs", outputs},         {"toolVersion", kVersion}};
  const std::string path = outputs.front() + ".manifest.json";
  std::ofstream out(path);
  out << manifest.dump(2) << "\n";
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json matrix_to_json(const Eigen::MatrixXcd& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json re_row = json::array(), im_row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      re_row.push_back(m(r, c).real());
      im_row.push_back(m(r, c).imag());
    }
    re.push_back(re_row);
    im.push_back(im_row);
  }
  return json{{"re", re}, {"im", im}};
}

Eigen::Matrix3cd matrix3_from_json(const json& j) {
  Eigen::Matrix3cd m;
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      m(r, c) = Complex(re.at(r).at(c).get<double>(), im.at(r).at(c).get<double>());
  return m;
}

using StateSpec = std::variant<PathDensityMatrix, VisDensityMatrix>;

StateSpec parse_state_spec(const json& spec) {
  if (spec.is_string()) return state_fixture(spec.get<std::string>());
  if (spec.contains("homSource"))
    return build_hom_source(spec.at("homSource").at("reflectivity").get<double>());
  if (spec.contains("homSourceVis")) {
    const auto& hs = spec.at("homSourceVis");
    return hom_source_vis(hs.at("reflectivity").get<double>(),
                          hs.at("overlap").get<double>());
  }
  if (spec.contains("matrix"))
    return PathDensityMatrix(matrix3_from_json(spec.at("matrix")));
  throw ParseError(
      "state must be a fixture name or an object with homSource / homSourceVis / matrix");
}

json eigenvalues_json(const Eigen::Matrix3cd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> es(m);
  json out = json::array();
  for (int i = 0; i < 3; ++i) out.push_back(es.eigenvalues()(i));
  return out;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string config_path, plan_path, out_path;
  std::optional<std::uint64_t> seed;
};

int cmd_simulate(const SimulateArgs& args) {
  json cfg_json, plan_json;
  SetupConfig cfg;
  ExperimentPlan plan;
  StateSpec state;
  try {
    cfg_json = parse_json_file(args.config_path);
    plan_json = parse_json_file(args.plan_path);
    cfg = setup_config_from_json(cfg_json);
    plan = plan_from_json(plan_json);
    if (args.seed) plan.seed = *args.seed;
    if (!plan_json.contains("state"))
      throw ParseError("plan is missing the \"state\" entry");
    state = parse_state_spec(plan_json.at("state"));
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  }

  try {
    Campaign campaign =
        std::holds_alternative<PathDensityMatrix>(state)
            ? sample_campaign(std::get<PathDensityMatrix>(state), cfg, plan)
            : sample_campaign(std::get<VisDensityMatrix>(state), cfg, plan);
    write_records_csv(args.out_path, campaign.records);
    for (int b : campaign.skipped_bins)
      std::cerr << "note: phase bin " << b << " had no acquisition time, skipped\n";
    write_manifest("simulate", {args.config_path, args.plan_path},
                   fnv1a_hex(read_file(args.config_path) + read_file(args.plan_path)),
                   plan.seed, {args.out_path});
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitGeneration;
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct TomoArgs {
  std::string records_path, config_path, out_path, mode, convention = "normalized";
  std::optional<double> phi1, phi2;
  std::uint64_t seed = 20202;
};

int cmd_tomo(const TomoArgs& args) {
  SetupConfig cfg;
  std::vector<MeasurementRecord> records;
  try {
    cfg = setup_config_from_json(parse_json_file(args.config_path));
    records = read_records_csv(args.records_path);
    if (args.mode != "linear" && args.mode != "mle" && args.mode != "vis")
      throw ParseError("mode must be linear, mle or vis");
    if (args.mode == "linear" && (!args.phi1 || !args.phi2))
      throw ParseError("linear mode requires --phi1 and --phi2");
    if (args.convention != "normalized" && args.convention != "raw")
      throw ParseError("convention must be normalized or raw");
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  }

  json out;
  out["mode"] = args.mode;
  out["manifest"] = args.out_path + ".manifest.json";
  const Eigen::Vector3cd target = noon_target();
  int exit_code = 0;

  try {
    if (args.mode == "linear") {
      auto subset = select_r_comp_subset(records, *args.phi1, *args.phi2);
      // Invert at the phases the selected records were actually binned at.
      const double at1 = *subset[3].phase;
      const double at2 = *subset[8].phase;
      auto lin = linear_reconstruct(subset, cfg, at1, at2);
      out["phi1"] = at1;
      out["phi2"] = at2;
      out["rho"] = matrix_to_json(lin.normalized.matrix);
      out["raw"] = matrix_to_json(lin.raw.matrix);
      out["rawTrace"] = lin.raw_trace;
      out["trace"] = lin.normalized.trace();
      out["conditionNumber"] = lin.condition_number;
      out["eigenvalues"] = eigenvalues_json(lin.normalized.matrix);
      out["fidelityToNoon"] = fidelity(lin.normalized, target);
      out["converged"] = true;
      out["objective"] = nullptr;
    } else {
      MleOptions opts;
      opts.seed = args.seed;
      opts.convention = args.convention == "raw" ? RateConvention::raw
                                                 : RateConvention::normalized;
      if (args.mode == "mle") {
        MleResult fit = mle_reconstruct(records, cfg, opts);
        out["rho"] = matrix_to_json(fit.rho.matrix);
        out["trace"] = fit.rho.trace();
        out["eigenvalues"] = eigenvalues_json(fit.rho.matrix);
        out["fidelityToNoon"] = fidelity(fit.rho, target);
        out["objective"] = fit.objective;
        out["converged"] = fit.converged;
        out["evaluations"] = fit.evaluations;
        if (!fit.converged) exit_code = kExitNonConvergence;
      } else {
        VisMleResult fit = mle_reconstruct_vis(records, cfg, opts);
        out["symBlock"] = matrix_to_json(fit.rho.sym_block);
        out["antisymPop"] = fit.rho.antisym_pop;
        out["trace"] = fit.rho.trace();
        out["eigenvalues"] = eigenvalues_json(fit.rho.sym_block);
        out["fidelityToNoon"] =
            fidelity(PathDensityMatrix(fit.rho.sym_block), target);
        out["objective"] = fit.objective;
        out["converged"] = fit.converged;
        out["evaluations"] = fit.evaluations;
        if (!fit.converged) exit_code = kExitNonConvergence;
      }
    }
  } catch (const SingularTransferMatrix& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSingular;
  } catch (const InsufficientDesign& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSingular;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitGeneration;
  }

  std::ofstream f(args.out_path);
  f << out.dump(2) << "\n";
  f.close();
  write_manifest("tomo", {args.records_path, args.config_path},
                 fnv1a_hex(read_file(args.config_path)), args.seed, {args.out_path});
  if (exit_code == kExitNonConvergence)
    std::cerr << "warning: fit did not converge, best point written\n";
  return exit_code;
}

// ---------------------------------------------------------------------------

struct ScanArgs {
  std::string records_path, config_path, out_path, grid = "10x10";
  int jobs = 0;
  std::uint64_t seed = 20202;
};

int cmd_scan(const ScanArgs& args) {
  SetupConfig cfg;
  std::vector<MeasurementRecord> records;
  int n1 = 0, n2 = 0;
  try {
    cfg = setup_config_from_json(parse_json_file(args.config_path));
    records = read_records_csv(args.records_path);
    if (std::sscanf(args.grid.c_str(), "%dx%d", &n1, &n2) != 2 || n1 < 0 || n2 < 0)
      throw ParseError("grid must look like \"20x20\"");
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  }

  std::vector<std::pair<double, double>> grid;
  auto axis = [](int n, int i) { return n > 1 ? i * M_PI / (n - 1) : 0.0; };
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) grid.emplace_back(axis(n1, i), axis(n2, j));

  ScanResult result;
  try {
    MleOptions opts;
    opts.seed = args.seed;
    result = fidelity_scan(records, cfg, grid, args.jobs, opts);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitGeneration;
  }

  std::ofstream f(args.out_path);
  f << "kind,phi1,phi2,fidelity,status,stddev,count\n";
  int fitted = 0, failed = 0;
  for (const auto& pt : result.points) {
    f << "grid," << fmt(pt.phi1) << ',' << fmt(pt.phi2) << ',';
    if (pt.singular) {
      f << ",singular,,\n";
    } else {
      f << fmt(pt.fidelity) << ',' << (pt.converged ? "ok" : "noconv") << ",,\n";
      ++fitted;
      if (!pt.converged) ++failed;
    }
  }
  for (const auto& row : result.summary)
    f << "summary," << fmt(row.separation) << ",," << fmt(row.mean) << ",,"
      << fmt(row.stddev) << ',' << row.count << "\n";
  f.close();
  write_manifest("scan", {args.records_path, args.config_path},
                 fnv1a_hex(read_file(args.config_path)), args.seed, {args.out_path});

  if (fitted > 0 && failed * 10 > fitted) {
    std::cerr << "error: " << failed << " of " << fitted << " grid fits failed\n";
    return kExitNonConvergence;
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct CurvesArgs {
  std::string state, config_path, out_path;
  int points = 64;
};

int cmd_curves(const CurvesArgs& args) {
  SetupConfig cfg;
  StateSpec state;
  try {
    cfg = setup_config_from_json(parse_json_file(args.config_path));
    // A fixture name, otherwise a path to a state-spec JSON file.
    try {
      state = state_fixture(args.state);
    } catch (const UnknownLabel&) {
      if (args.state.find(".json") == std::string::npos) throw;
      state = parse_state_spec(parse_json_file(args.state));
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  }

  std::ofstream f(args.out_path);
  f << "phi,R00,R01,R11,R33,R34,R35,R45\n";
  try {
    if (std::holds_alternative<PathDensityMatrix>(state)) {
      const auto& rho = std::get<PathDensityMatrix>(state);
      RateEngine engine(cfg);
      const double r00 = engine.response(RateKind::r00, std::nullopt).raw(rho);
      const double r01 = engine.response(RateKind::r01, std::nullopt).raw(rho);
      const double r11 = engine.response(RateKind::r11, std::nullopt).raw(rho);
      for (int k = 0; k < args.points; ++k) {
        const double phi = 2.0 * M_PI * k / args.points;
        const auto staged = engine.staged_responses(phi);
        f << fmt(phi) << ',' << fmt(r00) << ',' << fmt(r01) << ',' << fmt(r11) << ','
          << fmt(staged[0].raw(rho)) << ',' << fmt(staged[1].raw(rho)) << ','
          << fmt(staged[2].raw(rho)) << ',' << fmt(staged[3].raw(rho)) << "\n";
      }
    } else {
      const auto& rho = std::get<VisDensityMatrix>(state);
      VisRateEngine engine(cfg);
      const double r00 = engine.response(RateKind::r00, std::nullopt).raw(rho);
      const double r01 = engine.response(RateKind::r01, std::nullopt).raw(rho);
      const double r11 = engine.response(RateKind::r11, std::nullopt).raw(rho);
      for (int k = 0; k < args.points; ++k) {
        const double phi = 2.0 * M_PI * k / args.points;
        const auto staged = engine.staged_responses(phi);
        f << fmt(phi) << ',' << fmt(r00) << ',' << fmt(r01) << ',' << fmt(r11) << ','
          << fmt(staged[0].raw(rho)) << ',' << fmt(staged[1].raw(rho)) << ','
          << fmt(staged[2].raw(rho)) << ',' << fmt(staged[3].raw(rho)) << "\n";
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitGeneration;
  }
  f.close();
  write_manifest("curves", {args.config_path},
                 fnv1a_hex(read_file(args.config_path)), 0, {args.out_path});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-photon path-state simulation and tomography"};
  app.set_version_flag("--version", std::string("pathtomo ") + kVersion);
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Sample a synthetic campaign");
  simulate->add_option("--config", sim.config_path, "setup config JSON")->required();
  simulate->add_option("--plan", sim.plan_path, "experiment plan JSON")->required();
  simulate->add_option("--out", sim.out_path, "output records CSV")->required();
  std::uint64_t sim_seed = 0;
  auto* sim_seed_opt = simulate->add_option("--seed", sim_seed, "override the plan seed");

  TomoArgs tomo;
  auto* tomo_cmd = app.add_subcommand("tomo", "Reconstruct a density matrix");
  tomo_cmd->add_option("--records", tomo.records_path, "records CSV")->required();
  tomo_cmd->add_option("--config", tomo.config_path, "setup config JSON")->required();
  tomo_cmd->add_option("--mode", tomo.mode, "linear | mle | vis")->required();
  double phi1 = 0.0, phi2 = 0.0;
  auto* phi1_opt = tomo_cmd->add_option("--phi1", phi1, "first phase (linear mode)");
  auto* phi2_opt = tomo_cmd->add_option("--phi2", phi2, "second phase (linear mode)");
  tomo_cmd->add_option("--convention", tomo.convention,
                       "record value convention: normalized | raw");
  tomo_cmd->add_option("--seed", tomo.seed, "fit seed");
  tomo_cmd->add_option("--out", tomo.out_path, "output JSON")->required();

  ScanArgs scan;
  auto* scan_cmd = app.add_subcommand("scan", "Fidelity over a phase-pair grid");
  scan_cmd->add_option("--records", scan.records_path, "records CSV")->required();
  scan_cmd->add_option("--config", scan.config_path, "setup config JSON")->required();
  scan_cmd->add_option("--grid", scan.grid, "grid size, e.g. 20x20");
  scan_cmd->add_option("--jobs", scan.jobs, "worker threads (0 = all cores)");
  scan_cmd->add_option("--seed", scan.seed, "fit seed");
  scan_cmd->add_option("--out", scan.out_path, "output CSV")->required();

  CurvesArgs curves;
  auto* curves_cmd = app.add_subcommand("curves", "Rate curves over a phase sweep");
  curves_cmd->add_option("--state", curves.state,
                         "fixture name (ideal | mixed | dashed-theta=X) or state JSON path")
      ->required();
  curves_cmd->add_option("--config", curves.config_path, "setup config JSON")->required();
  curves_cmd->add_option("--out", curves.out_path, "output CSV")->required();

  CLI11_PARSE(app, argc, argv);

  if (simulate->parsed()) {
    if (*sim_seed_opt) sim.seed = sim_seed;
    return cmd_simulate(sim);
  }
  if (tomo_cmd->parsed()) {
    if (*phi1_opt) tomo.phi1 = phi1;
    if (*phi2_opt) tomo.phi2 = phi2;
    return cmd_tomo(tomo);
  }
  if (scan_cmd->parsed()) return cmd_scan(scan);
  if (curves_cmd->parsed()) return cmd_curves(curves);
  return 0;
}
