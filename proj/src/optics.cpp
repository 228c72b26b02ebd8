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

#include "pathtomo/optics.hpp"

#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "pathtomo/errors.hpp"

namespace pathtomo {

std::string to_string(PhaseArm arm) {
  return arm == PhaseArm::upper ? "upper" : "lower";
}

PhaseArm phase_arm_from_string(const std::string& s) {
  if (s == "upper") return PhaseArm::upper;
  if (s == "lower") return PhaseArm::lower;
  throw ParseError("phaseArm must be \"upper\" or \"lower\", got \"" + s + "\"");
}

void SetupConfig::validate() const {
  auto check_open = [](double v, const char* name) {
    if (!(v > 0.0 && v < 1.0))
      throw OutOfRange(std::string(name) + " must lie in (0,1)");
  };
  auto check_eta = [](double v, const char* name) {
    if (!(v > 0.0 && v <= 1.0))
      throw OutOfRange(std::string(name) + " must lie in (0,1]");
  };
  check_open(hom_reflectivity, "homReflectivity");
  check_open(bs1_reflectivity, "bs1Reflectivity");
  check_open(bs2_reflectivity, "bs2Reflectivity");
  check_eta(eta0, "eta0");
  check_eta(eta1, "eta1");
  check_eta(eta2, "eta2");
}

SetupConfig setup_config_from_json(const nlohmann::json& j) {
  SetupConfig cfg;
  try {
    cfg.hom_reflectivity = j.value("homReflectivity", 0.5);
    cfg.bs1_reflectivity = j.value("bs1Reflectivity", 0.5);
    cfg.bs2_reflectivity = j.value("bs2Reflectivity", 0.5);
    cfg.eta0 = j.value("eta0", 1.0);
    cfg.eta1 = j.value("eta1", 1.0);
    cfg.eta2 = j.value("eta2", 1.0);
    cfg.phase_arm = phase_arm_from_string(j.value("phaseArm", "upper"));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad setup config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

nlohmann::json setup_config_to_json(const SetupConfig& cfg) {
  return nlohmann::json{{"homReflectivity", cfg.hom_reflectivity},
                        {"bs1Reflectivity", cfg.bs1_reflectivity},
                        {"bs2Reflectivity", cfg.bs2_reflectivity},
                        {"eta0", cfg.eta0},
                        {"eta1", cfg.eta1},
                        {"eta2", cfg.eta2},
                        {"phaseArm", to_string(cfg.phase_arm)}};
}

ModeTransform::ModeTransform(Eigen::MatrixXcd m, std::vector<std::string> labels)
    : matrix(std::move(m)), mode_labels(std::move(labels)) {
  if (matrix.rows() != matrix.cols() ||
      matrix.rows() != static_cast<Eigen::Index>(mode_labels.size()))
    throw OutOfRange("mode transform shape does not match its label list");
  if (unitarity_defect(matrix) > 1e-10)
    throw NonUnitaryInput("mode transform is not unitary within 1e-10");
  std::set<std::string> seen(mode_labels.begin(), mode_labels.end());
  if (seen.size() != mode_labels.size())
    throw OutOfRange("duplicate mode labels in mode transform");
}

int ModeTransform::index_of(const std::string& label) const {
  for (int i = 0; i < size(); ++i)
    if (mode_labels[i] == label) return i;
  throw UnknownLabel("unknown mode label '" + label + "'");
}

bool ModeTransform::has_label(const std::string& label) const {
  for (const auto& l : mode_labels)
    if (l == label) return true;
  return false;
}

Element Element::beam_splitter(const std::string& a, const std::string& b,
                               double reflectivity) {
  if (!(reflectivity > 0.0 && reflectivity < 1.0))
    throw OutOfRange("beam splitter reflectivity must lie in (0,1)");
  return Element{ElementKind::beam_splitter, {a, b}, reflectivity};
}

Element Element::phase_shifter(const std::string& mode, double phi) {
  return Element{ElementKind::phase_shifter, {mode}, phi};
}

Element Element::loss_channel(const std::string& mode, double eta) {
  if (!(eta > 0.0 && eta <= 1.0))
    throw OutOfRange("loss channel transmission must lie in (0,1]");
  return Element{ElementKind::loss_channel, {mode}, eta};
}

std::string Element::ancilla_label() const { return "loss_" + targets.at(0); }

namespace {

int find_label(const std::vector<std::string>& labels, const std::string& l) {
  for (int i = 0; i < static_cast<int>(labels.size()); ++i)
    if (labels[i] == l) return i;
  throw UnknownMode("element references unknown mode '" + l + "'");
}

}  // namespace

ModeTransform element_transform(const Element& e,
                                const std::vector<std::string>& all_modes) {
  const int m = static_cast<int>(all_modes.size());
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(m, m);
  switch (e.kind) {
    case ElementKind::beam_splitter: {
      const int a = find_label(all_modes, e.targets.at(0));
      const int b = find_label(all_modes, e.targets.at(1));
      const double r = std::sqrt(e.parameter);
      const double t = std::sqrt(1.0 - e.parameter);
      u(a, a) = t;
      u(a, b) = r;
      u(b, a) = r;
      u(b, b) = -t;
      break;
    }
    case ElementKind::phase_shifter: {
      const int a = find_label(all_modes, e.targets.at(0));
      u(a, a) = std::exp(Complex(0.0, e.parameter));
      break;
    }
    case ElementKind::loss_channel: {
      const int a = find_label(all_modes, e.targets.at(0));
      const int v = find_label(all_modes, e.ancilla_label());
      // Rotation convention keeps eta = 1 an exact identity on the ancilla.
      const double t = std::sqrt(e.parameter);
      const double r = std::sqrt(1.0 - e.parameter);
      u(a, a) = t;
      u(a, v) = r;
      u(v, a) = -r;
      u(v, v) = t;
      break;
    }
  }
  return ModeTransform(std::move(u), all_modes);
}

std::vector<std::string> compose_labels(const std::vector<Element>& elements,
                                        const std::vector<std::string>& base_modes) {
  std::vector<std::string> labels = base_modes;
  for (const auto& e : elements) {
    for (const auto& t : e.targets) find_label(labels, t);
    if (e.kind == ElementKind::loss_channel) {
      const std::string anc = e.ancilla_label();
      for (const auto& l : labels)
        if (l == anc)
          throw DuplicateAncilla("loss ancilla '" + anc + "' already declared");
      labels.push_back(anc);
    }
  }
  return labels;
}

ModeTransform compose(const std::vector<Element>& elements,
                      const std::vector<std::string>& base_modes) {
  const std::vector<std::string> labels = compose_labels(elements, base_modes);
  const int m = static_cast<int>(labels.size());
  Eigen::MatrixXcd total = Eigen::MatrixXcd::Identity(m, m);
  for (const auto& e : elements)
    total = element_transform(e, labels).matrix * total;
  return ModeTransform(std::move(total), labels);
}

ModeTransform build_analysis_setup(const SetupConfig& cfg, double phi) {
  cfg.validate();
  const std::vector<std::string> base = {"path0", "path1", "path2"};
  std::vector<Element> chain;
  chain.push_back(Element::loss_channel("path0", cfg.eta0));
  chain.push_back(Element::loss_channel("path1", cfg.eta1));
  chain.push_back(Element::beam_splitter("path1", "path2", cfg.bs1_reflectivity));
  // After BS1 the path2 line is the detected output (path5 downstream);
  // it carries the eta2 coupling loss.
  chain.push_back(Element::loss_channel("path2", cfg.eta2));
  chain.push_back(Element::phase_shifter(
      cfg.phase_arm == PhaseArm::upper ? "path0" : "path1", phi));
  chain.push_back(Element::beam_splitter("path0", "path1", cfg.bs2_reflectivity));
  ModeTransform mt = compose(chain, base);
  // Rename lines to their detected output labels.
  mt.mode_labels[0] = "path3";
  mt.mode_labels[1] = "path4";
  mt.mode_labels[2] = "path5";
  return mt;
}

PathDensityMatrix build_hom_source(double hom_reflectivity) {
  if (!(hom_reflectivity > 0.0 && hom_reflectivity < 1.0))
    throw OutOfRange("hom reflectivity must lie in (0,1)");
  const double r = hom_reflectivity;
  const double t = 1.0 - r;
  // (sqrt(T) a0† + sqrt(R) a1†)(sqrt(R) a0† - sqrt(T) a1†) |0,0>
  Eigen::Vector3cd psi;
  psi << Complex(std::sqrt(2.0 * t * r), 0.0), Complex(r - t, 0.0),
      Complex(-std::sqrt(2.0 * t * r), 0.0);
  return PathDensityMatrix::from_pure(psi);
}

}  // namespace pathtomo
