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

#ifndef PATHTOMO_OPTICS_HPP
#define PATHTOMO_OPTICS_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "pathtomo/states.hpp"

namespace pathtomo {

/// Which Mach-Zehnder arm carries the drifting phase: "upper" is the direct
/// path-0 line into BS2, "lower" is the BS1 output line into BS2.
enum class PhaseArm { upper, lower };

std::string to_string(PhaseArm arm);
PhaseArm phase_arm_from_string(const std::string& s);

/// Splitter ratios and per-path transmissions of the analysis interferometer.
struct SetupConfig {
  double hom_reflectivity = 0.5;
  double bs1_reflectivity = 0.5;
  double bs2_reflectivity = 0.5;
  double eta0 = 1.0;  // transmission of the loss channel on path 0
  double eta1 = 1.0;  // on path 1
  double eta2 = 1.0;  // on path 5 (the detected BS1 output)
  PhaseArm phase_arm = PhaseArm::upper;

  /// Throws OutOfRange unless reflectivities are in (0,1) and etas in (0,1].
  void validate() const;
};

SetupConfig setup_config_from_json(const nlohmann::json& j);
nlohmann::json setup_config_to_json(const SetupConfig& cfg);

/// A unitary on labeled optical modes. Creation operators transform as
/// a†_i -> sum_o matrix(o, i) a†_o, with i and o indexing mode_labels.
struct ModeTransform {
  Eigen::MatrixXcd matrix;
  std::vector<std::string> mode_labels;

  ModeTransform(Eigen::MatrixXcd m, std::vector<std::string> labels);

  int size() const { return static_cast<int>(mode_labels.size()); }
  /// Throws UnknownLabel if the label is absent.
  int index_of(const std::string& label) const;
  bool has_label(const std::string& label) const;
};

enum class ElementKind { beam_splitter, phase_shifter, loss_channel };

/// One optical element acting on named modes. The parameter is the
/// reflectivity for a beam splitter, the phase in radians for a phase
/// shifter, and the transmission eta for a loss channel.
struct Element {
  ElementKind kind;
  std::vector<std::string> targets;
  double parameter = 0.0;

  static Element beam_splitter(const std::string& a, const std::string& b,
                               double reflectivity);
  static Element phase_shifter(const std::string& mode, double phi);
  static Element loss_channel(const std::string& mode, double eta);

  /// Ancilla label appended by a loss channel ("loss_" + target).
  std::string ancilla_label() const;
};

/// Transform of a single element over a full mode list. A beam splitter with
/// reflectivity R acts as [[sqrt(T), sqrt(R)], [sqrt(R), -sqrt(T)]] on its
/// two modes (T = 1-R); a phase shifter multiplies its mode by e^{i phi}; a
/// loss channel couples its mode to a fresh vacuum ancilla with the rotation
/// [[sqrt(eta), sqrt(1-eta)], [-sqrt(1-eta), sqrt(eta)]], so eta = 1 leaves
/// the identity. The caller must have appended the loss ancilla label.
ModeTransform element_transform(const Element& e,
                                const std::vector<std::string>& all_modes);

/// Left-to-right product of the listed elements (later elements multiply on
/// the left). Loss ancillas are appended to the base modes in declaration
/// order. Throws UnknownMode / DuplicateAncilla on bad references.
ModeTransform compose(const std::vector<Element>& elements,
                      const std::vector<std::string>& base_modes);

/// Mode-label list produced by compose() without building the matrices.
std::vector<std::string> compose_labels(const std::vector<Element>& elements,
                                        const std::vector<std::string>& base_modes);

/// The compiled analysis interferometer at phase phi. Lines enter as
/// (path0, path1, path2) where path2 is the vacuum ancilla into BS1, and are
/// detected as (path3, path4, path5); mode_labels carry the output names.
/// Loss ancillas follow the three detected lines.
ModeTransform build_analysis_setup(const SetupConfig& cfg, double phi);

/// Two single photons interfering on the HOM splitter: BS(reflectivity)
/// applied to |1,1>, returned as a pure 3x3 path density matrix.
PathDensityMatrix build_hom_source(double hom_reflectivity);

}  // namespace pathtomo

#endif
