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

#ifndef PATHTOMO_STATES_HPP
#define PATHTOMO_STATES_HPP

#include <string>

#include <Eigen/Dense>

#include "pathtomo/fock.hpp"

namespace pathtomo {

/// Two photons over two paths, 3x3 density matrix in the basis
/// (|2,0>, |1,1>, |0,2>).
struct PathDensityMatrix {
  Eigen::Matrix3cd matrix = Eigen::Matrix3cd::Zero();

  PathDensityMatrix() = default;
  explicit PathDensityMatrix(const Eigen::Matrix3cd& m) : matrix(m) {}

  static PathDensityMatrix from_pure(const Eigen::Vector3cd& amplitudes);

  double trace() const { return matrix.trace().real(); }
  double purity() const { return (matrix * matrix).trace().real(); }
  double hermiticity_defect() const;
  double min_eigenvalue() const;
  bool is_physical(double trace_tol = 1e-9, double eig_tol = 1e-9) const;
};

/// Two possibly distinguishable photons over two paths: a 3x3 block over
/// (|2,0>, psi+, |0,2>) plus the antisymmetric psi- population. Coherences
/// between the two blocks are identically zero.
struct VisDensityMatrix {
  Eigen::Matrix3cd sym_block = Eigen::Matrix3cd::Zero();
  double antisym_pop = 0.0;

  double trace() const { return sym_block.trace().real() + antisym_pop; }
  /// Full 4x4 matrix in the (|2,0>, psi+, |0,2>, psi-) order.
  Eigen::Matrix4cd full() const;
  bool is_physical(double trace_tol = 1e-9, double eig_tol = 1e-9) const;
};

/// The maximally entangled target (|2,0> - |0,2>)/sqrt(2).
Eigen::Vector3cd noon_target();

/// Named input states accepted by the CLI and the test fixtures:
///   "ideal"            (|2,0> - |0,2>)/sqrt(2)
///   "mixed"            equal incoherent mixture of |2,0> and |0,2>
///   "dashed-theta=X"   cos(X)/sqrt(2)|2,0> + sin(X) e^{i pi/4}|1,1>
///                        - cos(X)/sqrt(2)|0,2>
/// Throws UnknownLabel for anything else.
PathDensityMatrix state_fixture(const std::string& name);

}  // namespace pathtomo

#endif
