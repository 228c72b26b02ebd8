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

#include "pathtomo/states.hpp"

#include <cmath>

#include "pathtomo/errors.hpp"

namespace pathtomo {

PathDensityMatrix PathDensityMatrix::from_pure(const Eigen::Vector3cd& amplitudes) {
  Eigen::Vector3cd psi = amplitudes / amplitudes.norm();
  return PathDensityMatrix(psi * psi.adjoint());
}

double PathDensityMatrix::hermiticity_defect() const {
  return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
}

double PathDensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> es(matrix);
  return es.eigenvalues().minCoeff();
}

bool PathDensityMatrix::is_physical(double trace_tol, double eig_tol) const {
  return hermiticity_defect() <= 1e-10 && std::abs(trace() - 1.0) <= trace_tol &&
         min_eigenvalue() >= -eig_tol;
}

Eigen::Matrix4cd VisDensityMatrix::full() const {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  m.topLeftCorner<3, 3>() = sym_block;
  m(3, 3) = antisym_pop;
  return m;
}

bool VisDensityMatrix::is_physical(double trace_tol, double eig_tol) const {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> es(sym_block);
  return (sym_block - sym_block.adjoint()).cwiseAbs().maxCoeff() <= 1e-10 &&
         std::abs(trace() - 1.0) <= trace_tol &&
         es.eigenvalues().minCoeff() >= -eig_tol && antisym_pop >= -eig_tol;
}

Eigen::Vector3cd noon_target() {
  Eigen::Vector3cd t;
  t << Complex(1.0 / std::sqrt(2.0), 0.0), Complex(0.0, 0.0),
      Complex(-1.0 / std::sqrt(2.0), 0.0);
  return t;
}

PathDensityMatrix state_fixture(const std::string& name) {
  if (name == "ideal") return PathDensityMatrix::from_pure(noon_target());
  if (name == "mixed") {
    Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
    m(0, 0) = 0.5;
    m(2, 2) = 0.5;
    return PathDensityMatrix(m);
  }
  const std::string dashed_prefix = "dashed-theta=";
  if (name.rfind(dashed_prefix, 0) == 0) {
    double theta = 0.0;
    try {
      theta = std::stod(name.substr(dashed_prefix.size()));
    } catch (const std::exception&) {
      throw UnknownLabel("bad theta in state fixture '" + name + "'");
    }
    Eigen::Vector3cd psi;
    psi << Complex(std::cos(theta) / std::sqrt(2.0), 0.0),
        std::sin(theta) * std::exp(Complex(0.0, M_PI / 4.0)),
        Complex(-std::cos(theta) / std::sqrt(2.0), 0.0);
    return PathDensityMatrix::from_pure(psi);
  }
  throw UnknownLabel("unknown state fixture '" + name + "'");
}

}  // namespace pathtomo
