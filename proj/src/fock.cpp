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

#include "pathtomo/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pathtomo/errors.hpp"

namespace pathtomo {

namespace {

constexpr double kUnitaryTol = 1e-10;

void enumerate_rec(int modes_left, int photons_left, Occupation& prefix,
                   std::vector<Occupation>& out) {
  if (modes_left == 1) {
    prefix.push_back(photons_left);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int n = photons_left; n >= 0; --n) {
    prefix.push_back(n);
    enumerate_rec(modes_left - 1, photons_left - n, prefix, out);
    prefix.pop_back();
  }
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Mode index repeated per occupation: (2,0,1) -> [0,0,2].
std::vector<int> repeated_modes(const Occupation& occ) {
  std::vector<int> out;
  for (int m = 0; m < static_cast<int>(occ.size()); ++m)
    for (int k = 0; k < occ[m]; ++k) out.push_back(m);
  return out;
}

double occupation_factorial(const Occupation& occ) {
  double f = 1.0;
  for (int n : occ) f *= factorial(n);
  return f;
}

}  // namespace

std::vector<Occupation> basis_states(int mode_count, int photon_number) {
  if (mode_count < 1 || photon_number < 0)
    throw OutOfRange("basis_states: mode_count >= 1 and photon_number >= 0 required");
  std::vector<Occupation> out;
  Occupation prefix;
  prefix.reserve(mode_count);
  enumerate_rec(mode_count, photon_number, prefix, out);
  return out;
}

FockBasis::FockBasis(int mode_count, int photon_number)
    : mode_count_(mode_count),
      photon_number_(photon_number),
      states_(basis_states(mode_count, photon_number)) {
  for (int i = 0; i < static_cast<int>(states_.size()); ++i)
    index_.emplace(states_[i], i);
}

int FockBasis::index_of(const Occupation& occ) const {
  auto it = index_.find(occ);
  if (it == index_.end())
    throw IndexOutOfRange("occupation does not belong to this Fock space");
  return it->second;
}

FockDensity FockDensity::from_pure(const FockVector& psi) {
  FockDensity rho;
  rho.mode_count = psi.mode_count;
  rho.photon_number = psi.photon_number;
  rho.matrix = psi.amplitudes * psi.amplitudes.adjoint();
  return rho;
}

double unitarity_defect(const Eigen::MatrixXcd& u) {
  Eigen::MatrixXcd g = u.adjoint() * u;
  g -= Eigen::MatrixXcd::Identity(u.cols(), u.cols());
  return g.cwiseAbs().maxCoeff();
}

Complex permanent(const Eigen::MatrixXcd& a) {
  const int n = static_cast<int>(a.rows());
  if (n == 0) return Complex(1.0, 0.0);
  std::vector<int> cols(n);
  std::iota(cols.begin(), cols.end(), 0);
  Complex total(0.0, 0.0);
  // Sums over column permutations; fine for the few-photon sizes used here.
  do {
    Complex term(1.0, 0.0);
    for (int r = 0; r < n; ++r) term *= a(r, cols[r]);
    total += term;
  } while (std::next_permutation(cols.begin(), cols.end()));
  return total;
}

namespace {

Eigen::VectorXcd lift_column_unchecked(const Eigen::MatrixXcd& u,
                                       const FockBasis& basis, int input_index) {
  const std::vector<int> in_modes = repeated_modes(basis.state(input_index));
  const double in_fact = occupation_factorial(basis.state(input_index));
  const int n = basis.photon_number();
  Eigen::VectorXcd col(basis.dimension());
  Eigen::MatrixXcd sub(n, n);
  for (int row = 0; row < basis.dimension(); ++row) {
    const std::vector<int> out_modes = repeated_modes(basis.state(row));
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) sub(r, c) = u(out_modes[r], in_modes[c]);
    const double out_fact = occupation_factorial(basis.state(row));
    col(row) = permanent(sub) / std::sqrt(in_fact * out_fact);
  }
  return col;
}

void check_unitary(const Eigen::MatrixXcd& u) {
  if (u.rows() != u.cols())
    throw NonUnitaryInput("mode transform must be square");
  if (unitarity_defect(u) > kUnitaryTol)
    throw NonUnitaryInput("mode transform is not unitary within 1e-10");
}

}  // namespace

Eigen::MatrixXcd lift_unitary(const Eigen::MatrixXcd& u, int photon_number) {
  if (photon_number < 1)
    throw OutOfRange("lift_unitary: photon_number >= 1 required");
  check_unitary(u);
  FockBasis basis(static_cast<int>(u.rows()), photon_number);
  Eigen::MatrixXcd lifted(basis.dimension(), basis.dimension());
  for (int colidx = 0; colidx < basis.dimension(); ++colidx)
    lifted.col(colidx) = lift_column_unchecked(u, basis, colidx);
  return lifted;
}

Eigen::VectorXcd lift_unitary_column(const Eigen::MatrixXcd& u,
                                     const FockBasis& basis, int input_index) {
  check_unitary(u);
  if (input_index < 0 || input_index >= basis.dimension())
    throw IndexOutOfRange("lift_unitary_column: bad input index");
  return lift_column_unchecked(u, basis, input_index);
}

Complex normally_ordered_expectation(const FockDensity& rho,
                                     const std::vector<int>& create_modes,
                                     const std::vector<int>& annihilate_modes) {
  for (int m : create_modes)
    if (m < 0 || m >= rho.mode_count)
      throw IndexOutOfRange("create mode index out of range");
  for (int m : annihilate_modes)
    if (m < 0 || m >= rho.mode_count)
      throw IndexOutOfRange("annihilate mode index out of range");
  // The operator changes photon number unless the counts match, in which
  // case the trace against a fixed-number state vanishes.
  if (create_modes.size() != annihilate_modes.size()) return Complex(0.0, 0.0);

  FockBasis basis(rho.mode_count, rho.photon_number);
  const int dim = basis.dimension();
  Eigen::MatrixXcd op = Eigen::MatrixXcd::Zero(dim, dim);
  for (int col = 0; col < dim; ++col) {
    Occupation occ = basis.state(col);
    double coeff = 1.0;
    bool vanished = false;
    for (int m : annihilate_modes) {
      if (occ[m] == 0) {
        vanished = true;
        break;
      }
      coeff *= std::sqrt(static_cast<double>(occ[m]));
      occ[m] -= 1;
    }
    if (vanished) continue;
    for (int m : create_modes) {
      occ[m] += 1;
      coeff *= std::sqrt(static_cast<double>(occ[m]));
    }
    op(basis.index_of(occ), col) = coeff;
  }
  return (rho.matrix * op).trace();
}

}  // namespace pathtomo
