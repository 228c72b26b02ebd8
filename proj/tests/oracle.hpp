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

// Test-only reference model: expands two-photon states through a mode
// transform by direct creation-operator substitution and monomial
// collection. Shares nothing with the permanent-based production path.

#ifndef PATHTOMO_TESTS_ORACLE_HPP
#define PATHTOMO_TESTS_ORACLE_HPP

#include <cmath>
#include <utility>

#include <Eigen/Dense>

#include "pathtomo/fock.hpp"

namespace oracle {

using pathtomo::Complex;
using pathtomo::FockBasis;
using pathtomo::Occupation;

// The two occupied modes (i <= j) of a two-photon occupation.
inline std::pair<int, int> occupied_pair(const Occupation& occ) {
  int first = -1, second = -1;
  for (int m = 0; m < static_cast<int>(occ.size()); ++m) {
    for (int k = 0; k < occ[m]; ++k) {
      if (first < 0)
        first = m;
      else
        second = m;
    }
  }
  return {first, second};
}

// |psi_out> amplitudes from substituting a†_i -> sum_o u(o,i) a†_o in the
// creation polynomial of |psi_in> and recollecting kets.
inline Eigen::VectorXcd expand_two_photon(const Eigen::MatrixXcd& u,
                                          const FockBasis& basis,
                                          const Eigen::VectorXcd& amps) {
  const int modes = basis.mode_count();
  const double sqrt2 = std::sqrt(2.0);
  // poly(p, q): coefficient of the ordered monomial a†_p a†_q.
  Eigen::MatrixXcd poly = Eigen::MatrixXcd::Zero(modes, modes);
  for (int n = 0; n < basis.dimension(); ++n) {
    if (amps(n) == Complex(0.0, 0.0)) continue;
    const auto [i, j] = occupied_pair(basis.state(n));
    const Complex coeff = amps(n) / (i == j ? sqrt2 : 1.0);
    for (int p = 0; p < modes; ++p)
      for (int q = 0; q < modes; ++q) poly(p, q) += coeff * u(p, i) * u(q, j);
  }
  Eigen::VectorXcd out(basis.dimension());
  for (int m = 0; m < basis.dimension(); ++m) {
    const auto [p, q] = occupied_pair(basis.state(m));
    out(m) = p == q ? poly(p, p) * sqrt2 : poly(p, q) + poly(q, p);
  }
  return out;
}

// lift_unitary rebuilt column by column from the expansion above.
inline Eigen::MatrixXcd lift_by_expansion(const Eigen::MatrixXcd& u) {
  FockBasis basis(static_cast<int>(u.rows()), 2);
  Eigen::MatrixXcd lifted(basis.dimension(), basis.dimension());
  for (int n = 0; n < basis.dimension(); ++n) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(basis.dimension());
    e(n) = 1.0;
    lifted.col(n) = expand_two_photon(u, basis, e);
  }
  return lifted;
}

// <a†_i a†_j a_j a_i> of a pure state: n_i n_j for i != j, n(n-1) otherwise.
// mode_to_line sums occupations of grouped modes (identity grouping for the
// plain path model, label grouping for the label-resolved model).
inline double pair_rate(const FockBasis& basis, const std::vector<int>& mode_to_line,
                        const Eigen::VectorXcd& amps, int line_i, int line_j) {
  double total = 0.0;
  for (int s = 0; s < basis.dimension(); ++s) {
    const Occupation& occ = basis.state(s);
    int ni = 0, nj = 0;
    for (int m = 0; m < basis.mode_count(); ++m) {
      if (mode_to_line[m] == line_i) ni += occ[m];
      if (mode_to_line[m] == line_j) nj += occ[m];
    }
    const double counter = line_i == line_j ? static_cast<double>(ni) * (ni - 1)
                                            : static_cast<double>(ni) * nj;
    total += std::norm(amps(s)) * counter;
  }
  return total;
}

inline double singles_rate(const FockBasis& basis, const std::vector<int>& mode_to_line,
                           const Eigen::VectorXcd& amps, int line_j) {
  double total = 0.0;
  for (int s = 0; s < basis.dimension(); ++s) {
    const Occupation& occ = basis.state(s);
    int nj = 0;
    for (int m = 0; m < basis.mode_count(); ++m)
      if (mode_to_line[m] == line_j) nj += occ[m];
    total += std::norm(amps(s)) * nj;
  }
  return total;
}

}  // namespace oracle

#endif
