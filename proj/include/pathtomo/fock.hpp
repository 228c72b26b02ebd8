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

#ifndef PATHTOMO_FOCK_HPP
#define PATHTOMO_FOCK_HPP

#include <complex>
#include <map>
#include <vector>

#include <Eigen/Dense>

namespace pathtomo {

using Complex = std::complex<double>;

/// Photon count per mode, |n0, n1, ...>.
using Occupation = std::vector<int>;

/// All occupations of `photon_number` photons over `mode_count` modes, in
/// lexicographically descending order: (N,0,...), ..., (0,...,N).
/// Size is C(photon_number + mode_count - 1, mode_count - 1).
std::vector<Occupation> basis_states(int mode_count, int photon_number);

/// Canonical ordering of the fixed-photon-number Fock space, with index
/// lookup. Index 0 is always (N, 0, ..., 0).
class FockBasis {
 public:
  FockBasis(int mode_count, int photon_number);

  int mode_count() const { return mode_count_; }
  int photon_number() const { return photon_number_; }
  int dimension() const { return static_cast<int>(states_.size()); }
  const Occupation& state(int index) const { return states_.at(index); }
  const std::vector<Occupation>& states() const { return states_; }

  /// Index of an occupation in the canonical order; IndexOutOfRange if the
  /// occupation does not belong to this space.
  int index_of(const Occupation& occ) const;

 private:
  int mode_count_;
  int photon_number_;
  std::vector<Occupation> states_;
  std::map<Occupation, int> index_;
};

/// Pure state over a fixed-photon-number Fock space, amplitudes in the
/// canonical basis order.
struct FockVector {
  int mode_count = 0;
  int photon_number = 0;
  Eigen::VectorXcd amplitudes;

  double norm() const { return amplitudes.norm(); }
};

/// Mixed state over a fixed-photon-number Fock space.
struct FockDensity {
  int mode_count = 0;
  int photon_number = 0;
  Eigen::MatrixXcd matrix;

  static FockDensity from_pure(const FockVector& psi);
};

/// Largest absolute deviation of u†u from the identity.
double unitarity_defect(const Eigen::MatrixXcd& u);

/// Lift a single-mode unitary u (M x M, acting on creation operators) to the
/// photon_number-photon Fock space. Entry <m|U_F|n> equals the permanent of
/// the row/column-repeated submatrix u[m, n] divided by sqrt(prod m_i! n_j!).
/// The convention is the substitution a†_i -> sum_o u_{o,i} a†_o, so
/// lift_unitary(u1 * u2) == lift_unitary(u1) * lift_unitary(u2).
/// Throws NonUnitaryInput if u is not unitary within 1e-10.
Eigen::MatrixXcd lift_unitary(const Eigen::MatrixXcd& u, int photon_number);

/// Single column of lift_unitary: the image in Fock space of the basis state
/// with the given input index. Cheaper than lifting the whole matrix when
/// only a few input states are needed. Performs the same unitarity check.
Eigen::VectorXcd lift_unitary_column(const Eigen::MatrixXcd& u,
                                     const FockBasis& basis, int input_index);

/// Tr[rho · a†_{i1}...a†_{ik} a_{jl}...a_{j1}] for the listed create and
/// annihilate mode indices. Zero when the counts differ (the operator leaves
/// the photon-number sector). Throws IndexOutOfRange on bad mode indices.
Complex normally_ordered_expectation(const FockDensity& rho,
                                     const std::vector<int>& create_modes,
                                     const std::vector<int>& annihilate_modes);

/// Permanent of a small square matrix by direct expansion over permutations.
Complex permanent(const Eigen::MatrixXcd& a);

}  // namespace pathtomo

#endif
