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

#ifndef PATHTOMO_NELDER_MEAD_HPP
#define PATHTOMO_NELDER_MEAD_HPP

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace pathtomo {

struct NelderMeadOptions {
  long max_evals = 100000;
  // Stop once the best value improves by less than stall_tol over
  // stall_window consecutive iterations.
  double stall_tol = 1e-12;
  int stall_window = 200;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0.0;
  long evaluations = 0;
  bool converged = false;  // stopped by stall, not by the budget
};

using ObjectiveFn = std::function<double(const Eigen::VectorXd&)>;

/// Downhill simplex minimization with standard reflection/expansion/
/// contraction/shrink coefficients. The initial simplex offsets each
/// coordinate of x0 by initial_step.
NelderMeadResult nelder_mead(const ObjectiveFn& f, const Eigen::VectorXd& x0,
                             double initial_step, const NelderMeadOptions& opts);

/// Runs nelder_mead from every start (splitting the evaluation budget), then
/// polishes the best point with the remaining evaluations.
NelderMeadResult multistart_minimize(const ObjectiveFn& f,
                                     const std::vector<Eigen::VectorXd>& starts,
                                     double initial_step,
                                     const NelderMeadOptions& opts);

}  // namespace pathtomo

#endif
