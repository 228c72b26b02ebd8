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

#include "pathtomo/nelder_mead.hpp"

#include <algorithm>
#include <limits>

namespace pathtomo {

NelderMeadResult nelder_mead(const ObjectiveFn& f, const Eigen::VectorXd& x0,
                             double initial_step, const NelderMeadOptions& opts) {
  const int n = static_cast<int>(x0.size());
  NelderMeadResult result;
  result.x = x0;

  std::vector<Eigen::VectorXd> simplex;
  std::vector<double> values;
  simplex.reserve(n + 1);
  simplex.push_back(x0);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd v = x0;
    v(i) += initial_step;
    simplex.push_back(v);
  }
  long evals = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++evals;
    return f(x);
  };
  values.reserve(n + 1);
  for (const auto& v : simplex) values.push_back(eval(v));

  auto order = [&]() {
    std::vector<int> idx(simplex.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return values[a] < values[b]; });
    std::vector<Eigen::VectorXd> s2;
    std::vector<double> v2;
    for (int i : idx) {
      s2.push_back(simplex[i]);
      v2.push_back(values[i]);
    }
    simplex.swap(s2);
    values.swap(v2);
  };
  order();

  double window_best = values[0];
  int window_count = 0;
  bool stalled = false;

  while (evals < opts.max_evals) {
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) centroid += simplex[i];
    centroid /= n;
    const Eigen::VectorXd& worst = simplex[n];

    Eigen::VectorXd reflected = centroid + (centroid - worst);
    double fr = eval(reflected);
    if (fr < values[0]) {
      Eigen::VectorXd expanded = centroid + 2.0 * (centroid - worst);
      double fe = eval(expanded);
      if (fe < fr) {
        simplex[n] = expanded;
        values[n] = fe;
      } else {
        simplex[n] = reflected;
        values[n] = fr;
      }
    } else if (fr < values[n - 1]) {
      simplex[n] = reflected;
      values[n] = fr;
    } else {
      Eigen::VectorXd contracted = centroid + 0.5 * (worst - centroid);
      double fc = eval(contracted);
      if (fc < values[n]) {
        simplex[n] = contracted;
        values[n] = fc;
      } else {
        for (int i = 1; i <= n; ++i) {
          simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0]);
          values[i] = eval(simplex[i]);
        }
      }
    }
    order();

    if (window_best - values[0] < opts.stall_tol) {
      if (++window_count >= opts.stall_window) {
        stalled = true;
        break;
      }
    } else {
      window_best = values[0];
      window_count = 0;
    }
  }

  result.x = simplex[0];
  result.value = values[0];
  result.evaluations = evals;
  result.converged = stalled;
  return result;
}

NelderMeadResult multistart_minimize(const ObjectiveFn& f,
                                     const std::vector<Eigen::VectorXd>& starts,
                                     double initial_step,
                                     const NelderMeadOptions& opts) {
  NelderMeadResult best;
  best.value = std::numeric_limits<double>::infinity();
  long used = 0;
  const long per_run = opts.max_evals / static_cast<long>(starts.size() + 1);
  for (const auto& s : starts) {
    NelderMeadOptions run = opts;
    run.max_evals = per_run;
    NelderMeadResult r = nelder_mead(f, s, initial_step, run);
    used += r.evaluations;
    if (r.value < best.value) best = r;
  }
  // Polish pass from the best point with a tighter simplex.
  NelderMeadOptions polish = opts;
  polish.max_evals = std::max<long>(opts.max_evals - used, per_run / 2);
  NelderMeadResult r = nelder_mead(f, best.x, 0.1 * initial_step, polish);
  used += r.evaluations;
  if (r.value <= best.value) {
    r.evaluations = used;
    return r;
  }
  best.evaluations = used;
  return best;
}

}  // namespace pathtomo
