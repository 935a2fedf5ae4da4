// Copyright 2026 The qmodes Authors
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

#ifndef QMODES_SRC_LEAST_SQUARES_H_
#define QMODES_SRC_LEAST_SQUARES_H_

#include <Eigen/Dense>
#include <functional>

namespace qmodes::detail {

/// Model values and Jacobian (rows: points, cols: parameters) at params.
using ModelFn = std::function<void(const Eigen::VectorXd &params, Eigen::VectorXd &values, Eigen::MatrixXd &jacobian)>;
/// Maps a trial parameter vector back into the feasible region.
using ProjectFn = std::function<void(Eigen::VectorXd &params)>;

struct LeastSquaresResult {
    Eigen::VectorXd params;
    Eigen::MatrixXd covariance;
    double chi2 = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Weighted least squares, sum ((y - f) / sigma)^2, by Gauss-Newton with
/// Levenberg damping. Stops once an accepted step lowers the objective by
/// less than `rel_tol` relative, or the damping can no longer find a
/// lower value. Covariance is (J^T W J)^-1 at the solution.
LeastSquaresResult damped_gauss_newton(const ModelFn &model, const ProjectFn &project, Eigen::VectorXd start,
                                       const Eigen::VectorXd &y, const Eigen::VectorXd &sigma,
                                       int max_iterations = 200, double rel_tol = 1e-12);

}  // namespace qmodes::detail

#endif  // QMODES_SRC_LEAST_SQUARES_H_
