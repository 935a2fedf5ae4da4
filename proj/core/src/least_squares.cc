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

#include "least_squares.h"

#include <cmath>
#include <limits>

namespace qmodes::detail {

LeastSquaresResult damped_gauss_newton(const ModelFn &model, const ProjectFn &project, Eigen::VectorXd start,
                                       const Eigen::VectorXd &y, const Eigen::VectorXd &sigma, int max_iterations,
                                       double rel_tol) {
    const Eigen::Index n = y.size();
    const Eigen::Index p = start.size();
    Eigen::VectorXd w = sigma.cwiseInverse();

    Eigen::VectorXd values(n);
    Eigen::MatrixXd jac(n, p);
    auto evaluate = [&](const Eigen::VectorXd &params, Eigen::VectorXd &residual, Eigen::MatrixXd &wjac) {
        model(params, values, jac);
        residual = (y - values).cwiseProduct(w);
        wjac = w.asDiagonal() * jac;
        return residual.squaredNorm();
    };

    LeastSquaresResult out;
    out.params = std::move(start);
    project(out.params);
    Eigen::VectorXd r(n);
    Eigen::MatrixXd wj(n, p);
    double chi2 = evaluate(out.params, r, wj);
    double lambda = 1e-3;
    constexpr double kTiny = 1e-300;

    Eigen::VectorXd trial_r(n);
    Eigen::MatrixXd trial_wj(n, p);
    int it = 0;
    for (; it < max_iterations; ++it) {
        if (chi2 <= kTiny) {
            out.converged = true;
            break;
        }
        Eigen::MatrixXd jtj = wj.transpose() * wj;
        Eigen::VectorXd jtr = wj.transpose() * r;
        bool accepted = false;
        while (lambda < 1e16) {
            Eigen::MatrixXd damped = jtj;
            for (Eigen::Index k = 0; k < p; ++k) {
                damped(k, k) += lambda * std::max(jtj(k, k), 1e-12);
            }
            Eigen::VectorXd step = damped.ldlt().solve(jtr);
            Eigen::VectorXd trial = out.params + step;
            project(trial);
            double trial_chi2 = evaluate(trial, trial_r, trial_wj);
            if (std::isfinite(trial_chi2) && trial_chi2 <= chi2) {
                double decrease = chi2 - trial_chi2;
                out.params = trial;
                r = trial_r;
                wj = trial_wj;
                double old = chi2;
                chi2 = trial_chi2;
                lambda = std::max(lambda / 10.0, 1e-12);
                accepted = true;
                if (decrease <= rel_tol * old) {
                    out.converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if (!accepted) {
            // No direction lowers the objective at machine precision.
            out.converged = true;
        }
        if (out.converged) {
            ++it;
            break;
        }
    }
    // Re-evaluate so the Jacobian belongs to the final parameters.
    chi2 = evaluate(out.params, r, wj);
    out.chi2 = chi2;
    out.iterations = it;
    Eigen::MatrixXd info = wj.transpose() * wj;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(info);
    if (lu.isInvertible()) {
        out.covariance = lu.inverse();
    } else {
        out.covariance = Eigen::MatrixXd::Constant(p, p, std::numeric_limits<double>::infinity());
    }
    return out;
}

}  // namespace qmodes::detail
