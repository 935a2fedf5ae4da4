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

#ifndef QMODES_ANALYSIS_H_
#define QMODES_ANALYSIS_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qmodes/experiments.h"

namespace qmodes {

double visibility_dip(double c_max, double c_min);
double visibility_peak(double c_max, double c_min);

/// sqrt(count), with 0 mapped to 1 so weights stay finite.
double poisson_sigma(long long count);

/// Removes accidental_rate * T from every point (clamped at 0). Errors add
/// in quadrature with the background's own Poisson variance:
/// sigma' = sqrt(sigma^2 + background). Throws InvalidArgument when the
/// background exceeds min(counts) + 5 sigma of that minimum.
ScanResult subtract_background(const ScanResult &scan, double accidental_rate);

enum class FitModel { Triangle, Sinusoid };
enum class Orientation { Dip, Peak };

struct FitParameter {
    std::string name;
    double value = 0.0;
    double sigma = 0.0;
};

struct FitResult {
    FitModel model = FitModel::Triangle;
    /// Triangle fits only.
    Orientation orientation = Orientation::Dip;
    /// Triangle: C0, V, Lc, delta0.  Sinusoid: offset, amplitude, period,
    /// phase, then the derived visibility = amplitude / offset.
    std::vector<FitParameter> params;
    double chi2 = 0.0;
    double chi2_reduced = 0.0;
    int iterations = 0;

    const FitParameter &param(std::string_view name) const;
    double value(std::string_view name) const { return param(name).value; }
    double sigma(std::string_view name) const { return param(name).sigma; }
};

/// C(x) = C0 (1 - V tri(x))  (dip)   or   C0 (1 + V tri(x))  (peak),
/// tri(x) = max(0, 1 - |x - delta0| / Lc).
double triangle_model(double x, double c0, double v, double lc, double delta0, Orientation orientation);

/// C(x) = offset + amplitude cos(2 pi x / period + phase).
double fringe_model(double x, double offset, double amplitude, double period, double phase);

/// Weighted triangle fit. Break points are first placed on a grid (centres
/// at the sample positions, half-widths at multiples of the sample spacing)
/// with C0 and V solved linearly, then all four parameters are refined.
/// Orientation follows the sign of the centre-versus-wings contrast unless
/// forced. Throws FitFailure on featureless data or non-convergence.
FitResult fit_triangle(const ScanResult &scan, std::optional<Orientation> orientation = std::nullopt);

/// Weighted sinusoid fit, period seeded from the strongest component of
/// the mean-subtracted trace. Throws FitFailure when less than one period
/// is covered or the refinement does not converge.
FitResult fit_fringe(const ScanResult &scan);

}  // namespace qmodes

#endif  // QMODES_ANALYSIS_H_
