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

#include "qmodes/analysis.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>

#include "least_squares.h"
#include "qmodes/error.h"

namespace qmodes {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Data {
    Eigen::VectorXd x;
    Eigen::VectorXd y;
    Eigen::VectorXd sigma;
    Eigen::VectorXd w;  // 1 / sigma^2
};

Data to_data(const ScanResult &scan) {
    const auto n = static_cast<Eigen::Index>(scan.size());
    if (scan.counts.size() != scan.size() || scan.sigma.size() != scan.size()) {
        throw InvalidArgument("scan result columns have different lengths");
    }
    Data d{Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        auto k = static_cast<std::size_t>(i);
        if (!(scan.sigma[k] > 0.0)) {
            throw InvalidArgument("scan point " + std::to_string(k) + " has non-positive sigma");
        }
        d.x(i) = scan.points[k];
        d.y(i) = scan.counts[k];
        d.sigma(i) = scan.sigma[k];
        d.w(i) = 1.0 / (scan.sigma[k] * scan.sigma[k]);
    }
    return d;
}

std::vector<double> sorted_unique(const Eigen::VectorXd &x) {
    std::vector<double> v(x.data(), x.data() + x.size());
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

double median_spacing(const std::vector<double> &xs) {
    std::vector<double> gaps;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        gaps.push_back(xs[i] - xs[i - 1]);
    }
    std::nth_element(gaps.begin(), gaps.begin() + static_cast<std::ptrdiff_t>(gaps.size() / 2), gaps.end());
    return gaps[gaps.size() / 2];
}

double orientation_sign(Orientation o) { return o == Orientation::Dip ? -1.0 : 1.0; }

double tri(double x, double lc, double delta0) { return std::max(0.0, 1.0 - std::abs(x - delta0) / lc); }

Orientation detect_orientation(const Data &d) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(d.x.size()));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return d.x(a) < d.x(b); });
    std::size_t k = std::max<std::size_t>(1, order.size() / 10);
    double wings = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        wings += d.y(order[i]) + d.y(order[order.size() - 1 - i]);
    }
    wings /= static_cast<double>(2 * k);
    double below = wings - d.y.minCoeff();
    double above = d.y.maxCoeff() - wings;
    return below >= above ? Orientation::Dip : Orientation::Peak;
}

FitParameter make_param(const char *name, const detail::LeastSquaresResult &r, Eigen::Index k) {
    double var = r.covariance(k, k);
    return FitParameter{name, r.params(k), var >= 0.0 ? std::sqrt(var) : std::numeric_limits<double>::quiet_NaN()};
}

}  // namespace

double visibility_dip(double c_max, double c_min) {
    if (!(c_max > 0.0)) {
        throw InvalidArgument("dip visibility needs c_max > 0");
    }
    if (c_min > c_max || c_min < 0.0) {
        throw InvalidArgument("dip visibility needs 0 <= c_min <= c_max");
    }
    return (c_max - c_min) / c_max;
}

double visibility_peak(double c_max, double c_min) {
    if (!(c_min > 0.0)) {
        throw InvalidArgument("peak visibility needs c_min > 0");
    }
    if (c_max < c_min) {
        throw InvalidArgument("peak visibility needs c_max >= c_min");
    }
    return (c_max - c_min) / c_min;
}

double poisson_sigma(long long count) { return count > 0 ? std::sqrt(static_cast<double>(count)) : 1.0; }

ScanResult subtract_background(const ScanResult &scan, double accidental_rate) {
    if (!(accidental_rate >= 0.0)) {
        throw InvalidArgument("accidental rate must be >= 0");
    }
    if (accidental_rate == 0.0 || scan.size() == 0) {
        return scan;
    }
    const double background = accidental_rate * scan.integration_time_s;
    double min_count = *std::min_element(scan.counts.begin(), scan.counts.end());
    double bound = min_count + 5.0 * poisson_sigma(static_cast<long long>(std::llround(min_count)));
    if (background > bound) {
        throw InvalidArgument("implausible background: " + std::to_string(background) +
                              " counts per point exceeds min(counts) + 5 sigma = " + std::to_string(bound));
    }
    ScanResult out = scan;
    for (std::size_t i = 0; i < scan.size(); ++i) {
        out.counts[i] = std::max(0.0, scan.counts[i] - background);
        out.sigma[i] = std::sqrt(scan.sigma[i] * scan.sigma[i] + background);
        if (i < out.expected_rate.size()) {
            out.expected_rate[i] = std::max(0.0, scan.expected_rate[i] - accidental_rate);
        }
    }
    return out;
}

const FitParameter &FitResult::param(std::string_view name) const {
    for (const auto &p : params) {
        if (p.name == name) {
            return p;
        }
    }
    throw InvalidArgument("fit has no parameter '" + std::string(name) + "'");
}

double triangle_model(double x, double c0, double v, double lc, double delta0, Orientation orientation) {
    return c0 * (1.0 + orientation_sign(orientation) * v * tri(x, lc, delta0));
}

double fringe_model(double x, double offset, double amplitude, double period, double phase) {
    return offset + amplitude * std::cos(kTwoPi * x / period + phase);
}

FitResult fit_triangle(const ScanResult &scan, std::optional<Orientation> orientation) {
    if (scan.size() < 6) {
        throw InvalidArgument("triangle fit needs at least 6 points");
    }
    Data d = to_data(scan);
    const Eigen::Index n = d.x.size();
    if (d.y.maxCoeff() == d.y.minCoeff()) {
        throw FitFailure("no feature: all counts are equal");
    }
    const Orientation orient = orientation.value_or(detect_orientation(d));
    const double sgn = orientation_sign(orient);

    auto xs = sorted_unique(d.x);
    const double spacing = median_spacing(xs);
    const double span = xs.back() - xs.front();
    if (!(spacing > 0.0)) {
        throw InvalidArgument("triangle fit needs distinct sweep values");
    }

    // Grid over break placements; C0 and the dip depth are linear there.
    struct Candidate {
        double chi2 = std::numeric_limits<double>::infinity();
        double lc = 0.0;
        double delta0 = 0.0;
        double a = 0.0;
        double b = 0.0;
    } best;
    const auto widths = static_cast<int>(std::floor(span / spacing + 1e-9));
    Eigen::VectorXd t(n);
    for (int k = 1; k <= widths; ++k) {
        const double lc = k * spacing;
        for (double centre : xs) {
            double s0 = 0, s1 = 0, s2 = 0, y0 = 0, y1 = 0;
            for (Eigen::Index i = 0; i < n; ++i) {
                t(i) = tri(d.x(i), lc, centre);
                s0 += d.w(i);
                s1 += d.w(i) * t(i);
                s2 += d.w(i) * t(i) * t(i);
                y0 += d.w(i) * d.y(i);
                y1 += d.w(i) * t(i) * d.y(i);
            }
            double det = s0 * s2 - s1 * s1;
            if (!(det > 1e-12 * s0 * s0)) {
                continue;
            }
            double a = (s2 * y0 - s1 * y1) / det;
            double b = (s0 * y1 - s1 * y0) / det;
            double chi2 = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                double r = d.y(i) - a - b * t(i);
                chi2 += d.w(i) * r * r;
            }
            // Strict comparison keeps the smallest Lc, then smallest delta0, on ties.
            if (chi2 < best.chi2) {
                best = Candidate{chi2, lc, centre, a, b};
            }
        }
    }
    if (!std::isfinite(best.chi2) || best.a == 0.0) {
        throw FitFailure("no feature: triangle grid search found no usable placement");
    }

    Eigen::VectorXd start(4);
    start << best.a, best.b / (sgn * best.a), best.lc, best.delta0;
    auto model = [&](const Eigen::VectorXd &p, Eigen::VectorXd &f, Eigen::MatrixXd &j) {
        const double c0 = p(0), v = p(1), lc = p(2), d0 = p(3);
        for (Eigen::Index i = 0; i < n; ++i) {
            double dx = d.x(i) - d0;
            double tt = tri(d.x(i), lc, d0);
            f(i) = c0 * (1.0 + sgn * v * tt);
            j(i, 0) = 1.0 + sgn * v * tt;
            j(i, 1) = c0 * sgn * tt;
            if (tt > 0.0) {
                double sign_dx = dx > 0 ? 1.0 : (dx < 0 ? -1.0 : 0.0);
                j(i, 2) = c0 * sgn * v * std::abs(dx) / (lc * lc);
                j(i, 3) = c0 * sgn * v * sign_dx / lc;
            } else {
                j(i, 2) = 0.0;
                j(i, 3) = 0.0;
            }
        }
    };
    const double min_lc = 1e-6 * spacing;
    auto project = [&](Eigen::VectorXd &p) { p(2) = std::max(p(2), min_lc); };
    auto r = detail::damped_gauss_newton(model, project, start, d.y, d.sigma);
    if (!r.converged) {
        throw FitFailure("triangle fit did not converge in " + std::to_string(r.iterations) + " iterations");
    }

    FitResult out;
    out.model = FitModel::Triangle;
    out.orientation = orient;
    out.params = {make_param("C0", r, 0), make_param("V", r, 1), make_param("Lc", r, 2), make_param("delta0", r, 3)};
    out.chi2 = r.chi2;
    out.chi2_reduced = n > 4 ? r.chi2 / static_cast<double>(n - 4) : 0.0;
    out.iterations = r.iterations;
    double v = out.value("V");
    if (!(v >= -0.05 && v <= 1.05)) {
        throw FitFailure("fitted visibility " + std::to_string(v) + " outside [-0.05, 1.05]");
    }
    return out;
}

FitResult fit_fringe(const ScanResult &scan) {
    if (scan.size() < 8) {
        throw InvalidArgument("fringe fit needs at least 8 points");
    }
    Data d = to_data(scan);
    const Eigen::Index n = d.x.size();
    auto xs = sorted_unique(d.x);
    const double span = xs.back() - xs.front();
    const double spacing = median_spacing(xs);
    if (!(span > 0.0)) {
        throw InvalidArgument("fringe fit needs distinct sweep values");
    }
    if (d.y.maxCoeff() == d.y.minCoeff()) {
        throw FitFailure("no feature: all counts are equal");
    }

    // Strongest spectral component of the mean-subtracted trace, searched
    // from one cycle per span up to Nyquist with 8x oversampling.
    const double mean = d.y.mean();
    const double df = 1.0 / (8.0 * span);
    const double f_max = 0.5 / spacing;
    double best_f = 0.0;
    double best_power = -1.0;
    for (double f = 8.0 * df; f <= f_max + 1e-12; f += df) {
        std::complex<double> acc = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            acc += (d.y(i) - mean) * std::polar(1.0, -kTwoPi * f * d.x(i));
        }
        double power = std::norm(acc);
        if (power > best_power) {
            best_power = power;
            best_f = f;
        }
    }
    if (!(best_f > 0.0)) {
        throw FitFailure("fewer than one period covered");
    }

    // Refine the frequency on a fine grid with offset and quadratures solved linearly.
    double best_chi2 = std::numeric_limits<double>::infinity();
    Eigen::Vector3d best_lin = Eigen::Vector3d::Zero();
    double seed_f = best_f;
    for (int k = -40; k <= 40; ++k) {
        double f = seed_f + k * df / 40.0;
        if (f <= 0.0) {
            continue;
        }
        Eigen::MatrixXd a(n, 3);
        for (Eigen::Index i = 0; i < n; ++i) {
            double th = kTwoPi * f * d.x(i);
            double sw = 1.0 / d.sigma(i);
            a(i, 0) = sw;
            a(i, 1) = sw * std::cos(th);
            a(i, 2) = sw * std::sin(th);
        }
        Eigen::VectorXd b = d.y.cwiseProduct(d.sigma.cwiseInverse());
        Eigen::Vector3d sol = a.colPivHouseholderQr().solve(b);
        double chi2 = (a * sol - b).squaredNorm();
        if (chi2 < best_chi2) {
            best_chi2 = chi2;
            best_lin = sol;
            best_f = f;
        }
    }

    Eigen::VectorXd start(4);
    start << best_lin(0), std::hypot(best_lin(1), best_lin(2)), 1.0 / best_f, std::atan2(-best_lin(2), best_lin(1));
    auto model = [&](const Eigen::VectorXd &p, Eigen::VectorXd &f, Eigen::MatrixXd &j) {
        const double off = p(0), amp = p(1), period = p(2), phase = p(3);
        for (Eigen::Index i = 0; i < n; ++i) {
            double th = kTwoPi * d.x(i) / period + phase;
            double c = std::cos(th);
            double s = std::sin(th);
            f(i) = off + amp * c;
            j(i, 0) = 1.0;
            j(i, 1) = c;
            j(i, 2) = amp * s * kTwoPi * d.x(i) / (period * period);
            j(i, 3) = -amp * s;
        }
    };
    const double min_period = 1e-6 * spacing;
    auto project = [&](Eigen::VectorXd &p) { p(2) = std::max(p(2), min_period); };
    auto r = detail::damped_gauss_newton(model, project, start, d.y, d.sigma);
    if (!r.converged) {
        throw FitFailure("fringe fit did not converge in " + std::to_string(r.iterations) + " iterations");
    }
    if (r.params(1) < 0.0) {
        r.params(1) = -r.params(1);
        r.params(3) += std::numbers::pi;
        // Flipping the amplitude sign flips its covariance with the others.
        for (Eigen::Index k = 0; k < 4; ++k) {
            if (k != 1) {
                r.covariance(1, k) = -r.covariance(1, k);
                r.covariance(k, 1) = -r.covariance(k, 1);
            }
        }
    }
    r.params(3) = std::remainder(r.params(3), kTwoPi);
    if (r.params(2) > span) {
        throw FitFailure("fewer than one period covered (fitted period " + std::to_string(r.params(2)) +
                         " exceeds the scanned span " + std::to_string(span) + ")");
    }

    FitResult out;
    out.model = FitModel::Sinusoid;
    out.params = {make_param("offset", r, 0), make_param("amplitude", r, 1), make_param("period", r, 2),
                  make_param("phase", r, 3)};
    const double off = r.params(0);
    const double amp = r.params(1);
    Eigen::Vector2d grad(-amp / (off * off), 1.0 / off);
    Eigen::Matrix2d cov = r.covariance.topLeftCorner<2, 2>();
    out.params.push_back(FitParameter{"visibility", amp / off, std::sqrt(grad.dot(cov * grad))});
    out.chi2 = r.chi2;
    out.chi2_reduced = n > 4 ? r.chi2 / static_cast<double>(n - 4) : 0.0;
    out.iterations = r.iterations;
    return out;
}

}  // namespace qmodes
