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


#include <benchmark/benchmark.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "qmodes/analysis.h"
#include "qmodes/circuit.h"
#include "qmodes/experiments.h"
#include "qmodes/focksim.h"

namespace {

using namespace qmodes;

Eigen::MatrixXcd random_matrix(Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Eigen::MatrixXcd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            m(i, j) = {g(rng), g(rng)};
        }
    }
    return m;
}

void BM_Permanent(benchmark::State &state) {
    auto m = random_matrix(state.range(0), 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(permanent(m));
    }
}
BENCHMARK(BM_Permanent)->DenseRange(2, 12, 2);

// Partially distinguishable photons, one per mode, into a coincidence
// pattern over the first n output modes of a Haar-like 2n-mode unitary.
void BM_EvolveProbability(benchmark::State &state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto modes = 2 * n;
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(random_matrix(static_cast<Eigen::Index>(modes), 5));
    Eigen::MatrixXcd q = qr.householderQ();
    ModeRegistry reg;
    for (std::size_t i = 0; i < modes; ++i) {
        reg.register_mode({"m" + std::to_string(i), Polarization::TE, 0});
    }
    TransferMatrix u{reg, q};
    Eigen::MatrixXcd gram = Eigen::MatrixXcd::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n), 0.8);
    gram.diagonal().setOnes();
    WavepacketBasis basis(gram);
    std::vector<Photon> photons;
    DetectionPattern pattern;
    for (std::size_t i = 0; i < n; ++i) {
        photons.push_back({i, i});
        pattern.counts[i] = 1;
    }
    auto input = PhotonState::product(photons, basis);
    for (auto _ : state) {
        benchmark::DoNotOptimize(evolve_probability(input, u, pattern, basis));
    }
}
BENCHMARK(BM_EvolveProbability)->DenseRange(1, 5);

void BM_CompilePreset(benchmark::State &state) {
    auto e = preset(Sample::Sample4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(compile(e.circuit));
    }
}
BENCHMARK(BM_CompilePreset);

void BM_RunPreset(benchmark::State &state) {
    auto e = preset(static_cast<Sample>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_experiment(e));
    }
}
BENCHMARK(BM_RunPreset)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

void BM_FitTriangle(benchmark::State &state) {
    auto scans = run_experiment(preset(Sample::Sample1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_triangle(scans.front().result, Orientation::Dip));
    }
}
BENCHMARK(BM_FitTriangle)->Unit(benchmark::kMillisecond);

void BM_FitFringe(benchmark::State &state) {
    auto scans = run_experiment(preset(Sample::Sample3));
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_fringe(scans.front().result));
    }
}
BENCHMARK(BM_FitFringe)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
