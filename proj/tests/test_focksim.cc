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

#include "qmodes/focksim.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qmodes/error.h"
#include "support/oracle.h"
#include "support/random.h"

namespace qmodes {
namespace {

using std::numbers::pi;
using testing_support::plain_registry;
using testing_support::random_gram;
using testing_support::random_unitary;
using testing_support::wrap;

TransferMatrix balanced_bs(BsConvention conv = BsConvention::Symmetric) {
    auto reg = plain_registry(2);
    return bs_matrix(reg, reg.label(0), reg.label(1), 0.5, conv);
}

double hom(Complex s) {
    auto basis = WavepacketBasis::pair(s);
    auto state = PhotonState::product({{0, 0}, {1, 1}}, basis);
    return evolve_probability(state, balanced_bs(), DetectionPattern::coincidence(0, 1), basis);
}

TEST(Permanent, TwoByTwo) {
    Eigen::MatrixXcd m(2, 2);
    m << 1, 2, 3, 4;
    EXPECT_NEAR(std::abs(permanent(m) - Complex(10.0)), 0.0, 1e-12);
}

TEST(Permanent, IdentityAndOnes) {
    for (int n = 0; n <= 8; ++n) {
        EXPECT_NEAR(std::abs(permanent(Eigen::MatrixXcd::Identity(n, n)) - Complex(1.0)), 0.0, 1e-12);
    }
    EXPECT_NEAR(std::abs(permanent(Eigen::MatrixXcd::Ones(3, 3)) - Complex(6.0)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(permanent(Eigen::MatrixXcd::Ones(6, 6)) - Complex(720.0)), 0.0, 1e-9);
}

TEST(Permanent, MatchesExpansion) {
    std::mt19937_64 rng(1);
    for (int n = 1; n <= 6; ++n) {
        for (int k = 0; k < 20; ++k) {
            Eigen::MatrixXcd m = random_unitary(static_cast<std::size_t>(n), rng) * Complex(1.3, -0.4);
            EXPECT_NEAR(std::abs(permanent(m) - permanent_by_expansion(m)), 0.0, 1e-11);
        }
    }
}

TEST(Permanent, RejectsBadShapes) {
    EXPECT_THROW(permanent(Eigen::MatrixXcd::Ones(2, 3)), InvalidArgument);
    EXPECT_THROW(permanent(Eigen::MatrixXcd::Ones(13, 13)), InvalidArgument);
}

TEST(WavepacketBasis, ValidatesGram) {
    Eigen::MatrixXcd bad(2, 2);
    bad << 1, 2, 2, 1;
    EXPECT_THROW(WavepacketBasis{bad}, InvalidArgument);
    Eigen::MatrixXcd nonherm(2, 2);
    nonherm << 1, 0.5, 0.2, 1;
    EXPECT_THROW(WavepacketBasis{nonherm}, InvalidArgument);
    Eigen::MatrixXcd not_psd(3, 3);
    not_psd << 1, 0.9, -0.9, 0.9, 1, 0.9, -0.9, 0.9, 1;
    EXPECT_THROW(WavepacketBasis{not_psd}, InvalidArgument);
    EXPECT_NO_THROW(WavepacketBasis::pair(Complex(0.3, 0.4)));
}

TEST(Hom, IndistinguishablePhotonsNeverCoincide) { EXPECT_NEAR(hom(1.0), 0.0, 1e-12); }

TEST(Hom, DistinguishablePhotonsGiveHalf) { EXPECT_NEAR(hom(0.0), 0.5, 1e-12); }

TEST(Hom, PartialOverlapMatchesOracle) {
    EXPECT_NEAR(hom(0.5), 0.375, 1e-12);
    Eigen::MatrixXcd gram(2, 2);
    gram << 1, 0.5, 0.5, 1;
    std::vector<oracle::OracleTerm> terms{{1.0, {{0, 0}, {1, 1}}}};
    EXPECT_NEAR(oracle::probability(terms, balanced_bs().entries, gram, {{0, 1}, {1, 1}}), 0.375, 1e-12);
}

TEST(Hom, MonotoneInOverlap) {
    double prev = 1.0;
    for (int k = 0; k <= 100; ++k) {
        double p = hom(std::sqrt(k / 100.0));
        EXPECT_LE(p, prev + 1e-15);
        prev = p;
    }
}

TEST(Evolve, RejectsMismatchAndLossPatterns) {
    auto basis = WavepacketBasis::identical(1);
    auto state = PhotonState::product({{0, 0}}, basis);
    EXPECT_THROW(evolve_probability(state, balanced_bs(), DetectionPattern::coincidence(0, 1), basis),
                 InvalidArgument);
    auto reg = plain_registry(1);
    auto g = grating_coupler_matrix(reg, reg.label(0), 0.5);
    DetectionPattern loss{{{1, 1}}};
    EXPECT_THROW(evolve_probability(state, g, loss, basis), InvalidArgument);
    EXPECT_NEAR(pattern_probability(state, g, loss, basis), 0.5, 1e-12);
}

TEST(OutputState, IdentityLeavesStateAlone) {
    auto basis = WavepacketBasis::identical(1);
    auto state = PhotonState::fock({{{{0, 1}, {1, 1}}, 1.0}}, basis);
    auto out = output_state(state, TransferMatrix::identity(plain_registry(2)));
    EXPECT_TRUE(equal_up_to_global_phase(state, out, basis));
}

TEST(OutputState, BeamSplitterMakesNoonState) {
    auto basis = WavepacketBasis::identical(1);
    auto in = PhotonState::fock({{{{0, 1}, {1, 1}}, 1.0}}, basis);
    auto noon = PhotonState::fock({{{{0, 2}}, 1.0}, {{{1, 2}}, -1.0}}, basis);
    EXPECT_TRUE(equal_up_to_global_phase(output_state(in, balanced_bs(BsConvention::RealRotation)), noon, basis));
    // With the symmetric convention the relative sign is fixed by a pi/2
    // phase reference on one output port.
    auto reg = plain_registry(2);
    auto sym = phase_shifter_matrix(reg, "m1", pi / 2) * balanced_bs();
    EXPECT_TRUE(equal_up_to_global_phase(output_state(in, sym), noon, basis));
    auto plus = PhotonState::fock({{{{0, 2}}, 1.0}, {{{1, 2}}, 1.0}}, basis);
    EXPECT_TRUE(equal_up_to_global_phase(output_state(in, balanced_bs()), plus, basis));
}

TEST(OutputState, MatchesOracleAmplitudes) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        auto u = random_unitary(4, rng);
        auto basis = WavepacketBasis::identical(1);
        auto in = PhotonState::fock({{{{0, 2}, {2, 1}}, Complex(0.6, 0.1)}, {{{1, 1}, {3, 2}}, Complex(-0.2, 0.7)}},
                                    basis);
        auto out = output_state(in, wrap(u));
        std::vector<oracle::OracleTerm> terms;
        for (const auto &t : in.terms()) {
            oracle::OracleTerm ot{t.coefficient, {}};
            for (const auto &p : t.photons) {
                ot.photons.push_back({p.mode, p.tag});
            }
            terms.push_back(ot);
        }
        auto ref = oracle::fock_state(terms, u);
        double phase_free = 0.0;
        for (const auto &[key, amp] : ref) {
            std::map<std::size_t, int> occ;
            for (auto m : key) {
                ++occ[m];
            }
            phase_free += std::abs(out.fock_amplitude(occ) - amp);
        }
        EXPECT_LE(phase_free, 1e-10);
    }
}

TEST(OutputState, RejectsLossMatrices) {
    auto reg = plain_registry(1);
    auto g = grating_coupler_matrix(reg, reg.label(0), 0.5);
    auto basis = WavepacketBasis::identical(1);
    auto state = PhotonState::product({{0, 0}}, basis);
    EXPECT_THROW(output_state(state, g), InvalidArgument);
}

TEST(OutputState, PreservesNorm) {
    std::mt19937_64 rng(4);
    auto basis = WavepacketBasis{random_gram(3, 2, rng)};
    auto in = PhotonState::product({{0, 0}, {1, 1}, {1, 2}}, basis);
    auto out = output_state(in, wrap(random_unitary(5, rng)));
    EXPECT_NEAR(std::abs(inner_product(out, out, basis)), 1.0, 1e-10);
}

TEST(PhotonState, RejectsMalformedStates) {
    auto basis = WavepacketBasis::identical(1);
    using Term = PhotonState::Term;
    EXPECT_THROW(PhotonState(std::vector<Term>{{1.0, {{0, 0}}}, {1.0, {{0, 0}, {1, 0}}}}, basis),
                 InvalidArgument);
    EXPECT_THROW(PhotonState(std::vector<Term>{{0.0, {{0, 0}}}}, basis), InvalidArgument);
    EXPECT_THROW(PhotonState::product({{0, 3}}, basis), InvalidArgument);
}

TEST(NoonFringe, KnownPoints) {
    EXPECT_NEAR(noon_fringe_probability(0.0), 0.0, 1e-12);
    EXPECT_NEAR(noon_fringe_probability(pi / 2), 1.0, 1e-12);
    EXPECT_NEAR(noon_fringe_probability(pi / 4), 0.5, 1e-12);
}

TEST(NoonFringe, MatchesOracleOverPhase) {
    for (int k = 0; k < 64; ++k) {
        double phi = 2 * pi * k / 64;
        auto reg = plain_registry(2);
        auto u = bs_matrix(reg, reg.label(0), reg.label(1), 0.5) * phase_shifter_matrix(reg, "m0", phi);
        std::vector<oracle::OracleTerm> terms{{1.0 / std::sqrt(2.0), {{0, 0}, {0, 0}}},
                                              {-1.0 / std::sqrt(2.0), {{1, 0}, {1, 0}}}};
        double ref = oracle::probability(terms, u.entries, Eigen::MatrixXcd::Ones(1, 1), {{0, 1}, {1, 1}});
        EXPECT_NEAR(noon_fringe_probability(phi), ref, 1e-12);
    }
}

// Fringe minima of the two-photon trace are spaced by pi, those of the
// single-photon trace by 2 pi.
TEST(NoonFringe, PeriodIsHalvedRelativeToSinglePhoton) {
    auto minima = [](double (*f)(double)) {
        std::vector<double> out;
        const int n = 6000;
        const double span = 6 * pi;
        for (int k = 1; k < n; ++k) {
            double a = span * (k - 1) / n;
            double b = span * k / n;
            double c = span * (k + 1) / n;
            if (f(b) < f(a) && f(b) <= f(c)) {
                out.push_back(b);
            }
        }
        return out;
    };
    auto q = minima(noon_fringe_probability);
    auto c = minima(single_photon_fringe_probability);
    ASSERT_GE(q.size(), 4u);
    ASSERT_GE(c.size(), 2u);
    const double step = 6 * pi / 6000;
    for (std::size_t i = 1; i < q.size(); ++i) {
        EXPECT_NEAR(q[i] - q[i - 1], pi, step);
    }
    for (std::size_t i = 1; i < c.size(); ++i) {
        EXPECT_NEAR(c[i] - c[i - 1], 2 * pi, step);
    }
    EXPECT_NEAR(single_photon_fringe_probability(0.3), (1 - std::cos(0.3)) / 2, 1e-12);
    EXPECT_NEAR(noon_fringe_probability(0.3 + pi), noon_fringe_probability(0.3), 1e-12);
}

std::vector<oracle::OracleTerm> to_oracle(const std::vector<PhotonState::Term> &terms) {
    std::vector<oracle::OracleTerm> out;
    for (const auto &t : terms) {
        oracle::OracleTerm ot{t.coefficient, {}};
        for (const auto &p : t.photons) {
            ot.photons.push_back({p.mode, p.tag});
        }
        out.push_back(ot);
    }
    return out;
}

// Random instances against the brute-force expansion, including
// superposed input terms and partially distinguishable photons.
TEST(EvolveProperty, AgreesWithOracle) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 60; ++trial) {
        std::size_t modes = std::uniform_int_distribution<std::size_t>(2, 5)(rng);
        int n = std::uniform_int_distribution<int>(1, 3)(rng);
        std::size_t tags = static_cast<std::size_t>(n);
        auto gram = random_gram(tags, std::uniform_int_distribution<std::size_t>(1, 3)(rng), rng);
        WavepacketBasis basis(gram);
        std::uniform_int_distribution<std::size_t> mode(0, modes - 1);
        std::vector<PhotonState::Term> terms;
        for (int t = 0; t < 2; ++t) {
            PhotonState::Term term{Complex(std::normal_distribution<double>()(rng), 0.3 * t), {}};
            for (int j = 0; j < n; ++j) {
                term.photons.push_back({mode(rng), static_cast<std::size_t>(j)});
            }
            terms.push_back(term);
        }
        PhotonState state(terms, basis);
        auto u = random_unitary(modes, rng);
        auto tm = wrap(u);
        double total = 0.0;
        for (const auto &pattern : all_patterns(modes, n)) {
            double p = evolve_probability(state, tm, pattern, basis);
            double ref = oracle::probability(to_oracle(state.terms()), u, gram, pattern.counts);
            EXPECT_NEAR(p, ref, 1e-9);
            total += p;
        }
        EXPECT_NEAR(total, 1.0, 1e-9);
    }
}

TEST(AllPatterns, CountsMatchStarsAndBars) {
    EXPECT_EQ(all_patterns(4, 2).size(), 10u);
    EXPECT_EQ(all_patterns(6, 3).size(), 56u);
    EXPECT_EQ(all_patterns(3, 0).size(), 1u);
}

}  // namespace
}  // namespace qmodes
