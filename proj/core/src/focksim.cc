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

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>

#include "qmodes/error.h"

namespace qmodes {
namespace {

double factorial(int n) {
    double out = 1.0;
    for (int k = 2; k <= n; ++k) {
        out *= k;
    }
    return out;
}

void check_square(const Eigen::MatrixXcd &m) {
    if (m.rows() != m.cols()) {
        throw InvalidArgument("permanent of a non-square " + std::to_string(m.rows()) + "x" +
                              std::to_string(m.cols()) + " matrix");
    }
    if (m.rows() > kMaxPhotons) {
        throw InvalidArgument("permanent size " + std::to_string(m.rows()) + " exceeds the limit of " +
                              std::to_string(kMaxPhotons));
    }
}

/// perm(M) with M[j][k] = [mode_j == mode'_k] s(tag_j, tag'_k).
Complex term_overlap(const std::vector<Photon> &bra, const std::vector<Photon> &ket, const WavepacketBasis &basis) {
    auto n = static_cast<Eigen::Index>(bra.size());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = 0; k < n; ++k) {
            if (bra[j].mode == ket[k].mode) {
                m(j, k) = basis.overlap(bra[j].tag, ket[k].tag);
            }
        }
    }
    return permanent(m);
}

Complex raw_inner_product(const std::vector<PhotonState::Term> &a, const std::vector<PhotonState::Term> &b,
                          const WavepacketBasis &basis) {
    Complex total = 0.0;
    for (const auto &ta : a) {
        for (const auto &tb : b) {
            if (ta.photons.size() != tb.photons.size()) {
                continue;
            }
            total += std::conj(ta.coefficient) * tb.coefficient * term_overlap(ta.photons, tb.photons, basis);
        }
    }
    return total;
}

/// Non-decreasing sequences of length k drawn from `candidates`.
void for_each_multiset(const std::vector<std::size_t> &candidates, std::size_t k,
                       const std::function<void(const std::vector<std::size_t> &)> &fn) {
    std::vector<std::size_t> pick(k);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t pos, std::size_t start) {
        if (pos == k) {
            std::vector<std::size_t> modes(k);
            for (std::size_t i = 0; i < k; ++i) {
                modes[i] = candidates[pick[i]];
            }
            fn(modes);
            return;
        }
        for (std::size_t i = start; i < candidates.size(); ++i) {
            pick[pos] = i;
            rec(pos + 1, i);
        }
    };
    rec(0, 0);
}

double multiplicity_factorials(const std::vector<std::size_t> &sorted_modes) {
    double out = 1.0;
    std::size_t i = 0;
    while (i < sorted_modes.size()) {
        std::size_t j = i;
        while (j < sorted_modes.size() && sorted_modes[j] == sorted_modes[i]) {
            ++j;
        }
        out *= factorial(static_cast<int>(j - i));
        i = j;
    }
    return out;
}

}  // namespace

Complex permanent(const Eigen::MatrixXcd &matrix) {
    check_square(matrix);
    const auto n = static_cast<int>(matrix.rows());
    if (n == 0) {
        return 1.0;
    }
    // Ryser: perm(A) = (-1)^n sum_S (-1)^{|S|} prod_i sum_{j in S} a_ij,
    // walking subsets in Gray-code order so each step adds or drops one column.
    std::vector<Complex> row_sums(static_cast<std::size_t>(n), 0.0);
    Complex total = 0.0;
    std::uint32_t gray = 0;
    const std::uint32_t subsets = 1u << n;
    for (std::uint32_t k = 1; k < subsets; ++k) {
        int col = std::countr_zero(k);
        std::uint32_t bit = 1u << col;
        gray ^= bit;
        double sign_col = (gray & bit) ? 1.0 : -1.0;
        Complex prod = 1.0;
        for (int i = 0; i < n; ++i) {
            row_sums[static_cast<std::size_t>(i)] += sign_col * matrix(i, col);
            prod *= row_sums[static_cast<std::size_t>(i)];
        }
        int size = std::popcount(gray);
        total += ((size % 2) == (n % 2)) ? prod : -prod;
    }
    return total;
}

Complex permanent_by_expansion(const Eigen::MatrixXcd &matrix) {
    check_square(matrix);
    const auto n = static_cast<int>(matrix.rows());
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    Complex total = 0.0;
    do {
        Complex prod = 1.0;
        for (int i = 0; i < n; ++i) {
            prod *= matrix(i, perm[static_cast<std::size_t>(i)]);
        }
        total += prod;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

WavepacketBasis::WavepacketBasis(Eigen::MatrixXcd overlap) : overlap_(std::move(overlap)) {
    constexpr double tol = 1e-10;
    if (overlap_.rows() != overlap_.cols() || overlap_.rows() == 0) {
        throw InvalidArgument("wavepacket overlap matrix must be square and non-empty");
    }
    const auto n = overlap_.rows();
    for (Eigen::Index j = 0; j < n; ++j) {
        if (std::abs(overlap_(j, j) - 1.0) > tol) {
            throw InvalidArgument("wavepacket overlap diagonal must be 1");
        }
        for (Eigen::Index k = 0; k < n; ++k) {
            if (std::abs(overlap_(j, k) - std::conj(overlap_(k, j))) > tol) {
                throw InvalidArgument("wavepacket overlap matrix must be Hermitian");
            }
            if (std::abs(overlap_(j, k)) > 1.0 + tol) {
                throw InvalidArgument("wavepacket overlaps must satisfy |s| <= 1");
            }
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(overlap_);
    if (eig.eigenvalues().minCoeff() < -tol) {
        throw InvalidArgument("wavepacket overlap matrix must be positive semidefinite");
    }
}

WavepacketBasis WavepacketBasis::identical(std::size_t n) {
    auto e = static_cast<Eigen::Index>(n);
    return WavepacketBasis(Eigen::MatrixXcd::Ones(e, e));
}

WavepacketBasis WavepacketBasis::orthogonal(std::size_t n) {
    auto e = static_cast<Eigen::Index>(n);
    return WavepacketBasis(Eigen::MatrixXcd::Identity(e, e));
}

WavepacketBasis WavepacketBasis::pair(Complex s) {
    Eigen::MatrixXcd m(2, 2);
    m << 1.0, s, std::conj(s), 1.0;
    return WavepacketBasis(std::move(m));
}

PhotonState::PhotonState(std::vector<Term> terms, const WavepacketBasis &basis) : terms_(std::move(terms)) {
    if (terms_.empty()) {
        throw InvalidArgument("photon state needs at least one term");
    }
    photon_number_ = terms_.front().photons.size();
    if (photon_number_ > static_cast<std::size_t>(kMaxPhotons)) {
        throw InvalidArgument("photon number " + std::to_string(photon_number_) + " exceeds the limit of " +
                              std::to_string(kMaxPhotons));
    }
    for (auto &term : terms_) {
        if (term.photons.size() != photon_number_) {
            throw InvalidArgument("all terms of a photon state must carry the same photon number");
        }
        for (const auto &p : term.photons) {
            if (p.tag >= basis.size()) {
                throw InvalidArgument("wavepacket tag " + std::to_string(p.tag) + " outside the basis");
            }
        }
        std::sort(term.photons.begin(), term.photons.end());
    }
    normalization_ = raw_inner_product(terms_, terms_, basis).real();
    if (!(normalization_ > 1e-300)) {
        throw InvalidArgument("photon state has zero norm");
    }
    double scale = 1.0 / std::sqrt(normalization_);
    for (auto &term : terms_) {
        term.coefficient *= scale;
    }
}

PhotonState PhotonState::product(std::vector<Photon> photons, const WavepacketBasis &basis) {
    return PhotonState({Term{1.0, std::move(photons)}}, basis);
}

PhotonState PhotonState::fock(const std::vector<std::pair<std::map<std::size_t, int>, Complex>> &amplitudes,
                              const WavepacketBasis &basis, std::size_t tag) {
    std::vector<Term> terms;
    for (const auto &[occupation, amp] : amplitudes) {
        Term term{amp, {}};
        double norm = 1.0;
        for (auto [mode, count] : occupation) {
            if (count < 0) {
                throw InvalidArgument("negative occupation number");
            }
            for (int k = 0; k < count; ++k) {
                term.photons.push_back(Photon{mode, tag});
            }
            norm *= factorial(count);
        }
        // |n> = (a^dagger)^n / sqrt(n!) |0>
        term.coefficient /= std::sqrt(norm);
        terms.push_back(std::move(term));
    }
    return PhotonState(std::move(terms), basis);
}

Complex PhotonState::fock_amplitude(const std::map<std::size_t, int> &occupation) const {
    std::vector<std::size_t> wanted;
    double norm = 1.0;
    for (auto [mode, count] : occupation) {
        for (int k = 0; k < count; ++k) {
            wanted.push_back(mode);
        }
        norm *= factorial(count);
    }
    std::sort(wanted.begin(), wanted.end());
    std::size_t tag = terms_.front().photons.empty() ? 0 : terms_.front().photons.front().tag;
    Complex total = 0.0;
    for (const auto &term : terms_) {
        std::vector<std::size_t> modes;
        for (const auto &p : term.photons) {
            if (p.tag != tag) {
                throw InvalidArgument("fock_amplitude requires all photons to share one wavepacket");
            }
            modes.push_back(p.mode);
        }
        if (modes == wanted) {
            total += term.coefficient;
        }
    }
    return total * std::sqrt(norm);
}

DetectionPattern DetectionPattern::coincidence(std::size_t a, std::size_t b) {
    DetectionPattern out;
    out.counts[a] += 1;
    out.counts[b] += 1;
    return out;
}

int DetectionPattern::photon_number() const {
    int n = 0;
    for (auto [mode, count] : counts) {
        n += count;
    }
    return n;
}

Complex inner_product(const PhotonState &a, const PhotonState &b, const WavepacketBasis &basis) {
    return raw_inner_product(a.terms(), b.terms(), basis);
}

bool equal_up_to_global_phase(const PhotonState &a, const PhotonState &b, const WavepacketBasis &basis,
                              double tol) {
    if (a.photon_number() != b.photon_number()) {
        return false;
    }
    return std::abs(std::abs(inner_product(a, b, basis)) - 1.0) <= tol;
}

double pattern_probability(const PhotonState &state, const TransferMatrix &U, const DetectionPattern &pattern,
                           const WavepacketBasis &basis) {
    const std::size_t n = state.photon_number();
    if (pattern.photon_number() != static_cast<int>(n)) {
        throw InvalidArgument("photon-number mismatch: state has " + std::to_string(n) + " photons, pattern has " +
                              std::to_string(pattern.photon_number()));
    }
    std::vector<std::size_t> outputs;
    for (auto [mode, count] : pattern.counts) {
        if (mode >= U.dim()) {
            throw InvalidArgument("detection mode index " + std::to_string(mode) + " outside the mode space");
        }
        if (count < 0) {
            throw InvalidArgument("negative detector count");
        }
        outputs.insert(outputs.end(), static_cast<std::size_t>(count), mode);
    }
    for (const auto &term : state.terms()) {
        for (const auto &p : term.photons) {
            if (p.mode >= U.dim()) {
                throw InvalidArgument("photon mode index outside the mode space");
            }
        }
    }
    const auto en = static_cast<Eigen::Index>(n);
    std::vector<std::size_t> perm(n);
    Eigen::MatrixXcd f(en, en);
    Complex total = 0.0;
    for (const auto &bra : state.terms()) {
        for (const auto &ket : state.terms()) {
            Complex pair_sum = 0.0;
            std::iota(perm.begin(), perm.end(), 0);
            do {
                Complex weight = 1.0;
                for (std::size_t j = 0; j < n && weight != 0.0; ++j) {
                    weight *= basis.overlap(bra.photons[j].tag, ket.photons[perm[j]].tag);
                }
                if (weight == 0.0) {
                    continue;
                }
                for (Eigen::Index j = 0; j < en; ++j) {
                    auto in_bra = static_cast<Eigen::Index>(bra.photons[static_cast<std::size_t>(j)].mode);
                    auto in_ket = static_cast<Eigen::Index>(ket.photons[perm[static_cast<std::size_t>(j)]].mode);
                    for (Eigen::Index l = 0; l < en; ++l) {
                        auto out = static_cast<Eigen::Index>(outputs[static_cast<std::size_t>(l)]);
                        f(j, l) = std::conj(U.entries(out, in_bra)) * U.entries(out, in_ket);
                    }
                }
                pair_sum += weight * permanent(f);
            } while (std::next_permutation(perm.begin(), perm.end()));
            total += std::conj(bra.coefficient) * ket.coefficient * pair_sum;
        }
    }
    double p = total.real() / multiplicity_factorials(outputs);
    if (p < 0.0 && p > -1e-12) {
        p = 0.0;
    }
    return p;
}

double evolve_probability(const PhotonState &state, const TransferMatrix &U, const DetectionPattern &pattern,
                          const WavepacketBasis &basis) {
    for (auto [mode, count] : pattern.counts) {
        if (mode < U.dim() && count > 0 && U.domain.is_loss(mode)) {
            throw InvalidArgument("detection pattern touches loss mode " + U.domain.label(mode).str());
        }
    }
    return pattern_probability(state, U, pattern, basis);
}

std::vector<DetectionPattern> all_patterns(std::size_t modes, int photons) {
    std::vector<std::size_t> all(modes);
    std::iota(all.begin(), all.end(), 0);
    std::vector<DetectionPattern> out;
    for_each_multiset(all, static_cast<std::size_t>(photons), [&](const std::vector<std::size_t> &seq) {
        DetectionPattern p;
        for (auto m : seq) {
            p.counts[m] += 1;
        }
        out.push_back(std::move(p));
    });
    return out;
}

PhotonState output_state(const PhotonState &state, const TransferMatrix &U) {
    if (!U.is_loss_free()) {
        throw InvalidArgument("output_state needs a loss-free transfer matrix; use evolve_probability instead");
    }
    std::map<std::vector<Photon>, Complex> accumulated;
    for (const auto &term : state.terms()) {
        std::map<std::size_t, std::vector<std::size_t>> by_tag;
        for (const auto &p : term.photons) {
            if (p.mode >= U.dim()) {
                throw InvalidArgument("photon mode index outside the mode space");
            }
            by_tag[p.tag].push_back(p.mode);
        }
        // Creation operators of one wavepacket expand independently:
        //   prod_j (sum_o U[o,a_j] a^dagger_o) = sum_c perm(U[c,a]) / prod m_c! prod_l a^dagger_{c_l}
        std::vector<std::pair<std::vector<Photon>, Complex>> partial{{{}, term.coefficient}};
        for (const auto &[tag, inputs] : by_tag) {
            std::vector<std::size_t> reachable;
            for (std::size_t o = 0; o < U.dim(); ++o) {
                for (auto a : inputs) {
                    if (U.entries(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(a)) != 0.0) {
                        reachable.push_back(o);
                        break;
                    }
                }
            }
            const auto k = static_cast<Eigen::Index>(inputs.size());
            std::vector<std::pair<std::vector<Photon>, Complex>> group;
            for_each_multiset(reachable, inputs.size(), [&](const std::vector<std::size_t> &outs) {
                Eigen::MatrixXcd sub(k, k);
                for (Eigen::Index l = 0; l < k; ++l) {
                    for (Eigen::Index j = 0; j < k; ++j) {
                        sub(l, j) = U.entries(static_cast<Eigen::Index>(outs[static_cast<std::size_t>(l)]),
                                              static_cast<Eigen::Index>(inputs[static_cast<std::size_t>(j)]));
                    }
                }
                Complex c = permanent(sub) / multiplicity_factorials(outs);
                if (std::abs(c) < 1e-15) {
                    return;
                }
                std::vector<Photon> photons;
                for (auto o : outs) {
                    photons.push_back(Photon{o, tag});
                }
                group.emplace_back(std::move(photons), c);
            });
            std::vector<std::pair<std::vector<Photon>, Complex>> next;
            for (const auto &[left, lc] : partial) {
                for (const auto &[right, rc] : group) {
                    auto merged = left;
                    merged.insert(merged.end(), right.begin(), right.end());
                    next.emplace_back(std::move(merged), lc * rc);
                }
            }
            partial = std::move(next);
        }
        for (auto &[photons, c] : partial) {
            std::sort(photons.begin(), photons.end());
            accumulated[photons] += c;
        }
    }
    PhotonState out;
    out.photon_number_ = state.photon_number();
    for (auto &[photons, c] : accumulated) {
        if (std::abs(c) > 1e-14) {
            out.terms_.push_back(PhotonState::Term{c, photons});
        }
    }
    if (out.terms_.empty()) {
        throw InvalidArgument("evolved state vanished; transfer matrix is singular");
    }
    return out;
}

namespace {

struct TwoModeBench {
    ModeRegistry registry;
    std::size_t a = 0;
    std::size_t b = 0;
    TwoModeBench() {
        a = registry.register_mode({"arm0", Polarization::TE, 0});
        b = registry.register_mode({"arm1", Polarization::TE, 0});
    }
};

}  // namespace

double noon_fringe_probability(double phase_rad) {
    TwoModeBench bench;
    auto basis = WavepacketBasis::identical(1);
    const double h = 1.0 / std::sqrt(2.0);
    auto noon = PhotonState::fock({{{{bench.a, 2}}, h}, {{{bench.b, 2}}, -h}}, basis);
    auto u = bs_matrix(bench.registry, bench.registry.label(bench.a), bench.registry.label(bench.b), 0.5) *
             phase_shifter_matrix(bench.registry, "arm0", phase_rad);
    return evolve_probability(noon, u, DetectionPattern::coincidence(bench.a, bench.b), basis);
}

double single_photon_fringe_probability(double phase_rad) {
    TwoModeBench bench;
    auto basis = WavepacketBasis::identical(1);
    auto photon = PhotonState::product({Photon{bench.a, 0}}, basis);
    const auto &la = bench.registry.label(bench.a);
    const auto &lb = bench.registry.label(bench.b);
    auto u = bs_matrix(bench.registry, la, lb, 0.5) * phase_shifter_matrix(bench.registry, "arm0", phase_rad) *
             bs_matrix(bench.registry, la, lb, 0.5);
    DetectionPattern pattern;
    pattern.counts[bench.a] = 1;
    return evolve_probability(photon, u, pattern, basis);
}

}  // namespace qmodes
