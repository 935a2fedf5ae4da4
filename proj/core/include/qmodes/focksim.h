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

#ifndef QMODES_FOCKSIM_H_
#define QMODES_FOCKSIM_H_

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "qmodes/elements.h"

namespace qmodes {

constexpr int kMaxPhotons = 12;

/// Ryser inclusion-exclusion with Gray-code updates, O(2^n n). n <= 12.
Complex permanent(const Eigen::MatrixXcd &matrix);

/// Sum over all n! permutations. Reference for small n.
Complex permanent_by_expansion(const Eigen::MatrixXcd &matrix);

/// Gram matrix of the photons' internal wavepackets, s_jk = <phi_j|phi_k>.
class WavepacketBasis {
   public:
    /// Throws InvalidArgument unless Hermitian, unit diagonal, |s_jk| <= 1
    /// and positive semidefinite (all within 1e-10).
    explicit WavepacketBasis(Eigen::MatrixXcd overlap);

    /// n mutually identical wavepackets.
    static WavepacketBasis identical(std::size_t n);
    /// n mutually orthogonal wavepackets.
    static WavepacketBasis orthogonal(std::size_t n);
    /// Two wavepackets with overlap s.
    static WavepacketBasis pair(Complex s);

    std::size_t size() const { return static_cast<std::size_t>(overlap_.rows()); }
    Complex overlap(std::size_t j, std::size_t k) const {
        return overlap_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
    }
    const Eigen::MatrixXcd &matrix() const { return overlap_; }

   private:
    Eigen::MatrixXcd overlap_;
};

/// A photon in mode `mode` with internal wavepacket `tag`.
struct Photon {
    std::size_t mode = 0;
    std::size_t tag = 0;
    auto operator<=>(const Photon &) const = default;
};

/// Superposition of products of creation operators,
///   |psi> = sum_t c_t prod_j a^dagger_{mode_tj}(phi_{tag_tj}) |0>,
/// normalized at construction. Every term carries the same photon count.
class PhotonState {
   public:
    struct Term {
        Complex coefficient;
        std::vector<Photon> photons;
    };

    /// Normalizes against `basis`. Throws on mixed photon numbers, a
    /// zero-norm state, tags outside the basis, or more than kMaxPhotons.
    PhotonState(std::vector<Term> terms, const WavepacketBasis &basis);

    /// One photon per listed (mode, tag).
    static PhotonState product(std::vector<Photon> photons, const WavepacketBasis &basis);

    /// Superposition of Fock states sum_k amp_k |occupation_k>, all photons
    /// carrying `tag`. Occupations map mode index -> photon count.
    static PhotonState fock(const std::vector<std::pair<std::map<std::size_t, int>, Complex>> &amplitudes,
                            const WavepacketBasis &basis, std::size_t tag = 0);

    const std::vector<Term> &terms() const { return terms_; }
    std::size_t photon_number() const { return photon_number_; }
    /// Squared norm of the terms as supplied, before normalization.
    double normalization() const { return normalization_; }

    /// Fock amplitude <occupation|psi> for a state whose photons all share
    /// one tag. Throws InvalidArgument otherwise.
    Complex fock_amplitude(const std::map<std::size_t, int> &occupation) const;

   private:
    PhotonState() = default;
    friend PhotonState output_state(const PhotonState &, const TransferMatrix &);

    std::vector<Term> terms_;
    std::size_t photon_number_ = 0;
    double normalization_ = 1.0;
};

/// Photon counts per detector mode; all other modes are traced out.
struct DetectionPattern {
    std::map<std::size_t, int> counts;

    static DetectionPattern coincidence(std::size_t a, std::size_t b);
    int photon_number() const;
};

/// <a|b> including internal-wavepacket overlaps.
Complex inner_product(const PhotonState &a, const PhotonState &b, const WavepacketBasis &basis);

/// max over global phases of |<a|b>| compared with 1.
bool equal_up_to_global_phase(const PhotonState &a, const PhotonState &b, const WavepacketBasis &basis,
                              double tol = 1e-9);

/// Probability of `pattern` after evolving `state` through `U`:
///   P = 1/prod(m!) sum_{t,t'} conj(c_t) c_t' sum_pi prod_j s(tag_tj, tag_t'pi(j)) perm(F_pi)
/// with F_pi[j][l] = conj(U[o_l, a_tj]) U[o_l, a_t'pi(j)]. Throws on a
/// photon-number mismatch or a pattern touching loss modes.
double evolve_probability(const PhotonState &state, const TransferMatrix &U, const DetectionPattern &pattern,
                          const WavepacketBasis &basis);

/// Same as evolve_probability, but loss modes may act as virtual detectors.
double pattern_probability(const PhotonState &state, const TransferMatrix &U, const DetectionPattern &pattern,
                           const WavepacketBasis &basis);

/// Every occupation pattern of `photons` over `modes` modes.
std::vector<DetectionPattern> all_patterns(std::size_t modes, int photons);

/// Pure-state evolution. Throws InvalidArgument when U couples loss modes.
PhotonState output_state(const PhotonState &state, const TransferMatrix &U);

/// Two-mode NOON interferometer: (|2,0> - |0,2>)/sqrt(2), phase on mode 0,
/// symmetric 50/50 splitter, coincidence. Equals (1 - cos 2 phase) / 2.
double noon_fringe_probability(double phase_rad);

/// Single-photon counterpart: |1,0>, the same phase and splitter preceded by
/// a first splitter; probability at mode 0. Equals (1 - cos phase) / 2.
double single_photon_fringe_probability(double phase_rad);

}  // namespace qmodes

#endif  // QMODES_FOCKSIM_H_
