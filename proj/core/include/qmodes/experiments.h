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

#ifndef QMODES_EXPERIMENTS_H_
#define QMODES_EXPERIMENTS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qmodes/circuit.h"
#include "qmodes/focksim.h"

namespace qmodes {

/// Phenomenological photon-pair source.
struct SourceModel {
    /// Wavepacket overlap of the two photons at zero delay.
    double base_overlap = 1.0;
    /// Half-base of the triangular overlap envelope, in path-length um.
    double coherence_length_um = 448.7;
    double pair_rate_hz = 25000.0;
    /// Flat background added to every coincidence rate.
    double accidental_rate_hz = 0.0;

    /// Throws InvalidArgument on negative values, s0 > 1 or L_c <= 0.
    void check() const;
    bool operator==(const SourceModel &) const = default;
};

enum class SweepVariable { DelayUm, HeaterMw };

std::string_view to_string(SweepVariable v);
std::optional<SweepVariable> sweep_from_string(std::string_view s);

struct ScanConfig {
    SweepVariable variable = SweepVariable::DelayUm;
    std::vector<double> points;
    double integration_time_s = 1.0;
    std::uint64_t seed = 1;
    /// Heater power giving a pi phase shift (heater sweeps only).
    double p_pi_mw = 0.0;
    /// Zero-power phase of the two-photon and single-photon traces.
    double quantum_phase_offset_rad = 0.0;
    double classical_phase_offset_rad = 0.0;
    /// Worker threads for point evaluation; results do not depend on it.
    int threads = 1;

    /// start, start + step, ... up to stop (inclusive, within step/1e6).
    static std::vector<double> grid(double start, double stop, double step);

    void check() const;
    bool operator==(const ScanConfig &) const = default;
};

struct ScanResult {
    std::vector<double> points;
    std::vector<double> expected_rate;
    /// Integer-valued for sampled data; real after background subtraction.
    std::vector<double> counts;
    std::vector<double> sigma;
    double integration_time_s = 1.0;

    std::size_t size() const { return points.size(); }
    double expected_counts(std::size_t i) const { return expected_rate[i] * integration_time_s; }

    /// Copy whose counts are the expected counts (no sampling noise).
    ScanResult noiseless() const;
};

/// s = s0 * sqrt(max(0, 1 - |delay| / L_c)), so that |s|^2, and with it
/// every two-photon interference term, is a triangle of half-base L_c.
double overlap_at_delay(double delay_um, const SourceModel &source);

/// Overlaps that reproduce a target raw visibility in each geometry.
/// Dip (HOM at a 50/50 splitter) and bunched-port peak: V = s0^2.
/// Two-photon NOON fringe: V = (1 + s0^2) / (3 - s0^2).
double overlap_for_dip_visibility(double v1);
double overlap_for_peak_visibility(double v2);
double overlap_for_noon_visibility(double v);

/// Seed of the random stream for one scan point; the same triple always
/// yields the same stream, so parallel and serial runs agree.
std::uint64_t point_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

/// Coincidence-versus-delay scan. The two photons enter circuit.inputs[0]
/// and circuit.inputs[1]; their overlap follows overlap_at_delay. Rate per
/// point is pair_rate * P + accidental_rate, counts ~ Poisson(rate * T).
ScanResult hom_scan(const Circuit &circuit, const DetectionPattern &pattern, const SourceModel &source,
                    const ScanConfig &scan, std::uint64_t stream = 0);

struct FringeScan {
    ScanResult quantum;
    ScanResult classical;
};

/// Heater sweep with phase pi * P / P_pi on every PhaseShifter stage whose
/// `heater` parameter is non-zero (scaled by that parameter). The quantum
/// trace is the two-photon coincidence; the classical trace is the
/// single-photon detection probability of a photon launched at inputs[0],
/// times pair_rate.
FringeScan fringe_scan(const Circuit &circuit_template, const DetectionPattern &quantum_pattern,
                       const DetectionPattern &classical_pattern, const SourceModel &source, const ScanConfig &scan);

/// Named detection channel; repeated modes mean photon-number resolution.
struct Detection {
    std::string name;
    std::vector<ModeLabel> modes;

    DetectionPattern pattern(const ModeRegistry &registry) const;
    bool operator==(const Detection &) const = default;
};

struct Experiment {
    std::string name;
    Circuit circuit;
    SourceModel source;
    ScanConfig scan;
    std::vector<Detection> detections;

    bool operator==(const Experiment &) const = default;
};

struct NamedScan {
    std::string channel;
    ScanResult result;
};

/// One trace per detection channel. Two-photon channels are coincidence
/// traces; one-photon channels (heater sweeps only) are classical traces.
std::vector<NamedScan> run_experiment(const Experiment &experiment);

/// Circuit diagnostics plus experiment-level checks (detection channels,
/// launch modes, scan and source ranges).
std::vector<std::string> validate(const Experiment &experiment);

enum class Sample { Sample1, Sample2, Sample3, Sample4 };

std::optional<Sample> sample_from_string(std::string_view s);
std::string_view to_string(Sample s);

/// The four on-chip conversion experiments.
///   sample1: TE/TM gratings, PBS, TM0->TE1 converter, 870 um multimode
///            section, converter and PBS back, fiber-BS HOM dip.
///   sample2: two TE paths, mode mux, 30 um section, demux, on-chip BS dip.
///   sample3: on-chip BS (path NOON), mux, 30 um, demux, heater, second BS;
///            two-photon and single-photon fringes.
///   sample4: on-chip BS, mux, 30 um, TE1->TM0 converter, PBS split,
///            fiber-BS HOM on each output (peaks).
Experiment preset(Sample sample);

namespace preset_defaults {
inline constexpr double kWavelengthNm = 1558.0;
inline constexpr double kGratingEfficiency = 0.3;
inline constexpr double kCoherenceLengthUm = 448.7;
/// Placeholder effective indices of the 750 x 220 nm multimode guide.
inline constexpr double kNeffTE0 = 2.40;
inline constexpr double kNeffTE1 = 1.80;
inline constexpr double kNeffTM0 = 1.70;
inline constexpr double kPiPowerMw = 33.4;
}  // namespace preset_defaults

}  // namespace qmodes

#endif  // QMODES_EXPERIMENTS_H_
