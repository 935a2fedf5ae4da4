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

#include "qmodes/experiments.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include "qmodes/error.h"

namespace qmodes {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double poisson_floor_sigma(double count) { return count > 0.0 ? std::sqrt(count) : 1.0; }

/// Runs fn(i) for i in [0, n) on up to `threads` workers.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn &&fn) {
    std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), 1, n ? n : 1);
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) {
                fn(i);
            }
        });
    }
}

Circuit with_heater_power(const Circuit &base, double power_mw, double p_pi_mw, double offset_rad) {
    Circuit out = base;
    for (auto *list : {&out.stages, &out.analyzer}) {
        for (auto &stage : *list) {
            double heater = stage.param("heater", 0.0);
            if (stage.kind == ElementKind::PhaseShifter && heater != 0.0) {
                stage.params["phase_rad"] =
                    stage.param("phase_rad", 0.0) + heater * std::numbers::pi * power_mw / p_pi_mw + offset_rad;
            }
        }
    }
    return out;
}

void check_pattern_modes(const DetectionPattern &pattern, const ModeRegistry &registry) {
    for (auto [mode, count] : pattern.counts) {
        if (mode >= registry.size()) {
            throw InvalidArgument("detection mode index outside the circuit");
        }
        if (registry.is_loss(mode)) {
            throw InvalidArgument("detection pattern touches loss mode " + registry.label(mode).str());
        }
    }
}

/// Shared point loop for every scan flavour.
ScanResult run_trace(const Circuit &circuit, const DetectionPattern &pattern, const SourceModel &source,
                     const ScanConfig &scan, std::uint64_t stream, double phase_offset) {
    source.check();
    scan.check();
    check_pattern_modes(pattern, circuit.registry);
    const int photons = pattern.photon_number();
    if (photons != 1 && photons != 2) {
        throw InvalidArgument("detection pattern must hold one or two photons");
    }
    if (circuit.inputs.size() < static_cast<std::size_t>(photons)) {
        throw InvalidArgument("circuit declares fewer launch modes than photons");
    }
    std::vector<Photon> launch;
    for (int k = 0; k < photons; ++k) {
        launch.push_back(Photon{circuit.registry.mode_index(circuit.inputs[static_cast<std::size_t>(k)]),
                                static_cast<std::size_t>(k)});
    }
    const bool heater = scan.variable == SweepVariable::HeaterMw;
    std::optional<TransferMatrix> fixed;
    if (!heater) {
        fixed = compile(circuit);
    }

    const std::size_t n = scan.points.size();
    ScanResult out;
    out.points = scan.points;
    out.integration_time_s = scan.integration_time_s;
    out.expected_rate.assign(n, 0.0);
    out.counts.assign(n, 0.0);
    out.sigma.assign(n, 0.0);

    parallel_for(n, scan.threads, [&](std::size_t i) {
        const double x = scan.points[i];
        double s = heater ? source.base_overlap : overlap_at_delay(x, source);
        TransferMatrix u = heater ? compile(with_heater_power(circuit, x, scan.p_pi_mw, phase_offset)) : *fixed;
        double rate = 0.0;
        if (photons == 2) {
            auto basis = WavepacketBasis::pair(s);
            auto state = PhotonState::product(launch, basis);
            rate = source.pair_rate_hz * evolve_probability(state, u, pattern, basis) + source.accidental_rate_hz;
        } else {
            auto basis = WavepacketBasis::identical(1);
            auto state = PhotonState::product({launch.front()}, basis);
            rate = source.pair_rate_hz * evolve_probability(state, u, pattern, basis);
        }
        rate = std::max(rate, 0.0);
        double mean = rate * scan.integration_time_s;
        double count = 0.0;
        if (mean > 0.0) {
            std::mt19937_64 gen(point_seed(scan.seed, stream, i));
            std::poisson_distribution<long long> draw(mean);
            count = static_cast<double>(draw(gen));
        }
        out.expected_rate[i] = rate;
        out.counts[i] = count;
        out.sigma[i] = poisson_floor_sigma(count);
    });
    return out;
}

ElementSpec stage(ElementKind kind, std::vector<ModeLabel> modes, std::vector<std::string> ports,
                  std::map<std::string, double> params = {}) {
    ElementSpec spec;
    spec.kind = kind;
    spec.modes = std::move(modes);
    spec.ports = std::move(ports);
    spec.params = std::move(params);
    return spec;
}

ModeLabel te(const std::string &port, int order = 0) { return {port, Polarization::TE, order}; }
ModeLabel tm(const std::string &port) { return {port, Polarization::TM, 0}; }

ElementSpec grating(const ModeLabel &mode) {
    return stage(ElementKind::GratingCoupler, {mode}, {}, {{"efficiency", preset_defaults::kGratingEfficiency}});
}

ElementSpec multimode_section(const std::string &port, double length_um) {
    return stage(ElementKind::Propagation, {}, {port},
                 {{"length_um", length_um},
                  {"wavelength_nm", preset_defaults::kWavelengthNm},
                  {"neff.TE0", preset_defaults::kNeffTE0},
                  {"neff.TE1", preset_defaults::kNeffTE1},
                  {"neff.TM0", preset_defaults::kNeffTM0}});
}

ElementSpec splitter(const ModeLabel &a, const ModeLabel &b) {
    return stage(ElementKind::BeamSplitter, {a, b}, {}, {{"reflectivity", 0.5}});
}

ScanConfig delay_scan() {
    ScanConfig scan;
    scan.variable = SweepVariable::DelayUm;
    scan.points = ScanConfig::grid(-1000.0, 1000.0, 10.0);
    scan.integration_time_s = 10.0;
    scan.seed = 1;
    return scan;
}

void register_all(Circuit &c, std::initializer_list<ModeLabel> labels) {
    for (const auto &l : labels) {
        c.registry.register_mode(l);
    }
}

void collect_detectors(Experiment &e) {
    for (const auto &d : e.detections) {
        for (const auto &m : d.modes) {
            if (std::find(e.circuit.detectors.begin(), e.circuit.detectors.end(), m) == e.circuit.detectors.end()) {
                e.circuit.detectors.push_back(m);
            }
        }
    }
}

}  // namespace

void SourceModel::check() const {
    if (!(base_overlap >= 0.0 && base_overlap <= 1.0)) {
        throw InvalidArgument("source overlap s0 must lie in [0, 1]");
    }
    if (!(coherence_length_um > 0.0)) {
        throw InvalidArgument("coherence length must be > 0");
    }
    if (!(pair_rate_hz >= 0.0) || !(accidental_rate_hz >= 0.0)) {
        throw InvalidArgument("source rates must be >= 0");
    }
}

std::string_view to_string(SweepVariable v) { return v == SweepVariable::DelayUm ? "delay_um" : "heater_mW"; }

std::optional<SweepVariable> sweep_from_string(std::string_view s) {
    if (s == "delay_um") {
        return SweepVariable::DelayUm;
    }
    if (s == "heater_mW") {
        return SweepVariable::HeaterMw;
    }
    return std::nullopt;
}

std::vector<double> ScanConfig::grid(double start, double stop, double step) {
    if (!(step > 0.0) || !(stop >= start)) {
        throw InvalidArgument("scan grid needs step > 0 and stop >= start");
    }
    auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-6)) + 1;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = start + static_cast<double>(i) * step;
    }
    return out;
}

void ScanConfig::check() const {
    if (points.empty()) {
        throw InvalidArgument("scan has no points");
    }
    if (!(integration_time_s > 0.0)) {
        throw InvalidArgument("integration time must be > 0");
    }
    if (variable == SweepVariable::HeaterMw && !(p_pi_mw > 0.0)) {
        throw InvalidArgument("heater sweep needs P_pi_mW > 0");
    }
}

ScanResult ScanResult::noiseless() const {
    ScanResult out = *this;
    for (std::size_t i = 0; i < size(); ++i) {
        out.counts[i] = expected_counts(i);
        out.sigma[i] = poisson_floor_sigma(out.counts[i]);
    }
    return out;
}

double overlap_at_delay(double delay_um, const SourceModel &source) {
    return source.base_overlap * std::sqrt(std::max(0.0, 1.0 - std::abs(delay_um) / source.coherence_length_um));
}

double overlap_for_dip_visibility(double v1) {
    if (!(v1 >= 0.0 && v1 <= 1.0)) {
        throw InvalidArgument("dip visibility must lie in [0, 1]");
    }
    return std::sqrt(v1);
}

double overlap_for_peak_visibility(double v2) {
    if (!(v2 >= 0.0 && v2 <= 1.0)) {
        throw InvalidArgument("peak visibility must lie in [0, 1]");
    }
    return std::sqrt(v2);
}

double overlap_for_noon_visibility(double v) {
    // V = (1 + s^2) / (3 - s^2), so V ranges over [1/3, 1].
    if (!(v >= 1.0 / 3.0 && v <= 1.0)) {
        throw InvalidArgument("NOON fringe visibility must lie in [1/3, 1]");
    }
    return std::sqrt((3.0 * v - 1.0) / (1.0 + v));
}

std::uint64_t point_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    std::uint64_t x = splitmix64(seed);
    x = splitmix64(x ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
    return splitmix64(x ^ splitmix64(index + 0x8cb92ba72f3d8dd7ULL));
}

ScanResult hom_scan(const Circuit &circuit, const DetectionPattern &pattern, const SourceModel &source,
                    const ScanConfig &scan, std::uint64_t stream) {
    if (scan.variable != SweepVariable::DelayUm) {
        throw InvalidArgument("hom_scan needs a delay_um sweep");
    }
    if (pattern.photon_number() != 2 || pattern.counts.size() != 2) {
        throw InvalidArgument("hom_scan needs a two-detector coincidence pattern");
    }
    return run_trace(circuit, pattern, source, scan, stream, 0.0);
}

FringeScan fringe_scan(const Circuit &circuit_template, const DetectionPattern &quantum_pattern,
                       const DetectionPattern &classical_pattern, const SourceModel &source, const ScanConfig &scan) {
    if (scan.variable != SweepVariable::HeaterMw) {
        throw InvalidArgument("fringe_scan needs a heater_mW sweep");
    }
    if (!(scan.p_pi_mw > 0.0)) {
        throw InvalidArgument("fringe_scan needs P_pi_mW > 0");
    }
    if (quantum_pattern.photon_number() != 2 || classical_pattern.photon_number() != 1) {
        throw InvalidArgument("fringe_scan needs a two-photon and a one-photon pattern");
    }
    return FringeScan{
        run_trace(circuit_template, quantum_pattern, source, scan, 0, scan.quantum_phase_offset_rad),
        run_trace(circuit_template, classical_pattern, source, scan, 1, scan.classical_phase_offset_rad)};
}

DetectionPattern Detection::pattern(const ModeRegistry &registry) const {
    DetectionPattern out;
    for (const auto &m : modes) {
        out.counts[registry.mode_index(m)] += 1;
    }
    return out;
}

std::vector<NamedScan> run_experiment(const Experiment &experiment) {
    std::vector<NamedScan> out;
    const auto &scan = experiment.scan;
    for (std::size_t k = 0; k < experiment.detections.size(); ++k) {
        const auto &det = experiment.detections[k];
        auto pattern = det.pattern(experiment.circuit.registry);
        double offset = 0.0;
        if (scan.variable == SweepVariable::HeaterMw) {
            offset = pattern.photon_number() == 2 ? scan.quantum_phase_offset_rad : scan.classical_phase_offset_rad;
        } else if (pattern.photon_number() != 2) {
            throw InvalidArgument("channel '" + det.name + "': delay scans need two-photon coincidence channels");
        }
        out.push_back(NamedScan{det.name, run_trace(experiment.circuit, pattern, experiment.source, scan, k, offset)});
    }
    return out;
}

std::vector<std::string> validate(const Experiment &experiment) {
    auto out = validate(experiment.circuit);
    const auto &registry = experiment.circuit.registry;
    if (experiment.circuit.inputs.size() < 2) {
        out.push_back("source needs two launch modes");
    }
    if (experiment.detections.empty()) {
        out.push_back("no detection channels");
    }
    for (const auto &det : experiment.detections) {
        for (const auto &m : det.modes) {
            auto idx = registry.find(m);
            if (!idx) {
                out.push_back("detection '" + det.name + "' on unregistered mode " + m.str());
            } else if (registry.is_loss(*idx)) {
                out.push_back("detection '" + det.name + "' on loss mode " + m.str());
            }
        }
        auto n = det.modes.size();
        if (n == 1 && experiment.scan.variable != SweepVariable::HeaterMw) {
            out.push_back("detection '" + det.name + "': single-photon channels need a heater_mW sweep");
        } else if (n != 1 && n != 2) {
            out.push_back("detection '" + det.name + "' must list one or two modes");
        }
    }
    try {
        experiment.source.check();
    } catch (const Error &e) {
        out.push_back(std::string("source: ") + e.what());
    }
    try {
        experiment.scan.check();
    } catch (const Error &e) {
        out.push_back(std::string("scan: ") + e.what());
    }
    return out;
}

std::optional<Sample> sample_from_string(std::string_view s) {
    for (auto sample : {Sample::Sample1, Sample::Sample2, Sample::Sample3, Sample::Sample4}) {
        if (to_string(sample) == s) {
            return sample;
        }
    }
    return std::nullopt;
}

std::string_view to_string(Sample s) {
    switch (s) {
        case Sample::Sample1:
            return "sample1";
        case Sample::Sample2:
            return "sample2";
        case Sample::Sample3:
            return "sample3";
        case Sample::Sample4:
            return "sample4";
    }
    return "?";
}

Experiment preset(Sample sample) {
    using namespace preset_defaults;
    Experiment e;
    e.name = std::string(to_string(sample));
    e.source.coherence_length_um = kCoherenceLengthUm;
    e.source.pair_rate_hz = 25000.0;
    e.source.accidental_rate_hz = 0.0;
    Circuit &c = e.circuit;
    const std::string p0 = "path0";
    const std::string p1 = "path1";

    switch (sample) {
        case Sample::Sample1: {
            // TE photon on path0, TM photon on path1; path0 becomes the
            // multimode bus after the PBS.
            register_all(c, {te(p0), tm(p1), tm(p0), te(p1), te(p0, 1)});
            c.add_stage(grating(te(p0)));
            c.add_stage(grating(tm(p1)));
            c.add_stage(stage(ElementKind::PBS, {}, {p0, p1, p0, p1}));
            c.add_stage(stage(ElementKind::ModeConverter, {}, {p0}));
            c.add_stage(multimode_section(p0, 870.0));
            c.add_stage(stage(ElementKind::ModeConverter, {}, {p0}));
            c.add_stage(stage(ElementKind::PBS, {}, {p0, p1, p0, p1}));
            c.add_stage(grating(te(p0)));
            c.add_stage(grating(tm(p1)));
            // Fiber BS after polarization controllers: interference on the
            // path degree of freedom of the two fiber outputs.
            c.add_analyzer_stage(splitter(te(p0), tm(p1)));
            c.inputs = {te(p0), tm(p1)};
            e.detections = {{"coinc", {te(p0), tm(p1)}}};
            e.source.base_overlap = overlap_for_dip_visibility(0.923);
            e.scan = delay_scan();
            break;
        }
        case Sample::Sample2: {
            register_all(c, {te(p0), te(p1), te(p1, 1)});
            c.add_stage(grating(te(p0)));
            c.add_stage(grating(te(p1)));
            c.add_stage(stage(ElementKind::ModeMux, {}, {p0, p1}));
            c.add_stage(multimode_section(p1, 30.0));
            c.add_stage(stage(ElementKind::ModeDemux, {}, {p0, p1}));
            c.add_stage(splitter(te(p0), te(p1)));
            c.add_stage(grating(te(p0)));
            c.add_stage(grating(te(p1)));
            c.inputs = {te(p0), te(p1)};
            e.detections = {{"coinc", {te(p0), te(p1)}}};
            e.source.base_overlap = overlap_for_dip_visibility(0.960);
            e.scan = delay_scan();
            break;
        }
        case Sample::Sample3: {
            register_all(c, {te(p0), te(p1), te(p1, 1)});
            c.add_stage(grating(te(p0)));
            c.add_stage(grating(te(p1)));
            c.add_stage(splitter(te(p0), te(p1)));
            c.add_stage(stage(ElementKind::ModeMux, {}, {p0, p1}));
            c.add_stage(multimode_section(p1, 30.0));
            c.add_stage(stage(ElementKind::ModeDemux, {}, {p0, p1}));
            c.add_stage(stage(ElementKind::PhaseShifter, {}, {p0}, {{"phase_rad", 0.0}, {"heater", 1.0}}));
            c.add_stage(splitter(te(p0), te(p1)));
            c.add_stage(grating(te(p0)));
            c.add_stage(grating(te(p1)));
            c.inputs = {te(p0), te(p1)};
            e.detections = {{"quantum", {te(p0), te(p1)}}, {"classical", {te(p0)}}};
            e.source.base_overlap = overlap_for_noon_visibility(0.903);
            e.scan.variable = SweepVariable::HeaterMw;
            e.scan.points = ScanConfig::grid(0.0, 150.0, 1.5);
            e.scan.integration_time_s = 10.0;
            e.scan.seed = 1;
            e.scan.p_pi_mw = kPiPowerMw;
            break;
        }
        case Sample::Sample4: {
            const std::string fte = "fiber_te";
            const std::string ftm = "fiber_tm";
            register_all(c, {te(p0), te(p1), te(p1, 1), tm(p1), tm(p0), te(fte), tm(ftm)});
            c.add_stage(grating(te(p0)));
            c.add_stage(grating(te(p1)));
            c.add_stage(splitter(te(p0), te(p1)));
            c.add_stage(stage(ElementKind::ModeMux, {}, {p0, p1}));
            c.add_stage(multimode_section(p1, 30.0));
            c.add_stage(stage(ElementKind::ModeConverter, {}, {p1}));
            c.add_stage(stage(ElementKind::PBS, {}, {p1, p0, p1, p0}));
            c.add_stage(grating(te(p1)));
            c.add_stage(grating(tm(p0)));
            // One fiber BS per chip output; the second input of each is vacuum.
            c.add_analyzer_stage(splitter(te(p1), te(fte)));
            c.add_analyzer_stage(splitter(tm(p0), tm(ftm)));
            c.inputs = {te(p0), te(p1)};
            e.detections = {{"te_out", {te(p1), te(fte)}}, {"tm_out", {tm(p0), tm(ftm)}}};
            e.source.base_overlap = overlap_for_peak_visibility((0.968 + 0.967) / 2.0);
            e.scan = delay_scan();
            e.scan.integration_time_s = 20.0;
            break;
        }
    }
    collect_detectors(e);
    return e;
}

}  // namespace qmodes
