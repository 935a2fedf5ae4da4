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

#include "qmodes/elements.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>
#include <utility>

#include "qmodes/error.h"

namespace qmodes {
namespace {

constexpr Complex kI{0.0, 1.0};

void require_pair_distinct(std::size_t a, std::size_t b, const ModeRegistry &registry) {
    if (a == b) {
        throw InvalidArgument("element touches mode " + registry.label(a).str() + " twice");
    }
}

/// Identity except for the given index pairs, each of which gets the real
/// symmetric block [[sin e, cos e], [cos e, -sin e]]. With e = 0 this is an
/// exact swap. Pairs with equal members are fixed points.
TransferMatrix swap_network(const ModeRegistry &registry, std::vector<std::pair<std::size_t, std::size_t>> pairs,
                            double crosstalk) {
    TransferMatrix out = TransferMatrix::identity(registry);
    std::set<std::pair<std::size_t, std::size_t>> unique;
    for (auto [a, b] : pairs) {
        if (a == b) {
            continue;
        }
        unique.insert(std::minmax(a, b));
    }
    std::set<std::size_t> used;
    for (auto [a, b] : unique) {
        if (!used.insert(a).second || !used.insert(b).second) {
            throw InvalidArgument("port collision: mode " + registry.label(used.count(a) ? a : b).str() +
                                  " is routed twice");
        }
        double s = std::sin(crosstalk);
        double c = std::cos(crosstalk);
        out.entries(a, a) = s;
        out.entries(b, b) = -s;
        out.entries(a, b) = c;
        out.entries(b, a) = c;
    }
    return out;
}

ModeLabel on(const std::string &port, Polarization pol, int order) { return ModeLabel{port, pol, order}; }

void check_crosstalk(double crosstalk) {
    if (!std::isfinite(crosstalk) || std::abs(crosstalk) > std::numbers::pi / 2) {
        throw InvalidArgument("crosstalk angle must lie in [-pi/2, pi/2]");
    }
}

}  // namespace

TransferMatrix TransferMatrix::identity(const ModeRegistry &registry) {
    auto n = static_cast<Eigen::Index>(registry.size());
    return TransferMatrix{registry, Eigen::MatrixXcd::Identity(n, n)};
}

double TransferMatrix::unitarity_error() const {
    Eigen::MatrixXcd gram = entries.adjoint() * entries;
    gram -= Eigen::MatrixXcd::Identity(entries.cols(), entries.cols());
    return gram.cwiseAbs().maxCoeff();
}

bool TransferMatrix::is_loss_free(double tol) const {
    for (std::size_t r = 0; r < dim(); ++r) {
        for (std::size_t c = 0; c < dim(); ++c) {
            if (domain.is_loss(r) != domain.is_loss(c) &&
                std::abs(entries(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))) > tol) {
                return false;
            }
        }
    }
    return true;
}

TransferMatrix operator*(const TransferMatrix &later, const TransferMatrix &earlier) {
    if (!(later.domain == earlier.domain)) {
        throw InvalidArgument("dimension mismatch: transfer matrices act on different mode registries (" +
                              std::to_string(later.dim()) + " vs " + std::to_string(earlier.dim()) + " modes)");
    }
    return TransferMatrix{later.domain, later.entries * earlier.entries};
}

std::string transverse_name(const ModeLabel &label) {
    return std::string(to_string(label.polarization)) + std::to_string(label.transverse_order);
}

TransferMatrix bs_matrix(const ModeRegistry &registry, const ModeLabel &a, const ModeLabel &b, double reflectivity,
                         BsConvention convention) {
    if (!(reflectivity >= 0.0 && reflectivity <= 1.0)) {
        throw InvalidArgument("beam splitter reflectivity must lie in [0, 1]");
    }
    std::size_t ia = registry.mode_index(a);
    std::size_t ib = registry.mode_index(b);
    require_pair_distinct(ia, ib, registry);
    double r = std::sqrt(reflectivity);
    double t = std::sqrt(1.0 - reflectivity);
    TransferMatrix out = TransferMatrix::identity(registry);
    auto ea = static_cast<Eigen::Index>(ia);
    auto eb = static_cast<Eigen::Index>(ib);
    if (convention == BsConvention::Symmetric) {
        out.entries(ea, ea) = r;
        out.entries(eb, eb) = r;
        out.entries(ea, eb) = kI * t;
        out.entries(eb, ea) = kI * t;
    } else {
        out.entries(ea, ea) = r;
        out.entries(eb, eb) = r;
        out.entries(ea, eb) = -t;
        out.entries(eb, ea) = t;
    }
    return out;
}

TransferMatrix pbs_matrix(const ModeRegistry &registry, const std::string &in0, const std::string &in1,
                          const std::string &out0, const std::string &out1, double crosstalk) {
    if (in0 == in1 || out0 == out1) {
        throw InvalidArgument("port collision in PBS: input and output port pairs must be distinct");
    }
    check_crosstalk(crosstalk);
    const std::string ins[2] = {in0, in1};
    const std::string outs[2] = {out0, out1};
    std::vector<std::pair<std::size_t, std::size_t>> te_pairs;
    std::vector<std::pair<std::size_t, std::size_t>> tm_pairs;
    for (int k = 0; k < 2; ++k) {
        te_pairs.emplace_back(registry.mode_index(on(ins[k], Polarization::TE, 0)),
                              registry.mode_index(on(outs[k], Polarization::TE, 0)));
        tm_pairs.emplace_back(registry.mode_index(on(ins[k], Polarization::TM, 0)),
                              registry.mode_index(on(outs[1 - k], Polarization::TM, 0)));
    }
    TransferMatrix out = swap_network(registry, te_pairs, 0.0);

    // TM block: column in_k holds B(:, k) on (out0, out1), where
    // B = [[sin e, cos e], [cos e, -sin e]], so crosstalk leaks into the bar
    // port. With disjoint in/out ports the reverse routing is B^T.
    const double s = std::sin(crosstalk);
    const double c = std::cos(crosstalk);
    const double b[2][2] = {{s, c}, {c, -s}};
    std::size_t in_idx[2] = {tm_pairs[0].first, tm_pairs[1].first};
    std::size_t out_idx[2] = {tm_pairs[1].second, tm_pairs[0].second};
    std::set<std::size_t> ins_set(in_idx, in_idx + 2);
    std::set<std::size_t> outs_set(out_idx, out_idx + 2);
    bool same = ins_set == outs_set;
    bool disjoint = !ins_set.count(out_idx[0]) && !ins_set.count(out_idx[1]);
    if (!same && !disjoint) {
        throw InvalidArgument("port collision in PBS: output ports partially overlap the input ports");
    }
    for (std::size_t m : ins_set) {
        out.entries.col(static_cast<Eigen::Index>(m)).setZero();
    }
    for (std::size_t m : outs_set) {
        out.entries.col(static_cast<Eigen::Index>(m)).setZero();
    }
    for (int k = 0; k < 2; ++k) {
        for (int l = 0; l < 2; ++l) {
            auto o = static_cast<Eigen::Index>(out_idx[l]);
            auto i = static_cast<Eigen::Index>(in_idx[k]);
            out.entries(o, i) = b[l][k];
            if (disjoint) {
                out.entries(i, o) = b[l][k];
            }
        }
    }
    return out;
}

TransferMatrix mode_converter_matrix(const ModeRegistry &registry, const std::string &port, double crosstalk) {
    check_crosstalk(crosstalk);
    std::size_t tm0 = registry.mode_index(on(port, Polarization::TM, 0));
    std::size_t te1 = registry.mode_index(on(port, Polarization::TE, 1));
    return swap_network(registry, {{tm0, te1}}, crosstalk);
}

TransferMatrix mode_mux_matrix(const ModeRegistry &registry, const std::string &access_port,
                               const std::string &bus_port, double crosstalk) {
    if (access_port == bus_port) {
        throw InvalidArgument("mode multiplexer access and bus ports must differ");
    }
    check_crosstalk(crosstalk);
    std::size_t access = registry.mode_index(on(access_port, Polarization::TE, 0));
    std::size_t bus1 = registry.mode_index(on(bus_port, Polarization::TE, 1));
    registry.mode_index(on(bus_port, Polarization::TE, 0));
    return swap_network(registry, {{access, bus1}}, crosstalk);
}

TransferMatrix propagation_matrix(const ModeRegistry &registry, const std::string &port, double length_um,
                                  double wavelength_nm, const EffectiveIndices &n_eff) {
    if (!(length_um >= 0.0) || !std::isfinite(length_um)) {
        throw InvalidArgument("propagation length must be >= 0");
    }
    if (!(wavelength_nm > 0.0) || !std::isfinite(wavelength_nm)) {
        throw InvalidArgument("wavelength must be > 0");
    }
    auto modes = registry.modes_on_port(port);
    if (modes.empty()) {
        throw UnknownLabel("unknown port '" + port + "'");
    }
    TransferMatrix out = TransferMatrix::identity(registry);
    // um / nm -> factor 1000
    long double cycles_per_index = static_cast<long double>(length_um) * 1000.0L / wavelength_nm;
    for (std::size_t m : modes) {
        auto name = transverse_name(registry.label(m));
        auto it = n_eff.find(name);
        if (it == n_eff.end()) {
            throw InvalidArgument("missing effective index for " + registry.label(m).str());
        }
        long double cycles = static_cast<long double>(it->second) * cycles_per_index;
        double phase = static_cast<double>(2.0L * std::numbers::pi_v<long double> * std::fmod(cycles, 1.0L));
        auto e = static_cast<Eigen::Index>(m);
        out.entries(e, e) = std::polar(1.0, phase);
    }
    return out;
}

TransferMatrix phase_shifter_matrix(const ModeRegistry &registry, const std::string &port, double phase_rad) {
    auto modes = registry.modes_on_port(port);
    if (modes.empty()) {
        throw UnknownLabel("unknown port '" + port + "'");
    }
    TransferMatrix out = TransferMatrix::identity(registry);
    for (std::size_t m : modes) {
        auto e = static_cast<Eigen::Index>(m);
        out.entries(e, e) = std::polar(1.0, phase_rad);
    }
    return out;
}

TransferMatrix grating_coupler_matrix(const ModeRegistry &registry, const ModeLabel &mode, std::size_t loss_mode,
                                      double efficiency) {
    if (!(efficiency > 0.0 && efficiency <= 1.0)) {
        throw InvalidArgument("grating efficiency must lie in (0, 1]");
    }
    std::size_t idx = registry.mode_index(mode);
    if (loss_mode >= registry.size() || !registry.is_loss(loss_mode)) {
        throw InvalidArgument("grating coupler on " + mode.str() + " needs a dedicated loss mode");
    }
    double t = std::sqrt(efficiency);
    double r = std::sqrt(1.0 - efficiency);
    TransferMatrix out = TransferMatrix::identity(registry);
    auto a = static_cast<Eigen::Index>(idx);
    auto l = static_cast<Eigen::Index>(loss_mode);
    out.entries(a, a) = t;
    out.entries(l, l) = t;
    out.entries(a, l) = kI * r;
    out.entries(l, a) = kI * r;
    return out;
}

TransferMatrix grating_coupler_matrix(ModeRegistry &registry, const ModeLabel &mode, double efficiency) {
    // `mode` may refer into the registry, which registration can reallocate.
    const ModeLabel label = mode;
    registry.mode_index(label);
    std::size_t loss = registry.register_loss_mode(label.str());
    return grating_coupler_matrix(registry, label, loss, efficiency);
}

std::string_view keyword(ElementKind kind) {
    switch (kind) {
        case ElementKind::BeamSplitter:
            return "bs";
        case ElementKind::PBS:
            return "pbs";
        case ElementKind::ModeConverter:
            return "converter";
        case ElementKind::ModeMux:
            return "mux";
        case ElementKind::ModeDemux:
            return "demux";
        case ElementKind::Propagation:
            return "propagate";
        case ElementKind::PhaseShifter:
            return "phase";
        case ElementKind::GratingCoupler:
            return "grating";
    }
    return "?";
}

std::optional<ElementKind> kind_from_keyword(std::string_view word) {
    for (auto kind : {ElementKind::BeamSplitter, ElementKind::PBS, ElementKind::ModeConverter, ElementKind::ModeMux,
                      ElementKind::ModeDemux, ElementKind::Propagation, ElementKind::PhaseShifter,
                      ElementKind::GratingCoupler}) {
        if (keyword(kind) == word) {
            return kind;
        }
    }
    return std::nullopt;
}

double ElementSpec::param(const std::string &key, double fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

std::string ElementSpec::describe() const {
    std::ostringstream os;
    switch (kind) {
        case ElementKind::BeamSplitter:
            os << "BeamSplitter";
            break;
        case ElementKind::PBS:
            os << "PBS";
            break;
        case ElementKind::ModeConverter:
            os << "ModeConverter";
            break;
        case ElementKind::ModeMux:
            os << "ModeMux";
            break;
        case ElementKind::ModeDemux:
            os << "ModeDemux";
            break;
        case ElementKind::Propagation:
            os << "Propagation(" << param("length_um", 0.0) << " um)";
            break;
        case ElementKind::PhaseShifter:
            os << "PhaseShifter";
            break;
        case ElementKind::GratingCoupler:
            os << "Grating" << (modes.empty() ? "" : to_string(modes.front().polarization));
            break;
    }
    return os.str();
}

const std::vector<std::string> &allowed_params(ElementKind kind) {
    static const std::vector<std::string> bs{"reflectivity"};
    static const std::vector<std::string> permutation{"crosstalk"};
    static const std::vector<std::string> propagate{"length_um", "wavelength_nm", "neff.TE0", "neff.TE1", "neff.TM0"};
    static const std::vector<std::string> phase{"phase_rad", "heater"};
    static const std::vector<std::string> grating{"efficiency"};
    switch (kind) {
        case ElementKind::BeamSplitter:
            return bs;
        case ElementKind::PBS:
        case ElementKind::ModeConverter:
        case ElementKind::ModeMux:
        case ElementKind::ModeDemux:
            return permutation;
        case ElementKind::Propagation:
            return propagate;
        case ElementKind::PhaseShifter:
            return phase;
        case ElementKind::GratingCoupler:
            return grating;
    }
    return bs;
}

std::vector<std::string> check_params(const ElementSpec &spec) {
    std::vector<std::string> problems;
    auto name = std::string(keyword(spec.kind));
    const auto &allowed = allowed_params(spec.kind);
    for (const auto &[key, value] : spec.params) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            problems.push_back(name + ": unknown parameter '" + key + "'");
        } else if (!std::isfinite(value)) {
            problems.push_back(name + ": parameter '" + key + "' is not finite");
        }
    }
    std::size_t want_modes = 0;
    std::size_t want_ports = 0;
    switch (spec.kind) {
        case ElementKind::BeamSplitter:
            want_modes = 2;
            break;
        case ElementKind::GratingCoupler:
            want_modes = 1;
            break;
        case ElementKind::PBS:
            want_ports = 4;
            break;
        case ElementKind::ModeMux:
        case ElementKind::ModeDemux:
            want_ports = 2;
            break;
        case ElementKind::ModeConverter:
        case ElementKind::Propagation:
        case ElementKind::PhaseShifter:
            want_ports = 1;
            break;
    }
    if (spec.modes.size() != want_modes || spec.ports.size() != want_ports) {
        problems.push_back(name + ": expected " +
                           (want_modes ? std::to_string(want_modes) + " mode operand(s)"
                                       : std::to_string(want_ports) + " port operand(s)"));
    }
    auto in_range = [&](const char *key, double lo, double hi, bool lo_open, bool required) {
        auto it = spec.params.find(key);
        if (it == spec.params.end()) {
            if (required) {
                problems.push_back(name + ": missing parameter '" + key + "'");
            }
            return;
        }
        double v = it->second;
        bool ok = (lo_open ? v > lo : v >= lo) && v <= hi;
        if (!ok) {
            std::ostringstream os;
            os << name << ": parameter '" << key << "' = " << v << " out of range " << (lo_open ? "(" : "[") << lo
               << ", " << hi << "]";
            problems.push_back(os.str());
        }
    };
    constexpr double kInf = std::numeric_limits<double>::infinity();
    switch (spec.kind) {
        case ElementKind::BeamSplitter:
            in_range("reflectivity", 0.0, 1.0, false, false);
            break;
        case ElementKind::GratingCoupler:
            in_range("efficiency", 0.0, 1.0, true, true);
            break;
        case ElementKind::Propagation:
            in_range("length_um", 0.0, kInf, false, true);
            in_range("wavelength_nm", 0.0, kInf, true, true);
            break;
        case ElementKind::PBS:
        case ElementKind::ModeConverter:
        case ElementKind::ModeMux:
        case ElementKind::ModeDemux:
            in_range("crosstalk", -std::numbers::pi / 2, std::numbers::pi / 2, false, false);
            break;
        case ElementKind::PhaseShifter:
            break;
    }
    return problems;
}

TransferMatrix build_element(const ModeRegistry &registry, const ElementSpec &spec, BsConvention convention) {
    if (auto problems = check_params(spec); !problems.empty()) {
        throw InvalidArgument(problems.front());
    }
    double crosstalk = spec.param("crosstalk", 0.0);
    switch (spec.kind) {
        case ElementKind::BeamSplitter:
            return bs_matrix(registry, spec.modes[0], spec.modes[1], spec.param("reflectivity", 0.5), convention);
        case ElementKind::PBS:
            return pbs_matrix(registry, spec.ports[0], spec.ports[1], spec.ports[2], spec.ports[3], crosstalk);
        case ElementKind::ModeConverter:
            return mode_converter_matrix(registry, spec.ports[0], crosstalk);
        case ElementKind::ModeMux:
        case ElementKind::ModeDemux:
            return mode_mux_matrix(registry, spec.ports[0], spec.ports[1], crosstalk);
        case ElementKind::Propagation: {
            EffectiveIndices n_eff;
            for (const auto &[key, value] : spec.params) {
                if (key.starts_with("neff.")) {
                    n_eff[key.substr(5)] = value;
                }
            }
            return propagation_matrix(registry, spec.ports[0], spec.param("length_um", 0.0),
                                      spec.param("wavelength_nm", 0.0), n_eff);
        }
        case ElementKind::PhaseShifter:
            return phase_shifter_matrix(registry, spec.ports[0], spec.param("phase_rad", 0.0));
        case ElementKind::GratingCoupler:
            if (!spec.loss_mode) {
                throw InvalidArgument("grating coupler on " + spec.modes[0].str() + " has no loss mode assigned");
            }
            return grating_coupler_matrix(registry, spec.modes[0], *spec.loss_mode, spec.param("efficiency", 1.0));
    }
    throw InvalidArgument("unhandled element kind");
}

}  // namespace qmodes
