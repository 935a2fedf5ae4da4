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

#ifndef QMODES_ELEMENTS_H_
#define QMODES_ELEMENTS_H_

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qmodes/modespace.h"

namespace qmodes {

using Complex = std::complex<double>;

/// Linear map on the full mode space of `domain`. Column j holds the output
/// amplitudes of a photon launched into mode j.
struct TransferMatrix {
    ModeRegistry domain;
    Eigen::MatrixXcd entries;

    std::size_t dim() const { return static_cast<std::size_t>(entries.rows()); }

    static TransferMatrix identity(const ModeRegistry &registry);

    /// max |(U^dagger U - I)_jk|.
    double unitarity_error() const;

    /// True when no amplitude couples a loss mode with a non-loss mode.
    bool is_loss_free(double tol = 1e-14) const;
};

/// Ordered product `later * earlier`. Throws InvalidArgument if the two
/// matrices act on different registries.
TransferMatrix operator*(const TransferMatrix &later, const TransferMatrix &earlier);

/// Phase convention of the 2x2 beam-splitter block.
///   Symmetric:    [[sqrt(r), i sqrt(1-r)], [i sqrt(1-r), sqrt(r)]]
///   RealRotation: [[sqrt(r), -sqrt(1-r)], [sqrt(1-r), sqrt(r)]]
/// The two differ only by the port phases diag(1, i), so detection
/// statistics of inputs with one photon per mode do not depend on the choice.
enum class BsConvention { Symmetric, RealRotation };

/// Transverse mode names ("TE0", "TE1", "TM0") to effective index.
using EffectiveIndices = std::map<std::string, double>;

std::string transverse_name(const ModeLabel &label);

TransferMatrix bs_matrix(const ModeRegistry &registry, const ModeLabel &a, const ModeLabel &b, double reflectivity,
                         BsConvention convention = BsConvention::Symmetric);

/// Bent-coupler PBS: TE passes bar (in_k -> out_k), TM0 crosses
/// (in_k -> out_{1-k}). Built as an involutive permutation, so when the
/// in and out ports differ, the reverse mapping out -> in is also present.
/// A non-zero `crosstalk` (radians) leaks TM into the bar port.
TransferMatrix pbs_matrix(const ModeRegistry &registry, const std::string &in0, const std::string &in1,
                          const std::string &out0, const std::string &out1, double crosstalk = 0.0);

/// Adiabatic-taper converter on one waveguide: TM0 <-> TE1, TE0 untouched.
TransferMatrix mode_converter_matrix(const ModeRegistry &registry, const std::string &port,
                                     double crosstalk = 0.0);

/// Asymmetric directional coupler: access TE0 <-> bus TE1, bus TE0 untouched.
/// The matrix is its own transpose, so the same call builds the demultiplexer.
TransferMatrix mode_mux_matrix(const ModeRegistry &registry, const std::string &access_port,
                               const std::string &bus_port, double crosstalk = 0.0);

/// exp(i 2 pi n_eff L / lambda) on every mode of `port`.
TransferMatrix propagation_matrix(const ModeRegistry &registry, const std::string &port, double length_um,
                                  double wavelength_nm, const EffectiveIndices &n_eff);

TransferMatrix phase_shifter_matrix(const ModeRegistry &registry, const std::string &port, double phase_rad);

/// Beam splitter between `mode` and the dedicated `loss_mode` with
/// transmission amplitude sqrt(efficiency).
TransferMatrix grating_coupler_matrix(const ModeRegistry &registry, const ModeLabel &mode, std::size_t loss_mode,
                                      double efficiency);

/// Registers a fresh loss mode for the coupler, then builds it.
TransferMatrix grating_coupler_matrix(ModeRegistry &registry, const ModeLabel &mode, double efficiency);

enum class ElementKind {
    BeamSplitter,
    PBS,
    ModeConverter,
    ModeMux,
    ModeDemux,
    Propagation,
    PhaseShifter,
    GratingCoupler,
};

/// File keyword for a kind ("bs", "pbs", "converter", ...).
std::string_view keyword(ElementKind kind);
std::optional<ElementKind> kind_from_keyword(std::string_view word);

/// One placed element. Operands are mode labels for BeamSplitter and
/// GratingCoupler, and port names for everything else:
///   BeamSplitter   modes {a, b}                 reflectivity
///   PBS            ports {in0, in1, out0, out1} crosstalk
///   ModeConverter  ports {port}                 crosstalk
///   ModeMux/Demux  ports {access, bus}          crosstalk
///   Propagation    ports {port}                 length_um wavelength_nm neff.<TE0|TE1|TM0>
///   PhaseShifter   ports {port}                 phase_rad heater
///   GratingCoupler modes {mode}                 efficiency
struct ElementSpec {
    ElementKind kind = ElementKind::BeamSplitter;
    std::vector<ModeLabel> modes;
    std::vector<std::string> ports;
    std::map<std::string, double> params;
    /// Set by Circuit for GratingCoupler stages.
    std::optional<std::size_t> loss_mode;

    double param(const std::string &key, double fallback) const;

    /// Short human-readable summary, e.g. "GratingTM" or "Propagation(870 um)".
    std::string describe() const;

    bool operator==(const ElementSpec &) const = default;
};

/// Parameter names accepted by each kind.
const std::vector<std::string> &allowed_params(ElementKind kind);

/// Range checks on parameters and operand counts. Returns one message per
/// problem; never throws.
std::vector<std::string> check_params(const ElementSpec &spec);

TransferMatrix build_element(const ModeRegistry &registry, const ElementSpec &spec,
                             BsConvention convention = BsConvention::Symmetric);

}  // namespace qmodes

#endif  // QMODES_ELEMENTS_H_
