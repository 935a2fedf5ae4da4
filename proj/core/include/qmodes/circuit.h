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

#ifndef QMODES_CIRCUIT_H_
#define QMODES_CIRCUIT_H_

#include <span>
#include <string>
#include <vector>

#include "qmodes/elements.h"
#include "qmodes/modespace.h"

namespace qmodes {

/// Feed-forward chain of elements over one mode registry.
///
/// `stages` is the on-chip chain; `analyzer` holds off-chip detection optics
/// (e.g. the fiber beam splitter of an external HOM test), applied after the
/// chip. Both are multiplied in listed order; nothing is reordered.
struct Circuit {
    ModeRegistry registry;
    std::vector<ElementSpec> stages;
    std::vector<ElementSpec> analyzer;
    /// Modes the photon source launches into, in photon order.
    std::vector<ModeLabel> inputs;
    /// Modes watched by detectors.
    std::vector<ModeLabel> detectors;
    BsConvention bs_convention = BsConvention::Symmetric;

    /// Appends a stage, registering a dedicated loss mode for gratings.
    Circuit &add_stage(ElementSpec spec);
    Circuit &add_analyzer_stage(ElementSpec spec);

    bool operator==(const Circuit &) const = default;
};

/// U = U_n ... U_1 over stages then analyzer. Throws on an unresolved port,
/// an ill-formed stage, or a registry changed since a loss mode was assigned.
TransferMatrix compile(const Circuit &circuit);

/// Product of pre-built matrices, first element applied first.
TransferMatrix compose(std::span<const TransferMatrix> chain);

/// Human-readable problems; empty for a well-formed circuit.
std::vector<std::string> validate(const Circuit &circuit);

}  // namespace qmodes

#endif  // QMODES_CIRCUIT_H_
