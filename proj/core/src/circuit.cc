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

#include "qmodes/circuit.h"

#include <sstream>

#include "qmodes/error.h"

namespace qmodes {
namespace {

void assign_loss_mode(ModeRegistry &registry, ElementSpec &spec) {
    if (spec.kind == ElementKind::GratingCoupler && !spec.loss_mode) {
        std::string owner = spec.modes.empty() ? "grating" : spec.modes.front().str();
        spec.loss_mode = registry.register_loss_mode(owner);
    }
}

/// Ports and modes the stage refers to, for diagnostics.
std::vector<std::string> unresolved_operands(const ModeRegistry &registry, const ElementSpec &spec) {
    std::vector<std::string> out;
    for (const auto &port : spec.ports) {
        if (!registry.has_port(port)) {
            out.push_back("unknown port '" + port + "'");
        }
    }
    for (const auto &mode : spec.modes) {
        if (!registry.has_port(mode.port)) {
            out.push_back("unknown port '" + mode.port + "'");
        } else if (!registry.contains(mode)) {
            out.push_back("unregistered mode " + mode.str());
        }
    }
    return out;
}

}  // namespace

Circuit &Circuit::add_stage(ElementSpec spec) {
    assign_loss_mode(registry, spec);
    stages.push_back(std::move(spec));
    return *this;
}

Circuit &Circuit::add_analyzer_stage(ElementSpec spec) {
    assign_loss_mode(registry, spec);
    analyzer.push_back(std::move(spec));
    return *this;
}

TransferMatrix compile(const Circuit &circuit) {
    TransferMatrix total = TransferMatrix::identity(circuit.registry);
    for (const auto *list : {&circuit.stages, &circuit.analyzer}) {
        for (const auto &stage : *list) {
            if (auto missing = unresolved_operands(circuit.registry, stage); !missing.empty()) {
                throw UnknownLabel(std::string(keyword(stage.kind)) + ": " + missing.front());
            }
            total = build_element(circuit.registry, stage, circuit.bs_convention) * total;
        }
    }
    return total;
}

TransferMatrix compose(std::span<const TransferMatrix> chain) {
    if (chain.empty()) {
        throw InvalidArgument("cannot compose an empty chain without a registry");
    }
    TransferMatrix total = chain.front();
    for (std::size_t i = 1; i < chain.size(); ++i) {
        total = chain[i] * total;
    }
    return total;
}

std::vector<std::string> validate(const Circuit &circuit) {
    std::vector<std::string> out;
    const auto &registry = circuit.registry;
    int stage_no = 0;
    for (const auto *list : {&circuit.stages, &circuit.analyzer}) {
        const char *where = list == &circuit.stages ? "stage" : "analyzer stage";
        for (const auto &stage : *list) {
            ++stage_no;
            std::string prefix = std::string(where) + " " + std::to_string(stage_no) + " (" +
                                 std::string(keyword(stage.kind)) + "): ";
            auto problems = check_params(stage);
            for (auto &p : problems) {
                out.push_back(prefix + p);
            }
            auto missing = unresolved_operands(registry, stage);
            for (auto &m : missing) {
                out.push_back(prefix + m);
            }
            if (!problems.empty() || !missing.empty()) {
                continue;
            }
            try {
                auto u = build_element(registry, stage, circuit.bs_convention);
                if (double err = u.unitarity_error(); err > 1e-10) {
                    std::ostringstream os;
                    os << prefix << "non-unitary stage (max |U^dagger U - I| = " << err << ")";
                    out.push_back(os.str());
                }
            } catch (const Error &e) {
                out.push_back(prefix + e.what());
            }
        }
    }
    auto check_modes = [&](const std::vector<ModeLabel> &labels, const char *role) {
        for (const auto &label : labels) {
            auto idx = registry.find(label);
            if (label.port.starts_with(ModeRegistry::kLossPrefix) || (idx && registry.is_loss(*idx))) {
                out.push_back(std::string(role) + " on loss mode " + label.str());
            } else if (!idx) {
                out.push_back(std::string(role) + " on unregistered mode " + label.str());
            }
        }
    };
    check_modes(circuit.inputs, "input");
    check_modes(circuit.detectors, "detector");
    return out;
}

}  // namespace qmodes
