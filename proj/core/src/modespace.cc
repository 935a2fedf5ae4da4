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

#include "qmodes/modespace.h"

#include <algorithm>
#include <charconv>

#include "qmodes/error.h"

namespace qmodes {

std::string_view to_string(Polarization pol) { return pol == Polarization::TE ? "TE" : "TM"; }

std::string ModeLabel::str() const {
    return port + ":" + std::string(to_string(polarization)) + std::to_string(transverse_order);
}

ModeLabel ModeLabel::parse(std::string_view text) {
    auto colon = text.rfind(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 3 > text.size()) {
        throw InvalidArgument("malformed mode label '" + std::string(text) + "' (expected port:TE0)");
    }
    ModeLabel out;
    out.port = std::string(text.substr(0, colon));
    auto pol = text.substr(colon + 1, 2);
    if (pol == "TE") {
        out.polarization = Polarization::TE;
    } else if (pol == "TM") {
        out.polarization = Polarization::TM;
    } else {
        throw InvalidArgument("malformed polarization in mode label '" + std::string(text) + "'");
    }
    auto order = text.substr(colon + 3);
    auto [ptr, ec] = std::from_chars(order.data(), order.data() + order.size(), out.transverse_order);
    if (ec != std::errc() || ptr != order.data() + order.size()) {
        throw InvalidArgument("malformed transverse order in mode label '" + std::string(text) + "'");
    }
    return out;
}

std::size_t ModeRegistry::register_mode(const ModeLabel &label) {
    if (label.port.empty()) {
        throw InvalidArgument("mode label has an empty port");
    }
    if (label.port.starts_with(kLossPrefix)) {
        throw InvalidArgument("port name '" + label.port + "' is reserved for loss modes");
    }
    if (label.transverse_order < 0) {
        throw InvalidArgument("negative transverse order in " + label.str());
    }
    if (label.polarization == Polarization::TM && label.transverse_order >= 1) {
        throw InvalidArgument("unsupported mode " + label.str() + ": only TM0 is modeled");
    }
    if (auto existing = find(label)) {
        return *existing;
    }
    labels_.push_back(label);
    loss_.push_back(false);
    return labels_.size() - 1;
}

std::size_t ModeRegistry::register_loss_mode(std::string_view owner) {
    ModeLabel label{std::string(kLossPrefix) + std::to_string(labels_.size()) + "." + std::string(owner),
                    Polarization::TE, 0};
    labels_.push_back(std::move(label));
    loss_.push_back(true);
    return labels_.size() - 1;
}

std::optional<std::size_t> ModeRegistry::find(const ModeLabel &label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - labels_.begin());
}

std::size_t ModeRegistry::mode_index(const ModeLabel &label) const {
    if (auto idx = find(label)) {
        return *idx;
    }
    throw UnknownLabel("unknown mode " + label.str());
}

bool ModeRegistry::has_port(std::string_view port) const {
    return std::any_of(labels_.begin(), labels_.end(), [&](const ModeLabel &l) { return l.port == port; });
}

std::vector<std::size_t> ModeRegistry::modes_on_port(std::string_view port) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i].port == port) {
            out.push_back(i);
        }
    }
    return out;
}

bool ModeRegistry::has_loss_modes() const { return std::find(loss_.begin(), loss_.end(), true) != loss_.end(); }

}  // namespace qmodes
