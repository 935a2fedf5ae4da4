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

#ifndef QMODES_MODESPACE_H_
#define QMODES_MODESPACE_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qmodes {

enum class Polarization { TE, TM };

std::string_view to_string(Polarization pol);

/// A guided mode: spatial port, polarization, transverse order.
struct ModeLabel {
    std::string port;
    Polarization polarization = Polarization::TE;
    int transverse_order = 0;

    bool operator==(const ModeLabel &) const = default;

    /// Compact form used in files and diagnostics, e.g. "bus:TE1".
    std::string str() const;

    /// Inverse of str(). Throws InvalidArgument on malformed text.
    static ModeLabel parse(std::string_view text);
};

/// Insertion-ordered set of mode labels; a label's index never changes.
///
/// Loss modes are registry entries that carry light leaving the chip
/// (coupler losses). Each one is created by register_loss_mode(), is never
/// shared between elements, and can never be used as a detector.
class ModeRegistry {
   public:
    /// Returns the existing index when `label` is already present.
    /// Throws InvalidArgument for TM modes of order >= 1, negative orders,
    /// empty ports, and ports reserved for loss modes.
    std::size_t register_mode(const ModeLabel &label);

    /// Appends a fresh loss mode whose port name records `owner`.
    std::size_t register_loss_mode(std::string_view owner);

    /// Throws UnknownLabel naming the missing label.
    std::size_t mode_index(const ModeLabel &label) const;

    std::optional<std::size_t> find(const ModeLabel &label) const;
    bool contains(const ModeLabel &label) const { return find(label).has_value(); }
    bool has_port(std::string_view port) const;

    /// All registered indices on `port`, in index order.
    std::vector<std::size_t> modes_on_port(std::string_view port) const;

    const ModeLabel &label(std::size_t index) const { return labels_.at(index); }
    bool is_loss(std::size_t index) const { return loss_.at(index); }
    bool has_loss_modes() const;
    std::size_t size() const { return labels_.size(); }
    const std::vector<ModeLabel> &labels() const { return labels_; }

    bool operator==(const ModeRegistry &) const = default;

    static constexpr std::string_view kLossPrefix = "~loss";

   private:
    std::vector<ModeLabel> labels_;
    std::vector<bool> loss_;
};

}  // namespace qmodes

#endif  // QMODES_MODESPACE_H_
