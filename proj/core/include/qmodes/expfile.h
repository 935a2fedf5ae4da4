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

#ifndef QMODES_EXPFILE_H_
#define QMODES_EXPFILE_H_

#include <string>
#include <string_view>

#include "qmodes/experiments.h"

namespace qmodes {

/// Reads the sectioned experiment format:
///
///   [experiment]  name, bs_convention (symmetric | real)
///   [modes]       one label per line, e.g. path0:TE0
///   [stages]      "kind operand... key=value..." in propagation order
///   [analyzer]    off-chip stages, same syntax
///   [source]      s0, Lc_um, pair_rate_hz, accidental_hz, launch = <modes>
///   [scan]        variable, start/stop/step or points, integration_s, seed,
///                 P_pi_mW, quantum_phase_offset_rad, classical_phase_offset_rad
///   [detect]      <channel> = <modes>
///
/// '#' starts a comment. Throws ParseError (with line number) on syntax
/// errors, unknown sections, keys, element kinds or parameters. Semantic
/// checks (unregistered modes and so on) are left to validate().
Experiment parse_experiment(std::string_view text);

/// Throws Error when the file cannot be read.
Experiment load_experiment(const std::string &path);

/// Canonical text; parse_experiment(serialize_experiment(e)) == e for
/// experiments whose modes are registered before their stages.
std::string serialize_experiment(const Experiment &experiment);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double value);

}  // namespace qmodes

#endif  // QMODES_EXPFILE_H_
