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

#ifndef QMODES_TOOLS_CSV_H_
#define QMODES_TOOLS_CSV_H_

#include <iosfwd>
#include <map>
#include <string>

#include "qmodes/experiments.h"

namespace qmodes::cli {

/// Column header of every scan CSV.
inline constexpr const char *kCsvHeader = "sweep_value,expected_rate,counts,sigma";

/// A scan as stored on disk. `meta` holds the key=value pairs of the
/// leading '#' comment line (preset, channel, seed, variable,
/// integration_s).
struct ScanTable {
    std::map<std::string, std::string> meta;
    ScanResult scan;
};

/// Writes one metadata comment line, the header and one row per point.
/// Numbers use the shortest round-trip form; lines end in LF.
void write_scan_csv(std::ostream &out, const ScanTable &table);

/// Throws ParseError (with line number) on anything that does not follow
/// the write_scan_csv layout. A missing integration_s reads as 1 s.
ScanTable read_scan_csv(std::istream &in);

}  // namespace qmodes::cli

#endif  // QMODES_TOOLS_CSV_H_
