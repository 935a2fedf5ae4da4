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

#ifndef QMODES_TOOLS_COMMANDS_H_
#define QMODES_TOOLS_COMMANDS_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace qmodes::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
    kOk = 0,
    kIoError = 1,
    kInvalidInput = 2,
    kFitRejected = 3,
};

/// Reduced chi-square above which a fit is reported as a model mismatch.
inline constexpr double kChi2Flag = 3.0;

struct RunOptions {
    std::optional<std::string> path;
    std::optional<std::string> preset;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
};

struct FitOptions {
    std::string csv;
    std::string model = "triangle";
    double background_hz = 0.0;
};

int cmd_validate(const std::string &path, std::ostream &err);
int cmd_run(const RunOptions &options, std::ostream &err);
int cmd_fit(const FitOptions &options, std::ostream &out, std::ostream &err);
/// Prints the canonical experiment file of a preset.
int cmd_preset(const std::string &name, std::ostream &out, std::ostream &err);

/// Argument parsing and dispatch; usage errors exit with kInvalidInput.
int run_main(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace qmodes::cli

#endif  // QMODES_TOOLS_COMMANDS_H_
