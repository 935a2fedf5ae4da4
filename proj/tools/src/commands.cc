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

#include "commands.h"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <utility>
#include <vector>

#include "csv.h"
#include "qmodes/analysis.h"
#include "qmodes/error.h"
#include "qmodes/expfile.h"

namespace qmodes::cli {
namespace {

namespace fs = std::filesystem;

/// Loads an experiment file, mapping failures onto exit codes.
std::optional<Experiment> load(const std::string &path, std::ostream &err, int &code) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        err << "error: cannot read '" << path << "'\n";
        code = kIoError;
        return std::nullopt;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_experiment(buf.str());
    } catch (const ParseError &e) {
        err << path << ": " << e.what() << '\n';
    } catch (const Error &e) {
        err << path << ": " << e.what() << '\n';
    }
    code = kInvalidInput;
    return std::nullopt;
}

std::string channel_path(const std::string &out, const std::string &channel) {
    fs::path p(out);
    fs::path name = p.stem();
    name += "_" + channel;
    name += p.extension();
    return (p.parent_path() / name).string();
}

void print_param(std::ostream &out, const std::string &name, double value, double sigma) {
    out << name << ' ' << format_number(value) << ' ' << format_number(sigma) << '\n';
}

}  // namespace

int cmd_validate(const std::string &path, std::ostream &err) {
    int code = kOk;
    auto experiment = load(path, err, code);
    if (!experiment) {
        return code;
    }
    auto diagnostics = validate(*experiment);
    for (const auto &d : diagnostics) {
        err << d << '\n';
    }
    return diagnostics.empty() ? kOk : kInvalidInput;
}

int cmd_run(const RunOptions &options, std::ostream &err) {
    if (options.path.has_value() == options.preset.has_value()) {
        err << "error: give exactly one of an experiment file or --preset\n";
        return kInvalidInput;
    }
    Experiment experiment;
    if (options.preset) {
        auto sample = sample_from_string(*options.preset);
        if (!sample) {
            err << "error: unknown preset '" << *options.preset << "'\n";
            return kInvalidInput;
        }
        experiment = preset(*sample);
    } else {
        int code = kOk;
        auto loaded = load(*options.path, err, code);
        if (!loaded) {
            return code;
        }
        experiment = std::move(*loaded);
    }
    if (options.seed) {
        experiment.scan.seed = *options.seed;
    }
    if (options.threads) {
        experiment.scan.threads = *options.threads;
    }
    auto diagnostics = validate(experiment);
    if (!diagnostics.empty()) {
        for (const auto &d : diagnostics) {
            err << d << '\n';
        }
        return kInvalidInput;
    }

    std::vector<NamedScan> traces;
    try {
        traces = run_experiment(experiment);
    } catch (const Error &e) {
        err << "error: " << e.what() << '\n';
        return kInvalidInput;
    }

    const std::string name = experiment.name.empty() ? std::string("unnamed") : experiment.name;
    for (const auto &trace : traces) {
        ScanTable table;
        table.meta["preset"] = name;
        table.meta["channel"] = trace.channel;
        table.meta["seed"] = std::to_string(experiment.scan.seed);
        table.meta["variable"] = std::string(to_string(experiment.scan.variable));
        table.meta["integration_s"] = format_number(experiment.scan.integration_time_s);
        table.scan = trace.result;

        std::string target = traces.size() == 1 ? options.out : channel_path(options.out, trace.channel);
        std::ofstream file(target, std::ios::binary | std::ios::trunc);
        if (!file) {
            err << "error: cannot write '" << target << "'\n";
            return kIoError;
        }
        write_scan_csv(file, table);
        file.flush();
        if (!file) {
            err << "error: write failed for '" << target << "'\n";
            return kIoError;
        }
    }
    return kOk;
}

int cmd_fit(const FitOptions &options, std::ostream &out, std::ostream &err) {
    std::ifstream in(options.csv, std::ios::binary);
    if (!in) {
        err << "error: cannot read '" << options.csv << "'\n";
        return kIoError;
    }
    ScanTable table;
    try {
        table = read_scan_csv(in);
    } catch (const ParseError &e) {
        err << options.csv << ": " << e.what() << '\n';
        return kInvalidInput;
    }
    if (options.model != "triangle" && options.model != "fringe") {
        err << "error: unknown model '" << options.model << "'\n";
        return kInvalidInput;
    }
    const bool triangle = options.model == "triangle";

    ScanResult corrected;
    try {
        corrected = subtract_background(table.scan, options.background_hz);
    } catch (const Error &e) {
        err << "error: " << e.what() << '\n';
        return kInvalidInput;
    }

    FitResult raw;
    FitResult sub;
    try {
        raw = triangle ? fit_triangle(table.scan) : fit_fringe(table.scan);
        if (options.background_hz == 0.0) {
            sub = raw;
        } else if (triangle) {
            sub = fit_triangle(corrected, raw.orientation);
        } else {
            sub = fit_fringe(corrected);
        }
    } catch (const FitFailure &e) {
        err << "fit failed: " << e.what() << '\n';
        return kFitRejected;
    }

    if (triangle) {
        const std::string v = raw.orientation == Orientation::Dip ? "V1" : "V2";
        print_param(out, "C0", raw.value("C0"), raw.sigma("C0"));
        print_param(out, v, raw.value("V"), raw.sigma("V"));
        print_param(out, "Lc_um", raw.value("Lc"), raw.sigma("Lc"));
        print_param(out, "delta0_um", raw.value("delta0"), raw.sigma("delta0"));
        print_param(out, "chi2_reduced", raw.chi2_reduced, 0.0);
        print_param(out, v + "_bgsub", sub.value("V"), sub.sigma("V"));
    } else {
        for (const auto &p : raw.params) {
            print_param(out, p.name, p.value, p.sigma);
        }
        print_param(out, "chi2_reduced", raw.chi2_reduced, 0.0);
        print_param(out, "visibility_bgsub", sub.value("visibility"), sub.sigma("visibility"));
    }

    if (raw.chi2_reduced > kChi2Flag) {
        err << "fit rejected: reduced chi-square " << format_number(raw.chi2_reduced) << " exceeds "
            << format_number(kChi2Flag) << " (model does not describe the data)\n";
        return kFitRejected;
    }
    return kOk;
}

int cmd_preset(const std::string &name, std::ostream &out, std::ostream &err) {
    auto sample = sample_from_string(name);
    if (!sample) {
        err << "error: unknown preset '" << name << "'\n";
        return kInvalidInput;
    }
    out << serialize_experiment(preset(*sample));
    return kOk;
}

int run_main(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Simulate and analyse multi-degree-of-freedom linear-optical circuits"};
    app.require_subcommand(1);

    std::string validate_path;
    auto *validate_cmd = app.add_subcommand("validate", "Check an experiment file");
    validate_cmd->add_option("path", validate_path, "Experiment file")->required();

    RunOptions run;
    std::string run_path;
    std::string run_preset;
    std::uint64_t run_seed = 0;
    int run_threads = 1;
    auto *run_cmd = app.add_subcommand("run", "Simulate a scan and write CSV");
    auto *run_path_opt = run_cmd->add_option("path", run_path, "Experiment file");
    auto *run_preset_opt = run_cmd->add_option("--preset", run_preset, "sample1 .. sample4");
    run_cmd->add_option("--out", run.out, "CSV path; channels get a _<name> suffix")->required();
    auto *run_seed_opt = run_cmd->add_option("--seed", run_seed, "Override the scan seed");
    auto *run_threads_opt =
        run_cmd->add_option("--threads", run_threads, "Worker threads")->check(CLI::Range(1, 1024));

    FitOptions fit;
    auto *fit_cmd = app.add_subcommand("fit", "Fit a scan CSV");
    fit_cmd->add_option("csv", fit.csv, "CSV written by run")->required();
    fit_cmd->add_option("--model", fit.model, "triangle or fringe")
        ->check(CLI::IsMember({"triangle", "fringe"}));
    fit_cmd->add_option("--background", fit.background_hz, "Accidental rate to subtract, in Hz");

    std::string preset_name;
    auto *preset_cmd = app.add_subcommand("preset", "Print a preset experiment file");
    preset_cmd->add_option("name", preset_name, "sample1 .. sample4")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp &) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << '\n';
        return kInvalidInput;
    }

    if (*validate_cmd) {
        return cmd_validate(validate_path, err);
    }
    if (*run_cmd) {
        if (*run_path_opt) {
            run.path = run_path;
        }
        if (*run_preset_opt) {
            run.preset = run_preset;
        }
        if (*run_seed_opt) {
            run.seed = run_seed;
        }
        if (*run_threads_opt) {
            run.threads = run_threads;
        }
        return cmd_run(run, err);
    }
    if (*fit_cmd) {
        return cmd_fit(fit, out, err);
    }
    return cmd_preset(preset_name, out, err);
}

}  // namespace qmodes::cli
