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

#include "qmodes/expfile.h"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "qmodes/error.h"

namespace qmodes {
namespace {

std::string_view trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == ',')) {
            ++i;
        }
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != ',') {
            ++j;
        }
        if (j > i) {
            out.push_back(s.substr(i, j - i));
        }
        i = j;
    }
    return out;
}

double parse_double(std::string_view text, int line, std::string_view what) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw ParseError(line, "invalid number '" + std::string(text) + "' for " + std::string(what));
    }
    return v;
}

std::uint64_t parse_u64(std::string_view text, int line, std::string_view what) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw ParseError(line, "invalid integer '" + std::string(text) + "' for " + std::string(what));
    }
    return v;
}

ModeLabel parse_label(std::string_view text, int line) {
    try {
        return ModeLabel::parse(text);
    } catch (const InvalidArgument &e) {
        throw ParseError(line, e.what());
    }
}

std::vector<ModeLabel> parse_labels(std::string_view text, int line) {
    std::vector<ModeLabel> out;
    for (auto tok : split_ws(text)) {
        out.push_back(parse_label(tok, line));
    }
    return out;
}

bool takes_modes(ElementKind kind) {
    return kind == ElementKind::BeamSplitter || kind == ElementKind::GratingCoupler;
}

ElementSpec parse_stage(std::string_view body, int line) {
    auto tokens = split_ws(body);
    auto kind = kind_from_keyword(tokens.front());
    if (!kind) {
        throw ParseError(line, "unknown element kind '" + std::string(tokens.front()) + "'");
    }
    ElementSpec spec;
    spec.kind = *kind;
    const auto &allowed = allowed_params(spec.kind);
    for (std::size_t i = 1; i < tokens.size(); ++i) {
        auto tok = tokens[i];
        auto eq = tok.find('=');
        if (eq == std::string_view::npos) {
            if (takes_modes(spec.kind)) {
                spec.modes.push_back(parse_label(tok, line));
            } else {
                if (tok.find(':') != std::string_view::npos) {
                    throw ParseError(line, std::string(keyword(spec.kind)) + " takes port names, not mode label '" +
                                               std::string(tok) + "'");
                }
                spec.ports.emplace_back(tok);
            }
            continue;
        }
        std::string key(tok.substr(0, eq));
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ParseError(line, "unknown parameter '" + key + "' for " + std::string(keyword(spec.kind)));
        }
        if (spec.params.count(key)) {
            throw ParseError(line, "duplicate parameter '" + key + "'");
        }
        spec.params[key] = parse_double(tok.substr(eq + 1), line, key);
    }
    return spec;
}

struct KeyValue {
    std::string key;
    std::string_view value;
    int line;
};

}  // namespace

std::string format_number(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

Experiment parse_experiment(std::string_view text) {
    std::string section;
    std::vector<std::pair<ModeLabel, int>> modes;
    std::vector<std::pair<ElementSpec, int>> stages;
    std::vector<std::pair<ElementSpec, int>> analyzer;
    std::map<std::string, std::vector<KeyValue>> kv;
    std::vector<std::string> detect_order;
    const std::set<std::string> known_sections{"experiment", "modes", "stages", "analyzer",
                                               "source",     "scan",  "detect"};

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        auto hash = raw.find('#');
        auto line = trim(raw.substr(0, hash));
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ParseError(line_no, "malformed section header '" + std::string(line) + "'");
            }
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (!known_sections.count(section)) {
                throw ParseError(line_no, "unknown section [" + section + "]");
            }
            continue;
        }
        if (section.empty()) {
            throw ParseError(line_no, "content before the first section header");
        }
        if (section == "modes") {
            for (auto tok : split_ws(line)) {
                modes.emplace_back(parse_label(tok, line_no), line_no);
            }
        } else if (section == "stages") {
            stages.emplace_back(parse_stage(line, line_no), line_no);
        } else if (section == "analyzer") {
            analyzer.emplace_back(parse_stage(line, line_no), line_no);
        } else {
            auto eq = line.find('=');
            if (eq == std::string_view::npos) {
                throw ParseError(line_no, "expected 'key = value' in [" + section + "]");
            }
            std::string key(trim(line.substr(0, eq)));
            auto value = trim(line.substr(eq + 1));
            if (key.empty()) {
                throw ParseError(line_no, "empty key in [" + section + "]");
            }
            for (const auto &existing : kv[section]) {
                if (existing.key == key) {
                    throw ParseError(line_no, "duplicate key '" + key + "' in [" + section + "]");
                }
            }
            kv[section].push_back(KeyValue{key, value, line_no});
        }
    }

    Experiment e;
    Circuit &c = e.circuit;
    for (const auto &item : kv["experiment"]) {
        if (item.key == "name") {
            e.name = std::string(item.value);
        } else if (item.key == "bs_convention") {
            if (item.value == "symmetric") {
                c.bs_convention = BsConvention::Symmetric;
            } else if (item.value == "real") {
                c.bs_convention = BsConvention::RealRotation;
            } else {
                throw ParseError(item.line, "bs_convention must be 'symmetric' or 'real'");
            }
        } else {
            throw ParseError(item.line, "unknown key '" + item.key + "' in [experiment]");
        }
    }
    for (const auto &[label, line] : modes) {
        if (c.registry.contains(label)) {
            throw ParseError(line, "duplicate mode " + label.str());
        }
        try {
            c.registry.register_mode(label);
        } catch (const InvalidArgument &err) {
            throw ParseError(line, err.what());
        }
    }
    for (auto &[spec, line] : stages) {
        c.add_stage(std::move(spec));
    }
    for (auto &[spec, line] : analyzer) {
        c.add_analyzer_stage(std::move(spec));
    }

    for (const auto &item : kv["source"]) {
        if (item.key == "s0") {
            e.source.base_overlap = parse_double(item.value, item.line, item.key);
        } else if (item.key == "Lc_um") {
            e.source.coherence_length_um = parse_double(item.value, item.line, item.key);
        } else if (item.key == "pair_rate_hz") {
            e.source.pair_rate_hz = parse_double(item.value, item.line, item.key);
        } else if (item.key == "accidental_hz") {
            e.source.accidental_rate_hz = parse_double(item.value, item.line, item.key);
        } else if (item.key == "launch") {
            c.inputs = parse_labels(item.value, item.line);
        } else {
            throw ParseError(item.line, "unknown key '" + item.key + "' in [source]");
        }
    }

    std::optional<double> start, stop, step;
    int range_line = 0;
    bool have_points = false;
    for (const auto &item : kv["scan"]) {
        if (item.key == "variable") {
            auto v = sweep_from_string(item.value);
            if (!v) {
                throw ParseError(item.line, "unknown sweep variable '" + std::string(item.value) + "'");
            }
            e.scan.variable = *v;
        } else if (item.key == "start" || item.key == "stop" || item.key == "step") {
            double v = parse_double(item.value, item.line, item.key);
            (item.key == "start" ? start : item.key == "stop" ? stop : step) = v;
            range_line = item.line;
        } else if (item.key == "points") {
            have_points = true;
            for (auto tok : split_ws(item.value)) {
                e.scan.points.push_back(parse_double(tok, item.line, "points"));
            }
        } else if (item.key == "integration_s") {
            e.scan.integration_time_s = parse_double(item.value, item.line, item.key);
        } else if (item.key == "seed") {
            e.scan.seed = parse_u64(item.value, item.line, item.key);
        } else if (item.key == "P_pi_mW") {
            e.scan.p_pi_mw = parse_double(item.value, item.line, item.key);
        } else if (item.key == "quantum_phase_offset_rad") {
            e.scan.quantum_phase_offset_rad = parse_double(item.value, item.line, item.key);
        } else if (item.key == "classical_phase_offset_rad") {
            e.scan.classical_phase_offset_rad = parse_double(item.value, item.line, item.key);
        } else {
            throw ParseError(item.line, "unknown key '" + item.key + "' in [scan]");
        }
    }
    if (start || stop || step) {
        if (have_points) {
            throw ParseError(range_line, "give either points or start/stop/step, not both");
        }
        if (!(start && stop && step)) {
            throw ParseError(range_line, "start, stop and step must be given together");
        }
        try {
            e.scan.points = ScanConfig::grid(*start, *stop, *step);
        } catch (const InvalidArgument &err) {
            throw ParseError(range_line, err.what());
        }
    }

    for (const auto &item : kv["detect"]) {
        e.detections.push_back(Detection{item.key, parse_labels(item.value, item.line)});
        for (const auto &m : e.detections.back().modes) {
            if (std::find(c.detectors.begin(), c.detectors.end(), m) == c.detectors.end()) {
                c.detectors.push_back(m);
            }
        }
    }
    return e;
}

Experiment load_experiment(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot read '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_experiment(buf.str());
}

namespace {

void write_stage(std::ostringstream &os, const ElementSpec &spec) {
    os << keyword(spec.kind);
    for (const auto &m : spec.modes) {
        os << ' ' << m.str();
    }
    for (const auto &p : spec.ports) {
        os << ' ' << p;
    }
    for (const auto &[key, value] : spec.params) {
        os << ' ' << key << '=' << format_number(value);
    }
    os << '\n';
}

std::string join_labels(const std::vector<ModeLabel> &labels) {
    std::string out;
    for (const auto &l : labels) {
        if (!out.empty()) {
            out += ' ';
        }
        out += l.str();
    }
    return out;
}

bool is_uniform_grid(const std::vector<double> &pts, double &step) {
    if (pts.size() < 2) {
        return false;
    }
    step = pts[1] - pts[0];
    if (!(step > 0.0)) {
        return false;
    }
    try {
        return ScanConfig::grid(pts.front(), pts.back(), step) == pts;
    } catch (const InvalidArgument &) {
        return false;
    }
}

}  // namespace

std::string serialize_experiment(const Experiment &e) {
    std::ostringstream os;
    const auto &c = e.circuit;
    os << "[experiment]\n";
    if (!e.name.empty()) {
        os << "name = " << e.name << '\n';
    }
    os << "bs_convention = " << (c.bs_convention == BsConvention::Symmetric ? "symmetric" : "real") << "\n\n";
    os << "[modes]\n";
    for (std::size_t i = 0; i < c.registry.size(); ++i) {
        if (!c.registry.is_loss(i)) {
            os << c.registry.label(i).str() << '\n';
        }
    }
    os << "\n[stages]\n";
    for (const auto &s : c.stages) {
        write_stage(os, s);
    }
    if (!c.analyzer.empty()) {
        os << "\n[analyzer]\n";
        for (const auto &s : c.analyzer) {
            write_stage(os, s);
        }
    }
    os << "\n[source]\n";
    os << "s0 = " << format_number(e.source.base_overlap) << '\n';
    os << "Lc_um = " << format_number(e.source.coherence_length_um) << '\n';
    os << "pair_rate_hz = " << format_number(e.source.pair_rate_hz) << '\n';
    os << "accidental_hz = " << format_number(e.source.accidental_rate_hz) << '\n';
    os << "launch = " << join_labels(c.inputs) << '\n';
    os << "\n[scan]\n";
    os << "variable = " << to_string(e.scan.variable) << '\n';
    double step = 0.0;
    if (is_uniform_grid(e.scan.points, step)) {
        os << "start = " << format_number(e.scan.points.front()) << '\n';
        os << "stop = " << format_number(e.scan.points.back()) << '\n';
        os << "step = " << format_number(step) << '\n';
    } else {
        os << "points =";
        for (double p : e.scan.points) {
            os << ' ' << format_number(p);
        }
        os << '\n';
    }
    os << "integration_s = " << format_number(e.scan.integration_time_s) << '\n';
    os << "seed = " << e.scan.seed << '\n';
    if (e.scan.variable == SweepVariable::HeaterMw) {
        os << "P_pi_mW = " << format_number(e.scan.p_pi_mw) << '\n';
        os << "quantum_phase_offset_rad = " << format_number(e.scan.quantum_phase_offset_rad) << '\n';
        os << "classical_phase_offset_rad = " << format_number(e.scan.classical_phase_offset_rad) << '\n';
    }
    os << "\n[detect]\n";
    for (const auto &d : e.detections) {
        os << d.name << " = " << join_labels(d.modes) << '\n';
    }
    return os.str();
}

}  // namespace qmodes
