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

#include "csv.h"

#include <charconv>
#include <istream>
#include <ostream>
#include <vector>

#include "qmodes/error.h"
#include "qmodes/expfile.h"

namespace qmodes::cli {
namespace {

std::vector<std::string> split(const std::string &line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
        if (pos == std::string::npos) {
            return out;
        }
        start = pos + 1;
    }
}

std::string strip(const std::string &s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string &text, int line) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        throw ParseError(line, "invalid number '" + text + "'");
    }
    return v;
}

}  // namespace

void write_scan_csv(std::ostream &out, const ScanTable &table) {
    out << "# qmodes run";
    for (const auto &[key, value] : table.meta) {
        out << ' ' << key << '=' << value;
    }
    out << '\n' << kCsvHeader << '\n';
    const auto &s = table.scan;
    for (std::size_t i = 0; i < s.size(); ++i) {
        out << format_number(s.points[i]) << ',' << format_number(s.expected_rate[i]) << ','
            << format_number(s.counts[i]) << ',' << format_number(s.sigma[i]) << '\n';
    }
}

ScanTable read_scan_csv(std::istream &in) {
    ScanTable table;
    bool have_header = false;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '#') {
            for (const auto &tok : split(line.substr(1), ' ')) {
                auto eq = tok.find('=');
                if (eq != std::string::npos && eq > 0) {
                    table.meta[tok.substr(0, eq)] = tok.substr(eq + 1);
                }
            }
            continue;
        }
        if (!have_header) {
            if (line != kCsvHeader) {
                throw ParseError(line_no, std::string("expected header '") + kCsvHeader + "'");
            }
            have_header = true;
            continue;
        }
        auto cells = split(line, ',');
        if (cells.size() != 4) {
            throw ParseError(line_no, "expected 4 columns, found " + std::to_string(cells.size()));
        }
        double x = to_double(strip(cells[0]), line_no);
        double rate = to_double(strip(cells[1]), line_no);
        double counts = to_double(strip(cells[2]), line_no);
        double sigma = to_double(strip(cells[3]), line_no);
        if (!(sigma > 0.0)) {
            throw ParseError(line_no, "sigma must be positive");
        }
        table.scan.points.push_back(x);
        table.scan.expected_rate.push_back(rate);
        table.scan.counts.push_back(counts);
        table.scan.sigma.push_back(sigma);
    }
    if (!have_header) {
        throw ParseError(line_no, "missing CSV header");
    }
    if (table.scan.size() == 0) {
        throw ParseError(line_no, "no data rows");
    }
    table.scan.integration_time_s = 1.0;
    if (auto it = table.meta.find("integration_s"); it != table.meta.end()) {
        table.scan.integration_time_s = to_double(it->second, 1);
        if (!(table.scan.integration_time_s > 0.0)) {
            throw ParseError(1, "integration_s must be positive");
        }
    }
    return table;
}

}  // namespace qmodes::cli
