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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "commands.h"
#include "csv.h"
#include "qmodes/analysis.h"
#include "qmodes/expfile.h"

#ifndef QMODES_TEST_DATA_DIR
#error "QMODES_TEST_DATA_DIR must be defined"
#endif
#ifndef QMODES_PRESET_DIR
#error "QMODES_PRESET_DIR must be defined"
#endif

namespace qmodes::cli {
namespace {

namespace fs = std::filesystem;

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args) {
    args.insert(args.begin(), "qmodes");
    std::vector<const char *> argv;
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    int code = run_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

class CliTest : public ::testing::Test {
   protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("qmodes_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string &name) const { return (dir_ / name).string(); }
    void write(const std::string &name, const std::string &text) const {
        std::ofstream(dir_ / name, std::ios::binary) << text;
    }

    fs::path dir_;
};

const std::string kPresets = QMODES_PRESET_DIR;
const std::string kData = QMODES_TEST_DATA_DIR;

TEST_F(CliTest, ValidatePresetFile) {
    auto r = run({"validate", kPresets + "/sample2.qexp"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "");
    EXPECT_EQ(r.err, "");
}

TEST_F(CliTest, ShippedPresetFilesMatchBuiltIns) {
    for (auto s : {Sample::Sample1, Sample::Sample2, Sample::Sample3, Sample::Sample4}) {
        auto file = load_experiment(kPresets + "/" + std::string(to_string(s)) + ".qexp");
        EXPECT_EQ(file, preset(s)) << to_string(s);
    }
}

TEST_F(CliTest, ValidateUnknownKind) {
    auto r = run({"validate", kData + "/unknown_kind.qexp"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("laser"), std::string::npos);
    EXPECT_NE(r.err.find("line 8"), std::string::npos);
    EXPECT_EQ(r.out, "");
}

TEST_F(CliTest, ValidateSemanticProblemsOnePerLine) {
    auto r = run({"validate", kData + "/bad_circuit.qexp"});
    EXPECT_EQ(r.code, 2);
    auto lines = std::count(r.err.begin(), r.err.end(), '\n');
    EXPECT_GE(lines, 2);
    EXPECT_NE(r.err.find("ghost"), std::string::npos);
}

TEST_F(CliTest, ValidateMissingFile) {
    EXPECT_EQ(run({"validate", path("absent.qexp")}).code, 1);
}

TEST_F(CliTest, RunWritesDocumentedSchema) {
    auto r = run({"run", "--preset", "sample1", "--out", path("s1.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    auto text = slurp(path("s1.csv"));
    EXPECT_EQ(text.find("# qmodes run "), 0u);
    EXPECT_NE(text.find("preset=sample1"), std::string::npos);
    EXPECT_NE(text.find("seed=1"), std::string::npos);
    EXPECT_NE(text.find("\nsweep_value,expected_rate,counts,sigma\n"), std::string::npos);
    EXPECT_EQ(text.find('\r'), std::string::npos);

    std::ifstream in(path("s1.csv"));
    auto table = read_scan_csv(in);
    EXPECT_EQ(table.scan.size(), 201u);
    std::size_t argmin = 0;
    for (std::size_t i = 0; i < table.scan.size(); ++i) {
        if (table.scan.expected_rate[i] < table.scan.expected_rate[argmin]) {
            argmin = i;
        }
    }
    EXPECT_EQ(table.scan.points[argmin], 0.0);
}

TEST_F(CliTest, RunIsDeterministicAndSeedable) {
    ASSERT_EQ(run({"run", "--preset", "sample2", "--out", path("a.csv")}).code, 0);
    ASSERT_EQ(run({"run", "--preset", "sample2", "--out", path("b.csv"), "--threads", "3"}).code, 0);
    ASSERT_EQ(run({"run", "--preset", "sample2", "--out", path("c.csv"), "--seed", "99"}).code, 0);
    EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
    EXPECT_NE(slurp(path("a.csv")), slurp(path("c.csv")));
    EXPECT_NE(slurp(path("c.csv")).find("seed=99"), std::string::npos);
}

TEST_F(CliTest, RunMatchesGoldenFile) {
    ASSERT_EQ(run({"run", "--preset", "sample2", "--seed", "7", "--out", path("g.csv")}).code, 0);
    EXPECT_EQ(slurp(path("g.csv")), slurp(kData + "/sample2_seed7.csv"));
}

TEST_F(CliTest, RunFromFileEqualsPreset) {
    ASSERT_EQ(run({"run", kPresets + "/sample1.qexp", "--out", path("f.csv")}).code, 0);
    ASSERT_EQ(run({"run", "--preset", "sample1", "--out", path("p.csv")}).code, 0);
    EXPECT_EQ(slurp(path("f.csv")), slurp(path("p.csv")));
}

TEST_F(CliTest, RunFringePresetWritesTwoChannels) {
    ASSERT_EQ(run({"run", "--preset", "sample3", "--out", path("s3.csv")}).code, 0);
    auto q = run({"fit", path("s3_quantum.csv"), "--model", "fringe"});
    auto c = run({"fit", path("s3_classical.csv"), "--model", "fringe"});
    ASSERT_EQ(q.code, 0) << q.err;
    ASSERT_EQ(c.code, 0) << c.err;
    auto period = [](const std::string &report) {
        std::istringstream in(report);
        std::string name;
        double value = 0;
        double sigma = 0;
        while (in >> name >> value >> sigma) {
            if (name == "period") {
                return std::pair{value, sigma};
            }
        }
        return std::pair{0.0, 0.0};
    };
    auto [pq, sq] = period(q.out);
    auto [pc, sc] = period(c.out);
    double ratio = pq / pc;
    double sigma = ratio * std::hypot(sq / pq, sc / pc);
    EXPECT_NEAR(ratio, 0.5, 3 * sigma + 1e-9);
}

TEST_F(CliTest, RunErrors) {
    EXPECT_EQ(run({"run", "--preset", "sample9", "--out", path("x.csv")}).code, 2);
    EXPECT_EQ(run({"run", kData + "/bad_circuit.qexp", "--out", path("x.csv")}).code, 2);
    EXPECT_EQ(run({"run", "--preset", "sample1", "--out", path("missing_dir/x.csv")}).code, 1);
    EXPECT_EQ(run({"run", "--out", path("x.csv")}).code, 2);
    EXPECT_EQ(run({"bogus"}).code, 2);
}

TEST_F(CliTest, FitSample1Report) {
    ASSERT_EQ(run({"run", "--preset", "sample1", "--out", path("s1.csv")}).code, 0);
    auto r = run({"fit", path("s1.csv"), "--model", "triangle"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream in(r.out);
    std::map<std::string, std::pair<double, double>> got;
    std::string name;
    double v = 0;
    double s = 0;
    while (in >> name >> v >> s) {
        got[name] = {v, s};
    }
    for (const char *key : {"C0", "V1", "Lc_um", "delta0_um", "chi2_reduced", "V1_bgsub"}) {
        EXPECT_TRUE(got.count(key)) << key;
    }
    EXPECT_NEAR(got["V1"].first, 0.923, 0.05);
    EXPECT_NEAR(got["Lc_um"].first, 458.7, 37.8);
}

TEST_F(CliTest, FitSample4DetectsPeak) {
    ASSERT_EQ(run({"run", "--preset", "sample4", "--out", path("s4.csv")}).code, 0);
    auto r = run({"fit", path("s4_tm_out.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("V2 "), std::string::npos);
}

TEST_F(CliTest, FitBackgroundRaisesVisibility) {
    auto e = preset(Sample::Sample1);
    e.source.accidental_rate_hz = 5.0;
    write("bg.qexp", serialize_experiment(e));
    ASSERT_EQ(run({"run", path("bg.qexp"), "--out", path("bg.csv")}).code, 0);
    auto r = run({"fit", path("bg.csv"), "--background", "5"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream in(r.out);
    std::map<std::string, double> got;
    std::string name;
    double v = 0;
    double s = 0;
    while (in >> name >> v >> s) {
        got[name] = v;
    }
    EXPECT_GT(got["V1_bgsub"], got["V1"]);
}

TEST_F(CliTest, FitWrongModelIsRejected) {
    ASSERT_EQ(run({"run", "--preset", "sample3", "--out", path("s3.csv")}).code, 0);
    auto r = run({"fit", path("s3_quantum.csv"), "--model", "triangle"});
    EXPECT_EQ(r.code, 3);
    EXPECT_FALSE(r.err.empty());
}

TEST_F(CliTest, FitMalformedCsv) {
    write("bad.csv", "sweep_value,expected_rate,counts,sigma\n1,2,three,4\n");
    EXPECT_EQ(run({"fit", path("bad.csv")}).code, 2);
    write("noheader.csv", "1,2,3,4\n");
    EXPECT_EQ(run({"fit", path("noheader.csv")}).code, 2);
    EXPECT_EQ(run({"fit", path("nothing.csv")}).code, 1);
}

TEST_F(CliTest, PresetSubcommandPrintsCanonicalText) {
    auto r = run({"preset", "sample3"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, serialize_experiment(preset(Sample::Sample3)));
    EXPECT_EQ(run({"preset", "nope"}).code, 2);
}

TEST(Csv, RoundTrip) {
    ScanTable t;
    t.meta = {{"preset", "x"}, {"integration_s", "2.5"}};
    t.scan.points = {0.1, 0.2};
    t.scan.expected_rate = {1.0 / 3.0, 2};
    t.scan.counts = {3, 4};
    t.scan.sigma = {std::sqrt(3.0), 2};
    std::stringstream s;
    write_scan_csv(s, t);
    auto back = read_scan_csv(s);
    EXPECT_EQ(back.meta, t.meta);
    EXPECT_EQ(back.scan.points, t.scan.points);
    EXPECT_EQ(back.scan.expected_rate, t.scan.expected_rate);
    EXPECT_EQ(back.scan.sigma, t.scan.sigma);
    EXPECT_EQ(back.scan.integration_time_s, 2.5);
}

}  // namespace
}  // namespace qmodes::cli
