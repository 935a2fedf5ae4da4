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

#include "qmodes/experiments.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "qmodes/analysis.h"
#include "qmodes/error.h"
#include "support/oracle.h"

namespace qmodes {
namespace {

ModeLabel te(const std::string &port, int order = 0) { return {port, Polarization::TE, order}; }

Experiment ideal(Sample s) {
    auto e = preset(s);
    e.source.base_overlap = 1.0;
    e.source.accidental_rate_hz = 0.0;
    for (auto *list : {&e.circuit.stages, &e.circuit.analyzer}) {
        for (auto &st : *list) {
            if (st.kind == ElementKind::GratingCoupler) {
                st.params["efficiency"] = 1.0;
            }
        }
    }
    return e;
}

double at_point(const ScanResult &r, double x) {
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (std::abs(r.points[i] - x) < 1e-9) {
            return r.expected_rate[i];
        }
    }
    ADD_FAILURE() << "no point at " << x;
    return 0.0;
}

Circuit hom_bench(double efficiency) {
    Circuit c;
    c.registry.register_mode(te("a"));
    c.registry.register_mode(te("b"));
    c.add_stage({ElementKind::GratingCoupler, {te("a")}, {}, {{"efficiency", efficiency}}, {}});
    c.add_stage({ElementKind::GratingCoupler, {te("b")}, {}, {{"efficiency", efficiency}}, {}});
    c.add_stage({ElementKind::BeamSplitter, {te("a"), te("b")}, {}, {{"reflectivity", 0.5}}, {}});
    c.inputs = {te("a"), te("b")};
    c.detectors = {te("a"), te("b")};
    return c;
}

TEST(Overlap, TriangleEnvelope) {
    SourceModel src{0.9, 450.0, 1000.0, 0.0};
    EXPECT_DOUBLE_EQ(overlap_at_delay(0.0, src), 0.9);
    EXPECT_DOUBLE_EQ(overlap_at_delay(450.0, src), 0.0);
    EXPECT_DOUBLE_EQ(overlap_at_delay(-900.0, src), 0.0);
    // The squared overlap, which sets every interference term, is linear.
    src.base_overlap = 1.0;
    EXPECT_NEAR(std::pow(overlap_at_delay(225.0, src), 2), 0.5, 1e-15);
    EXPECT_NEAR(std::pow(overlap_at_delay(-112.5, src), 2), 0.75, 1e-15);
}

TEST(Overlap, InverseVisibilityRelations) {
    EXPECT_NEAR(overlap_for_dip_visibility(0.923), std::sqrt(0.923), 1e-15);
    EXPECT_NEAR(overlap_for_peak_visibility(0.5), std::sqrt(0.5), 1e-15);
    double s = overlap_for_noon_visibility(0.903);
    EXPECT_NEAR((1 + s * s) / (3 - s * s), 0.903, 1e-12);
    EXPECT_THROW(overlap_for_dip_visibility(1.2), InvalidArgument);
}

TEST(HomScan, IdealSourceGivesFullDip) {
    auto c = hom_bench(0.3);
    SourceModel src{1.0, 450.0, 10000.0, 0.0};
    ScanConfig scan;
    scan.points = ScanConfig::grid(-600, 600, 50);
    scan.integration_time_s = 1.0;
    auto pattern = DetectionPattern::coincidence(0, 1);
    auto r = hom_scan(c, pattern, src, scan);
    EXPECT_NEAR(at_point(r, 0.0), 0.0, 1e-9);
    EXPECT_NEAR(at_point(r, 500.0), 10000.0 * 0.5 * 0.09, 1e-9);
    EXPECT_NEAR(visibility_dip(at_point(r, 600.0), at_point(r, 0.0)), 1.0, 1e-12);
}

TEST(HomScan, ErrorsOnWrongSweepOrPattern) {
    auto c = hom_bench(1.0);
    SourceModel src;
    ScanConfig scan;
    scan.points = {0.0, 1.0};
    scan.variable = SweepVariable::HeaterMw;
    EXPECT_THROW(hom_scan(c, DetectionPattern::coincidence(0, 1), src, scan), InvalidArgument);
    scan.variable = SweepVariable::DelayUm;
    EXPECT_THROW(hom_scan(c, DetectionPattern{{{0, 1}}}, src, scan), InvalidArgument);
}

TEST(HomScan, Sample1DipDepthMatchesDerivedOverlap) {
    auto e = preset(Sample::Sample1);
    EXPECT_NEAR(e.source.base_overlap, 0.9607, 5e-5);
    auto r = run_experiment(e).front().result;
    double c_far = at_point(r, 1000.0);
    EXPECT_NEAR(at_point(r, 0.0), c_far * (1 - 0.923), 1e-9 * c_far);
}

TEST(HomScan, BunchedPortPeakDoublesOnIdealSource) {
    auto e = ideal(Sample::Sample4);
    for (const auto &t : run_experiment(e)) {
        EXPECT_NEAR(at_point(t.result, 0.0), 2 * at_point(t.result, 1000.0), 1e-9) << t.channel;
    }
}

TEST(HomScan, Sample4PeakMatchesOracle) {
    // On-chip BS then, per output, the polarization branch's fiber BS: the
    // full transfer matrix is checked against the brute-force expansion.
    auto e = preset(Sample::Sample4);
    auto u = compile(e.circuit);
    const auto &reg = e.circuit.registry;
    std::size_t a = reg.mode_index(e.circuit.inputs[0]);
    std::size_t b = reg.mode_index(e.circuit.inputs[1]);
    for (double s : {0.0, 0.5, 0.9836, 1.0}) {
        Eigen::MatrixXcd gram(2, 2);
        gram << 1, s, s, 1;
        WavepacketBasis basis(gram);
        auto state = PhotonState::product({{a, 0}, {b, 1}}, basis);
        for (const auto &d : e.detections) {
            auto pattern = d.pattern(reg);
            double p = evolve_probability(state, u, pattern, basis);
            double ref = oracle::probability({{1.0, {{a, 0}, {b, 1}}}}, u.entries, gram, pattern.counts);
            EXPECT_NEAR(p, ref, 1e-12) << d.name << " s=" << s;
        }
    }
}

TEST(Scan, DeterministicAcrossRunsAndThreads) {
    auto e = preset(Sample::Sample1);
    auto a = run_experiment(e).front().result;
    auto b = run_experiment(e).front().result;
    e.scan.threads = 4;
    auto c = run_experiment(e).front().result;
    EXPECT_EQ(a.counts, b.counts);
    EXPECT_EQ(a.counts, c.counts);
    EXPECT_EQ(a.expected_rate, c.expected_rate);
    e.scan.seed = 2;
    EXPECT_NE(run_experiment(e).front().result.counts, a.counts);
}

TEST(Scan, DoublingIntegrationDoublesExpectedCounts) {
    auto e = preset(Sample::Sample2);
    auto a = run_experiment(e).front().result;
    e.scan.integration_time_s *= 2;
    auto b = run_experiment(e).front().result;
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(b.expected_counts(i), 2 * a.expected_counts(i));
    }
}

TEST(Scan, CountsAreIntegersWithPoissonSigma) {
    auto r = run_experiment(preset(Sample::Sample2)).front().result;
    for (std::size_t i = 0; i < r.size(); ++i) {
        EXPECT_EQ(r.counts[i], std::round(r.counts[i]));
        EXPECT_DOUBLE_EQ(r.sigma[i], poisson_sigma(static_cast<long long>(r.counts[i])));
    }
}

TEST(Presets, Sample1StageSequence) {
    auto e = preset(Sample::Sample1);
    std::vector<std::string> kinds;
    for (const auto &s : e.circuit.stages) {
        kinds.push_back(s.describe());
    }
    EXPECT_EQ(kinds, (std::vector<std::string>{"GratingTE", "GratingTM", "PBS", "ModeConverter",
                                               "Propagation(870 um)", "ModeConverter", "PBS", "GratingTE",
                                               "GratingTM"}));
}

TEST(Presets, MultimodeSectionLengths) {
    for (auto s : {Sample::Sample2, Sample::Sample3}) {
        auto e = preset(s);
        auto it = std::find_if(e.circuit.stages.begin(), e.circuit.stages.end(),
                               [](const ElementSpec &x) { return x.kind == ElementKind::Propagation; });
        ASSERT_NE(it, e.circuit.stages.end());
        EXPECT_EQ(it->param("length_um", -1), 30.0);
    }
}

TEST(Presets, Sample4DetectsPeaksOnEachOutput) {
    auto e = preset(Sample::Sample4);
    ASSERT_EQ(e.detections.size(), 2u);
    for (const auto &t : run_experiment(e)) {
        auto fit = fit_triangle(t.result.noiseless());
        EXPECT_EQ(fit.orientation, Orientation::Peak);
    }
}

TEST(Presets, AllValidateAndDefaults) {
    for (auto s : {Sample::Sample1, Sample::Sample2, Sample::Sample3, Sample::Sample4}) {
        auto e = preset(s);
        EXPECT_TRUE(validate(e).empty()) << to_string(s);
        EXPECT_EQ(e.source.coherence_length_um, 448.7);
        for (const auto &st : e.circuit.stages) {
            if (st.kind == ElementKind::GratingCoupler) {
                EXPECT_EQ(st.param("efficiency", 0), 0.3);
            }
        }
    }
    EXPECT_FALSE(sample_from_string("sample5").has_value());
}

TEST(Presets, IdealRunsReproduceIdealValues) {
    for (auto s : {Sample::Sample1, Sample::Sample2}) {
        auto r = run_experiment(ideal(s)).front().result;
        EXPECT_NEAR(visibility_dip(at_point(r, 1000.0), at_point(r, 0.0)), 1.0, 1e-12);
    }
    auto fr = run_experiment(ideal(Sample::Sample3));
    auto q = fit_fringe(fr[0].result.noiseless());
    auto c = fit_fringe(fr[1].result.noiseless());
    EXPECT_NEAR(q.value("period") / c.value("period"), 0.5, 1e-9);
    for (const auto &t : run_experiment(ideal(Sample::Sample4))) {
        EXPECT_NEAR(visibility_peak(at_point(t.result, 0.0), at_point(t.result, 1000.0)), 1.0, 1e-12);
    }
}

TEST(FringeScan, PeriodsFollowPiPower) {
    auto e = preset(Sample::Sample3);
    auto traces = run_experiment(e);
    ASSERT_EQ(traces.size(), 2u);
    EXPECT_EQ(traces[0].channel, "quantum");
    auto q = fit_fringe(traces[0].result.noiseless());
    auto c = fit_fringe(traces[1].result.noiseless());
    EXPECT_NEAR(c.value("period"), 66.8, 1e-6);
    EXPECT_NEAR(q.value("period"), 33.4, 1e-6);
    EXPECT_NEAR(q.value("visibility"), 0.903, 1e-6);
}

TEST(FringeScan, OverlapToVisibilityMapping) {
    // 0.950 maps to 90.7 %, not 90.3 %; the preset uses the inverse relation.
    double s = 0.95;
    EXPECT_NEAR((1 + s * s) / (3 - s * s), 0.90703, 1e-5);
    auto e = ideal(Sample::Sample3);
    e.source.base_overlap = s;
    auto q = fit_fringe(run_experiment(e)[0].result.noiseless());
    EXPECT_NEAR(q.value("visibility"), (1 + s * s) / (3 - s * s), 1e-6);
}

TEST(FringeScan, RejectsBadConfig) {
    auto e = preset(Sample::Sample3);
    e.scan.p_pi_mw = 0.0;
    EXPECT_FALSE(validate(e).empty());
    EXPECT_THROW(run_experiment(e), InvalidArgument);
}

TEST(PointSeed, DistinctStreams) {
    EXPECT_EQ(point_seed(1, 0, 5), point_seed(1, 0, 5));
    EXPECT_NE(point_seed(1, 0, 5), point_seed(1, 0, 6));
    EXPECT_NE(point_seed(1, 0, 5), point_seed(1, 1, 5));
    EXPECT_NE(point_seed(1, 0, 5), point_seed(2, 0, 5));
}

TEST(ScanConfig, GridIncludesStop) {
    auto g = ScanConfig::grid(-1000, 1000, 10);
    EXPECT_EQ(g.size(), 201u);
    EXPECT_EQ(g.back(), 1000.0);
    EXPECT_THROW(ScanConfig::grid(0, 1, 0), InvalidArgument);
}

}  // namespace
}  // namespace qmodes
