// Copyright 2026 The ramanbs Authors
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

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "ramanbs/experiment.hpp"
#include "ramanbs/pulses.hpp"

using namespace ramanbs;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected an error";
    return ErrorKind::invalid_argument;
}

}  // namespace

TEST(Grid, RejectsDegenerateGrids) {
    EXPECT_EQ(kind_of([] { TimeGrid(0.0, 0.0, 10); }), ErrorKind::invalid_argument);
    EXPECT_EQ(kind_of([] { TimeGrid(0.0, -1.0, 10); }), ErrorKind::invalid_argument);
    EXPECT_EQ(kind_of([] { TimeGrid(0.0, 0.1, 1); }), ErrorKind::invalid_argument);
    EXPECT_EQ(kind_of([] { SpaceGrid(1); }), ErrorKind::invalid_argument);
}

TEST(Grid, CenteredGridIsSymmetricAndOdd) {
    const auto g = TimeGrid::centered(5.0, 1.0, 0.01);
    EXPECT_EQ(g.size() % 2, 1u);
    EXPECT_NEAR(g.time(g.size() / 2), 5.0, 1e-12);
    EXPECT_NEAR(g.t_start(), 4.0, 1e-12);
    EXPECT_NEAR(g.t_end(), 6.0, 1e-12);
}

TEST(Grid, SpaceGridIncludesEndpoints) {
    const SpaceGrid s(11);
    EXPECT_DOUBLE_EQ(s.z(0), 0.0);
    EXPECT_DOUBLE_EQ(s.z(10), 1.0);
    double total = 0.0;
    for (double w : s.weights()) total += w;
    EXPECT_NEAR(total, 1.0, 1e-15);
}

TEST(Pulses, ZeroPeakGivesZeroField) {
    const auto g = TimeGrid::centered(0.0, 2.0, 0.01);
    const auto f = make_gaussian_pulse<SignalField>(g, 0.0, 0.3, 0.0);
    for (auto x : f.samples()) EXPECT_EQ(x, cplx(0.0));
    EXPECT_EQ(energy(f), 0.0);
}

TEST(Pulses, GaussianEnergyMatchesClosedForm) {
    const auto g = TimeGrid::centered(0.0, 2.0, 0.01);
    const double peak = 1.7;
    const auto f = make_gaussian_pulse<SignalField>(g, 0.0, 0.3, peak);
    // int exp(-4 ln2 t^2 / fwhm^2) dt = fwhm sqrt(pi / (4 ln 2))
    const double exact = peak * peak * 0.3 * std::sqrt(std::numbers::pi / (4.0 * std::numbers::ln2));
    EXPECT_NEAR(energy(f) / exact, 1.0, 1e-6);
    EXPECT_NEAR(gaussian_energy(0.3, peak) / exact, 1.0, 1e-14);
}

TEST(Pulses, SechEnergyMatchesClosedForm) {
    const auto g = TimeGrid::centered(0.0, 4.0, 0.005);
    const auto f = make_sech_pulse<ControlField>(g, 0.0, 0.3, 1.0);
    // int sech^2(a t) dt = 2 / a
    const double a = 2.0 * std::acosh(std::sqrt(2.0)) / 0.3;
    EXPECT_NEAR(energy(f) / (2.0 / a), 1.0, 1e-6);
    // intensity FWHM
    const double half = std::pow(detail::sech_profile(0.15, 0.3), 2);
    EXPECT_NEAR(half, 0.5, 1e-12);
}

TEST(Pulses, TranslationByWholeStepsShiftsSamples) {
    const auto g = TimeGrid::centered(0.0, 2.0, 0.01);
    const auto a = make_gaussian_pulse<SignalField>(g, 0.0, 0.3, 1.0);
    const auto b = make_gaussian_pulse<SignalField>(g, 7 * 0.01, 0.3, 1.0);
    for (std::size_t i = 0; i + 7 < g.size(); ++i) EXPECT_NEAR(std::abs(a[i] - b[i + 7]), 0.0, 1e-14);
    EXPECT_NEAR(energy(a), energy(b), 1e-12);
}

TEST(Pulses, ClippedPulseIsRejected) {
    const auto g = TimeGrid::centered(0.0, 0.5, 0.01);
    EXPECT_EQ(kind_of([&] { make_gaussian_pulse<SignalField>(g, 0.0, 0.3, 1.0); }),
              ErrorKind::pulse_clipped);
    EXPECT_EQ(kind_of([&] { make_gaussian_pulse<SignalField>(g, 0.0, 0.0, 1.0); }),
              ErrorKind::invalid_argument);
}

TEST(Pulses, WithEnergyRescalesExactly) {
    const auto g = TimeGrid::centered(0.0, 2.0, 0.01);
    const auto f = with_energy(make_gaussian_pulse<ControlField>(g, 0.0, 0.3, 1.0), 2.5);
    EXPECT_NEAR(energy(f), 2.5, 1e-13);
    EXPECT_EQ(energy(with_energy(f, 0.0)), 0.0);
}

TEST(Train, SinglePulseEqualsPulse) {
    const TimeGrid g(-2.0, 0.01, 401);
    TrainSpec spec;
    spec.amplitudes = {1.0};
    const auto train = make_train(g, spec);
    const auto pulse = make_gaussian_pulse<ControlField>(g, 0.0, 0.3, 1.0);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(train[i], pulse[i]);
}

TEST(Train, FourPulsesSpacedByRepPeriod) {
    const TimeGrid g(-2.0, 0.01, 5 * 1250 + 1);
    TrainSpec spec;
    spec.amplitudes = {1, 1, 1, 1};
    const auto train = make_train(g, spec);
    for (std::size_t k = 0; k < 4; ++k) {
        // local maximum at each centre
        const std::size_t c = 200 + k * 1250;
        EXPECT_NEAR(std::abs(train[c]), 1.0, 1e-12);
        EXPECT_GT(std::abs(train[c]), std::abs(train[c - 1]));
        EXPECT_GT(std::abs(train[c]), std::abs(train[c + 1]));
        EXPECT_NEAR(spec.center(k), 12.5 * static_cast<double>(k), 1e-12);
    }
}

TEST(Train, ZeroPulsesAreTransparent) {
    const TimeGrid g(-2.0, 0.01, 3 * 1250 + 401);
    TrainSpec a, b;
    a.amplitudes = {0, 1, 0};
    b.amplitudes = {1};
    b.start_time = 12.5;
    const auto ta = make_train(g, a);
    const auto tb = make_train(g, b);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(std::abs(ta[i] - tb[i]), 0.0, 1e-15);
}

TEST(Train, EnergyIsSumOfSquaredAmplitudes) {
    const TimeGrid g(-2.0, 0.01, 4 * 1250 + 401);
    TrainSpec spec;
    spec.amplitudes = {0.5, 1.0, 0.0, 2.0};
    const double single = energy(make_gaussian_pulse<ControlField>(TimeGrid::centered(0, 2, 0.01), 0, 0.3, 1));
    EXPECT_NEAR(energy(make_train(g, spec)) / (single * (0.25 + 1.0 + 4.0)), 1.0, 1e-6);
}

TEST(Train, OverlapAndInvalidSpecsAreRejected) {
    const TimeGrid g(-2.0, 0.01, 1000);
    TrainSpec overlap;
    overlap.rep_period = 0.4;
    overlap.amplitudes = {1, 1};
    EXPECT_EQ(kind_of([&] { make_train(g, overlap); }), ErrorKind::pulse_overlap);

    TrainSpec bad;
    bad.amplitudes = {1, -1};
    EXPECT_EQ(kind_of([&] { make_train(g, bad); }), ErrorKind::invalid_argument);
    bad.amplitudes = {0, 0};
    EXPECT_EQ(kind_of([&] { make_train(g, bad); }), ErrorKind::invalid_argument);
    bad.amplitudes = {1};
    bad.rep_period = 0.2;
    EXPECT_EQ(kind_of([&] { make_train(g, bad); }), ErrorKind::invalid_argument);
}

TEST(Train, ImportedTemplateReproducesAnalyticTrain) {
    const TimeGrid tg = TimeGrid::centered(0.0, 2.0, 0.01);
    TrainSpec spec;
    spec.amplitudes = {1.0, 0.5, 2.0};
    const TimeGrid g(-2.0, 0.01, 2 * 1250 + 401);
    const auto analytic = make_train(g, spec);
    spec.pulse_shape = PulseShape::imported;
    spec.imported = ImportedPulse{make_gaussian_pulse<ControlField>(tg, 0.0, 0.3, 1.0), 0.0};
    const auto imported = make_train(g, spec);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(std::abs(imported[i] - analytic[i]), 0.0, 1e-12);

    spec.start_time = 0.005;  // half a sample
    EXPECT_EQ(kind_of([&] { make_train(g, spec); }), ErrorKind::invalid_argument);
}

TEST(Trace, AllZeroTraceGivesZeroField) {
    const TimeGrid g(0.0, 0.01, 50);
    const std::vector<double> trace(50, 0.0);
    EXPECT_EQ(energy(amp_from_trace(trace, g)), 0.0);
}

TEST(Trace, SquareRootRoundTrip) {
    const auto g = TimeGrid::centered(0.0, 2.0, 0.01);
    const auto f = make_gaussian_pulse<SignalField>(g, 0.1, 0.3, 1.3);
    std::vector<double> trace;
    for (auto x : f.samples()) trace.push_back(std::norm(x));
    const auto back = amp_from_trace(trace, g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        EXPECT_NEAR(std::abs(back[i] - f[i]), 0.0, 1e-12);
        EXPECT_EQ(back[i].imag(), 0.0);
    }
}

TEST(Trace, SmallNegativeNoiseIsClamped) {
    const TimeGrid g(0.0, 0.01, 4);
    const std::vector<double> trace{0.25, 1.0, -1e-6, 0.04};
    const auto f = amp_from_trace(trace, g);
    EXPECT_EQ(f[2], cplx(0.0));
    EXPECT_DOUBLE_EQ(f[1].real(), 1.0);
    EXPECT_DOUBLE_EQ(f[3].real(), 0.2);

    const std::vector<double> bad{0.25, 1.0, -0.01, 0.04};
    EXPECT_EQ(kind_of([&] { amp_from_trace(bad, g); }), ErrorKind::negative_trace);
}

TEST(Trace, CsvWithAndWithoutHeader) {
    std::istringstream with("time_ns,intensity\n0,0\n0.01,1\n0.02,4\n");
    const auto a = parse_trace_csv(with);
    EXPECT_EQ(a.intensity.size(), 3u);
    EXPECT_NEAR(a.grid.dt(), 0.01, 1e-15);
    std::istringstream without("1.0, 2\n1.5, 3\n");
    const auto b = parse_trace_csv(without);
    EXPECT_NEAR(b.grid.t_start(), 1.0, 1e-15);
    EXPECT_DOUBLE_EQ(b.intensity[1], 3.0);
}

TEST(Trace, NonUniformOrMalformedCsvIsRejected) {
    std::istringstream uneven("0,1\n0.01,1\n0.03,1\n");
    EXPECT_EQ(kind_of([&] { parse_trace_csv(uneven); }), ErrorKind::io);
    std::istringstream junk("0,1\nfoo,bar\n");
    EXPECT_EQ(kind_of([&] { parse_trace_csv(junk); }), ErrorKind::io);
}

TEST(Trace, ImportedPulseSpecMatchesAnalyticShape) {
    const auto tg = TimeGrid::centered(0.0, 1.2, 0.01);
    const auto f = make_gaussian_pulse<ControlField>(tg, 0.0, 0.3, 1.0);
    IntensityTrace tr{tg, {}};
    for (auto x : f.samples()) tr.intensity.push_back(std::norm(x));
    PulseSpec imported{PulseShape::imported, 0.3, 2.0, tr};
    PulseSpec analytic{PulseShape::gaussian, 0.3, 2.0, std::nullopt};
    const auto g = TimeGrid::centered(40.0, 1.5, 0.01);
    const auto a = realize_pulse<ControlField>(imported, g, 40.0);
    const auto b = realize_pulse<ControlField>(analytic, g, 40.0);
    EXPECT_NEAR(energy(a), 2.0, 1e-12);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(std::abs(a[i] - b[i]), 0.0, 1e-9);
    EXPECT_NEAR(imported.peak_intensity() / analytic.peak_intensity(), 1.0, 1e-6);
}
