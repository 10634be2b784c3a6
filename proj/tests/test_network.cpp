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

#include "ramanbs/experiment.hpp"
#include "ramanbs/network.hpp"

using namespace ramanbs;

namespace {

ExperimentSpec paper_like(std::vector<double> reads) {
    ExperimentSpec s;
    s.memory.coupling = 0.57;
    s.read_energies = std::move(reads);
    s.decoherence.reference = DecoherenceModel::Reference::excitation;
    return s;
}

}  // namespace

TEST(Decoherence, IdentityAtZeroTime) {
    const DecoherenceModel m;
    EXPECT_EQ(m.amplitude_factor(0.0), 1.0);
    const SpinWave b(SpaceGrid(5), {1.0, 2.0, cplx(0, 1), 0.5, 0.0});
    const auto d = apply_decoherence(b, 0.0, m);
    for (std::size_t j = 0; j < 5; ++j) EXPECT_EQ(d[j], b[j]);
}

TEST(Decoherence, AmplitudeReferenceFollowsExponentialLaw) {
    const DecoherenceModel m;  // 0.7 per 900 ns on the amplitude
    EXPECT_NEAR(m.amplitude_factor(900.0), 0.7, 1e-15);
    EXPECT_NEAR(m.excitation_factor(900.0), 0.49, 1e-15);
    EXPECT_NEAR(m.amplitude_factor(1800.0), 0.49, 1e-15);
    EXPECT_NEAR(m.amplitude_factor(12.5), std::exp(12.5 / 900.0 * std::log(0.7)), 1e-15);
    const SpinWave b(SpaceGrid(3), {1.0, 1.0, 1.0});
    EXPECT_NEAR(excitation(apply_decoherence(b, 900.0, m)), 0.49 * excitation(b), 1e-15);
}

TEST(Decoherence, ExcitationReference) {
    DecoherenceModel m;
    m.reference = DecoherenceModel::Reference::excitation;
    EXPECT_NEAR(m.excitation_factor(900.0), 0.7, 1e-15);
    EXPECT_NEAR(m.excitation_factor(12.5), 0.995058, 1e-6);
    EXPECT_EQ(DecoherenceModel::none().amplitude_factor(1e6), 1.0);
}

TEST(Decoherence, RejectsBadParameters) {
    DecoherenceModel m;
    m.kappa_ref = 1.2;
    EXPECT_THROW(m.validate(), Error);
    m.kappa_ref = 0.7;
    m.t_ref = 0.0;
    EXPECT_THROW(m.validate(), Error);
    EXPECT_THROW(DecoherenceModel{}.amplitude_factor(-1.0), Error);
}

TEST(Cascade, CombinedReadoutClosedForms) {
    EXPECT_DOUBLE_EQ(combined_readout_efficiency(1.0, 1), 1.0);
    EXPECT_NEAR(combined_readout_efficiency(0.565, 4), 1.0 - std::pow(0.435, 4), 1e-15);
    EXPECT_NEAR(combined_readout_efficiency(0.565, 4), 0.9642, 5e-5);
    DecoherenceModel m;
    m.reference = DecoherenceModel::Reference::excitation;
    const double decayed = combined_readout_efficiency(0.565, 4, m, 12.5);
    const double f = std::pow(0.7, 12.5 / 900.0);
    double expect = 0.0, left = 1.0;
    for (int k = 0; k < 4; ++k) {
        expect += 0.565 * left;
        left *= 0.435 * f;
    }
    EXPECT_NEAR(decayed, expect, 1e-15);
    EXPECT_LT(decayed, 0.9642);
    EXPECT_THROW(combined_readout_efficiency(1.1, 2), Error);
    EXPECT_THROW(combined_readout_efficiency(0.5, 0), Error);
}

TEST(Cascade, BinsFormGeometricSequence) {
    DecoherenceModel m;
    const auto bins = cascade_bins(0.43, 0.565, 4, m, 900.0, 12.5);
    ASSERT_EQ(bins.size(), 4u);
    EXPECT_NEAR(bins[0], 0.43 * 0.49 * 0.565, 1e-15);
    const double ratio = 0.435 * m.excitation_factor(12.5);
    for (std::size_t k = 1; k < 4; ++k) EXPECT_NEAR(bins[k] / bins[k - 1], ratio, 1e-14);
}

TEST(Network, ZeroReadsLeaveOnlyDecay) {
    auto spec = paper_like({});
    spec.end_time = 900.0;
    const auto r = simulate(spec).record;
    EXPECT_TRUE(r.bins.empty());
    EXPECT_NEAR(r.remaining_decay_factor, 0.7, 1e-15);
    EXPECT_NEAR(r.remaining_excitation, 0.7 * r.stored_excitation, 1e-12);
    EXPECT_LT(r.ledger_residual(), 1e-5);
}

TEST(Network, LedgerClosesWithDecayCorrection) {
    auto spec = paper_like({1.0, 1.6, 2.5, 4.0});
    spec.end_time = 1000.0;
    const auto r = simulate(spec).record;
    ASSERT_EQ(r.bins.size(), 4u);
    EXPECT_LT(r.ledger_residual(), 1e-5);
    for (const auto& b : r.bins) {
        EXPECT_NEAR(b.excitation_before - b.excitation_after, b.output_energy,
                    1e-5 * b.excitation_before);
    }
}

TEST(Network, ExcitationDepletesMonotonically) {
    const auto r = simulate(paper_like({1.6, 1.6, 1.6, 1.6})).record;
    double prev = r.stored_excitation;
    for (const auto& b : r.bins) {
        EXPECT_LT(b.excitation_before, prev);
        EXPECT_LT(b.excitation_after, b.excitation_before);
        prev = b.excitation_after;
    }
    EXPECT_LT(r.bins[3].output_energy, r.bins[0].output_energy);
}

TEST(Network, BinRecordsConsistentWithDefinitions) {
    const auto r = simulate(paper_like({1.6, 3.0})).record;
    for (const auto& b : r.bins) {
        EXPECT_NEAR(b.efficiency, b.output_energy / r.input_energy, 1e-15);
        EXPECT_NEAR(b.retrieval_efficiency, b.output_energy / b.excitation_before, 1e-15);
    }
    EXPECT_NEAR(r.bins[0].time, 900.0, 1e-12);
    EXPECT_NEAR(r.bins[1].time, 912.5, 1e-12);
    EXPECT_NEAR(r.bins[0].decay_factor, 0.7, 1e-15);
    EXPECT_NEAR(r.bins[0].read_energy, 1.6, 1e-12);
}

TEST(Network, SingleReadTrainEqualsSequential) {
    const auto spec = paper_like({1.6});
    const auto res = spec.required_resolution({});
    const auto a = simulate_at(spec, res, {}, false);
    const auto b = simulate_at(spec, res, {}, true);
    EXPECT_NEAR(b.bins[0].output_energy / a.bins[0].output_energy, 1.0, 1e-6);
}

TEST(Network, ContinuousTrainMatchesSequentialComposition) {
    for (std::size_t n : {2u, 3u, 5u}) {
        std::vector<double> e;
        for (std::size_t k = 0; k < n; ++k) e.push_back(1.0 + 0.7 * static_cast<double>(k));
        const auto spec = paper_like(e);
        const auto res = spec.required_resolution({});
        const auto seq = simulate_at(spec, res, {}, false);
        const auto cont = simulate_at(spec, res, {}, true);
        ASSERT_EQ(cont.bins.size(), n);
        for (std::size_t k = 0; k < n; ++k)
            EXPECT_NEAR(cont.bins[k].output_energy / seq.bins[k].output_energy, 1.0, 1e-3)
                << n << " reads, bin " << k;
        EXPECT_NEAR(cont.remaining_excitation / seq.remaining_excitation, 1.0, 1e-3);
    }
}

TEST(Network, ZeroAmplitudeMiddlePulseGivesEmptyBin) {
    const auto spec = paper_like({1.6, 0.0, 1.6});
    const auto res = spec.required_resolution({});
    for (bool continuous : {false, true}) {
        const auto r = simulate_at(spec, res, {}, continuous);
        EXPECT_LT(r.bins[1].output_energy, 1e-8 * r.input_energy);
        EXPECT_GT(r.bins[2].output_energy, 1e-3 * r.input_energy);
    }
}

TEST(Network, ReadsMustFollowTheWrite) {
    const auto g = TimeGrid::centered(0.0, 1.2, 0.01);
    const auto a = make_gaussian_pulse<SignalField>(g, 0.0, 0.3, 1.0);
    const auto w = make_gaussian_pulse<ControlField>(g, 0.0, 0.3, 1.0);
    MemoryParams p;
    p.coupling = 0.5;
    const std::vector<ReadPulse> reads{{-5.0, w}};
    EXPECT_THROW(run_multipulse(a, w, 0.0, SpaceGrid(51), reads, p, DecoherenceModel{}), Error);
}

TEST(Network, OverlappingWindowsAreRejected) {
    auto spec = paper_like({1.0, 1.0});
    spec.rep_period = 1.0;
    EXPECT_THROW(spec.validate(), Error);
}
