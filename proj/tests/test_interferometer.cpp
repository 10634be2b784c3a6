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

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ramanbs/interferometer.hpp"

using namespace ramanbs;

namespace {

ExperimentSpec arm(std::size_t reads, double kappa = 0.7) {
    ExperimentSpec s;
    s.memory.coupling = 0.57;
    s.read_energies.assign(reads, 1.6);
    s.decoherence.kappa_ref = kappa;
    s.decoherence.reference = DecoherenceModel::Reference::excitation;
    return s;
}

// Diagonal output energy of one bin at phase phi, from the stored traces.
double diag_energy(const InterferenceResult& r, std::size_t k, double split, double phi) {
    const auto& oa = r.record_a.outputs[k];
    const auto& ob = r.record_b.outputs[k];
    const auto w = oa.grid().weights();
    double e = 0.0;
    for (std::size_t i = 0; i < oa.size(); ++i) {
        const cplx d = (std::sqrt(split) * oa[i] + std::polar(std::sqrt(1 - split), phi) * ob[i]) /
                       std::sqrt(2.0);
        e += w[i] * std::norm(d);
    }
    return e;
}

}  // namespace

TEST(Interferometer, IdenticalArmsCancelInEveryBin) {
    InterferometerConfig cfg{arm(8), arm(8)};
    const auto r = run_interference(cfg);
    ASSERT_EQ(r.bins.size(), 8u);
    for (const auto& b : r.bins) {
        EXPECT_LT(b.energy_antidiag, 1e-10 * b.energy_diag);
        EXPECT_NEAR(b.visibility, 1.0, 1e-12);
    }
    for (const auto& trace : r.antidiag)
        for (auto x : trace.samples()) EXPECT_EQ(x, cplx(0.0));
}

TEST(Interferometer, BlankedArmShowsNoInterference) {
    auto b = arm(3);
    b.write.energy = 0.0;
    InterferometerConfig cfg{arm(3), b};
    const auto r = run_interference(cfg);
    for (const auto& bin : r.bins) {
        EXPECT_EQ(bin.energy_b, 0.0);
        EXPECT_EQ(bin.visibility, 0.0);
        EXPECT_NEAR(bin.energy_antidiag, bin.energy_diag, 1e-15);
    }
}

TEST(Interferometer, ImbalancedVisibilityMatchesPhaseSweep) {
    InterferometerConfig cfg{arm(4, 0.7), arm(4, 0.6)};
    const auto r = run_interference(cfg);
    for (std::size_t k = 0; k < r.bins.size(); ++k) {
        const auto& b = r.bins[k];
        double emax = 0.0, emin = INFINITY;
        const int steps = 3600;
        for (int s = 0; s < steps; ++s) {
            const double phi = 2.0 * std::numbers::pi * s / steps;
            const double e = diag_energy(r, k, cfg.split, phi);
            emax = std::max(emax, e);
            emin = std::min(emin, e);
        }
        const double swept = (emax - emin) / (emax + emin);
        const double two_beam = 2.0 * std::sqrt(b.energy_a * b.energy_b) / (b.energy_a + b.energy_b);
        EXPECT_NEAR(b.visibility, swept, 1e-6) << "bin " << k;
        EXPECT_NEAR(b.visibility, two_beam, 1e-6) << "bin " << k;
        EXPECT_LT(b.visibility, 1.0);
    }
}

TEST(Interferometer, RecombinerConservesEnergyForAnyPhase) {
    InterferometerConfig cfg{arm(2, 0.7), arm(2, 0.6)};
    cfg.split = 0.3;
    const auto r0 = run_interference(cfg);
    for (double phi : {0.0, 0.4, 1.7, 3.1, 5.9}) {
        for (const auto& b : r0.bins) {
            const auto [d, a] = analyzer_energies(b.energy_a, b.energy_b, b.cross, phi);
            EXPECT_NEAR(d + a, b.energy_a + b.energy_b, 1e-12 * (b.energy_a + b.energy_b));
        }
        cfg.phase = phi;
        const auto r = run_interference(cfg);
        for (std::size_t k = 0; k < r.bins.size(); ++k) {
            const auto& b = r.bins[k];
            EXPECT_NEAR(b.energy_diag + b.energy_antidiag, b.energy_a + b.energy_b,
                        1e-12 * (b.energy_a + b.energy_b));
            const auto [d, a] = analyzer_energies(b.energy_a, b.energy_b, b.cross, phi);
            EXPECT_NEAR(d, b.energy_diag, 1e-12);
            EXPECT_NEAR(a, b.energy_antidiag, 1e-12);
            // per time sample
            const auto& od = r.diag[k];
            const auto& oa = r.antidiag[k];
            const auto& xa = r.record_a.outputs[k];
            const auto& xb = r.record_b.outputs[k];
            for (std::size_t i = 0; i < od.size(); i += 17) {
                const double in = cfg.split * std::norm(xa[i]) + (1 - cfg.split) * std::norm(xb[i]);
                EXPECT_NEAR(std::norm(od[i]) + std::norm(oa[i]), in, 1e-12 * std::max(1.0, in));
            }
        }
    }
}

TEST(Interferometer, HalfTurnSwapsOutputs) {
    InterferometerConfig cfg{arm(2, 0.7), arm(2, 0.6)};
    const auto r0 = run_interference(cfg);
    cfg.phase = std::numbers::pi;
    const auto r1 = run_interference(cfg);
    for (std::size_t k = 0; k < r0.bins.size(); ++k) {
        EXPECT_NEAR(r1.bins[k].energy_diag, r0.bins[k].energy_antidiag, 1e-12);
        EXPECT_NEAR(r1.bins[k].energy_antidiag, r0.bins[k].energy_diag, 1e-12);
    }
}

TEST(Interferometer, VisibilityIgnoresCommonScale) {
    InterferometerConfig cfg{arm(2, 0.7), arm(2, 0.6)};
    const auto r = run_interference(cfg);
    cfg.arm_a.signal.energy = cfg.arm_b.signal.energy = 7.0;
    const auto s = run_interference(cfg);
    for (std::size_t k = 0; k < r.bins.size(); ++k)
        EXPECT_NEAR(s.bins[k].visibility, r.bins[k].visibility, 1e-12);
    EXPECT_NEAR(visibility(3.0, 5.0, cplx(1.0, 2.0)), visibility(30.0, 50.0, cplx(10.0, 20.0)), 1e-15);
}

TEST(Interferometer, ConcurrencyDoesNotChangeResult) {
    InterferometerConfig cfg{arm(2, 0.7), arm(2, 0.6)};
    const auto a = run_interference(cfg);
    cfg.concurrent = false;
    const auto b = run_interference(cfg);
    for (std::size_t k = 0; k < a.bins.size(); ++k) {
        EXPECT_EQ(a.bins[k].energy_diag, b.bins[k].energy_diag);
        EXPECT_EQ(a.bins[k].cross, b.bins[k].cross);
    }
}

TEST(Interferometer, InvalidConfigurationsAreRejected) {
    InterferometerConfig cfg{arm(2), arm(3)};
    EXPECT_THROW(run_interference(cfg), Error);
    cfg.arm_b = arm(2);
    cfg.split = 1.5;
    EXPECT_THROW(run_interference(cfg), Error);
    cfg.split = 0.5;
    cfg.phase = -0.1;
    EXPECT_THROW(run_interference(cfg), Error);
}
