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
#include <sstream>

#include "ramanbs/modes.hpp"
#include "ramanbs/pulses.hpp"

using namespace ramanbs;

namespace {

MemoryParams with_coupling(double c) {
    MemoryParams p;
    p.coupling = c;
    return p;
}

struct Fixture {
    TimeGrid grid = TimeGrid::centered(0.0, 1.2, 0.01);
    SpaceGrid space{201};
    MemoryParams params = with_coupling(0.57);
    ControlField control = with_energy(make_gaussian_pulse<ControlField>(grid, 0.0, 0.3, 1.0), 1.0);
    KernelMatrix storage = build_kernel(KernelKind::storage, control, space, params);
    ModeDecomposition modes = decompose(storage);
};

const Fixture& fx() {
    static const Fixture f;
    return f;
}

cplx inner(const ModeDecomposition& d, std::size_t a, std::size_t b) {
    cplx acc = 0.0;
    for (Eigen::Index i = 0; i < d.input_modes.rows(); ++i)
        acc += d.input_weights[static_cast<std::size_t>(i)] *
               std::conj(d.input_modes(i, static_cast<Eigen::Index>(a))) *
               d.input_modes(i, static_cast<Eigen::Index>(b));
    return acc;
}

SignalField probe(const TimeGrid& g) {
    std::vector<cplx> s(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double t = g.time(i);
        s[i] = std::exp(-t * t / 0.05) * cplx(1.0 + t, 0.5 * t * t);
    }
    return SignalField(g, s);
}

}  // namespace

TEST(Modes, ZeroKernelHasNoModes) {
    const auto& f = fx();
    const auto k = build_kernel(KernelKind::storage, ControlField::zeros(f.grid), SpaceGrid(21),
                                f.params);
    const auto d = decompose(k, 0.0);
    for (double s : d.singular_values) EXPECT_EQ(s, 0.0);
    EXPECT_EQ(decompose(k).size(), 0u);
}

TEST(Modes, InputModesAreOrthonormal) {
    const auto& d = fx().modes;
    ASSERT_GE(d.size(), 3u);
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b)
            EXPECT_NEAR(std::abs(inner(d, a, b) - (a == b ? 1.0 : 0.0)), 0.0, 1e-8);
    EXPECT_NEAR(std::abs(mode_overlap(input_mode_field(d, 0), d, 0)), 1.0, 1e-8);
    EXPECT_NEAR(std::abs(mode_overlap(input_mode_field(d, 0), d, 1)), 0.0, 1e-8);
}

TEST(Modes, SingularValuesAreOrderedAndPassive) {
    const auto& d = fx().modes;
    for (std::size_t k = 0; k < d.size(); ++k) {
        EXPECT_LE(d.singular_values[k], 1.0 + 1e-6);
        EXPECT_NEAR(d.reflectivities[k], d.singular_values[k] * d.singular_values[k], 1e-15);
        if (k > 0) {
            EXPECT_LE(d.singular_values[k], d.singular_values[k - 1]);
        }
    }
}

TEST(Modes, ReconstructionRecoversKernel) {
    const auto& f = fx();
    const auto full = decompose(f.storage, 0.0);
    const double scale = f.storage.matrix().cwiseAbs().maxCoeff();
    EXPECT_LT((reconstruct(full) - f.storage.matrix()).cwiseAbs().maxCoeff() / scale, 1e-10);
}

TEST(Modes, BesselInequalityForProjections) {
    const auto& d = fx().modes;
    const auto a = probe(fx().grid);
    double sum = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k) sum += std::norm(mode_overlap(a, d, k));
    EXPECT_LE(sum, energy(a) * (1.0 + 1e-12));

    // A field inside the span of the modes is fully accounted for.
    std::vector<cplx> s(fx().grid.size());
    const cplx c0(0.6, 0.2), c1(-0.3, 0.5);
    for (std::size_t i = 0; i < s.size(); ++i)
        s[i] = c0 * d.input_modes(static_cast<Eigen::Index>(i), 0) +
               c1 * d.input_modes(static_cast<Eigen::Index>(i), 1);
    const SignalField in_span(fx().grid, s);
    double parts = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k) parts += std::norm(mode_overlap(in_span, d, k));
    EXPECT_NEAR(parts, energy(in_span), 1e-10);
}

TEST(Modes, LeadingReflectivityIsStorageOfLeadingMode) {
    const auto& f = fx();
    const auto mode = input_mode_field(f.modes, 0);
    SolverOptions o;
    o.check_convergence = false;
    const auto st = solve_storage(mode, f.control, f.params, f.space, o);
    EXPECT_NEAR(excitation(st.spin_wave) / energy(mode), f.modes.reflectivities[0], 1e-5);
}

TEST(Modes, BeamSplitterBookkeeping) {
    const auto& f = fx();
    const auto a = probe(f.grid);
    SolverOptions o;
    o.check_convergence = false;
    const auto st = solve_storage(a, f.control, f.params, f.space, o);
    // Stored spin wave from the modes, using orthogonality of output modes.
    double predicted = 0.0;
    for (std::size_t k = 0; k < f.modes.size(); ++k)
        predicted += f.modes.reflectivities[k] * std::norm(mode_overlap(a, f.modes, k));
    EXPECT_NEAR(predicted / excitation(st.spin_wave), 1.0, 1e-4);
}

TEST(Modes, ReflectivityGrowsWithControlEnergy) {
    const auto& f = fx();
    double prev = 0.0;
    for (double e : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        const auto ctl = with_energy(f.control, e);
        const auto d = decompose(build_kernel(KernelKind::storage, ctl, f.space, f.params));
        EXPECT_GT(d.reflectivities[0], prev) << "E = " << e;
        prev = d.reflectivities[0];
    }
}

TEST(Modes, ControlPhaseDoesNotChangeReflectivities) {
    const auto& f = fx();
    const auto d = decompose(build_kernel(KernelKind::storage, f.control.scaled(std::polar(1.0, 1.3)),
                                          f.space, f.params));
    for (std::size_t k = 0; k < 4; ++k)
        EXPECT_NEAR(d.reflectivities[k], f.modes.reflectivities[k], 1e-12);
}

TEST(Modes, StorageAndRetrievalShareReflectivitySpectrum) {
    // Forward retrieval with the time-reversed control is the adjoint
    // problem, so both kernels have the same singular values.
    const auto& f = fx();
    std::vector<cplx> rev(f.control.size());
    for (std::size_t i = 0; i < rev.size(); ++i) rev[i] = f.control[rev.size() - 1 - i];
    const auto d = decompose(build_kernel(KernelKind::retrieval, ControlField(f.grid, rev), f.space,
                                          f.params));
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(d.reflectivities[k], f.modes.reflectivities[k], 1e-4);
}

TEST(Modes, RetrievalOverlapUsesSpinWaves) {
    const auto& f = fx();
    const auto d = decompose(build_kernel(KernelKind::retrieval, f.control, f.space, f.params));
    std::vector<cplx> b(f.space.size());
    for (std::size_t j = 0; j < b.size(); ++j) b[j] = d.input_modes(static_cast<Eigen::Index>(j), 0);
    EXPECT_NEAR(std::abs(mode_overlap(SpinWave(f.space, b), d, 0)), 1.0, 1e-8);
    try {
        mode_overlap(probe(f.grid), d, 0);
        FAIL() << "expected invalid_argument";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::invalid_argument);
    }
}

TEST(Modes, OutOfRangeIndexIsReported) {
    const auto& d = fx().modes;
    try {
        mode_overlap(probe(fx().grid), d, d.size());
        FAIL() << "expected index_out_of_range";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::index_out_of_range);
    }
}

TEST(Modes, CsvHasCoordinateAndComplexColumns) {
    const auto& d = fx().modes;
    std::ostringstream os;
    write_modes_csv(os, d, 2);
    std::istringstream in(os.str());
    std::string header, first;
    std::getline(in, header);
    std::getline(in, first);
    EXPECT_EQ(header, "time_ns,re_mode0,im_mode0,re_mode1,im_mode1");
    EXPECT_EQ(std::count(first.begin(), first.end(), ','), 4);
    std::ostringstream zs;
    write_modes_csv(zs, d, 1, true);
    EXPECT_EQ(zs.str().substr(0, 2), "z,");
}
