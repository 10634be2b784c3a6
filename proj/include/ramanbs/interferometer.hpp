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

// Two independent memories in a polarisation interferometer. The input
// splitter sends amplitude sqrt(s) to arm a and sqrt(1 - s) to arm b; the
// analyser projects onto
//
//     O_D = (sqrt(s) O_a + e^{i phi} sqrt(1 - s) O_b) / sqrt(2)
//     O_A = (sqrt(s) O_a - e^{i phi} sqrt(1 - s) O_b) / sqrt(2)
//
// so that |O_D|^2 + |O_A|^2 equals the light arriving from both arms.

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "ramanbs/error.hpp"
#include "ramanbs/experiment.hpp"
#include "ramanbs/parallel.hpp"

namespace ramanbs {

struct InterferometerConfig {
    ExperimentSpec arm_a;
    ExperimentSpec arm_b;
    double phase = 0.0;  // radians, [0, 2 pi)
    double split = 0.5;  // amplitude-squared fraction sent to arm a
    /// Run the two arms on separate threads.
    bool concurrent = true;

    void validate() const {
        require(split >= 0 && split <= 1, ErrorKind::invalid_argument,
                "amplitude split must lie in [0, 1]");
        require(phase >= 0 && phase < 2 * std::numbers::pi, ErrorKind::invalid_argument,
                "relative phase must lie in [0, 2 pi)");
        require(arm_a.read_energies.size() == arm_b.read_energies.size(),
                ErrorKind::invalid_argument, "arms must have the same number of reads");
    }
};

struct InterferenceBin {
    double time = 0.0;
    double energy_a = 0.0;  // arriving from arm a (split included)
    double energy_b = 0.0;
    std::complex<double> cross{};  // sum w conj(a) b, taken at phi = 0
    double energy_diag = 0.0;
    double energy_antidiag = 0.0;
    double visibility = 0.0;
};

struct InterferenceResult {
    std::vector<SignalField> diag;      // one trace per read window
    std::vector<SignalField> antidiag;
    std::vector<InterferenceBin> bins;
    InterferenceBin total;
    ExperimentRecord record_a;
    ExperimentRecord record_b;
    Resolution resolution;
};

/// Fringe visibility over phi of the diagonal output energy.
inline double visibility(double ea, double eb, std::complex<double> cross) {
    const double sum = ea + eb;
    return sum > 0 ? 2.0 * std::abs(cross) / sum : 0.0;
}

/// Diagonal and antidiagonal energies of one window at phase phi.
inline std::pair<double, double> analyzer_energies(double ea, double eb,
                                                   std::complex<double> cross, double phi) {
    const double interference = std::real(std::polar(1.0, phi) * cross);
    return {0.5 * (ea + eb) + interference, 0.5 * (ea + eb) - interference};
}

inline InterferenceResult run_interference(const InterferometerConfig& cfg,
                                           const ResolutionPolicy& policy = {},
                                           const SolverOptions& opts = {}) {
    cfg.validate();
    const Resolution res =
        finer(cfg.arm_a.required_resolution(policy), cfg.arm_b.required_resolution(policy));
    std::vector<std::optional<ExperimentRecord>> recs(2);
    detail::parallel_for(2, cfg.concurrent ? 2u : 1u, [&](std::size_t i) {
        recs[i] = simulate_at(i == 0 ? cfg.arm_a : cfg.arm_b, res, opts);
    });

    InterferenceResult out{{}, {}, {}, {}, std::move(*recs[0]), std::move(*recs[1]), res};
    const double sa = std::sqrt(cfg.split);
    const std::complex<double> sb = std::polar(std::sqrt(1.0 - cfg.split), cfg.phase);
    const double r2 = std::numbers::sqrt2 / 2.0;
    for (std::size_t k = 0; k < out.record_a.outputs.size(); ++k) {
        const auto& oa = out.record_a.outputs[k];
        const auto& ob = out.record_b.outputs[k];
        require_same_grid(oa.grid(), ob.grid(), "interference");
        const auto w = oa.grid().weights();
        std::vector<cplx> d(oa.size()), a(oa.size());
        InterferenceBin bin;
        bin.time = out.record_a.bins[k].time;
        for (std::size_t i = 0; i < oa.size(); ++i) {
            const cplx xa = sa * oa[i];
            const cplx xb = sb * ob[i];
            d[i] = r2 * (xa + xb);
            a[i] = r2 * (xa - xb);
            bin.energy_a += w[i] * std::norm(xa);
            bin.energy_b += w[i] * std::norm(xb);
            bin.cross += w[i] * std::conj(xa) * (ob[i] * std::sqrt(1.0 - cfg.split));
        }
        bin.energy_diag = energy(SignalField(oa.grid(), d));
        bin.energy_antidiag = energy(SignalField(oa.grid(), a));
        bin.visibility = visibility(bin.energy_a, bin.energy_b, bin.cross);
        out.total.energy_a += bin.energy_a;
        out.total.energy_b += bin.energy_b;
        out.total.cross += bin.cross;
        out.total.energy_diag += bin.energy_diag;
        out.total.energy_antidiag += bin.energy_antidiag;
        out.bins.push_back(bin);
        out.diag.emplace_back(oa.grid(), std::move(d));
        out.antidiag.emplace_back(oa.grid(), std::move(a));
    }
    out.total.visibility = visibility(out.total.energy_a, out.total.energy_b, out.total.cross);
    return out;
}

}  // namespace ramanbs
