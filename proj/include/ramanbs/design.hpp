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

// Inverse problems on the forward model. Every inversion is a 1-D
// bracketed root find on a map checked to be monotone: coupling against
// storage efficiency, and read energy against the fraction of the current
// spin wave a read extracts.

#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "ramanbs/dynamics.hpp"
#include "ramanbs/error.hpp"
#include "ramanbs/experiment.hpp"
#include "ramanbs/network.hpp"
#include "ramanbs/roots.hpp"

namespace ramanbs {

struct CalibrationTarget {
    double storage_eff = 0.43;
    /// Omitted: only the coupling is calibrated.
    std::optional<double> single_read_eff = 0.565;
};

struct CalibrationOptions {
    double coupling_start = 0.125;
    double coupling_cap = 64.0;
    double growth = 2.0;
    /// Ladder start and cap for read energies, as products C * E.
    double read_product_start = 0.125;
    double read_product_cap = 16.0;
    double ftol = 1e-4;
};

struct CalibrationResult {
    double coupling = 0.0;
    double read_energy = 0.0;
    double storage_efficiency = 0.0;
    double read_efficiency = 0.0;
    Resolution resolution;
};

namespace detail {

/// Storage efficiency of spec.write at coupling c, on the grid the policy
/// picks for that coupling (or on `fixed`).
inline double storage_efficiency(ExperimentSpec spec, double c, const ResolutionPolicy& policy,
                                 std::optional<Resolution> fixed = std::nullopt) {
    spec.memory.coupling = c;
    spec.read_energies.clear();
    const auto res = fixed ? *fixed : spec.required_resolution(policy);
    const auto ex = realize(spec, res);
    SolverOptions opts;
    opts.check_convergence = false;
    const auto st = solve_storage(ex.signal, ex.write, spec.memory, ex.space, opts);
    return excitation(st.spin_wave) / energy(ex.signal);
}

/// Fraction of `b` extracted by one read pulse of energy e.
inline double read_efficiency(const ExperimentSpec& spec, const SpinWave& b, double e,
                              double dt, const SolverOptions& opts) {
    const double ex = excitation(b);
    if (ex <= 0) return 0.0;
    PulseSpec p = spec.read;
    p.energy = e;
    const double t = spec.read_time(0);
    const auto g = TimeGrid::centered(t, spec.half_window(), dt);
    const auto r = solve_retrieval(b, realize_pulse<ControlField>(p, g, t), spec.memory, opts);
    return energy(r.output) / ex;
}

inline std::string fmt(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

}  // namespace detail

/// Fit the coupling to the storage target (with spec.write's energy held
/// fixed), then the read energy to the single-read target.
inline CalibrationResult calibrate(const CalibrationTarget& target, ExperimentSpec spec,
                                   const ResolutionPolicy& policy = {},
                                   const CalibrationOptions& copt = {}) {
    require(target.storage_eff >= 0 && target.storage_eff < 1, ErrorKind::invalid_argument,
            "storage target must lie in [0, 1)");
    require(spec.write.energy > 0, ErrorKind::invalid_argument,
            "calibration needs a write pulse with positive energy");
    CalibrationResult out;
    if (target.storage_eff == 0.0) {
        out.resolution = policy.scaled(policy.base);
        return out;
    }

    auto s_of = [&](double c) { return detail::storage_efficiency(spec, c, policy); };
    const auto scan = scan_increasing(s_of, 0.0, copt.coupling_start, copt.growth,
                                      copt.coupling_cap, target.storage_eff);
    if (!scan.bracket) {
        throw Error(ErrorKind::infeasible_target,
                    "storage efficiency " + detail::fmt(target.storage_eff) +
                        " is not reached up to coupling " + detail::fmt(copt.coupling_cap) +
                        " (maximum " + detail::fmt(scan.best_f) + ")");
    }
    ExperimentSpec hi = spec;
    hi.memory.coupling = scan.bracket->hi;
    hi.read_energies.clear();
    const Resolution bracket_res = hi.required_resolution(policy);
    auto s_fixed = [&](double c) { return detail::storage_efficiency(spec, c, policy, bracket_res); };
    Bracket b = *scan.bracket;
    b.f_lo = b.lo == 0.0 ? 0.0 : s_fixed(b.lo);
    b.f_hi = s_fixed(b.hi);
    const auto root = bisect_increasing(s_fixed, b, target.storage_eff, copt.ftol);
    out.coupling = root.x;
    spec.memory.coupling = root.x;
    out.storage_efficiency = detail::storage_efficiency(spec, root.x, policy);
    out.resolution = spec.required_resolution(policy);
    if (!target.single_read_eff) return out;

    const double eta = *target.single_read_eff;
    require(eta > 0 && eta < 1, ErrorKind::invalid_argument, "read target must lie in (0, 1)");
    const double c = root.x;
    SolverOptions opts;
    opts.check_convergence = false;

    std::map<std::pair<double, std::size_t>, SpinWave> stored;
    auto res_for = [&](double e) {
        ExperimentSpec s = spec;
        s.read_energies = {e};
        return s.required_resolution(policy);
    };
    auto eta_at = [&](double e, const Resolution& res) {
        const auto key = std::make_pair(res.dt, res.nz);
        auto it = stored.find(key);
        if (it == stored.end()) {
            const auto ex = realize(spec, res);
            auto st = solve_storage(ex.signal, ex.write, spec.memory, ex.space, opts);
            it = stored.emplace(key, std::move(st.spin_wave)).first;
        }
        return detail::read_efficiency(spec, it->second, e, res.dt, opts);
    };
    const auto escan = scan_increasing([&](double e) { return eta_at(e, res_for(e)); }, 0.0,
                                       copt.read_product_start / c, copt.growth,
                                       copt.read_product_cap / c, eta);
    if (!escan.bracket) {
        throw Error(ErrorKind::infeasible_target,
                    "single-read efficiency " + detail::fmt(eta) + " is not reached (maximum " +
                        detail::fmt(escan.best_f) + ")");
    }
    const Resolution eres = res_for(escan.bracket->hi);
    auto e_fixed = [&](double e) { return eta_at(e, eres); };
    Bracket eb = *escan.bracket;
    eb.f_lo = eb.lo == 0.0 ? 0.0 : e_fixed(eb.lo);
    eb.f_hi = e_fixed(eb.hi);
    const auto eroot = bisect_increasing(e_fixed, eb, eta, copt.ftol);
    out.read_energy = eroot.x;
    out.resolution = res_for(eroot.x);
    out.read_efficiency = eta_at(eroot.x, out.resolution);
    return out;
}

/// Requested output distribution over read bins. Absolute fractions are
/// relative to the input signal energy. Relative weights are normalised
/// and scaled so that the bins together take `relative_total` of the
/// excitation present at the first read.
struct TargetDistribution {
    enum class Mode { absolute, relative };
    Mode mode = Mode::absolute;
    std::vector<double> fractions;
    double relative_total = 1.0;

    void validate() const {
        require(!fractions.empty(), ErrorKind::invalid_argument, "empty target distribution");
        double sum = 0.0;
        for (double f : fractions) {
            require(f >= 0 && std::isfinite(f), ErrorKind::invalid_argument,
                    "target fractions must be finite and non-negative");
            sum += f;
        }
        require(sum > 0, ErrorKind::invalid_argument, "target distribution is all zero");
        require(relative_total > 0 && relative_total <= 1, ErrorKind::invalid_argument,
                "relative total must lie in (0, 1]");
    }
};

/// Normalised weights rounded to 12 significant digits, so that targets
/// differing only by a common scale give identical designs.
inline std::vector<double> normalized_weights(std::span<const double> w) {
    double sum = 0.0;
    for (double x : w) sum += x;
    std::vector<double> out;
    for (double x : w) {
        std::ostringstream os;
        os.precision(12);
        os << x / sum;
        out.push_back(std::stod(os.str()));
    }
    return out;
}

struct BinFeasibility {
    double wanted = 0.0;     // relative to input
    double available = 0.0;  // excitation in the memory when the read arrives
    double eta = 0.0;
    bool feasible = true;
};

struct FeasibilityReport {
    std::vector<BinFeasibility> bins;
    double leftover = 0.0;  // excitation remaining after the last read
    bool feasible = true;
};

/// Recursion on the remaining excitation: bin k can take at most what is
/// left after the earlier bins, decayed to its read time.
inline FeasibilityReport required_reflectivities(const TargetDistribution& target,
                                                 double storage_eff,
                                                 const DecoherenceModel& model,
                                                 double first_gap, double spacing) {
    target.validate();
    model.validate();
    require(storage_eff >= 0 && storage_eff <= 1, ErrorKind::invalid_argument,
            "storage efficiency must lie in [0, 1]");
    FeasibilityReport rep;
    double avail = storage_eff * model.excitation_factor(first_gap);
    std::vector<double> wanted = target.fractions;
    if (target.mode == TargetDistribution::Mode::relative) {
        const auto w = normalized_weights(target.fractions);
        for (std::size_t k = 0; k < w.size(); ++k) wanted[k] = target.relative_total * avail * w[k];
    }
    const double f = model.excitation_factor(spacing);
    for (std::size_t k = 0; k < wanted.size(); ++k) {
        if (k > 0) avail *= f;
        BinFeasibility b;
        b.wanted = wanted[k];
        b.available = avail;
        b.eta = avail > 0 ? wanted[k] / avail : (wanted[k] > 0 ? INFINITY : 0.0);
        b.feasible = b.eta <= 1.0 + 1e-12;
        rep.feasible = rep.feasible && b.feasible;
        rep.bins.push_back(b);
        avail = std::max(0.0, avail - wanted[k]);
    }
    rep.leftover = avail;
    return rep;
}

struct DesignOptions {
    double read_product_start = 0.0625;
    /// Largest C * E tried for a single read.
    double read_product_cap = 64.0;
    double growth = 2.0;
    double ftol = 1e-7;
    int max_passes = 4;
};

struct DesignedEnergies {
    std::vector<double> energies;
    std::vector<double> etas;  // achieved, on the design grid
    Resolution resolution;
};

namespace detail {

/// Bracket around a previous solution `hint`, if it still brackets eta.
template <class F>
std::optional<Bracket> bracket_near(F&& f, double hint, double eta) {
    if (!(hint > 0)) return std::nullopt;
    const double lo = hint / 1.1, hi = hint * 1.1;
    const double flo = f(lo), fhi = f(hi);
    if (flo <= eta && eta <= fhi) return Bracket{lo, flo, hi, fhi};
    return std::nullopt;
}

inline DesignedEnergies design_pass(const ExperimentSpec& spec, std::span<const double> etas,
                                    const Resolution& res, const DesignOptions& dopt,
                                    std::span<const double> hints = {}) {
    SolverOptions opts;
    opts.check_convergence = false;
    const double c = spec.memory.coupling;
    ExperimentSpec write_only = spec;
    write_only.read_energies.clear();
    const auto ex = realize(write_only, res);
    SpinWave b = solve_storage(ex.signal, ex.write, spec.memory, ex.space, opts).spin_wave;
    double t = spec.write_time;
    DesignedEnergies out;
    out.resolution = res;
    PulseSpec p = spec.read;
    for (std::size_t k = 0; k < etas.size(); ++k) {
        const double tk = spec.read_time(k);
        b = b.scaled(spec.decoherence.amplitude_factor(tk - t));
        t = tk;
        const double eta = etas[k];
        require(eta >= 0 && eta <= 1, ErrorKind::invalid_argument,
                "reflectivities must lie in [0, 1]");
        const auto g = TimeGrid::centered(tk, spec.half_window(), res.dt);
        auto pulse_at = [&](double e) {
            p.energy = e;
            return realize_pulse<ControlField>(p, g, tk);
        };
        const double ex_before = excitation(b);
        auto eta_of = [&](double e) {
            if (ex_before <= 0) return 0.0;
            return energy(solve_retrieval(b, pulse_at(e), spec.memory, opts).output) / ex_before;
        };
        double e = 0.0;
        if (eta > 0) {
            require(c > 0, ErrorKind::saturation, "no read pulse extracts anything at zero coupling");
            auto bracket = bracket_near(eta_of, k < hints.size() ? hints[k] : 0.0, eta);
            if (!bracket) {
                const auto scan = scan_increasing(eta_of, 0.0, dopt.read_product_start / c,
                                                  dopt.growth, dopt.read_product_cap / c, eta);
                if (!scan.bracket) {
                    throw Error(ErrorKind::saturation,
                                "read " + std::to_string(k) + ": reflectivity " + fmt(eta) +
                                    " exceeds the single-pulse maximum " + fmt(scan.best_f) +
                                    " at energy " + fmt(scan.best_x));
                }
                bracket = scan.bracket;
            }
            e = bisect_increasing(eta_of, *bracket, eta, dopt.ftol).x;
        }
        const auto r = solve_retrieval(b, pulse_at(e), spec.memory, opts);
        out.energies.push_back(e);
        out.etas.push_back(ex_before > 0 ? energy(r.output) / ex_before : 0.0);
        b = r.remaining;
    }
    return out;
}

}  // namespace detail

/// Read energies such that read k extracts etas[k] of the spin wave it
/// finds (after the earlier reads and the decay in between). The grid is
/// re-chosen from the resulting energies until it no longer changes.
inline DesignedEnergies energies_from_reflectivities(std::span<const double> etas,
                                                     const ExperimentSpec& spec,
                                                     const ResolutionPolicy& policy = {},
                                                     const DesignOptions& dopt = {}) {
    spec.validate();
    ExperimentSpec s = spec;
    s.read_energies.clear();
    Resolution res = s.required_resolution(policy);
    std::vector<double> hints;
    for (int pass = 0; pass < dopt.max_passes; ++pass) {
        auto d = detail::design_pass(spec, etas, res, dopt, hints);
        s.read_energies = d.energies;
        const Resolution next = finer(res, s.required_resolution(policy));
        if (next == res) return d;
        res = next;
        hints = d.energies;
    }
    return detail::design_pass(spec, etas, res, dopt, hints);
}

struct DesignResult {
    FeasibilityReport feasibility;
    std::vector<double> etas;
    DesignedEnergies designed;
    ExperimentRecord predicted;
};

/// Full design: feasibility from the simulated storage efficiency, read
/// energies, and a converged forward run of the resulting plan.
inline DesignResult design(const TargetDistribution& target, ExperimentSpec spec,
                           const ResolutionPolicy& policy = {}, const DesignOptions& dopt = {}) {
    spec.read_energies.clear();
    const auto stored = simulate(spec, policy);
    DesignResult out;
    out.feasibility = required_reflectivities(target, stored.record.storage_efficiency(),
                                              spec.decoherence, spec.storage_time,
                                              spec.rep_period);
    if (!out.feasibility.feasible) {
        std::ostringstream os;
        os << "target distribution is infeasible:";
        for (std::size_t k = 0; k < out.feasibility.bins.size(); ++k) {
            const auto& b = out.feasibility.bins[k];
            if (!b.feasible) os << " bin " << k << " wants " << b.wanted << " of " << b.available;
        }
        throw Error(ErrorKind::infeasible_target, os.str());
    }
    for (const auto& b : out.feasibility.bins) out.etas.push_back(std::min(1.0, b.eta));
    out.designed = energies_from_reflectivities(out.etas, spec, policy, dopt);
    spec.read_energies = out.designed.energies;
    out.predicted = simulate_at(spec, out.designed.resolution);
    return out;
}

struct WState {
    std::vector<std::complex<double>> amplitudes;  // sqrt of bin efficiency
    std::vector<std::complex<double>> normalized;
    double success_probability = 0.0;
};

/// Time-bin amplitudes of the retrieved single excitation (flat phase).
inline WState w_state_amplitudes(const ExperimentRecord& rec) {
    require(!rec.bins.empty(), ErrorKind::invalid_argument, "no read bins");
    WState w;
    for (const auto& b : rec.bins) {
        w.amplitudes.emplace_back(std::sqrt(b.efficiency), 0.0);
        w.success_probability += b.efficiency;
    }
    require(w.success_probability >= 1e-12, ErrorKind::degenerate,
            "total output efficiency is too small to normalise");
    const double norm = std::sqrt(w.success_probability);
    for (const auto& a : w.amplitudes) w.normalized.push_back(a / norm);
    return w;
}

}  // namespace ramanbs
