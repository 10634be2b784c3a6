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

// Grid-independent description of a write/read experiment and its
// realisation on a concrete resolution.

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include "ramanbs/dynamics.hpp"
#include "ramanbs/error.hpp"
#include "ramanbs/network.hpp"
#include "ramanbs/pulses.hpp"

namespace ramanbs {

/// Pulse of a given shape scaled to a given energy. Imported shapes are
/// intensity traces whose time axis is re-centred on their peak.
struct PulseSpec {
    PulseShape shape = PulseShape::gaussian;
    double fwhm = 0.3;
    double energy = 1.0;
    std::optional<IntensityTrace> trace;

    /// Half width beyond which the amplitude stays below 1e-7 of its peak.
    double support() const {
        constexpr double floor = 1e-7;
        switch (shape) {
            case PulseShape::gaussian:
                return fwhm * std::sqrt(-std::log(floor) / (2.0 * std::numbers::ln2));
            case PulseShape::sech:
                return fwhm * std::log(2.0 / floor) / (2.0 * std::acosh(std::numbers::sqrt2));
            case PulseShape::imported: {
                require(trace.has_value(), ErrorKind::invalid_argument,
                        "imported pulse without a trace");
                const auto& y = trace->intensity;
                const auto peak = static_cast<std::size_t>(
                    std::max_element(y.begin(), y.end()) - y.begin());
                const double t = trace->grid.time(peak);
                return std::max(t - trace->grid.t_start(), trace->grid.t_end() - t) +
                       trace->grid.dt();
            }
        }
        return 0.0;
    }

    /// Peak |amplitude|^2 at this energy.
    double peak_intensity() const {
        switch (shape) {
            case PulseShape::gaussian:
                return energy / (fwhm * std::sqrt(std::numbers::pi / std::log(16.0)));
            case PulseShape::sech:
                return energy * std::acosh(std::numbers::sqrt2) / fwhm;
            case PulseShape::imported: {
                require(trace.has_value(), ErrorKind::invalid_argument,
                        "imported pulse without a trace");
                const auto& y = trace->intensity;
                double area = 0.0;
                const auto w = trace->grid.weights();
                for (std::size_t i = 0; i < y.size(); ++i) area += w[i] * std::max(0.0, y[i]);
                require(area > 0, ErrorKind::invalid_argument, "imported trace is empty");
                return energy * *std::max_element(y.begin(), y.end()) / area;
            }
        }
        return 0.0;
    }
};

namespace detail {

inline std::vector<cplx> sample_trace(const IntensityTrace& tr, const TimeGrid& grid,
                                      double center) {
    const auto& y = tr.intensity;
    const auto peak = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
    const double offset = tr.grid.time(peak) - center;  // trace time = grid time + offset
    if (tr.grid.t_start() - offset < grid.t_start() - 1e-9 ||
        tr.grid.t_end() - offset > grid.t_end() + 1e-9) {
        std::ostringstream os;
        os << "imported pulse centred at " << center << " ns is clipped by the grid";
        throw Error(ErrorKind::pulse_clipped, os.str());
    }
    const auto amp = amp_from_trace(y, tr.grid);
    std::vector<cplx> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double u = (grid.time(i) + offset - tr.grid.t_start()) / tr.grid.dt();
        if (u < 0 || u > static_cast<double>(y.size() - 1)) continue;
        const auto k = std::min(static_cast<std::size_t>(u), y.size() - 2);
        const double f = u - static_cast<double>(k);
        out[i] = (1.0 - f) * amp[k] + f * amp[k + 1];
    }
    return out;
}

}  // namespace detail

/// Realise a pulse on `grid`; the discrete energy equals spec.energy.
template <class Field>
Field realize_pulse(const PulseSpec& spec, const TimeGrid& grid, double center) {
    require(spec.energy >= 0 && std::isfinite(spec.energy), ErrorKind::invalid_argument,
            "pulse energy must be finite and non-negative");
    if (spec.shape == PulseShape::imported) {
        require(spec.trace.has_value(), ErrorKind::invalid_argument,
                "imported pulse without a trace");
        Field f(grid, detail::sample_trace(*spec.trace, grid, center));
        return with_energy(f, spec.energy);
    }
    auto f = make_pulse<Field>(spec.shape, grid, center, spec.fwhm, 1.0);
    return with_energy(f, spec.energy);
}

struct Resolution {
    double dt = 0.01;     // ns
    std::size_t nz = 201;

    bool operator==(const Resolution&) const = default;
};

/// Picks the grid for an experiment by halving dt and 1/(nz - 1) from the
/// base resolution. The time step is bounded through the per-step coupling
/// C |Omega|^2_max dt; the per-step error falls with the pulse area x = C E,
/// so the bound grows as x^(1/3). The spatial step is bounded through
/// C W_total dz^2, which sets the energy-conservation error of the scheme.
/// `grid_scale` refines further, uniformly.
struct ResolutionPolicy {
    Resolution base{};
    double max_step_product = 0.04;
    double max_space_product = 1e-4;
    int max_doublings = 8;
    double grid_scale = 1.0;

    Resolution scaled(Resolution r) const {
        require(grid_scale > 0 && std::isfinite(grid_scale), ErrorKind::invalid_argument,
                "grid scale must be positive");
        r.dt /= grid_scale;
        const double half = std::round(static_cast<double>(r.nz - 1) * grid_scale / 2.0);
        r.nz = 2 * static_cast<std::size_t>(std::max(1.0, half)) + 1;
        return r;
    }

    /// Resolution for a coupling, the strongest pulse (peak |Omega|^2 and
    /// energy) and the total control energy seen by the spin wave.
    Resolution required(double coupling, double peak_intensity, double peak_energy,
                        double total_energy) const {
        Resolution r = base;
        const double bound = max_step_product * std::cbrt(std::max(1.0, coupling * peak_energy));
        int m = 0;
        while (coupling * peak_intensity * r.dt > bound) {
            require(++m <= max_doublings, ErrorKind::resource,
                    "required time step is below the refinement limit");
            r.dt /= 2;
        }
        int k = 0;
        auto hz = [&] { return 1.0 / static_cast<double>(r.nz - 1); };
        // The spatial error grows like (C E)^2 once the pulse area is large.
        const double area = coupling * total_energy;
        while (area * std::max(1.0, area) * hz() * hz() > max_space_product) {
            require(++k <= max_doublings, ErrorKind::resource,
                    "required space step is below the refinement limit");
            r.nz = 2 * (r.nz - 1) + 1;
        }
        return scaled(r);
    }
};

inline Resolution finer(const Resolution& a, const Resolution& b) {
    return {std::min(a.dt, b.dt), std::max(a.nz, b.nz)};
}

/// One write pulse storing the signal, then identical-shape read pulses at
/// write_time + storage_time + k * rep_period.
struct ExperimentSpec {
    MemoryParams memory;
    PulseSpec signal;
    PulseSpec write;
    PulseSpec read;  // shape only; energies below
    std::vector<double> read_energies;
    double write_time = 0.0;
    double storage_time = 900.0;
    double rep_period = 12.5;
    /// Half width of the local time window around each pulse (ns); by
    /// default wide enough for every pulse to fall below 1e-7 of its peak.
    std::optional<double> window;
    DecoherenceModel decoherence;
    std::optional<double> end_time;

    double half_window() const {
        if (window) return *window;
        return std::max({signal.support(), write.support(), read.support()});
    }

    double read_time(std::size_t k) const {
        return write_time + storage_time + static_cast<double>(k) * rep_period;
    }

    void validate() const {
        memory.validate();
        decoherence.validate();
        require(storage_time > 0, ErrorKind::invalid_argument, "storage time must be positive");
        const double w = half_window();
        require(w > 0, ErrorKind::invalid_argument, "window must be positive");
        require(read_energies.size() <= 1 || rep_period > 2 * w, ErrorKind::invalid_argument,
                "read period must exceed the pulse window");
        require(storage_time > 2 * w, ErrorKind::invalid_argument,
                "storage time must exceed the pulse window");
        for (double e : read_energies)
            require(e >= 0 && std::isfinite(e), ErrorKind::invalid_argument,
                    "read energies must be finite and non-negative");
    }

    Resolution required_resolution(const ResolutionPolicy& policy) const {
        double peak = write.peak_intensity();
        double strongest = write.energy;
        double total = 0.0;
        PulseSpec r = read;
        for (double e : read_energies) {
            r.energy = e;
            const double p = r.peak_intensity();
            if (p > peak) {
                peak = p;
                strongest = e;
            }
            total += e;
        }
        return policy.required(memory.coupling, peak, strongest, std::max(write.energy, total));
    }
};

/// An experiment sampled on concrete grids.
struct RealizedExperiment {
    SignalField signal;
    ControlField write;
    SpaceGrid space;
    std::vector<ReadPulse> reads;
};

inline RealizedExperiment realize(const ExperimentSpec& spec, const Resolution& res) {
    spec.validate();
    const auto wg = TimeGrid::centered(spec.write_time, spec.half_window(), res.dt);
    RealizedExperiment out{realize_pulse<SignalField>(spec.signal, wg, spec.write_time),
                           realize_pulse<ControlField>(spec.write, wg, spec.write_time),
                           SpaceGrid(res.nz), {}};
    PulseSpec p = spec.read;
    for (std::size_t k = 0; k < spec.read_energies.size(); ++k) {
        const double t = spec.read_time(k);
        p.energy = spec.read_energies[k];
        const auto g = TimeGrid::centered(t, spec.half_window(), res.dt);
        out.reads.push_back({t, realize_pulse<ControlField>(p, g, t)});
    }
    return out;
}

/// The whole read train as a single control field, each pulse sampled
/// exactly as in `realize` (centres fall on grid nodes when the period is
/// a multiple of dt).
inline ControlField realize_train(const ExperimentSpec& spec, const Resolution& res) {
    spec.validate();
    require(!spec.read_energies.empty(), ErrorKind::invalid_argument, "empty read train");
    const double t0 = spec.read_time(0);
    const double t1 = spec.read_time(spec.read_energies.size() - 1);
    const auto half = static_cast<std::size_t>(std::llround(spec.half_window() / res.dt));
    const double start = t0 - static_cast<double>(half) * res.dt;
    auto n = static_cast<std::size_t>(std::llround((t1 - t0) / res.dt)) + 2 * half + 1;
    if (n % 2 == 0) ++n;
    const TimeGrid grid(start, res.dt, n);
    std::vector<cplx> s(n);
    PulseSpec p = spec.read;
    for (std::size_t k = 0; k < spec.read_energies.size(); ++k) {
        const double t = spec.read_time(k);
        p.energy = spec.read_energies[k];
        const auto local = TimeGrid::centered(t, spec.half_window(), res.dt);
        const auto f = realize_pulse<ControlField>(p, local, t);
        const auto off = static_cast<std::ptrdiff_t>(
            std::llround((local.t_start() - start) / res.dt));
        for (std::size_t i = 0; i < f.size(); ++i) {
            const auto j = off + static_cast<std::ptrdiff_t>(i);
            if (j >= 0 && j < static_cast<std::ptrdiff_t>(n)) s[static_cast<std::size_t>(j)] += f[i];
        }
    }
    return ControlField(grid, std::move(s));
}

inline std::vector<double> read_times(const ExperimentSpec& spec) {
    std::vector<double> t;
    for (std::size_t k = 0; k < spec.read_energies.size(); ++k) t.push_back(spec.read_time(k));
    return t;
}

struct SimulationResult {
    ExperimentRecord record;
    Resolution resolution;
};

/// Sequential simulation (or the continuous-train variant) at `res`.
inline ExperimentRecord simulate_at(const ExperimentSpec& spec, const Resolution& res,
                                    const SolverOptions& opts = {}, bool continuous = false) {
    const auto ex = realize(spec, res);
    if (continuous && !spec.read_energies.empty()) {
        const auto train = realize_train(spec, res);
        const auto times = read_times(spec);
        return equivalent_train_run(ex.signal, ex.write, spec.write_time, ex.space, train, times,
                                    spec.memory, spec.decoherence, opts, spec.end_time);
    }
    return run_multipulse(ex.signal, ex.write, spec.write_time, ex.space, ex.reads, spec.memory,
                          spec.decoherence, opts, spec.end_time);
}

inline SimulationResult simulate(const ExperimentSpec& spec, const ResolutionPolicy& policy = {},
                                 const SolverOptions& opts = {}, bool continuous = false) {
    const auto res = spec.required_resolution(policy);
    return {simulate_at(spec, res, opts, continuous), res};
}

}  // namespace ramanbs
