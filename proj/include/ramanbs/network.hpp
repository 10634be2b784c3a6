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

// Multi-pulse readout. A write interaction stores the signal, the spin wave
// decays analytically in the dark, and each read pulse acts as one more
// beam splitter in a cascade.

#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <sstream>
#include <vector>

#include "ramanbs/dynamics.hpp"
#include "ramanbs/error.hpp"
#include "ramanbs/field.hpp"

namespace ramanbs {

/// Exponential spin-wave decay, kappa(t) = kappa_ref^(t / t_ref).
/// `reference` says whether kappa_ref is quoted for the amplitude or for
/// the stored excitation (|B|^2).
struct DecoherenceModel {
    enum class Reference { amplitude, excitation };

    double kappa_ref = 0.7;
    double t_ref = 900.0;
    Reference reference = Reference::amplitude;

    static DecoherenceModel none() { return {1.0, 900.0, Reference::amplitude}; }

    void validate() const {
        require(kappa_ref > 0 && kappa_ref <= 1, ErrorKind::invalid_argument,
                "decoherence: kappa_ref must lie in (0, 1]");
        require(t_ref > 0 && std::isfinite(t_ref), ErrorKind::invalid_argument,
                "decoherence: t_ref must be positive");
    }

    double amplitude_factor(double t) const {
        require(t >= 0, ErrorKind::invalid_argument, "decoherence: negative time");
        const double x = std::pow(kappa_ref, t / t_ref);
        return reference == Reference::amplitude ? x : std::sqrt(x);
    }

    double excitation_factor(double t) const {
        const double a = amplitude_factor(t);
        return a * a;
    }
};

inline SpinWave apply_decoherence(const SpinWave& b, double t, const DecoherenceModel& model) {
    model.validate();
    return b.scaled(model.amplitude_factor(t));
}

/// A read pulse on its own time grid; `time` is the pulse centre (ns).
struct ReadPulse {
    double time;
    ControlField control;
};

struct BinRecord {
    std::size_t index = 0;
    double time = 0.0;
    double read_energy = 0.0;
    double output_energy = 0.0;
    /// Output relative to the input signal energy.
    double efficiency = 0.0;
    /// Output relative to the excitation present just before the read.
    double retrieval_efficiency = 0.0;
    double excitation_before = 0.0;
    double excitation_after = 0.0;
    /// Accumulated excitation decay factor since storage.
    double decay_factor = 1.0;
};

struct ExperimentRecord {
    double input_energy = 0.0;
    double transmitted_energy = 0.0;
    double stored_excitation = 0.0;
    std::vector<BinRecord> bins;
    double remaining_excitation = 0.0;
    double remaining_decay_factor = 1.0;
    double error_estimate = 0.0;
    std::optional<SignalField> transmitted;
    /// Retrieved light: one trace per read (sequential runs) or a single
    /// trace for a continuous train.
    std::vector<SignalField> outputs;
    std::optional<SpinWave> final_spin_wave;

    double storage_efficiency() const {
        return input_energy > 0 ? stored_excitation / input_energy : 0.0;
    }

    /// Retrieved fraction of the excitation present at the first read.
    double combined_readout() const {
        if (bins.empty() || bins.front().excitation_before <= 0) return 0.0;
        double total = 0.0;
        for (const auto& b : bins) total += b.output_energy;
        return total / bins.front().excitation_before;
    }

    /// |input - (transmitted + decay-corrected outputs + remaining)| / input.
    double ledger_residual() const {
        if (input_energy <= 0) return 0.0;
        double sum = transmitted_energy + remaining_excitation / remaining_decay_factor;
        for (const auto& b : bins) sum += b.output_energy / b.decay_factor;
        return std::abs(input_energy - sum) / input_energy;
    }
};

namespace detail {

inline void require_increasing(std::span<const double> times, double after, const char* what) {
    double prev = after;
    for (double t : times) {
        require(t > prev, ErrorKind::invalid_argument,
                std::string(what) + ": read times must be strictly increasing and after the write");
        prev = t;
    }
}

inline ExperimentRecord store(const SignalField& a_in, const ControlField& write,
                              const SpaceGrid& space, const MemoryParams& params,
                              const SolverOptions& opts) {
    auto st = solve_storage(a_in, write, params, space, opts);
    ExperimentRecord rec;
    rec.input_energy = energy(a_in);
    rec.transmitted_energy = energy(st.transmitted);
    rec.stored_excitation = excitation(st.spin_wave);
    rec.error_estimate = st.error_estimate;
    rec.transmitted = std::move(st.transmitted);
    rec.final_spin_wave = std::move(st.spin_wave);
    return rec;
}

inline void finish(ExperimentRecord& rec, SpinWave b, double t, std::optional<double> end_time,
                   double decay, const DecoherenceModel& model) {
    if (end_time) {
        require(*end_time >= t, ErrorKind::invalid_argument, "end time precedes the last event");
        const double f = model.amplitude_factor(*end_time - t);
        b = b.scaled(f);
        decay *= f * f;
    }
    rec.remaining_excitation = excitation(b);
    rec.remaining_decay_factor = decay;
    rec.final_spin_wave = std::move(b);
}

}  // namespace detail

/// Store, then read out pulse by pulse, decaying the spin wave over each
/// gap between pulse centres. `end_time`, if given, decays the leftover
/// spin wave up to that time.
inline ExperimentRecord run_multipulse(const SignalField& a_in, const ControlField& write,
                                       double write_time, const SpaceGrid& space,
                                       std::span<const ReadPulse> reads,
                                       const MemoryParams& params,
                                       const DecoherenceModel& model,
                                       const SolverOptions& opts = {},
                                       std::optional<double> end_time = std::nullopt) {
    model.validate();
    std::vector<double> times;
    for (const auto& r : reads) times.push_back(r.time);
    detail::require_increasing(times, write_time, "run_multipulse");
    for (std::size_t k = 1; k < reads.size(); ++k)
        require(reads[k].control.grid().t_start() > reads[k - 1].control.grid().t_end(),
                ErrorKind::invalid_argument, "run_multipulse: read windows overlap");

    auto rec = detail::store(a_in, write, space, params, opts);
    SpinWave b = *rec.final_spin_wave;
    double t = write_time;
    double decay = 1.0;
    for (std::size_t k = 0; k < reads.size(); ++k) {
        const double f = model.amplitude_factor(reads[k].time - t);
        b = b.scaled(f);
        decay *= f * f;
        BinRecord bin;
        bin.index = k;
        bin.time = reads[k].time;
        bin.read_energy = energy(reads[k].control);
        bin.excitation_before = excitation(b);
        bin.decay_factor = decay;
        auto r = solve_retrieval(b, reads[k].control, params, opts);
        bin.output_energy = energy(r.output);
        bin.excitation_after = excitation(r.remaining);
        bin.efficiency = rec.input_energy > 0 ? bin.output_energy / rec.input_energy : 0.0;
        bin.retrieval_efficiency =
            bin.excitation_before > 0 ? bin.output_energy / bin.excitation_before : 0.0;
        rec.error_estimate = std::max(rec.error_estimate, r.error_estimate);
        rec.bins.push_back(bin);
        rec.outputs.push_back(std::move(r.output));
        b = std::move(r.remaining);
        t = reads[k].time;
    }
    detail::finish(rec, std::move(b), t, end_time, decay, model);
    return rec;
}

/// Fraction of the gate-boundary neighbourhood (relative to the spacing of
/// adjacent reads) checked for stray output energy.
inline constexpr double kGateMargin = 0.1;
inline constexpr double kGateLeakage = 1e-3;

/// The same experiment with every read merged into one control field.
/// Decay between reads is applied as a step at each midpoint between read
/// times, and bins are separated by gating the output at those midpoints.
inline ExperimentRecord equivalent_train_run(const SignalField& a_in, const ControlField& write,
                                             double write_time, const SpaceGrid& space,
                                             const ControlField& train,
                                             std::span<const double> read_times,
                                             const MemoryParams& params,
                                             const DecoherenceModel& model,
                                             const SolverOptions& opts = {},
                                             std::optional<double> end_time = std::nullopt) {
    model.validate();
    detail::require_increasing(read_times, write_time, "equivalent_train_run");
    const TimeGrid& g = train.grid();
    for (double t : read_times)
        require(t >= g.t_start() && t <= g.t_end(), ErrorKind::invalid_argument,
                "equivalent_train_run: read time outside the train grid");

    auto rec = detail::store(a_in, write, space, params, opts);
    if (read_times.empty()) {
        detail::finish(rec, *rec.final_spin_wave, write_time, end_time, 1.0, model);
        return rec;
    }

    const std::size_t n = read_times.size();
    std::vector<double> bounds;  // midpoints between consecutive reads
    std::vector<DecayStep> steps;
    for (std::size_t k = 1; k < n; ++k) {
        const double mid = 0.5 * (read_times[k - 1] + read_times[k]);
        bounds.push_back(mid);
        const auto idx = static_cast<std::size_t>(std::floor((mid - g.t_start()) / g.dt()));
        steps.push_back({idx, model.amplitude_factor(read_times[k] - read_times[k - 1])});
    }

    const double f0 = model.amplitude_factor(read_times[0] - write_time);
    SpinWave b = rec.final_spin_wave->scaled(f0);
    auto r = solve_retrieval(b, train, params, opts, steps);
    rec.error_estimate = std::max(rec.error_estimate, r.error_estimate);

    const auto w = g.weights();
    const auto out = r.output.samples();
    const auto ctl = train.samples();
    std::vector<double> bin_energy(n, 0.0), bin_control(n, 0.0);
    double total = 0.0;
    std::vector<double> near(bounds.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double t = g.time(i);
        std::size_t k = 0;
        while (k < bounds.size() && t >= bounds[k]) ++k;
        const double e = w[i] * std::norm(out[i]);
        bin_energy[k] += e;
        bin_control[k] += w[i] * std::norm(ctl[i]);
        total += e;
        for (std::size_t m = 0; m < bounds.size(); ++m) {
            const double spacing = read_times[m + 1] - read_times[m];
            if (std::abs(t - bounds[m]) <= kGateMargin * spacing) near[m] += e;
        }
    }
    for (std::size_t m = 0; m < bounds.size(); ++m) {
        if (total > 0 && near[m] > kGateLeakage * total) {
            std::ostringstream os;
            os << "gating ambiguity: " << near[m] / total
               << " of the output lies near the gate at " << bounds[m] << " ns";
            throw Error(ErrorKind::gating_ambiguity, os.str());
        }
    }

    double before = excitation(b);
    double decay = f0 * f0;
    for (std::size_t k = 0; k < n; ++k) {
        if (k > 0) {
            const double f = steps[k - 1].amplitude_factor;
            decay *= f * f;
            before = (before - bin_energy[k - 1]) * f * f;
        }
        BinRecord bin;
        bin.index = k;
        bin.time = read_times[k];
        bin.read_energy = bin_control[k];
        bin.output_energy = bin_energy[k];
        bin.excitation_before = before;
        bin.excitation_after = before - bin_energy[k];
        bin.decay_factor = decay;
        bin.efficiency = rec.input_energy > 0 ? bin.output_energy / rec.input_energy : 0.0;
        bin.retrieval_efficiency = before > 0 ? bin.output_energy / before : 0.0;
        rec.bins.push_back(bin);
    }
    rec.outputs.push_back(std::move(r.output));
    detail::finish(rec, std::move(r.remaining), read_times[n - 1], end_time, decay, model);
    return rec;
}

/// Fraction of the excitation present at the first of N identical reads
/// that is retrieved, when every read extracts eta of what it finds and
/// the spin wave decays over `spacing` between reads.
inline double combined_readout_efficiency(double eta, std::size_t n,
                                          const DecoherenceModel& model = DecoherenceModel::none(),
                                          double spacing = 0.0) {
    require(eta >= 0 && eta <= 1, ErrorKind::invalid_argument, "eta must lie in [0, 1]");
    require(n >= 1, ErrorKind::invalid_argument, "at least one read is required");
    model.validate();
    const double f = model.excitation_factor(spacing);
    double total = 0.0, left = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        total += eta * left;
        left *= (1.0 - eta) * f;
    }
    return total;
}

/// Bin efficiencies (relative to input) of the ideal cascade of N identical
/// beam splitters with reflectivity eta.
inline std::vector<double> cascade_bins(double storage_eff, double eta, std::size_t n,
                                        const DecoherenceModel& model, double first_gap,
                                        double spacing) {
    model.validate();
    std::vector<double> bins;
    double avail = storage_eff * model.excitation_factor(first_gap);
    const double f = model.excitation_factor(spacing);
    for (std::size_t k = 0; k < n; ++k) {
        bins.push_back(avail * eta);
        avail *= (1.0 - eta) * f;
    }
    return bins;
}

}  // namespace ramanbs
