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

// Pulse envelopes, Pockels-cell pulse trains and amplitude reconstruction
// from photodiode intensity traces. All durations are intensity FWHM in ns.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ramanbs/error.hpp"
#include "ramanbs/field.hpp"
#include "ramanbs/grid.hpp"

namespace ramanbs {

enum class PulseShape { gaussian, sech, imported };

inline constexpr double kClipThreshold = 1e-6;
inline constexpr double kOverlapThreshold = 1e-3;

namespace detail {

// Amplitude profiles normalised to unit peak at the origin; the
// intensity (squared) profile has the requested FWHM.
inline double gaussian_profile(double t, double fwhm) {
    return std::exp(-2.0 * std::numbers::ln2 * t * t / (fwhm * fwhm));
}

inline double sech_profile(double t, double fwhm) {
    const double a = 2.0 * std::acosh(std::numbers::sqrt2) / fwhm;
    return 1.0 / std::cosh(a * t);
}

inline double analytic_profile(PulseShape shape, double t, double fwhm) {
    switch (shape) {
        case PulseShape::gaussian: return gaussian_profile(t, fwhm);
        case PulseShape::sech: return sech_profile(t, fwhm);
        case PulseShape::imported: break;
    }
    throw Error(ErrorKind::invalid_argument,
                "imported pulses have no analytic profile");
}

inline void check_edges(PulseShape shape, const TimeGrid& grid, double center,
                        double fwhm) {
    const double left = analytic_profile(shape, grid.t_start() - center, fwhm);
    const double right = analytic_profile(shape, grid.t_end() - center, fwhm);
    const bool inside = center >= grid.t_start() && center <= grid.t_end();
    if (!inside || left > kClipThreshold || right > kClipThreshold) {
        std::ostringstream os;
        os << "pulse centred at " << center << " ns (FWHM " << fwhm
           << " ns) is clipped by the grid [" << grid.t_start() << ", "
           << grid.t_end() << "] ns";
        throw Error(ErrorKind::pulse_clipped, os.str());
    }
}

}  // namespace detail

/// Analytic energy of a Gaussian envelope with the given peak amplitude.
inline double gaussian_energy(double fwhm, double peak) {
    return peak * peak * fwhm * std::sqrt(std::numbers::pi / std::log(16.0));
}

template <class Field>
Field make_pulse(PulseShape shape, const TimeGrid& grid, double center, double fwhm,
                 cplx peak) {
    require(fwhm > 0, ErrorKind::invalid_argument, "pulse FWHM must be positive");
    detail::check_edges(shape, grid, center, fwhm);
    std::vector<cplx> s(grid.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        s[i] = peak * detail::analytic_profile(shape, grid.time(i) - center, fwhm);
    return Field(grid, std::move(s));
}

template <class Field>
Field make_gaussian_pulse(const TimeGrid& grid, double center, double fwhm,
                          cplx peak) {
    return make_pulse<Field>(PulseShape::gaussian, grid, center, fwhm, peak);
}

template <class Field>
Field make_sech_pulse(const TimeGrid& grid, double center, double fwhm, cplx peak) {
    return make_pulse<Field>(PulseShape::sech, grid, center, fwhm, peak);
}

/// Rescale so that the (discrete) pulse energy equals `target`. A zero field
/// can only be rescaled to zero.
template <class Tag>
TemporalField<Tag> with_energy(const TemporalField<Tag>& f, double target) {
    require(target >= 0, ErrorKind::invalid_argument, "energy must be non-negative");
    const double e = energy(f);
    if (target == 0.0) return f.scaled(0.0);
    require(e > 0, ErrorKind::invalid_argument, "cannot rescale a zero field");
    return f.scaled(std::sqrt(target / e));
}

/// Sampled pulse template for trains built from measured shapes. `center`
/// is the time the template is anchored at (usually its peak).
struct ImportedPulse {
    ControlField shape;
    double center;
};

/// Pockels-cell selection of consecutive pulses from the laser train.
struct TrainSpec {
    double rep_period = 12.5;
    double pulse_duration = 0.3;
    PulseShape pulse_shape = PulseShape::gaussian;
    std::vector<double> amplitudes;
    double start_time = 0.0;
    std::optional<ImportedPulse> imported;

    double center(std::size_t k) const {
        return start_time + static_cast<double>(k) * rep_period;
    }
};

namespace detail {

inline void validate_train(const TrainSpec& spec) {
    require(spec.rep_period > spec.pulse_duration && spec.pulse_duration > 0,
            ErrorKind::invalid_argument,
            "train: repetition period must exceed the pulse duration");
    require(!spec.amplitudes.empty(), ErrorKind::invalid_argument,
            "train: no pulses");
    bool any = false;
    for (double a : spec.amplitudes) {
        require(a >= 0 && std::isfinite(a), ErrorKind::invalid_argument,
                "train: amplitudes must be finite and non-negative");
        any = any || a > 0;
    }
    require(any, ErrorKind::invalid_argument, "train: all amplitudes are zero");
}

inline std::vector<cplx> analytic_train(const TimeGrid& grid, const TrainSpec& spec) {
    const double fwhm = spec.pulse_duration;
    const double mid = analytic_profile(spec.pulse_shape, 0.5 * spec.rep_period, fwhm);
    if (spec.amplitudes.size() > 1 && mid > kOverlapThreshold) {
        throw Error(ErrorKind::pulse_overlap,
                    "train: adjacent pulses overlap at the period midpoint (" +
                        std::to_string(mid) + " of peak)");
    }
    std::vector<cplx> s(grid.size());
    for (std::size_t k = 0; k < spec.amplitudes.size(); ++k) {
        if (spec.amplitudes[k] == 0.0) continue;
        const double c = spec.center(k);
        check_edges(spec.pulse_shape, grid, c, fwhm);
        for (std::size_t i = 0; i < s.size(); ++i)
            s[i] += spec.amplitudes[k] *
                    analytic_profile(spec.pulse_shape, grid.time(i) - c, fwhm);
    }
    return s;
}

inline std::vector<cplx> imported_train(const TimeGrid& grid, const TrainSpec& spec) {
    require(spec.imported.has_value(), ErrorKind::invalid_argument,
            "train: imported shape requested without a template");
    const auto& tpl = *spec.imported;
    const TimeGrid& tg = tpl.shape.grid();
    require(std::abs(tg.dt() - grid.dt()) <= 1e-12 * grid.dt(),
            ErrorKind::grid_mismatch, "train: template dt differs from grid dt");
    const auto ts = tpl.shape.samples();
    double peak = 0.0;
    for (const auto& x : ts) peak = std::max(peak, std::abs(x));
    require(peak > 0, ErrorKind::invalid_argument, "train: template is all zero");

    // Overlap: template value half a period away from its anchor.
    if (spec.amplitudes.size() > 1) {
        for (double off : {-0.5 * spec.rep_period, 0.5 * spec.rep_period}) {
            const double pos = (tpl.center + off - tg.t_start()) / tg.dt();
            const auto idx = std::llround(pos);
            if (idx >= 0 && idx < static_cast<long long>(ts.size()) &&
                std::abs(ts[static_cast<std::size_t>(idx)]) > kOverlapThreshold * peak)
                throw Error(ErrorKind::pulse_overlap,
                            "train: imported pulses overlap at the period midpoint");
        }
    }

    std::vector<cplx> s(grid.size());
    for (std::size_t k = 0; k < spec.amplitudes.size(); ++k) {
        if (spec.amplitudes[k] == 0.0) continue;
        const double offset = (tg.t_start() + spec.center(k) - tpl.center - grid.t_start()) /
                              grid.dt();
        const auto shift = std::llround(offset);
        require(std::abs(offset - static_cast<double>(shift)) < 1e-6,
                ErrorKind::invalid_argument,
                "train: imported pulse positions must fall on grid samples");
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const long long j = shift + static_cast<long long>(i);
            if (j < 0 || j >= static_cast<long long>(s.size())) {
                if (std::abs(ts[i]) > kClipThreshold * peak)
                    throw Error(ErrorKind::pulse_clipped,
                                "train: imported pulse extends past the grid");
                continue;
            }
            s[static_cast<std::size_t>(j)] += spec.amplitudes[k] * ts[i];
        }
    }
    return s;
}

}  // namespace detail

/// Superposition of shifted copies of the base pulse, pulse k centred at
/// start_time + k * rep_period with amplitude scale amplitudes[k].
inline ControlField make_train(const TimeGrid& grid, const TrainSpec& spec) {
    detail::validate_train(spec);
    if (spec.pulse_shape == PulseShape::imported)
        return ControlField(grid, detail::imported_train(grid, spec));
    return ControlField(grid, detail::analytic_train(grid, spec));
}

/// Amplitude from a measured intensity trace: sqrt of the trace with flat
/// phase. Small negative noise excursions (above -eps_noise * max) clamp to 0.
inline SignalField amp_from_trace(std::span<const double> trace, const TimeGrid& grid,
                                  double eps_noise = 1e-3) {
    require(trace.size() == grid.size(), ErrorKind::invalid_argument,
            "trace length does not match grid");
    double peak = 0.0;
    for (double x : trace) {
        require(std::isfinite(x), ErrorKind::invalid_argument, "non-finite trace entry");
        peak = std::max(peak, x);
    }
    std::vector<cplx> amp(trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const double x = trace[i];
        if (x < 0) {
            if (x < -eps_noise * peak || peak <= 0)
                throw Error(ErrorKind::negative_trace,
                            "trace entry " + std::to_string(i) + " = " +
                                std::to_string(x) + " is below the noise clamp");
            continue;
        }
        amp[i] = std::sqrt(x);
    }
    return SignalField(grid, std::move(amp));
}

/// Intensity trace on a uniform grid, as imported from CSV.
struct IntensityTrace {
    TimeGrid grid;
    std::vector<double> intensity;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

}  // namespace detail

/// Parse a two-column (time_ns, intensity) CSV. A non-numeric first line is
/// treated as a header. Sampling must be uniform.
inline IntensityTrace parse_trace_csv(std::istream& in) {
    std::vector<double> t, y;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto view = detail::trim(line);
        if (view.empty()) continue;
        const auto comma = view.find(',');
        std::optional<double> a, b;
        if (comma != std::string_view::npos && view.find(',', comma + 1) == std::string_view::npos) {
            a = detail::parse_double(view.substr(0, comma));
            b = detail::parse_double(view.substr(comma + 1));
        }
        if (!a || !b) {
            if (t.empty() && lineno == 1) continue;  // header
            throw Error(ErrorKind::io, "trace CSV: malformed line " + std::to_string(lineno));
        }
        t.push_back(*a);
        y.push_back(*b);
    }
    require(t.size() >= 2, ErrorKind::io, "trace CSV: need at least two samples");
    const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    require(dt > 0, ErrorKind::io, "trace CSV: times must increase");
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double expect = t.front() + static_cast<double>(i) * dt;
        require(std::abs(t[i] - expect) <= 1e-3 * dt, ErrorKind::io,
                "trace CSV: non-uniform sampling at line " + std::to_string(i + 1));
    }
    return IntensityTrace{TimeGrid(t.front(), dt, t.size()), std::move(y)};
}

inline IntensityTrace read_trace_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorKind::io, "cannot open trace file " + path.string());
    return parse_trace_csv(in);
}

}  // namespace ramanbs
