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

// Experiment configuration files: JSON with comments. Times, frequencies
// and angles are strings with a unit ("12.5 ns", "300 ps", "15 GHz",
// "180 deg"); energies, efficiencies and counts are plain numbers.
// Unknown keys are rejected.

#pragma once

#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "ramanbs/design.hpp"
#include "ramanbs/error.hpp"
#include "ramanbs/experiment.hpp"
#include "ramanbs/interferometer.hpp"

namespace ramanbs {

using json = nlohmann::json;

enum class Dimension { time, frequency, angle };

/// Parse "<number> <unit>" into ns, GHz or radians.
inline double parse_quantity(std::string_view text, Dimension dim) {
    const auto s = detail::trim(text);
    std::size_t split = 0;
    while (split < s.size() && (std::isdigit(static_cast<unsigned char>(s[split])) ||
                                s[split] == '.' || s[split] == '-' || s[split] == '+' ||
                                ((s[split] == 'e' || s[split] == 'E') && split > 0 &&
                                 split + 1 < s.size() &&
                                 (std::isdigit(static_cast<unsigned char>(s[split + 1])) ||
                                  s[split + 1] == '-' || s[split + 1] == '+'))))
        ++split;
    const auto value = detail::parse_double(s.substr(0, split));
    const auto unit = detail::trim(s.substr(split));
    if (!value || unit.empty())
        throw Error(ErrorKind::config, "expected a number with a unit, got '" + std::string(text) + "'");
    struct Unit {
        std::string_view name;
        Dimension dim;
        double scale;
    };
    static constexpr Unit units[] = {
        {"fs", Dimension::time, 1e-6},      {"ps", Dimension::time, 1e-3},
        {"ns", Dimension::time, 1.0},       {"us", Dimension::time, 1e3},
        {"ms", Dimension::time, 1e6},       {"s", Dimension::time, 1e9},
        {"Hz", Dimension::frequency, 1e-9}, {"kHz", Dimension::frequency, 1e-6},
        {"MHz", Dimension::frequency, 1e-3}, {"GHz", Dimension::frequency, 1.0},
        {"THz", Dimension::frequency, 1e3}, {"rad", Dimension::angle, 1.0},
        {"deg", Dimension::angle, std::numbers::pi / 180.0},
    };
    for (const auto& u : units) {
        if (u.name != unit) continue;
        if (u.dim != dim)
            throw Error(ErrorKind::config, "unit '" + std::string(unit) + "' has the wrong dimension in '" +
                                               std::string(text) + "'");
        return *value * u.scale;
    }
    throw Error(ErrorKind::config, "unknown unit '" + std::string(unit) + "'");
}

inline json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "cannot open config file " + path.string());
    try {
        return json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::config, path.string() + ": " + e.what());
    }
}

namespace detail {

inline void allow_keys(const json& obj, std::string_view ctx,
                       std::initializer_list<std::string_view> keys) {
    if (!obj.is_object()) throw Error(ErrorKind::config, std::string(ctx) + " must be an object");
    for (const auto& [k, v] : obj.items()) {
        bool ok = false;
        for (auto key : keys) ok = ok || key == k;
        if (!ok) throw Error(ErrorKind::config, "unknown key '" + k + "' in " + std::string(ctx));
    }
}

inline double number(const json& obj, const char* key, std::string_view ctx) {
    const auto& v = obj.at(key);
    if (!v.is_number())
        throw Error(ErrorKind::config, std::string(ctx) + "." + key + " must be a number");
    return v.get<double>();
}

inline double number_or(const json& obj, const char* key, double fallback, std::string_view ctx) {
    return obj.contains(key) ? number(obj, key, ctx) : fallback;
}

inline double quantity(const json& obj, const char* key, Dimension dim, std::string_view ctx) {
    const auto& v = obj.at(key);
    if (!v.is_string())
        throw Error(ErrorKind::config, std::string(ctx) + "." + key +
                                           " needs an explicit unit, e.g. \"12.5 ns\"");
    return parse_quantity(v.get<std::string>(), dim);
}

inline double quantity_or(const json& obj, const char* key, Dimension dim, double fallback,
                          std::string_view ctx) {
    return obj.contains(key) ? quantity(obj, key, dim, ctx) : fallback;
}

inline std::string string_or(const json& obj, const char* key, std::string fallback,
                             std::string_view ctx) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_string())
        throw Error(ErrorKind::config, std::string(ctx) + "." + key + " must be a string");
    return obj.at(key).get<std::string>();
}

inline PulseShape parse_shape(const std::string& s) {
    if (s == "gaussian") return PulseShape::gaussian;
    if (s == "sech") return PulseShape::sech;
    if (s == "imported") return PulseShape::imported;
    throw Error(ErrorKind::config, "unknown pulse shape '" + s + "'");
}

inline PulseSpec parse_pulse(const json& j, std::string_view ctx,
                             const std::filesystem::path& base_dir, bool with_energy) {
    if (with_energy)
        allow_keys(j, ctx, {"shape", "fwhm", "energy", "trace"});
    else
        allow_keys(j, ctx, {"shape", "fwhm", "trace", "energies", "energy", "count"});
    PulseSpec p;
    p.shape = parse_shape(string_or(j, "shape", "gaussian", ctx));
    p.fwhm = quantity_or(j, "fwhm", Dimension::time, 0.3, ctx);
    if (with_energy) p.energy = number_or(j, "energy", 1.0, ctx);
    if (p.shape == PulseShape::imported) {
        const auto file = string_or(j, "trace", "", ctx);
        if (file.empty()) throw Error(ErrorKind::config, std::string(ctx) + ": imported shape needs a trace file");
        try {
            p.trace = read_trace_csv(base_dir / file);
        } catch (const Error& e) {
            throw Error(ErrorKind::config, e.what());
        }
    } else if (j.contains("trace")) {
        throw Error(ErrorKind::config, std::string(ctx) + ".trace is only valid for imported shapes");
    }
    return p;
}

}  // namespace detail

/// Calibrated coupling and read energy as written by the calibrate command.
inline json calibration_to_json(const CalibrationResult& c, const CalibrationTarget& t) {
    json j;
    j["schema_version"] = 1;
    j["kind"] = "calibration";
    j["coupling"] = c.coupling;
    j["read_energy"] = c.read_energy;
    j["storage_efficiency"] = c.storage_efficiency;
    j["read_efficiency"] = c.read_efficiency;
    j["target"]["storage_efficiency"] = t.storage_eff;
    j["target"]["single_read_efficiency"] =
        t.single_read_eff ? json(*t.single_read_eff) : json(nullptr);
    j["resolution"] = {{"dt_ns", c.resolution.dt}, {"nz", c.resolution.nz}};
    return j;
}

struct OutputOptions {
    bool kernels = false;
    std::size_t modes = 0;
};

/// One experiment configuration. The read energies are either explicit,
/// taken from a calibration (`read_count` copies of the calibrated energy),
/// or left to a design target.
struct RunConfig {
    ExperimentSpec spec;
    ResolutionPolicy policy;
    SolverOptions solver;
    std::optional<CalibrationTarget> calibrate;
    std::optional<double> calibrated_read_energy;
    std::optional<std::size_t> calibrated_read_count;
    std::optional<TargetDistribution> target;
    bool continuous = false;
    OutputOptions output;
    std::filesystem::path base_dir;
};

inline RunConfig parse_run_config(const json& j, const std::filesystem::path& base_dir) {
    using namespace detail;
    allow_keys(j, "config", {"grid", "memory", "signal", "write", "read", "timing", "decoherence",
                             "target", "solver", "continuous", "output", "description"});
    RunConfig rc;
    rc.base_dir = base_dir;
    auto& s = rc.spec;

    if (j.contains("grid")) {
        const auto& g = j["grid"];
        allow_keys(g, "grid", {"dt", "nz"});
        rc.policy.base.dt = quantity_or(g, "dt", Dimension::time, rc.policy.base.dt, "grid");
        if (g.contains("nz")) {
            if (!g["nz"].is_number_integer() || g["nz"].get<long long>() < 3)
                throw Error(ErrorKind::config, "grid.nz must be an integer >= 3");
            rc.policy.base.nz = g["nz"].get<std::size_t>();
        }
        if (!(rc.policy.base.dt > 0)) throw Error(ErrorKind::config, "grid.dt must be positive");
    }

    if (j.contains("solver")) {
        const auto& sv = j["solver"];
        allow_keys(sv, "solver", {"tolerance", "threads"});
        rc.solver.tolerance = number_or(sv, "tolerance", rc.solver.tolerance, "solver");
        rc.solver.threads = static_cast<unsigned>(number_or(sv, "threads", 0, "solver"));
    }

    if (!j.contains("memory")) throw Error(ErrorKind::config, "config needs a memory section");
    {
        const auto& m = j["memory"];
        allow_keys(m, "memory", {"coupling", "calibration", "calibrate", "detuning",
                                 "two_photon_detuning"});
        s.memory.detuning_ghz = quantity_or(m, "detuning", Dimension::frequency, 15.0, "memory");
        s.memory.two_photon_detuning_ghz =
            quantity_or(m, "two_photon_detuning", Dimension::frequency, 0.0, "memory");
        const int sources = int(m.contains("coupling")) + int(m.contains("calibration")) +
                            int(m.contains("calibrate"));
        if (sources != 1)
            throw Error(ErrorKind::config,
                        "memory needs exactly one of coupling, calibration, calibrate");
        if (m.contains("coupling")) s.memory.coupling = number(m, "coupling", "memory");
        if (m.contains("calibration")) {
            const auto path = base_dir / string_or(m, "calibration", "", "memory");
            const auto cal = load_json(path);
            if (!cal.is_object() || cal.value("kind", "") != "calibration")
                throw Error(ErrorKind::config, path.string() + " is not a calibration file");
            s.memory.coupling = number(cal, "coupling", "calibration");
            rc.calibrated_read_energy = number(cal, "read_energy", "calibration");
        }
        if (m.contains("calibrate")) {
            const auto& c = m["calibrate"];
            allow_keys(c, "memory.calibrate", {"storage_efficiency", "single_read_efficiency"});
            CalibrationTarget t;
            t.storage_eff = number(c, "storage_efficiency", "memory.calibrate");
            t.single_read_eff = c.contains("single_read_efficiency")
                                    ? std::optional(number(c, "single_read_efficiency", "memory.calibrate"))
                                    : std::nullopt;
            rc.calibrate = t;
        }
    }

    if (j.contains("signal")) s.signal = parse_pulse(j["signal"], "signal", base_dir, true);
    if (j.contains("write")) s.write = parse_pulse(j["write"], "write", base_dir, true);

    if (j.contains("timing")) {
        const auto& t = j["timing"];
        allow_keys(t, "timing", {"write_time", "storage_time", "rep_period", "window", "end_time"});
        s.write_time = quantity_or(t, "write_time", Dimension::time, s.write_time, "timing");
        s.storage_time = quantity_or(t, "storage_time", Dimension::time, s.storage_time, "timing");
        s.rep_period = quantity_or(t, "rep_period", Dimension::time, s.rep_period, "timing");
        if (t.contains("window")) s.window = quantity(t, "window", Dimension::time, "timing");
        if (t.contains("end_time")) s.end_time = quantity(t, "end_time", Dimension::time, "timing");
    }

    bool explicit_energies = false;
    if (j.contains("read")) {
        const auto& r = j["read"];
        s.read = parse_pulse(r, "read", base_dir, false);
        if (r.contains("energies") && r.contains("energy"))
            throw Error(ErrorKind::config, "read takes either energies or energy + count");
        if (r.contains("energies")) {
            if (!r["energies"].is_array()) throw Error(ErrorKind::config, "read.energies must be an array");
            for (const auto& e : r["energies"]) {
                if (!e.is_number()) throw Error(ErrorKind::config, "read.energies must be numbers");
                s.read_energies.push_back(e.get<double>());
            }
            explicit_energies = true;
        }
        if (r.contains("energy")) {
            if (!r.contains("count") || !r["count"].is_number_integer() || r["count"].get<long long>() < 0)
                throw Error(ErrorKind::config, "read.energy needs a non-negative integer count");
            const auto count = r["count"].get<std::size_t>();
            if (r["energy"].is_string() && r["energy"].get<std::string>() == "calibrated") {
                rc.calibrated_read_count = count;
            } else if (r["energy"].is_number()) {
                s.read_energies.assign(count, r["energy"].get<double>());
            } else {
                throw Error(ErrorKind::config, "read.energy must be a number or \"calibrated\"");
            }
            explicit_energies = true;
        } else if (r.contains("count")) {
            throw Error(ErrorKind::config, "read.count needs read.energy");
        }
    }

    if (j.contains("target")) {
        const auto& t = j["target"];
        allow_keys(t, "target", {"mode", "fractions", "relative_total"});
        TargetDistribution td;
        const auto mode = string_or(t, "mode", "absolute", "target");
        if (mode == "absolute")
            td.mode = TargetDistribution::Mode::absolute;
        else if (mode == "relative")
            td.mode = TargetDistribution::Mode::relative;
        else
            throw Error(ErrorKind::config, "target.mode must be absolute or relative");
        if (!t.contains("fractions") || !t["fractions"].is_array())
            throw Error(ErrorKind::config, "target.fractions must be an array");
        for (const auto& f : t["fractions"]) {
            if (!f.is_number()) throw Error(ErrorKind::config, "target.fractions must be numbers");
            td.fractions.push_back(f.get<double>());
        }
        td.relative_total = number_or(t, "relative_total", 1.0, "target");
        try {
            td.validate();
        } catch (const Error& e) {
            throw Error(ErrorKind::config, e.what());
        }
        rc.target = td;
    }
    if (explicit_energies && rc.target)
        throw Error(ErrorKind::config, "give either read energies or a target distribution, not both");

    if (j.contains("decoherence")) {
        const auto& d = j["decoherence"];
        if (d.is_null() || (d.is_string() && d.get<std::string>() == "none")) {
            s.decoherence = DecoherenceModel::none();
        } else {
            allow_keys(d, "decoherence", {"kappa", "t_ref", "reference"});
            s.decoherence.kappa_ref = number_or(d, "kappa", 0.7, "decoherence");
            s.decoherence.t_ref = quantity_or(d, "t_ref", Dimension::time, 900.0, "decoherence");
            const auto ref = string_or(d, "reference", "amplitude", "decoherence");
            if (ref == "amplitude")
                s.decoherence.reference = DecoherenceModel::Reference::amplitude;
            else if (ref == "excitation")
                s.decoherence.reference = DecoherenceModel::Reference::excitation;
            else
                throw Error(ErrorKind::config, "decoherence.reference must be amplitude or excitation");
        }
    }

    if (j.contains("continuous")) {
        if (!j["continuous"].is_boolean()) throw Error(ErrorKind::config, "continuous must be a boolean");
        rc.continuous = j["continuous"].get<bool>();
    }
    if (j.contains("output")) {
        const auto& o = j["output"];
        allow_keys(o, "output", {"kernels", "modes"});
        if (o.contains("kernels")) rc.output.kernels = o["kernels"].get<bool>();
        if (o.contains("modes")) rc.output.modes = o["modes"].get<std::size_t>();
    }

    try {
        s.memory.validate();
        s.decoherence.validate();
    } catch (const Error& e) {
        throw Error(ErrorKind::config, e.what());
    }
    return rc;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
    try {
        return parse_run_config(load_json(path), path.parent_path());
    } catch (const json::exception& e) {
        throw Error(ErrorKind::config, path.string() + ": " + e.what());
    }
}

/// Interferometer configuration: a base experiment plus per-arm JSON merge
/// patches.
struct InterfereConfig {
    RunConfig arm_a;
    RunConfig arm_b;
    double phase = 0.0;
    double split = 0.5;
    std::string basis = "both";
    bool concurrent = true;
};

inline InterfereConfig parse_interfere_config(const json& j, const std::filesystem::path& base_dir) {
    using namespace detail;
    allow_keys(j, "config", {"base", "arm_a", "arm_b", "phase", "split", "basis", "concurrent",
                             "description", "grid", "solver"});
    if (!j.contains("base")) throw Error(ErrorKind::config, "interfere config needs a base experiment");
    json a = j["base"], b = j["base"];
    for (const char* key : {"grid", "solver"}) {
        if (j.contains(key)) {
            a[key] = j[key];
            b[key] = j[key];
        }
    }
    if (j.contains("arm_a")) a.merge_patch(j["arm_a"]);
    if (j.contains("arm_b")) b.merge_patch(j["arm_b"]);
    InterfereConfig ic{parse_run_config(a, base_dir), parse_run_config(b, base_dir)};
    if (j.contains("phase")) {
        if (!j["phase"].is_string())
            throw Error(ErrorKind::config, "phase needs an explicit unit, e.g. \"180 deg\"");
        ic.phase = parse_quantity(j["phase"].get<std::string>(), Dimension::angle);
    }
    ic.split = number_or(j, "split", 0.5, "config");
    ic.basis = string_or(j, "basis", "both", "config");
    if (ic.basis != "diagonal" && ic.basis != "antidiagonal" && ic.basis != "both")
        throw Error(ErrorKind::config, "basis must be diagonal, antidiagonal or both");
    if (j.contains("concurrent")) ic.concurrent = j["concurrent"].get<bool>();
    if (!(ic.phase >= 0 && ic.phase < 2 * std::numbers::pi))
        throw Error(ErrorKind::config, "phase must lie in [0, 2 pi)");
    if (!(ic.split >= 0 && ic.split <= 1)) throw Error(ErrorKind::config, "split must lie in [0, 1]");
    return ic;
}

inline InterfereConfig load_interfere_config(const std::filesystem::path& path) {
    try {
        return parse_interfere_config(load_json(path), path.parent_path());
    } catch (const json::exception& e) {
        throw Error(ErrorKind::config, path.string() + ": " + e.what());
    }
}

}  // namespace ramanbs
