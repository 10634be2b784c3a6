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

// Batch commands behind the command-line tool. Each command reads one
// configuration file and writes its artifacts into an output directory.

#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>

#include "ramanbs/config.hpp"
#include "ramanbs/design.hpp"
#include "ramanbs/experiment.hpp"
#include "ramanbs/interferometer.hpp"
#include "ramanbs/io.hpp"
#include "ramanbs/kernel_io.hpp"
#include "ramanbs/modes.hpp"

namespace ramanbs {

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_solver = 3, exit_infeasible = 4 };

inline int exit_code_for(ErrorKind k) {
    switch (k) {
        case ErrorKind::config:
        case ErrorKind::io:
        case ErrorKind::invalid_argument:
        case ErrorKind::grid_mismatch:
        case ErrorKind::pulse_clipped:
        case ErrorKind::pulse_overlap:
        case ErrorKind::negative_trace:
        case ErrorKind::index_out_of_range:
            return exit_config;
        case ErrorKind::infeasible_target:
        case ErrorKind::saturation:
            return exit_infeasible;
        default:
            return exit_solver;
    }
}

struct CommandOptions {
    std::filesystem::path config;
    std::filesystem::path out_dir = ".";
    double grid_scale = 1.0;
};

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), ErrorKind::io, "cannot write " + path.string());
    out << text;
}

inline void write_json(const std::filesystem::path& path, const json& j) {
    write_text(path, j.dump(2) + "\n");
}

inline json resolution_json(const Resolution& r) { return {{"dt_ns", r.dt}, {"nz", r.nz}}; }

inline const char* reference_name(DecoherenceModel::Reference r) {
    return r == DecoherenceModel::Reference::amplitude ? "amplitude" : "excitation";
}

inline json spec_json(const ExperimentSpec& s) {
    json j;
    j["coupling"] = s.memory.coupling;
    j["detuning_ghz"] = s.memory.detuning_ghz;
    j["write_energy"] = s.write.energy;
    j["read_energies"] = s.read_energies;
    j["storage_time_ns"] = s.storage_time;
    j["rep_period_ns"] = s.rep_period;
    j["decoherence"] = {{"kappa", s.decoherence.kappa_ref},
                        {"t_ref_ns", s.decoherence.t_ref},
                        {"reference", reference_name(s.decoherence.reference)}};
    return j;
}

inline json bins_json(const std::vector<BinRecord>& bins) {
    json arr = json::array();
    for (const auto& b : bins) {
        arr.push_back({{"index", b.index},
                       {"time_ns", b.time},
                       {"read_energy", b.read_energy},
                       {"output_energy", b.output_energy},
                       {"efficiency", b.efficiency},
                       {"retrieval_efficiency", b.retrieval_efficiency},
                       {"excitation_before", b.excitation_before},
                       {"excitation_after", b.excitation_after},
                       {"decay_factor", b.decay_factor}});
    }
    return arr;
}

}  // namespace detail

inline json record_json(const ExperimentRecord& r) {
    json j;
    j["input_energy"] = r.input_energy;
    j["transmitted_energy"] = r.transmitted_energy;
    j["stored_excitation"] = r.stored_excitation;
    j["storage_efficiency"] = r.storage_efficiency();
    j["bins"] = detail::bins_json(r.bins);
    j["remaining_excitation"] = r.remaining_excitation;
    j["remaining_decay_factor"] = r.remaining_decay_factor;
    j["combined_readout"] = r.combined_readout();
    j["ledger_residual"] = r.ledger_residual();
    j["error_estimate"] = r.error_estimate;
    return j;
}

/// Resolve calibration requests in a run configuration in place.
inline void resolve_memory(RunConfig& rc) {
    if (rc.calibrate) {
        const auto cal = calibrate(*rc.calibrate, rc.spec, rc.policy);
        rc.spec.memory.coupling = cal.coupling;
        if (rc.calibrate->single_read_eff) rc.calibrated_read_energy = cal.read_energy;
    }
    if (rc.calibrated_read_count) {
        require(rc.calibrated_read_energy.has_value(), ErrorKind::config,
                "read.energy = \"calibrated\" needs a read efficiency calibration");
        rc.spec.read_energies.assign(*rc.calibrated_read_count, *rc.calibrated_read_energy);
    }
}

inline int cmd_simulate(const CommandOptions& o) {
    auto rc = load_run_config(o.config);
    rc.policy.grid_scale = o.grid_scale;
    require(!rc.target, ErrorKind::config, "simulate takes read energies, not a target");
    resolve_memory(rc);
    std::filesystem::create_directories(o.out_dir);

    const auto res = rc.spec.required_resolution(rc.policy);
    const auto rec = simulate_at(rc.spec, res, rc.solver, rc.continuous);

    json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "experiment";
    j["mode"] = rc.continuous ? "continuous" : "sequential";
    j["resolution"] = detail::resolution_json(res);
    j["parameters"] = detail::spec_json(rc.spec);
    j["record"] = record_json(rec);
    json percent = json::array();
    for (const auto& b : rec.bins) percent.push_back(100.0 * b.efficiency);
    j["summary"] = {{"storage_efficiency_percent", 100.0 * rec.storage_efficiency()},
                    {"bin_efficiencies_percent", percent},
                    {"combined_readout_percent", 100.0 * rec.combined_readout()}};
    if (!rec.bins.empty()) {
        // Ideal cascade with every read extracting what the first one does.
        const double eta = rec.bins.front().retrieval_efficiency;
        const double spacing = rc.spec.rep_period;
        json cascade;
        cascade["eta"] = eta;
        cascade["bin_efficiencies"] =
            cascade_bins(rec.storage_efficiency(), eta, rec.bins.size(), rc.spec.decoherence,
                         rc.spec.storage_time, spacing);
        cascade["combined_readout"] = combined_readout_efficiency(
            eta, rec.bins.size(), rc.spec.decoherence, spacing);
        cascade["combined_readout_no_decay"] = combined_readout_efficiency(eta, rec.bins.size());
        j["cascade"] = cascade;
    }

    if (rc.output.kernels || rc.output.modes > 0) {
        const auto ex = realize(rc.spec, res);
        const auto ks = build_kernel(KernelKind::storage, ex.write, ex.space, rc.spec.memory, rc.solver);
        if (rc.output.kernels) {
            write_kernel(o.out_dir / "storage_kernel.bin", ks);
            if (!ex.reads.empty())
                write_kernel(o.out_dir / "retrieval_kernel.bin",
                             build_kernel(KernelKind::retrieval, ex.reads.front().control, ex.space,
                                          rc.spec.memory, rc.solver));
        }
        if (rc.output.modes > 0) {
            const auto d = decompose(ks);
            std::ofstream m(o.out_dir / "storage_modes.csv");
            write_modes_csv(m, d, rc.output.modes);
            const auto n = std::min(rc.output.modes, d.size());
            j["storage_modes"]["reflectivities"] =
                std::vector<double>(d.reflectivities.begin(), d.reflectivities.begin() + static_cast<std::ptrdiff_t>(n));
        }
    }

    detail::write_json(o.out_dir / "record.json", j);
    {
        std::ofstream t(o.out_dir / "transmitted.csv");
        write_trace_csv(t, *rec.transmitted);
    }
    {
        std::ofstream t(o.out_dir / "readout.csv");
        t << "time_ns,intensity,re,im\n";
        for (const auto& f : rec.outputs) {
            for (std::size_t i = 0; i < f.size(); ++i)
                t << format_double(f.grid().time(i)) << ',' << format_double(std::norm(f[i])) << ','
                  << format_double(f[i].real()) << ',' << format_double(f[i].imag()) << '\n';
        }
    }
    return exit_ok;
}

inline json feasibility_json(const FeasibilityReport& f) {
    json bins = json::array();
    for (const auto& b : f.bins)
        bins.push_back({{"wanted", b.wanted},
                        {"available", b.available},
                        {"eta", b.eta},
                        {"feasible", b.feasible}});
    return {{"feasible", f.feasible}, {"leftover", f.leftover}, {"bins", bins}};
}

inline json target_json(const TargetDistribution& t) {
    const bool rel = t.mode == TargetDistribution::Mode::relative;
    json j;
    j["mode"] = rel ? "relative" : "absolute";
    j["fractions"] = rel ? normalized_weights(t.fractions) : t.fractions;
    if (rel) j["relative_total"] = t.relative_total;
    return j;
}

/// Thrown by cmd_design with the feasibility report attached.
class InfeasibleDesign : public Error {
  public:
    InfeasibleDesign(std::string msg, json report)
        : Error(ErrorKind::infeasible_target, std::move(msg)), report_(std::move(report)) {}
    const json& report() const noexcept { return report_; }

  private:
    json report_;
};

inline int cmd_design(const CommandOptions& o) {
    auto rc = load_run_config(o.config);
    rc.policy.grid_scale = o.grid_scale;
    require(rc.target.has_value(), ErrorKind::config, "design needs a target distribution");
    require(!rc.calibrated_read_count, ErrorKind::config, "design does not take read energies");
    resolve_memory(rc);
    std::filesystem::create_directories(o.out_dir);

    auto spec = rc.spec;
    spec.read_energies.clear();
    const auto stored = simulate(spec, rc.policy, rc.solver);
    const double storage = stored.record.storage_efficiency();
    const auto feas = required_reflectivities(*rc.target, storage, spec.decoherence,
                                              spec.storage_time, spec.rep_period);
    json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "design";
    j["target"] = target_json(*rc.target);
    j["coupling"] = spec.memory.coupling;
    j["storage_efficiency"] = storage;
    j["feasibility"] = feasibility_json(feas);
    if (!feas.feasible) {
        detail::write_json(o.out_dir / "design.json", j);
        throw InfeasibleDesign("target distribution is infeasible", j["feasibility"]);
    }

    std::vector<double> etas;
    for (const auto& b : feas.bins) etas.push_back(std::min(1.0, b.eta));
    const auto designed = energies_from_reflectivities(etas, spec, rc.policy);
    spec.read_energies = designed.energies;
    const auto rec = simulate_at(spec, designed.resolution, rc.solver);

    j["etas"] = etas;
    j["achieved_etas"] = designed.etas;
    j["energies"] = designed.energies;
    j["resolution"] = detail::resolution_json(designed.resolution);
    json predicted = json::array();
    for (const auto& b : rec.bins) predicted.push_back(b.efficiency);
    j["predicted_bins"] = predicted;
    j["record"] = record_json(rec);
    if (!rec.bins.empty()) {
        const auto w = w_state_amplitudes(rec);
        json amps = json::array(), norm = json::array();
        for (const auto& a : w.amplitudes) amps.push_back(a.real());
        for (const auto& a : w.normalized) norm.push_back(a.real());
        j["w_state"] = {{"amplitudes", amps},
                        {"normalized", norm},
                        {"success_probability", w.success_probability}};
    }
    detail::write_json(o.out_dir / "design.json", j);
    return exit_ok;
}

inline int cmd_calibrate(const CommandOptions& o) {
    auto rc = load_run_config(o.config);
    rc.policy.grid_scale = o.grid_scale;
    require(rc.calibrate.has_value(), ErrorKind::config, "calibrate needs memory.calibrate");
    std::filesystem::create_directories(o.out_dir);
    const auto cal = calibrate(*rc.calibrate, rc.spec, rc.policy);
    detail::write_json(o.out_dir / "calibration.json", calibration_to_json(cal, *rc.calibrate));
    return exit_ok;
}

inline int cmd_interfere(const CommandOptions& o) {
    auto ic = load_interfere_config(o.config);
    for (auto* arm : {&ic.arm_a, &ic.arm_b}) {
        arm->policy.grid_scale = o.grid_scale;
        require(!arm->target, ErrorKind::config, "interfere takes read energies, not a target");
        resolve_memory(*arm);
    }
    std::filesystem::create_directories(o.out_dir);

    InterferometerConfig cfg{ic.arm_a.spec, ic.arm_b.spec, ic.phase, ic.split, ic.concurrent};
    ResolutionPolicy policy = ic.arm_a.policy;
    const auto r = run_interference(cfg, policy, ic.arm_a.solver);

    json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "interference";
    j["phase_rad"] = ic.phase;
    j["split"] = ic.split;
    j["basis"] = ic.basis;
    j["resolution"] = detail::resolution_json(r.resolution);
    json bins = json::array();
    auto bin_json = [](const InterferenceBin& b) {
        return json{{"time_ns", b.time},
                    {"energy_a", b.energy_a},
                    {"energy_b", b.energy_b},
                    {"energy_diag", b.energy_diag},
                    {"energy_antidiag", b.energy_antidiag},
                    {"visibility", b.visibility}};
    };
    for (const auto& b : r.bins) bins.push_back(bin_json(b));
    j["bins"] = bins;
    j["total"] = bin_json(r.total);
    j["arm_a"] = record_json(r.record_a);
    j["arm_b"] = record_json(r.record_b);
    detail::write_json(o.out_dir / "interference.json", j);

    std::ofstream csv(o.out_dir / "interference.csv");
    csv << "time_ns,intensity_diag,intensity_antidiag\n";
    for (std::size_t k = 0; k < r.diag.size(); ++k) {
        const auto& d = r.diag[k];
        const auto& a = r.antidiag[k];
        for (std::size_t i = 0; i < d.size(); ++i)
            csv << format_double(d.grid().time(i)) << ',' << format_double(std::norm(d[i])) << ','
                << format_double(std::norm(a[i])) << '\n';
    }
    return exit_ok;
}

/// Run a command, turning failures into an exit code and a JSON error
/// object on `err`.
inline int run_guarded(const std::function<int()>& body, std::ostream& err = std::cerr) {
    auto report = [&](std::string_view kind, const std::string& msg, int code, const json* extra) {
        json e{{"error", std::string(kind)}, {"message", msg}, {"exit_code", code}};
        if (extra) e["feasibility"] = *extra;
        err << e.dump() << '\n';
        return code;
    };
    try {
        return body();
    } catch (const InfeasibleDesign& e) {
        return report(to_string(e.kind()), e.what(), exit_infeasible, &e.report());
    } catch (const Error& e) {
        return report(to_string(e.kind()), e.what(), exit_code_for(e.kind()),
                      nullptr);
    } catch (const json::exception& e) {
        return report("config", e.what(), exit_config, nullptr);
    } catch (const std::filesystem::filesystem_error& e) {
        return report("io", e.what(), exit_config, nullptr);
    } catch (const std::exception& e) {
        return report("internal", e.what(), exit_solver, nullptr);
    }
}

}  // namespace ramanbs
