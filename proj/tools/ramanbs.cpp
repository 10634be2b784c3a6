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

#include <CLI11.hpp>

#include "ramanbs/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Raman quantum memory as a beam-splitter network"};
    app.require_subcommand(1);

    ramanbs::CommandOptions opts;
    unsigned long long seed = 0;
    std::function<int()> action;

    auto add = [&](const char* name, const char* help, int (*fn)(const ramanbs::CommandOptions&)) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", opts.config, "Experiment configuration file")->required();
        sub->add_option("--out", opts.out_dir, "Output directory")->capture_default_str();
        sub->add_option("--grid-scale", opts.grid_scale, "Uniform grid refinement factor")
            ->capture_default_str()
            ->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed, "Reserved; the model is deterministic");
        sub->callback([&, fn] { action = [&, fn] { return fn(opts); }; });
    };
    add("simulate", "Store and read out with explicit read energies", ramanbs::cmd_simulate);
    add("design", "Design read energies for a target output distribution", ramanbs::cmd_design);
    add("calibrate", "Fit coupling and read energy to measured efficiencies",
        ramanbs::cmd_calibrate);
    add("interfere", "Interfere the outputs of two memories", ramanbs::cmd_interfere);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : ramanbs::exit_config;
    }
    return ramanbs::run_guarded(action);
}
