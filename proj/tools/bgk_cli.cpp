// Copyright 2026 The bgklab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "bgk/bgk.h"

namespace {

int report(bgk_status st) {
    std::cerr << "bgk: " << bgk_status_string(st) << ": " << bgk_last_error() << '\n';
    return 1 + static_cast<int>(st);
}

bool read_file(const std::string& path, std::string& text) {
    std::ifstream in(path);
    if (!in) return false;
    std::stringstream buf;
    buf << in.rdbuf();
    text = buf.str();
    return true;
}

using RunFn = bgk_status (*)(const char*, char**);

int run_config(RunFn fn, const std::string& path) {
    std::string text;
    if (!read_file(path, text)) {
        std::cerr << "bgk: cannot read config file " << path << '\n';
        return 2;
    }
    char* out = nullptr;
    bgk_status st = fn(text.c_str(), &out);
    if (st != BGK_OK) return report(st);
    std::cout << out << '\n';
    bgk_string_free(out);
    return 0;
}

int run_constants(double epsilon, int dim, double horizon, double C2, double T0) {
    bgk_kernel* k = nullptr;
    bgk_status st = bgk_kernel_create("bump", epsilon, dim, &k);
    if (st != BGK_OK) return report(st);
    // twice the fourth velocity moment of M_{0,T0}
    const double M = 2.0 * dim * (dim + 2) * T0 * T0;
    bgk_constants c{};
    st = bgk_constants_report(k, horizon, C2, M, &c);
    bgk_kernel_destroy(k);
    if (st != BGK_OK) return report(st);
    nlohmann::json j{{"epsilon", epsilon}, {"dim", dim},     {"horizon", horizon},     {"C2", C2},
                     {"phi0", c.phi0},     {"grad_bound", c.grad_bound}, {"r", c.r}, {"A", c.A},
                     {"A_phi", c.A_phi},   {"M", c.M},       {"Gamma_phi", c.Gamma_phi}, {"N_phi", c.N_phi}};
    std::cout << j.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Particle and grid solvers for the regularized BGK equation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(bgk_version()));

    std::string config;
    auto add_config_command = [&](const std::string& name, const std::string& help) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config, "RunConfig JSON file")->required()->check(CLI::ExistingFile);
        return sub;
    };
    CLI::App* chaos = add_config_command("chaos-sweep", "Coupled-process sweep over N");
    CLI::App* cutoff = add_config_command("cutoff-sweep", "Regularized vs true BGK sweep over epsilon");
    CLI::App* solve = add_config_command("solve", "Grid solve from the configured initial law");
    CLI::App* simulate = add_config_command("simulate", "One particle-system run");

    double epsilon = 0.25, horizon = 0.5, C2 = 0.5, T0 = 1.0;
    int dim = 2;
    CLI::App* constants = app.add_subcommand("constants", "Kernel and good-set constants");
    constants->add_option("--epsilon", epsilon, "Kernel width")->required()->check(CLI::Range(1e-6, 1.0));
    constants->add_option("--dim", dim, "Dimension")->check(CLI::Range(1, 3));
    constants->add_option("--horizon", horizon, "Time horizon T")->check(CLI::NonNegativeNumber);
    constants->add_option("--C2", C2, "Lower mass constant of the initial datum")->check(CLI::PositiveNumber);
    constants->add_option("--T0", T0, "Initial temperature used for the p = 4 moment cap")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    if (chaos->parsed()) return run_config(bgk_run_chaos_sweep, config);
    if (cutoff->parsed()) return run_config(bgk_run_cutoff_sweep, config);
    if (solve->parsed()) return run_config(bgk_run_solve, config);
    if (simulate->parsed()) return run_config(bgk_run_simulate, config);
    if (constants->parsed()) return run_constants(epsilon, dim, horizon, C2, T0);
    return 0;
}
