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

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "assignment.hpp"
#include "error.hpp"
#include "experiments.hpp"

namespace bgk {

using nlohmann::json;

std::vector<double> RunConfig::snapshot_times() const {
    if (!snapshots.empty()) return snapshots;
    std::vector<double> t;
    for (int i = 0; i <= 4; ++i) t.push_back(t_end * i / 4.0);
    t.back() = t_end;
    return t;
}

PhaseGrid RunConfig::phase_grid() const {
    PhaseGrid g;
    g.dim = dim;
    g.nx = grid.nx;
    g.nv = grid.nv;
    g.vmax = grid.vmax > 0.0 ? grid.vmax : auto_vmax(initial);
    return g;
}

void validate(const RunConfig& cfg) {
    check_dim(cfg.dim);
    require(!cfg.N.empty(), "N list must be nonempty");
    require(!cfg.epsilon.empty(), "epsilon list must be nonempty");
    for (std::size_t n : cfg.N) require(n >= 1, "every N must be at least 1");
    require(cfg.t_end > 0.0 && std::isfinite(cfg.t_end), "t_end must be positive");
    require(cfg.replicas >= 2, "replicas must be at least 2");
    require(cfg.grid.dt > 0.0 && std::isfinite(cfg.grid.dt), "grid.dt must be positive");
    require(cfg.grid.vmax >= 0.0 && std::isfinite(cfg.grid.vmax), "grid.vmax must be nonnegative (0 = automatic)");
    require(cfg.initial.dim == cfg.dim, "initial law dimension differs from dim");
    validate(cfg.initial);
    validate(cfg.phase_grid());
    const double dx = 1.0 / cfg.grid.nx;
    for (double e : cfg.epsilon) {
        require(e > 0.0 && e <= 1.0, "epsilon must lie in (0, 1]");
        if (e < 4.0 * dx) {
            std::ostringstream msg;
            msg << "epsilon " << e << " is below 4 dx = " << 4.0 * dx << "; raise grid.nx to at least "
                << static_cast<int>(std::ceil(4.0 / e / 2.0)) * 2;
            fail(ErrorCode::InvalidInput, msg.str());
        }
    }
    const auto times = cfg.snapshot_times();
    for (std::size_t i = 0; i < times.size(); ++i) {
        require(times[i] >= 0.0 && times[i] <= cfg.t_end, "snapshot times must lie in [0, t_end]");
        if (i > 0) require(times[i] > times[i - 1], "snapshot times must be strictly increasing");
    }
    require(cfg.w2_samples >= 1 && cfg.w2_samples <= kMaxW2Points, "w2_samples must lie in [1, 4096]");
}

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!known.count(it.key())) fail(ErrorCode::InvalidInput, "unknown key '" + it.key() + "' in " + where);
    }
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        fail(ErrorCode::InvalidInput, std::string("config is not valid JSON: ") + e.what());
    }
    require(j.is_object(), "config must be a JSON object");
    reject_unknown(j, {"dim", "N", "epsilon", "t_end", "snapshots", "replicas", "seed", "grid", "initial",
                       "output_dir", "w2_samples", "good_set", "regularized"},
                   "config");
    RunConfig cfg;
    try {
        cfg.dim = j.value("dim", cfg.dim);
        check_dim(cfg.dim);
        if (j.contains("N")) cfg.N = j.at("N").get<std::vector<std::size_t>>();
        if (j.contains("epsilon")) cfg.epsilon = j.at("epsilon").get<std::vector<double>>();
        cfg.t_end = j.value("t_end", cfg.t_end);
        if (j.contains("snapshots")) cfg.snapshots = j.at("snapshots").get<std::vector<double>>();
        cfg.replicas = j.value("replicas", cfg.replicas);
        cfg.seed = j.value("seed", cfg.seed);
        cfg.output_dir = j.value("output_dir", cfg.output_dir);
        cfg.w2_samples = j.value("w2_samples", cfg.w2_samples);
        cfg.good_set = j.value("good_set", cfg.good_set);
        cfg.regularized = j.value("regularized", cfg.regularized);
        if (j.contains("grid")) {
            const json& g = j.at("grid");
            reject_unknown(g, {"nx", "nv", "vmax", "dt"}, "grid");
            cfg.grid.nx = g.value("nx", cfg.grid.nx);
            cfg.grid.nv = g.value("nv", cfg.grid.nv);
            cfg.grid.vmax = g.value("vmax", cfg.grid.vmax);
            cfg.grid.dt = g.value("dt", cfg.grid.dt);
        }
        cfg.initial = InitialLaw{};
        cfg.initial.dim = cfg.dim;
        cfg.initial.u0 = Vec(cfg.dim);
        if (j.contains("initial")) {
            const json& f = j.at("initial");
            reject_unknown(f, {"a", "T0", "u0"}, "initial");
            cfg.initial.a = f.value("a", cfg.initial.a);
            cfg.initial.T0 = f.value("T0", cfg.initial.T0);
            if (f.contains("u0")) {
                auto u = f.at("u0").get<std::vector<double>>();
                require(static_cast<int>(u.size()) == cfg.dim, "initial.u0 must have dim entries");
                cfg.initial.u0 = Vec::from(u);
            }
        }
    } catch (const json::exception& e) {
        fail(ErrorCode::InvalidInput, std::string("config has a field of the wrong type: ") + e.what());
    }
    validate(cfg);
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Io, "cannot open config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str());
}

std::string to_json(const RunConfig& cfg) {
    json j;
    j["dim"] = cfg.dim;
    j["N"] = cfg.N;
    j["epsilon"] = cfg.epsilon;
    j["t_end"] = cfg.t_end;
    j["snapshots"] = cfg.snapshot_times();
    j["replicas"] = cfg.replicas;
    j["seed"] = cfg.seed;
    j["grid"] = {{"nx", cfg.grid.nx}, {"nv", cfg.grid.nv}, {"vmax", cfg.grid.vmax}, {"dt", cfg.grid.dt}};
    std::vector<double> u0(cfg.initial.u0.span().begin(), cfg.initial.u0.span().end());
    j["initial"] = {{"a", cfg.initial.a}, {"T0", cfg.initial.T0}, {"u0", u0}};
    j["output_dir"] = cfg.output_dir;
    j["w2_samples"] = cfg.w2_samples;
    j["good_set"] = cfg.good_set;
    j["regularized"] = cfg.regularized;
    return j.dump(2);
}

std::string to_json(const ConstantsReport& c) {
    json j{{"phi0", c.phi0},   {"grad_bound", c.grad_bound}, {"r", c.r},
           {"A", c.A},         {"A_phi", c.A_phi},           {"M", c.M},
           {"Gamma_phi", c.Gamma_phi}, {"N_phi", c.N_phi}};
    return j.dump(2);
}

}  // namespace bgk
