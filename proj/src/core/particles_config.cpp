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

#include "particles_config.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "error.hpp"

namespace bgk {

void ParticleConfig::set(std::size_t i, const Vec& pos, const Vec& vel) {
    for (int k = 0; k < dim; ++k) {
        x[i * dim + k] = pos[k];
        v[i * dim + k] = vel[k];
    }
}

void validate(const ParticleConfig& cfg) {
    check_dim(cfg.dim);
    require(cfg.x.size() == cfg.v.size(), "position and velocity arrays differ in length");
    require(cfg.x.size() % cfg.dim == 0, "configuration storage is not a multiple of the dimension");
    require(cfg.size() >= 1, "configuration needs at least one particle");
    for (double s : cfg.x) require(std::isfinite(s) && s >= -0.5 && s < 0.5, "particle position is not wrapped to [-1/2, 1/2)");
    for (double s : cfg.v) require(std::isfinite(s), "particle velocity is not finite");
}

std::uint64_t config_hash(const ParticleConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](const std::vector<double>& data) {
        for (double s : data) {
            unsigned char bytes[sizeof(double)];
            std::memcpy(bytes, &s, sizeof s);
            for (unsigned char b : bytes) {
                h ^= b;
                h *= 0x100000001b3ull;
            }
        }
    };
    mix(cfg.x);
    mix(cfg.v);
    return h;
}

void write_config_csv(std::ostream& out, const ParticleConfig& cfg) {
    for (int k = 0; k < cfg.dim; ++k) out << (k ? "," : "") << "x" << k + 1;
    for (int k = 0; k < cfg.dim; ++k) out << ",v" << k + 1;
    out << '\n';
    out.precision(17);
    for (std::size_t i = 0; i < cfg.size(); ++i) {
        for (int k = 0; k < cfg.dim; ++k) out << (k ? "," : "") << cfg.x[i * cfg.dim + k];
        for (int k = 0; k < cfg.dim; ++k) out << ',' << cfg.v[i * cfg.dim + k];
        out << '\n';
    }
}

ParticleConfig read_config_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) fail(ErrorCode::Io, "empty configuration CSV");
    int columns = 1;
    for (char c : line) columns += c == ',';
    if (columns % 2 != 0) fail(ErrorCode::Io, "configuration CSV needs x1..xd,v1..vd columns");
    ParticleConfig cfg;
    cfg.dim = columns / 2;
    check_dim(cfg.dim);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::vector<double> values;
        while (std::getline(row, cell, ',')) values.push_back(std::stod(cell));
        if (static_cast<int>(values.size()) != columns) fail(ErrorCode::Io, "ragged row in configuration CSV");
        cfg.x.insert(cfg.x.end(), values.begin(), values.begin() + cfg.dim);
        cfg.v.insert(cfg.v.end(), values.begin() + cfg.dim, values.end());
    }
    validate(cfg);
    return cfg;
}

}  // namespace bgk
