// SPDX-License-Identifier: Apache-2.0
//
// mfrelay: source covariance optimization for amplify-and-forward MISO relaying
// Copyright (C) 2026 The mfrelay Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "mfrelay/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mfrelay::experiments {

namespace {

const CVector& fig1_mean()
{
    static const CVector mu = [] {
        CVector v(2);
        v << cplx(0.3518, 0.2496), cplx(-0.4039, -1.0437);
        return v;
    }();
    return mu;
}

const CVector& fig3_mean()
{
    static const CVector mu = [] {
        CVector v(2);
        v << cplx(-0.2163, 0.0627), cplx(-0.8328, 0.1438);
        return v;
    }();
    return mu;
}

std::vector<double> inclusive_range(double start, double stop, double step)
{
    if (!(step > 0.0) || !(stop >= start))
        throw ConfigError("range needs start <= stop and a positive step");
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    if (count > 100000)
        throw ConfigError("range expands to too many points");
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k)
        out.push_back(start + static_cast<double>(k) * step);
    return out;
}

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& token, const std::string& key)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(token, &used);
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': '" + token + "' is not a number");
    }
    if (used != token.size() || !std::isfinite(v))
        throw ConfigError("key '" + key + "': '" + token + "' is not a finite number");
    return v;
}

std::vector<std::string> split_list(std::string text)
{
    for (char& ch : text) {
        if (ch == ',' || ch == ';' || ch == '(' || ch == ')' || ch == '\t')
            ch = ' ';
    }
    std::istringstream is(text);
    std::vector<std::string> tokens;
    for (std::string t; is >> t;)
        tokens.push_back(t);
    return tokens;
}

std::vector<double> parse_list(const std::string& text, const std::string& key)
{
    std::vector<double> out;
    for (const auto& token : split_list(text)) {
        const auto colon = token.find(':');
        if (colon == std::string::npos) {
            out.push_back(parse_double(token, key));
            continue;
        }
        const auto second = token.find(':', colon + 1);
        if (second == std::string::npos)
            throw ConfigError("key '" + key + "': range must be start:stop:step");
        const auto r = inclusive_range(parse_double(token.substr(0, colon), key),
                                       parse_double(token.substr(colon + 1, second - colon - 1), key),
                                       parse_double(token.substr(second + 1), key));
        out.insert(out.end(), r.begin(), r.end());
    }
    if (out.empty())
        throw ConfigError("key '" + key + "': empty list");
    return out;
}

CVector parse_mean(const std::string& text)
{
    std::vector<double> parts;
    for (const auto& token : split_list(text))
        parts.push_back(parse_double(token, "mu"));
    if (parts.empty() || parts.size() % 2 != 0)
        throw ConfigError("key 'mu': expected (re, im) pairs");
    CVector mu(static_cast<Eigen::Index>(parts.size() / 2));
    for (Eigen::Index i = 0; i < mu.size(); ++i)
        mu[i] = cplx(parts[static_cast<std::size_t>(2 * i)], parts[static_cast<std::size_t>(2 * i + 1)]);
    return mu;
}

template <typename Int>
Int parse_count(const std::string& text, const std::string& key)
{
    const double v = parse_double(trim(text), key);
    if (v < 0.0 || v != std::floor(v) || v > 1e15)
        throw ConfigError("key '" + key + "': expected a non-negative integer");
    return static_cast<Int>(v);
}

} // namespace

std::string to_string(Mode mode)
{
    switch (mode) {
    case Mode::Fig1Compare:
        return "fig1-compare";
    case Mode::Fig2MeanSweep:
        return "fig2-mean-sweep";
    case Mode::Fig3BfConsistency:
        return "fig3-bf-consistency";
    case Mode::LtOrderSuite:
        return "lt-order-suite";
    case Mode::Custom:
        return "custom";
    }
    return "custom";
}

Mode parse_mode(const std::string& name)
{
    for (Mode m : {Mode::Fig1Compare, Mode::Fig2MeanSweep, Mode::Fig3BfConsistency, Mode::LtOrderSuite,
                   Mode::Custom}) {
        if (to_string(m) == name)
            return m;
    }
    throw ConfigError("unknown mode '" + name + "'");
}

ExperimentConfig default_config(Mode mode)
{
    ExperimentConfig cfg;
    cfg.mode = mode;
    cfg.mu = fig1_mean();
    cfg.alpha = 0.1;
    cfg.g_relay_db = 15.0;
    cfg.gamma_db = inclusive_range(0.0, 30.0, 5.0);
    switch (mode) {
    case Mode::Fig2MeanSweep:
        cfg.gamma_db = {0.0, 10.0, 20.0};
        cfg.mean_norms = inclusive_range(0.0, 2.0, 0.4);
        break;
    case Mode::Fig3BfConsistency:
        cfg.mu = fig3_mean();
        cfg.alpha = 0.5;
        cfg.g_relay_db = 10.0;
        cfg.gamma_db = inclusive_range(-5.0, 30.0, 2.5);
        break;
    case Mode::LtOrderSuite:
        cfg.samples = 10000;
        break;
    default:
        break;
    }
    return cfg;
}

void ExperimentConfig::validate() const
{
    if (antennas() < 2)
        throw ConfigError("mu must have at least 2 entries (M >= 2)");
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
        if (!std::isfinite(mu[i].real()) || !std::isfinite(mu[i].imag()))
            throw ConfigError("mu entries must be finite");
    }
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
        throw ConfigError("alpha must be finite and >= 0");
    if (!std::isfinite(g_relay_db))
        throw ConfigError("g_db must be finite");
    if (mode != Mode::LtOrderSuite && gamma_db.empty())
        throw ConfigError("gamma_db must list at least one SNR");
    if (samples < kMinCount)
        throw ConfigError("samples must be >= 1000");
    if (mode == Mode::LtOrderSuite) {
        if (instances < kMinCount)
            throw ConfigError("instances must be >= 1000");
        if (min_antennas < 2 || max_antennas < min_antennas)
            throw ConfigError("antenna range must satisfy 2 <= min_antennas <= max_antennas");
    }
    if (mode == Mode::Fig2MeanSweep) {
        if (mean_norms.empty())
            throw ConfigError("mean_norms must list at least one value");
        for (double r : mean_norms) {
            if (!(r >= 0.0))
                throw ConfigError("mean_norms must be >= 0");
        }
        if (mu.norm() == 0.0)
            throw ConfigError("fig2 needs a nonzero mu to fix the sweep direction");
    }
    if ((mode == Mode::Fig1Compare || mode == Mode::Fig3BfConsistency) && !(alpha > 0.0))
        throw ConfigError("alpha must be positive for this mode");
    if (!(phi_tolerance > 0.0) || phi_tolerance >= 1.0)
        throw ConfigError("phi_tolerance must lie in (0, 1)");
    if (workers == 0)
        throw ConfigError("workers must be >= 1");
}

ExperimentConfig parse_config(std::istream& in)
{
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }

    Mode mode = Mode::Custom;
    for (const auto& [key, value] : entries) {
        if (key == "mode")
            mode = parse_mode(value);
    }
    ExperimentConfig cfg = default_config(mode);

    for (const auto& [key, value] : entries) {
        if (key == "mode")
            continue;
        if (key == "mu")
            cfg.mu = parse_mean(value);
        else if (key == "alpha")
            cfg.alpha = parse_double(value, key);
        else if (key == "gamma_db")
            cfg.gamma_db = parse_list(value, key);
        else if (key == "g_db")
            cfg.g_relay_db = parse_double(value, key);
        else if (key == "mean_norms")
            cfg.mean_norms = parse_list(value, key);
        else if (key == "samples")
            cfg.samples = parse_count<std::size_t>(value, key);
        else if (key == "instances")
            cfg.instances = parse_count<std::size_t>(value, key);
        else if (key == "min_antennas")
            cfg.min_antennas = parse_count<int>(value, key);
        else if (key == "max_antennas")
            cfg.max_antennas = parse_count<int>(value, key);
        else if (key == "seed")
            cfg.seed = parse_count<std::uint64_t>(value, key);
        else if (key == "workers")
            cfg.workers = parse_count<unsigned>(value, key);
        else if (key == "phi_tolerance")
            cfg.phi_tolerance = parse_double(value, key);
        else if (key == "out")
            cfg.out = value;
        else
            throw ConfigError("unknown key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in);
}

nlohmann::json to_json(const ExperimentConfig& cfg)
{
    nlohmann::json mu = nlohmann::json::array();
    for (Eigen::Index i = 0; i < cfg.mu.size(); ++i)
        mu.push_back({cfg.mu[i].real(), cfg.mu[i].imag()});
    nlohmann::json j{{"mode", to_string(cfg.mode)},
                     {"antennas", cfg.antennas()},
                     {"mu", mu},
                     {"alpha", cfg.alpha},
                     {"gamma_db", cfg.gamma_db},
                     {"g_db", cfg.g_relay_db},
                     {"samples", cfg.samples},
                     {"seed", cfg.seed},
                     {"workers", cfg.workers},
                     {"phi_tolerance", cfg.phi_tolerance}};
    if (cfg.mode == Mode::Fig2MeanSweep)
        j["mean_norms"] = cfg.mean_norms;
    if (cfg.mode == Mode::LtOrderSuite) {
        j["instances"] = cfg.instances;
        j["min_antennas"] = cfg.min_antennas;
        j["max_antennas"] = cfg.max_antennas;
    }
    return j;
}

std::string config_hash(const ExperimentConfig& cfg)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : to_json(cfg).dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> fields)
{
    if (fields.size() != header_.size())
        throw std::invalid_argument("CsvTable::add_row: field count does not match the header");
    rows_.push_back(std::move(fields));
}

std::string CsvTable::str() const
{
    auto cell = [](const std::string& s) {
        if (s.find_first_of(",\"\r\n") == std::string::npos)
            return s;
        std::string quoted = "\"";
        for (char ch : s) {
            if (ch == '"')
                quoted += '"';
            quoted += ch;
        }
        return quoted + '"';
    };
    std::string out;
    auto emit = [&](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i)
                out += ',';
            out += cell(fields[i]);
        }
        out += "\r\n";
    };
    emit(header_);
    for (const auto& r : rows_)
        emit(r);
    return out;
}

std::string format_number(double value)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

} // namespace mfrelay::experiments
