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

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mfrelay/channel.hpp"

namespace mfrelay::experiments {

/// Bad key, bad value or a violated invariant in an experiment configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Mode { Fig1Compare, Fig2MeanSweep, Fig3BfConsistency, LtOrderSuite, Custom };

std::string to_string(Mode mode);
/// Accepts the names printed by to_string ("fig1-compare", ...). Throws ConfigError.
Mode parse_mode(const std::string& name);

inline constexpr std::size_t kMinCount = 1000;

struct ExperimentConfig {
    Mode mode = Mode::Custom;
    CVector mu;                      ///< length = antennas
    double alpha = 0.1;
    std::vector<double> gamma_db;    ///< SNR sweep
    double g_relay_db = 15.0;
    std::vector<double> mean_norms;  ///< fig2 sweep of ||mu|| along mu / ||mu||
    std::size_t samples = 1'000'000; ///< Monte Carlo draws per capacity evaluation
    std::size_t instances = 1000;    ///< lt-order-suite instance count
    int min_antennas = 2;            ///< lt-order-suite antenna range
    int max_antennas = 6;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    double phi_tolerance = 1e-4;
    std::string out;

    int antennas() const { return static_cast<int>(mu.size()); }
    /// Throws ConfigError on the first violated invariant.
    void validate() const;
};

/// Figure setups used when a key is absent from the config file.
ExperimentConfig default_config(Mode mode);

/// Parses the flat "key = value" format ('#' starts a comment). The mode key selects the defaults
/// the remaining keys override. Lists are separated by commas or whitespace; "a:b:step" expands to
/// an inclusive range; mu is a list of (re, im) pairs, parentheses optional.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

/// Canonical JSON form (everything except the output path).
nlohmann::json to_json(const ExperimentConfig& cfg);

/// FNV-1a 64 over the canonical JSON dump, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

/// RFC 4180 table: CRLF line ends, fields quoted only when needed.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    void add_row(std::vector<std::string> fields);
    std::size_t rows() const { return rows_.size(); }
    const std::vector<std::string>& header() const { return header_; }
    const std::vector<std::string>& row(std::size_t i) const { return rows_.at(i); }
    std::string str() const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Round-trip formatting for CSV cells.
std::string format_number(double value);

struct ExperimentResult {
    Mode mode = Mode::Custom;
    CsvTable table{{}};
    nlohmann::json report; ///< sidecar: config, hash, checks, mode-specific extras
    std::vector<std::string> failures;

    bool passed() const { return failures.empty(); }
};

/// Optimum vs. the best allocation on a seed-logged random basis tilted 30 to 60 degrees off mu.
ExperimentResult run_fig1(const ExperimentConfig& cfg);
/// Optimal capacity against ||mu|| for every SNR in the sweep.
ExperimentResult run_fig2(const ExperimentConfig& cfg);
/// f(gamma) against 1 - phi* with a row-by-row sign-consistency verdict.
ExperimentResult run_fig3(const ExperimentConfig& cfg);
/// Random matched comparison instances plus the mismatched counter-instance.
ExperimentResult run_lt_suite(const ExperimentConfig& cfg);
/// Optimal structure and isotropic reference for each SNR.
ExperimentResult run_custom(const ExperimentConfig& cfg);

ExperimentResult run(const ExperimentConfig& cfg);

/// Writes the CSV (when the mode has one) to path and the JSON sidecar to path + ".json";
/// lt-order-suite writes its report to path directly.
void write_outputs(const ExperimentResult& result, const std::string& path);

} // namespace mfrelay::experiments
