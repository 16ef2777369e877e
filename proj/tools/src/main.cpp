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

#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "mfrelay/experiments.hpp"

namespace ex = mfrelay::experiments;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitConfig = 1;
constexpr int kExitAssertion = 2;

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Source covariance optimization for amplify-and-forward MISO relaying"};
    std::string mode_name;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> samples;
    std::optional<unsigned> workers;
    std::string out;
    app.add_option("--mode", mode_name,
                   "fig1-compare | fig2-mean-sweep | fig3-bf-consistency | lt-order-suite | custom");
    app.add_option("--config", config_path, "flat key = value configuration file")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "base RNG seed");
    app.add_option("--samples", samples, "Monte Carlo draws per evaluation (>= 1000)");
    app.add_option("--out", out, "output path; the JSON sidecar goes to <out>.json");
    app.add_option("--workers", workers, "threads per capacity evaluation");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitConfig;
    }

    ex::ExperimentResult result;
    std::string out_path;
    try {
        ex::ExperimentConfig cfg;
        if (!config_path.empty()) {
            cfg = ex::load_config(config_path);
            if (!mode_name.empty() && ex::parse_mode(mode_name) != cfg.mode)
                throw ex::ConfigError("--mode " + mode_name + " conflicts with the config file mode " +
                                      ex::to_string(cfg.mode));
        } else if (!mode_name.empty()) {
            cfg = ex::default_config(ex::parse_mode(mode_name));
        } else {
            throw ex::ConfigError("either --mode or --config is required");
        }
        if (seed)
            cfg.seed = *seed;
        if (samples)
            cfg.samples = *samples;
        if (workers)
            cfg.workers = *workers;
        if (!out.empty())
            cfg.out = out;
        cfg.validate();
        out_path = cfg.out;
        result = ex::run(cfg);
    } catch (const ex::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    if (out_path.empty()) {
        if (result.mode == ex::Mode::LtOrderSuite)
            std::cout << result.report.dump(2) << '\n';
        else
            std::cout << result.table.str();
    } else {
        try {
            ex::write_outputs(result, out_path);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kExitConfig;
        }
    }

    for (const auto& c : result.report["checks"])
        std::cerr << (c["passed"].get<bool>() ? "PASS " : "FAIL ") << c["name"].get<std::string>() << '\n';
    return result.passed() ? kExitPass : kExitAssertion;
}
