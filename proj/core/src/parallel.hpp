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
#include <thread>
#include <vector>

#include "mfrelay/rng.hpp"
#include "mfrelay/stats.hpp"

namespace mfrelay::detail {

/// Splits `samples` over `workers` streams Rng(seed, w) and pools the per-worker statistics in
/// worker order, so the result depends only on (seed, workers).
template <typename Body>
RunningStats run_streams(std::size_t samples, std::uint64_t seed, unsigned workers, Body body)
{
    if (workers == 0)
        workers = 1;
    std::vector<RunningStats> partial(workers);
    auto chunk = [&](unsigned w) {
        const std::size_t base = samples / workers;
        const std::size_t count = base + (w < samples % workers ? 1 : 0);
        Rng rng(seed, w);
        body(rng, count, partial[w]);
    };
    if (workers == 1) {
        chunk(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(chunk, w);
        for (auto& t : pool)
            t.join();
    }
    RunningStats total;
    for (const auto& p : partial)
        total.merge(p);
    return total;
}

} // namespace mfrelay::detail
