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

#include <benchmark/benchmark.h>

#include "mfrelay/beamforming.hpp"
#include "mfrelay/capacity.hpp"
#include "mfrelay/optimizer.hpp"
#include "mfrelay/specfun.hpp"
#include "mfrelay/stochastic_order.hpp"

namespace {

using namespace mfrelay;

ChannelMeanModel fig1_model()
{
    CVector mu(2);
    mu << cplx(0.3518, 0.2496), cplx(-0.4039, -1.0437);
    return ChannelMeanModel(mu, 0.1);
}

ChannelMeanModel fig3_model()
{
    CVector mu(2);
    mu << cplx(-0.2163, 0.0627), cplx(-0.8328, 0.1438);
    return ChannelMeanModel(mu, 0.5);
}

void BM_EstimateCapacity(benchmark::State& state)
{
    const auto model = fig1_model();
    const auto params = LinkParams::from_db(10.0, 15.0);
    const auto q = build_q_opt(model, 0.8);
    const auto fading = FadingDistribution::rayleigh();
    const SamplingOptions opts{static_cast<std::size_t>(state.range(0)), 7, 1};
    for (auto _ : state)
        benchmark::DoNotOptimize(estimate_capacity(q, model, params, fading, opts));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EstimateCapacity)->Arg(10'000)->Arg(100'000)->Unit(benchmark::kMillisecond);

void BM_OptimizePhi(benchmark::State& state)
{
    const auto model = fig1_model();
    const auto params = LinkParams::from_db(10.0, 15.0);
    const auto fading = FadingDistribution::rayleigh();
    const SearchConfig cfg{1e-4, {static_cast<std::size_t>(state.range(0)), 7, 1}};
    for (auto _ : state)
        benchmark::DoNotOptimize(optimize_phi(model, params, fading, cfg));
}
BENCHMARK(BM_OptimizePhi)->Arg(100'000)->Unit(benchmark::kMillisecond);

void BM_BfExpectations(benchmark::State& state)
{
    const auto inst = make_bf_instance(fig3_model(), LinkParams::from_db(static_cast<double>(state.range(0)), 10.0));
    for (auto _ : state)
        benchmark::DoNotOptimize(bf_expectations(inst));
}
BENCHMARK(BM_BfExpectations)->Arg(-5)->Arg(10)->Arg(30)->Unit(benchmark::kMicrosecond);

void BM_BfThreshold(benchmark::State& state)
{
    const auto model = fig3_model();
    for (auto _ : state)
        benchmark::DoNotOptimize(bf_threshold(model, db_to_linear(10.0), {1.0, 100.0}));
}
BENCHMARK(BM_BfThreshold)->Unit(benchmark::kMillisecond);

void BM_LtOrderCheck(benchmark::State& state)
{
    Rng rng(11);
    const auto inst = random_matched_instance(static_cast<int>(state.range(0)), rng);
    for (auto _ : state)
        benchmark::DoNotOptimize(lt_order_check(inst));
}
BENCHMARK(BM_LtOrderCheck)->DenseRange(2, 6, 2)->Unit(benchmark::kMicrosecond);

void BM_ExpxGamma0(benchmark::State& state)
{
    double x = 1e-3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(expx_gamma0(x));
        x = x < 1e3 ? x * 1.01 : 1e-3;
    }
}
BENCHMARK(BM_ExpxGamma0);

void BM_Ncx2Density(benchmark::State& state)
{
    double x = 1e-3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(ncx2_density(x, 14.385));
        x = x < 200.0 ? x * 1.01 : 1e-3;
    }
}
BENCHMARK(BM_Ncx2Density);

} // namespace

BENCHMARK_MAIN();
