// Serial reference vs OpenMP versions of the two parallel kernels.

#include "lmpcast/backtest.hpp"
#include "lmpcast/data_io.hpp"
#include "lmpcast/estimation.hpp"

#include <benchmark/benchmark.h>

using namespace lmpcast;

namespace {

HourlySeries grid_series() {
	const SynthConfig synth = SynthConfig::benchmark();
	return simulate(synth.delta_spec, synth.delta_params, 5000, std::nullopt, 1);
}

struct BacktestFixture {
	MarketDataset train;
	MarketDataset test;
	FittedPipeline fitted;

	BacktestFixture() : train(synth_market(SynthConfig::benchmark())), test(train) {
		const std::size_t n = train.size();
		test = train.slice(n - 672, 672);
		train = train.slice(0, n - 672);
		fitted = fit_pipeline(preset("armax-paper-garch"), train);
	}
};

const BacktestFixture &backtest_fixture() {
	static const BacktestFixture f;
	return f;
}

ModelSpec grid_base() {
	ModelSpec base;
	base.constant = true;
	return base;
}

void BM_GridSelectSerial(benchmark::State &state) {
	const HourlySeries y = grid_series();
	for (auto _ : state) {
		benchmark::DoNotOptimize(grid_select_reference(y, std::nullopt, {1, 3}, {1, 3}, grid_base(), FitOptions{}));
	}
}

void BM_GridSelectParallel(benchmark::State &state) {
	const HourlySeries y = grid_series();
	for (auto _ : state) {
		benchmark::DoNotOptimize(grid_select(y, std::nullopt, {1, 3}, {1, 3}, grid_base(), FitOptions{}));
	}
}

void BM_BacktestSerial(benchmark::State &state) {
	const auto &f = backtest_fixture();
	BacktestOptions options;
	options.horizon = 12;
	for (auto _ : state) {
		benchmark::DoNotOptimize(rolling_backtest_reference(f.fitted, f.train, f.test, options));
	}
}

void BM_BacktestParallel(benchmark::State &state) {
	const auto &f = backtest_fixture();
	BacktestOptions options;
	options.horizon = 12;
	for (auto _ : state) {
		benchmark::DoNotOptimize(rolling_backtest(f.fitted, f.train, f.test, options));
	}
}

} // namespace

BENCHMARK(BM_GridSelectSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_GridSelectParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BacktestSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BacktestParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
