#pragma once

#include "lmpcast/pipeline.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace lmpcast {

inline constexpr double kDefaultExclusionEpsilon = 1e-6;

struct ImprovementResult {
	double percent;
	std::size_t included;
	std::size_t excluded;
};

/// I = 1 - mean(|RTLMP - RTLMP'| / |RTLMP - DALMP|), in percent. Terms whose denominator is at most
/// epsilon are excluded and counted. Throws AllTermsExcluded when nothing remains.
ImprovementResult improvement_index(const HourlySeries &actual, const HourlySeries &forecast,
                                    const HourlySeries &dalmp, double epsilon = kDefaultExclusionEpsilon);

double mae(const HourlySeries &actual, const HourlySeries &forecast);

struct HorizonScore {
	std::size_t horizon;
	double improvement_pct;
	double mae;
	std::size_t included;
	std::size_t excluded;
};

struct BacktestReport {
	std::string name;
	Timestamp test_start;
	std::size_t test_length = 0;
	std::size_t origins = 0;
	std::vector<HorizonScore> horizons;
	// One-step-ahead RTLMP' for every test hour; kept in memory for overlay plots, not serialized.
	std::vector<double> one_step;
};

// refit_every = 0 fits once on the training window; otherwise the model is refit on all data up to
// the origin every refit_every hours.
struct RefitPolicy {
	std::size_t refit_every = 0;
};

struct BacktestOptions {
	std::size_t horizon = 3;
	RefitPolicy refit;
	double epsilon = kDefaultExclusionEpsilon;
	std::string name;
};

/// Forecast origins step hourly through `test`: origin o conditions on train + test[0, o) and
/// scores steps 1..horizon against test[o .. o + horizon). Steps past the end are dropped.
/// Origins are evaluated in parallel; scores are reduced in origin order.
BacktestReport rolling_backtest(const PipelineConfig &config, const MarketDataset &train, const MarketDataset &test,
                                const BacktestOptions &options);
// Same, but starting from an already fitted pipeline (fit-once policy only).
BacktestReport rolling_backtest(const FittedPipeline &fitted, const MarketDataset &train, const MarketDataset &test,
                                const BacktestOptions &options);

// Single-threaded reference of rolling_backtest; results must match bit for bit.
BacktestReport rolling_backtest_reference(const FittedPipeline &fitted, const MarketDataset &train,
                                          const MarketDataset &test, const BacktestOptions &options);

std::string serialize_report(const BacktestReport &report);
BacktestReport deserialize_report(std::string_view text);

struct ComparisonTable {
	std::vector<BacktestReport> rows; // sorted by I_1, descending, stable
	std::size_t horizons = 0;

	std::string to_csv() const;
	std::string to_text() const;
};

// Throws MismatchedWindows unless all reports share test window and horizon count.
ComparisonTable compare_models(const std::vector<BacktestReport> &reports);

} // namespace lmpcast
