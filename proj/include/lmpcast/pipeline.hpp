#pragma once

#include "lmpcast/data_io.hpp"
#include "lmpcast/estimation.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lmpcast {

enum class PipelineKind {
	sarima_rtlmp,  // model log(RTLMP + c) directly
	sarimax_rtlmp, // same, with log(DALMP + c) as regressor
	arma_delta,    // model log(clip(DALMP - RTLMP) + c), reconstruct RTLMP' = DALMP - delta'
	armax_delta,   // same, with the weekday indicator as regressor
	dalmp_baseline, // RTLMP' = DALMP
	realized_oracle // RTLMP' = realized RTLMP; harness upper bound only
};

std::string_view to_string(PipelineKind kind);
PipelineKind parse_pipeline_kind(std::string_view text);
bool models_delta(PipelineKind kind);
bool has_model(PipelineKind kind);

struct PipelineConfig {
	PipelineKind kind = PipelineKind::arma_delta;
	std::optional<ClipBounds> clip;
	std::optional<LogOffset> offset;
	ModelSpec spec;
	std::optional<GarchSpec> garch;
	// Back-transform exp(y + var/2) - c instead of exp(y) - c.
	bool lognormal_correction = false;
	FitOptions fit_options;

	// SARIMAX/ARMAX need exactly one regressor; SARIMA/ARMA none.
	void validate() const;
};

// sarima-paper, sarimax-paper, arma-paper, armax-paper; append "-garch" for a GARCH(1,1) layer.
// dalmp-baseline and oracle select the reference pipelines.
PipelineConfig preset(std::string_view name);
std::vector<std::string> preset_names();

struct FittedPipeline {
	PipelineConfig config;
	std::optional<FittedModel> model;
	Timestamp train_start;
	std::size_t train_length = 0;
};

// Transformed target and regressors for a dataset window, as the pipeline feeds them to the model.
struct PipelineInputs {
	HourlySeries target;
	std::optional<ExogenousMatrix> exog;
};
PipelineInputs pipeline_inputs(const PipelineConfig &config, const MarketDataset &data);

FittedPipeline fit_pipeline(const PipelineConfig &config, const MarketDataset &train);

struct PipelineForecast {
	HourlySeries rtlmp;
	// Forecast-error variance on the model's working scale (after clipping and log transform).
	std::vector<double> variance;
};

// Forecasts RTLMP for the `horizon` hours following `history`. dalmp_future must start at history's end
// and cover the horizon. The oracle pipeline additionally needs `realized`.
PipelineForecast forecast_pipeline(const FittedPipeline &fitted, const MarketDataset &history,
                                   const HourlySeries &dalmp_future, std::size_t horizon,
                                   const HourlySeries *realized = nullptr);

// JSON artifact holding config, estimated parameters and residuals.
std::string serialize_pipeline(const FittedPipeline &fitted);
FittedPipeline deserialize_pipeline(std::string_view json);

// Human-readable fitted-model report.
std::string describe_fit(const FittedPipeline &fitted);

} // namespace lmpcast
