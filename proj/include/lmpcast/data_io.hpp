#pragma once

#include "lmpcast/arima.hpp"
#include "lmpcast/series.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace lmpcast {

struct MarketDataset {
	HourlySeries dalmp;
	HourlySeries rtlmp;
	std::string node;
	// Ingestion events (filled gaps, merged duplicate hours) for the caller to log.
	std::vector<std::string> notes;

	MarketDataset(HourlySeries dalmp_series, HourlySeries rtlmp_series, std::string node_id = {});

	std::size_t size() const {
		return dalmp.size();
	}
	Timestamp start() const {
		return dalmp.start();
	}
	MarketDataset slice(std::size_t offset, std::size_t count) const;
};

// Contiguous concatenation; throws AlignmentError when `later` does not start where `earlier` ends.
MarketDataset concatenate(const MarketDataset &earlier, const MarketDataset &later);

enum class GapPolicy { reject, forward_fill, interpolate };

GapPolicy parse_gap_policy(std::string_view text);
std::string_view to_string(GapPolicy policy);

struct LoadOptions {
	GapPolicy gap_policy = GapPolicy::reject;
	std::string node;
};

// Accepts "YYYY-MM-DDTHH:MM[:SS](Z|+00:00)" on a whole hour. Throws ParseError (line 0).
Timestamp parse_timestamp(std::string_view text);

/// CSV with the exact header `timestamp,dalmp,rtlmp`, one row per UTC hour.
/// Duplicate timestamps (DST fall-back exports) are averaged; gaps follow the gap policy.
MarketDataset load_lmp_csv(const std::filesystem::path &path, const LoadOptions &options = {});
MarketDataset parse_lmp_csv(std::string_view text, const LoadOptions &options = {});

// Prices written with 6 decimals, LF line endings.
void write_lmp_csv(const std::filesystem::path &path, const MarketDataset &dataset);
std::string format_lmp_csv(const MarketDataset &dataset);

/// Synthetic market. RTLMP = DALMP - delta, where
///   delta_t = ARMA draw + weekend_effect * weekday_t   (weekday_t = 1 Mon-Fri, 0 Sat-Sun),
/// so weekend-hour delta sits weekend_effect below weekday-hour delta. Spikes of random sign and
/// exponential magnitude (mean spike_scale) are added to RTLMP at rate spike_rate per hour.
struct SynthConfig {
	ModelSpec delta_spec;
	ParameterVector delta_params;
	double weekend_effect = 0.0;
	ModelSpec dalmp_spec;
	ParameterVector dalmp_params;
	double spike_rate = 0.0;
	double spike_scale = 0.0;
	std::size_t length = 0;
	Timestamp start{};
	std::uint64_t seed = 0;
	std::string node = "SYNTH";

	void validate() const;

	// Desk-scale stand-in for a year of hourly prices: ARMA(1,2) delta with a weekday shift, daily
	// seasonal DALMP, sparse two-sided spikes. Starts on a Monday.
	static SynthConfig benchmark();
};

MarketDataset synth_market(const SynthConfig &config);

// lag, acf, pacf, band (band = 2/sqrt(n)).
void export_acf_pacf(const std::filesystem::path &path, const HourlySeries &series, std::size_t max_lag);

struct ImprovementCurve {
	std::string name;
	std::vector<double> improvement_pct;
};
// horizon, then one column per model.
void export_improvement_curve(const std::filesystem::path &path, const std::vector<ImprovementCurve> &curves);

struct OverlayRow {
	Timestamp time;
	double actual;
	double forecast;
	double baseline;
};
// timestamp, actual, forecast, baseline.
void export_forecast_overlay(const std::filesystem::path &path, const std::vector<OverlayRow> &rows);

void write_text_file(const std::filesystem::path &path, std::string_view content);
std::string read_text_file(const std::filesystem::path &path);

} // namespace lmpcast
