#pragma once

#include "lmpcast/data_io.hpp"
#include "lmpcast/estimation.hpp"
#include "lmpcast/pipeline.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace lmpcast {

/// Declarative `key = value` run configuration; `#` starts a comment. Unknown keys are rejected.
/// A `preset` key is applied first regardless of its position, so other keys override it. `preset = none`
/// and `train_start = auto` / `test_start = auto` restore the defaults, so echo() output parses back.
///
/// Keys: preset, pipeline, clip_upper, clip_lower, log_offset (number | none), order (p,d,q),
/// seasonal_order (P,D,Q), season, constant, garch (p,q | none), lognormal_correction,
/// grid_p (lo-hi), grid_q (lo-hi), train_start, train_hours, test_start, test_hours, horizon,
/// refit_every, seed, restarts, max_iterations, tolerance, gap_policy, epsilon, name, series
/// (rtlmp | dalmp | delta), max_lag, synth_length, synth_start, synth_spike_rate,
/// synth_spike_scale, synth_weekend_effect, synth_delta_mean, synth_delta_sigma2,
/// synth_dalmp_mean, synth_dalmp_sigma2.
struct RunConfig {
	std::string preset;
	PipelineConfig pipeline;
	OrderRange grid_p{1, 5};
	OrderRange grid_q{1, 5};
	std::optional<Timestamp> train_start;
	std::size_t train_hours = 0; // 0 = everything before the test window
	std::optional<Timestamp> test_start;
	std::size_t test_hours = 4 * 168;
	std::size_t horizon = 3;
	std::size_t refit_every = 0;
	GapPolicy gap_policy = GapPolicy::reject;
	double epsilon = 1e-6;
	std::string name;
	std::string series = "delta";
	std::size_t max_lag = 72;
	SynthConfig synth = SynthConfig::benchmark();

	RunConfig();

	void set_seed(std::uint64_t seed);
	// Every effective key, one `key = value` per line, in a fixed order.
	std::string echo() const;
	// Report label: `name` if set, else preset, else pipeline kind.
	std::string label() const;
};

RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::filesystem::path &path);

// Splits by the configured train/test window. Throws ConfigError when the window does not fit the data.
std::pair<MarketDataset, MarketDataset> split_dataset(const RunConfig &config, const MarketDataset &data);

} // namespace lmpcast
