#include "lmpcast/backtest.hpp"
#include "lmpcast/data_io.hpp"
#include "lmpcast/errors.hpp"
#include "lmpcast/estimation.hpp"
#include "lmpcast/pipeline.hpp"
#include "lmpcast/run_config.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace lmpcast;

namespace {

struct Args {
	std::string config_path;
	std::optional<std::uint64_t> seed;
	std::string preset;
	std::string data;
	std::string out;
	std::string model;
	std::string origin;
	std::size_t horizon = 0;
	std::string overlay;
	std::string curve;
	std::string report;
	std::vector<std::string> reports;
};

std::string fmt(const char *format, double v) {
	char buf[64];
	std::snprintf(buf, sizeof(buf), format, v);
	return buf;
}

RunConfig effective_config(const Args &args) {
	RunConfig config;
	if (!args.config_path.empty()) {
		if (!args.preset.empty()) {
			throw ConfigError("--preset cannot be combined with --config; set `preset` in the file instead");
		}
		config = load_run_config(args.config_path);
	} else if (!args.preset.empty()) {
		config = parse_run_config("preset = " + args.preset + "\n");
	}
	if (args.seed) {
		config.set_seed(*args.seed);
	}
	if (args.horizon > 0) {
		config.horizon = args.horizon;
	}
	return config;
}

void echo(const RunConfig &config) {
	std::cout << "# effective config\n" << config.echo() << "\n";
}

MarketDataset load_data(const Args &args, const RunConfig &config) {
	if (args.data.empty()) {
		throw ConfigError("--data is required");
	}
	MarketDataset data = load_lmp_csv(args.data, LoadOptions{config.gap_policy, {}});
	for (const auto &note : data.notes) {
		std::cerr << "lmpcast: " << args.data << ": " << note << "\n";
	}
	return data;
}

void require_out(const Args &args) {
	if (args.out.empty()) {
		throw ConfigError("--out is required");
	}
}

HourlySeries pick_series(const RunConfig &config, const MarketDataset &data) {
	if (config.series == "rtlmp") {
		return data.rtlmp;
	}
	if (config.series == "dalmp") {
		return data.dalmp;
	}
	return delta_lmp(data.dalmp, data.rtlmp);
}

int cmd_synth(const Args &args, const RunConfig &config) {
	require_out(args);
	const MarketDataset data = synth_market(config.synth);
	write_lmp_csv(args.out, data);
	std::cout << "wrote " << data.size() << " hours starting " << format_timestamp(data.start()) << " to " << args.out
	          << "\n";
	return 0;
}

int cmd_acf(const Args &args, const RunConfig &config) {
	require_out(args);
	const MarketDataset data = load_data(args, config);
	const HourlySeries series = pick_series(config, data);
	export_acf_pacf(args.out, series, config.max_lag);
	std::cout << "wrote ACF/PACF of " << config.series << " for lags 0.." << config.max_lag << " to " << args.out
	          << "\n";
	return 0;
}

std::string bic_table_text(const BicTable &table) {
	std::string out = "     ";
	for (std::size_t q : table.q_values) {
		out += "       q=" + std::to_string(q);
	}
	out += "\n";
	for (std::size_t r = 0; r < table.p_values.size(); ++r) {
		out += "p=" + std::to_string(table.p_values[r]) + "  ";
		for (std::size_t c = 0; c < table.q_values.size(); ++c) {
			const auto &cell = table.at(r, c);
			out += cell ? fmt("%11.1f", *cell) : std::string("     failed");
		}
		out += "\n";
	}
	return out;
}

std::string bic_table_csv(const BicTable &table) {
	std::string out = "p";
	for (std::size_t q : table.q_values) {
		out += ",q" + std::to_string(q);
	}
	out += "\n";
	for (std::size_t r = 0; r < table.p_values.size(); ++r) {
		out += std::to_string(table.p_values[r]);
		for (std::size_t c = 0; c < table.q_values.size(); ++c) {
			const auto &cell = table.at(r, c);
			out += "," + (cell ? fmt("%.6f", *cell) : std::string("NA"));
		}
		out += "\n";
	}
	return out;
}

int cmd_select(const Args &args, const RunConfig &config) {
	const MarketDataset data = load_data(args, config);
	const auto [train, test] = split_dataset(config, data);
	if (!has_model(config.pipeline.kind)) {
		throw ConfigError(std::string(to_string(config.pipeline.kind)) + " pipeline has no orders to select");
	}
	const PipelineInputs inputs = pipeline_inputs(config.pipeline, train);
	const GridSelection sel = grid_select(inputs.target, inputs.exog, config.grid_p, config.grid_q,
	                                      config.pipeline.spec, config.pipeline.fit_options);
	std::cout << "BIC values, " << train.size() << " training hours from " << format_timestamp(train.start())
	          << "\n"
	          << bic_table_text(sel.table);
	for (const auto &failure : sel.table.failures) {
		std::cerr << "lmpcast: " << failure << "\n";
	}
	std::cout << "chosen: p=" << sel.choice.p << " q=" << sel.choice.q << " BIC=" << fmt("%.1f", sel.choice.bic)
	          << " (" << sel.spec.describe() << ")\n";
	if (!args.out.empty()) {
		write_text_file(args.out, bic_table_csv(sel.table));
	}
	return 0;
}

int cmd_fit(const Args &args, const RunConfig &config) {
	require_out(args);
	const MarketDataset data = load_data(args, config);
	const auto [train, test] = split_dataset(config, data);
	const FittedPipeline fitted = fit_pipeline(config.pipeline, train);
	write_text_file(args.out, serialize_pipeline(fitted));
	const std::string report = describe_fit(fitted);
	std::cout << report;
	if (!args.report.empty()) {
		write_text_file(args.report, report);
	}
	return 0;
}

int cmd_forecast(const Args &args, const RunConfig &config) {
	require_out(args);
	if (args.model.empty()) {
		throw ConfigError("--model is required");
	}
	const FittedPipeline fitted = deserialize_pipeline(read_text_file(args.model));
	const MarketDataset data = load_data(args, config);
	const std::size_t h = config.horizon;
	std::size_t at = 0;
	if (args.origin.empty()) {
		if (h >= data.size()) {
			throw ConfigError("horizon leaves no history in the data");
		}
		at = data.size() - h;
	} else {
		const auto offset = (parse_timestamp(args.origin) - data.start()).count();
		if (offset <= 0 || static_cast<std::size_t>(offset) + h > data.size()) {
			throw ConfigError("origin " + args.origin + " needs history before it and " + std::to_string(h) +
			                  " hours of published DALMP after it");
		}
		at = static_cast<std::size_t>(offset);
	}
	const MarketDataset history = data.slice(0, at);
	const HourlySeries dalmp_future = data.dalmp.slice(at, h);
	const HourlySeries realized = data.rtlmp.slice(at, h);
	const PipelineForecast fc = forecast_pipeline(fitted, history, dalmp_future, h, &realized);
	std::string csv = "timestamp,rtlmp_forecast,variance,dalmp,rtlmp\n";
	std::cout << "forecast from " << format_timestamp(dalmp_future.start()) << ", " << h << " hours\n";
	for (std::size_t i = 0; i < h; ++i) {
		csv += format_timestamp(fc.rtlmp.time_at(i)) + "," + fmt("%.6f", fc.rtlmp[i]) + "," +
		       fmt("%.9g", fc.variance[i]) + "," + fmt("%.6f", dalmp_future[i]) + "," + fmt("%.6f", realized[i]) +
		       "\n";
		std::cout << "  +" << (i + 1) << "h " << format_timestamp(fc.rtlmp.time_at(i)) << "  "
		          << fmt("%.2f", fc.rtlmp[i]) << "\n";
	}
	write_text_file(args.out, csv);
	return 0;
}

int cmd_backtest(const Args &args, const RunConfig &config) {
	require_out(args);
	const MarketDataset data = load_data(args, config);
	const auto [train, test] = split_dataset(config, data);
	BacktestOptions opts;
	opts.horizon = config.horizon;
	opts.refit.refit_every = config.refit_every;
	opts.epsilon = config.epsilon;
	opts.name = config.label();
	const BacktestReport report = rolling_backtest(config.pipeline, train, test, opts);
	write_text_file(args.out, serialize_report(report));
	std::cout << report.name << ": " << test.size() << " origins from " << format_timestamp(test.start()) << "\n";
	for (const auto &h : report.horizons) {
		std::cout << "  I_" << h.horizon << " = " << fmt("%.2f", h.improvement_pct) << "%  MAE_" << h.horizon
		          << " = " << fmt("%.2f", h.mae) << " $/MWh  excluded " << h.excluded << "\n";
	}
	if (!args.overlay.empty()) {
		std::vector<OverlayRow> rows;
		for (std::size_t t = 0; t < test.size(); ++t) {
			rows.push_back({test.rtlmp.time_at(t), test.rtlmp[t], report.one_step[t], test.dalmp[t]});
		}
		export_forecast_overlay(args.overlay, rows);
	}
	return 0;
}

int cmd_compare(const Args &args) {
	if (args.reports.empty()) {
		throw ConfigError("compare needs at least one report");
	}
	std::vector<BacktestReport> reports;
	for (const auto &path : args.reports) {
		reports.push_back(deserialize_report(read_text_file(path)));
	}
	const ComparisonTable table = compare_models(reports);
	std::cout << table.to_text();
	if (!args.out.empty()) {
		write_text_file(args.out, table.to_csv());
	}
	if (!args.curve.empty()) {
		std::vector<ImprovementCurve> curves;
		for (const auto &r : table.rows) {
			ImprovementCurve c{r.name, {}};
			for (const auto &h : r.horizons) {
				c.improvement_pct.push_back(h.improvement_pct);
			}
			curves.push_back(std::move(c));
		}
		export_improvement_curve(args.curve, curves);
	}
	return 0;
}

} // namespace

int main(int argc, char **argv) {
	CLI::App app{"Electricity price forecasting: SARIMA/ARMA(X)-GARCH models of RTLMP and DALMP - RTLMP"};
	app.require_subcommand(1);
	Args args;
	app.add_option("--config", args.config_path, "Run configuration file (key = value)");
	app.add_option("--seed", args.seed, "Seed for estimation restarts and the synthetic market");
	app.add_option("--preset", args.preset, "Named pipeline preset, when no config file is given");

	auto *synth = app.add_subcommand("synth", "Write a synthetic DALMP/RTLMP dataset");
	synth->add_option("--out", args.out, "Output CSV")->required();

	auto *acf = app.add_subcommand("acf", "Export ACF/PACF plot data for the configured series");
	acf->add_option("--data", args.data, "Input CSV")->required();
	acf->add_option("--out", args.out, "Output CSV")->required();

	auto *select = app.add_subcommand("select", "BIC grid over (p, q) on the training window");
	select->add_option("--data", args.data, "Input CSV")->required();
	select->add_option("--out", args.out, "BIC table CSV");

	auto *fitcmd = app.add_subcommand("fit", "Fit the configured pipeline on the training window");
	fitcmd->add_option("--data", args.data, "Input CSV")->required();
	fitcmd->add_option("--out", args.out, "Fitted pipeline (JSON)")->required();
	fitcmd->add_option("--report", args.report, "Also write the fit report here");

	auto *fc = app.add_subcommand("forecast", "Forecast RTLMP from a fitted pipeline");
	fc->add_option("--model", args.model, "Fitted pipeline (JSON)")->required();
	fc->add_option("--data", args.data, "CSV holding history and the published DALMP for the horizon")->required();
	fc->add_option("--origin", args.origin, "First forecast hour (default: last horizon hours of the data)");
	fc->add_option("--horizon", args.horizon, "Hours ahead (default: config horizon)");
	fc->add_option("--out", args.out, "Forecast CSV")->required();

	auto *bt = app.add_subcommand("backtest", "Rolling-origin evaluation over the test window");
	bt->add_option("--data", args.data, "Input CSV")->required();
	bt->add_option("--out", args.out, "Backtest report")->required();
	bt->add_option("--horizon", args.horizon, "Hours ahead (default: config horizon)");
	bt->add_option("--overlay", args.overlay, "One-step forecast overlay CSV");

	auto *cmp = app.add_subcommand("compare", "Merge backtest reports into a comparison table");
	cmp->add_option("reports", args.reports, "Backtest report files")->required();
	cmp->add_option("--out", args.out, "Comparison CSV");
	cmp->add_option("--curve", args.curve, "Improvement-by-horizon CSV");

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError &e) {
		const int code = app.exit(e);
		return code == 0 ? 0 : 2;
	}

	try {
		if (cmp->parsed()) {
			return cmd_compare(args);
		}
		const RunConfig config = effective_config(args);
		echo(config);
		if (synth->parsed()) {
			return cmd_synth(args, config);
		}
		if (acf->parsed()) {
			return cmd_acf(args, config);
		}
		if (select->parsed()) {
			return cmd_select(args, config);
		}
		if (fitcmd->parsed()) {
			return cmd_fit(args, config);
		}
		if (fc->parsed()) {
			return cmd_forecast(args, config);
		}
		return cmd_backtest(args, config);
	} catch (const ConfigError &e) {
		std::cerr << "lmpcast: configuration error: " << e.what() << "\n";
		return 2;
	} catch (const Error &e) {
		std::cerr << "lmpcast: " << e.what() << "\n";
		return 1;
	} catch (const std::exception &e) {
		std::cerr << "lmpcast: unexpected failure: " << e.what() << "\n";
		return 1;
	}
}
