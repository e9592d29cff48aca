#include "lmpcast/backtest.hpp"

#include "lmpcast/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>

namespace lmpcast {

namespace {

constexpr std::string_view kReportTag = "# lmpcast backtest report";
constexpr std::string_view kReportColumns = "horizon,improvement_pct,mae,included,excluded";

std::string g17(double v) {
	char buf[64];
	std::snprintf(buf, sizeof(buf), "%.17g", v);
	return buf;
}

std::string fixed(double v, int width, int decimals) {
	char buf[64];
	std::snprintf(buf, sizeof(buf), "%*.*f", width, decimals, v);
	return buf;
}

std::string pad(std::string s, std::size_t width) {
	if (s.size() < width) {
		s.append(width - s.size(), ' ');
	}
	return s;
}

std::vector<double> forecast_origin(const FittedPipeline &fitted, const MarketDataset &full, std::size_t train_len,
                                    std::size_t origin, std::size_t horizon) {
	const std::size_t test_len = full.size() - train_len;
	const std::size_t steps = std::min(horizon, test_len - origin);
	const std::size_t at = train_len + origin;
	const MarketDataset history = full.slice(0, at);
	const HourlySeries dalmp_future = full.dalmp.slice(at, steps);
	const HourlySeries realized = full.rtlmp.slice(at, steps);
	const PipelineForecast fc = forecast_pipeline(fitted, history, dalmp_future, steps, &realized);
	return {fc.rtlmp.values().begin(), fc.rtlmp.values().end()};
}

// Per-horizon scoring over origins 0..N-h, in origin order.
BacktestReport score(const std::vector<std::vector<double>> &forecasts, const MarketDataset &test,
                     const BacktestOptions &options) {
	const std::size_t n = test.size();
	BacktestReport report;
	report.name = options.name;
	report.test_start = test.start();
	report.test_length = n;
	report.origins = n;
	for (std::size_t h = 1; h <= std::min(options.horizon, n); ++h) {
		const std::size_t terms = n - h + 1;
		std::vector<double> f(terms);
		for (std::size_t o = 0; o < terms; ++o) {
			f[o] = forecasts[o][h - 1];
		}
		const HourlySeries actual = test.rtlmp.slice(h - 1, terms);
		const HourlySeries dalmp = test.dalmp.slice(h - 1, terms);
		const HourlySeries predicted = actual.with_values(std::move(f), Units::dollars_per_mwh);
		const ImprovementResult ir = improvement_index(actual, predicted, dalmp, options.epsilon);
		report.horizons.push_back({h, ir.percent, mae(actual, predicted), ir.included, ir.excluded});
	}
	report.one_step.reserve(n);
	for (const auto &fc : forecasts) {
		report.one_step.push_back(fc.front());
	}
	return report;
}

void check_window(const MarketDataset &train, const MarketDataset &test, const BacktestOptions &options) {
	if (options.horizon == 0) {
		throw InvalidParameters("backtest horizon must be at least 1");
	}
	if (train.dalmp.end() != test.start()) {
		throw AlignmentError("test window must start where the training window ends (" +
		                     format_timestamp(train.dalmp.end()) + ")");
	}
}

BacktestReport run_parallel(const std::vector<FittedPipeline> &models, std::size_t refit_every,
                            const MarketDataset &train, const MarketDataset &test, const BacktestOptions &options) {
	const MarketDataset full = concatenate(train, test);
	const std::size_t n = test.size();
	std::vector<std::vector<double>> forecasts(n);
	std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic, 8)
	for (std::size_t o = 0; o < n; ++o) {
		try {
			const std::size_t block = refit_every == 0 ? 0 : o / refit_every;
			forecasts[o] = forecast_origin(models[block], full, train.size(), o, options.horizon);
		} catch (...) {
			errors[o] = std::current_exception();
		}
	}
	for (const auto &e : errors) {
		if (e) {
			std::rethrow_exception(e);
		}
	}
	return score(forecasts, test, options);
}

} // namespace

ImprovementResult improvement_index(const HourlySeries &actual, const HourlySeries &forecast,
                                    const HourlySeries &dalmp, double epsilon) {
	require_aligned(actual, forecast, "improvement_index");
	require_aligned(actual, dalmp, "improvement_index");
	if (!(epsilon > 0.0)) {
		throw InvalidParameters("exclusion epsilon must be positive");
	}
	double ratio_sum = 0.0;
	std::size_t included = 0;
	for (std::size_t t = 0; t < actual.size(); ++t) {
		const double denom = std::abs(actual[t] - dalmp[t]);
		if (denom > epsilon) {
			ratio_sum += std::abs(actual[t] - forecast[t]) / denom;
			++included;
		}
	}
	if (included == 0) {
		throw AllTermsExcluded("every term has |RTLMP - DALMP| <= epsilon");
	}
	const double index = 1.0 - ratio_sum / static_cast<double>(included);
	return {100.0 * index, included, actual.size() - included};
}

double mae(const HourlySeries &actual, const HourlySeries &forecast) {
	require_aligned(actual, forecast, "mae");
	double sum = 0.0;
	for (std::size_t t = 0; t < actual.size(); ++t) {
		sum += std::abs(actual[t] - forecast[t]);
	}
	return sum / static_cast<double>(actual.size());
}

BacktestReport rolling_backtest(const PipelineConfig &config, const MarketDataset &train, const MarketDataset &test,
                                const BacktestOptions &options) {
	check_window(train, test, options);
	const std::size_t every = options.refit.refit_every;
	std::vector<FittedPipeline> models{fit_pipeline(config, train)};
	if (every > 0) {
		const MarketDataset full = concatenate(train, test);
		for (std::size_t o = every; o < test.size(); o += every) {
			models.push_back(fit_pipeline(config, full.slice(0, train.size() + o)));
		}
	}
	return run_parallel(models, every, train, test, options);
}

BacktestReport rolling_backtest(const FittedPipeline &fitted, const MarketDataset &train, const MarketDataset &test,
                                const BacktestOptions &options) {
	check_window(train, test, options);
	if (options.refit.refit_every != 0) {
		throw InvalidParameters("a pre-fitted pipeline only supports the fit-once policy");
	}
	return run_parallel({fitted}, 0, train, test, options);
}

BacktestReport rolling_backtest_reference(const FittedPipeline &fitted, const MarketDataset &train,
                                          const MarketDataset &test, const BacktestOptions &options) {
	check_window(train, test, options);
	const MarketDataset full = concatenate(train, test);
	std::vector<std::vector<double>> forecasts;
	for (std::size_t o = 0; o < test.size(); ++o) {
		forecasts.push_back(forecast_origin(fitted, full, train.size(), o, options.horizon));
	}
	return score(forecasts, test, options);
}

std::string serialize_report(const BacktestReport &report) {
	std::string out(kReportTag);
	out += "\n# name=" + report.name + "\n";
	out += "# test_start=" + format_timestamp(report.test_start) + "\n";
	out += "# test_length=" + std::to_string(report.test_length) + "\n";
	out += "# origins=" + std::to_string(report.origins) + "\n";
	out += std::string(kReportColumns) + "\n";
	for (const auto &h : report.horizons) {
		out += std::to_string(h.horizon) + "," + g17(h.improvement_pct) + "," + g17(h.mae) + "," +
		       std::to_string(h.included) + "," + std::to_string(h.excluded) + "\n";
	}
	return out;
}

BacktestReport deserialize_report(std::string_view text) {
	BacktestReport report;
	std::size_t pos = 0;
	std::size_t line_no = 0;
	bool tagged = false, columns = false;
	while (pos < text.size()) {
		std::size_t next = text.find('\n', pos);
		if (next == std::string_view::npos) {
			next = text.size();
		}
		std::string line(text.substr(pos, next - pos));
		pos = next + 1;
		++line_no;
		if (!line.empty() && line.back() == '\r') {
			line.pop_back();
		}
		if (line.empty()) {
			continue;
		}
		if (!tagged) {
			if (line != kReportTag) {
				throw SchemaError("not a backtest report");
			}
			tagged = true;
			continue;
		}
		try {
			if (line.starts_with("# ")) {
				const std::size_t eq = line.find('=');
				if (eq == std::string::npos) {
					throw ParseError("malformed metadata", line_no);
				}
				const std::string key = line.substr(2, eq - 2);
				const std::string value = line.substr(eq + 1);
				if (key == "name") {
					report.name = value;
				} else if (key == "test_start") {
					report.test_start = parse_timestamp(value);
				} else if (key == "test_length") {
					report.test_length = std::stoul(value);
				} else if (key == "origins") {
					report.origins = std::stoul(value);
				}
				continue;
			}
			if (!columns) {
				if (line != kReportColumns) {
					throw SchemaError("unexpected report columns '" + line + "'");
				}
				columns = true;
				continue;
			}
			HorizonScore h{};
			std::size_t fields[4];
			std::size_t start = 0;
			for (auto &f : fields) {
				f = line.find(',', start);
				if (f == std::string::npos) {
					throw ParseError("expected 5 fields", line_no);
				}
				start = f + 1;
			}
			h.horizon = std::stoul(line.substr(0, fields[0]));
			h.improvement_pct = std::stod(line.substr(fields[0] + 1, fields[1] - fields[0] - 1));
			h.mae = std::stod(line.substr(fields[1] + 1, fields[2] - fields[1] - 1));
			h.included = std::stoul(line.substr(fields[2] + 1, fields[3] - fields[2] - 1));
			h.excluded = std::stoul(line.substr(fields[3] + 1));
			report.horizons.push_back(h);
		} catch (const std::logic_error &) {
			throw ParseError("malformed report value", line_no);
		}
	}
	if (!tagged || !columns) {
		throw SchemaError("incomplete backtest report");
	}
	return report;
}

ComparisonTable compare_models(const std::vector<BacktestReport> &reports) {
	if (reports.empty()) {
		throw InvalidParameters("nothing to compare");
	}
	const BacktestReport &first = reports.front();
	for (const auto &r : reports) {
		if (r.test_start != first.test_start || r.test_length != first.test_length ||
		    r.horizons.size() != first.horizons.size()) {
			throw MismatchedWindows("report '" + r.name + "' does not share the test window and horizon set of '" +
			                        first.name + "'");
		}
		if (r.horizons.empty()) {
			throw MismatchedWindows("report '" + r.name + "' has no horizons");
		}
	}
	ComparisonTable table{reports, first.horizons.size()};
	std::stable_sort(table.rows.begin(), table.rows.end(), [](const BacktestReport &a, const BacktestReport &b) {
		return a.horizons.front().improvement_pct > b.horizons.front().improvement_pct;
	});
	return table;
}

std::string ComparisonTable::to_csv() const {
	std::string out = "model";
	for (std::size_t h = 1; h <= horizons; ++h) {
		out += ",I_" + std::to_string(h) + "_pct";
	}
	for (std::size_t h = 1; h <= horizons; ++h) {
		out += ",MAE_" + std::to_string(h);
	}
	out += '\n';
	for (const auto &r : rows) {
		out += r.name;
		for (const auto &h : r.horizons) {
			out += "," + fixed(h.improvement_pct, 0, 4);
		}
		for (const auto &h : r.horizons) {
			out += "," + fixed(h.mae, 0, 4);
		}
		out += '\n';
	}
	return out;
}

std::string ComparisonTable::to_text() const {
	std::size_t name_width = 5;
	for (const auto &r : rows) {
		name_width = std::max(name_width, r.name.size());
	}
	name_width += 2;
	std::string out = pad("Model", name_width);
	for (std::size_t h = 1; h <= horizons; ++h) {
		std::string head = "I_" + std::to_string(h) + " (%)";
		out += std::string(std::max<std::size_t>(10, head.size() + 1) - head.size(), ' ') + head;
	}
	out += "   MAE_1 ($/MWh)\n";
	for (const auto &r : rows) {
		out += pad(r.name, name_width);
		for (const auto &h : r.horizons) {
			out += fixed(h.improvement_pct, 10, 2);
		}
		out += fixed(r.horizons.front().mae, 16, 2) + "\n";
	}
	return out;
}

} // namespace lmpcast
