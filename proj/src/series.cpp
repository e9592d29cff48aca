#include "lmpcast/series.hpp"

#include "lmpcast/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace lmpcast {

using namespace std::chrono;

std::string_view to_string(Units units) {
	switch (units) {
	case Units::dollars_per_mwh:
		return "$/MWh";
	case Units::log_transformed:
		return "log-transformed";
	case Units::dimensionless:
		return "dimensionless";
	}
	return "unknown";
}

std::string format_timestamp(Timestamp ts) {
	const auto day = floor<days>(ts);
	const year_month_day ymd{day};
	const auto hour = (ts - day).count();
	char buf[32];
	std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02ld:00Z", static_cast<int>(ymd.year()),
	              static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), static_cast<long>(hour));
	return buf;
}

HourlySeries::HourlySeries(Timestamp start, std::vector<double> values, Units units)
    : start_(start), values_(std::move(values)), units_(units) {
	if (values_.empty()) {
		throw InvalidSeries("hourly series must be non-empty");
	}
	for (std::size_t i = 0; i < values_.size(); ++i) {
		if (!std::isfinite(values_[i])) {
			throw InvalidSeries("non-finite value at " + format_timestamp(time_at(i)));
		}
	}
}

HourlySeries HourlySeries::slice(std::size_t offset, std::size_t count) const {
	if (offset + count > values_.size()) {
		throw SeriesTooShort("slice [" + std::to_string(offset) + ", " + std::to_string(offset + count) +
		                     ") exceeds series length " + std::to_string(values_.size()));
	}
	std::vector<double> out(values_.begin() + static_cast<std::ptrdiff_t>(offset),
	                        values_.begin() + static_cast<std::ptrdiff_t>(offset + count));
	return HourlySeries(time_at(offset), std::move(out), units_);
}

HourlySeries HourlySeries::with_values(std::vector<double> values, Units units) const {
	return HourlySeries(start_, std::move(values), units);
}

ClipBounds::ClipBounds(double upper_bound, double lower_bound) : upper(upper_bound), lower(lower_bound) {
	if (!(lower < upper)) {
		throw InvalidParameters("clip bounds require LB < UB");
	}
}

LogOffset::LogOffset(double offset) : c(offset) {
	if (!(offset > 0.0) || !std::isfinite(offset)) {
		throw InvalidParameters("log offset c must be a positive real");
	}
}

HourlySeries clip_prices(const HourlySeries &series, const ClipBounds &bounds) {
	std::vector<double> out(series.values().begin(), series.values().end());
	for (double &v : out) {
		if (v > bounds.upper) {
			v = bounds.upper;
		} else if (v < bounds.lower) {
			v = bounds.lower;
		}
	}
	return series.with_values(std::move(out), series.units());
}

HourlySeries log_transform(const HourlySeries &series, const LogOffset &offset) {
	std::vector<double> out(series.size());
	for (std::size_t t = 0; t < series.size(); ++t) {
		const double shifted = series[t] + offset.c;
		if (!(shifted > 0.0)) {
			throw NonPositiveArgument("P + c <= 0 at " + format_timestamp(series.time_at(t)) +
			                          " (P = " + std::to_string(series[t]) + ", c = " + std::to_string(offset.c) +
			                          ")");
		}
		out[t] = std::log(shifted);
	}
	return series.with_values(std::move(out), Units::log_transformed);
}

HourlySeries inverse_log_transform(const HourlySeries &series, const LogOffset &offset) {
	std::vector<double> out(series.size());
	for (std::size_t t = 0; t < series.size(); ++t) {
		out[t] = std::exp(series[t]) - offset.c;
	}
	return series.with_values(std::move(out), Units::dollars_per_mwh);
}

void require_aligned(const HourlySeries &a, const HourlySeries &b, std::string_view what) {
	if (a.start() != b.start() || a.size() != b.size()) {
		throw AlignmentError(std::string(what) + ": series calendars differ (" + format_timestamp(a.start()) + " x" +
		                     std::to_string(a.size()) + " vs " + format_timestamp(b.start()) + " x" +
		                     std::to_string(b.size()) + ")");
	}
}

HourlySeries delta_lmp(const HourlySeries &dalmp, const HourlySeries &rtlmp) {
	require_aligned(dalmp, rtlmp, "delta_lmp");
	std::vector<double> out(dalmp.size());
	for (std::size_t t = 0; t < out.size(); ++t) {
		out[t] = dalmp[t] - rtlmp[t];
	}
	return dalmp.with_values(std::move(out), Units::dollars_per_mwh);
}

HourlySeries reconstruct_rtlmp(const HourlySeries &dalmp_future, const HourlySeries &delta_forecast) {
	require_aligned(dalmp_future, delta_forecast, "reconstruct_rtlmp");
	std::vector<double> out(dalmp_future.size());
	for (std::size_t t = 0; t < out.size(); ++t) {
		out[t] = dalmp_future[t] - delta_forecast[t];
	}
	return dalmp_future.with_values(std::move(out), Units::dollars_per_mwh);
}

bool is_weekday(Timestamp ts) {
	const weekday wd{floor<days>(ts)};
	return wd != Saturday && wd != Sunday;
}

HourlySeries weekend_indicator(Timestamp start, std::size_t length) {
	std::vector<double> out(length);
	for (std::size_t t = 0; t < length; ++t) {
		out[t] = is_weekday(start + hours(static_cast<long>(t))) ? 1.0 : 0.0;
	}
	return HourlySeries(start, std::move(out), Units::dimensionless);
}

std::vector<double> sample_acf(std::span<const double> values, std::size_t max_lag) {
	const std::size_t n = values.size();
	if (max_lag >= n) {
		throw SeriesTooShort("max_lag " + std::to_string(max_lag) + " must be below series length " +
		                     std::to_string(n));
	}
	const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
	std::vector<double> centered(n);
	for (std::size_t t = 0; t < n; ++t) {
		centered[t] = values[t] - mean;
	}
	double gamma0 = 0.0;
	for (double c : centered) {
		gamma0 += c * c;
	}
	if (!(gamma0 > 0.0)) {
		throw DegenerateSeries("series has zero variance");
	}
	std::vector<double> acf(max_lag + 1);
	acf[0] = 1.0;
	for (std::size_t k = 1; k <= max_lag; ++k) {
		double sum = 0.0;
		for (std::size_t t = k; t < n; ++t) {
			sum += centered[t] * centered[t - k];
		}
		acf[k] = std::clamp(sum / gamma0, -1.0, 1.0);
	}
	return acf;
}

std::vector<double> sample_acf(const HourlySeries &series, std::size_t max_lag) {
	return sample_acf(series.values(), max_lag);
}

std::vector<double> durbin_levinson_pacf(std::span<const double> rho) {
	const std::size_t m = rho.empty() ? 0 : rho.size() - 1;
	std::vector<double> pacf(m + 1, 0.0);
	pacf[0] = 1.0;
	if (m == 0) {
		return pacf;
	}
	std::vector<double> phi(m + 1, 0.0), prev(m + 1, 0.0);
	for (std::size_t k = 1; k <= m; ++k) {
		double num = rho[k];
		double den = 1.0;
		for (std::size_t j = 1; j < k; ++j) {
			num -= prev[j] * rho[k - j];
			den -= prev[j] * rho[j];
		}
		// den reaches zero only for a perfectly predictable sequence; later lags carry no information.
		if (!(den > 1e-14)) {
			break;
		}
		const double kk = std::clamp(num / den, -1.0, 1.0);
		phi[k] = kk;
		for (std::size_t j = 1; j < k; ++j) {
			phi[j] = prev[j] - kk * prev[k - j];
		}
		pacf[k] = kk;
		prev = phi;
	}
	return pacf;
}

std::vector<double> sample_pacf(std::span<const double> values, std::size_t max_lag) {
	return durbin_levinson_pacf(sample_acf(values, max_lag));
}

std::vector<double> sample_pacf(const HourlySeries &series, std::size_t max_lag) {
	return sample_pacf(series.values(), max_lag);
}

} // namespace lmpcast
