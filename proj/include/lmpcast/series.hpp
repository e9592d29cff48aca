#pragma once

#include <chrono>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lmpcast {

using Timestamp = std::chrono::sys_time<std::chrono::hours>;

enum class Units { dollars_per_mwh, log_transformed, dimensionless };

std::string_view to_string(Units units);

// "2015-01-05T00:00Z"
std::string format_timestamp(Timestamp ts);

/// Hourly grid of values anchored at a UTC hour. Index t maps to start + t hours.
/// Values are fixed at construction; every transform returns a new series.
class HourlySeries {
public:
	HourlySeries(Timestamp start, std::vector<double> values, Units units = Units::dollars_per_mwh);

	Timestamp start() const {
		return start_;
	}
	Timestamp end() const {
		return start_ + std::chrono::hours(static_cast<long>(values_.size()));
	}
	Timestamp time_at(std::size_t index) const {
		return start_ + std::chrono::hours(static_cast<long>(index));
	}
	Units units() const {
		return units_;
	}
	std::size_t size() const {
		return values_.size();
	}
	double operator[](std::size_t index) const {
		return values_[index];
	}
	std::span<const double> values() const {
		return values_;
	}

	// Sub-window [offset, offset + count).
	HourlySeries slice(std::size_t offset, std::size_t count) const;
	HourlySeries with_values(std::vector<double> values, Units units) const;

	friend bool operator==(const HourlySeries &, const HourlySeries &) = default;

private:
	Timestamp start_;
	std::vector<double> values_;
	Units units_;
};

struct ClipBounds {
	double upper;
	double lower;

	ClipBounds(double upper_bound, double lower_bound);
};

struct LogOffset {
	double c;

	explicit LogOffset(double offset);
};

HourlySeries clip_prices(const HourlySeries &series, const ClipBounds &bounds);

// y_t = ln(P_t + c). Throws NonPositiveArgument when any P_t + c <= 0.
HourlySeries log_transform(const HourlySeries &series, const LogOffset &offset);
HourlySeries inverse_log_transform(const HourlySeries &series, const LogOffset &offset);

// DALMP_t - RTLMP_t
HourlySeries delta_lmp(const HourlySeries &dalmp, const HourlySeries &rtlmp);
// DALMP_t - delta'_t; exact inverse of delta_lmp.
HourlySeries reconstruct_rtlmp(const HourlySeries &dalmp_future, const HourlySeries &delta_forecast);

bool is_weekday(Timestamp ts);

/// 1.0 for Monday 00:00 through Friday 23:00, 0.0 on Saturday and Sunday.
/// Despite the name this flags weekday hours, matching the regressor layout used by the ARMAX presets.
HourlySeries weekend_indicator(Timestamp start, std::size_t length);

// Biased (divide-by-n) sample autocorrelations for lags 0..max_lag.
std::vector<double> sample_acf(std::span<const double> values, std::size_t max_lag);
std::vector<double> sample_acf(const HourlySeries &series, std::size_t max_lag);

// Partial autocorrelations via Durbin-Levinson. Entry 0 is 1 by convention.
std::vector<double> sample_pacf(std::span<const double> values, std::size_t max_lag);
std::vector<double> sample_pacf(const HourlySeries &series, std::size_t max_lag);

// Durbin-Levinson on an autocorrelation sequence rho[0..m]; returns pacf[0..m] (pacf[0] = 1).
std::vector<double> durbin_levinson_pacf(std::span<const double> rho);

void require_aligned(const HourlySeries &a, const HourlySeries &b, std::string_view what);

} // namespace lmpcast
