#include "lmpcast/garch.hpp"

#include "lmpcast/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

namespace lmpcast {

void GarchSpec::validate() const {
	if (p < 1) {
		throw InvalidParameters("GARCH ARCH order p must be at least 1");
	}
}

double GarchParams::persistence() const {
	return std::accumulate(alpha.begin(), alpha.end(), 0.0) + std::accumulate(beta.begin(), beta.end(), 0.0);
}

double GarchParams::unconditional_variance() const {
	return alpha0 / (1.0 - persistence());
}

void GarchParams::validate() const {
	if (!(alpha0 > 0.0) || !std::isfinite(alpha0)) {
		throw InvalidParameters("GARCH alpha0 must be positive");
	}
	if (alpha.empty()) {
		throw InvalidParameters("GARCH needs at least one ARCH coefficient");
	}
	for (double a : alpha) {
		if (!(a >= 0.0)) {
			throw InvalidParameters("GARCH alpha coefficients must be non-negative");
		}
	}
	for (double b : beta) {
		if (!(b >= 0.0)) {
			throw InvalidParameters("GARCH beta coefficients must be non-negative");
		}
	}
	if (!(persistence() < 1.0)) {
		throw InvalidParameters("GARCH persistence sum(alpha) + sum(beta) must be below 1");
	}
}

double presample_variance(const HourlySeries &residuals) {
	const auto v = residuals.values();
	const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
	double ss = 0.0;
	for (double e : v) {
		ss += (e - mean) * (e - mean);
	}
	return ss / static_cast<double>(v.size());
}

namespace detail {

void garch_variances(const GarchParams &params, std::span<const double> eps, double presample,
                     std::span<double> out) {
	const std::size_t p = params.alpha.size();
	const std::size_t q = params.beta.size();
	for (std::size_t t = 0; t < eps.size(); ++t) {
		double s = params.alpha0;
		for (std::size_t i = 1; i <= p; ++i) {
			s += params.alpha[i - 1] * (t >= i ? eps[t - i] * eps[t - i] : presample);
		}
		for (std::size_t j = 1; j <= q; ++j) {
			s += params.beta[j - 1] * (t >= j ? out[t - j] : presample);
		}
		out[t] = s;
	}
}

double garch_loglik(const GarchParams &params, std::span<const double> eps, double presample) {
	std::vector<double> sigma2(eps.size());
	garch_variances(params, eps, presample, sigma2);
	const double log2pi = std::log(2.0 * std::numbers::pi);
	double total = 0.0;
	for (std::size_t t = 0; t < eps.size(); ++t) {
		if (!(sigma2[t] > 0.0)) {
			return -std::numeric_limits<double>::infinity();
		}
		total += -0.5 * (log2pi + std::log(sigma2[t])) - eps[t] * eps[t] / (2.0 * sigma2[t]);
	}
	return total;
}

} // namespace detail

HourlySeries conditional_variances(const GarchParams &params, const HourlySeries &residuals, double presample) {
	params.validate();
	std::vector<double> out(residuals.size());
	detail::garch_variances(params, residuals.values(), presample, out);
	return residuals.with_values(std::move(out), Units::dimensionless);
}

HourlySeries conditional_variances(const GarchParams &params, const HourlySeries &residuals) {
	return conditional_variances(params, residuals, presample_variance(residuals));
}

double garch_log_likelihood(const GarchParams &params, const HourlySeries &residuals) {
	params.validate();
	return detail::garch_loglik(params, residuals.values(), presample_variance(residuals));
}

std::vector<double> forecast_variance(const GarchParams &params, const HourlySeries &residuals,
                                      std::size_t horizon) {
	params.validate();
	const std::size_t n = residuals.size();
	const double presample = presample_variance(residuals);
	std::vector<double> sigma2(n);
	detail::garch_variances(params, residuals.values(), presample, sigma2);

	// Extended arrays: index n + k - 1 holds step k ahead. Expected eps^2 in the future is sigma^2.
	std::vector<double> eps2(n + horizon), var(n + horizon);
	for (std::size_t t = 0; t < n; ++t) {
		eps2[t] = residuals[t] * residuals[t];
		var[t] = sigma2[t];
	}
	std::vector<double> out(horizon);
	for (std::size_t k = 0; k < horizon; ++k) {
		const std::size_t t = n + k;
		double s = params.alpha0;
		for (std::size_t i = 1; i <= params.alpha.size(); ++i) {
			s += params.alpha[i - 1] * (t >= i ? eps2[t - i] : presample);
		}
		for (std::size_t j = 1; j <= params.beta.size(); ++j) {
			s += params.beta[j - 1] * (t >= j ? var[t - j] : presample);
		}
		var[t] = s;
		eps2[t] = s;
		out[k] = s;
	}
	return out;
}

HourlySeries simulate_garch(const GarchParams &params, std::size_t n, std::uint64_t seed, Timestamp start) {
	params.validate();
	constexpr std::size_t burn = 1000;
	const std::size_t p = params.alpha.size();
	const std::size_t q = params.beta.size();
	const double v0 = params.unconditional_variance();
	std::mt19937_64 rng(seed);
	std::normal_distribution<double> z(0.0, 1.0);
	std::vector<double> eps(burn + n), var(burn + n);
	for (std::size_t t = 0; t < burn + n; ++t) {
		double s = params.alpha0;
		for (std::size_t i = 1; i <= p; ++i) {
			s += params.alpha[i - 1] * (t >= i ? eps[t - i] * eps[t - i] : v0);
		}
		for (std::size_t j = 1; j <= q; ++j) {
			s += params.beta[j - 1] * (t >= j ? var[t - j] : v0);
		}
		var[t] = s;
		eps[t] = std::sqrt(s) * z(rng);
	}
	return HourlySeries(start, std::vector<double>(eps.begin() + burn, eps.end()), Units::dimensionless);
}

} // namespace lmpcast
