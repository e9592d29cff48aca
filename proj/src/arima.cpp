#include "lmpcast/arima.hpp"

#include "lmpcast/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

namespace lmpcast {

namespace {

double mean_of(std::span<const double> v) {
	return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void require_size(const std::vector<double> &v, std::size_t expected, const char *name) {
	if (v.size() != expected) {
		throw InvalidParameters(std::string(name) + " has " + std::to_string(v.size()) + " entries, model expects " +
		                        std::to_string(expected));
	}
}

// Working-scale adjusted series x_t = w_t - mu - z_t' gamma.
std::vector<double> adjusted_target(const detail::WorkingData &data, const ParameterVector &params) {
	std::vector<double> x(data.target.size());
	for (std::size_t t = 0; t < x.size(); ++t) {
		double v = data.target[t] - params.mu;
		for (std::size_t j = 0; j < data.regressors.size(); ++j) {
			v -= params.gamma[j] * data.regressors[j][t];
		}
		x[t] = v;
	}
	return x;
}

std::vector<double> model_residuals(const ModelSpec &spec, const ParameterVector &params,
                                    const detail::WorkingData &data) {
	const detail::SparseTerms ar(ar_polynomial(spec, params));
	const detail::SparseTerms ma(ma_polynomial(spec, params));
	const std::vector<double> x = adjusted_target(data, params);
	std::vector<double> eps(x.size());
	detail::filter_residuals(ar, ma, x, eps);
	return eps;
}

} // namespace

void ModelSpec::validate() const {
	if (arma_parameter_count() + exog_count + (constant ? 1 : 0) == 0) {
		throw InvalidParameters("model must have at least one AR, MA, regression or mean parameter");
	}
	if ((P > 0 || Q > 0 || diff.D > 0) && diff.S < 2) {
		throw InvalidParameters("seasonal terms require season length S >= 2");
	}
}

std::size_t ModelSpec::min_length() const {
	return diff.presample_length() + std::max(ar_degree(), ma_degree()) + 1;
}

std::string ModelSpec::describe() const {
	std::string out;
	const bool seasonal = P > 0 || Q > 0 || diff.D > 0;
	const bool integrated = diff.d > 0 || seasonal;
	if (integrated) {
		out = "ARIMA(" + std::to_string(p) + "," + std::to_string(diff.d) + "," + std::to_string(q) + ")";
		if (seasonal) {
			out += "x(" + std::to_string(P) + "," + std::to_string(diff.D) + "," + std::to_string(Q) + ")_" +
			       std::to_string(diff.S);
		}
	} else {
		out = "ARMA(" + std::to_string(p) + "," + std::to_string(q) + ")";
	}
	if (exog_count > 0) {
		out += "+X[" + std::to_string(exog_count) + "]";
	}
	return out;
}

LagPolynomial ar_polynomial(const ModelSpec &spec, const ParameterVector &params) {
	return multiply(LagPolynomial::from_model_coefficients(params.phi, 1),
	                LagPolynomial::from_model_coefficients(params.Phi, spec.diff.S));
}

LagPolynomial ma_polynomial(const ModelSpec &spec, const ParameterVector &params) {
	return multiply(LagPolynomial::from_model_coefficients(params.theta, 1),
	                LagPolynomial::from_model_coefficients(params.Theta, spec.diff.S));
}

void validate_parameters(const ModelSpec &spec, const ParameterVector &params) {
	spec.validate();
	require_size(params.phi, spec.p, "phi");
	require_size(params.Phi, spec.P, "Phi");
	require_size(params.theta, spec.q, "theta");
	require_size(params.Theta, spec.Q, "Theta");
	require_size(params.gamma, spec.exog_count, "gamma");
	if (!spec.constant && params.mu != 0.0) {
		throw InvalidParameters("mu must be 0 for a model without a constant");
	}
	if (!(params.sigma2 > 0.0) || !std::isfinite(params.sigma2)) {
		throw InvalidParameters("sigma2 must be positive");
	}
	if (!is_stable(ar_polynomial(spec, params)).stable) {
		throw UnstableParameters("AR polynomial has a root on or inside the unit circle");
	}
	if (!is_stable(ma_polynomial(spec, params)).stable) {
		throw UnstableParameters("MA polynomial has a root on or inside the unit circle");
	}
}

namespace detail {

SparseTerms::SparseTerms(const LagPolynomial &poly) {
	for (const auto &[lag, c] : poly.coefficients()) {
		if (lag != 0) {
			lags.push_back(lag);
			coeffs.push_back(c);
		}
	}
}

WorkingData prepare_working(const ModelSpec &spec, const HourlySeries &series,
                            const std::optional<ExogenousMatrix> &exog) {
	spec.validate();
	if (series.size() < spec.min_length()) {
		throw SeriesTooShort(spec.describe() + " needs at least " + std::to_string(spec.min_length()) +
		                     " observations, got " + std::to_string(series.size()));
	}
	const std::size_t supplied = exog ? exog->count() : 0;
	if (supplied != spec.exog_count) {
		throw InvalidParameters(spec.describe() + " expects " + std::to_string(spec.exog_count) +
		                        " regressors, got " + std::to_string(supplied));
	}
	const LagPolynomial diff = difference_polynomial(spec.diff);
	WorkingData out{apply(diff, series.values()), {}, series.time_at(diff.max_lag())};
	for (std::size_t j = 0; j < supplied; ++j) {
		require_aligned(series, exog->columns[j], "exogenous regressor");
		out.regressors.push_back(apply(diff, exog->columns[j].values()));
	}
	return out;
}

void filter_residuals(const SparseTerms &ar, const SparseTerms &ma, std::span<const double> x,
                      std::span<double> out) {
	const double presample = mean_of(x);
	const std::size_t n = x.size();
	const std::size_t na = ar.lags.size();
	const std::size_t nm = ma.lags.size();
	const std::size_t warm = std::min(n, std::max(ar.max_lag(), ma.max_lag()));
	for (std::size_t t = 0; t < warm; ++t) {
		double acc = x[t];
		for (std::size_t k = 0; k < na; ++k) {
			const std::size_t lag = ar.lags[k];
			acc += ar.coeffs[k] * (t >= lag ? x[t - lag] : presample);
		}
		for (std::size_t k = 0; k < nm; ++k) {
			const std::size_t lag = ma.lags[k];
			if (t < lag) {
				break;
			}
			acc -= ma.coeffs[k] * out[t - lag];
		}
		out[t] = acc;
	}
	for (std::size_t t = warm; t < n; ++t) {
		double acc = x[t];
		for (std::size_t k = 0; k < na; ++k) {
			acc += ar.coeffs[k] * x[t - ar.lags[k]];
		}
		for (std::size_t k = 0; k < nm; ++k) {
			acc -= ma.coeffs[k] * out[t - ma.lags[k]];
		}
		out[t] = acc;
	}
}

namespace {

template <std::size_t C>
void filter_fixed(const SparseTerms &ar, const SparseTerms &ma, std::span<const std::span<const double>> xs,
                  std::span<const std::span<double>> outs) {
	const std::size_t n = xs[0].size();
	const std::size_t warm = std::min(n, std::max(ar.max_lag(), ma.max_lag()));
	for (std::size_t c = 0; c < C; ++c) {
		const double presample = mean_of(xs[c]);
		for (std::size_t t = 0; t < warm; ++t) {
			double acc = xs[c][t];
			for (std::size_t k = 0; k < ar.lags.size(); ++k) {
				const std::size_t lag = ar.lags[k];
				acc += ar.coeffs[k] * (t >= lag ? xs[c][t - lag] : presample);
			}
			for (std::size_t k = 0; k < ma.lags.size(); ++k) {
				const std::size_t lag = ma.lags[k];
				if (t < lag) {
					break;
				}
				acc -= ma.coeffs[k] * outs[c][t - lag];
			}
			outs[c][t] = acc;
		}
	}
	const double *x[C];
	double *out[C];
	for (std::size_t c = 0; c < C; ++c) {
		x[c] = xs[c].data();
		out[c] = outs[c].data();
	}
	for (std::size_t t = warm; t < n; ++t) {
		double acc[C];
		for (std::size_t c = 0; c < C; ++c) {
			acc[c] = x[c][t];
		}
		for (std::size_t k = 0; k < ar.lags.size(); ++k) {
			const double coef = ar.coeffs[k];
			const std::size_t lag = ar.lags[k];
			for (std::size_t c = 0; c < C; ++c) {
				acc[c] += coef * x[c][t - lag];
			}
		}
		for (std::size_t k = 0; k < ma.lags.size(); ++k) {
			const double coef = ma.coeffs[k];
			const std::size_t lag = ma.lags[k];
			for (std::size_t c = 0; c < C; ++c) {
				acc[c] -= coef * out[c][t - lag];
			}
		}
		for (std::size_t c = 0; c < C; ++c) {
			out[c][t] = acc[c];
		}
	}
}

} // namespace

void filter_residuals(const SparseTerms &ar, const SparseTerms &ma, std::span<const std::span<const double>> xs,
                      std::span<const std::span<double>> outs) {
	switch (xs.size()) {
	case 1:
		return filter_fixed<1>(ar, ma, xs, outs);
	case 2:
		return filter_fixed<2>(ar, ma, xs, outs);
	case 3:
		return filter_fixed<3>(ar, ma, xs, outs);
	default:
		for (std::size_t c = 0; c < xs.size(); ++c) {
			filter_residuals(ar, ma, xs[c], outs[c]);
		}
	}
}

} // namespace detail

std::size_t simulation_burn_in(const ModelSpec &spec) {
	return 10 * std::max({spec.ar_degree(), spec.ma_degree(), spec.diff.presample_length()});
}

HourlySeries simulate(const ModelSpec &spec, const ParameterVector &params, std::size_t n,
                      const std::optional<ExogenousMatrix> &exog, std::uint64_t seed, Timestamp start) {
	validate_parameters(spec, params);
	if (n == 0) {
		throw InvalidParameters("simulation length must be positive");
	}
	const std::size_t burn = simulation_burn_in(spec);
	const std::size_t total = n + burn;
	const std::size_t supplied = exog ? exog->count() : 0;
	if (supplied != spec.exog_count) {
		throw InvalidParameters("simulation expects " + std::to_string(spec.exog_count) + " regressors, got " +
		                        std::to_string(supplied));
	}
	for (std::size_t j = 0; j < supplied; ++j) {
		if (exog->columns[j].size() < total) {
			throw SeriesTooShort("exogenous column " + std::to_string(j) + " must cover n + burn-in = " +
			                     std::to_string(total) + " hours");
		}
		if (exog->columns[j].start() != exog->columns[0].start()) {
			throw AlignmentError("exogenous columns must share a start");
		}
	}

	const detail::SparseTerms ar(ar_polynomial(spec, params));
	const detail::SparseTerms ma(ma_polynomial(spec, params));
	const LagPolynomial diff = difference_polynomial(spec.diff);
	const std::size_t presample = diff.max_lag();

	std::mt19937_64 rng(seed);
	std::normal_distribution<double> noise(0.0, std::sqrt(params.sigma2));
	std::vector<double> eps(total), x(total, 0.0), levels(total, 0.0);
	for (double &e : eps) {
		e = noise(rng);
	}
	for (std::size_t t = 0; t < total; ++t) {
		double acc = eps[t];
		for (std::size_t k = 0; k < ar.lags.size() && ar.lags[k] <= t; ++k) {
			acc -= ar.coeffs[k] * x[t - ar.lags[k]];
		}
		for (std::size_t k = 0; k < ma.lags.size() && ma.lags[k] <= t; ++k) {
			acc += ma.coeffs[k] * eps[t - ma.lags[k]];
		}
		x[t] = acc;
	}
	for (std::size_t t = presample; t < total; ++t) {
		double w = params.mu + x[t];
		for (std::size_t j = 0; j < supplied; ++j) {
			const auto u = exog->columns[j].values();
			double z = 0.0;
			for (const auto &[h, c] : diff.coefficients()) {
				z += c * u[t - h];
			}
			w += params.gamma[j] * z;
		}
		for (const auto &[h, c] : diff.coefficients()) {
			if (h != 0) {
				w -= c * levels[t - h];
			}
		}
		levels[t] = w;
	}
	const Timestamp out_start =
	    supplied > 0 ? exog->columns[0].start() + std::chrono::hours(static_cast<long>(burn)) : start;
	return HourlySeries(out_start, std::vector<double>(levels.begin() + static_cast<std::ptrdiff_t>(burn), levels.end()),
	                    Units::dimensionless);
}

double log_likelihood(const ModelSpec &spec, const ParameterVector &params, const HourlySeries &series,
                      const std::optional<ExogenousMatrix> &exog) {
	validate_parameters(spec, params);
	const detail::WorkingData data = detail::prepare_working(spec, series, exog);
	const std::vector<double> eps = model_residuals(spec, params, data);
	const double log_norm = -0.5 * std::log(2.0 * std::numbers::pi * params.sigma2);
	double total = 0.0;
	for (double e : eps) {
		total += log_norm - e * e / (2.0 * params.sigma2);
	}
	return total;
}

HourlySeries residuals(const ModelSpec &spec, const ParameterVector &params, const HourlySeries &series,
                       const std::optional<ExogenousMatrix> &exog) {
	validate_parameters(spec, params);
	const detail::WorkingData data = detail::prepare_working(spec, series, exog);
	return HourlySeries(data.start, model_residuals(spec, params, data), Units::dimensionless);
}

std::vector<double> psi_weights(const ModelSpec &spec, const ParameterVector &params, std::size_t count) {
	const std::vector<double> a = multiply(ar_polynomial(spec, params), difference_polynomial(spec.diff)).dense();
	const std::vector<double> b = ma_polynomial(spec, params).dense();
	std::vector<double> psi(count, 0.0);
	for (std::size_t j = 0; j < count; ++j) {
		double v = j == 0 ? 1.0 : (j < b.size() ? b[j] : 0.0);
		for (std::size_t k = 1; k <= j && k < a.size(); ++k) {
			v -= a[k] * psi[j - k];
		}
		psi[j] = v;
	}
	return psi;
}

ForecastResult forecast(const ModelSpec &spec, const ParameterVector &params, const HourlySeries &history,
                        const std::optional<ExogenousMatrix> &exog_history,
                        const std::optional<ExogenousMatrix> &exog_future, std::size_t horizon,
                        std::vector<double> &residuals_out) {
	validate_parameters(spec, params);
	if (horizon == 0) {
		throw InvalidParameters("forecast horizon must be at least 1");
	}
	const detail::WorkingData data = detail::prepare_working(spec, history, exog_history);
	const std::size_t r = spec.exog_count;
	if (r > 0) {
		if (!exog_future || exog_future->count() != r) {
			throw MissingExogenousFuture("forecast needs all " + std::to_string(r) + " regressors for the horizon");
		}
		for (const auto &col : exog_future->columns) {
			if (col.size() < horizon) {
				throw MissingExogenousFuture("future regressor covers " + std::to_string(col.size()) +
				                             " hours, horizon is " + std::to_string(horizon));
			}
			if (col.start() != history.end()) {
				throw AlignmentError("future regressors must start at " + format_timestamp(history.end()));
			}
		}
	}

	const detail::SparseTerms ar(ar_polynomial(spec, params));
	const detail::SparseTerms ma(ma_polynomial(spec, params));
	std::vector<double> x = adjusted_target(data, params);
	const std::size_t m = x.size();
	residuals_out.assign(m, 0.0);
	detail::filter_residuals(ar, ma, x, residuals_out);
	const double presample = mean_of(std::span<const double>(x.data(), m));

	x.resize(m + horizon);
	for (std::size_t t = m; t < m + horizon; ++t) {
		double acc = 0.0;
		for (std::size_t k = 0; k < ar.lags.size(); ++k) {
			const std::size_t lag = ar.lags[k];
			acc -= ar.coeffs[k] * (t >= lag ? x[t - lag] : presample);
		}
		for (std::size_t k = 0; k < ma.lags.size(); ++k) {
			const std::size_t lag = ma.lags[k];
			if (t >= lag && t - lag < m) {
				acc += ma.coeffs[k] * residuals_out[t - lag];
			}
		}
		x[t] = acc;
	}

	const LagPolynomial diff = difference_polynomial(spec.diff);
	std::vector<double> working(horizon);
	const std::size_t n = history.size();
	for (std::size_t i = 0; i < horizon; ++i) {
		double w = x[m + i] + params.mu;
		for (std::size_t j = 0; j < r; ++j) {
			const auto past = exog_history->columns[j].values();
			const auto future = exog_future->columns[j].values();
			double z = 0.0;
			for (const auto &[h, c] : diff.coefficients()) {
				const std::size_t pos = n + i - h;
				z += c * (pos >= n ? future[pos - n] : past[pos]);
			}
			w += params.gamma[j] * z;
		}
		working[i] = w;
	}
	std::vector<double> levels = integrate(working, history.values(), spec.diff);

	const std::vector<double> psi = psi_weights(spec, params, horizon);
	std::vector<double> variance(horizon);
	double acc = 0.0;
	for (std::size_t h = 0; h < horizon; ++h) {
		acc += psi[h] * psi[h];
		variance[h] = params.sigma2 * acc;
	}
	return {HourlySeries(history.end(), std::move(levels), history.units()), std::move(variance)};
}

ForecastResult forecast(const ModelSpec &spec, const ParameterVector &params, const HourlySeries &history,
                        const std::optional<ExogenousMatrix> &exog_history,
                        const std::optional<ExogenousMatrix> &exog_future, std::size_t horizon) {
	std::vector<double> unused;
	return forecast(spec, params, history, exog_history, exog_future, horizon, unused);
}

} // namespace lmpcast
