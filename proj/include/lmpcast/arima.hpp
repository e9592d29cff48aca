#pragma once

#include "lmpcast/lag_polynomial.hpp"
#include "lmpcast/series.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lmpcast {

/// SARIMA(p,d,q)x(P,D,Q)_S with r exogenous regressors and an optional mean term.
///
/// The model is regression with ARMA errors on the differenced ("working") scale:
///   w_t = (1-B)^d (1-B^S)^D y_t,   x_t = w_t - mu - u*_t' gamma,
///   phi(B) Phi(B^S) x_t = theta(B) Theta(B^S) eps_t,
/// where u*_t are the regressors differenced the same way as y. mu is therefore the mean of the
/// working series, not an intercept; the intercept form is recovered as mu * phi(1) Phi(1).
struct ModelSpec {
	std::size_t p = 0;
	std::size_t q = 0;
	std::size_t P = 0;
	std::size_t Q = 0;
	DifferenceSpec diff{};
	std::size_t exog_count = 0;
	bool constant = true;

	// Throws InvalidParameters.
	void validate() const;

	std::size_t arma_parameter_count() const {
		return p + q + P + Q;
	}
	// Every estimated quantity, sigma2 included; this is the k used by BIC.
	std::size_t parameter_count() const {
		return arma_parameter_count() + exog_count + (constant ? 1 : 0) + 1;
	}
	std::size_t ar_degree() const {
		return p + P * diff.S;
	}
	std::size_t ma_degree() const {
		return q + Q * diff.S;
	}
	// Smallest admissible series length for likelihood evaluation.
	std::size_t min_length() const;

	std::string describe() const;

	friend bool operator==(const ModelSpec &, const ModelSpec &) = default;
};

struct ParameterVector {
	std::vector<double> phi;
	std::vector<double> Phi;
	std::vector<double> theta;
	std::vector<double> Theta;
	double mu = 0.0;
	std::vector<double> gamma;
	double sigma2 = 1.0;

	friend bool operator==(const ParameterVector &, const ParameterVector &) = default;
};

struct ExogenousMatrix {
	std::vector<HourlySeries> columns;

	std::size_t count() const {
		return columns.size();
	}
};

struct ForecastResult {
	HourlySeries mean;
	std::vector<double> variance;
};

// phi(B) Phi(B^S) and theta(B) Theta(B^S), expanded.
LagPolynomial ar_polynomial(const ModelSpec &spec, const ParameterVector &params);
LagPolynomial ma_polynomial(const ModelSpec &spec, const ParameterVector &params);

// Shape, sigma2 > 0 (InvalidParameters), AR stationarity and MA invertibility (UnstableParameters).
void validate_parameters(const ModelSpec &spec, const ParameterVector &params);

// Burn-in of 10 x max lag is generated and discarded. With exogenous columns (length >= n + burn-in) the
// output is aligned to exog start + burn-in; otherwise it starts at `start`.
HourlySeries simulate(const ModelSpec &spec, const ParameterVector &params, std::size_t n,
                      const std::optional<ExogenousMatrix> &exog, std::uint64_t seed, Timestamp start = Timestamp{});
std::size_t simulation_burn_in(const ModelSpec &spec);

// Conditional Gaussian log-likelihood. Presample working values are set to the working-series mean
// and presample innovations to zero, so every differenced observation contributes.
double log_likelihood(const ModelSpec &spec, const ParameterVector &params, const HourlySeries &series,
                      const std::optional<ExogenousMatrix> &exog);

// eps_t over the effective sample (starts d + D*S hours after the series).
HourlySeries residuals(const ModelSpec &spec, const ParameterVector &params, const HourlySeries &series,
                       const std::optional<ExogenousMatrix> &exog);

// MMSE recursive forecasts on the working scale, integrated back to levels. Variances use the
// psi-weights of theta(B)Theta(B^S) / (phi(B)Phi(B^S)(1-B)^d(1-B^S)^D) and constant sigma2.
ForecastResult forecast(const ModelSpec &spec, const ParameterVector &params, const HourlySeries &history,
                        const std::optional<ExogenousMatrix> &exog_history,
                        const std::optional<ExogenousMatrix> &exog_future, std::size_t horizon);

// Same as forecast, also returning the in-sample residuals used to seed the recursion.
ForecastResult forecast(const ModelSpec &spec, const ParameterVector &params, const HourlySeries &history,
                        const std::optional<ExogenousMatrix> &exog_history,
                        const std::optional<ExogenousMatrix> &exog_future, std::size_t horizon,
                        std::vector<double> &residuals_out);

// psi_0..psi_{count-1} of the level-scale MA(infinity) representation.
std::vector<double> psi_weights(const ModelSpec &spec, const ParameterVector &params, std::size_t count);

namespace detail {

// Sparse (lag, coefficient) view of a polynomial without the lag-0 term.
struct SparseTerms {
	std::vector<std::size_t> lags;
	std::vector<double> coeffs;

	explicit SparseTerms(const LagPolynomial &poly);
	std::size_t max_lag() const {
		return lags.empty() ? 0 : lags.back();
	}
};

// Differenced target and regressors for one series window.
struct WorkingData {
	std::vector<double> target;
	std::vector<std::vector<double>> regressors;
	Timestamp start;
};

WorkingData prepare_working(const ModelSpec &spec, const HourlySeries &series,
                            const std::optional<ExogenousMatrix> &exog);

// eps_t = a(B) x_t - sum_{k>=1} b_k eps_{t-k}, presample x = mean(x), presample eps = 0.
// Linear in x; the estimator relies on this to concentrate out mu and gamma.
void filter_residuals(const SparseTerms &ar, const SparseTerms &ma, std::span<const double> x,
                      std::span<double> out);
// Several equal-length columns in one pass; each output matches the single-column call bit for bit.
void filter_residuals(const SparseTerms &ar, const SparseTerms &ma, std::span<const std::span<const double>> xs,
                      std::span<const std::span<double>> outs);

} // namespace detail

} // namespace lmpcast
