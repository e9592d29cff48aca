#pragma once

#include "lmpcast/arima.hpp"
#include "lmpcast/garch.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lmpcast {

struct FitOptions {
	// Per simplex run (objective evaluations).
	std::size_t max_iterations = 5000;
	// Spread of the per-observation negative log-likelihood across the simplex.
	double tolerance = 1e-10;
	// Jittered starts in addition to the deterministic one.
	std::size_t restarts = 3;
	std::uint64_t seed = 0;

	void validate() const;
};

struct FitDiagnostics {
	bool converged = false;
	std::size_t iterations = 0;
	// Coefficients whose estimates sit on a constraint boundary, e.g. "theta[1]" or "garch.beta[1]".
	std::vector<std::string> boundary;
};

struct FittedModel {
	ModelSpec spec;
	ParameterVector params;
	double loglik;
	double bic;
	std::size_t n_effective;
	HourlySeries residuals;
	std::optional<GarchSpec> garch_spec;
	std::optional<GarchParams> garch_params;
	FitDiagnostics diagnostics;
};

// -2 loglik + k ln(n)
double bic(double loglik, std::size_t k, std::size_t n);

FittedModel fit(const ModelSpec &spec, const HourlySeries &series, const std::optional<ExogenousMatrix> &exog,
                const FitOptions &options);

struct OrderRange {
	std::size_t lo;
	std::size_t hi;
};

/// Row-major p x q table; a missing cell marks a failed fit.
struct BicTable {
	std::vector<std::size_t> p_values;
	std::vector<std::size_t> q_values;
	std::vector<std::optional<double>> cells;
	std::vector<std::string> failures;

	const std::optional<double> &at(std::size_t row, std::size_t col) const {
		return cells[row * q_values.size() + col];
	}
};

struct GridChoice {
	std::size_t p;
	std::size_t q;
	double bic;
};

// Minimum over non-failed cells; ties go to smaller p+q, then smaller q. Throws EstimationFailed
// when every cell failed.
GridChoice select_min_bic(const BicTable &table);

struct GridSelection {
	ModelSpec spec;
	BicTable table;
	GridChoice choice;
};

// Fits every (p, q) holding the template's seasonal, differencing and regression structure fixed.
// Cells run in parallel under OpenMP; results are merged by grid index.
GridSelection grid_select(const HourlySeries &series, const std::optional<ExogenousMatrix> &exog, OrderRange p_range,
                          OrderRange q_range, const ModelSpec &base, const FitOptions &options);
// Serial reference for grid_select; must agree bit for bit.
GridSelection grid_select_reference(const HourlySeries &series, const std::optional<ExogenousMatrix> &exog,
                                    OrderRange p_range, OrderRange q_range, const ModelSpec &base,
                                    const FitOptions &options);

// Maximizes the Gaussian GARCH quasi-likelihood. When the fit does not improve on constant variance by
// more than the BIC penalty of its p + q extra terms, returns alpha = beta = 0 with alpha0 = mean(eps^2).
// Throws EstimationFailed on degenerate input.
GarchParams fit_garch(const HourlySeries &residuals, const GarchSpec &gspec, const FitOptions &options);

// Second stage: GARCH on the ARMA residuals. The mean equation is left untouched.
FittedModel attach_garch(const FittedModel &arma_fit, const GarchSpec &gspec, const FitOptions &options);

// Point forecasts from the mean equation; variances from psi-weights times either constant sigma2
// or the GARCH variance path when a GARCH layer is attached.
ForecastResult forecast(const FittedModel &model, const HourlySeries &history,
                        const std::optional<ExogenousMatrix> &exog_history,
                        const std::optional<ExogenousMatrix> &exog_future, std::size_t horizon);

// Maps unconstrained reals to coefficients whose 1 - sum c_k B^k polynomial has all roots outside the
// unit circle (partial-autocorrelation parameterization).
std::vector<double> constrained_coefficients(std::span<const double> unconstrained);

} // namespace lmpcast
