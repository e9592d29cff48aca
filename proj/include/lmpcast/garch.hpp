#pragma once

#include "lmpcast/series.hpp"

#include <cstdint>
#include <vector>

namespace lmpcast {

// p = ARCH order (lags of eps^2), q = GARCH order (lags of sigma^2).
struct GarchSpec {
	std::size_t p = 1;
	std::size_t q = 1;

	void validate() const;
	std::size_t parameter_count() const {
		return 1 + p + q;
	}
	friend bool operator==(const GarchSpec &, const GarchSpec &) = default;
};

struct GarchParams {
	double alpha0 = 0.0;
	std::vector<double> alpha;
	std::vector<double> beta;

	double persistence() const;
	// alpha0 / (1 - sum alpha - sum beta)
	double unconditional_variance() const;
	// Throws InvalidParameters unless alpha0 > 0, alpha_i, beta_j >= 0 and persistence < 1.
	void validate() const;

	friend bool operator==(const GarchParams &, const GarchParams &) = default;
};

// Biased sample variance; the default presample for eps^2 and sigma^2.
double presample_variance(const HourlySeries &residuals);

// sigma_t^2 = alpha0 + sum_i alpha_i eps_{t-i}^2 + sum_j beta_j sigma_{t-j}^2.
HourlySeries conditional_variances(const GarchParams &params, const HourlySeries &residuals);
HourlySeries conditional_variances(const GarchParams &params, const HourlySeries &residuals,
                                   double presample);

double garch_log_likelihood(const GarchParams &params, const HourlySeries &residuals);

// sigma^2_{T+1..T+h}. Step 1 uses the known residuals; later steps replace eps^2 by its
// conditional expectation, which for GARCH(1,1) is sigma^2_{T+h} = alpha0 + (alpha1 + beta1) sigma^2_{T+h-1}.
std::vector<double> forecast_variance(const GarchParams &params, const HourlySeries &residuals,
                                      std::size_t horizon);

// eps_t = sigma_t z_t with z_t ~ N(0,1); burn-in of 1000 steps started at the unconditional variance.
HourlySeries simulate_garch(const GarchParams &params, std::size_t n, std::uint64_t seed,
                            Timestamp start = Timestamp{});

namespace detail {

// Raw-span recursion used by the estimator; returns the log-likelihood, or -inf if a variance
// is non-positive.
double garch_loglik(const GarchParams &params, std::span<const double> eps, double presample);
void garch_variances(const GarchParams &params, std::span<const double> eps, double presample,
                     std::span<double> out);

} // namespace detail

} // namespace lmpcast
