#pragma once

// Straightforward reimplementations used as references by the tests. They share no code with the
// library beyond plain vectors.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

inline std::vector<double> random_walk(std::size_t n, std::uint64_t seed, double scale = 1.0) {
	std::mt19937_64 rng(seed);
	std::normal_distribution<double> z(0.0, scale);
	std::vector<double> out(n);
	double level = 0.0;
	for (auto &v : out) {
		level += z(rng);
		v = level;
	}
	return out;
}

inline std::vector<double> gaussian(std::size_t n, std::uint64_t seed, double mean = 0.0, double sd = 1.0) {
	std::mt19937_64 rng(seed);
	std::normal_distribution<double> z(mean, sd);
	std::vector<double> out(n);
	for (auto &v : out) {
		v = z(rng);
	}
	return out;
}

// y_t - y_{t-lag}, first `lag` values dropped.
inline std::vector<double> lag_difference(const std::vector<double> &y, std::size_t lag) {
	std::vector<double> out;
	for (std::size_t t = lag; t < y.size(); ++t) {
		out.push_back(y[t] - y[t - lag]);
	}
	return out;
}

// sum_k c_k y_{t-k} for t >= max lag, c given densely.
inline std::vector<double> convolve(const std::vector<double> &c, const std::vector<double> &y) {
	const std::size_t L = c.size() - 1;
	std::vector<double> out;
	for (std::size_t t = L; t < y.size(); ++t) {
		double acc = 0.0;
		for (std::size_t k = 0; k <= L; ++k) {
			acc += c[k] * y[t - k];
		}
		out.push_back(acc);
	}
	return out;
}

// Undo one (1 - B^lag) given the `lag` values preceding the differenced block.
inline std::vector<double> lag_integrate(const std::vector<double> &diff, const std::vector<double> &presample,
                                         std::size_t lag) {
	std::vector<double> full(presample.end() - static_cast<std::ptrdiff_t>(lag), presample.end());
	for (std::size_t t = 0; t < diff.size(); ++t) {
		full.push_back(diff[t] + full[full.size() - lag]);
	}
	return {full.begin() + static_cast<std::ptrdiff_t>(lag), full.end()};
}

// GARCH(p,q) variances written out term by term; presample eps^2 and sigma^2 both equal `pre`.
inline std::vector<double> garch_variances(double a0, const std::vector<double> &alpha,
                                           const std::vector<double> &beta, const std::vector<double> &eps,
                                           double pre) {
	std::vector<double> e2, s2;
	for (std::size_t t = 0; t < eps.size(); ++t) {
		double v = a0;
		for (std::size_t i = 1; i <= alpha.size(); ++i) {
			v += alpha[i - 1] * (t >= i ? e2[t - i] : pre);
		}
		for (std::size_t j = 1; j <= beta.size(); ++j) {
			v += beta[j - 1] * (t >= j ? s2[t - j] : pre);
		}
		s2.push_back(v);
		e2.push_back(eps[t] * eps[t]);
	}
	return s2;
}

inline double gaussian_loglik(const std::vector<double> &eps, const std::vector<double> &var) {
	double ll = 0.0;
	for (std::size_t t = 0; t < eps.size(); ++t) {
		ll += -0.5 * std::log(2.0 * std::numbers::pi * var[t]) - eps[t] * eps[t] / (2.0 * var[t]);
	}
	return ll;
}

inline double biased_variance(const std::vector<double> &x) {
	double m = 0.0;
	for (double v : x) {
		m += v;
	}
	m /= static_cast<double>(x.size());
	double s = 0.0;
	for (double v : x) {
		s += (v - m) * (v - m);
	}
	return s / static_cast<double>(x.size());
}

// AR(1) with mean under the conditional scheme (presample level = sample mean): the residual
// eps_t = w_t - phi v_{t-1} - c, with v_{-1} = mean(w), is an ordinary regression, so phi is its OLS slope.
inline double ar1_cls_phi(const std::vector<double> &w) {
	double mean = 0.0;
	for (double v : w) {
		mean += v;
	}
	mean /= static_cast<double>(w.size());
	const double n = static_cast<double>(w.size());
	double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
	for (std::size_t t = 0; t < w.size(); ++t) {
		const double x = t == 0 ? mean : w[t - 1];
		sx += x;
		sy += w[t];
		sxx += x * x;
		sxy += x * w[t];
	}
	return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// psi-weights of theta(B)/phi(B) with all-minus polynomials: psi_j = -theta_j + sum_i phi_i psi_{j-i}.
inline std::vector<double> arma_psi(const std::vector<double> &phi, const std::vector<double> &theta, std::size_t n) {
	std::vector<double> psi(n, 0.0);
	psi[0] = 1.0;
	for (std::size_t j = 1; j < n; ++j) {
		double v = j <= theta.size() ? -theta[j - 1] : 0.0;
		for (std::size_t i = 1; i <= phi.size() && i <= j; ++i) {
			v += phi[i - 1] * psi[j - i];
		}
		psi[j] = v;
	}
	return psi;
}

// Autocorrelations from a truncated MA(infinity) representation.
inline std::vector<double> arma_acf(const std::vector<double> &phi, const std::vector<double> &theta,
                                    std::size_t max_lag) {
	const std::vector<double> psi = arma_psi(phi, theta, 4000);
	std::vector<double> gamma(max_lag + 1, 0.0);
	for (std::size_t k = 0; k <= max_lag; ++k) {
		for (std::size_t j = 0; j + k < psi.size(); ++j) {
			gamma[k] += psi[j] * psi[j + k];
		}
	}
	std::vector<double> rho;
	for (double g : gamma) {
		rho.push_back(g / gamma[0]);
	}
	return rho;
}

} // namespace oracle
