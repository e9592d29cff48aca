#include "lmpcast/lag_polynomial.hpp"

#include "lmpcast/errors.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

namespace lmpcast {

LagPolynomial::LagPolynomial() : coefficients_{{0, 1.0}} {
}

LagPolynomial::LagPolynomial(std::map<std::size_t, double> coefficients) : coefficients_(std::move(coefficients)) {
	const auto lead = coefficients_.find(0);
	if (lead == coefficients_.end() || lead->second != 1.0) {
		throw InvalidParameters("lag polynomial must have lag-0 coefficient exactly 1");
	}
	std::erase_if(coefficients_, [](const auto &kv) { return kv.first != 0 && kv.second == 0.0; });
}

LagPolynomial LagPolynomial::from_model_coefficients(std::span<const double> coefficients, std::size_t spacing) {
	std::map<std::size_t, double> c{{0, 1.0}};
	for (std::size_t i = 0; i < coefficients.size(); ++i) {
		c[(i + 1) * spacing] -= coefficients[i];
	}
	return LagPolynomial(std::move(c));
}

double LagPolynomial::coefficient(std::size_t lag) const {
	const auto it = coefficients_.find(lag);
	return it == coefficients_.end() ? 0.0 : it->second;
}

std::size_t LagPolynomial::max_lag() const {
	return coefficients_.rbegin()->first;
}

std::vector<double> LagPolynomial::dense() const {
	std::vector<double> out(max_lag() + 1, 0.0);
	for (const auto &[lag, c] : coefficients_) {
		out[lag] = c;
	}
	return out;
}

DifferenceSpec::DifferenceSpec(std::size_t d_order, std::size_t seasonal_order, std::size_t season)
    : d(d_order), D(seasonal_order), S(season) {
	if (D > 0 && S < 2) {
		throw InvalidParameters("seasonal differencing requires season length S >= 2");
	}
	if (S == 0) {
		throw InvalidParameters("season length must be positive");
	}
}

LagPolynomial multiply(const LagPolynomial &a, const LagPolynomial &b) {
	std::map<std::size_t, double> out;
	for (const auto &[la, ca] : a.coefficients()) {
		for (const auto &[lb, cb] : b.coefficients()) {
			out[la + lb] += ca * cb;
		}
	}
	return LagPolynomial(std::move(out));
}

LagPolynomial difference_polynomial(const DifferenceSpec &spec) {
	LagPolynomial out;
	const LagPolynomial first({{0, 1.0}, {1, -1.0}});
	for (std::size_t i = 0; i < spec.d; ++i) {
		out = multiply(out, first);
	}
	if (spec.D > 0) {
		const LagPolynomial seasonal({{0, 1.0}, {spec.S, -1.0}});
		for (std::size_t i = 0; i < spec.D; ++i) {
			out = multiply(out, seasonal);
		}
	}
	return out;
}

std::vector<double> apply(const LagPolynomial &poly, std::span<const double> values) {
	const std::size_t lag = poly.max_lag();
	if (values.size() <= lag) {
		throw SeriesTooShort("series of length " + std::to_string(values.size()) +
		                     " is too short for a polynomial of degree " + std::to_string(lag));
	}
	std::vector<double> out(values.size() - lag, 0.0);
	for (std::size_t t = lag; t < values.size(); ++t) {
		double acc = 0.0;
		for (const auto &[h, c] : poly.coefficients()) {
			acc += c * values[t - h];
		}
		out[t - lag] = acc;
	}
	return out;
}

HourlySeries apply(const LagPolynomial &poly, const HourlySeries &series) {
	auto out = apply(poly, series.values());
	return HourlySeries(series.time_at(poly.max_lag()), std::move(out), series.units());
}

std::vector<double> integrate(std::span<const double> differenced, std::span<const double> presample,
                              const DifferenceSpec &spec) {
	const std::size_t need = spec.presample_length();
	if (presample.size() < need) {
		throw InsufficientPresample("integration needs " + std::to_string(need) + " presample values, got " +
		                            std::to_string(presample.size()));
	}
	const LagPolynomial poly = difference_polynomial(spec);
	std::vector<double> levels(presample.end() - static_cast<std::ptrdiff_t>(need), presample.end());
	levels.reserve(need + differenced.size());
	for (std::size_t i = 0; i < differenced.size(); ++i) {
		const std::size_t t = need + i;
		double acc = differenced[i];
		for (const auto &[h, c] : poly.coefficients()) {
			if (h != 0) {
				acc -= c * levels[t - h];
			}
		}
		levels.push_back(acc);
	}
	return {levels.begin() + static_cast<std::ptrdiff_t>(need), levels.end()};
}

HourlySeries integrate(const HourlySeries &differenced, const HourlySeries &presample, const DifferenceSpec &spec) {
	if (presample.end() != differenced.start()) {
		throw AlignmentError("presample must end at " + format_timestamp(differenced.start()));
	}
	auto out = integrate(differenced.values(), presample.values(), spec);
	return HourlySeries(differenced.start(), std::move(out), presample.units());
}

StabilityResult is_stable(const LagPolynomial &poly) {
	const std::vector<double> c = poly.dense();
	const std::size_t m = c.size() - 1;
	if (m == 0) {
		return {true, std::numeric_limits<double>::infinity()};
	}
	// Reciprocal polynomial z^m + c_1 z^{m-1} + ... + c_m is monic; its roots are 1/root of poly.
	Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
	for (std::size_t j = 0; j < m; ++j) {
		companion(0, static_cast<Eigen::Index>(j)) = -c[j + 1];
	}
	for (std::size_t i = 1; i < m; ++i) {
		companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
	}
	Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
	double largest = 0.0;
	for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
		largest = std::max(largest, std::abs(solver.eigenvalues()[i]));
	}
	if (largest == 0.0) {
		return {true, std::numeric_limits<double>::infinity()};
	}
	const double margin = 1.0 / largest - 1.0;
	return {margin > kStabilityTolerance, margin};
}

} // namespace lmpcast
