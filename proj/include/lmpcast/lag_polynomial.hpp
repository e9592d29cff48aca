#pragma once

#include "lmpcast/series.hpp"

#include <cstddef>
#include <map>
#include <span>
#include <vector>

namespace lmpcast {

/// Polynomial in the backshift operator B (B^h y_t = y_{t-h}), stored sparsely by lag.
/// The lag-0 coefficient is always exactly 1.
///
/// Sign convention: AR and MA factors are written with minus signs throughout,
///   phi(B) = 1 - phi_1 B - ... - phi_p B^p,   theta(B) = 1 - theta_1 B - ... - theta_q B^q,
/// so a model coefficient c at lag k is stored as -c. Use from_model_coefficients for that mapping.
class LagPolynomial {
public:
	LagPolynomial();
	// Throws InvalidParameters when coefficients[0] is missing or differs from 1.
	explicit LagPolynomial(std::map<std::size_t, double> coefficients);

	// 1 - c_1 B^s - c_2 B^{2s} - ... ; spacing s = 1 for non-seasonal factors, S for seasonal ones.
	static LagPolynomial from_model_coefficients(std::span<const double> coefficients, std::size_t spacing = 1);

	const std::map<std::size_t, double> &coefficients() const {
		return coefficients_;
	}
	double coefficient(std::size_t lag) const;
	std::size_t max_lag() const;

	// Dense coefficient vector c[0..max_lag].
	std::vector<double> dense() const;

	friend bool operator==(const LagPolynomial &, const LagPolynomial &) = default;

private:
	std::map<std::size_t, double> coefficients_;
};

struct DifferenceSpec {
	std::size_t d = 0;
	std::size_t D = 0;
	std::size_t S = 24;

	DifferenceSpec() = default;
	DifferenceSpec(std::size_t d_order, std::size_t seasonal_order, std::size_t season);

	std::size_t presample_length() const {
		return d + D * S;
	}
	friend bool operator==(const DifferenceSpec &, const DifferenceSpec &) = default;
};

struct StabilityResult {
	bool stable;
	// min |root| - 1; +inf for the identity polynomial.
	double margin;
};

// Convolution of coefficient maps.
LagPolynomial multiply(const LagPolynomial &a, const LagPolynomial &b);

// (1 - B)^d (1 - B^S)^D expanded.
LagPolynomial difference_polynomial(const DifferenceSpec &spec);

// Output is shorter by max_lag samples and starts max_lag hours later. Throws SeriesTooShort.
HourlySeries apply(const LagPolynomial &poly, const HourlySeries &series);
std::vector<double> apply(const LagPolynomial &poly, std::span<const double> values);

// Inverts differencing. presample must end exactly where differenced starts and hold at least
// d + D*S values; only the trailing d + D*S are used.
HourlySeries integrate(const HourlySeries &differenced, const HourlySeries &presample, const DifferenceSpec &spec);
std::vector<double> integrate(std::span<const double> differenced, std::span<const double> presample,
                              const DifferenceSpec &spec);

// Roots in B strictly outside the unit circle, via companion-matrix eigenvalues; 1e-8 tolerance.
StabilityResult is_stable(const LagPolynomial &poly);

inline constexpr double kStabilityTolerance = 1e-8;

} // namespace lmpcast
