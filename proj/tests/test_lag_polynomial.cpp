#include "helpers.hpp"
#include "oracles.hpp"

#include "lmpcast/arima.hpp"
#include "lmpcast/errors.hpp"
#include "lmpcast/lag_polynomial.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <map>
#include <random>

using namespace lmpcast;
using testing::hourly;
using testing::kMonday;
using testing::to_vector;

namespace {

LagPolynomial poly(std::map<std::size_t, double> c) {
	return LagPolynomial(std::move(c));
}

LagPolynomial random_sparse(std::mt19937_64 &rng, std::size_t max_lag, std::size_t terms) {
	std::uniform_int_distribution<std::size_t> lag(1, max_lag);
	std::uniform_real_distribution<double> coeff(-0.9, 0.9);
	std::map<std::size_t, double> c{{0, 1.0}};
	for (std::size_t i = 0; i < terms; ++i) {
		c[lag(rng)] = coeff(rng);
	}
	return poly(c);
}

double max_abs_diff(const std::vector<double> &a, const std::vector<double> &b) {
	REQUIRE(a.size() == b.size());
	double m = 0.0;
	for (std::size_t i = 0; i < a.size(); ++i) {
		m = std::max(m, std::abs(a[i] - b[i]));
	}
	return m;
}

} // namespace

TEST_CASE("construction") {
	CHECK(LagPolynomial().coefficients() == std::map<std::size_t, double>{{0, 1.0}});
	CHECK_THROWS_AS(poly({{1, 0.5}}), InvalidParameters);
	CHECK_THROWS_AS(poly({{0, 2.0}, {1, 0.5}}), InvalidParameters);

	const std::vector<double> phi{0.5, -0.2};
	const LagPolynomial ar = LagPolynomial::from_model_coefficients(phi);
	CHECK(ar.coefficient(1) == -0.5);
	CHECK(ar.coefficient(2) == 0.2);
	CHECK(ar.coefficient(7) == 0.0);
	CHECK(ar.max_lag() == 2);

	const LagPolynomial seasonal = LagPolynomial::from_model_coefficients(std::vector<double>{0.4}, 24);
	CHECK(seasonal.dense().size() == 25);
	CHECK(seasonal.coefficient(24) == -0.4);
}

TEST_CASE("apply") {
	CHECK(to_vector(lmpcast::apply(poly({{0, 1}, {1, -1}}), hourly({1, 2, 4}))) == std::vector<double>{1, 2});
	CHECK(lmpcast::apply(poly({{0, 1}, {1, -1}}), hourly({1, 2, 4})).start() == kMonday + std::chrono::hours(1));

	const HourlySeries x = hourly(oracle::gaussian(50, 1));
	CHECK(lmpcast::apply(LagPolynomial(), x) == x);

	std::vector<double> periodic(24 * 10);
	for (std::size_t t = 0; t < periodic.size(); ++t) {
		periodic[t] = std::sin(0.3 * static_cast<double>(t % 24)) + static_cast<double>(t % 24);
	}
	for (double v : to_vector(lmpcast::apply(poly({{0, 1}, {24, -1}}), hourly(periodic)))) {
		CHECK(v == 0.0);
	}

	CHECK_THROWS_AS(lmpcast::apply(poly({{0, 1}, {3, -1}}), hourly({1, 2, 3})), SeriesTooShort);
}

TEST_CASE("multiply") {
	const LagPolynomial product = multiply(poly({{0, 1}, {1, -0.5}}), poly({{0, 1}, {24, -1}}));
	CHECK(product.coefficients() == std::map<std::size_t, double>{{0, 1}, {1, -0.5}, {24, -1}, {25, 0.5}});

	const LagPolynomial a = poly({{0, 1}, {2, 0.3}, {5, -0.1}});
	CHECK(multiply(a, LagPolynomial()) == a);
	CHECK(multiply(LagPolynomial(), a) == a);

	SUBCASE("composition matches sequential application") {
		std::mt19937_64 rng(41);
		for (int trial = 0; trial < 20; ++trial) {
			const LagPolynomial p = random_sparse(rng, 30, 3);
			const LagPolynomial r = random_sparse(rng, 30, 3);
			const std::vector<double> x = oracle::gaussian(200, 100 + static_cast<std::uint64_t>(trial));
			const std::vector<double> direct = lmpcast::apply(multiply(p, r), x);
			const std::vector<double> sequential = lmpcast::apply(p, lmpcast::apply(r, x));
			CHECK(max_abs_diff(direct, sequential) < 1e-12);
			CHECK(max_abs_diff(direct, oracle::convolve(multiply(p, r).dense(), x)) < 1e-12);
		}
	}
	SUBCASE("commutative and associative") {
		std::mt19937_64 rng(7);
		for (int trial = 0; trial < 20; ++trial) {
			const LagPolynomial p = random_sparse(rng, 10, 3);
			const LagPolynomial r = random_sparse(rng, 10, 3);
			const LagPolynomial s = random_sparse(rng, 30, 2);
			CHECK(max_abs_diff(multiply(p, r).dense(), multiply(r, p).dense()) < 1e-14);
			CHECK(max_abs_diff(multiply(multiply(p, r), s).dense(), multiply(p, multiply(r, s)).dense()) < 1e-14);
		}
	}
}

TEST_CASE("difference_polynomial") {
	CHECK(difference_polynomial(DifferenceSpec(1, 0, 24)).coefficients() ==
	      std::map<std::size_t, double>{{0, 1}, {1, -1}});
	CHECK(difference_polynomial(DifferenceSpec(0, 1, 24)).coefficients() ==
	      std::map<std::size_t, double>{{0, 1}, {24, -1}});
	CHECK(difference_polynomial(DifferenceSpec(1, 1, 24)).coefficients() ==
	      std::map<std::size_t, double>{{0, 1}, {1, -1}, {24, -1}, {25, 1}});
	CHECK(difference_polynomial(DifferenceSpec(2, 0, 24)).coefficients() ==
	      std::map<std::size_t, double>{{0, 1}, {1, -2}, {2, 1}});
	CHECK(difference_polynomial(DifferenceSpec()) == LagPolynomial());
	CHECK_THROWS_AS(DifferenceSpec(0, 1, 1), InvalidParameters);
	CHECK(DifferenceSpec(1, 1, 24).presample_length() == 25);
}

TEST_CASE("integrate") {
	CHECK(to_vector(integrate(hourly({1, 2}, kMonday + std::chrono::hours(1)), hourly({10}), DifferenceSpec(1, 0, 24))) ==
	      std::vector<double>{11, 13});

	CHECK_THROWS_AS(integrate(hourly({1, 2}, kMonday + std::chrono::hours(1)), hourly({10}), DifferenceSpec(0, 1, 24)),
	                InsufficientPresample);
	CHECK_THROWS_AS(integrate(hourly({1, 2}, kMonday + std::chrono::hours(5)), hourly({10}), DifferenceSpec(1, 0, 24)),
	                AlignmentError);

	SUBCASE("first-order operators round trip to 1e-12") {
		for (const DifferenceSpec spec : {DifferenceSpec(1, 0, 24), DifferenceSpec(0, 1, 24), DifferenceSpec(0, 1, 168)}) {
			const std::vector<double> y = oracle::gaussian(8760, 3 + spec.S, 40.0, 10.0);
			const std::size_t pre = spec.presample_length();
			const std::vector<double> diff = lmpcast::apply(difference_polynomial(spec), y);
			const std::vector<double> back = integrate(diff, std::span<const double>(y).first(pre), spec);
			CHECK(max_abs_diff(back, std::vector<double>(y.begin() + static_cast<std::ptrdiff_t>(pre), y.end())) < 1e-12);
		}
	}
	SUBCASE("higher orders stay within the rounding growth bound") {
		// Rounding in the forward difference is summed order - 1 more times on the way back.
		for (const DifferenceSpec spec : {DifferenceSpec(1, 1, 24), DifferenceSpec(2, 0, 24), DifferenceSpec(2, 1, 12),
		                                  DifferenceSpec(1, 2, 24)}) {
			const std::size_t n = 2000;
			const std::vector<double> y = oracle::random_walk(n, 3 + spec.d + spec.D, 5.0);
			const std::size_t pre = spec.presample_length();
			const std::vector<double> diff = lmpcast::apply(difference_polynomial(spec), y);
			const std::vector<double> back = integrate(diff, std::span<const double>(y).first(pre), spec);
			double scale = 0.0;
			for (double v : y) {
				scale = std::max(scale, std::abs(v));
			}
			const double order = static_cast<double>(spec.d + spec.D);
			const double bound = 4.0 * std::numeric_limits<double>::epsilon() * scale *
			                     std::pow(static_cast<double>(n), order - 0.5);
			CHECK(max_abs_diff(back, std::vector<double>(y.begin() + static_cast<std::ptrdiff_t>(pre), y.end())) < bound);

			// The reverse direction reproduces the differenced input.
			std::vector<double> full(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(pre));
			full.insert(full.end(), back.begin(), back.end());
			CHECK(max_abs_diff(lmpcast::apply(difference_polynomial(spec), full), diff) < 1e-12);
		}
	}
	SUBCASE("first differences round trip exactly on integers") {
		std::vector<double> y(500);
		std::mt19937_64 rng(9);
		std::uniform_int_distribution<int> step(-50, 50);
		for (std::size_t t = 1; t < y.size(); ++t) {
			y[t] = y[t - 1] + step(rng);
		}
		const HourlySeries series = hourly(y);
		const HourlySeries diff = lmpcast::apply(difference_polynomial(DifferenceSpec(1, 0, 24)), series);
		CHECK(integrate(diff, series.slice(0, 1), DifferenceSpec(1, 0, 24)) == series.slice(1, 499));
	}
	SUBCASE("seasonal integration of zeros repeats the presample") {
		const std::vector<double> presample = oracle::gaussian(24, 12);
		const std::vector<double> out = integrate(std::vector<double>(100, 0.0), presample, DifferenceSpec(0, 1, 24));
		CHECK(out == oracle::lag_integrate(std::vector<double>(100, 0.0), presample, 24));
		for (std::size_t t = 0; t < out.size(); ++t) {
			CHECK(out[t] == presample[t % 24]);
		}
	}
	SUBCASE("seasonal integration matches the direct recursion") {
		const std::vector<double> presample = oracle::gaussian(30, 13);
		const std::vector<double> diff = oracle::gaussian(200, 14);
		const std::vector<double> out = integrate(diff, presample, DifferenceSpec(0, 1, 24));
		CHECK(max_abs_diff(out, oracle::lag_integrate(diff, presample, 24)) == 0.0);
	}
}

TEST_CASE("is_stable") {
	const StabilityResult half = is_stable(poly({{0, 1}, {1, -0.5}}));
	CHECK(half.stable);
	CHECK(half.margin == doctest::Approx(1.0).epsilon(1e-12));

	CHECK_FALSE(is_stable(poly({{0, 1}, {1, -1}})).stable);
	CHECK_FALSE(is_stable(poly({{0, 1}, {1, -1.5}})).stable);

	const StabilityResult two_roots = is_stable(poly({{0, 1}, {1, -1.2}, {2, 0.35}}));
	CHECK(two_roots.stable);
	CHECK(two_roots.margin == doctest::Approx(1.0 / 0.7 - 1.0).epsilon(1e-10));

	CHECK(std::isinf(is_stable(LagPolynomial()).margin));
	CHECK(is_stable(poly({{0, 1}, {24, -0.9}})).stable);
	CHECK_FALSE(is_stable(poly({{0, 1}, {24, -1.0}})).stable);

	SUBCASE("stable AR processes stay bounded over 1e5 steps") {
		std::mt19937_64 rng(77);
		int tried = 0;
		for (int trial = 0; trial < 200 && tried < 10; ++trial) {
			const LagPolynomial candidate = random_sparse(rng, 6, 3);
			if (!is_stable(candidate).stable) {
				continue;
			}
			++tried;
			ModelSpec spec;
			spec.p = candidate.max_lag();
			spec.constant = false;
			ParameterVector params;
			for (std::size_t k = 1; k <= spec.p; ++k) {
				params.phi.push_back(-candidate.coefficient(k));
			}
			const HourlySeries path = simulate(spec, params, 100000, std::nullopt, 1000 + trial);
			for (double v : path.values()) {
				REQUIRE(std::isfinite(v));
			}
		}
		CHECK(tried == 10);
	}
}
