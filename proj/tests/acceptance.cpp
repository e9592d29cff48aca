// Prints one PASS/FAIL line per acceptance criterion; exits nonzero if any criterion fails.

#include "helpers.hpp"
#include "oracles.hpp"

#include "lmpcast/arima.hpp"
#include "lmpcast/backtest.hpp"
#include "lmpcast/data_io.hpp"
#include "lmpcast/estimation.hpp"
#include "lmpcast/garch.hpp"
#include "lmpcast/lag_polynomial.hpp"
#include "lmpcast/pipeline.hpp"
#include "lmpcast/series.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace lmpcast;
using testing::hourly;
using testing::kMonday;
using testing::to_vector;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
	return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
	bool pass = true;
	std::string detail;

	void require(bool ok, const std::string &what) {
		if (!ok) {
			pass = false;
		}
		if (!detail.empty()) {
			detail += "; ";
		}
		detail += what + (ok ? "" : " [failed]");
	}
};

std::string fmt(const char *format, double v) {
	char buf[64];
	std::snprintf(buf, sizeof(buf), format, v);
	return buf;
}

ModelSpec arma(std::size_t p, std::size_t q) {
	ModelSpec s;
	s.p = p;
	s.q = q;
	return s;
}

ParameterVector coeffs(std::vector<double> phi, std::vector<double> theta, double mu = 0.0) {
	ParameterVector v;
	v.phi = std::move(phi);
	v.theta = std::move(theta);
	v.mu = mu;
	return v;
}

GarchParams garch11(double a0, double a1, double b1) {
	GarchParams g;
	g.alpha0 = a0;
	g.alpha = {a1};
	g.beta = {b1};
	return g;
}

Outcome operator_algebra() {
	Outcome out;
	const auto t0 = Clock::now();
	const double tol = 1e-12;

	double worst_round_trip = 0.0;
	const std::vector<DifferenceSpec> specs{{1, 0, 24}, {0, 1, 24}, {0, 1, 168}};
	for (std::size_t i = 0; i < specs.size(); ++i) {
		const std::vector<double> y = oracle::gaussian(8760, 40 + i, 40.0, 10.0);
		const HourlySeries series = hourly(y);
		const std::size_t k = specs[i].presample_length();
		const HourlySeries diff = lmpcast::apply(difference_polynomial(specs[i]), series);
		const HourlySeries back = integrate(diff, series.slice(0, k), specs[i]);
		for (std::size_t t = 0; t < back.size(); ++t) {
			worst_round_trip = std::max(worst_round_trip, std::abs(back[t] - y[t + k]));
		}
	}
	out.require(worst_round_trip <= tol, "difference/integrate max error " + fmt("%.2e", worst_round_trip));

	double worst_composition = 0.0;
	std::mt19937_64 rng(99);
	std::uniform_real_distribution<double> u(-0.6, 0.6);
	for (int trial = 0; trial < 20; ++trial) {
		const std::vector<double> nonseasonal{u(rng), u(rng)};
		const std::vector<double> seasonal{u(rng)};
		const LagPolynomial a = LagPolynomial::from_model_coefficients(nonseasonal);
		const LagPolynomial b = LagPolynomial::from_model_coefficients(seasonal, 24);
		const std::vector<double> x = oracle::gaussian(1000, 200 + static_cast<std::uint64_t>(trial));
		const std::vector<double> composed = lmpcast::apply(multiply(b, a), x);
		const std::vector<double> sequential = lmpcast::apply(a, lmpcast::apply(b, x));
		for (std::size_t t = 0; t < composed.size(); ++t) {
			worst_composition = std::max(worst_composition, std::abs(composed[t] - sequential[t]));
		}
	}
	out.require(worst_composition <= tol, "composition vs sequential max error " + fmt("%.2e", worst_composition));

	const double elapsed = seconds_since(t0);
	out.require(elapsed < 1.0, "runtime " + fmt("%.3f", elapsed) + " s");
	return out;
}

Outcome delta_identity() {
	Outcome out;
	const std::size_t n = 100000;
	std::size_t mismatches = 0;
	double worst = 0.0;
	std::mt19937_64 rng(2016);
	std::uniform_real_distribution<double> da_draw(-50.0, 250.0);
	std::uniform_real_distribution<double> rt_draw(-100.0, 500.0);
	for (int dataset = 0; dataset < 3; ++dataset) {
		std::vector<double> da(n), rt(n);
		for (std::size_t t = 0; t < n; ++t) {
			da[t] = da_draw(rng);
			rt[t] = rt_draw(rng);
		}
		const HourlySeries dalmp = hourly(da), rtlmp = hourly(rt);
		const HourlySeries back = reconstruct_rtlmp(dalmp, delta_lmp(dalmp, rtlmp));
		for (std::size_t t = 0; t < n; ++t) {
			if (back[t] != rt[t]) {
				++mismatches;
				worst = std::max(worst, std::abs(back[t] - rt[t]));
			}
		}
	}
	out.require(mismatches == 0, "delta/reconstruct bit-exact: " + std::to_string(mismatches) +
	                                 " of 300000 points differ (max " + fmt("%.2e", worst) + ")");

	double worst_log = 0.0;
	const LogOffset offset(30.0);
	std::uniform_real_distribution<double> price(-29.0, 1000.0);
	std::vector<double> x(n);
	for (auto &v : x) {
		v = price(rng);
	}
	const HourlySeries back = inverse_log_transform(log_transform(hourly(x), offset), offset);
	for (std::size_t t = 0; t < n; ++t) {
		worst_log = std::max(worst_log, std::abs(back[t] - x[t]) / (x[t] + offset.c));
	}
	out.require(worst_log <= 1e-12, "log round trip max error relative to x + c " + fmt("%.2e", worst_log));
	return out;
}

Outcome likelihood_oracle() {
	Outcome out;
	const std::size_t n = 1000;
	ParameterVector params;
	params.sigma2 = 1.0;
	const double ll = log_likelihood(arma(0, 0), params, hourly(std::vector<double>(n, 0.0)), std::nullopt);
	const double expected = -0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
	out.require(std::abs(ll - expected) <= 1e-10, "ARMA(0,0) zeros error " + fmt("%.2e", std::abs(ll - expected)));

	double worst = 0.0;
	std::mt19937_64 rng(5);
	std::uniform_real_distribution<double> u(0.0, 0.3);
	for (int trial = 0; trial < 100; ++trial) {
		GarchParams g;
		g.alpha0 = 0.05 + u(rng);
		g.alpha = {u(rng), u(rng)};
		g.beta = {u(rng)};
		const std::vector<double> eps = oracle::gaussian(10, 1000 + static_cast<std::uint64_t>(trial), 0.0, 2.0);
		const std::vector<double> brute =
		    oracle::garch_variances(g.alpha0, g.alpha, g.beta, eps, oracle::biased_variance(eps));
		const HourlySeries v = conditional_variances(g, hourly(eps));
		for (std::size_t t = 0; t < eps.size(); ++t) {
			worst = std::max(worst, std::abs(v[t] - brute[t]));
		}
		worst = std::max(worst, std::abs(garch_log_likelihood(g, hourly(eps)) - oracle::gaussian_loglik(eps, brute)));
	}
	out.require(worst <= 1e-10, "GARCH brute-force max error " + fmt("%.2e", worst));
	return out;
}

Outcome parameter_recovery() {
	Outcome out;
	auto t0 = Clock::now();
	const HourlySeries y = simulate(arma(1, 1), coeffs({0.7}, {0.3}), 5000, std::nullopt, 4);
	const FittedModel m = fit(arma(1, 1), y, std::nullopt, FitOptions{});
	const double arma_time = seconds_since(t0);
	out.require(std::abs(m.params.phi[0] - 0.7) <= 0.05, "phi " + fmt("%.4f", m.params.phi[0]));
	out.require(std::abs(m.params.theta[0] - 0.3) <= 0.05, "theta " + fmt("%.4f", m.params.theta[0]));
	out.require(arma_time < 30.0, "ARMA fit " + fmt("%.2f", arma_time) + " s");

	t0 = Clock::now();
	const HourlySeries eps = simulate_garch(garch11(0.1, 0.1, 0.8), 10000, 4);
	const GarchParams g = fit_garch(eps, GarchSpec{1, 1}, FitOptions{});
	const double garch_time = seconds_since(t0);
	out.require(std::abs(g.alpha0 - 0.1) <= 0.05, "alpha0 " + fmt("%.4f", g.alpha0));
	out.require(std::abs(g.alpha[0] - 0.1) <= 0.05, "alpha1 " + fmt("%.4f", g.alpha[0]));
	out.require(std::abs(g.beta[0] - 0.8) <= 0.08, "beta1 " + fmt("%.4f", g.beta[0]));
	out.require(garch_time < 30.0, "GARCH fit " + fmt("%.2f", garch_time) + " s");
	return out;
}

BicTable paper_table() {
	BicTable t;
	t.p_values = {1, 2, 3, 4, 5};
	t.q_values = {1, 2, 3, 4, 5};
	for (double v : {-68875.1, -69085.5, -69067.3, -68905.7, -69056.9, -69073.0,  -69065.4, -69082.9, -68292.3,
	                 -69008.0, -69063.2, -69050.2, -68988.3, -69069.4, -69067.6, -69084.7, -69024.4, -69042.1,
	                 -69034.2, -68958.5, -69078.4, -68944.7, -69062.7, -69031.2, -69014.0}) {
		t.cells.emplace_back(v);
	}
	return t;
}

Outcome order_selection() {
	Outcome out;
	const SynthConfig synth = SynthConfig::benchmark();
	ModelSpec base;
	base.constant = true;
	int hits = 0;
	double slowest = 0.0;
	const auto t0 = Clock::now();
	for (std::uint64_t seed = 1; seed <= 50; ++seed) {
		const HourlySeries y = simulate(synth.delta_spec, synth.delta_params, 5000, std::nullopt, seed);
		FitOptions options;
		options.seed = seed;
		const auto t1 = Clock::now();
		const GridSelection g = grid_select(y, std::nullopt, {1, 5}, {1, 5}, base, options);
		slowest = std::max(slowest, seconds_since(t1));
		hits += g.choice.p == 1 && g.choice.q == 2 ? 1 : 0;
	}
	out.require(hits >= 40, "(1,2) selected in " + std::to_string(hits) + "/50");
	out.require(slowest < 600.0, "slowest 5x5 grid " + fmt("%.1f", slowest) + " s (all 50: " +
	                                 fmt("%.0f", seconds_since(t0)) + " s)");

	const GridChoice c = select_min_bic(paper_table());
	out.require(c.p == 1 && c.q == 2 && c.bic == -69085.5,
	            "published table gives (" + std::to_string(c.p) + "," + std::to_string(c.q) + ") at " + fmt("%.1f", c.bic));
	return out;
}

Outcome forecast_calibration() {
	Outcome out;
	const double phi = 0.7;
	const HourlySeries history = simulate(arma(1, 0), coeffs({phi}, {}), 500, std::nullopt, 6);
	const ForecastResult f = forecast(arma(1, 0), coeffs({phi}, {}), history, std::nullopt, std::nullopt, 3);

	const std::vector<double> psi = oracle::arma_psi({phi}, {}, 3);
	double acc = 0.0;
	bool exact = true;
	for (std::size_t h = 0; h < 3; ++h) {
		acc += psi[h] * psi[h];
		exact = exact && f.variance[h] == acc;
	}
	out.require(exact, "variances " + fmt("%.6f", f.variance[0]) + ", " + fmt("%.6f", f.variance[1]) + ", " +
	                       fmt("%.6f", f.variance[2]) + " vs psi-weight sums");

	std::mt19937_64 rng(77);
	std::normal_distribution<double> z;
	const std::size_t paths = 100000;
	std::vector<double> sum(3, 0.0), sum2(3, 0.0);
	for (std::size_t i = 0; i < paths; ++i) {
		double x = history[history.size() - 1];
		for (std::size_t h = 0; h < 3; ++h) {
			x = phi * x + z(rng);
			sum[h] += x;
			sum2[h] += x * x;
		}
	}
	double worst = 0.0;
	for (std::size_t h = 0; h < 3; ++h) {
		const double mean = sum[h] / paths;
		const double var = sum2[h] / paths - mean * mean;
		worst = std::max(worst, std::abs(var / f.variance[h] - 1.0));
	}
	out.require(worst <= 0.02, "Monte Carlo worst relative gap " + fmt("%.4f", worst));

	const HourlySeries noise = hourly(oracle::gaussian(300, 8, 3.7, 2.0));
	ParameterVector wn;
	wn.mu = 3.7;
	wn.sigma2 = 4.0;
	const ForecastResult flat = forecast(arma(0, 0), wn, noise, std::nullopt, std::nullopt, 48);
	bool all_mu = true;
	for (double m : flat.mean.values()) {
		all_mu = all_mu && m == 3.7;
	}
	out.require(all_mu, "ARMA(0,0) forecasts equal mu at 48 horizons");
	return out;
}

Outcome metric_contract() {
	Outcome out;
	SynthConfig synth = SynthConfig::benchmark();
	synth.length = 4 * 168;
	const MarketDataset data = synth_market(synth);
	const MarketDataset train = data.slice(0, 3 * 168);
	MarketDataset test = data.slice(3 * 168, 168);

	BacktestOptions options;
	options.horizon = 3;
	const BacktestReport base = rolling_backtest(preset("dalmp-baseline"), train, test, options);
	const BacktestReport best = rolling_backtest(preset("oracle"), train, test, options);
	bool zero = true, hundred = true;
	for (std::size_t h = 0; h < 3; ++h) {
		zero = zero && base.horizons[h].improvement_pct == 0.0;
		hundred = hundred && best.horizons[h].improvement_pct == 100.0;
	}
	out.require(zero, "baseline I_1..I_3 = 0%");
	out.require(hundred, "oracle I_1..I_3 = 100%");

	const double example = improvement_index(hourly({10, 20}), hourly({11, 21}), hourly({12, 24})).percent;
	out.require(example == 62.5, "two-point example " + fmt("%.4f", example) + "%");

	std::vector<double> rt = to_vector(test.rtlmp);
	const std::vector<std::size_t> ties{0, 9, 50, 120, 167};
	for (std::size_t t : ties) {
		rt[t] = test.dalmp[t];
	}
	test = MarketDataset(test.dalmp, test.rtlmp.with_values(rt, Units::dollars_per_mwh));
	const BacktestReport tied = rolling_backtest(preset("dalmp-baseline"), train, test, options);
	// Step h scores test hours h-1..167, so ties before hour h-1 drop out.
	bool counts = true;
	for (std::size_t h = 1; h <= 3; ++h) {
		const auto expected = static_cast<std::size_t>(
		    std::count_if(ties.begin(), ties.end(), [h](std::size_t t) { return t >= h - 1; }));
		counts = counts && tied.horizons[h - 1].excluded == expected &&
		         tied.horizons[h - 1].included + expected == 168 - h + 1;
	}
	out.require(counts, "exclusion counts match the constructed ties");
	return out;
}

struct Experiment {
	std::vector<BacktestReport> reports;
	std::string dataset_csv;
	bool means_equal = true;
	bool variances_differ = true;
};

Experiment synthetic_experiment() {
	Experiment e;
	const MarketDataset data = synth_market(SynthConfig::benchmark());
	e.dataset_csv = format_lmp_csv(data);
	const std::size_t test_len = 4 * 168;
	const MarketDataset train = data.slice(0, data.size() - test_len);
	const MarketDataset test = data.slice(data.size() - test_len, test_len);

	BacktestOptions options;
	options.horizon = 3;
	for (const std::string name : {"sarima-paper", "arma-paper", "armax-paper", "arma-paper-garch",
	                               "armax-paper-garch"}) {
		PipelineConfig config = preset(name);
		if (config.kind == PipelineKind::sarima_rtlmp) {
			config.clip = ClipBounds(500.0, -25.0);
		}
		const FittedPipeline fitted = fit_pipeline(config, train);
		options.name = name;
		e.reports.push_back(rolling_backtest(fitted, train, test, options));

		if (config.garch) {
			PipelineConfig plain_config = config;
			plain_config.garch.reset();
			FittedPipeline plain = fitted;
			plain.config = plain_config;
			plain.model->garch_spec.reset();
			plain.model->garch_params.reset();
			const MarketDataset history = data.slice(0, data.size() - 24);
			const HourlySeries dalmp_future = data.dalmp.slice(data.size() - 24, 24);
			const PipelineForecast with = forecast_pipeline(fitted, history, dalmp_future, 24);
			const PipelineForecast without = forecast_pipeline(plain, history, dalmp_future, 24);
			e.means_equal = e.means_equal && with.rtlmp == without.rtlmp;
			e.variances_differ = e.variances_differ && with.variance != without.variance;
		}
	}
	return e;
}

const BacktestReport &find(const Experiment &e, const std::string &name) {
	return *std::find_if(e.reports.begin(), e.reports.end(), [&](const BacktestReport &r) { return r.name == name; });
}

Outcome end_to_end(const Experiment &e, double elapsed) {
	Outcome out;
	auto I = [&](const std::string &name, std::size_t h) { return find(e, name).horizons[h].improvement_pct; };
	for (const std::string name : {"arma-paper", "armax-paper"}) {
		out.require(I(name, 0) > 0.0, name + " I_1 " + fmt("%.2f", I(name, 0)) + "%");
		out.require(I(name, 0) > I(name, 1) && I(name, 1) > I(name, 2),
		            name + " I_2 " + fmt("%.2f", I(name, 1)) + "%, I_3 " + fmt("%.2f", I(name, 2)) + "%");
	}
	out.require(I("sarima-paper", 0) < I("arma-paper", 0), "sarima-paper I_1 " + fmt("%.2f", I("sarima-paper", 0)) + "%");
	bool same_points = find(e, "arma-paper").one_step == find(e, "arma-paper-garch").one_step &&
	                   find(e, "armax-paper").one_step == find(e, "armax-paper-garch").one_step;
	out.require(same_points && e.means_equal, "GARCH leaves point forecasts bit-identical");
	out.require(e.variances_differ, "GARCH changes forecast variances");
	out.require(elapsed < 900.0, "experiment " + fmt("%.1f", elapsed) + " s");
	return out;
}

Outcome determinism(const Experiment &first) {
	Outcome out;
	const Experiment second = synthetic_experiment();
	out.require(first.dataset_csv == second.dataset_csv, "synthetic dataset CSV identical");
	bool reports = first.reports.size() == second.reports.size();
	for (std::size_t i = 0; reports && i < first.reports.size(); ++i) {
		reports = serialize_report(first.reports[i]) == serialize_report(second.reports[i]) &&
		          first.reports[i].one_step == second.reports[i].one_step;
	}
	out.require(reports, "backtest reports identical");
	out.require(compare_models(first.reports).to_csv() == compare_models(second.reports).to_csv(),
	            "comparison table identical");

	const SynthConfig synth = SynthConfig::benchmark();
	ModelSpec base;
	base.constant = true;
	const HourlySeries y = simulate(synth.delta_spec, synth.delta_params, 5000, std::nullopt, 3);
	const GridSelection a = grid_select(y, std::nullopt, {1, 5}, {1, 5}, base, FitOptions{});
	const GridSelection b = grid_select(y, std::nullopt, {1, 5}, {1, 5}, base, FitOptions{});
	out.require(a.table.cells == b.table.cells, "BIC grid identical");

	const HourlySeries eps = simulate_garch(garch11(0.1, 0.1, 0.8), 10000, 4);
	out.require(fit_garch(eps, GarchSpec{1, 1}, FitOptions{}) == fit_garch(eps, GarchSpec{1, 1}, FitOptions{}),
	            "GARCH fit identical");
	return out;
}

} // namespace

int main() {
	int failures = 0;
	auto report = [&](int id, const char *title, const Outcome &o) {
		std::printf("criterion %d %s: %s (%s)\n", id, title, o.pass ? "PASS" : "FAIL", o.detail.c_str());
		std::fflush(stdout);
		failures += o.pass ? 0 : 1;
	};
	auto guarded = [](const std::function<Outcome()> &run) {
		try {
			return run();
		} catch (const std::exception &ex) {
			Outcome o;
			o.require(false, std::string("threw: ") + ex.what());
			return o;
		}
	};

	report(1, "operator algebra", guarded(operator_algebra));
	report(2, "delta identity", guarded(delta_identity));
	report(3, "likelihood oracle", guarded(likelihood_oracle));
	report(4, "parameter recovery", guarded(parameter_recovery));
	report(5, "order selection", guarded(order_selection));
	report(6, "forecast calibration", guarded(forecast_calibration));
	report(7, "metric contract", guarded(metric_contract));

	Experiment experiment;
	const Outcome e2e = guarded([&] {
		const auto t0 = Clock::now();
		experiment = synthetic_experiment();
		return end_to_end(experiment, seconds_since(t0));
	});
	report(8, "end-to-end synthetic", e2e);
	report(9, "determinism", guarded([&] { return determinism(experiment); }));

	std::printf("%d of 9 criteria failed\n", failures);
	return failures == 0 ? 0 : 1;
}
