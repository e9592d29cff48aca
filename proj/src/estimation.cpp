#include "lmpcast/estimation.hpp"

#include "lmpcast/errors.hpp"
#include "lmpcast/optimizer.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace lmpcast {

namespace {

// Keeps every optimizer point a strict distance inside the stationarity region so re-validation
// with the 1e-8 root tolerance always succeeds.
constexpr double kPacfScale = 0.9999;
constexpr double kPacfBoundary = 0.999;
constexpr double kGarchBoundary = 1e-4;
// Keeps decoded persistence strictly below 1 in floating point.
constexpr double kPersistenceScale = 0.9999;
constexpr double kJitter = 0.5;
constexpr std::size_t kMinGarchLength = 100;

double to_unconstrained(double r) {
	return std::atanh(std::clamp(r / kPacfScale, -0.9, 0.9));
}

struct ArmaCoefficients {
	std::vector<double> phi, Phi, theta, Theta;
	std::vector<double> pacf;
};

ArmaCoefficients decode(const ModelSpec &spec, const std::vector<double> &z) {
	ArmaCoefficients out;
	std::size_t offset = 0;
	auto take = [&](std::size_t count) {
		std::span<const double> block(z.data() + offset, count);
		offset += count;
		for (double v : block) {
			out.pacf.push_back(kPacfScale * std::tanh(v));
		}
		return constrained_coefficients(block);
	};
	out.phi = take(spec.p);
	out.Phi = take(spec.P);
	out.theta = take(spec.q);
	out.Theta = take(spec.Q);
	return out;
}

std::vector<std::string> arma_boundary_flags(const ModelSpec &spec, const ArmaCoefficients &c) {
	std::vector<std::string> flags;
	std::size_t k = 0;
	auto check = [&](const char *name, std::size_t count) {
		for (std::size_t i = 0; i < count; ++i, ++k) {
			if (std::abs(c.pacf[k]) > kPacfBoundary) {
				flags.push_back(std::string(name) + "[" + std::to_string(i + 1) + "]");
			}
		}
	};
	check("phi", spec.p);
	check("Phi", spec.P);
	check("theta", spec.q);
	check("Theta", spec.Q);
	return flags;
}

// Concentrated objective: for fixed ARMA coefficients the residuals are affine in (mu, gamma), so
// those are solved by least squares and sigma2 = SSR / m.
class ArmaObjective {
public:
	ArmaObjective(const ArmaObjective &) = delete;
	ArmaObjective &operator=(const ArmaObjective &) = delete;

	ArmaObjective(const ModelSpec &spec, const detail::WorkingData &data) : spec_(spec), data_(data) {
		m_ = data_.target.size();
		if (spec_.constant) {
			design_.emplace_back(m_, 1.0);
		}
		for (const auto &col : data_.regressors) {
			design_.push_back(col);
		}
		filtered_target_.resize(m_);
		filtered_design_ = Eigen::MatrixXd(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(design_.size()));
		inputs_.emplace_back(data_.target);
		outputs_.emplace_back(filtered_target_);
		for (std::size_t j = 0; j < design_.size(); ++j) {
			inputs_.emplace_back(design_[j]);
			outputs_.emplace_back(filtered_design_.col(static_cast<Eigen::Index>(j)).data(), m_);
		}
	}

	struct Evaluation {
		double ssr;
		std::vector<double> beta;
	};

	Evaluation evaluate(const ArmaCoefficients &c) {
		ParameterVector pv;
		pv.phi = c.phi;
		pv.Phi = c.Phi;
		pv.theta = c.theta;
		pv.Theta = c.Theta;
		const detail::SparseTerms ar(ar_polynomial(spec_, pv));
		const detail::SparseTerms ma(ma_polynomial(spec_, pv));
		const auto k = static_cast<Eigen::Index>(design_.size());
		Evaluation out{0.0, {}};
		const auto mi = static_cast<Eigen::Index>(m_);
		if (k == 0) {
			detail::filter_residuals(ar, ma, data_.target, filtered_target_);
			out.ssr = Eigen::Map<const Eigen::VectorXd>(filtered_target_.data(), mi).squaredNorm();
			return out;
		}
		detail::filter_residuals(ar, ma, inputs_, outputs_);
		Eigen::Map<const Eigen::VectorXd> f(filtered_target_.data(), mi);
		gram_.noalias() = filtered_design_.transpose() * filtered_design_;
		cross_.noalias() = filtered_design_.transpose() * f;
		Eigen::VectorXd beta = gram_.ldlt().solve(cross_);
		if (!beta.allFinite()) {
			beta = filtered_design_.colPivHouseholderQr().solve(f);
		}
		out.ssr = (f - filtered_design_ * beta).squaredNorm();
		out.beta.assign(beta.data(), beta.data() + beta.size());
		return out;
	}

	double operator()(const std::vector<double> &z) {
		const double ssr = evaluate(decode(spec_, z)).ssr;
		const double sigma2 = ssr / static_cast<double>(m_);
		if (!(sigma2 > 0.0)) {
			return std::numeric_limits<double>::infinity();
		}
		return 0.5 * (std::log(2.0 * std::numbers::pi * sigma2) + 1.0);
	}

	std::size_t size() const {
		return m_;
	}
	const std::vector<std::vector<double>> &design() const {
		return design_;
	}

private:
	const ModelSpec &spec_;
	const detail::WorkingData &data_;
	std::size_t m_ = 0;
	std::vector<std::vector<double>> design_;
	std::vector<double> filtered_target_;
	Eigen::MatrixXd filtered_design_;
	std::vector<std::span<const double>> inputs_;
	std::vector<std::span<double>> outputs_;
	Eigen::MatrixXd gram_;
	Eigen::VectorXd cross_;
};

// AR block from the sample PACF of OLS-detrended working data; everything else starts at zero.
std::vector<double> starting_point(const ModelSpec &spec, const detail::WorkingData &data,
                                   const std::vector<std::vector<double>> &design) {
	std::vector<double> z(spec.arma_parameter_count(), 0.0);
	if (spec.p == 0) {
		return z;
	}
	const std::size_t m = data.target.size();
	Eigen::Map<const Eigen::VectorXd> w(data.target.data(), static_cast<Eigen::Index>(m));
	Eigen::VectorXd resid = w;
	if (!design.empty()) {
		Eigen::MatrixXd g(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(design.size()));
		for (std::size_t j = 0; j < design.size(); ++j) {
			g.col(static_cast<Eigen::Index>(j)) =
			    Eigen::Map<const Eigen::VectorXd>(design[j].data(), static_cast<Eigen::Index>(m));
		}
		resid = w - g * g.colPivHouseholderQr().solve(w);
	}
	try {
		const std::vector<double> values(resid.data(), resid.data() + resid.size());
		const std::vector<double> pacf = sample_pacf(values, std::min(spec.p, m - 1));
		for (std::size_t i = 1; i < pacf.size(); ++i) {
			z[i - 1] = to_unconstrained(pacf[i]);
		}
	} catch (const DegenerateSeries &) {
	}
	return z;
}

std::vector<GarchParams> garch_starts(const GarchSpec &gspec, double variance) {
	auto make = [&](double alpha_total, double beta_total) {
		GarchParams g;
		g.alpha.assign(gspec.p, alpha_total / static_cast<double>(gspec.p));
		if (gspec.q > 0) {
			g.beta.assign(gspec.q, beta_total / static_cast<double>(gspec.q));
		}
		g.alpha0 = variance * (1.0 - g.persistence());
		return g;
	};
	// A high-persistence start, typical of volatility clustering, and a near-homoskedastic one.
	return {make(0.1, gspec.q > 0 ? 0.8 : 0.0), make(0.05, gspec.q > 0 ? 0.05 : 0.0)};
}

std::vector<double> garch_encode(const GarchParams &g) {
	const double rest = 1.0 - g.persistence() / kPersistenceScale;
	std::vector<double> z{std::log(g.alpha0)};
	for (double a : g.alpha) {
		z.push_back(std::log(a / kPersistenceScale / rest));
	}
	for (double b : g.beta) {
		z.push_back(std::log(b / kPersistenceScale / rest));
	}
	return z;
}

GarchParams garch_decode(const GarchSpec &gspec, const std::vector<double> &z) {
	GarchParams g;
	g.alpha0 = std::exp(z[0]);
	double denom = 1.0;
	for (std::size_t k = 1; k < z.size(); ++k) {
		denom += std::exp(z[k]);
	}
	for (std::size_t i = 0; i < gspec.p; ++i) {
		g.alpha.push_back(kPersistenceScale * std::exp(z[1 + i]) / denom);
	}
	for (std::size_t j = 0; j < gspec.q; ++j) {
		g.beta.push_back(kPersistenceScale * std::exp(z[1 + gspec.p + j]) / denom);
	}
	return g;
}

struct MultiStartResult {
	std::vector<double> x;
	double value = std::numeric_limits<double>::infinity();
	std::size_t evaluations = 0;
	bool converged = false;
};

// Each start is run to convergence; strict improvement is required to replace an earlier start. The
// winner is then restarted once from its end point, which guards against simplex collapse.
template <class Objective>
MultiStartResult multi_start(Objective &objective, const std::vector<std::vector<double>> &starts,
                             const FitOptions &options) {
	std::mt19937_64 rng(options.seed);
	std::normal_distribution<double> jitter(0.0, kJitter);
	std::vector<std::vector<double>> all = starts;
	for (std::size_t r = 0; r < options.restarts; ++r) {
		std::vector<double> z = starts.front();
		for (double &v : z) {
			v += jitter(rng);
		}
		all.push_back(std::move(z));
	}
	const SimplexOptions simplex{options.max_iterations, options.tolerance, 0.1};
	auto fn = [&](const std::vector<double> &z) { return objective(z); };
	MultiStartResult best;
	for (const auto &start : all) {
		SimplexResult run = nelder_mead(fn, start, simplex);
		best.evaluations += run.evaluations;
		if (run.value < best.value) {
			best.x = std::move(run.x);
			best.value = run.value;
		}
	}
	if (!best.x.empty()) {
		// A fresh simplex around the winner guards against premature collapse.
		SimplexResult polished = nelder_mead(fn, best.x, simplex);
		best.evaluations += polished.evaluations;
		best.converged = polished.converged;
		if (polished.value <= best.value) {
			best.x = std::move(polished.x);
			best.value = polished.value;
		}
	}
	return best;
}

ModelSpec with_orders(const ModelSpec &base, std::size_t p, std::size_t q) {
	ModelSpec spec = base;
	spec.p = p;
	spec.q = q;
	return spec;
}

struct CellOutcome {
	std::optional<double> bic;
	std::string failure;
};

CellOutcome fit_cell(const HourlySeries &series, const std::optional<ExogenousMatrix> &exog, const ModelSpec &spec,
                     const FitOptions &options) {
	try {
		return {fit(spec, series, exog, options).bic, {}};
	} catch (const Error &e) {
		return {std::nullopt, spec.describe() + ": " + e.what()};
	}
}

GridSelection assemble_grid(OrderRange p_range, OrderRange q_range, const ModelSpec &base,
                            std::vector<CellOutcome> outcomes) {
	BicTable table;
	for (std::size_t p = p_range.lo; p <= p_range.hi; ++p) {
		table.p_values.push_back(p);
	}
	for (std::size_t q = q_range.lo; q <= q_range.hi; ++q) {
		table.q_values.push_back(q);
	}
	for (auto &cell : outcomes) {
		table.cells.push_back(cell.bic);
		if (!cell.bic) {
			table.failures.push_back(std::move(cell.failure));
		}
	}
	const GridChoice choice = select_min_bic(table);
	return {with_orders(base, choice.p, choice.q), std::move(table), choice};
}

void check_ranges(OrderRange p_range, OrderRange q_range) {
	if (p_range.lo > p_range.hi || q_range.lo > q_range.hi) {
		throw InvalidParameters("grid ranges must be non-empty");
	}
}

} // namespace

void FitOptions::validate() const {
	if (max_iterations < 100) {
		throw InvalidParameters("max_iterations must be at least 100");
	}
	if (!(tolerance > 0.0) || tolerance > 1e-6) {
		throw InvalidParameters("tolerance must lie in (0, 1e-6]");
	}
}

std::vector<double> constrained_coefficients(std::span<const double> unconstrained) {
	const std::size_t n = unconstrained.size();
	std::vector<double> phi(n, 0.0), prev(n, 0.0);
	for (std::size_t k = 0; k < n; ++k) {
		const double r = kPacfScale * std::tanh(unconstrained[k]);
		for (std::size_t j = 0; j < k; ++j) {
			phi[j] = prev[j] - r * prev[k - 1 - j];
		}
		phi[k] = r;
		prev = phi;
	}
	return phi;
}

double bic(double loglik, std::size_t k, std::size_t n) {
	if (n < 1) {
		throw InvalidParameters("BIC needs n >= 1");
	}
	return -2.0 * loglik + static_cast<double>(k) * std::log(static_cast<double>(n));
}

FittedModel fit(const ModelSpec &spec, const HourlySeries &series, const std::optional<ExogenousMatrix> &exog,
                const FitOptions &options) {
	options.validate();
	const detail::WorkingData data = detail::prepare_working(spec, series, exog);
	ArmaObjective objective(spec, data);

	const std::vector<double> start = starting_point(spec, data, objective.design());
	const MultiStartResult best = multi_start(objective, {start}, options);
	if (!std::isfinite(best.value)) {
		throw EstimationFailed(spec.describe() + ": no start reached a finite likelihood");
	}

	const ArmaCoefficients coeffs = decode(spec, best.x);
	const auto eval = objective.evaluate(coeffs);
	ParameterVector params;
	params.phi = coeffs.phi;
	params.Phi = coeffs.Phi;
	params.theta = coeffs.theta;
	params.Theta = coeffs.Theta;
	std::size_t j = 0;
	if (spec.constant) {
		params.mu = eval.beta[j++];
	}
	params.gamma.assign(eval.beta.begin() + static_cast<std::ptrdiff_t>(j), eval.beta.end());
	params.sigma2 = eval.ssr / static_cast<double>(objective.size());
	if (!(params.sigma2 > 0.0)) {
		throw EstimationFailed(spec.describe() + ": zero residual variance");
	}

	double loglik = 0.0;
	try {
		loglik = log_likelihood(spec, params, series, exog);
	} catch (const UnstableParameters &e) {
		throw EstimationFailed(spec.describe() + ": " + e.what());
	}
	const std::size_t n_eff = objective.size();
	FitDiagnostics diag{best.converged, best.evaluations, arma_boundary_flags(spec, coeffs)};
	return FittedModel{spec,
	                   params,
	                   loglik,
	                   bic(loglik, spec.parameter_count(), n_eff),
	                   n_eff,
	                   residuals(spec, params, series, exog),
	                   std::nullopt,
	                   std::nullopt,
	                   std::move(diag)};
}

GridChoice select_min_bic(const BicTable &table) {
	std::optional<GridChoice> best;
	for (std::size_t i = 0; i < table.p_values.size(); ++i) {
		for (std::size_t j = 0; j < table.q_values.size(); ++j) {
			const auto &cell = table.at(i, j);
			if (!cell) {
				continue;
			}
			const GridChoice c{table.p_values[i], table.q_values[j], *cell};
			const bool better = !best || c.bic < best->bic ||
			                    (c.bic == best->bic && (c.p + c.q < best->p + best->q ||
			                                            (c.p + c.q == best->p + best->q && c.q < best->q)));
			if (better) {
				best = c;
			}
		}
	}
	if (!best) {
		throw EstimationFailed("every grid cell failed to fit");
	}
	return *best;
}

GridSelection grid_select(const HourlySeries &series, const std::optional<ExogenousMatrix> &exog, OrderRange p_range,
                          OrderRange q_range, const ModelSpec &base, const FitOptions &options) {
	check_ranges(p_range, q_range);
	const std::size_t nq = q_range.hi - q_range.lo + 1;
	const std::size_t cells = (p_range.hi - p_range.lo + 1) * nq;
	std::vector<CellOutcome> outcomes(cells);
#pragma omp parallel for schedule(dynamic)
	for (std::size_t idx = 0; idx < cells; ++idx) {
		const ModelSpec spec = with_orders(base, p_range.lo + idx / nq, q_range.lo + idx % nq);
		outcomes[idx] = fit_cell(series, exog, spec, options);
	}
	return assemble_grid(p_range, q_range, base, std::move(outcomes));
}

GridSelection grid_select_reference(const HourlySeries &series, const std::optional<ExogenousMatrix> &exog,
                                    OrderRange p_range, OrderRange q_range, const ModelSpec &base,
                                    const FitOptions &options) {
	check_ranges(p_range, q_range);
	std::vector<CellOutcome> outcomes;
	for (std::size_t p = p_range.lo; p <= p_range.hi; ++p) {
		for (std::size_t q = q_range.lo; q <= q_range.hi; ++q) {
			outcomes.push_back(fit_cell(series, exog, with_orders(base, p, q), options));
		}
	}
	return assemble_grid(p_range, q_range, base, std::move(outcomes));
}

GarchParams fit_garch(const HourlySeries &residuals, const GarchSpec &gspec, const FitOptions &options) {
	gspec.validate();
	options.validate();
	if (residuals.size() < kMinGarchLength) {
		throw SeriesTooShort("GARCH estimation needs at least " + std::to_string(kMinGarchLength) + " residuals");
	}
	const double variance = presample_variance(residuals);
	if (!(variance > 0.0)) {
		throw EstimationFailed("GARCH estimation on residuals with zero variance");
	}
	const auto eps = residuals.values();
	const double n = static_cast<double>(eps.size());
	auto objective = [&](const std::vector<double> &z) {
		return -detail::garch_loglik(garch_decode(gspec, z), eps, variance) / n;
	};
	std::vector<std::vector<double>> starts;
	for (const auto &g : garch_starts(gspec, variance)) {
		starts.push_back(garch_encode(g));
	}
	const MultiStartResult best = multi_start(objective, starts, options);
	if (!std::isfinite(best.value)) {
		throw EstimationFailed("GARCH likelihood is not finite at any start");
	}
	GarchParams out = garch_decode(gspec, best.x);
	try {
		out.validate();
	} catch (const InvalidParameters &e) {
		throw EstimationFailed(std::string("GARCH estimate invalid: ") + e.what());
	}
	// With no ARCH effect the beta terms are not identified (the likelihood is flat along
	// alpha0 / (1 - beta)), so a fit that does not beat constant variance on BIC is reported as
	// the constant-variance point.
	GarchParams flat;
	flat.alpha0 = 0.0;
	for (double e : eps) {
		flat.alpha0 += e * e;
	}
	flat.alpha0 /= n;
	flat.alpha.assign(gspec.p, 0.0);
	flat.beta.assign(gspec.q, 0.0);
	const double gain = detail::garch_loglik(out, eps, variance) - detail::garch_loglik(flat, eps, variance);
	const double penalty = 0.5 * static_cast<double>(gspec.p + gspec.q) * std::log(n);
	if (gain < penalty) {
		return flat;
	}
	return out;
}

FittedModel attach_garch(const FittedModel &arma_fit, const GarchSpec &gspec, const FitOptions &options) {
	FittedModel out = arma_fit;
	GarchParams g = fit_garch(arma_fit.residuals, gspec, options);
	for (std::size_t i = 0; i < g.alpha.size(); ++i) {
		if (g.alpha[i] < kGarchBoundary) {
			out.diagnostics.boundary.push_back("garch.alpha[" + std::to_string(i + 1) + "]");
		}
	}
	for (std::size_t j = 0; j < g.beta.size(); ++j) {
		if (g.beta[j] < kGarchBoundary) {
			out.diagnostics.boundary.push_back("garch.beta[" + std::to_string(j + 1) + "]");
		}
	}
	out.garch_spec = gspec;
	out.garch_params = std::move(g);
	return out;
}

ForecastResult forecast(const FittedModel &model, const HourlySeries &history,
                        const std::optional<ExogenousMatrix> &exog_history,
                        const std::optional<ExogenousMatrix> &exog_future, std::size_t horizon) {
	std::vector<double> eps;
	ForecastResult out = forecast(model.spec, model.params, history, exog_history, exog_future, horizon, eps);
	if (!model.garch_params) {
		return out;
	}
	const HourlySeries resid(history.end() - std::chrono::hours(static_cast<long>(eps.size())), std::move(eps),
	                         Units::dimensionless);
	const std::vector<double> path = forecast_variance(*model.garch_params, resid, horizon);
	const std::vector<double> psi = psi_weights(model.spec, model.params, horizon);
	for (std::size_t h = 0; h < horizon; ++h) {
		double v = 0.0;
		for (std::size_t j = 0; j <= h; ++j) {
			v += psi[j] * psi[j] * path[h - j];
		}
		out.variance[h] = v;
	}
	return out;
}

} // namespace lmpcast
