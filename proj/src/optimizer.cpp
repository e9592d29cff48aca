#include "lmpcast/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace lmpcast {

SimplexResult nelder_mead(const std::function<double(const std::vector<double> &)> &objective,
                          std::vector<double> start, const SimplexOptions &options) {
	const std::size_t dim = start.size();
	std::size_t evaluations = 0;
	auto eval = [&](const std::vector<double> &x) {
		++evaluations;
		const double v = objective(x);
		return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
	};
	if (dim == 0) {
		const double v = eval(start);
		return {std::move(start), v, evaluations, true};
	}

	std::vector<std::vector<double>> simplex(dim + 1, start);
	for (std::size_t i = 0; i < dim; ++i) {
		const double step = start[i] != 0.0 ? options.initial_step * std::max(1.0, std::abs(start[i]))
		                                    : options.initial_step;
		simplex[i + 1][i] += step;
	}
	std::vector<double> values(dim + 1);
	for (std::size_t i = 0; i <= dim; ++i) {
		values[i] = eval(simplex[i]);
	}

	std::vector<std::size_t> order(dim + 1);
	std::vector<double> centroid(dim), trial(dim), trial2(dim);
	auto blend = [&](double t, const std::vector<double> &from, std::vector<double> &out) {
		// out = centroid + t * (centroid - from)
		for (std::size_t k = 0; k < dim; ++k) {
			out[k] = centroid[k] + t * (centroid[k] - from[k]);
		}
	};

	bool converged = false;
	while (evaluations < options.max_evaluations) {
		std::iota(order.begin(), order.end(), std::size_t{0});
		std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
		const std::size_t best = order.front();
		const std::size_t worst = order.back();
		const std::size_t second = order[dim - 1];
		if (std::isfinite(values[worst]) && values[worst] - values[best] < options.tolerance) {
			converged = true;
			break;
		}

		std::fill(centroid.begin(), centroid.end(), 0.0);
		for (std::size_t i = 0; i <= dim; ++i) {
			if (i == worst) {
				continue;
			}
			for (std::size_t k = 0; k < dim; ++k) {
				centroid[k] += simplex[i][k];
			}
		}
		for (double &c : centroid) {
			c /= static_cast<double>(dim);
		}

		blend(1.0, simplex[worst], trial);
		const double reflected = eval(trial);
		if (reflected < values[best]) {
			blend(2.0, simplex[worst], trial2);
			const double expanded = eval(trial2);
			if (expanded < reflected) {
				simplex[worst] = trial2;
				values[worst] = expanded;
			} else {
				simplex[worst] = trial;
				values[worst] = reflected;
			}
			continue;
		}
		if (reflected < values[second]) {
			simplex[worst] = trial;
			values[worst] = reflected;
			continue;
		}
		if (reflected < values[worst]) {
			blend(0.5, simplex[worst], trial2);
			const double contracted = eval(trial2);
			if (contracted <= reflected) {
				simplex[worst] = trial2;
				values[worst] = contracted;
				continue;
			}
		} else {
			blend(-0.5, simplex[worst], trial2);
			const double contracted = eval(trial2);
			if (contracted < values[worst]) {
				simplex[worst] = trial2;
				values[worst] = contracted;
				continue;
			}
		}
		for (std::size_t i = 0; i <= dim; ++i) {
			if (i == best) {
				continue;
			}
			for (std::size_t k = 0; k < dim; ++k) {
				simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
			}
			values[i] = eval(simplex[i]);
		}
	}

	const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
	return {simplex[best], values[best], evaluations, converged};
}

} // namespace lmpcast
