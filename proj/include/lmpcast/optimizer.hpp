#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace lmpcast {

struct SimplexResult {
	std::vector<double> x;
	double value;
	std::size_t evaluations;
	bool converged;
};

struct SimplexOptions {
	std::size_t max_evaluations = 5000;
	// Stop when max f - min f over the simplex falls below this.
	double tolerance = 1e-10;
	double initial_step = 0.1;
};

// Nelder-Mead minimization (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
// Non-finite objective values are treated as +inf.
SimplexResult nelder_mead(const std::function<double(const std::vector<double> &)> &objective,
                          std::vector<double> start, const SimplexOptions &options);

} // namespace lmpcast
