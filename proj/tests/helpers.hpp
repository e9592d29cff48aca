#pragma once

#include "lmpcast/series.hpp"

#include <chrono>
#include <vector>

namespace testing {

using namespace std::chrono;

inline lmpcast::Timestamp at(int y, unsigned m, unsigned d, int h = 0) {
	return sys_days{year{y} / month{m} / day{d}} + hours{h};
}

// Monday 2015-01-05 00:00 UTC.
inline const lmpcast::Timestamp kMonday = at(2015, 1, 5);

inline lmpcast::HourlySeries hourly(std::vector<double> values, lmpcast::Timestamp start = kMonday,
                                    lmpcast::Units units = lmpcast::Units::dollars_per_mwh) {
	return lmpcast::HourlySeries(start, std::move(values), units);
}

inline std::vector<double> to_vector(const lmpcast::HourlySeries &s) {
	return {s.values().begin(), s.values().end()};
}

} // namespace testing
