#include "lmpcast/data_io.hpp"

#include "lmpcast/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace lmpcast {

using namespace std::chrono;

namespace {

constexpr std::string_view kHeader = "timestamp,dalmp,rtlmp";

std::uint64_t splitmix64(std::uint64_t x) {
	x += 0x9e3779b97f4a7c15ULL;
	x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
	x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
	return x ^ (x >> 31);
}

std::string fixed6(double v) {
	char buf[64];
	std::snprintf(buf, sizeof(buf), "%.6f", v);
	return buf;
}

bool parse_int(std::string_view text, int &out) {
	const auto *end = text.data() + text.size();
	auto [ptr, ec] = std::from_chars(text.data(), end, out);
	return ec == std::errc() && ptr == end;
}

double parse_price(std::string_view text, std::size_t line) {
	double v = 0.0;
	const auto *end = text.data() + text.size();
	auto [ptr, ec] = std::from_chars(text.data(), end, v);
	if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
		throw ParseError("malformed price '" + std::string(text) + "'", line);
	}
	return v;
}

struct Row {
	Timestamp time;
	double dalmp;
	double rtlmp;
	int count;
};

} // namespace

MarketDataset::MarketDataset(HourlySeries dalmp_series, HourlySeries rtlmp_series, std::string node_id)
    : dalmp(std::move(dalmp_series)), rtlmp(std::move(rtlmp_series)), node(std::move(node_id)) {
	require_aligned(dalmp, rtlmp, "market dataset");
}

MarketDataset MarketDataset::slice(std::size_t offset, std::size_t count) const {
	return MarketDataset(dalmp.slice(offset, count), rtlmp.slice(offset, count), node);
}

MarketDataset concatenate(const MarketDataset &earlier, const MarketDataset &later) {
	if (earlier.dalmp.end() != later.start()) {
		throw AlignmentError("datasets are not contiguous: first ends " + format_timestamp(earlier.dalmp.end()) +
		                     ", second starts " + format_timestamp(later.start()));
	}
	auto join = [](const HourlySeries &a, const HourlySeries &b) {
		std::vector<double> v(a.values().begin(), a.values().end());
		v.insert(v.end(), b.values().begin(), b.values().end());
		return a.with_values(std::move(v), a.units());
	};
	return MarketDataset(join(earlier.dalmp, later.dalmp), join(earlier.rtlmp, later.rtlmp), earlier.node);
}

GapPolicy parse_gap_policy(std::string_view text) {
	if (text == "reject") {
		return GapPolicy::reject;
	}
	if (text == "forward-fill") {
		return GapPolicy::forward_fill;
	}
	if (text == "interpolate") {
		return GapPolicy::interpolate;
	}
	throw ConfigError("unknown gap policy '" + std::string(text) + "' (reject | forward-fill | interpolate)");
}

std::string_view to_string(GapPolicy policy) {
	switch (policy) {
	case GapPolicy::reject:
		return "reject";
	case GapPolicy::forward_fill:
		return "forward-fill";
	case GapPolicy::interpolate:
		return "interpolate";
	}
	return "reject";
}

Timestamp parse_timestamp(std::string_view text) {
	auto fail = [&]() -> Timestamp {
		throw ParseError("malformed timestamp '" + std::string(text) + "' (expected YYYY-MM-DDTHH:00Z)", 0);
	};
	if (text.size() < 17 || text[4] != '-' || text[7] != '-' || text[10] != 'T' || text[13] != ':') {
		return fail();
	}
	int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
	if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), mo) || !parse_int(text.substr(8, 2), d) ||
	    !parse_int(text.substr(11, 2), h) || !parse_int(text.substr(14, 2), mi)) {
		return fail();
	}
	std::string_view rest = text.substr(16);
	if (!rest.empty() && rest.front() == ':') {
		if (rest.size() < 3 || !parse_int(rest.substr(1, 2), s)) {
			return fail();
		}
		rest = rest.substr(3);
	}
	if (rest != "Z" && rest != "+00:00") {
		return fail();
	}
	const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
	if (!ymd.ok() || h < 0 || h > 23) {
		return fail();
	}
	if (mi != 0 || s != 0) {
		throw ParseError("timestamp '" + std::string(text) + "' is not on a whole hour", 0);
	}
	return Timestamp(sys_days(ymd)) + hours(h);
}

MarketDataset parse_lmp_csv(std::string_view text, const LoadOptions &options) {
	std::vector<Row> rows;
	std::size_t line_no = 0;
	std::size_t pos = 0;
	bool header_seen = false;
	while (pos <= text.size()) {
		std::size_t next = text.find('\n', pos);
		if (next == std::string_view::npos) {
			next = text.size();
		}
		std::string_view line = text.substr(pos, next - pos);
		pos = next + 1;
		++line_no;
		if (!line.empty() && line.back() == '\r') {
			line.remove_suffix(1);
		}
		if (!header_seen) {
			if (line != kHeader) {
				throw SchemaError("expected header '" + std::string(kHeader) + "', got '" + std::string(line) + "'");
			}
			header_seen = true;
			continue;
		}
		if (line.empty()) {
			continue;
		}
		const std::size_t c1 = line.find(',');
		const std::size_t c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
		if (c2 == std::string_view::npos || line.find(',', c2 + 1) != std::string_view::npos) {
			throw ParseError("expected 3 fields", line_no);
		}
		Timestamp ts;
		try {
			ts = parse_timestamp(line.substr(0, c1));
		} catch (const ParseError &e) {
			std::string msg = e.what();
			throw ParseError(msg.substr(msg.find(": ") + 2), line_no);
		}
		const double da = parse_price(line.substr(c1 + 1, c2 - c1 - 1), line_no);
		const double rt = parse_price(line.substr(c2 + 1), line_no);
		if (!rows.empty() && ts == rows.back().time) {
			rows.back().dalmp += da;
			rows.back().rtlmp += rt;
			rows.back().count += 1;
			continue;
		}
		if (!rows.empty() && ts < rows.back().time) {
			throw ParseError("timestamp " + format_timestamp(ts) + " is earlier than the previous row", line_no);
		}
		rows.push_back({ts, da, rt, 1});
	}
	if (!header_seen) {
		throw SchemaError("empty file");
	}
	if (rows.empty()) {
		throw SchemaError("no data rows");
	}

	std::vector<std::string> notes;
	std::vector<double> dalmp, rtlmp;
	dalmp.reserve(rows.size());
	rtlmp.reserve(rows.size());
	for (std::size_t i = 0; i < rows.size(); ++i) {
		Row r = rows[i];
		if (r.count > 1) {
			r.dalmp /= r.count;
			r.rtlmp /= r.count;
			notes.push_back("averaged " + std::to_string(r.count) + " rows for duplicate hour " +
			                format_timestamp(r.time));
		}
		if (i > 0) {
			const Timestamp prev_time = rows[i - 1].time;
			const auto missing = (r.time - prev_time).count() - 1;
			if (missing > 0) {
				if (options.gap_policy == GapPolicy::reject) {
					throw GapError("missing hour " + format_timestamp(prev_time + hours(1)));
				}
				const double da0 = dalmp.back();
				const double rt0 = rtlmp.back();
				for (long k = 1; k <= missing; ++k) {
					if (options.gap_policy == GapPolicy::forward_fill) {
						dalmp.push_back(da0);
						rtlmp.push_back(rt0);
					} else {
						const double w = static_cast<double>(k) / static_cast<double>(missing + 1);
						dalmp.push_back(da0 + w * (r.dalmp - da0));
						rtlmp.push_back(rt0 + w * (r.rtlmp - rt0));
					}
				}
				notes.push_back(std::string(options.gap_policy == GapPolicy::forward_fill ? "forward-filled "
				                                                                          : "interpolated ") +
				                std::to_string(missing) + " missing hour(s) from " +
				                format_timestamp(prev_time + hours(1)));
			}
		}
		dalmp.push_back(r.dalmp);
		rtlmp.push_back(r.rtlmp);
	}
	const Timestamp start = rows.front().time;
	MarketDataset out(HourlySeries(start, std::move(dalmp)), HourlySeries(start, std::move(rtlmp)), options.node);
	out.notes = std::move(notes);
	return out;
}

MarketDataset load_lmp_csv(const std::filesystem::path &path, const LoadOptions &options) {
	LoadOptions opts = options;
	if (opts.node.empty()) {
		opts.node = path.stem().string();
	}
	return parse_lmp_csv(read_text_file(path), opts);
}

std::string format_lmp_csv(const MarketDataset &dataset) {
	std::string out(kHeader);
	out += '\n';
	for (std::size_t t = 0; t < dataset.size(); ++t) {
		out += format_timestamp(dataset.dalmp.time_at(t));
		out += ',';
		out += fixed6(dataset.dalmp[t]);
		out += ',';
		out += fixed6(dataset.rtlmp[t]);
		out += '\n';
	}
	return out;
}

void write_lmp_csv(const std::filesystem::path &path, const MarketDataset &dataset) {
	write_text_file(path, format_lmp_csv(dataset));
}

void SynthConfig::validate() const {
	if (length == 0) {
		throw InvalidParameters("synthetic length must be positive");
	}
	if (!(spike_rate >= 0.0 && spike_rate < 1.0)) {
		throw InvalidParameters("spike rate must lie in [0, 1)");
	}
	if (!(spike_scale >= 0.0)) {
		throw InvalidParameters("spike scale must be non-negative");
	}
	if (delta_spec.exog_count != 0 || dalmp_spec.exog_count != 0) {
		throw InvalidParameters("synthetic generators take no regressors");
	}
	validate_parameters(delta_spec, delta_params);
	validate_parameters(dalmp_spec, dalmp_params);
}

SynthConfig SynthConfig::benchmark() {
	SynthConfig c;
	c.delta_spec.p = 1;
	c.delta_spec.q = 2;
	c.delta_spec.constant = true;
	c.delta_params.phi = {0.5};
	c.delta_params.theta = {-0.4, -0.3};
	c.delta_params.mu = 4.0;
	c.delta_params.sigma2 = 1.0;
	c.weekend_effect = 4.0;
	c.dalmp_spec.p = 1;
	c.dalmp_spec.P = 1;
	c.dalmp_spec.diff = DifferenceSpec(0, 0, 24);
	c.dalmp_spec.constant = true;
	c.dalmp_params.phi = {0.8};
	c.dalmp_params.Phi = {0.7};
	c.dalmp_params.mu = 40.0;
	c.dalmp_params.sigma2 = 4.0;
	c.spike_rate = 0.005;
	c.spike_scale = 30.0;
	c.length = 55 * 168;
	c.start = Timestamp(sys_days(year{2015} / January / 5));
	c.seed = 2016;
	return c;
}

MarketDataset synth_market(const SynthConfig &config) {
	config.validate();
	const std::size_t n = config.length;
	const HourlySeries dalmp =
	    simulate(config.dalmp_spec, config.dalmp_params, n, std::nullopt, splitmix64(config.seed ^ 1), config.start);
	const HourlySeries base =
	    simulate(config.delta_spec, config.delta_params, n, std::nullopt, splitmix64(config.seed ^ 2), config.start);
	const HourlySeries weekday = weekend_indicator(config.start, n);

	std::mt19937_64 rng(splitmix64(config.seed ^ 3));
	std::uniform_real_distribution<double> unit(0.0, 1.0);
	std::exponential_distribution<double> magnitude(config.spike_scale > 0.0 ? 1.0 / config.spike_scale : 1.0);

	std::vector<double> da(n), rt(n);
	for (std::size_t t = 0; t < n; ++t) {
		const double delta = base[t] + config.weekend_effect * weekday[t];
		da[t] = dalmp[t];
		rt[t] = dalmp[t] - delta;
		// Draws happen every hour so the spike stream does not depend on the rate's effect on earlier hours.
		const double u = unit(rng);
		const double sign = unit(rng) < 0.5 ? -1.0 : 1.0;
		const double size = magnitude(rng);
		if (u < config.spike_rate) {
			rt[t] += sign * size;
		}
	}
	return MarketDataset(HourlySeries(config.start, std::move(da)), HourlySeries(config.start, std::move(rt)),
	                     config.node);
}

void export_acf_pacf(const std::filesystem::path &path, const HourlySeries &series, std::size_t max_lag) {
	const std::vector<double> acf = sample_acf(series, max_lag);
	const std::vector<double> pacf = durbin_levinson_pacf(acf);
	const double band = 2.0 / std::sqrt(static_cast<double>(series.size()));
	std::string out = "lag,acf,pacf,band\n";
	char buf[128];
	for (std::size_t k = 0; k <= max_lag; ++k) {
		std::snprintf(buf, sizeof(buf), "%zu,%.6f,%.6f,%.6f\n", k, acf[k], pacf[k], band);
		out += buf;
	}
	write_text_file(path, out);
}

void export_improvement_curve(const std::filesystem::path &path, const std::vector<ImprovementCurve> &curves) {
	std::string out = "horizon";
	std::size_t rows = 0;
	for (const auto &c : curves) {
		out += "," + c.name;
		rows = std::max(rows, c.improvement_pct.size());
	}
	out += '\n';
	char buf[64];
	for (std::size_t h = 0; h < rows; ++h) {
		out += std::to_string(h + 1);
		for (const auto &c : curves) {
			out += ',';
			if (h < c.improvement_pct.size()) {
				std::snprintf(buf, sizeof(buf), "%.4f", c.improvement_pct[h]);
				out += buf;
			}
		}
		out += '\n';
	}
	write_text_file(path, out);
}

void export_forecast_overlay(const std::filesystem::path &path, const std::vector<OverlayRow> &rows) {
	std::string out = "timestamp,actual,forecast,baseline\n";
	for (const auto &r : rows) {
		out += format_timestamp(r.time) + "," + fixed6(r.actual) + "," + fixed6(r.forecast) + "," +
		       fixed6(r.baseline) + "\n";
	}
	write_text_file(path, out);
}

void write_text_file(const std::filesystem::path &path, std::string_view content) {
	std::ofstream f(path, std::ios::binary | std::ios::trunc);
	if (!f) {
		throw IoError("cannot open '" + path.string() + "' for writing");
	}
	f.write(content.data(), static_cast<std::streamsize>(content.size()));
	if (!f) {
		throw IoError("failed writing '" + path.string() + "'");
	}
}

std::string read_text_file(const std::filesystem::path &path) {
	std::ifstream f(path, std::ios::binary);
	if (!f) {
		throw IoError("cannot open '" + path.string() + "'");
	}
	std::ostringstream ss;
	ss << f.rdbuf();
	return ss.str();
}

} // namespace lmpcast
