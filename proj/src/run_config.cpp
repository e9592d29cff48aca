#include "lmpcast/run_config.hpp"

#include "lmpcast/errors.hpp"

#include <charconv>
#include <cstdio>
#include <map>
#include <set>

namespace lmpcast {

namespace {

const std::vector<std::string> &known_keys() {
	static const std::vector<std::string> keys{
	    "preset",          "pipeline",          "clip_upper",        "clip_lower",        "log_offset",
	    "order",           "seasonal_order",    "season",            "constant",          "garch",
	    "lognormal_correction", "grid_p",       "grid_q",            "train_start",       "train_hours",
	    "test_start",      "test_hours",        "horizon",           "refit_every",       "seed",
	    "restarts",        "max_iterations",    "tolerance",         "gap_policy",        "epsilon",
	    "name",            "series",            "max_lag",           "synth_length",      "synth_start",
	    "synth_spike_rate", "synth_spike_scale", "synth_weekend_effect", "synth_delta_mean",
	    "synth_delta_sigma2", "synth_dalmp_mean", "synth_dalmp_sigma2"};
	return keys;
}

std::string trim(std::string_view s) {
	const auto b = s.find_first_not_of(" \t\r");
	if (b == std::string_view::npos) {
		return {};
	}
	const auto e = s.find_last_not_of(" \t\r");
	return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string &key, const std::string &v) {
	double out = 0.0;
	auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
	if (ec != std::errc() || ptr != v.data() + v.size()) {
		throw ConfigError(key + ": expected a number, got '" + v + "'");
	}
	return out;
}

std::uint64_t to_count(const std::string &key, const std::string &v) {
	std::uint64_t out = 0;
	auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
	if (ec != std::errc() || ptr != v.data() + v.size()) {
		throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
	}
	return out;
}

bool to_bool(const std::string &key, const std::string &v) {
	if (v == "true" || v == "yes" || v == "1") {
		return true;
	}
	if (v == "false" || v == "no" || v == "0") {
		return false;
	}
	throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::vector<std::size_t> to_triple(const std::string &key, const std::string &v, std::size_t count, char sep) {
	std::vector<std::size_t> out;
	std::size_t start = 0;
	while (true) {
		const std::size_t end = v.find(sep, start);
		out.push_back(to_count(key, trim(std::string_view(v).substr(start, end - start))));
		if (end == std::string::npos) {
			break;
		}
		start = end + 1;
	}
	if (out.size() != count) {
		throw ConfigError(key + ": expected " + std::to_string(count) + " values separated by '" + sep + "'");
	}
	return out;
}

std::string num(double v) {
	char buf[64];
	std::snprintf(buf, sizeof(buf), "%.10g", v);
	return buf;
}

void apply_key(RunConfig &c, const std::string &key, const std::string &v) {
	PipelineConfig &p = c.pipeline;
	try {
		if (key == "pipeline") {
			p.kind = parse_pipeline_kind(v);
			const bool reg = p.kind == PipelineKind::sarimax_rtlmp || p.kind == PipelineKind::armax_delta;
			p.spec.exog_count = reg ? 1 : 0;
		} else if (key == "clip_upper" || key == "clip_lower") {
			if (v == "none") {
				p.clip.reset();
				return;
			}
			const double x = to_double(key, v);
			const double upper = key == "clip_upper" ? x : (p.clip ? p.clip->upper : 1e300);
			const double lower = key == "clip_lower" ? x : (p.clip ? p.clip->lower : -1e300);
			p.clip = ClipBounds(upper, lower);
		} else if (key == "log_offset") {
			if (v == "none") {
				p.offset.reset();
			} else {
				p.offset = LogOffset(to_double(key, v));
			}
		} else if (key == "order") {
			const auto t = to_triple(key, v, 3, ',');
			p.spec.p = t[0];
			p.spec.diff.d = t[1];
			p.spec.q = t[2];
		} else if (key == "seasonal_order") {
			const auto t = to_triple(key, v, 3, ',');
			p.spec.P = t[0];
			p.spec.diff.D = t[1];
			p.spec.Q = t[2];
		} else if (key == "season") {
			p.spec.diff.S = to_count(key, v);
		} else if (key == "constant") {
			p.spec.constant = to_bool(key, v);
		} else if (key == "garch") {
			if (v == "none") {
				p.garch.reset();
			} else {
				const auto t = to_triple(key, v, 2, ',');
				p.garch = GarchSpec{t[0], t[1]};
			}
		} else if (key == "lognormal_correction") {
			p.lognormal_correction = to_bool(key, v);
		} else if (key == "grid_p" || key == "grid_q") {
			const auto t = to_triple(key, v, 2, '-');
			(key == "grid_p" ? c.grid_p : c.grid_q) = OrderRange{t[0], t[1]};
		} else if (key == "train_start") {
			c.train_start = v == "auto" ? std::nullopt : std::optional<Timestamp>(parse_timestamp(v));
		} else if (key == "train_hours") {
			c.train_hours = to_count(key, v);
		} else if (key == "test_start") {
			c.test_start = v == "auto" ? std::nullopt : std::optional<Timestamp>(parse_timestamp(v));
		} else if (key == "test_hours") {
			c.test_hours = to_count(key, v);
		} else if (key == "horizon") {
			c.horizon = to_count(key, v);
		} else if (key == "refit_every") {
			c.refit_every = to_count(key, v);
		} else if (key == "seed") {
			c.set_seed(to_count(key, v));
		} else if (key == "restarts") {
			p.fit_options.restarts = to_count(key, v);
		} else if (key == "max_iterations") {
			p.fit_options.max_iterations = to_count(key, v);
		} else if (key == "tolerance") {
			p.fit_options.tolerance = to_double(key, v);
		} else if (key == "gap_policy") {
			c.gap_policy = parse_gap_policy(v);
		} else if (key == "epsilon") {
			c.epsilon = to_double(key, v);
		} else if (key == "name") {
			c.name = v;
		} else if (key == "series") {
			if (v != "rtlmp" && v != "dalmp" && v != "delta") {
				throw ConfigError("series: expected rtlmp, dalmp or delta");
			}
			c.series = v;
		} else if (key == "max_lag") {
			c.max_lag = to_count(key, v);
		} else if (key == "synth_length") {
			c.synth.length = to_count(key, v);
		} else if (key == "synth_start") {
			c.synth.start = parse_timestamp(v);
		} else if (key == "synth_spike_rate") {
			c.synth.spike_rate = to_double(key, v);
		} else if (key == "synth_spike_scale") {
			c.synth.spike_scale = to_double(key, v);
		} else if (key == "synth_weekend_effect") {
			c.synth.weekend_effect = to_double(key, v);
		} else if (key == "synth_delta_mean") {
			c.synth.delta_params.mu = to_double(key, v);
		} else if (key == "synth_delta_sigma2") {
			c.synth.delta_params.sigma2 = to_double(key, v);
		} else if (key == "synth_dalmp_mean") {
			c.synth.dalmp_params.mu = to_double(key, v);
		} else if (key == "synth_dalmp_sigma2") {
			c.synth.dalmp_params.sigma2 = to_double(key, v);
		}
	} catch (const ConfigError &) {
		throw;
	} catch (const Error &e) {
		throw ConfigError(key + ": " + e.what());
	}
}

} // namespace

RunConfig::RunConfig() : preset("arma-paper"), pipeline(lmpcast::preset("arma-paper")) {
}

void RunConfig::set_seed(std::uint64_t seed) {
	pipeline.fit_options.seed = seed;
	synth.seed = seed;
}

std::string RunConfig::label() const {
	if (!name.empty()) {
		return name;
	}
	if (!preset.empty()) {
		return preset;
	}
	return std::string(to_string(pipeline.kind));
}

std::string RunConfig::echo() const {
	const PipelineConfig &p = pipeline;
	const ModelSpec &s = p.spec;
	std::string out;
	auto line = [&](const std::string &k, const std::string &v) { out += k + " = " + v + "\n"; };
	line("preset", preset.empty() ? "none" : preset);
	line("pipeline", std::string(to_string(p.kind)));
	line("clip_upper", p.clip ? num(p.clip->upper) : "none");
	line("clip_lower", p.clip ? num(p.clip->lower) : "none");
	line("log_offset", p.offset ? num(p.offset->c) : "none");
	line("order", std::to_string(s.p) + "," + std::to_string(s.diff.d) + "," + std::to_string(s.q));
	line("seasonal_order", std::to_string(s.P) + "," + std::to_string(s.diff.D) + "," + std::to_string(s.Q));
	line("season", std::to_string(s.diff.S));
	line("constant", s.constant ? "true" : "false");
	line("garch", p.garch ? std::to_string(p.garch->p) + "," + std::to_string(p.garch->q) : "none");
	line("lognormal_correction", p.lognormal_correction ? "true" : "false");
	line("grid_p", std::to_string(grid_p.lo) + "-" + std::to_string(grid_p.hi));
	line("grid_q", std::to_string(grid_q.lo) + "-" + std::to_string(grid_q.hi));
	line("train_start", train_start ? format_timestamp(*train_start) : "auto");
	line("train_hours", std::to_string(train_hours));
	line("test_start", test_start ? format_timestamp(*test_start) : "auto");
	line("test_hours", std::to_string(test_hours));
	line("horizon", std::to_string(horizon));
	line("refit_every", std::to_string(refit_every));
	line("seed", std::to_string(p.fit_options.seed));
	line("restarts", std::to_string(p.fit_options.restarts));
	line("max_iterations", std::to_string(p.fit_options.max_iterations));
	line("tolerance", num(p.fit_options.tolerance));
	line("gap_policy", std::string(to_string(gap_policy)));
	line("epsilon", num(epsilon));
	line("name", label());
	line("series", series);
	line("max_lag", std::to_string(max_lag));
	line("synth_length", std::to_string(synth.length));
	line("synth_start", format_timestamp(synth.start));
	line("synth_spike_rate", num(synth.spike_rate));
	line("synth_spike_scale", num(synth.spike_scale));
	line("synth_weekend_effect", num(synth.weekend_effect));
	line("synth_delta_mean", num(synth.delta_params.mu));
	line("synth_delta_sigma2", num(synth.delta_params.sigma2));
	line("synth_dalmp_mean", num(synth.dalmp_params.mu));
	line("synth_dalmp_sigma2", num(synth.dalmp_params.sigma2));
	return out;
}

RunConfig parse_run_config(std::string_view text) {
	std::map<std::string, std::string> values;
	std::vector<std::string> order;
	const std::set<std::string> known(known_keys().begin(), known_keys().end());
	std::size_t pos = 0, line_no = 0;
	while (pos < text.size()) {
		std::size_t next = text.find('\n', pos);
		if (next == std::string_view::npos) {
			next = text.size();
		}
		std::string_view raw = text.substr(pos, next - pos);
		pos = next + 1;
		++line_no;
		if (const auto hash = raw.find('#'); hash != std::string_view::npos) {
			raw = raw.substr(0, hash);
		}
		const std::string line = trim(raw);
		if (line.empty()) {
			continue;
		}
		const auto eq = line.find('=');
		if (eq == std::string::npos) {
			throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
		}
		const std::string key = trim(std::string_view(line).substr(0, eq));
		const std::string value = trim(std::string_view(line).substr(eq + 1));
		if (!known.contains(key)) {
			throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
		}
		if (values.contains(key)) {
			throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
		}
		values[key] = value;
		order.push_back(key);
	}

	RunConfig c;
	if (const auto it = values.find("preset"); it != values.end() && it->second == "none") {
		c.preset.clear();
	} else if (it != values.end()) {
		try {
			c.pipeline = preset(it->second);
		} catch (const ConfigError &e) {
			throw ConfigError(std::string("preset: ") + e.what());
		}
		c.preset = it->second;
	}
	// "pipeline" sets the regressor count, so it goes before model-shape keys.
	if (const auto it = values.find("pipeline"); it != values.end()) {
		apply_key(c, "pipeline", it->second);
	}
	for (const auto &key : order) {
		if (key != "preset" && key != "pipeline") {
			apply_key(c, key, values[key]);
		}
	}
	try {
		c.pipeline.validate();
	} catch (const ConfigError &) {
		throw;
	} catch (const Error &e) {
		throw ConfigError(e.what());
	}
	if (c.horizon == 0) {
		throw ConfigError("horizon must be at least 1");
	}
	return c;
}

RunConfig load_run_config(const std::filesystem::path &path) {
	try {
		return parse_run_config(read_text_file(path));
	} catch (const IoError &e) {
		throw ConfigError(e.what());
	}
}

std::pair<MarketDataset, MarketDataset> split_dataset(const RunConfig &config, const MarketDataset &data) {
	const std::size_t n = data.size();
	std::size_t test_begin = 0;
	if (config.test_start) {
		const auto offset = (*config.test_start - data.start()).count();
		if (offset <= 0 || static_cast<std::size_t>(offset) >= n) {
			throw ConfigError("test_start " + format_timestamp(*config.test_start) + " is outside the data");
		}
		test_begin = static_cast<std::size_t>(offset);
	} else {
		if (config.test_hours >= n) {
			throw ConfigError("test_hours " + std::to_string(config.test_hours) + " leaves no training data");
		}
		test_begin = n - config.test_hours;
	}
	const std::size_t test_len = std::min(config.test_hours, n - test_begin);
	if (test_len == 0) {
		throw ConfigError("empty test window");
	}
	std::size_t train_begin = 0;
	if (config.train_start) {
		const auto offset = (*config.train_start - data.start()).count();
		if (offset < 0 || static_cast<std::size_t>(offset) >= test_begin) {
			throw ConfigError("train_start " + format_timestamp(*config.train_start) + " is outside the data");
		}
		train_begin = static_cast<std::size_t>(offset);
	}
	if (config.train_hours > 0) {
		if (config.train_hours > test_begin - train_begin) {
			throw ConfigError("train_hours exceeds the data before the test window");
		}
		train_begin = test_begin - config.train_hours;
	}
	return {data.slice(train_begin, test_begin - train_begin), data.slice(test_begin, test_len)};
}

} // namespace lmpcast
