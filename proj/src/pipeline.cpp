#include "lmpcast/pipeline.hpp"

#include "lmpcast/errors.hpp"

#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <sstream>

namespace lmpcast {

using json = nlohmann::json;

namespace {

constexpr std::string_view kFormat = "lmpcast-pipeline/1";

HourlySeries transform(const HourlySeries &series, const PipelineConfig &config) {
	HourlySeries out = config.clip ? clip_prices(series, *config.clip) : series;
	return config.offset ? log_transform(out, *config.offset) : out;
}

json spec_to_json(const ModelSpec &s) {
	return {{"p", s.p},   {"q", s.q},   {"P", s.P},         {"Q", s.Q},           {"d", s.diff.d},
	        {"D", s.diff.D}, {"S", s.diff.S}, {"exog_count", s.exog_count}, {"constant", s.constant}};
}

ModelSpec spec_from_json(const json &j) {
	ModelSpec s;
	s.p = j.at("p").get<std::size_t>();
	s.q = j.at("q").get<std::size_t>();
	s.P = j.at("P").get<std::size_t>();
	s.Q = j.at("Q").get<std::size_t>();
	s.diff = DifferenceSpec(j.at("d").get<std::size_t>(), j.at("D").get<std::size_t>(), j.at("S").get<std::size_t>());
	s.exog_count = j.at("exog_count").get<std::size_t>();
	s.constant = j.at("constant").get<bool>();
	return s;
}

std::string fmt(double v, const char *pattern = "%.6g") {
	char buf[64];
	std::snprintf(buf, sizeof(buf), pattern, v);
	return buf;
}

std::string list(const std::vector<double> &v) {
	std::string out = "[";
	for (std::size_t i = 0; i < v.size(); ++i) {
		out += (i ? ", " : "") + fmt(v[i]);
	}
	return out + "]";
}

} // namespace

std::string_view to_string(PipelineKind kind) {
	switch (kind) {
	case PipelineKind::sarima_rtlmp:
		return "sarima";
	case PipelineKind::sarimax_rtlmp:
		return "sarimax";
	case PipelineKind::arma_delta:
		return "arma-delta";
	case PipelineKind::armax_delta:
		return "armax-delta";
	case PipelineKind::dalmp_baseline:
		return "dalmp-baseline";
	case PipelineKind::realized_oracle:
		return "oracle";
	}
	return "unknown";
}

PipelineKind parse_pipeline_kind(std::string_view text) {
	for (auto k : {PipelineKind::sarima_rtlmp, PipelineKind::sarimax_rtlmp, PipelineKind::arma_delta,
	               PipelineKind::armax_delta, PipelineKind::dalmp_baseline, PipelineKind::realized_oracle}) {
		if (to_string(k) == text) {
			return k;
		}
	}
	throw ConfigError("unknown pipeline '" + std::string(text) +
	                  "' (sarima | sarimax | arma-delta | armax-delta | dalmp-baseline | oracle)");
}

bool models_delta(PipelineKind kind) {
	return kind == PipelineKind::arma_delta || kind == PipelineKind::armax_delta;
}

bool has_model(PipelineKind kind) {
	return kind != PipelineKind::dalmp_baseline && kind != PipelineKind::realized_oracle;
}

void PipelineConfig::validate() const {
	if (!has_model(kind)) {
		return;
	}
	spec.validate();
	const bool needs_regressor = kind == PipelineKind::sarimax_rtlmp || kind == PipelineKind::armax_delta;
	const std::size_t expected = needs_regressor ? 1 : 0;
	if (spec.exog_count != expected) {
		throw ConfigError(std::string(to_string(kind)) + " pipeline needs exactly " + std::to_string(expected) +
		                  " regressor(s), model spec has " + std::to_string(spec.exog_count));
	}
	if (garch) {
		garch->validate();
	}
	fit_options.validate();
}

PipelineConfig preset(std::string_view name) {
	std::string_view base = name;
	bool with_garch = false;
	if (base.ends_with("-garch")) {
		base.remove_suffix(6);
		with_garch = true;
	}
	PipelineConfig c;
	if (base == "sarima-paper" || base == "sarimax-paper") {
		c.kind = base == "sarima-paper" ? PipelineKind::sarima_rtlmp : PipelineKind::sarimax_rtlmp;
		c.offset = LogOffset(30.0);
		c.spec.p = 2;
		c.spec.q = 1;
		c.spec.P = 1;
		c.spec.Q = 1;
		c.spec.diff = DifferenceSpec(0, 1, 24);
		c.spec.exog_count = c.kind == PipelineKind::sarimax_rtlmp ? 1 : 0;
	} else if (base == "arma-paper" || base == "armax-paper") {
		const bool x = base == "armax-paper";
		c.kind = x ? PipelineKind::armax_delta : PipelineKind::arma_delta;
		c.clip = ClipBounds(100.0, -100.0);
		c.offset = LogOffset(1000.0);
		c.spec.p = 1;
		c.spec.q = x ? 1 : 2;
		c.spec.exog_count = x ? 1 : 0;
	} else if (base == "dalmp-baseline" && !with_garch) {
		c.kind = PipelineKind::dalmp_baseline;
	} else if (base == "oracle" && !with_garch) {
		c.kind = PipelineKind::realized_oracle;
	} else {
		throw ConfigError("unknown preset '" + std::string(name) + "'");
	}
	if (with_garch) {
		c.garch = GarchSpec{1, 1};
	}
	return c;
}

std::vector<std::string> preset_names() {
	return {"sarima-paper",       "sarimax-paper",       "arma-paper",        "armax-paper",
	        "sarima-paper-garch", "sarimax-paper-garch", "arma-paper-garch",  "armax-paper-garch",
	        "dalmp-baseline",     "oracle"};
}

PipelineInputs pipeline_inputs(const PipelineConfig &config, const MarketDataset &data) {
	switch (config.kind) {
	case PipelineKind::sarima_rtlmp:
		return {transform(data.rtlmp, config), std::nullopt};
	case PipelineKind::sarimax_rtlmp: {
		HourlySeries reg = config.offset ? log_transform(data.dalmp, *config.offset) : data.dalmp;
		return {transform(data.rtlmp, config), ExogenousMatrix{{std::move(reg)}}};
	}
	case PipelineKind::arma_delta:
		return {transform(delta_lmp(data.dalmp, data.rtlmp), config), std::nullopt};
	case PipelineKind::armax_delta:
		return {transform(delta_lmp(data.dalmp, data.rtlmp), config),
		        ExogenousMatrix{{weekend_indicator(data.start(), data.size())}}};
	case PipelineKind::dalmp_baseline:
	case PipelineKind::realized_oracle:
		break;
	}
	return {data.rtlmp, std::nullopt};
}

FittedPipeline fit_pipeline(const PipelineConfig &config, const MarketDataset &train) {
	config.validate();
	FittedPipeline out{config, std::nullopt, train.start(), train.size()};
	if (!has_model(config.kind)) {
		return out;
	}
	const PipelineInputs in = pipeline_inputs(config, train);
	FittedModel model = fit(config.spec, in.target, in.exog, config.fit_options);
	if (config.garch) {
		model = attach_garch(model, *config.garch, config.fit_options);
	}
	out.model = std::move(model);
	return out;
}

PipelineForecast forecast_pipeline(const FittedPipeline &fitted, const MarketDataset &history,
                                   const HourlySeries &dalmp_future, std::size_t horizon,
                                   const HourlySeries *realized) {
	const PipelineConfig &config = fitted.config;
	if (horizon == 0) {
		throw InvalidParameters("forecast horizon must be at least 1");
	}
	if (dalmp_future.start() != history.dalmp.end()) {
		throw AlignmentError("published DALMP must start at " + format_timestamp(history.dalmp.end()));
	}
	if (dalmp_future.size() < horizon) {
		throw MissingExogenousFuture("published DALMP covers " + std::to_string(dalmp_future.size()) +
		                             " hours, horizon is " + std::to_string(horizon));
	}
	const HourlySeries da = dalmp_future.slice(0, horizon);
	if (config.kind == PipelineKind::dalmp_baseline) {
		return {da, std::vector<double>(horizon, 0.0)};
	}
	if (config.kind == PipelineKind::realized_oracle) {
		if (realized == nullptr || realized->start() != da.start() || realized->size() < horizon) {
			throw MissingExogenousFuture("oracle pipeline needs the realized RTLMP for the horizon");
		}
		return {realized->slice(0, horizon), std::vector<double>(horizon, 0.0)};
	}
	if (!fitted.model) {
		throw InvalidParameters("pipeline has no fitted model");
	}

	const PipelineInputs in = pipeline_inputs(config, history);
	std::optional<ExogenousMatrix> future;
	if (config.kind == PipelineKind::sarimax_rtlmp) {
		future = ExogenousMatrix{{config.offset ? log_transform(da, *config.offset) : da}};
	} else if (config.kind == PipelineKind::armax_delta) {
		future = ExogenousMatrix{{weekend_indicator(da.start(), horizon)}};
	}
	const ForecastResult fc = forecast(*fitted.model, in.target, in.exog, future, horizon);

	std::vector<double> levels(horizon);
	for (std::size_t i = 0; i < horizon; ++i) {
		const double y = fc.mean[i];
		if (!config.offset) {
			levels[i] = y;
		} else if (config.lognormal_correction) {
			levels[i] = std::exp(y + 0.5 * fc.variance[i]) - config.offset->c;
		} else {
			levels[i] = std::exp(y) - config.offset->c;
		}
	}
	HourlySeries level_series(da.start(), std::move(levels), Units::dollars_per_mwh);
	if (models_delta(config.kind)) {
		return {reconstruct_rtlmp(da, level_series), fc.variance};
	}
	return {std::move(level_series), fc.variance};
}

std::string serialize_pipeline(const FittedPipeline &fitted) {
	const PipelineConfig &c = fitted.config;
	json cfg{{"kind", std::string(to_string(c.kind))},
	         {"spec", spec_to_json(c.spec)},
	         {"lognormal_correction", c.lognormal_correction},
	         {"fit_options",
	          {{"max_iterations", c.fit_options.max_iterations},
	           {"tolerance", c.fit_options.tolerance},
	           {"restarts", c.fit_options.restarts},
	           {"seed", c.fit_options.seed}}}};
	cfg["clip"] = c.clip ? json{{"upper", c.clip->upper}, {"lower", c.clip->lower}} : json(nullptr);
	cfg["log_offset"] = c.offset ? json(c.offset->c) : json(nullptr);
	cfg["garch"] = c.garch ? json{{"p", c.garch->p}, {"q", c.garch->q}} : json(nullptr);

	json j{{"format", std::string(kFormat)},
	       {"config", cfg},
	       {"train_start", format_timestamp(fitted.train_start)},
	       {"train_length", fitted.train_length}};
	if (fitted.model) {
		const FittedModel &m = *fitted.model;
		json model{{"spec", spec_to_json(m.spec)},
		           {"phi", m.params.phi},
		           {"Phi", m.params.Phi},
		           {"theta", m.params.theta},
		           {"Theta", m.params.Theta},
		           {"mu", m.params.mu},
		           {"gamma", m.params.gamma},
		           {"sigma2", m.params.sigma2},
		           {"loglik", m.loglik},
		           {"bic", m.bic},
		           {"n_effective", m.n_effective},
		           {"residuals_start", format_timestamp(m.residuals.start())},
		           {"residuals", std::vector<double>(m.residuals.values().begin(), m.residuals.values().end())},
		           {"converged", m.diagnostics.converged},
		           {"iterations", m.diagnostics.iterations},
		           {"boundary", m.diagnostics.boundary}};
		if (m.garch_params) {
			model["garch"] = {{"p", m.garch_spec->p},
			                  {"q", m.garch_spec->q},
			                  {"alpha0", m.garch_params->alpha0},
			                  {"alpha", m.garch_params->alpha},
			                  {"beta", m.garch_params->beta}};
		} else {
			model["garch"] = nullptr;
		}
		j["model"] = std::move(model);
	} else {
		j["model"] = nullptr;
	}
	return j.dump(1) + "\n";
}

FittedPipeline deserialize_pipeline(std::string_view text) {
	try {
		const json j = json::parse(text);
		if (j.at("format").get<std::string>() != kFormat) {
			throw SchemaError("not a fitted pipeline artifact");
		}
		const json &cfg = j.at("config");
		PipelineConfig c;
		c.kind = parse_pipeline_kind(cfg.at("kind").get<std::string>());
		c.spec = spec_from_json(cfg.at("spec"));
		c.lognormal_correction = cfg.at("lognormal_correction").get<bool>();
		const json &fo = cfg.at("fit_options");
		c.fit_options.max_iterations = fo.at("max_iterations").get<std::size_t>();
		c.fit_options.tolerance = fo.at("tolerance").get<double>();
		c.fit_options.restarts = fo.at("restarts").get<std::size_t>();
		c.fit_options.seed = fo.at("seed").get<std::uint64_t>();
		if (!cfg.at("clip").is_null()) {
			c.clip = ClipBounds(cfg["clip"].at("upper").get<double>(), cfg["clip"].at("lower").get<double>());
		}
		if (!cfg.at("log_offset").is_null()) {
			c.offset = LogOffset(cfg["log_offset"].get<double>());
		}
		if (!cfg.at("garch").is_null()) {
			c.garch = GarchSpec{cfg["garch"].at("p").get<std::size_t>(), cfg["garch"].at("q").get<std::size_t>()};
		}
		FittedPipeline out{c, std::nullopt, parse_timestamp(j.at("train_start").get<std::string>()),
		                   j.at("train_length").get<std::size_t>()};
		if (!j.at("model").is_null()) {
			const json &m = j["model"];
			ParameterVector pv;
			pv.phi = m.at("phi").get<std::vector<double>>();
			pv.Phi = m.at("Phi").get<std::vector<double>>();
			pv.theta = m.at("theta").get<std::vector<double>>();
			pv.Theta = m.at("Theta").get<std::vector<double>>();
			pv.mu = m.at("mu").get<double>();
			pv.gamma = m.at("gamma").get<std::vector<double>>();
			pv.sigma2 = m.at("sigma2").get<double>();
			const ModelSpec spec = spec_from_json(m.at("spec"));
			validate_parameters(spec, pv);
			FittedModel fm{spec,
			               pv,
			               m.at("loglik").get<double>(),
			               m.at("bic").get<double>(),
			               m.at("n_effective").get<std::size_t>(),
			               HourlySeries(parse_timestamp(m.at("residuals_start").get<std::string>()),
			                            m.at("residuals").get<std::vector<double>>(), Units::dimensionless),
			               std::nullopt,
			               std::nullopt,
			               FitDiagnostics{m.at("converged").get<bool>(), m.at("iterations").get<std::size_t>(),
			                              m.at("boundary").get<std::vector<std::string>>()}};
			if (!m.at("garch").is_null()) {
				const json &g = m["garch"];
				fm.garch_spec = GarchSpec{g.at("p").get<std::size_t>(), g.at("q").get<std::size_t>()};
				GarchParams gp{g.at("alpha0").get<double>(), g.at("alpha").get<std::vector<double>>(),
				               g.at("beta").get<std::vector<double>>()};
				gp.validate();
				fm.garch_params = std::move(gp);
			}
			out.model = std::move(fm);
		}
		return out;
	} catch (const json::exception &e) {
		throw SchemaError(std::string("malformed pipeline artifact: ") + e.what());
	}
}

std::string describe_fit(const FittedPipeline &fitted) {
	std::ostringstream out;
	const PipelineConfig &c = fitted.config;
	out << "pipeline: " << to_string(c.kind) << "\n";
	out << "train: " << format_timestamp(fitted.train_start) << " + " << fitted.train_length << " h\n";
	if (c.clip) {
		out << "clip: [" << fmt(c.clip->lower) << ", " << fmt(c.clip->upper) << "]\n";
	}
	if (c.offset) {
		out << "log offset c: " << fmt(c.offset->c) << "\n";
	}
	if (!fitted.model) {
		out << "model: none (reference pipeline)\n";
		return out.str();
	}
	const FittedModel &m = *fitted.model;
	out << "model: " << m.spec.describe() << (m.garch_spec ? "-GARCH(" + std::to_string(m.garch_spec->p) + "," +
	                                                              std::to_string(m.garch_spec->q) + ")"
	                                                        : std::string())
	    << "\n";
	if (m.spec.p) {
		out << "  phi    " << list(m.params.phi) << "\n";
	}
	if (m.spec.P) {
		out << "  Phi    " << list(m.params.Phi) << "\n";
	}
	if (m.spec.q) {
		out << "  theta  " << list(m.params.theta) << "\n";
	}
	if (m.spec.Q) {
		out << "  Theta  " << list(m.params.Theta) << "\n";
	}
	if (m.spec.constant) {
		out << "  mu     " << fmt(m.params.mu) << "\n";
	}
	if (m.spec.exog_count) {
		out << "  gamma  " << list(m.params.gamma) << "\n";
	}
	out << "  sigma2 " << fmt(m.params.sigma2) << "\n";
	out << "loglik: " << fmt(m.loglik, "%.3f") << "\n";
	out << "BIC: " << fmt(m.bic, "%.3f") << " (k = " << m.spec.parameter_count() << ", n = " << m.n_effective << ")\n";
	if (m.garch_params) {
		out << "GARCH alpha0 " << fmt(m.garch_params->alpha0) << " alpha " << list(m.garch_params->alpha) << " beta "
		    << list(m.garch_params->beta) << "\n";
	}
	out << "converged: " << (m.diagnostics.converged ? "yes" : "no") << " after " << m.diagnostics.iterations
	    << " evaluations\n";
	if (!m.diagnostics.boundary.empty()) {
		out << "boundary estimates:";
		for (const auto &b : m.diagnostics.boundary) {
			out << " " << b;
		}
		out << "\n";
	}
	return out.str();
}

} // namespace lmpcast
