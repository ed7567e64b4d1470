#include "cusploc/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "cusploc/error.hpp"

namespace cusploc::harness {

using nlohmann::json;

namespace {

// Reads members of one JSON object and rejects anything it was not asked about.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + " must be an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  template <class T>
  void get(const std::string& key, T& out) {
    if (!has(key)) return;
    out = convert<T>(j_.at(key), where_ + "." + key);
  }

  template <class T>
  void get(const std::string& key, std::optional<T>& out) {
    if (!has(key)) return;
    out = convert<T>(j_.at(key), where_ + "." + key);
  }

  template <class T>
  T require(const std::string& key) {
    if (!has(key)) throw ConfigError(where_ + "." + key + " is required");
    return convert<T>(j_.at(key), where_ + "." + key);
  }

  const json& at(const std::string& key) { return j_.at(key); }
  std::string path(const std::string& key) const { return where_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key)) throw ConfigError("unknown key " + where_ + "." + key);
  }

 private:
  template <class T>
  static T convert(const json& v, const std::string& where) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(where + " must be a boolean");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(where + " must be a string");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(where + " must be an integer");
      if constexpr (std::is_unsigned_v<T>)
        if (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)
          throw ConfigError(where + " must be nonnegative");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(where + " must be a number");
    } else {
      if (!v.is_array()) throw ConfigError(where + " must be an array");
      for (const auto& e : v)
        if (!e.is_number()) throw ConfigError(where + " must contain numbers only");
    }
    return v.get<T>();
  }

  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

template <class F>
auto wrap_domain(F&& f) {
  try {
    return f();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

std::vector<double> default_grid(Variant v) {
  switch (v) {
    case Variant::GaussianSignal:
    case Variant::SmallNoiseDynamical:
      return {0.1, 0.05, 0.025, 0.0125};
    case Variant::IidDensity:
    case Variant::PoissonPeriodic:
      return {64, 256, 1024};
    case Variant::ErgodicDiffusion:
      return {250, 1000, 4000};
  }
  return {};
}

CuspModelSpec model_from_json(const json& j) {
  ObjectReader r(j, "model");
  CuspModelSpec s;
  return wrap_domain([&] {
    std::string text;
    if (r.has("variant")) {
      r.get("variant", text);
      s.variant = parse_variant(text);
    }
    if (r.has("signal_form")) {
      r.get("signal_form", text);
      s.signal_form = parse_signal_form(text);
    }
    if (r.has("regime")) {
      r.get("regime", text);
      s.regime = parse_regime(text);
    }
    r.get("a", s.a);
    r.get("kappa", s.kappa);
    r.get("delta", s.delta);
    r.get("theta0", s.theta0);
    r.get("alpha", s.alpha);
    r.get("beta", s.beta);
    if (r.has("nuisance")) {
      ObjectReader n(r.at("nuisance"), r.path("nuisance"));
      const auto name = n.require<std::string>("name");
      std::vector<double> params;
      n.get("params", params);
      n.finish();
      s.h = Nuisance::from_name(name, params);
    }
    r.get("epsilon", s.epsilon);
    r.get("horizon", s.horizon);
    r.get("t0", s.t0);
    r.get("tau", s.tau);
    r.get("n", s.n);
    r.get("x0", s.x0);
    r.get("step", s.step);
    r.get("burnin", s.burnin);
    r.get("escape_bound", s.escape_bound);
    r.finish();
    s.validate();
    return s;
  });
}

json model_to_json(const CuspModelSpec& s) {
  json j;
  j["variant"] = to_string(s.variant);
  j["signal_form"] = to_string(s.signal_form);
  j["regime"] = to_string(s.regime);
  j["a"] = s.a;
  j["kappa"] = s.kappa;
  j["delta"] = s.delta;
  j["theta0"] = s.theta0;
  j["alpha"] = s.alpha;
  j["beta"] = s.beta;
  j["nuisance"] = {{"name", s.h.name()}, {"params", s.h.params()}};
  j["epsilon"] = s.epsilon;
  j["horizon"] = s.horizon;
  j["t0"] = s.t0;
  j["tau"] = s.tau;
  j["n"] = s.n;
  j["x0"] = s.x0;
  j["step"] = s.step;
  j["burnin"] = s.burnin;
  j["escape_bound"] = s.escape_bound;
  return j;
}

void ExperimentConfig::validate() const {
  if (version != kConfigVersion) throw ConfigError("unsupported config version " + std::to_string(version));
  wrap_domain([&] {
    model.validate();
    return 0;
  });
  if (grid.empty()) throw ConfigError("grid must not be empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0) || !std::isfinite(grid[i])) throw ConfigError("grid values must be positive");
    if ((model.variant == Variant::IidDensity || model.variant == Variant::PoissonPeriodic) &&
        grid[i] != std::floor(grid[i]))
      throw ConfigError("grid values must be integers for " + to_string(model.variant));
    if (i > 0) {
      const bool up = grid[1] > grid[0];
      if (up ? !(grid[i] > grid[i - 1]) : !(grid[i] < grid[i - 1]))
        throw ConfigError("grid values must be strictly monotone");
    }
  }
  if (replications < 50) throw ConfigError("replications must be at least 50");
  if (outputs.empty()) throw ConfigError("outputs must name a directory");
  if (comparison) {
    if (comparison->limit_replications < 100) throw ConfigError("comparison.limit_replications must be at least 100");
    if (!(comparison->ks_threshold > 0 && comparison->ks_threshold < 1))
      throw ConfigError("comparison.ks_threshold must lie in (0, 1)");
    if (comparison->grid_size < 3 || comparison->grid_size % 2 == 0)
      throw ConfigError("comparison.grid_size must be odd and at least 3");
    if (comparison->window && !(*comparison->window > 0)) throw ConfigError("comparison.window must be positive");
  }
  const auto& e = estimation;
  if (!(e.coarse_divisor >= 1) || !(e.final_divisor >= e.coarse_divisor))
    throw ConfigError("estimation divisors must satisfy 1 <= coarse_divisor <= final_divisor");
  if (e.bayes_refinement < 1) throw ConfigError("estimation.bayes_refinement must be at least 1");
  if (!(e.resolution >= 1)) throw ConfigError("estimation.resolution must be at least 1");
  wrap_domain([&] { return Prior::from_name(e.prior, e.prior_mean, e.prior_sd); });
  if (thresholds.slope_tolerance && !(*thresholds.slope_tolerance > 0))
    throw ConfigError("thresholds.slope_tolerance must be positive");
  for (double h : report.moment_hurst)
    if (!(h > 0 && h < 1)) throw ConfigError("report.moment_hurst values must lie in (0, 1)");
  for (double h : report.density_hurst)
    if (!(h > 0 && h < 1)) throw ConfigError("report.density_hurst values must lie in (0, 1)");
  if (report.limit_replications < 100) throw ConfigError("report.limit_replications must be at least 100");
  if (report.grid_size < 3 || report.grid_size % 2 == 0) throw ConfigError("report.grid_size must be odd");
  if (report.bins < 3 || report.bins % 2 == 0) throw ConfigError("report.bins must be odd and at least 3");
}

EstimationOptions ExperimentConfig::estimation_options() const {
  EstimationOptions o;
  o.coarse_divisor = estimation.coarse_divisor;
  o.final_divisor = estimation.final_divisor;
  o.bayes_refinement = estimation.bayes_refinement;
  o.prior = wrap_domain([&] { return Prior::from_name(estimation.prior, estimation.prior_mean, estimation.prior_sd); });
  return o;
}

ExperimentConfig config_from_json(const json& j) {
  ObjectReader r(j, "config");
  ExperimentConfig c;
  c.version = r.require<int>("version");
  if (c.version != kConfigVersion) throw ConfigError("unsupported config version " + std::to_string(c.version));
  if (!r.has("model")) throw ConfigError("config.model is required");
  c.model = model_from_json(r.at("model"));
  c.estimation.prior_mean = c.model.theta0;
  c.grid = default_grid(c.model.variant);
  r.get("grid", c.grid);
  r.get("replications", c.replications);
  r.get("seed", c.seed);
  r.get("outputs", c.outputs);
  if (r.has("comparison")) {
    ObjectReader s(r.at("comparison"), "comparison");
    ComparisonSettings cs;
    s.get("limit_replications", cs.limit_replications);
    s.get("ks_threshold", cs.ks_threshold);
    s.get("grid_size", cs.grid_size);
    s.get("window", cs.window);
    s.finish();
    c.comparison = cs;
  }
  if (r.has("estimation")) {
    ObjectReader s(r.at("estimation"), "estimation");
    auto& e = c.estimation;
    s.get("prior", e.prior);
    s.get("prior_mean", e.prior_mean);
    s.get("prior_sd", e.prior_sd);
    s.get("coarse_divisor", e.coarse_divisor);
    s.get("final_divisor", e.final_divisor);
    s.get("bayes_refinement", e.bayes_refinement);
    s.get("resolution", e.resolution);
    s.finish();
  }
  if (r.has("thresholds")) {
    ObjectReader s(r.at("thresholds"), "thresholds");
    s.get("slope_target", c.thresholds.slope_target);
    s.get("slope_tolerance", c.thresholds.slope_tolerance);
    s.finish();
  }
  if (r.has("report")) {
    ObjectReader s(r.at("report"), "report");
    auto& p = c.report;
    s.get("moment_hurst", p.moment_hurst);
    s.get("density_hurst", p.density_hurst);
    s.get("limit_replications", p.limit_replications);
    s.get("grid_size", p.grid_size);
    s.get("bins", p.bins);
    s.finish();
  }
  r.finish();
  c.validate();
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["version"] = c.version;
  j["model"] = model_to_json(c.model);
  j["grid"] = c.grid;
  j["replications"] = c.replications;
  j["seed"] = c.seed;
  j["outputs"] = c.outputs;
  if (c.comparison) {
    const auto& s = *c.comparison;
    j["comparison"] = {{"limit_replications", s.limit_replications},
                       {"ks_threshold", s.ks_threshold},
                       {"grid_size", s.grid_size},
                       {"window", s.window ? json(*s.window) : json(nullptr)}};
  }
  const auto& e = c.estimation;
  j["estimation"] = {{"prior", e.prior},
                     {"prior_mean", e.prior_mean},
                     {"prior_sd", e.prior_sd},
                     {"coarse_divisor", e.coarse_divisor},
                     {"final_divisor", e.final_divisor},
                     {"bayes_refinement", e.bayes_refinement},
                     {"resolution", e.resolution}};
  json t = json::object();
  if (c.thresholds.slope_target) t["slope_target"] = *c.thresholds.slope_target;
  if (c.thresholds.slope_tolerance) t["slope_tolerance"] = *c.thresholds.slope_tolerance;
  j["thresholds"] = t;
  const auto& p = c.report;
  j["report"] = {{"moment_hurst", p.moment_hurst},
                 {"density_hurst", p.density_hurst},
                 {"limit_replications", p.limit_replications},
                 {"grid_size", p.grid_size},
                 {"bins", p.bins}};
  return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

}  // namespace cusploc::harness
