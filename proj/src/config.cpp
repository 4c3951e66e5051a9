#include "mvsdde/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mvsdde/error.hpp"

namespace mvsdde {
namespace {

using nlohmann::json;

const json& section(const json& root, const std::string& name, bool required) {
  static const json empty = json::object();
  if (!root.contains(name)) {
    if (required) throw ConfigError("config: missing required section \"" + name + "\"");
    return empty;
  }
  if (!root.at(name).is_object()) throw ConfigError("config: section \"" + name + "\" must be an object");
  return root.at(name);
}

template <typename T>
T get(const json& obj, const std::string& where, const std::string& key) {
  if (!obj.contains(key)) throw ConfigError("config: missing required field \"" + where + "." + key + "\"");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: field \"" + where + "." + key + "\" has the wrong type");
  }
}

template <typename T>
T get_or(const json& obj, const std::string& where, const std::string& key, T fallback) {
  return obj.contains(key) ? get<T>(obj, where, key) : fallback;
}

template <typename T>
std::optional<T> get_opt(const json& obj, const std::string& where, const std::string& key) {
  if (!obj.contains(key)) return std::nullopt;
  return get<T>(obj, where, key);
}

InteractionKernel parse_kernel(const json& obj, const std::string& where) {
  const auto shape = get_or<std::string>(obj, where, "shape", "bump");
  const double height = get_or(obj, where, "height", 1.0);
  const double radius = get_or(obj, where, "radius", 1.0);
  if (shape == "bump") return bump_kernel(height, radius);
  if (shape == "tent") return tent_kernel(height, radius);
  if (shape == "zero") return zero_kernel();
  throw ConfigError("config: \"" + where + ".shape\" must be bump, tent or zero");
}

OpinionParams parse_opinion(const json& obj, double tau) {
  const std::string where = "model.opinion";
  OpinionParams p;
  p.tau = tau;
  if (obj.contains("kernel")) p.kernel_delayed = p.kernel_current = parse_kernel(obj.at("kernel"), where + ".kernel");
  if (obj.contains("kernel_delayed")) p.kernel_delayed = parse_kernel(obj.at("kernel_delayed"), where + ".kernel_delayed");
  if (obj.contains("kernel_current")) p.kernel_current = parse_kernel(obj.at("kernel_current"), where + ".kernel_current");
  const double rate = get_or(obj, where, "reversion_rate", 1.0);
  p.reversion_delayed = linear_reversion(get_or(obj, where, "reversion_delayed", rate));
  p.reversion_current = linear_reversion(get_or(obj, where, "reversion_current", rate));
  p.sigma = get_or(obj, where, "sigma", 1.0);
  p.init_mean = get_or(obj, where, "init_mean", 0.0);
  p.init_std = get_or(obj, where, "init_std", 1.0);
  return p;
}

Delay parse_delay(const json& obj, std::size_t index) {
  const std::string where = "model.multi_delay.delays[" + std::to_string(index) + "]";
  const auto type = get<std::string>(obj, where, "type");
  if (type == "constant") return constant_delay(get<double>(obj, where, "value"));
  if (type == "sine") {
    const double base = get<double>(obj, where, "base");
    const double amplitude = get<double>(obj, where, "amplitude");
    const double frequency = get_or(obj, where, "frequency", 1.0);
    return varying_delay([=](double t) { return base + amplitude * std::sin(frequency * t); });
  }
  throw ConfigError("config: \"" + where + ".type\" must be constant or sine");
}

void parse_model(const json& root, Config& cfg) {
  const json& m = section(root, "model", true);
  const auto name = get<std::string>(m, "model", "name");
  const json& params = section(m, name, false);
  const std::string where = "model." + name;
  const double tau = cfg.grid.tau();
  if (name == "opinion") {
    cfg.opinion = parse_opinion(params, tau);
    cfg.model = opinion_model(*cfg.opinion);
  } else if (name == "delayed_ou") {
    const int dim = get_or(params, where, "dim", 1);
    cfg.model = delayed_ou(get_or(params, where, "a", 1.0), get_or(params, where, "c", 0.5),
                           get_or(params, where, "sigma", 1.0), tau, dim);
    cfg.model.initial_segment = constant_segment(Eigen::VectorXd::Constant(dim, get_or(params, where, "xi", 1.0)));
  } else if (name == "pure_delay") {
    cfg.model = delayed_ou(0.0, 1.0, 0.0, tau);
    cfg.model.name = "pure_delay";
  } else if (name == "multi_delay") {
    const int dim = get_or(params, where, "dim", 1);
    ModelSpec base = averaged_reversion_model(get_or(params, where, "a", 1.0), get_or(params, where, "sigma", 0.5), tau,
                                              1, dim);
    base.initial_segment = constant_segment(Eigen::VectorXd::Constant(dim, get_or(params, where, "xi", 1.0)));
    std::vector<Delay> delays;
    if (params.contains("delays")) {
      if (!params.at("delays").is_array()) throw ConfigError("config: \"" + where + ".delays\" must be an array");
      for (std::size_t i = 0; i < params.at("delays").size(); ++i) delays.push_back(parse_delay(params.at("delays")[i], i));
    } else {
      delays = {constant_delay(tau / 2), constant_delay(tau)};
    }
    cfg.model = build_multi_delay(base, std::move(delays), cfg.grid.horizon());
    cfg.model.name = "multi_delay";
  } else {
    throw ConfigError("config: unknown model \"" + name + "\" (expected opinion, delayed_ou, pure_delay, multi_delay)");
  }
}

std::size_t positive_count(const json& obj, const std::string& where, const std::string& key, std::size_t fallback) {
  const auto value = get_or<long long>(obj, where, key, static_cast<long long>(fallback));
  if (value < 1) throw ConfigError("config: \"" + where + "." + key + "\" must be >= 1");
  return static_cast<std::size_t>(value);
}

}  // namespace

Config parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: top level must be an object");

  const json& g = section(root, "grid", true);
  const double tau = get<double>(g, "grid", "tau");
  const double horizon = get<double>(g, "grid", "T");
  const int m = get<int>(g, "grid", "steps_per_delay");
  std::optional<TimeGrid> grid;
  try {
    grid = make_grid(tau, horizon, m);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  Config cfg{.grid = *grid, .model = {}, .opinion = {}, .run = {}, .fixpoint = {}, .verify = {}, .convergence = {}};
  try {
    parse_model(root, cfg);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  const json& run = section(root, "run", false);
  cfg.run.particles = positive_count(run, "run", "particles", cfg.run.particles);
  cfg.run.measure_times = get_or(run, "run", "measure_times", std::vector<double>{horizon});

  const json& fp = section(root, "fixpoint", false);
  cfg.fixpoint.particles = positive_count(fp, "fixpoint", "particles", cfg.fixpoint.particles);
  cfg.fixpoint.tol = get_or(fp, "fixpoint", "tol", cfg.fixpoint.tol);
  cfg.fixpoint.max_iter = get_or(fp, "fixpoint", "max_iter", cfg.fixpoint.max_iter);
  cfg.fixpoint.lambda = get_or(fp, "fixpoint", "lambda", cfg.fixpoint.lambda);
  cfg.fixpoint.dump_times = get_or(fp, "fixpoint", "dump_times", std::vector<double>{horizon});
  if (cfg.fixpoint.max_iter < 1) throw ConfigError("config: \"fixpoint.max_iter\" must be >= 1");
  if (!(cfg.fixpoint.tol > 0.0)) throw ConfigError("config: \"fixpoint.tol\" must be positive");
  if (cfg.fixpoint.lambda < 0.0) throw ConfigError("config: \"fixpoint.lambda\" must be >= 0");

  const json& v = section(root, "verify", false);
  cfg.verify.constants = get_or(v, "verify", "constants", cfg.verify.constants);
  if (cfg.verify.constants != "declared" && cfg.verify.constants != "estimate")
    throw ConfigError("config: \"verify.constants\" must be declared or estimate");
  cfg.verify.probes = positive_count(v, "verify", "probes", cfg.verify.probes);
  cfg.verify.box = get_or(v, "verify", "box", cfg.verify.box);
  cfg.verify.random_measures = positive_count(v, "verify", "random_measures", cfg.verify.random_measures);
  cfg.verify.atoms = positive_count(v, "verify", "atoms", cfg.verify.atoms);
  cfg.verify.particles = positive_count(v, "verify", "particles", cfg.verify.particles);
  cfg.verify.radial_particles = positive_count(v, "verify", "radial_particles", cfg.verify.radial_particles);
  cfg.verify.K = get_opt<double>(v, "verify", "K");
  cfg.verify.theta = get_opt<double>(v, "verify", "theta");
  cfg.verify.zeta = get_opt<double>(v, "verify", "zeta");
  cfg.verify.K_scale = get_or(v, "verify", "K_scale", cfg.verify.K_scale);
  if (cfg.verify.atoms > cfg.verify.particles)
    throw ConfigError("config: \"verify.atoms\" must not exceed \"verify.particles\"");

  const json& c = section(root, "convergence", false);
  cfg.convergence.sweep = get_or(c, "convergence", "sweep", cfg.convergence.sweep);
  if (cfg.convergence.sweep != "h" && cfg.convergence.sweep != "N")
    throw ConfigError("config: \"convergence.sweep\" must be h or N");
  cfg.convergence.steps_per_delay = get_or(c, "convergence", "steps_per_delay", cfg.convergence.steps_per_delay);
  cfg.convergence.refinement = get_or(c, "convergence", "refinement", cfg.convergence.refinement);
  cfg.convergence.paths = positive_count(c, "convergence", "paths", cfg.convergence.paths);
  cfg.convergence.particles = get_or(c, "convergence", "particles", cfg.convergence.particles);
  cfg.convergence.seeds = positive_count(c, "convergence", "seeds", cfg.convergence.seeds);
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open \"" + path + "\"");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace mvsdde
