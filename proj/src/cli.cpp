#include "mvsdde/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mvsdde/convergence.hpp"
#include "mvsdde/csv_io.hpp"
#include "mvsdde/diagnostics.hpp"
#include "mvsdde/error.hpp"
#include "mvsdde/fixedpoint.hpp"
#include "mvsdde/parallel.hpp"
#include "mvsdde/particle.hpp"
#include "mvsdde/solver.hpp"

namespace mvsdde::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::ofstream open_out(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream out(dir / name);
  if (!out) throw InvalidArgument("cannot write " + (dir / name).string());
  return out;
}

void write_json(const fs::path& dir, const std::string& name, const json& doc) {
  auto out = open_out(dir, name);
  out << doc.dump(2) << '\n';
}

std::string time_tag(double t) { return "t" + format_double(t); }

int grid_index(const TimeGrid& grid, double t) {
  const double pos = t / grid.step();
  const double k = std::round(pos);
  if (std::abs(pos - k) > 1e-9 * std::max(1.0, std::abs(pos)) || k < 0 || k > grid.steps())
    throw ConfigError("config: requested time " + format_double(t) + " is not a grid time in [0, T]");
  return static_cast<int>(k);
}

json state_json(const DelayedState& x) {
  return json(std::vector<double>(x.data().data(), x.data().data() + x.data().size()));
}

json witness_json(const ProbeReport& r) {
  if (!r.witness) return nullptr;
  json w{{"sample", r.witness->sample},
         {"x", state_json(r.witness->x)},
         {"measure_index", r.witness->measure_index},
         {"lhs", r.witness->lhs},
         {"rhs", r.witness->rhs}};
  if (r.witness->y) w["y"] = state_json(*r.witness->y);
  return w;
}

std::string opt_cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

void write_probe_row(std::ostream& out, const std::string& name, const ProbeReport& r,
                     const std::optional<double>& declared, const std::optional<double>& declared_secondary) {
  out << name << ',' << r.samples << ',' << format_double(r.estimated_constant) << ','
      << opt_cell(r.estimated_secondary) << ',' << opt_cell(declared) << ',' << opt_cell(declared_secondary) << ','
      << format_double(r.worst_violation) << ',' << (r.inconclusive ? "inconclusive" : r.violated() ? "fail" : "pass");
  if (r.witness) {
    out << ',' << r.witness->sample << ',' << format_double(r.witness->lhs) << ',' << format_double(r.witness->rhs);
  } else {
    out << ",,,";
  }
  out << '\n';
}

constexpr const char* kProbeHeader =
    "probe,samples,estimated_constant,estimated_secondary,declared_constant,declared_secondary,worst_violation,status,"
    "witness_sample,witness_lhs,witness_rhs\n";

EmpiricalMeasure first_atoms(const EmpiricalMeasure& mu, std::size_t count) {
  return EmpiricalMeasure(mu.n_delays(), mu.dim(), mu.atoms().leftCols(static_cast<Eigen::Index>(count)));
}

}  // namespace

int cmd_simulate(const Config& config, std::uint64_t seed, const fs::path& out_dir) {
  const auto paths = simulate_particles(config.model, seed, config.run.particles, config.grid);
  {
    auto out = open_out(out_dir, "paths.csv");
    write_paths_csv(out, paths);
  }
  for (double t : config.run.measure_times) {
    const int k = grid_index(config.grid, t);
    auto out = open_out(out_dir, "measure_" + time_tag(config.grid.time(k)) + ".csv");
    write_measure_csv(out, empirical_from_ensemble(paths, config.grid.time(k), config.model));
  }
  if (config.model.lyapunov.zeta) {
    const MomentBound mb = moment_bound(config.model, paths);
    auto out = open_out(out_dir, "moment.csv");
    out << "observed,observed_se,argmax_t,bound,expected_V0,expected_xi_norm,zeta\n";
    out << format_double(mb.observed) << ',' << format_double(mb.observed_se) << ',' << format_double(mb.argmax_time)
        << ',' << format_double(mb.bound) << ',' << format_double(mb.expected_V0) << ','
        << format_double(mb.expected_xi_norm) << ',' << format_double(*config.model.lyapunov.zeta) << '\n';
  }
  return kSuccess;
}

int cmd_fixpoint(const Config& config, std::uint64_t seed, const fs::path& out_dir) {
  const PicardOptions options{config.fixpoint.lambda, config.fixpoint.tol, config.fixpoint.max_iter};
  const PicardReport report = picard_iterate(config.model, seed, config.fixpoint.particles, config.grid, options);
  {
    auto out = open_out(out_dir, "picard.csv");
    out << "iteration,distance,ratio\n";
    for (int k = 0; k < report.iterations; ++k)
      out << k + 1 << ',' << format_double(report.distances[k]) << ',' << opt_cell(report.ratios[k]) << '\n';
  }
  for (double t : config.fixpoint.dump_times) {
    const int k = grid_index(config.grid, t);
    auto out = open_out(out_dir, "final_flow_" + time_tag(config.grid.time(k)) + ".csv");
    write_measure_csv(out, report.final_flow.at(k));
  }
  json summary{{"model", config.model.name},
               {"seed", seed},
               {"particles", config.fixpoint.particles},
               {"iterations", report.iterations},
               {"converged", report.converged},
               {"tol", config.fixpoint.tol},
               {"lambda", report.lambda},
               {"final_distance", report.distances.back()},
               {"growth_monitored_N", report.growth.monitored_n},
               {"growth_ratios", report.growth.ratios}};
  if (report.calibration) {
    summary["calibrated_lambda"] = report.calibration->lambda;
    summary["calibrated_ratio"] = report.calibration->ratio;
    summary["calibration_achieved"] = report.calibration->achieved;
    summary["exact_fixed_point"] = report.calibration->exact_fixed_point;
  } else {
    summary["calibrated_lambda"] = nullptr;
  }
  write_json(out_dir, "summary.json", summary);
  return kSuccess;
}

int cmd_verify(const Config& config, std::uint64_t seed, const fs::path& out_dir) {
  const bool declared = config.verify.constants == "declared";
  ModelSpec model = config.model;
  if (config.verify.zeta) model.lyapunov.zeta = config.verify.zeta;
  if (config.verify.K) model.lipschitz_K = config.verify.K;
  if (config.verify.theta) model.measure_lipschitz_theta = config.verify.theta;
  if (model.lipschitz_K) model.lipschitz_K = *model.lipschitz_K * config.verify.K_scale;
  if (!declared) {
    model.lyapunov.zeta.reset();
    model.lipschitz_K.reset();
    model.measure_lipschitz_theta.reset();
  }
  const auto& v = config.verify;

  // Sample measures: ensemble snapshots plus random clouds, all with v.atoms atoms.
  const auto ensemble = simulate_particles(model, seed, v.particles, config.grid);
  std::vector<EmpiricalMeasure> measures;
  for (int k : {0, config.grid.steps() / 2, config.grid.steps()})
    measures.push_back(first_atoms(empirical_from_ensemble(ensemble, config.grid.time(k), model), v.atoms));
  for (auto& m : random_measures(model, v.random_measures, v.atoms, v.box, seed)) measures.push_back(std::move(m));

  std::vector<DelayedState> points = uniform_probe_points(model, v.probes, v.box, seed);
  for (const auto& m : measures)
    for (std::size_t j = 0; j < m.size(); ++j) points.push_back(m.atom(j));
  const LyapunovProbe lyap = check_lyapunov(model, points, measures, model.lyapunov.zeta);

  std::vector<MeasurePair> measure_pairs;
  for (const auto& a : measures)
    for (const auto& b : measures) measure_pairs.push_back(make_measure_pair(model, a, b));
  const auto pairs = probe_pairs(model, v.probes, v.box, seed);
  const ProbeReport lip = check_lipschitz(model, pairs, measure_pairs, model.lipschitz_K, model.measure_lipschitz_theta);

  {
    auto out = open_out(out_dir, "assumptions.csv");
    out << kProbeHeader;
    write_probe_row(out, "lyapunov", lyap.report, model.lyapunov.zeta, std::nullopt);
    write_probe_row(out, "lipschitz", lip, model.lipschitz_K, model.measure_lipschitz_theta);
  }

  json summary{{"model", model.name},
               {"seed", seed},
               {"mode", config.verify.constants},
               {"lyapunov",
                {{"estimated_zeta", lyap.report.estimated_constant},
                 {"generator_part", lyap.generator_constant},
                 {"diffusion_part", lyap.diffusion_constant},
                 {"declared_zeta", model.lyapunov.zeta ? json(*model.lyapunov.zeta) : json(nullptr)},
                 {"worst_violation", lyap.report.worst_violation},
                 {"passed", !lyap.report.violated()},
                 {"witness", witness_json(lyap.report)}}},
               {"lipschitz",
                {{"estimated_K", lip.estimated_constant},
                 {"estimated_theta", lip.estimated_secondary ? json(*lip.estimated_secondary) : json(nullptr)},
                 {"declared_K", model.lipschitz_K ? json(*model.lipschitz_K) : json(nullptr)},
                 {"declared_theta", model.measure_lipschitz_theta ? json(*model.measure_lipschitz_theta) : json(nullptr)},
                 {"worst_violation", lip.worst_violation},
                 {"inconclusive", lip.inconclusive},
                 {"passed", !lip.violated()},
                 {"witness", witness_json(lip)}}}};
  if (config.opinion) {
    const OpinionConstants c = opinion_constants(*config.opinion);
    summary["opinion_constants"] = {{"A", c.A}, {"K", c.K}, {"theta", c.theta}, {"zeta", c.zeta},
                                    {"zeta_squared_norm", c.zeta_squared_norm}};
  }
  bool passed = !lyap.report.violated() && !lip.violated();

  if (model.lyapunov.zeta) {
    const MomentBound mb = moment_bound(model, ensemble);
    const bool ok = mb.observed + 1.645 * mb.observed_se <= mb.bound;
    auto out = open_out(out_dir, "moment.csv");
    out << "observed,observed_se,argmax_t,bound,expected_V0,expected_xi_norm,status\n";
    out << format_double(mb.observed) << ',' << format_double(mb.observed_se) << ',' << format_double(mb.argmax_time)
        << ',' << format_double(mb.bound) << ',' << format_double(mb.expected_V0) << ','
        << format_double(mb.expected_xi_norm) << ',' << (ok ? "pass" : "fail") << '\n';
    summary["moment"] = {{"observed", mb.observed}, {"bound", mb.bound}, {"passed", ok}};
    passed = passed && ok;
  }

  if (model.lipschitz_K && model.measure_lipschitz_theta) {
    const std::size_t n = v.radial_particles;
    const NoiseBank noise(seed, n, config.grid, model.dim);
    const MeasureFlow mu0 = MeasureFlow::constant(config.grid, initial_law(model, config.grid, seed, n));
    const MeasureFlow mu1 = apply_H(model, mu0, noise, config.grid);
    const RadialReport radial = radial_check(model, mu0, mu1, seed, n, config.grid);
    auto out = open_out(out_dir, "radial.csv");
    out << "t,lhs,rhs,se,status\n";
    for (const auto& row : radial.rows)
      out << format_double(row.t) << ',' << format_double(row.lhs) << ',' << format_double(row.rhs) << ','
          << format_double(row.se) << ',' << (row.ok ? "pass" : "fail") << '\n';
    summary["radial"] = {{"passed", radial.passed}, {"K", radial.K}, {"theta", radial.theta}};
    passed = passed && radial.passed;
  }

  summary["passed"] = passed;
  write_json(out_dir, "summary.json", summary);
  return passed ? kSuccess : kVerificationFailed;
}

int cmd_transport(const std::string& file_a, const std::string& file_b, const std::string& psi_name,
                  const std::string& v_name, std::ostream& out) {
  const EmpiricalMeasure a = read_measure_csv_file(file_a);
  const EmpiricalMeasure b = read_measure_csv_file(file_b);
  const double w = wasserstein_psi_v(a, b, psi_by_name(psi_name), lyapunov_by_name(v_name));
  out << std::setprecision(12) << w << '\n';
  return kSuccess;
}

int cmd_convergence(const Config& config, std::uint64_t seed, const fs::path& out_dir) {
  const auto& c = config.convergence;
  if (c.sweep == "h") {
    if (!config.model.measure_free) throw ConfigError("convergence: the h sweep needs a measure-free model");
    const StrongOrderStudy study =
        strong_order_study(config.model, config.grid.horizon(), c.steps_per_delay, c.refinement, c.paths, seed);
    auto out = open_out(out_dir, "convergence_h.csv");
    out << "steps_per_delay,h,rms_error\n";
    for (const auto& row : study.rows)
      out << row.steps_per_delay << ',' << format_double(row.h) << ',' << format_double(row.rms_error) << '\n';
    write_json(out_dir, "summary.json",
               {{"sweep", "h"}, {"order", study.order}, {"reference_steps_per_delay", study.reference_steps_per_delay}});
    return kSuccess;
  }
  const PicardOptions options{config.fixpoint.lambda, config.fixpoint.tol, config.fixpoint.max_iter};
  auto out = open_out(out_dir, "convergence_N.csv");
  out << "particles,seed,w1,picard_converged,picard_iterations\n";
  json medians = json::object();
  for (std::size_t n : c.particles) {
    std::vector<double> w;
    for (std::size_t s = 0; s < c.seeds; ++s) {
      const ChaosSample sample = particle_vs_fixpoint(config.model, config.grid, n, seed + s, options);
      out << n << ',' << sample.seed << ',' << format_double(sample.w1) << ',' << sample.picard_converged << ','
          << sample.picard_iterations << '\n';
      w.push_back(sample.w1);
    }
    std::sort(w.begin(), w.end());
    const std::size_t mid = w.size() / 2;
    medians[std::to_string(n)] = w.size() % 2 ? w[mid] : 0.5 * (w[mid - 1] + w[mid]);
  }
  write_json(out_dir, "summary.json", {{"sweep", "N"}, {"median_w1", medians}});
  return kSuccess;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"McKean-Vlasov delay equations: simulation, fixed point and verification", "mvsdde"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = kDefaultSeed;
  std::string out_dir = "out";
  int threads = 1;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON configuration file")->required();
    sub->add_option("--seed", seed, "random seed")->capture_default_str();
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  };
  auto* simulate = app.add_subcommand("simulate", "interacting particle simulation");
  auto* fixpoint = app.add_subcommand("fixpoint", "Picard iteration of the law map");
  auto* verify = app.add_subcommand("verify", "probe the structural assumptions and bounds");
  auto* convergence = app.add_subcommand("convergence", "error tables over h or N");
  for (auto* sub : {simulate, fixpoint, verify, convergence}) add_common(sub);

  auto* transport = app.add_subcommand("transport", "W_{psi,V} distance between two measure files");
  std::string file_a, file_b, psi_name = "identity", v_name = "quadratic";
  transport->add_option("file_a", file_a)->required();
  transport->add_option("file_b", file_b)->required();
  transport->add_option("--psi", psi_name, "identity | quadratic")->capture_default_str();
  transport->add_option("--V", v_name, "zero | quadratic")->capture_default_str();
  transport->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
  set_num_threads(threads);

  try {
    if (transport->parsed()) return cmd_transport(file_a, file_b, psi_name, v_name, out);
    const Config config = load_config(config_path);
    if (simulate->parsed()) return cmd_simulate(config, seed, out_dir);
    if (fixpoint->parsed()) return cmd_fixpoint(config, seed, out_dir);
    if (verify->parsed()) return cmd_verify(config, seed, out_dir);
    return cmd_convergence(config, seed, out_dir);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumericFailure;
  }
}

}  // namespace mvsdde::cli
