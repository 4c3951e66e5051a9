#include "mvsdde/model.hpp"

#include <cmath>
#include <sstream>

#include "mvsdde/error.hpp"
#include "mvsdde/measure.hpp"

namespace mvsdde {

DelayedState::DelayedState(int n_delays, int dim, Eigen::VectorXd data)
    : n_(n_delays), d_(dim), data_(std::move(data)) {
  if (data_.size() != (n_ + 1) * d_)
    throw InvalidArgument("DelayedState: data length does not match (n+1)*d");
}

DelayedState DelayedState::from_components(const std::vector<Eigen::VectorXd>& components) {
  if (components.empty()) throw InvalidArgument("DelayedState: no components");
  const int d = static_cast<int>(components.front().size());
  const int n = static_cast<int>(components.size()) - 1;
  DelayedState out(n, d);
  for (int j = 0; j <= n; ++j) {
    if (components[j].size() != d) throw InvalidArgument("DelayedState: components differ in dimension");
    out.data_.segment(j * d, d) = components[j];
  }
  return out;
}

DelayedState DelayedState::scalar(std::initializer_list<double> components) {
  const int n = static_cast<int>(components.size()) - 1;
  if (n < 0) throw InvalidArgument("DelayedState: no components");
  DelayedState out(n, 1);
  int j = 0;
  for (double c : components) out.data_(j++) = c;
  return out;
}

ParticlePath::ParticlePath(TimeGrid grid, std::size_t particle_index, int dim)
    : grid_(grid), particle_(particle_index), values_(Eigen::MatrixXd::Zero(dim, grid.n_points())) {}

PathSample ParticlePath::sample(double s) const {
  const double h = grid_.step();
  const int m = grid_.steps_per_delay();
  const double pos = s / h;
  const double nearest = std::round(pos);
  const double slack = 1e-9 * std::max(1.0, std::abs(pos));
  if (pos < -m - slack || pos > grid_.steps() + slack) {
    std::ostringstream msg;
    msg << "path lookup at t=" << s << " outside [-tau, T]";
    throw InvalidArgument(msg.str());
  }
  if (std::abs(pos - nearest) <= slack) return {at(static_cast<int>(nearest)), true};
  const int lo = static_cast<int>(std::floor(pos));
  const double w = pos - lo;
  return {(1.0 - w) * at(lo) + w * at(lo + 1), false};
}

double LyapunovSpec::joint(const DelayedState& x) const {
  double total = 0.0;
  for (int i = 0; i <= x.n_delays(); ++i) total += value(x.lag(i));
  return total;
}

LyapunovSpec quadratic_lyapunov() {
  LyapunovSpec v;
  v.name = "quadratic";
  v.value = [](const Eigen::VectorXd& x) { return x.squaredNorm(); };
  v.gradient = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return 2.0 * x; };
  v.hessian = [](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    return 2.0 * Eigen::MatrixXd::Identity(x.size(), x.size());
  };
  v.p = 2.0;
  v.c1 = 1.0;
  v.c2 = 1.0;
  return v;
}

LyapunovSpec zero_lyapunov() {
  LyapunovSpec v;
  v.name = "zero";
  v.value = [](const Eigen::VectorXd&) { return 0.0; };
  v.gradient = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return Eigen::VectorXd::Zero(x.size()); };
  v.hessian = [](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    return Eigen::MatrixXd::Zero(x.size(), x.size());
  };
  v.c1 = 0.0;
  v.c2 = 0.0;
  return v;
}

namespace {
double fd_step(double x) { return 1e-5 * std::max(1.0, std::abs(x)); }
}  // namespace

Eigen::VectorXd fd_gradient(const LyapunovSpec& v, const Eigen::VectorXd& x) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double step = fd_step(x(j));
    Eigen::VectorXd up = x, down = x;
    up(j) += step;
    down(j) -= step;
    g(j) = (v(up) - v(down)) / (2.0 * step);
  }
  return g;
}

Eigen::MatrixXd fd_hessian(const LyapunovSpec& v, const Eigen::VectorXd& x) {
  const Eigen::Index d = x.size();
  Eigen::MatrixXd hess(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double step = fd_step(x(j));
    Eigen::VectorXd up = x, down = x;
    up(j) += step;
    down(j) -= step;
    hess.col(j) = (v.gradient ? v.gradient(up) - v.gradient(down) : fd_gradient(v, up) - fd_gradient(v, down)) /
                  (2.0 * step);
  }
  return 0.5 * (hess + hess.transpose());
}

PsiSpec identity_psi() {
  return {"identity", [](double r) { return r; }, [](double) { return 1.0; }};
}

PsiSpec quadratic_psi() {
  return {"quadratic", [](double r) { return r + 0.5 * r * r; }, [](double r) { return 1.0 + r; }};
}

PsiSpec psi_by_name(const std::string& name) {
  if (name == "identity" || name == "id") return identity_psi();
  if (name == "quadratic") return quadratic_psi();
  throw InvalidArgument("unknown psi '" + name + "' (expected identity or quadratic)");
}

LyapunovSpec lyapunov_by_name(const std::string& name) {
  if (name == "zero") return zero_lyapunov();
  if (name == "quadratic") return quadratic_lyapunov();
  throw InvalidArgument("unknown V '" + name + "' (expected zero or quadratic)");
}

Delay constant_delay(double value) {
  return {[value](double) { return value; }, value};
}

Delay varying_delay(std::function<double(double)> fn) { return {std::move(fn), std::nullopt}; }

void validate_model(const ModelSpec& model, double horizon) {
  if (model.dim < 1) throw InvalidArgument("model: dimension must be >= 1");
  if (!(model.tau > 0.0)) throw InvalidArgument("model: tau must be positive");
  if (model.delays.empty()) throw InvalidArgument("model: at least one delay is required");
  if (!model.drift || !model.diffusion || !model.initial_segment)
    throw InvalidArgument("model: drift, diffusion and initial segment must be set");
  constexpr int kProbes = 1024;
  for (std::size_t i = 0; i < model.delays.size(); ++i) {
    for (int k = 0; k <= kProbes; ++k) {
      const double t = horizon * k / kProbes;
      const double value = model.delays[i](t);
      if (!(value > 0.0) || value > model.tau * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "model: delay " << i + 1 << " takes value " << value << " at t=" << t
            << ", outside (0, tau=" << model.tau << "]";
        throw InvalidArgument(msg.str());
      }
    }
  }
}

double eval_norm(const DelayedState& x, const DelayedState& y) {
  if (!x.same_shape(y)) throw InvalidArgument("eval_norm: shape mismatch");
  double total = 0.0;
  for (int i = 0; i <= x.n_delays(); ++i) total += (x.lag(i) - y.lag(i)).norm();
  return total / (x.n_delays() + 1);
}

double eval_generator(const DelayedState& x, const EmpiricalMeasure& mu, const ModelSpec& model) {
  if (x.dim() != model.dim || x.n_delays() != model.n_delays())
    throw InvalidArgument("eval_generator: state shape does not match the model");
  if (mu.dim() != x.dim() || mu.n_delays() != x.n_delays())
    throw InvalidArgument("eval_generator: measure shape does not match the state");
  const Eigen::VectorXd x0 = x.current();
  const Eigen::VectorXd b = model.drift(x, mu);
  const Eigen::MatrixXd sigma = model.diffusion(x);
  const Eigen::VectorXd grad = model.lyapunov.gradient(x0);
  const Eigen::MatrixXd hess = model.lyapunov.hessian(x0);
  return grad.dot(b) + 0.5 * (sigma.transpose() * hess * sigma).trace();
}

PathSample eval_history(const ParticlePath& path, double t, const Delay& delay) {
  const double lag = delay(t);
  if (!(lag > 0.0)) throw InvalidArgument("eval_history: delay must be positive");
  const double s = t - lag;
  if (s < -path.grid().tau() * (1.0 + 1e-12) - 1e-12)
    throw InvalidArgument("eval_history: lookup before -tau");
  return path.sample(std::max(s, -path.grid().tau()));
}

DelayedState joint_state(const ParticlePath& path, double t, const ModelSpec& model) {
  DelayedState x(model.n_delays(), model.dim);
  x.lag(0) = path.sample(t).value;
  for (int i = 1; i <= model.n_delays(); ++i) x.lag(i) = eval_history(path, t, model.delays[i - 1]).value;
  return x;
}

}  // namespace mvsdde
