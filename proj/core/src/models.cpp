#include "encmf/models.hpp"

#include <cmath>
#include <utility>

namespace encmf {

namespace {

constexpr double kBlowUpLimit = 1e6;

void check_finite_bounded(const Vector& q) {
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    const double v = q[i];
    if (!std::isfinite(v) || std::abs(v) > kBlowUpLimit)
      throw NumericalError("propagate: trajectory blew up (|q| > 1e6)");
  }
}

}  // namespace

Vector lorenz63_rhs(const Vector& q, const Lorenz63Params& params) {
  if (q.size() != 3) throw DomainError("lorenz63_rhs: state must have dim 3");
  Vector dq(3);
  dq[0] = params.sigma * (q[1] - q[0]);
  dq[1] = q[0] * (params.rho - q[2]) - q[1];
  dq[2] = q[0] * q[1] - params.beta * q[2];
  return dq;
}

Vector lorenz96_rhs(const Vector& q, double forcing) {
  const Eigen::Index n = q.size();
  if (n < 4) throw DomainError("lorenz96_rhs: state must have dim >= 4");
  Vector dq(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index jp1 = (j + 1) % n;
    const Eigen::Index jm1 = (j + n - 1) % n;
    const Eigen::Index jm2 = (j + n - 2) % n;
    dq[j] = (q[jp1] - q[jm2]) * q[jm1] - q[j] + forcing;
  }
  return dq;
}

Vector rk4_step(const RhsFn& rhs, double t, const Vector& q, double dt) {
  const Vector k1 = rhs(t, q);
  const Vector k2 = rhs(t + 0.5 * dt, q + (0.5 * dt) * k1);
  const Vector k3 = rhs(t + 0.5 * dt, q + (0.5 * dt) * k2);
  const Vector k4 = rhs(t + dt, q + dt * k3);
  return q + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Vector propagate(const RhsFn& rhs, double t0, Vector q, double duration,
                 double dt) {
  if (!(dt > 0.0)) throw DomainError("propagate: dt must be > 0");
  if (!(duration > 0.0)) throw DomainError("propagate: duration must be > 0");
  const double ratio = duration / dt;
  const long long steps = std::llround(ratio);
  if (steps < 1 || std::abs(ratio - static_cast<double>(steps)) > 1e-6 * ratio)
    throw DomainError("propagate: duration must be an integer multiple of dt");
  check_finite_bounded(q);
  for (long long s = 0; s < steps; ++s) {
    q = rk4_step(rhs, t0 + static_cast<double>(s) * dt, q, dt);
    check_finite_bounded(q);
  }
  return q;
}

DynamicsModel::DynamicsModel(std::string name, Eigen::Index dim, RhsFn rhs)
    : name_(std::move(name)), dim_(dim), rhs_(std::move(rhs)) {}

DynamicsModel DynamicsModel::lorenz63(Lorenz63Params params) {
  return DynamicsModel("lorenz63", 3, [params](double, const Vector& q) {
    return lorenz63_rhs(q, params);
  });
}

DynamicsModel DynamicsModel::lorenz96(Eigen::Index dim, double forcing) {
  if (dim < 4) throw DomainError("DynamicsModel::lorenz96: dim must be >= 4");
  return DynamicsModel("lorenz96", dim, [forcing](double, const Vector& q) {
    return lorenz96_rhs(q, forcing);
  });
}

DynamicsModel DynamicsModel::from_name(const std::string& name) {
  if (name == "lorenz63") return lorenz63();
  if (name == "lorenz96") return lorenz96();
  throw ConfigError("unknown dynamics model: " + name);
}

}  // namespace encmf
