#pragma once

#include <functional>
#include <string>

#include "encmf/types.hpp"

namespace encmf {

struct Lorenz63Params {
  double sigma = 10.0;
  double rho = 28.0;
  double beta = 8.0 / 3.0;
};

// Classic three-variable convection system. Chaotic at the default parameters.
Vector lorenz63_rhs(const Vector& q, const Lorenz63Params& params = {});

// Cyclic advection model dq_j/dt = (q_{j+1} - q_{j-2}) q_{j-1} - q_j + F with
// periodic indices. Requires dim >= 4 so the stencil never self-overlaps.
Vector lorenz96_rhs(const Vector& q, double forcing = 8.0);

using RhsFn = std::function<Vector(double t, const Vector& q)>;

// One classical fourth-order Runge-Kutta step.
Vector rk4_step(const RhsFn& rhs, double t, const Vector& q, double dt);

// Integrates from t0 over `duration` in uniform steps of `dt`. `duration` must
// be a positive near-integer multiple of `dt`; the step count is rounded to the
// nearest integer and a relative mismatch above 1e-6 is rejected. Any
// intermediate state with a component beyond 1e6 in magnitude raises
// NumericalError (trajectory blow-up).
Vector propagate(const RhsFn& rhs, double t0, Vector q, double duration,
                 double dt);

// Named dynamics with a fixed state dimension, wrapping the rhs plus the RK4
// integrator. Recognized names: "lorenz63", "lorenz96".
class DynamicsModel {
 public:
  static DynamicsModel lorenz63(Lorenz63Params params = {});
  static DynamicsModel lorenz96(Eigen::Index dim = 40, double forcing = 8.0);
  static DynamicsModel from_name(const std::string& name);

  Vector rhs(double t, const Vector& q) const { return rhs_(t, q); }
  Vector step(double t, const Vector& q, double dt) const {
    return rk4_step(rhs_, t, q, dt);
  }
  Vector integrate(double t0, Vector q, double duration, double dt) const {
    return propagate(rhs_, t0, std::move(q), duration, dt);
  }

  Eigen::Index dim() const { return dim_; }
  const std::string& name() const { return name_; }

 private:
  DynamicsModel(std::string name, Eigen::Index dim, RhsFn rhs);

  std::string name_;
  Eigen::Index dim_;
  RhsFn rhs_;
};

}  // namespace encmf
