#pragma once

// Linear extended Gateaux derivative (LEGD) with scalar time.
//
// For a scale function psi(t, alpha) the LEGD of f is
//   d f^leg(t; psi) = lim_{eps->0} [f(t + eps*psi) - f(t)] / eps = psi * df/dt.
// Two scale functions are provided: the power law psi = t^(1-alpha) (the
// conformable derivative when alpha <= 1, any real alpha otherwise) and a
// positive constant.

#include <cmath>
#include <sstream>
#include <utility>

#include <Eigen/Core>

#include "ghnn/errors.hpp"

namespace ghnn {

enum class ScaleKind { PowerLaw, Constant };

template <typename Scalar>
struct ScaleFunction {
  ScaleKind kind = ScaleKind::PowerLaw;
  Scalar alpha = Scalar(1);
  Scalar constant_value = Scalar(1);  // Constant only

  static ScaleFunction power_law(Scalar alpha) {
    return {ScaleKind::PowerLaw, alpha, Scalar(1)};
  }
  static ScaleFunction constant(Scalar value = Scalar(1)) {
    return {ScaleKind::Constant, Scalar(1), value};
  }
};

using ScaleFunctiond = ScaleFunction<double>;

template <typename Scalar>
struct LegdSample {
  Scalar t;
  Scalar value;
};

/// psi(t, alpha). PowerLaw requires t > 0.
template <typename Scalar>
Scalar eval_psi(const ScaleFunction<Scalar>& sf, Scalar t) {
  using std::isfinite;
  using std::pow;
  if (sf.kind == ScaleKind::Constant) {
    if (!(sf.constant_value > Scalar(0)) || !isfinite(sf.constant_value)) {
      throw DomainError("constant scale function must be positive and finite");
    }
    return sf.constant_value;
  }
  if (!(t > Scalar(0))) {
    std::ostringstream os;
    os << "power-law scale function requires t > 0, got t = " << t;
    throw DomainError(os.str());
  }
  const Scalar psi = pow(t, Scalar(1) - sf.alpha);
  if (!isfinite(psi)) {
    std::ostringstream os;
    os << "psi(t = " << t << ", alpha = " << sf.alpha << ") is not finite";
    throw OverflowError(os.str());
  }
  return psi;
}

/// LEGD from a known classical derivative: psi(t) * df/dt.
template <typename Scalar>
Scalar legd_apply(Scalar derivative_value, const ScaleFunction<Scalar>& sf, Scalar t) {
  return eval_psi(sf, t) * derivative_value;
}

template <typename Scalar>
LegdSample<Scalar> legd_sample(Scalar derivative_value, const ScaleFunction<Scalar>& sf,
                               Scalar t) {
  return {t, legd_apply(derivative_value, sf, t)};
}

/// Defining difference quotient [f(t + eps*psi) - f(t)] / eps. Test oracle
/// for legd_apply; first order in eps.
template <typename Scalar, typename F>
Scalar legd_oracle(F&& f, const ScaleFunction<Scalar>& sf, Scalar t, Scalar eps = Scalar(1e-6)) {
  using std::isfinite;
  if (!(eps > Scalar(0))) throw DomainError("oracle step eps must be positive");
  const Scalar psi = eval_psi(sf, t);
  const Scalar f0 = f(t);
  const Scalar f1 = f(t + eps * psi);
  if (!isfinite(f0) || !isfinite(f1)) {
    throw DomainError("function is not finite at t or t + eps*psi");
  }
  return (f1 - f0) / eps;
}

/// One Richardson step on legd_oracle: 2 D(eps/2) - D(eps), second order in eps.
template <typename Scalar, typename F>
Scalar legd_oracle_richardson(F&& f, const ScaleFunction<Scalar>& sf, Scalar t,
                              Scalar eps = Scalar(1e-6)) {
  const Scalar coarse = legd_oracle(f, sf, t, eps);
  const Scalar fine = legd_oracle(f, sf, t, eps / Scalar(2));
  return Scalar(2) * fine - coarse;
}

/// Effective classical Euler step h / psi(t, alpha).
template <typename Scalar>
Scalar legd_effective_step(const ScaleFunction<Scalar>& sf, Scalar t, Scalar h) {
  using std::isfinite;
  if (!(h > Scalar(0))) throw DomainError("step size h must be positive");
  const Scalar eps = h / eval_psi(sf, t);
  if (!isfinite(eps)) {
    std::ostringstream os;
    os << "effective step h/psi is not finite at t = " << t;
    throw OverflowError(os.str());
  }
  return eps;
}

/// out = u + eps * rhs_value, the update kernel shared by every LEGD-Euler path.
template <typename DerivedU, typename DerivedR, typename DerivedOut>
void legd_euler_update(const Eigen::MatrixBase<DerivedU>& u,
                       const Eigen::MatrixBase<DerivedR>& rhs_value,
                       typename DerivedU::Scalar eps,
                       const Eigen::MatrixBase<DerivedOut>& out_) {
  auto& out = const_cast<Eigen::MatrixBase<DerivedOut>&>(out_);
  if (rhs_value.size() != u.size()) {
    throw DimensionError("right-hand side and state have different lengths");
  }
  out.derived().resize(u.rows(), u.cols());
  out = u + eps * rhs_value;
  if (!out.allFinite()) {
    throw OverflowError("LEGD-Euler step produced a non-finite state (step too large for alpha?)");
  }
}

/// u + (h / psi(t)) * classical_rhs(u, t), where classical_rhs is the
/// psi-free right-hand side of d(u)^leg = RHS.
template <typename Derived, typename Rhs>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> legd_euler_step(
    const Eigen::MatrixBase<Derived>& u, typename Derived::Scalar t,
    typename Derived::Scalar h, Rhs&& classical_rhs,
    const ScaleFunction<typename Derived::Scalar>& sf) {
  using Vector = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>;
  const auto eps = legd_effective_step(sf, t, h);
  const Vector state = u;
  const Vector rhs = std::forward<Rhs>(classical_rhs)(state, t);
  Vector next;
  legd_euler_update(state, rhs, eps, next);
  return next;
}

}  // namespace ghnn
