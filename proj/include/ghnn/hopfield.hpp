#pragma once

// Gateaux-Hopfield neural network (GHNN) for linear systems K f = g.
//
// Neuron states u evolve by d(u)^leg = K^T g - K^T K f(u) with a monotone
// activation f, i.e. du/dt = [K^T g - K^T K f(u)] / psi(t, alpha), and are
// integrated with the LEGD-Euler rule u_{i+1} = u_i + (h / psi(t_i)) * RHS.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Core>

#include "ghnn/errors.hpp"
#include "ghnn/legd.hpp"

namespace ghnn {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
struct InverseProblem {
  Mat<Scalar> K;                       // m x n, quadrature weights folded in
  Vec<Scalar> g;                       // m
  std::optional<Vec<Scalar>> f_exact;  // n
  std::optional<Vec<Scalar>> grid;     // n, solution nodes

  Eigen::Index rows() const { return K.rows(); }
  Eigen::Index cols() const { return K.cols(); }

  void validate() const {
    if (K.rows() < 1 || K.cols() < 1) throw DimensionError("K must be at least 1x1");
    if (g.size() != K.rows()) throw DimensionError("g length must equal the row count of K");
    if (f_exact && f_exact->size() != K.cols()) {
      throw DimensionError("f_exact length must equal the column count of K");
    }
    if (grid && grid->size() != K.cols()) {
      throw DimensionError("grid length must equal the column count of K");
    }
    if (!K.allFinite() || !g.allFinite()) throw DomainError("K and g must be finite");
    if (f_exact && !f_exact->allFinite()) throw DomainError("f_exact must be finite");
  }
};

using InverseProblemd = InverseProblem<double>;

enum class ActivationKind { Identity, Tanh };

/// Strictly increasing neuron activation: Identity f(u) = u,
/// Tanh f(u) = scale * tanh(gain * u).
template <typename Scalar>
struct Activation {
  ActivationKind kind = ActivationKind::Identity;
  Scalar gain = Scalar(1);
  Scalar scale = Scalar(1);

  static Activation identity() { return {}; }
  static Activation tanh(Scalar gain, Scalar scale) {
    return {ActivationKind::Tanh, gain, scale};
  }

  void validate() const {
    if (kind == ActivationKind::Tanh &&
        !(gain > Scalar(0) && scale > Scalar(0) && std::isfinite(gain) && std::isfinite(scale))) {
      throw ConfigError("tanh activation needs positive finite gain and scale");
    }
  }

  template <typename DerivedU, typename DerivedOut>
  void apply(const Eigen::MatrixBase<DerivedU>& u, const Eigen::MatrixBase<DerivedOut>& out_) const {
    auto& out = const_cast<Eigen::MatrixBase<DerivedOut>&>(out_);
    if (kind == ActivationKind::Identity) {
      out = u;
    } else {
      out = scale * (gain * u.array()).tanh().matrix();
    }
  }

  template <typename Derived>
  Vec<Scalar> operator()(const Eigen::MatrixBase<Derived>& u) const {
    Vec<Scalar> f(u.size());
    apply(u, f);
    return f;
  }

  /// df/du componentwise.
  template <typename Derived>
  Vec<Scalar> derivative(const Eigen::MatrixBase<Derived>& u) const {
    if (kind == ActivationKind::Identity) return Vec<Scalar>::Ones(u.size());
    const auto th = (gain * u.array()).tanh();
    return (scale * gain * (Scalar(1) - th.square())).matrix();
  }
};

/// Quantity compared against the tolerance. Cost is Phi = 0.5 ||K f - g||^2,
/// ResidualNorm is ||K f - g||_2.
enum class StopMetric { Cost, ResidualNorm };

template <typename Scalar>
struct SolverConfig {
  ScaleFunction<Scalar> sf = ScaleFunction<Scalar>::power_law(Scalar(1));
  Activation<Scalar> activation = Activation<Scalar>::identity();
  Scalar t0 = Scalar(0.01);
  Scalar h = Scalar(0.5);
  Scalar tol = Scalar(1e-11);
  std::int64_t max_steps = 10'000'000;
  Vec<Scalar> u0;                 // empty means the zero vector
  std::int64_t snapshot_every = 0;  // 0: norms only
  std::int64_t record_every = 1;    // residual-norm recording stride
  StopMetric stop_metric = StopMetric::Cost;
  Scalar divergence_factor = Scalar(1e12);

  void validate(Eigen::Index n) const {
    if (!(t0 > Scalar(0)) || !std::isfinite(t0)) throw DomainError("t0 must be positive (psi is singular at t = 0)");
    if (!(h > Scalar(0)) || !std::isfinite(h)) throw ConfigError("h must be positive");
    if (!(tol > Scalar(0))) throw ConfigError("tol must be positive");
    if (max_steps < 1) throw ConfigError("max_steps must be positive");
    if (snapshot_every < 0) throw ConfigError("snapshot_every must be non-negative");
    if (record_every < 1) throw ConfigError("record_every must be positive");
    if (!(divergence_factor > Scalar(1))) throw ConfigError("divergence_factor must exceed 1");
    if (u0.size() != 0 && u0.size() != n) throw DimensionError("u0 length must equal the column count of K");
    if (u0.size() != 0 && !u0.allFinite()) throw DomainError("u0 must be finite");
    activation.validate();
    if (sf.kind == ScaleKind::Constant) eval_psi(sf, t0);
  }
};

using SolverConfigd = SolverConfig<double>;

template <typename Scalar>
struct Snapshot {
  std::int64_t step;
  Scalar t;
  Vec<Scalar> f;
};

template <typename Scalar>
struct Trajectory {
  std::vector<std::int64_t> steps;
  std::vector<Scalar> times;
  std::vector<Scalar> residual_norms;
  std::vector<Snapshot<Scalar>> snapshots;

  std::size_t size() const { return times.size(); }
};

template <typename Scalar>
struct SolveResult {
  Vec<Scalar> f_final;
  Vec<Scalar> u_final;
  std::int64_t steps_taken = 0;
  bool converged = false;
  bool diverged = false;
  Scalar final_residual_norm = Scalar(0);
  Scalar final_cost = Scalar(0);
  Scalar final_metric = Scalar(0);  // the quantity compared with tol
  Trajectory<Scalar> trajectory;
  double wall_time_seconds = 0.0;
  std::string message;
};

using SolveResultd = SolveResult<double>;

/// Per-step view handed to a solve observer.
template <typename Scalar>
struct StepInfo {
  std::int64_t step;
  Scalar t;
  Scalar psi;
  Scalar effective_step;  // h / psi
  const Vec<Scalar>& u;
  const Vec<Scalar>& rhs;
  const Vec<Scalar>& u_next;
};

template <typename Scalar>
using StepObserver = std::function<void(const StepInfo<Scalar>&)>;

namespace detail {
template <typename Scalar, typename Derived>
void check_length(const InverseProblem<Scalar>& p, const Eigen::MatrixBase<Derived>& v) {
  if (v.size() != p.cols()) {
    std::ostringstream os;
    os << "vector of length " << v.size() << " does not match the " << p.cols()
       << " columns of K";
    throw DimensionError(os.str());
  }
}
}  // namespace detail

/// Phi = 0.5 * ||K f - g||^2.
template <typename Scalar, typename Derived>
Scalar cost(const InverseProblem<Scalar>& problem, const Eigen::MatrixBase<Derived>& f) {
  detail::check_length(problem, f);
  return Scalar(0.5) * (problem.K * f - problem.g).squaredNorm();
}

template <typename Scalar, typename Derived>
Scalar residual_norm(const InverseProblem<Scalar>& problem, const Eigen::MatrixBase<Derived>& f) {
  detail::check_length(problem, f);
  return (problem.K * f - problem.g).norm();
}

/// K^T g - K^T K f(u), the psi-free LEGD of the neuron states.
template <typename Scalar, typename Derived>
Vec<Scalar> ghnn_rhs(const InverseProblem<Scalar>& problem, const Activation<Scalar>& activation,
                     const Eigen::MatrixBase<Derived>& u) {
  detail::check_length(problem, u);
  const Vec<Scalar> f = activation(u);
  const Vec<Scalar> r = problem.K * f - problem.g;
  return -(problem.K.transpose() * r);
}

/// Integrates the GHNN from (t0, u0) with LEGD-Euler until the stop metric
/// drops to tol, max_steps is reached, or the iteration diverges.
///
/// Divergence (non-finite state, or residual norm above divergence_factor
/// times its initial value) ends the run with diverged = true and keeps the
/// last finite state. The trajectory always contains the initial and final
/// records; intermediate ones every record_every steps.
template <typename Scalar>
SolveResult<Scalar> solve(const InverseProblem<Scalar>& problem, const SolverConfig<Scalar>& config,
                          const std::type_identity_t<StepObserver<Scalar>>& observer = {}) {
  problem.validate();
  const Eigen::Index n = problem.cols();
  config.validate(n);

  const auto& K = problem.K;
  const auto& g = problem.g;
  const auto& act = config.activation;

  Vec<Scalar> u = config.u0.size() == 0 ? Vec<Scalar>::Zero(n) : config.u0;
  Vec<Scalar> f(n), r(K.rows()), rhs(n), next(n);
  act.apply(u, f);
  r.noalias() = K * f;
  r -= g;
  Scalar sq = r.squaredNorm();

  SolveResult<Scalar> result;
  auto& traj = result.trajectory;
  const auto time_at = [&](std::int64_t i) { return config.t0 + static_cast<Scalar>(i) * config.h; };
  const auto record = [&](std::int64_t i) {
    traj.steps.push_back(i);
    traj.times.push_back(time_at(i));
    traj.residual_norms.push_back(std::sqrt(sq));
  };
  const auto snapshot = [&](std::int64_t i) { traj.snapshots.push_back({i, time_at(i), f}); };
  const auto metric = [&] {
    return config.stop_metric == StopMetric::Cost ? Scalar(0.5) * sq : std::sqrt(sq);
  };

  const Scalar initial_norm = std::sqrt(sq);
  std::int64_t i = 0;
  record(0);
  if (config.snapshot_every > 0) snapshot(0);

  const auto start = std::chrono::steady_clock::now();
  for (;;) {
    if (metric() <= config.tol) {
      result.converged = true;
      break;
    }
    if (i >= config.max_steps) break;

    const Scalar t = time_at(i);
    try {
      const Scalar eps = legd_effective_step(config.sf, t, config.h);
      rhs.noalias() = -(K.transpose() * r);
      legd_euler_update(u, rhs, eps, next);
      if (observer) observer({i, t, eval_psi(config.sf, t), eps, u, rhs, next});
    } catch (const OverflowError& e) {
      result.diverged = true;
      result.message = e.what();
      break;
    }
    u.swap(next);
    ++i;

    act.apply(u, f);
    r.noalias() = K * f;
    r -= g;
    const Scalar new_sq = r.squaredNorm();
    if (!std::isfinite(new_sq) || std::sqrt(new_sq) > config.divergence_factor * initial_norm) {
      // Roll back to the last state whose residual was acceptable.
      u.swap(next);
      --i;
      act.apply(u, f);
      result.diverged = true;
      std::ostringstream os;
      os << "residual norm blew up at step " << i + 1 << " (t = " << time_at(i) << ")";
      result.message = os.str();
      break;
    }
    sq = new_sq;
    if (i % config.record_every == 0) record(i);
    if (config.snapshot_every > 0 && i % config.snapshot_every == 0) snapshot(i);
  }
  const auto stop = std::chrono::steady_clock::now();

  if (traj.steps.back() != i) record(i);
  if (config.snapshot_every > 0 && traj.snapshots.back().step != i) snapshot(i);

  result.wall_time_seconds = std::chrono::duration<double>(stop - start).count();
  result.steps_taken = i;
  result.u_final = std::move(u);
  result.f_final = std::move(f);
  result.final_residual_norm = std::sqrt(sq);
  result.final_cost = Scalar(0.5) * sq;
  result.final_metric = metric();
  return result;
}

}  // namespace ghnn
