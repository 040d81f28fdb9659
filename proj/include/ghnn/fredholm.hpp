#pragma once

// Quadrature discretization of first-kind Fredholm operators
//   g(x) = int_a^b k(x, y) f(y) dy
// and the (x + y)^-1 prototype on [1, 5].

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Core>
#include <Eigen/SVD>

#include "ghnn/errors.hpp"
#include "ghnn/hopfield.hpp"

namespace ghnn {

enum class QuadratureKind { Midpoint };

template <typename Scalar>
struct Quadrature {
  QuadratureKind kind = QuadratureKind::Midpoint;
  Scalar a = Scalar(0);
  Scalar b = Scalar(1);
  Eigen::Index n = 1;

  void validate() const {
    if (!(b > a) || !std::isfinite(a) || !std::isfinite(b)) throw DomainError("quadrature needs a < b");
    if (n < 1) throw DomainError("quadrature needs at least one node");
  }

  Scalar width() const { return (b - a) / static_cast<Scalar>(n); }

  /// y_j = a + (j - 1/2) (b - a) / n, j = 1..n
  Vec<Scalar> nodes() const {
    validate();
    Vec<Scalar> y(n);
    const Scalar w = width();
    for (Eigen::Index j = 0; j < n; ++j) y[j] = a + (static_cast<Scalar>(j) + Scalar(0.5)) * w;
    return y;
  }

  Vec<Scalar> weights() const {
    validate();
    return Vec<Scalar>::Constant(n, width());
  }
};

/// K_ij = w_j k(x_i, y_j).
template <typename Scalar, typename Kernel>
Mat<Scalar> discretize(Kernel&& kernel, const Quadrature<Scalar>& quad, const Vec<Scalar>& x_nodes) {
  const Vec<Scalar> y = quad.nodes();
  const Vec<Scalar> w = quad.weights();
  Mat<Scalar> K(x_nodes.size(), y.size());
  for (Eigen::Index i = 0; i < x_nodes.size(); ++i) {
    for (Eigen::Index j = 0; j < y.size(); ++j) {
      const Scalar kij = kernel(x_nodes[i], y[j]);
      if (!std::isfinite(kij)) {
        std::ostringstream os;
        os << "kernel is not finite at (x, y) = (" << x_nodes[i] << ", " << y[j] << ")";
        throw DomainError(os.str());
      }
      K(i, j) = w[j] * kij;
    }
  }
  return K;
}

/// How the prototype's right-hand side is produced.
///  ClosedForm:   g_i = x_i^-1 ln((1 + x_i/a) / (1 + x_i/b))
///  InverseCrime: g = K f_exact (the discrete system is exactly consistent)
enum class DataMode { ClosedForm, InverseCrime };

inline const char* to_string(DataMode mode) {
  return mode == DataMode::ClosedForm ? "closed-form" : "inverse-crime";
}

template <typename Scalar>
struct PrototypeSpec {
  Scalar a = Scalar(1);
  Scalar b = Scalar(5);
  Eigen::Index n = 22;
  Eigen::Index m = 22;
  DataMode data = DataMode::ClosedForm;
};

template <typename Scalar>
Scalar prototype_kernel(Scalar x, Scalar y) {
  return Scalar(1) / (x + y);
}

template <typename Scalar>
Scalar prototype_solution(Scalar y) {
  return Scalar(1) / y;
}

/// Exact data of the prototype, int_a^b (x + y)^-1 y^-1 dy.
template <typename Scalar>
Scalar prototype_data(Scalar x, Scalar a, Scalar b) {
  using std::log;
  return log((Scalar(1) + x / a) / (Scalar(1) + x / b)) / x;
}

/// Midpoint discretization of the prototype. The x-grid is the midpoint grid
/// with m nodes on [a, b], which coincides with the y-grid when m == n.
template <typename Scalar>
InverseProblem<Scalar> prototype(const PrototypeSpec<Scalar>& spec = {}) {
  if (!(spec.a > Scalar(0))) throw DomainError("prototype needs a > 0");
  if (spec.m < 1) throw DomainError("prototype needs m >= 1");
  const Quadrature<Scalar> yquad{QuadratureKind::Midpoint, spec.a, spec.b, spec.n};
  const Quadrature<Scalar> xquad{QuadratureKind::Midpoint, spec.a, spec.b, spec.m};
  const Vec<Scalar> y = yquad.nodes();
  const Vec<Scalar> x = xquad.nodes();

  InverseProblem<Scalar> p;
  p.K = discretize([](Scalar xi, Scalar yj) { return prototype_kernel(xi, yj); }, yquad, x);
  p.f_exact = y.unaryExpr([](Scalar v) { return prototype_solution(v); });
  p.grid = y;
  if (spec.data == DataMode::ClosedForm) {
    p.g = x.unaryExpr([&](Scalar xi) { return prototype_data(xi, spec.a, spec.b); });
  } else {
    p.g = p.K * *p.f_exact;
  }
  return p;
}

/// sigma_max / sigma_min via two-sided Jacobi SVD. Returns +inf when
/// sigma_min is exactly zero. sigma_min below ~ machine epsilon * sigma_max
/// is rounding noise, so only the order of magnitude is meaningful for
/// numerically singular matrices.
template <typename Derived>
typename Derived::Scalar condition_number(const Eigen::MatrixBase<Derived>& K) {
  using Scalar = typename Derived::Scalar;
  if (K.size() == 0) throw DimensionError("condition number of an empty matrix");
  if (!K.allFinite()) throw DomainError("condition number needs finite entries");
  Eigen::JacobiSVD<Mat<Scalar>> svd(K.eval());
  if (svd.info() != Eigen::Success) throw ConvergenceError("singular value iteration failed");
  const auto& s = svd.singularValues();
  const Scalar smax = s[0];
  const Scalar smin = s[s.size() - 1];
  if (smin == Scalar(0)) return std::numeric_limits<Scalar>::infinity();
  return smax / smin;
}

}  // namespace ghnn
