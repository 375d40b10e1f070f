#pragma once

#include "boussinesq/wave_function.hpp"

#include <Eigen/Core>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace boussinesq {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// p' with 1/p + 1/p' = 1.
inline double conjugate_exponent(double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("exponent must be >= 1");
  if (p == 1.0) return kInf;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

inline void require_exponent(double p, const char* name) {
  if (!(p >= 1.0)) throw std::invalid_argument(std::string(name) + " must lie in [1, inf]");
}

/// (Σ w_i |v_i|^p)^{1/p}; p = ∞ gives max |v_i|.
template <typename Derived, typename WeightDerived>
double weighted_lp_norm(const Eigen::DenseBase<Derived>& v, const Eigen::DenseBase<WeightDerived>& w, double p) {
  require_exponent(p, "p");
  const Eigen::ArrayXd a = v.derived().array().abs().template cast<double>();
  if (a.size() == 0) return 0.0;
  if (std::isinf(p)) return a.maxCoeff();
  return std::pow((w.derived().array() * a.pow(p)).sum(), 1.0 / p);
}

enum class MixedOrder { TimeOuter, SpaceOuter };

/// Samples F(t_i, x_j) on a uniform time grid times a Grid1D.
template <typename Scalar>
struct SpaceTimeField {
  Eigen::ArrayXd times;
  double dt;
  Grid1D xgrid;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> values;

  SpaceTimeField(Eigen::ArrayXd t, double step, Grid1D grid, Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> v)
      : times(std::move(t)), dt(step), xgrid(std::move(grid)), values(std::move(v)) {
    if (values.rows() != times.size() || values.cols() != xgrid.size()) {
      throw std::invalid_argument("space-time field dimensions do not match its grids");
    }
    if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
    if (!values.allFinite()) throw std::invalid_argument("space-time field must be finite");
  }
};

/// Uniform time grid {t0 + i·dt}, i < count, with dt = (t1 - t0) / count.
inline Eigen::ArrayXd uniform_times(double t0, double t1, int count) {
  Eigen::ArrayXd t(count);
  const double dt = (t1 - t0) / count;
  for (int i = 0; i < count; ++i) t(i) = t0 + i * dt;
  return t;
}

/// Riemann-sum realization of the iterated L_t^p L_x^q norm (TimeOuter) or
/// L_x^q L_t^p norm (SpaceOuter). Infinite exponents are maxima over samples.
template <typename Scalar>
double mixed_norm(const SpaceTimeField<Scalar>& F, double p, double q, MixedOrder order = MixedOrder::TimeOuter) {
  require_exponent(p, "time exponent p");
  require_exponent(q, "space exponent q");
  const Eigen::ArrayXXd abs = F.values.array().abs().template cast<double>();
  const Eigen::ArrayXd& wx = F.xgrid.weights();
  const Eigen::ArrayXd wt = Eigen::ArrayXd::Constant(F.times.size(), F.dt);
  if (order == MixedOrder::TimeOuter) {
    Eigen::ArrayXd inner(abs.rows());
    for (Eigen::Index i = 0; i < abs.rows(); ++i) inner(i) = weighted_lp_norm(abs.row(i).transpose(), wx, q);
    return weighted_lp_norm(inner, wt, p);
  }
  Eigen::ArrayXd inner(abs.cols());
  for (Eigen::Index j = 0; j < abs.cols(); ++j) inner(j) = weighted_lp_norm(abs.col(j), wt, p);
  return weighted_lp_norm(inner, wx, q);
}

/// Weak L^{p,∞} norm sup_s s·α_f(s)^{1/p} through the discrete decreasing
/// rearrangement: max_k |f|_(k) · (w_(1) + … + w_(k))^{1/p}.
template <typename Derived, typename WeightDerived>
double lorentz_weak_norm(const Eigen::DenseBase<Derived>& f, const Eigen::DenseBase<WeightDerived>& weights, double p) {
  if (!(p >= 1.0) || std::isinf(p)) throw std::invalid_argument("Lorentz exponent must lie in [1, inf)");
  const Eigen::ArrayXd a = f.derived().array().abs().template cast<double>();
  const Eigen::ArrayXd& w = weights.derived().array();
  if (a.size() != w.size()) throw std::invalid_argument("field and weights differ in length");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(a.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return a(i) > a(j); });
  double measure = 0.0;
  double best = 0.0;
  for (Eigen::Index idx : order) {
    measure += w(idx);
    best = std::max(best, a(idx) * std::pow(measure, 1.0 / p));
  }
  return best;
}

template <typename Derived>
double lorentz_weak_norm(const Eigen::DenseBase<Derived>& f, const Grid1D& grid, double p) {
  return lorentz_weak_norm(f, grid.weights(), p);
}

/// ℓ^β norm; β = ∞ gives the max.
template <typename Derived>
double sequence_norm(const Eigen::DenseBase<Derived>& lambda, double beta) {
  require_exponent(beta, "beta");
  const Eigen::ArrayXd a = lambda.derived().array().abs().template cast<double>();
  if (a.size() == 0) return 0.0;
  if (std::isinf(beta)) return a.maxCoeff();
  const double scale = a.maxCoeff();
  if (scale == 0.0) return 0.0;
  return scale * std::pow((a / scale).pow(beta).sum(), 1.0 / beta);
}

/// Singular values of D_r^{1/2} M D_c^{1/2}, in decreasing order.
template <typename Derived>
Eigen::ArrayXd singular_values(const Eigen::MatrixBase<Derived>& M, const Eigen::ArrayXd& row_weights,
                               const Eigen::ArrayXd& col_weights) {
  if (row_weights.size() != M.rows() || col_weights.size() != M.cols()) {
    throw std::invalid_argument("singular_values: weight dimensions do not match the matrix");
  }
  if (!M.allFinite()) throw std::invalid_argument("singular_values: matrix has non-finite entries");
  using Plain = typename Derived::PlainObject;
  const Plain weighted =
      row_weights.sqrt().matrix().asDiagonal() * M.derived() * col_weights.sqrt().matrix().asDiagonal();
  if (weighted.rows() == 0 || weighted.cols() == 0) return {};
  Eigen::BDCSVD<Plain> svd(weighted);
  return svd.singularValues().array();
}

/// Square matrix with a single weight vector, D^{1/2} M D^{1/2}.
template <typename Derived>
Eigen::ArrayXd singular_values(const Eigen::MatrixBase<Derived>& M, const Eigen::ArrayXd& weights) {
  return singular_values(M, weights, weights);
}

template <typename Derived>
Eigen::ArrayXd singular_values(const Eigen::MatrixBase<Derived>& M) {
  return singular_values(M, Eigen::ArrayXd::Ones(M.rows()), Eigen::ArrayXd::Ones(M.cols()));
}

/// Schatten α norm of the integral operator with kernel matrix M on a grid
/// with quadrature weights.
template <typename Derived>
double schatten_norm(const Eigen::MatrixBase<Derived>& M, const Eigen::ArrayXd& weights, double alpha) {
  require_exponent(alpha, "alpha");
  if (!M.allFinite()) throw std::invalid_argument("schatten_norm: matrix has non-finite entries");
  return sequence_norm(singular_values(M, weights), alpha);
}

/// ‖γ₀‖_{𝔖^α} = ‖λ‖_{ℓ^α} for the spectral representation.
inline double schatten_norm(const CompactOperatorRep& op, double alpha) {
  return sequence_norm(op.eigenvalues(), alpha);
}

/// L²(dx dy) norm of a kernel sampled on a weighted grid.
template <typename Derived>
double kernel_l2_norm(const Eigen::MatrixBase<Derived>& K, const Eigen::ArrayXd& weights) {
  const Eigen::MatrixXd w = weights.matrix() * weights.matrix().transpose();
  return std::sqrt((K.derived().cwiseAbs2().template cast<double>().array() * w.array()).sum());
}

/// Descriptor for the norms used by the estimates.
struct NormSpec {
  enum class Kind { Mixed, Lorentz, Schatten, Sequence };
  Kind kind = Kind::Sequence;
  double p = 2.0;  ///< time exponent (Mixed), Lorentz p, Schatten α, or ℓ^β exponent
  double q = 2.0;  ///< space exponent (Mixed) or Lorentz second index
  MixedOrder order = MixedOrder::TimeOuter;

  static NormSpec mixed(double p, double q, MixedOrder order = MixedOrder::TimeOuter) {
    return {Kind::Mixed, p, q, order};
  }
  static NormSpec lorentz(double p, double r = kInf) { return {Kind::Lorentz, p, r, MixedOrder::TimeOuter}; }
  static NormSpec schatten(double alpha) { return {Kind::Schatten, alpha, alpha, MixedOrder::TimeOuter}; }
  static NormSpec sequence(double beta) { return {Kind::Sequence, beta, beta, MixedOrder::TimeOuter}; }

  /// Throws when an exponent lies outside [1, ∞].
  void validate() const {
    require_exponent(p, "p");
    require_exponent(q, "q");
  }
  NormSpec conjugate() const {
    NormSpec c = *this;
    c.p = conjugate_exponent(p);
    c.q = conjugate_exponent(q);
    return c;
  }
  std::string describe() const;
};

inline std::string format_exponent(double p) {
  if (std::isinf(p)) return "inf";
  std::string s = std::to_string(p);
  s.erase(s.find_last_not_of('0') + 1);
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

inline std::string NormSpec::describe() const {
  switch (kind) {
    case Kind::Mixed:
      return order == MixedOrder::TimeOuter ? "L_t^" + format_exponent(p) + " L_x^" + format_exponent(q)
                                            : "L_x^" + format_exponent(q) + " L_t^" + format_exponent(p);
    case Kind::Lorentz:
      return "L^{" + format_exponent(p) + "," + format_exponent(q) + "}";
    case Kind::Schatten:
      return "S^" + format_exponent(p);
    case Kind::Sequence:
      return "l^" + format_exponent(p);
  }
  return "";
}

}  // namespace boussinesq
