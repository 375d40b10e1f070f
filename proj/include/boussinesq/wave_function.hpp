#pragma once

#include "boussinesq/grid.hpp"

#include <Eigen/Core>

#include <complex>
#include <optional>
#include <vector>

namespace boussinesq {

using Complex = std::complex<double>;

constexpr double kOrthonormalityTolerance = 1e-8;
constexpr double kUnitarityTolerance = 1e-10;
constexpr double kPivotThreshold = 1e-10;
constexpr int kMaxKernelPoints = 4096;

/// Complex samples of a function on a Grid1D.
///
/// Ball functions carry coefficients c_m (m = 1..M, stored at index m-1) in
/// the radial Dirichlet eigenbasis e_m(r) = sin(mπr) / (√(2π) r); their point
/// values are derived from the coefficients.
class WaveFunction {
 public:
  WaveFunction(Grid1D grid, Eigen::VectorXcd values);
  static WaveFunction from_ball_coefficients(Grid1D grid, Eigen::VectorXcd coefficients);

  const Grid1D& grid() const { return grid_; }
  const Eigen::VectorXcd& values() const { return values_; }
  bool has_ball_coefficients() const { return coefficients_.has_value(); }
  const Eigen::VectorXcd& ball_coefficients() const;

 private:
  Grid1D grid_;
  Eigen::VectorXcd values_;
  std::optional<Eigen::VectorXcd> coefficients_;
};

/// e_m(r) = sin(mπr) / (√(2π) r), orthonormal in L² of the unit ball.
double ball_eigenfunction(int m, double r);

/// Point values of Σ c_m e_m on the radial grid.
Eigen::VectorXcd ball_values(const Grid1D& grid, const Eigen::VectorXcd& coefficients);

struct InnerProduct {
  enum class Kind { L2, HomSobolev };
  Kind kind = Kind::L2;
  double s = 0.0;

  static InnerProduct l2() { return {}; }
  static InnerProduct hom_sobolev(double s) { return {Kind::HomSobolev, s}; }
};

Complex inner_product(const WaveFunction& f, const WaveFunction& g, const InnerProduct& ip = InnerProduct::l2());
double l2_norm(const WaveFunction& f);

/// Functions orthonormal under the declared inner product; checked on construction.
class OrthonormalSystem {
 public:
  OrthonormalSystem() = default;
  OrthonormalSystem(std::vector<WaveFunction> functions, InnerProduct ip = InnerProduct::l2(),
                    double tolerance = kOrthonormalityTolerance);

  const std::vector<WaveFunction>& functions() const { return functions_; }
  const WaveFunction& operator[](std::size_t j) const { return functions_[j]; }
  std::size_t size() const { return functions_.size(); }
  const InnerProduct& inner_product_kind() const { return ip_; }

  Eigen::MatrixXcd gram_matrix() const;

 private:
  std::vector<WaveFunction> functions_;
  InnerProduct ip_;
};

/// γ₀ = Σ λ_j |f_j⟩⟨f_j| with (f_j) orthonormal.
class CompactOperatorRep {
 public:
  CompactOperatorRep() = default;
  CompactOperatorRep(Eigen::ArrayXd eigenvalues, OrthonormalSystem system);

  const Eigen::ArrayXd& eigenvalues() const { return eigenvalues_; }
  const OrthonormalSystem& system() const { return system_; }
  std::size_t rank() const { return system_.size(); }

 private:
  Eigen::ArrayXd eigenvalues_;
  OrthonormalSystem system_;
};

struct DensityField {
  Grid1D grid;
  double t = 0.0;
  Eigen::ArrayXd values;

  /// ∫ ρ dx with the grid's quadrature weights.
  double integral() const { return (grid.weights() * values).sum(); }
};

}  // namespace boussinesq
