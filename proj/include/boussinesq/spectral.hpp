#pragma once

#include "boussinesq/wave_function.hpp"

#include <Eigen/Core>

#include <cmath>
#include <vector>

namespace boussinesq {

/// √(ξ⁴ + ξ²), the symbol of √(∂⁴ − ∂²).
inline double boussinesq_symbol(double xi) {
  const double xi2 = xi * xi;
  return std::sqrt(xi2 * xi2 + xi2);
}

/// √((mπ)² + (mπ)⁴), eigenvalue of √(Δ² − Δ) on the radial mode e_m of the ball.
inline double ball_symbol(int m) { return boussinesq_symbol(m * kPi); }

/// Normalized Fourier coefficients in FFT order: f(x) = Σ c_k e^{iξ_k (x - x_0)}.
Eigen::VectorXcd spectrum(const Eigen::VectorXcd& values);
Eigen::VectorXcd from_spectrum(const Eigen::VectorXcd& coefficients);

/// Multiplies the spectrum of f by m(ξ) sampled at the grid frequencies.
WaveFunction apply_multiplier(const WaveFunction& f, const Eigen::ArrayXcd& multiplier);

template <typename Symbol>
WaveFunction apply_symbol(const WaveFunction& f, Symbol&& symbol) {
  const Eigen::ArrayXd xi = f.grid().frequencies();
  Eigen::ArrayXcd m(xi.size());
  for (Eigen::Index i = 0; i < xi.size(); ++i) m(i) = symbol(xi(i));
  return apply_multiplier(f, m);
}

/// e^{it√(∂⁴−∂²)} f, exact in frequency space. Ball functions are evolved in
/// their eigenbasis and require coefficients.
WaveFunction propagate(const WaveFunction& f, double t);

/// (1/2π) Σ_{|k|≤N} f̂(k) e^{i(kx + t√(k²+k⁴))} on the torus, where f = Σ f̂(k) e^{ikx}.
/// The 1/(2π) prefactor is part of the operator. Requires 2N + 1 ≤ n.
WaveFunction truncated_propagate_torus(const WaveFunction& f, double t, int N);

/// Same operator sampled over a time grid: row i holds the values at times(i).
Eigen::MatrixXcd truncated_evolution_torus(const WaveFunction& f, const Eigen::ArrayXd& times, int N);

/// Multiplies the Fourier coefficients by |ξ|^{-s}; maps L²-orthonormal
/// mean-zero families to Ḣ^s-orthonormal ones.
WaveFunction homogeneous_sobolev_lift(const WaveFunction& g, double s);

/// Modified Gram–Schmidt with one reorthogonalization pass.
OrthonormalSystem gram_orthonormalize(const std::vector<WaveFunction>& raw,
                                      const InnerProduct& ip = InnerProduct::l2());

/// ρ_{γ(t)}(x) = Σ λ_j |e^{it√(∂⁴−∂²)} f_j(x)|². A rank-0 operator gives the zero field.
DensityField density_function(const CompactOperatorRep& op, double t, const Grid1D& grid);
/// Uses the grid of the system; the operator must have positive rank.
DensityField density_function(const CompactOperatorRep& op, double t);

/// Densities over a time grid, row i at times(i).
Eigen::MatrixXd density_evolution(const CompactOperatorRep& op, const Eigen::ArrayXd& times);

/// K(x, y, t) = Σ λ_j u_j(x) conj(u_j(y)) with u_j = e^{it√(∂⁴−∂²)} f_j.
Eigen::MatrixXcd operator_kernel(const CompactOperatorRep& op, double t);

}  // namespace boussinesq
