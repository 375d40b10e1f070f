#pragma once

#include <Eigen/Core>

#include <string>

namespace boussinesq {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

enum class Geometry { Line, Torus, BallRadial };

std::string to_string(Geometry g);
Geometry geometry_from_string(const std::string& name);

/// Uniform sample lattice on one of the three supported geometries.
///
/// Line:       periodic box [-L/2, L/2) with n points, frequencies 2πk/L.
/// Torus:      [0, 2π) with n points, integer frequencies.
/// BallRadial: midpoints r_i = (i + 1/2)/n of (0, 1); quadrature weights
///             carry the radial measure 4π r² Δr. The midpoint rule is exact
///             for products of eigenfunctions e_m e_m' with m + m' < 2n.
class Grid1D {
 public:
  static Grid1D line(int n, double period = 64.0 * kPi);
  static Grid1D torus(int n);
  static Grid1D ball_radial(int n);

  Geometry geometry() const { return geometry_; }
  int size() const { return static_cast<int>(points_.size()); }
  double period() const { return period_; }
  /// Δx (Δr for the ball).
  double spacing() const { return spacing_; }
  /// Constant cell measure for Line/Torus; for the ball use weights().
  double cell_measure() const { return spacing_; }
  const Eigen::ArrayXd& points() const { return points_; }
  /// Per-point quadrature weights (all equal to Δx except on the ball).
  const Eigen::ArrayXd& weights() const { return weights_; }
  /// Angular frequencies in FFT order (Line/Torus only).
  Eigen::ArrayXd frequencies() const;

  bool operator==(const Grid1D& other) const;
  bool operator!=(const Grid1D& other) const { return !(*this == other); }

 private:
  Grid1D(Geometry g, Eigen::ArrayXd points, Eigen::ArrayXd weights, double spacing, double period);

  Geometry geometry_;
  Eigen::ArrayXd points_;
  Eigen::ArrayXd weights_;
  double spacing_;
  double period_;
};

/// FFT-ordered integer wavenumber of bin `index` on an n-point grid.
inline int wavenumber(int index, int n) { return index < (n + 1) / 2 ? index : index - n; }

/// FFT bin holding integer wavenumber k, or -1 when |k| is not representable.
int fft_bin(int k, int n);

}  // namespace boussinesq
