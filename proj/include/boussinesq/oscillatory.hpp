#pragma once

#include "boussinesq/report.hpp"

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace boussinesq {

/// Smooth bump exp(-1/(1-u²)) on (-1, 1), zero outside, and the two
/// partitions of unity built from it.
struct BumpFunction {
  static double mollifier(double u);

  /// Even, supp ⊂ [-1, 1], Σ_k ψ(ξ - k) = 1 for every real ξ.
  static double wiener(double xi);

  /// supp ⊂ (1/2, 2), Σ_{k∈ℤ} ψ²(2^k ξ) = 1 for every ξ > 0.
  static double dyadic(double xi);

  /// Dyadic dilate ψ(2^{-k} |ξ|).
  static double dyadic_window(double xi, int k) { return dyadic(std::ldexp(std::abs(xi), -k)); }
};

/// 0 for u ≤ 0, 1 for u ≥ 1, C^∞ in between.
double smooth_step(double u);

/// max |Σ_{k=k_min}^{k_max} ψ²(2^k ξ) − 1| over log-spaced ξ ∈ [ξ_min, ξ_max].
/// An empty k range gives 1.
double dyadic_partition_check(double xi_min, double xi_max, int k_min, int k_max, int samples = 4097);

/// Odd phase ξ√(ξ² + 1) used by the exponential sums.
inline double odd_phase(double xi) { return xi * std::sqrt(xi * xi + 1.0); }

/// Σ_{k_lo ≤ k ≤ k_hi} e^{i(t·ξ_k√(ξ_k²+1) + kx)}.
std::complex<double> exp_sum_range(int k_lo, int k_hi, double t, double x);

/// S_N(t, x) = Σ_{|k|≤N} e^{i(tφ(k) + kx)} with φ(ξ) = ξ√(ξ²+1).
std::complex<double> exp_sum(int N, double t, double x);

/// One row per parameter tuple; `ratio` = magnitude / bound.
struct DecayRow {
  std::vector<double> params;
  double magnitude = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
};

struct DecayScanReport {
  std::vector<std::string> param_names;
  std::string bound_expression;
  std::vector<DecayRow> rows;

  /// max ratio grouped by the first parameter, in first-seen order.
  std::vector<std::pair<double, double>> slice_max() const;
  /// max over slices divided by min over slices.
  double slice_spread() const;
  CsvTable to_csv() const;
};

struct ExpSumScan {
  DecayScanReport full;      ///< |k| ≤ N
  DecayScanReport positive;  ///< 1 ≤ k ≤ N
  DecayScanReport negative;  ///< −N ≤ k ≤ −1
};

/// Log-spaced samples in [t_min, 1/N]; the last sample is exactly 1/N.
Eigen::ArrayXd log_spaced_times(double t_min, double t_max, int count);

/// Scans |S_N(t, x)|·|t|^{1/2} over the given (t, x) lattice for each N.
/// Every t must lie in (0, 1/N].
ExpSumScan exp_sum_decay_scan(const std::vector<int>& N_list,
                              const std::function<Eigen::ArrayXd(int)>& t_samples_for_N,
                              const Eigen::ArrayXd& x_grid);

enum class PhaseKind {
  Boussinesq,  ///< √(ξ² + ξ⁴)
  Odd,         ///< ξ√(1 + ξ²)
  Quadratic,   ///< ξ² + 1/2
};

double phase_value(PhaseKind kind, double xi);

struct OscillatoryOptions {
  double weight_exponent = 0.5;      ///< s in |ξ|^{-s}; must be < 1
  double cutoff = 0.0;               ///< Ξ; 0 picks max(16, 40/√|t|) for the tapered integral
  std::optional<int> dyadic_scale;   ///< window ψ(2^{-k}|ξ|); overrides the cutoff
  PhaseKind phase = PhaseKind::Boussinesq;
  double points_per_oscillation = 256.0;
  double step = 0.0;                 ///< explicit uniform step h; 0 derives it from points_per_oscillation
  int grading_levels = 20;
  int points_per_level = 256;
};

/// Resolved quadrature parameters for one evaluation.
struct QuadraturePlan {
  double cutoff = 0.0;
  double step = 0.0;
  double max_step = 0.0;  ///< 2π / (16 (|x| + 2|t|√(Ξ²+1)))
  double graded_extent = 0.0;
  long points = 0;
};

QuadraturePlan plan_oscillatory_quadrature(double x, double t, const OscillatoryOptions& options);

/// ∫ e^{i(xξ + tΦ(ξ))} |ξ|^{-s} w(ξ) dξ by composite midpoint quadrature with
/// geometric grading (ratio 2) toward ξ = 0. Without a dyadic window, w is 1
/// on |ξ| ≤ Ξ/2 and tapers smoothly to 0 at Ξ.
std::complex<double> osc_integral(double x, double t, const OscillatoryOptions& options = {});

/// |I(h) − I(h/2)| / |I(h/2)|, halving every quadrature step.
double osc_integral_step_halving(double x, double t, const OscillatoryOptions& options = {});

/// |I(x, t)|·|x|^{1/2} over the (t, x) lattice, weight |ξ|^{-s}.
DecayScanReport kernel_decay_scan(const Eigen::ArrayXd& x_grid, const std::vector<double>& t_list,
                                  const OscillatoryOptions& options = {});

/// Dyadic kernels: sup_t |∫ e^{i(xξ+tφ(ξ))} ψ(2^{-k}|ξ|) dξ| against
/// 2^k / (1 + 2^k|x|)^{1/2}, for x log-spaced in [2^{-k}, 1].
DecayScanReport windowed_kernel_scan(const std::vector<int>& k_list, int x_samples,
                                     const std::vector<double>& t_list, double points_per_oscillation = 32.0);

}  // namespace boussinesq
