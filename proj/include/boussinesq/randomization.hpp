#pragma once

#include "boussinesq/random.hpp"
#include "boussinesq/report.hpp"
#include "boussinesq/wave_function.hpp"

#include <Eigen/Core>

#include <vector>

namespace boussinesq {

/// f^ω = Σ_k g_k ψ(D − k) f with the flat unit-window partition Σ_k ψ(ξ − k) = 1.
WaveFunction wiener_randomize_line(const WaveFunction& f, const CounterRng& g1);

/// f^ω = Σ_k g_k f̂(k) e^{ikx}, one variate per integer mode.
WaveFunction fourier_randomize_torus(const WaveFunction& f, const CounterRng& g1);

/// f^ω = Σ_m g_m c_m/(mπ) e_m; the 1/(mπ) damping is part of the randomization.
WaveFunction ball_randomize(const WaveFunction& f, const CounterRng& g1);

/// Geometry dispatch over the three randomizations.
WaveFunction randomize_function(const WaveFunction& f, const CounterRng& g1);

/// Spectral multiplier (FFT order) realizing the line or torus randomization.
Eigen::ArrayXcd randomization_multiplier(const Grid1D& grid, const CounterRng& g1);

/// γ₀^{ω,ω̃} = Σ λ_j g_j^{(2)} |f_j^ω⟩⟨f_j^ω|. The same ω sequence randomizes every f_j.
struct RandomizedOperator {
  CompactOperatorRep base;
  Eigen::ArrayXd g2_draws;
  std::vector<WaveFunction> randomized_functions;

  /// Σ λ_j g_j^{(2)} |e^{it√(∂⁴−∂²)} f_j^ω|² on the base grid.
  DensityField density(double t, const Grid1D& grid) const;
};

RandomizedOperator randomize_operator(const CompactOperatorRep& gamma0, const CounterRng& g1, const CounterRng& g2);
RandomizedOperator randomize_operator(const CompactOperatorRep& gamma0, const RandomSeedPair& seeds,
                                      VariateKind kind = VariateKind::Gaussian);

/// Monte-Carlo (E|Σ a_k g_k|^r)^{1/r} / ‖a‖_{ℓ²}; sample i draws from rng.substream(i).
double khinchin_ratio(const Eigen::ArrayXd& a, double r, int n_samples, const CounterRng& rng);

struct ContinuityRow {
  double t = 0.0;
  double point_norm = 0.0;  ///< (E|F(t, x₀)|^r)^{1/r}
  double l2_norm = 0.0;     ///< (E‖F(t, ·)‖_{L²}^r)^{1/r}
};

struct ContinuityTable {
  Geometry geometry = Geometry::Torus;
  double x0 = 0.0;  ///< grid point of maximal |ρ_{γ₀}|
  double r = 2.0;
  int samples = 0;
  RandomSeedPair seeds;
  VariateKind kind = VariateKind::Gaussian;
  std::vector<ContinuityRow> rows;

  CsvTable to_csv() const;
};

/// F(t) = Σ λ_j g_j^{(2)} (|f_j^ω|² − |e^{it√(∂⁴−∂²)} f_j^ω|²), reduced both at x₀
/// and in spatial L², with L^r_{ω,ω̃} norms estimated over n_samples draws.
ContinuityTable stochastic_continuity_experiment(const CompactOperatorRep& gamma0, const std::vector<double>& t_list,
                                                 double r, int n_samples, const RandomSeedPair& seeds,
                                                 VariateKind kind = VariateKind::Gaussian);

}  // namespace boussinesq
