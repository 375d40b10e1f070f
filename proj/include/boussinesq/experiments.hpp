#pragma once

#include "boussinesq/norms.hpp"
#include "boussinesq/random.hpp"
#include "boussinesq/report.hpp"
#include "boussinesq/wave_function.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace boussinesq {

/// Least-squares fit of log(value) against log(N).
struct ScalingFit {
  std::vector<double> N;
  std::vector<double> values;
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  ///< max |log value − fitted line|
  double claimed = 0.0;   ///< exponent the estimate predicts

  CsvTable to_csv(const std::string& value_name = "value") const;
};

/// Throws "degenerate data" on nonpositive values and requires at least three points.
ScalingFit fit_exponent(const std::vector<double>& N, const std::vector<double>& values, double claimed = 0.0);

/// (p, q, β) for L_t^p L_x^q against ℓ^β.
struct ExponentTriple {
  double p = 4.0;
  double q = 2.0;
  double beta = 4.0 / 3.0;
};

/// 2q/(q+1), the largest β the orthonormal Strichartz estimate allows.
inline double critical_beta(double q) { return std::isinf(q) ? 2.0 : 2.0 * q / (q + 1.0); }

/// Violations of the admissible region: 1/q ∈ (0, 1], 1/p = (1 − 1/q)/2 and β ≤ 2q/(q+1).
std::vector<std::string> admissibility_violations(const ExponentTriple& e);

/// Throws std::invalid_argument naming the first violation.
void require_admissible(const ExponentTriple& e);

enum class SystemRecipe { Random, Counterexample, SingleMode };
std::string to_string(SystemRecipe recipe);
SystemRecipe recipe_from_string(const std::string& name);

struct ExperimentConfig {
  Geometry geometry = Geometry::Torus;
  ExponentTriple exponents;
  std::vector<int> N_list{64, 128, 256, 512, 1024};
  int t_samples = 64;          ///< time samples on [0, 2π)
  int x_points_per_mode = 2;   ///< spatial grid n = smallest power of two ≥ x_points_per_mode·(2N+1)
  int rank = 8;
  int systems = 20;
  double lambda_scale = 1.0;   ///< λ_j = lambda_scale·u_j with u_j uniform on [1/2, 1]
  RandomSeedPair seeds;
  SystemRecipe recipe = SystemRecipe::Random;
  bool bound_mode = true;      ///< false lets inadmissible β through to exhibit failure

  /// Config errors; empty means runnable.
  std::vector<std::string> violations() const;
};

/// Torus grid size used for truncation level N.
int torus_points_for(int N, int points_per_mode);

/// rank functions with i.i.d. complex Gaussian coefficients on the integer modes
/// k_min ≤ |k| ≤ k_max (grid wavenumber index), Gram-orthonormalized in L².
/// Works on line and torus grids; substream(system) of rng selects the sample.
OrthonormalSystem random_band_system(const Grid1D& grid, int k_min, int k_max, int rank, const CounterRng& rng);

/// rank functions with Gaussian coefficients on ball modes 1..modes, orthonormalized.
OrthonormalSystem random_ball_system(const Grid1D& grid, int modes, int rank, const CounterRng& rng);

/// λ_j = scale·u_j, u_j uniform on [1/2, 1].
Eigen::ArrayXd random_eigenvalues(int rank, double scale, const CounterRng& rng);

/// Rank-`rank` operator with random_band_system (k_min = 0, k_max = band) on line
/// and torus grids or random_ball_system (modes = band) on the ball. The system
/// draws from seeds.omega and λ from seeds.omega_tilde.
CompactOperatorRep random_operator(const Grid1D& grid, int band, int rank, const RandomSeedPair& seeds);

/// Ḣ^s-orthonormal operator: an L²-orthonormal band system on k_min ≤ |k| ≤ k_max
/// (k_min ≥ 1) lifted by |ξ|^{-s}, with λ_j = scale·u_j.
CompactOperatorRep random_lifted_operator(const Grid1D& grid, int k_min, int k_max, int rank, double s, double scale,
                                          const CounterRng& g1, const CounterRng& g2);

/// Σ λ_j |𝒟_N f_j|² over times × torus grid.
SpaceTimeField<double> truncated_density(const CompactOperatorRep& op, const Eigen::ArrayXd& times, double dt, int N);

struct StrichartzScan {
  ExponentTriple exponents;
  ScalingFit lhs;                 ///< sup over systems of ‖Σλ_j|𝒟_N f_j|²‖_{L_t^p L_x^q}
  std::vector<double> ratios;     ///< sup over systems of LHS / (N^{1/p} ‖λ‖_{ℓ^β})

  /// max/min of ratios.
  double ratio_spread() const;
  CsvTable to_csv() const;
};

StrichartzScan strichartz_scaling_torus(const ExperimentConfig& cfg);
/// One scan per triple over shared densities; cfg.exponents is ignored.
std::vector<StrichartzScan> strichartz_scaling_torus(const ExperimentConfig& cfg,
                                                     const std::vector<ExponentTriple>& triples);

struct CounterexampleRecord {
  int N = 0;
  double lhs = 0.0;
  double rhs = 0.0;  ///< N^{1/p} ‖λ‖_{ℓ^β}
  double ratio = 0.0;
  double modulus_deviation = 0.0;  ///< max | |𝒟_N f_j| − 1/(2π) | over the grid
};

/// f_j = e^{ijx}, λ_j = 1/(2π) for |j| ≤ N.
CounterexampleRecord optimality_counterexample(int N, double p, double q, double beta, int t_samples = 8);

struct CounterexampleScan {
  ExponentTriple exponents;
  std::vector<CounterexampleRecord> records;
  ScalingFit lhs;    ///< claimed 1
  ScalingFit ratio;  ///< claimed 1 − 1/p − 1/β

  CsvTable to_csv() const;
};

CounterexampleScan counterexample_scan(const std::vector<int>& N_list, double p, double q, double beta,
                                       int t_samples = 8);
std::vector<CounterexampleScan> counterexample_scan(const std::vector<int>& N_list,
                                                    const std::vector<ExponentTriple>& triples, int t_samples = 8);

/// Counterexample scan in L_t^2 L_x^∞; β > 2 is rejected unless counterexample_mode.
CounterexampleScan maximal_space_scaling(const std::vector<int>& N_list, double beta, bool counterexample_mode = false,
                                         int t_samples = 8);

/// ‖sup_{t∈[0,1]} ρ_{γ(t)}‖_{L_x^{2,∞}} / ‖λ‖_{ℓ^β} with t_samples uniform samples including both ends.
double maximal_in_time_ratio(const CompactOperatorRep& op, double beta, int t_samples = 257);

struct MaximalRankScan {
  double beta = 1.5;
  double s = 0.25;
  std::vector<int> ranks;
  std::vector<double> ratios;  ///< max over systems at each rank

  double spread() const;
  CsvTable to_csv() const;
};

struct MaximalScanConfig {
  std::vector<int> ranks{1, 2, 4, 8, 16};
  int systems = 4;
  double beta = 1.5;
  int grid_points = 1024;
  int k_max = 64;  ///< band 1 ≤ |k| ≤ k_max on the default line box, i.e. |ξ| ≤ 2
  int t_samples = 257;
  RandomSeedPair seeds;
};

/// Ḣ^{1/4}-orthonormal random systems from lifted L² systems.
MaximalRankScan maximal_rank_scan(const MaximalScanConfig& cfg);

struct ConvergenceRow {
  double t = 0.0;
  double deviation = 0.0;  ///< sup_x |ρ_{γ(t)} − ρ_{γ₀}|
};

std::vector<ConvergenceRow> pointwise_convergence_scan(const CompactOperatorRep& op, const std::vector<double>& t_list);
CsvTable convergence_csv(const std::vector<ConvergenceRow>& rows);

/// 2^{-m} for m in [m_min, m_max].
std::vector<double> dyadic_times(int m_min, int m_max);

/// 𝒟_N as a matrix from the orthonormal modes e_k = e^{ikx}/√(2π), |k| ≤ N, to
/// samples over times × torus grid (row index = time·n + space).
Eigen::MatrixXcd truncated_propagator_matrix(const Eigen::ArrayXd& times, const Grid1D& grid, int N);

/// ‖W 𝒟_N 𝒟_N^* W̄‖_{𝔖^{β'}} / ‖W‖²_{L_t^{2p'} L_x^{2q'}}; 0 for W ≡ 0.
double dual_ratio(const SpaceTimeField<double>& W, int N, double p, double q, double beta);

/// V with ∫Vρ = ‖ρ‖_{L_t^p L_x^q} and ‖V‖_{L_t^{p'} L_x^{q'}} = 1, for ρ ≥ 0 not identically zero.
SpaceTimeField<double> norming_function(const SpaceTimeField<double>& rho, double p, double q);

struct DualitySample {
  double primal = 0.0;         ///< ‖ρ‖ / ‖λ‖_{ℓ^β}
  double witness_dual = 0.0;   ///< dual ratio at W = √V for the norming V of ρ
  double pairing_error = 0.0;  ///< |∫Vρ − Σ λ_j ⟨f_j, 𝒟_N^* V 𝒟_N f_j⟩|
};

struct DualityRecord {
  std::vector<DualitySample> samples;
  std::vector<double> random_dual;  ///< dual ratios of random W
  double primal = 0.0;              ///< max primal
  double dual = 0.0;                ///< max dual over random W and witnesses
  double max_pairing_error = 0.0;
  double schatten_kernel_error = 0.0;  ///< max relative |‖K‖_{𝔖²} − ‖K‖_{L²}| and vs ‖λ‖_{ℓ²}
  bool holds = false;

  CsvTable to_csv() const;
};

struct DualityConfig {
  int grid_points = 64;
  int N = 15;
  int t_samples = 32;
  int batch = 32;
  int rank = 4;
  ExponentTriple exponents;
  RandomSeedPair seeds;
};

/// Random (W, system, λ) batch. holds iff every primal ≤ dual·(1 + 1e-6) and each
/// sample's witness dual dominates its primal.
DualityRecord duality_consistency_check(const DualityConfig& cfg);

}  // namespace boussinesq
