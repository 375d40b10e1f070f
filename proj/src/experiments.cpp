#include "boussinesq/experiments.hpp"

#include "boussinesq/parallel.hpp"
#include "boussinesq/spectral.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace boussinesq {

namespace {

constexpr double kSlackFactor = 1.0 + 1e-6;
constexpr long kSvdBudget = 1L << 16;

double max_over_min(const std::vector<double>& v) {
  if (v.empty()) return 1.0;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  if (*lo <= 0.0) return kInf;
  return *hi / *lo;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : "; ") + p;
  return out;
}

}  // namespace

CsvTable ScalingFit::to_csv(const std::string& value_name) const {
  CsvTable table({"N", value_name});
  table.add_comment("slope", format_double(slope));
  table.add_comment("intercept", format_double(intercept));
  table.add_comment("residual", format_double(residual));
  table.add_comment("claimed", format_double(claimed));
  for (std::size_t i = 0; i < N.size(); ++i) table.add_numeric_row({N[i], values[i]});
  return table;
}

ScalingFit fit_exponent(const std::vector<double>& N, const std::vector<double>& values, double claimed) {
  if (N.size() != values.size()) throw std::invalid_argument("fit_exponent: N and values differ in length");
  if (N.size() < 3) throw std::invalid_argument("fit_exponent needs at least 3 points");
  for (std::size_t i = 0; i < N.size(); ++i) {
    if (!(values[i] > 0.0) || !(N[i] > 0.0) || !std::isfinite(values[i])) {
      throw std::invalid_argument("degenerate data: fit needs positive finite values");
    }
  }
  const auto n = static_cast<Eigen::Index>(N.size());
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    X(i, 0) = std::log(N[static_cast<std::size_t>(i)]);
    X(i, 1) = 1.0;
    y(i) = std::log(values[static_cast<std::size_t>(i)]);
  }
  const Eigen::Vector2d coef = X.colPivHouseholderQr().solve(y);
  ScalingFit fit;
  fit.N = N;
  fit.values = values;
  fit.slope = coef(0);
  fit.intercept = coef(1);
  fit.residual = (X * coef - y).cwiseAbs().maxCoeff();
  fit.claimed = claimed;
  return fit;
}

std::vector<std::string> admissibility_violations(const ExponentTriple& e) {
  std::vector<std::string> out;
  for (const auto& [value, name] : {std::pair{e.p, "p"}, std::pair{e.q, "q"}, std::pair{e.beta, "β"}}) {
    if (!(value >= 1.0)) out.push_back(std::string(name) + " must lie in [1, inf]");
  }
  if (!out.empty()) return out;
  if (std::isinf(e.q)) {
    out.emplace_back("q = inf is the excluded endpoint A of the admissible segment");
  } else {
    const double target = (1.0 - 1.0 / e.q) / 2.0;
    if (std::abs(1.0 / e.p - target) > 1e-12) out.push_back("1/p must equal (1 - 1/q)/2 = " + format_double(target));
  }
  const double crit = critical_beta(e.q);
  if (e.beta > crit * (1.0 + 1e-12)) out.push_back("β exceeds 2q/(q+1)=" + format_double(crit));
  return out;
}

void require_admissible(const ExponentTriple& e) {
  const auto v = admissibility_violations(e);
  if (!v.empty()) throw std::invalid_argument(join(v));
}

std::string to_string(SystemRecipe recipe) {
  switch (recipe) {
    case SystemRecipe::Random:
      return "random";
    case SystemRecipe::Counterexample:
      return "counterexample";
    case SystemRecipe::SingleMode:
      return "single_mode";
  }
  return "";
}

SystemRecipe recipe_from_string(const std::string& name) {
  if (name == "random") return SystemRecipe::Random;
  if (name == "counterexample") return SystemRecipe::Counterexample;
  if (name == "single_mode") return SystemRecipe::SingleMode;
  throw std::invalid_argument("unknown system recipe '" + name + "' (expected random, counterexample or single_mode)");
}

std::vector<std::string> ExperimentConfig::violations() const {
  std::vector<std::string> out;
  if (geometry != Geometry::Torus) out.emplace_back("Strichartz scaling runs on the torus");
  if (N_list.empty()) out.emplace_back("N list must not be empty");
  for (int N : N_list) {
    if (N < 1) {
      out.emplace_back("N must be ≥ 1");
      break;
    }
  }
  if (rank < 1) out.emplace_back("rank must be ≥ 1");
  if (systems < 1) out.emplace_back("systems must be ≥ 1");
  if (t_samples < 1) out.emplace_back("t_samples must be ≥ 1");
  if (x_points_per_mode < 1) out.emplace_back("x_points_per_mode must be ≥ 1");
  if (!(lambda_scale >= 0.0)) out.emplace_back("lambda_scale must be ≥ 0");
  if (recipe == SystemRecipe::Random) {
    for (int N : N_list) {
      if (N >= 1 && rank > 2 * N + 1) {
        out.push_back("rank " + std::to_string(rank) + " exceeds 2N+1 for N=" + std::to_string(N));
        break;
      }
    }
  }
  if (bound_mode) {
    const auto adm = admissibility_violations(exponents);
    out.insert(out.end(), adm.begin(), adm.end());
  } else {
    for (const auto& [value, name] :
         {std::pair{exponents.p, "p"}, std::pair{exponents.q, "q"}, std::pair{exponents.beta, "β"}}) {
      if (!(value >= 1.0)) out.push_back(std::string(name) + " must lie in [1, inf]");
    }
  }
  return out;
}

int torus_points_for(int N, int points_per_mode) {
  if (N < 1) throw std::invalid_argument("N must be ≥ 1");
  const auto needed = static_cast<unsigned>(std::max(1, points_per_mode) * (2 * N + 1));
  return static_cast<int>(std::bit_ceil(needed));
}

OrthonormalSystem random_band_system(const Grid1D& grid, int k_min, int k_max, int rank, const CounterRng& rng) {
  if (grid.geometry() == Geometry::BallRadial) throw std::invalid_argument("band systems need a line or torus grid");
  if (k_min < 0 || k_max < k_min) throw std::invalid_argument("band needs 0 ≤ k_min ≤ k_max");
  const int n = grid.size();
  if (2 * k_max + 1 > n) throw std::invalid_argument("band exceeds the grid's Nyquist range");
  const int modes = k_min == 0 ? 2 * k_max + 1 : 2 * (k_max - k_min + 1);
  if (rank < 0 || rank > modes) throw std::invalid_argument("rank exceeds the number of band modes");
  std::vector<WaveFunction> raw;
  raw.reserve(static_cast<std::size_t>(rank));
  for (int j = 0; j < rank; ++j) {
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(n);
    for (int k = -k_max; k <= k_max; ++k) {
      if (std::abs(k) < k_min) continue;
      const std::int64_t idx = 2 * (static_cast<std::int64_t>(j) * (2 * k_max + 1) + (k + k_max));
      c(fft_bin(k, n)) = Complex(rng.draw(idx), rng.draw(idx + 1)) / std::sqrt(2.0);
    }
    raw.emplace_back(grid, from_spectrum(c));
  }
  return gram_orthonormalize(raw);
}

OrthonormalSystem random_ball_system(const Grid1D& grid, int modes, int rank, const CounterRng& rng) {
  if (grid.geometry() != Geometry::BallRadial) throw std::invalid_argument("ball systems need a ball grid");
  if (rank < 0 || rank > modes) throw std::invalid_argument("rank exceeds the number of ball modes");
  std::vector<WaveFunction> raw;
  for (int j = 0; j < rank; ++j) {
    Eigen::VectorXcd c(modes);
    for (int m = 0; m < modes; ++m) c(m) = rng.draw(static_cast<std::int64_t>(j) * modes + m);
    raw.push_back(WaveFunction::from_ball_coefficients(grid, std::move(c)));
  }
  return gram_orthonormalize(raw);
}

Eigen::ArrayXd random_eigenvalues(int rank, double scale, const CounterRng& rng) {
  Eigen::ArrayXd lambda(rank);
  for (int j = 0; j < rank; ++j) lambda(j) = scale * (0.5 + 0.5 * rng.uniform(static_cast<std::uint64_t>(j)));
  return lambda;
}

CompactOperatorRep random_operator(const Grid1D& grid, int band, int rank, const RandomSeedPair& seeds) {
  const CounterRng g1 = CounterRng(seeds.omega).substream(0x5151);
  const CounterRng g2 = CounterRng(seeds.omega_tilde).substream(0x5151);
  OrthonormalSystem system = grid.geometry() == Geometry::BallRadial ? random_ball_system(grid, band, rank, g1)
                                                                    : random_band_system(grid, 0, band, rank, g1);
  return {random_eigenvalues(rank, 1.0, g2), std::move(system)};
}

CompactOperatorRep random_lifted_operator(const Grid1D& grid, int k_min, int k_max, int rank, double s, double scale,
                                          const CounterRng& g1, const CounterRng& g2) {
  if (k_min < 1) throw std::invalid_argument("zero frequency obstructs homogeneous lift");
  const OrthonormalSystem base = random_band_system(grid, k_min, k_max, rank, g1);
  std::vector<WaveFunction> lifted;
  lifted.reserve(base.size());
  for (const auto& f : base.functions()) lifted.push_back(homogeneous_sobolev_lift(f, s));
  return {random_eigenvalues(rank, scale, g2), OrthonormalSystem(std::move(lifted), InnerProduct::hom_sobolev(s))};
}

SpaceTimeField<double> truncated_density(const CompactOperatorRep& op, const Eigen::ArrayXd& times, double dt, int N) {
  if (op.rank() == 0) throw std::invalid_argument("truncated density needs a positive-rank operator");
  const Grid1D& grid = op.system()[0].grid();
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(times.size(), grid.size());
  for (std::size_t j = 0; j < op.rank(); ++j) {
    rho += op.eigenvalues()(static_cast<Eigen::Index>(j)) *
           truncated_evolution_torus(op.system()[j], times, N).cwiseAbs2();
  }
  return {times, dt, grid, std::move(rho)};
}

double StrichartzScan::ratio_spread() const { return max_over_min(ratios); }

CsvTable StrichartzScan::to_csv() const {
  CsvTable table({"N", "lhs", "ratio"});
  table.add_comment("p", format_double(exponents.p));
  table.add_comment("q", format_double(exponents.q));
  table.add_comment("beta", format_double(exponents.beta));
  table.add_comment("lhs_slope", format_double(lhs.slope));
  table.add_comment("claimed", format_double(lhs.claimed));
  for (std::size_t i = 0; i < lhs.N.size(); ++i) table.add_numeric_row({lhs.N[i], lhs.values[i], ratios[i]});
  return table;
}

StrichartzScan strichartz_scaling_torus(const ExperimentConfig& cfg) {
  const auto problems = cfg.violations();
  if (!problems.empty()) throw std::invalid_argument(join(problems));
  return strichartz_scaling_torus(cfg, {cfg.exponents}).front();
}

std::vector<StrichartzScan> strichartz_scaling_torus(const ExperimentConfig& cfg,
                                                     const std::vector<ExponentTriple>& triples) {
  for (const auto& e : triples) {
    ExperimentConfig single = cfg;
    single.exponents = e;
    const auto problems = single.violations();
    if (!problems.empty()) throw std::invalid_argument(join(problems));
  }
  std::vector<StrichartzScan> scans(triples.size());
  std::vector<std::vector<double>> lhs(triples.size());
  std::vector<double> Ns;
  for (std::size_t e = 0; e < triples.size(); ++e) scans[e].exponents = triples[e];

  if (cfg.recipe == SystemRecipe::Counterexample) {
    const auto cx = counterexample_scan(cfg.N_list, triples, std::min(cfg.t_samples, 8));
    for (std::size_t e = 0; e < triples.size(); ++e) {
      for (const auto& rec : cx[e].records) {
        lhs[e].push_back(rec.lhs * cfg.lambda_scale);
        scans[e].ratios.push_back(cfg.lambda_scale > 0.0 ? rec.ratio : 0.0);
      }
    }
    for (int N : cfg.N_list) Ns.push_back(N);
  } else {
    const double dt = kTwoPi / cfg.t_samples;
    const Eigen::ArrayXd times = uniform_times(0.0, kTwoPi, cfg.t_samples);
    for (int N : cfg.N_list) {
      const Grid1D grid = Grid1D::torus(torus_points_for(N, cfg.x_points_per_mode));
      const std::size_t count = cfg.recipe == SystemRecipe::SingleMode ? 1 : static_cast<std::size_t>(cfg.systems);
      std::vector<std::vector<double>> sys_lhs(count, std::vector<double>(triples.size()));
      std::vector<std::vector<double>> sys_ratio(count, std::vector<double>(triples.size()));
      parallel_for(count, [&](std::size_t s) {
        CompactOperatorRep op;
        if (cfg.recipe == SystemRecipe::SingleMode) {
          const Eigen::VectorXcd v =
              (Complex(0.0, 1.0) * grid.points().matrix().cast<Complex>()).array().exp().matrix() / std::sqrt(kTwoPi);
          op = CompactOperatorRep(Eigen::ArrayXd::Constant(1, cfg.lambda_scale),
                                  OrthonormalSystem({WaveFunction(grid, v)}));
        } else {
          const auto key = static_cast<std::uint64_t>(N);
          const CounterRng g1 = CounterRng(cfg.seeds.omega).substream(key).substream(s);
          const CounterRng g2 = CounterRng(cfg.seeds.omega_tilde).substream(key).substream(s);
          op = CompactOperatorRep(random_eigenvalues(cfg.rank, cfg.lambda_scale, g2),
                                  random_band_system(grid, 0, N, cfg.rank, g1));
        }
        const SpaceTimeField<double> rho = truncated_density(op, times, dt, N);
        for (std::size_t e = 0; e < triples.size(); ++e) {
          const double value = mixed_norm(rho, triples[e].p, triples[e].q);
          const double lam = sequence_norm(op.eigenvalues(), triples[e].beta);
          sys_lhs[s][e] = value;
          sys_ratio[s][e] = lam > 0.0 ? value / (std::pow(N, 1.0 / triples[e].p) * lam) : 0.0;
        }
      });
      Ns.push_back(N);
      for (std::size_t e = 0; e < triples.size(); ++e) {
        double best_lhs = 0.0;
        double best_ratio = 0.0;
        for (std::size_t s = 0; s < count; ++s) {
          best_lhs = std::max(best_lhs, sys_lhs[s][e]);
          best_ratio = std::max(best_ratio, sys_ratio[s][e]);
        }
        lhs[e].push_back(best_lhs);
        scans[e].ratios.push_back(best_ratio);
      }
    }
  }
  for (std::size_t e = 0; e < triples.size(); ++e) scans[e].lhs = fit_exponent(Ns, lhs[e], 1.0 / triples[e].p);
  return scans;
}

namespace {

/// Σ_{|j|≤N} (2π)^{-1} |𝒟_N e^{ijx}|² and the worst modulus deviation from 1/(2π).
SpaceTimeField<double> counterexample_density(int N, int t_samples, double& deviation) {
  if (N < 1) throw std::invalid_argument("N must be ≥ 1");
  if (t_samples < 1) throw std::invalid_argument("t_samples must be ≥ 1");
  const Grid1D grid = Grid1D::torus(torus_points_for(N, 1));
  const Eigen::ArrayXd times = uniform_times(0.0, kTwoPi, t_samples);
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(t_samples, grid.size());
  deviation = 0.0;
  for (int j = -N; j <= N; ++j) {
    const Eigen::VectorXcd f = (Complex(0.0, j) * grid.points().matrix().cast<Complex>()).array().exp().matrix();
    const Eigen::MatrixXd mod2 = truncated_evolution_torus(WaveFunction(grid, f), times, N).cwiseAbs2();
    deviation = std::max(deviation, (mod2.array().sqrt() - 1.0 / kTwoPi).abs().maxCoeff());
    rho += mod2 / kTwoPi;
  }
  return {times, kTwoPi / t_samples, grid, std::move(rho)};
}

CounterexampleRecord counterexample_record(int N, const SpaceTimeField<double>& rho, double deviation,
                                           const ExponentTriple& e) {
  CounterexampleRecord rec;
  rec.N = N;
  rec.lhs = mixed_norm(rho, e.p, e.q);
  rec.rhs = std::pow(N, 1.0 / e.p) * sequence_norm(Eigen::ArrayXd::Constant(2 * N + 1, 1.0 / kTwoPi), e.beta);
  rec.ratio = rec.lhs / rec.rhs;
  rec.modulus_deviation = deviation;
  return rec;
}

}  // namespace

CounterexampleRecord optimality_counterexample(int N, double p, double q, double beta, int t_samples) {
  require_exponent(p, "p");
  require_exponent(q, "q");
  require_exponent(beta, "β");
  double deviation = 0.0;
  const SpaceTimeField<double> rho = counterexample_density(N, t_samples, deviation);
  return counterexample_record(N, rho, deviation, {p, q, beta});
}

CsvTable CounterexampleScan::to_csv() const {
  CsvTable table({"N", "lhs", "rhs", "ratio", "modulus_deviation"});
  table.add_comment("p", format_double(exponents.p));
  table.add_comment("q", format_double(exponents.q));
  table.add_comment("beta", format_double(exponents.beta));
  table.add_comment("lhs_slope", format_double(lhs.slope));
  table.add_comment("ratio_slope", format_double(ratio.slope));
  table.add_comment("ratio_claimed", format_double(ratio.claimed));
  for (const auto& r : records) table.add_numeric_row({double(r.N), r.lhs, r.rhs, r.ratio, r.modulus_deviation});
  return table;
}

CounterexampleScan counterexample_scan(const std::vector<int>& N_list, double p, double q, double beta,
                                       int t_samples) {
  return counterexample_scan(N_list, {ExponentTriple{p, q, beta}}, t_samples).front();
}

std::vector<CounterexampleScan> counterexample_scan(const std::vector<int>& N_list,
                                                    const std::vector<ExponentTriple>& triples, int t_samples) {
  for (const auto& e : triples) {
    require_exponent(e.p, "p");
    require_exponent(e.q, "q");
    require_exponent(e.beta, "β");
  }
  std::vector<CounterexampleScan> scans(triples.size());
  for (std::size_t e = 0; e < triples.size(); ++e) {
    scans[e].exponents = triples[e];
    scans[e].records.resize(N_list.size());
  }
  parallel_for(N_list.size(), [&](std::size_t i) {
    double deviation = 0.0;
    const SpaceTimeField<double> rho = counterexample_density(N_list[i], t_samples, deviation);
    for (std::size_t e = 0; e < triples.size(); ++e) {
      scans[e].records[i] = counterexample_record(N_list[i], rho, deviation, triples[e]);
    }
  });
  for (auto& scan : scans) {
    std::vector<double> Ns;
    std::vector<double> lhs;
    std::vector<double> ratio;
    for (const auto& r : scan.records) {
      Ns.push_back(r.N);
      lhs.push_back(r.lhs);
      ratio.push_back(r.ratio);
    }
    const ExponentTriple& e = scan.exponents;
    scan.lhs = fit_exponent(Ns, lhs, 1.0);
    scan.ratio = fit_exponent(Ns, ratio, 1.0 - 1.0 / e.p - 1.0 / e.beta);
  }
  return scans;
}

CounterexampleScan maximal_space_scaling(const std::vector<int>& N_list, double beta, bool counterexample_mode,
                                         int t_samples) {
  if (!counterexample_mode && beta > 2.0) throw std::invalid_argument("β exceeds 2 in bound mode");
  return counterexample_scan(N_list, 2.0, kInf, beta, t_samples);
}

double maximal_in_time_ratio(const CompactOperatorRep& op, double beta, int t_samples) {
  if (!(beta < 2.0)) throw std::invalid_argument("β must be < 2 for the maximal-in-time estimate");
  if (t_samples < 2) throw std::invalid_argument("need at least 2 time samples");
  if (op.rank() == 0) throw std::invalid_argument("maximal-in-time ratio needs a positive-rank operator");
  const Eigen::ArrayXd times = Eigen::ArrayXd::LinSpaced(t_samples, 0.0, 1.0);
  const Eigen::MatrixXd rho = density_evolution(op, times);
  const Eigen::ArrayXd sup_t = rho.colwise().maxCoeff().transpose().array();
  const double lam = sequence_norm(op.eigenvalues(), beta);
  if (lam == 0.0) throw std::invalid_argument("degenerate data: λ = 0");
  return lorentz_weak_norm(sup_t, op.system()[0].grid(), 2.0) / lam;
}

double MaximalRankScan::spread() const { return max_over_min(ratios); }

CsvTable MaximalRankScan::to_csv() const {
  CsvTable table({"rank", "ratio"});
  table.add_comment("beta", format_double(beta));
  table.add_comment("s", format_double(s));
  table.add_comment("interval", "[0,1]");
  for (std::size_t i = 0; i < ranks.size(); ++i) table.add_numeric_row({double(ranks[i]), ratios[i]});
  return table;
}

MaximalRankScan maximal_rank_scan(const MaximalScanConfig& cfg) {
  if (cfg.systems < 1) throw std::invalid_argument("systems must be ≥ 1");
  MaximalRankScan scan;
  scan.beta = cfg.beta;
  scan.ranks = cfg.ranks;
  const Grid1D grid = Grid1D::line(cfg.grid_points);
  for (int rank : cfg.ranks) {
    if (rank < 1) throw std::invalid_argument("rank must be ≥ 1");
    std::vector<double> ratios(static_cast<std::size_t>(cfg.systems));
    parallel_for(ratios.size(), [&](std::size_t s) {
      const CounterRng g1 = CounterRng(cfg.seeds.omega).substream(static_cast<std::uint64_t>(rank)).substream(s);
      const CounterRng g2 = CounterRng(cfg.seeds.omega_tilde).substream(static_cast<std::uint64_t>(rank)).substream(s);
      const CompactOperatorRep op = random_lifted_operator(grid, 1, cfg.k_max, rank, scan.s, 1.0, g1, g2);
      ratios[s] = maximal_in_time_ratio(op, cfg.beta, cfg.t_samples);
    });
    scan.ratios.push_back(*std::max_element(ratios.begin(), ratios.end()));
  }
  return scan;
}

std::vector<ConvergenceRow> pointwise_convergence_scan(const CompactOperatorRep& op, const std::vector<double>& t_list) {
  if (op.rank() == 0) throw std::invalid_argument("convergence scan needs a positive-rank operator");
  const Eigen::ArrayXd rho0 = density_function(op, 0.0).values;
  std::vector<ConvergenceRow> rows(t_list.size());
  parallel_for(rows.size(), [&](std::size_t i) {
    rows[i] = {t_list[i], (density_function(op, t_list[i]).values - rho0).abs().maxCoeff()};
  });
  return rows;
}

CsvTable convergence_csv(const std::vector<ConvergenceRow>& rows) {
  CsvTable table({"t", "sup_deviation"});
  for (const auto& r : rows) table.add_numeric_row({r.t, r.deviation});
  return table;
}

std::vector<double> dyadic_times(int m_min, int m_max) {
  std::vector<double> t;
  for (int m = m_min; m <= m_max; ++m) t.push_back(std::ldexp(1.0, -m));
  return t;
}

Eigen::MatrixXcd truncated_propagator_matrix(const Eigen::ArrayXd& times, const Grid1D& grid, int N) {
  if (grid.geometry() != Geometry::Torus) throw std::invalid_argument("𝒟_N acts on the torus");
  const long rows = static_cast<long>(times.size()) * grid.size();
  if (rows * (2L * N + 1) > kSvdBudget * 64) throw std::invalid_argument("grid too large for SVD budget");
  const double scale = 1.0 / (kTwoPi * std::sqrt(kTwoPi));
  const Eigen::ArrayXd& x = grid.points();
  Eigen::MatrixXcd A(rows, 2 * N + 1);
  for (Eigen::Index it = 0; it < times.size(); ++it) {
    for (Eigen::Index ix = 0; ix < x.size(); ++ix) {
      for (int k = -N; k <= N; ++k) {
        A(it * x.size() + ix, k + N) = std::polar(scale, k * x(ix) + times(it) * boussinesq_symbol(k));
      }
    }
  }
  return A;
}

namespace {

/// Row-major flattening matching truncated_propagator_matrix.
Eigen::VectorXd flatten(const Eigen::MatrixXd& m) {
  Eigen::VectorXd v(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i) v.segment(i * m.cols(), m.cols()) = m.row(i).transpose();
  return v;
}

double dual_ratio_with(const SpaceTimeField<double>& W, const Eigen::MatrixXcd& A, double p, double q, double beta) {
  const double denom = std::pow(mixed_norm(W, 2.0 * conjugate_exponent(p), 2.0 * conjugate_exponent(q)), 2.0);
  if (denom == 0.0) return 0.0;
  const double cell = W.dt * W.xgrid.spacing();
  const Eigen::VectorXd scale = flatten(W.values) * std::sqrt(cell);
  const Eigen::MatrixXcd B = scale.cast<Complex>().asDiagonal() * A;
  const Eigen::ArrayXd sigma = singular_values(B);
  return sequence_norm(sigma.square(), conjugate_exponent(beta)) / denom;
}

}  // namespace

double dual_ratio(const SpaceTimeField<double>& W, int N, double p, double q, double beta) {
  if (static_cast<long>(W.values.size()) > kSvdBudget) throw std::invalid_argument("grid too large for SVD budget");
  return dual_ratio_with(W, truncated_propagator_matrix(W.times, W.xgrid, N), p, q, beta);
}

SpaceTimeField<double> norming_function(const SpaceTimeField<double>& rho, double p, double q) {
  if (std::isinf(p) || std::isinf(q)) throw std::invalid_argument("norming function needs finite exponents");
  const double total = mixed_norm(rho, p, q);
  if (total == 0.0) throw std::invalid_argument("norming function needs a nonzero density");
  const Eigen::ArrayXd& wx = rho.xgrid.weights();
  Eigen::MatrixXd V(rho.values.rows(), rho.values.cols());
  for (Eigen::Index i = 0; i < rho.values.rows(); ++i) {
    const Eigen::ArrayXd r = rho.values.row(i).transpose().array().abs();
    const double row_norm = weighted_lp_norm(r, wx, q);
    if (row_norm == 0.0) {
      V.row(i).setZero();
      continue;
    }
    const Eigen::ArrayXd base = q == 1.0 ? Eigen::ArrayXd::Ones(r.size()) : Eigen::ArrayXd(r.pow(q - 1.0));
    V.row(i) = (base * (std::pow(row_norm, p - q) / std::pow(total, p - 1.0))).matrix().transpose();
  }
  return {rho.times, rho.dt, rho.xgrid, std::move(V)};
}

CsvTable DualityRecord::to_csv() const {
  CsvTable table({"sample", "primal", "witness_dual", "random_dual", "pairing_error"});
  table.add_comment("primal_max", format_double(primal));
  table.add_comment("dual_max", format_double(dual));
  table.add_comment("schatten_kernel_error", format_double(schatten_kernel_error));
  table.add_comment("holds", holds ? "true" : "false");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    table.add_numeric_row({double(i), samples[i].primal, samples[i].witness_dual,
                           i < random_dual.size() ? random_dual[i] : 0.0, samples[i].pairing_error});
  }
  return table;
}

DualityRecord duality_consistency_check(const DualityConfig& cfg) {
  const ExponentTriple& e = cfg.exponents;
  require_admissible(e);
  if (std::isinf(e.p) || std::isinf(e.q)) throw std::invalid_argument("duality check needs finite p and q");
  if (cfg.batch < 1) throw std::invalid_argument("batch must be ≥ 1");
  if (static_cast<long>(cfg.grid_points) * cfg.t_samples > kSvdBudget) {
    throw std::invalid_argument("grid too large for SVD budget");
  }
  const Grid1D grid = Grid1D::torus(cfg.grid_points);
  if (2 * cfg.N + 1 > grid.size()) throw std::invalid_argument("N beyond Nyquist for the duality grid");
  const double dt = kTwoPi / cfg.t_samples;
  const Eigen::ArrayXd times = uniform_times(0.0, kTwoPi, cfg.t_samples);
  const Eigen::MatrixXcd A = truncated_propagator_matrix(times, grid, cfg.N);
  const double cell = dt * grid.spacing();

  DualityRecord rec;
  rec.samples.resize(static_cast<std::size_t>(cfg.batch));
  rec.random_dual.resize(static_cast<std::size_t>(cfg.batch));
  std::vector<double> schatten_err(static_cast<std::size_t>(cfg.batch));
  const CounterRng root1(cfg.seeds.omega);
  const CounterRng root2(cfg.seeds.omega_tilde);
  parallel_for(rec.samples.size(), [&](std::size_t i) {
    const CounterRng g1 = root1.substream(i);
    const CounterRng g2 = root2.substream(i);
    const CompactOperatorRep op(random_eigenvalues(cfg.rank, 1.0, g2), random_band_system(grid, 0, cfg.N, cfg.rank, g1));
    const SpaceTimeField<double> rho = truncated_density(op, times, dt, cfg.N);
    const double lam = sequence_norm(op.eigenvalues(), e.beta);
    DualitySample& out = rec.samples[i];
    out.primal = mixed_norm(rho, e.p, e.q) / lam;

    const SpaceTimeField<double> V = norming_function(rho, e.p, e.q);
    const SpaceTimeField<double> W(times, dt, grid, V.values.cwiseSqrt());
    out.witness_dual = dual_ratio_with(W, A, e.p, e.q, e.beta);

    const double paired = cell * (V.values.array() * rho.values.array()).sum();
    const Eigen::VectorXd vw = flatten(V.values) * cell;
    const Eigen::MatrixXcd T = A.adjoint() * vw.cast<Complex>().asDiagonal() * A;
    double via_operator = 0.0;
    for (std::size_t j = 0; j < op.rank(); ++j) {
      const Eigen::VectorXcd c = spectrum(op.system()[j].values());
      Eigen::VectorXcd a(2 * cfg.N + 1);
      for (int k = -cfg.N; k <= cfg.N; ++k) a(k + cfg.N) = std::sqrt(kTwoPi) * c(fft_bin(k, grid.size()));
      via_operator += op.eigenvalues()(static_cast<Eigen::Index>(j)) * a.dot(T * a).real();
    }
    out.pairing_error = std::abs(paired - via_operator) / std::max(std::abs(paired), 1e-300);

    const CounterRng gw = CounterRng(cfg.seeds.omega ^ 0x5757575757575757ULL).substream(i);
    Eigen::MatrixXd random_w(cfg.t_samples, grid.size());
    for (Eigen::Index r = 0; r < random_w.rows(); ++r) {
      for (Eigen::Index c = 0; c < random_w.cols(); ++c) random_w(r, c) = std::abs(gw.draw(r * random_w.cols() + c));
    }
    rec.random_dual[i] = dual_ratio_with(SpaceTimeField<double>(times, dt, grid, random_w), A, e.p, e.q, e.beta);

    const Eigen::MatrixXcd K = operator_kernel(op, 0.0);
    const double s2 = schatten_norm(K, grid.weights(), 2.0);
    const double l2 = kernel_l2_norm(K, grid.weights());
    const double lam2 = sequence_norm(op.eigenvalues(), 2.0);
    schatten_err[i] = std::max(std::abs(s2 - l2), std::abs(s2 - lam2)) / lam2;
  });

  rec.holds = true;
  for (std::size_t i = 0; i < rec.samples.size(); ++i) {
    const auto& s = rec.samples[i];
    rec.primal = std::max(rec.primal, s.primal);
    rec.dual = std::max({rec.dual, s.witness_dual, rec.random_dual[i]});
    rec.max_pairing_error = std::max(rec.max_pairing_error, s.pairing_error);
    rec.schatten_kernel_error = std::max(rec.schatten_kernel_error, schatten_err[i]);
    if (s.primal > s.witness_dual * kSlackFactor) rec.holds = false;
  }
  if (rec.primal > rec.dual * kSlackFactor) rec.holds = false;
  return rec;
}

}  // namespace boussinesq
