#include "boussinesq/randomization.hpp"

#include "boussinesq/oscillatory.hpp"
#include "boussinesq/parallel.hpp"
#include "boussinesq/spectral.hpp"

#include <cmath>
#include <stdexcept>

namespace boussinesq {

Eigen::ArrayXcd randomization_multiplier(const Grid1D& grid, const CounterRng& g1) {
  const Eigen::ArrayXd xi = grid.frequencies();
  Eigen::ArrayXcd m(xi.size());
  if (grid.geometry() == Geometry::Torus) {
    for (Eigen::Index i = 0; i < xi.size(); ++i) m(i) = g1.draw(static_cast<std::int64_t>(std::lround(xi(i))));
    return m;
  }
  if (grid.geometry() != Geometry::Line) throw std::invalid_argument("spectral randomization needs a line or torus grid");
  for (Eigen::Index i = 0; i < xi.size(); ++i) {
    const auto base = static_cast<std::int64_t>(std::floor(xi(i)));
    double sum = 0.0;
    for (std::int64_t k = base - 1; k <= base + 2; ++k) {
      const double w = BumpFunction::wiener(xi(i) - static_cast<double>(k));
      if (w != 0.0) sum += g1.draw(k) * w;
    }
    m(i) = sum;
  }
  return m;
}

WaveFunction wiener_randomize_line(const WaveFunction& f, const CounterRng& g1) {
  if (f.grid().geometry() != Geometry::Line) throw std::invalid_argument("Wiener randomization needs a line grid");
  return apply_multiplier(f, randomization_multiplier(f.grid(), g1));
}

WaveFunction fourier_randomize_torus(const WaveFunction& f, const CounterRng& g1) {
  if (f.grid().geometry() != Geometry::Torus) throw std::invalid_argument("Fourier randomization needs a torus grid");
  return apply_multiplier(f, randomization_multiplier(f.grid(), g1));
}

namespace {

Eigen::ArrayXd ball_multiplier(Eigen::Index modes, const CounterRng& g1) {
  Eigen::ArrayXd m(modes);
  for (Eigen::Index k = 1; k <= modes; ++k) m(k - 1) = g1.draw(k) / (static_cast<double>(k) * kPi);
  return m;
}

}  // namespace

WaveFunction ball_randomize(const WaveFunction& f, const CounterRng& g1) {
  if (f.grid().geometry() != Geometry::BallRadial) throw std::invalid_argument("ball randomization needs a ball grid");
  const Eigen::VectorXcd& c = f.ball_coefficients();
  Eigen::VectorXcd out = (c.array() * ball_multiplier(c.size(), g1)).matrix();
  return WaveFunction::from_ball_coefficients(f.grid(), std::move(out));
}

WaveFunction randomize_function(const WaveFunction& f, const CounterRng& g1) {
  switch (f.grid().geometry()) {
    case Geometry::Line:
      return wiener_randomize_line(f, g1);
    case Geometry::Torus:
      return fourier_randomize_torus(f, g1);
    case Geometry::BallRadial:
      return ball_randomize(f, g1);
  }
  throw std::logic_error("unreachable geometry");
}

DensityField RandomizedOperator::density(double t, const Grid1D& grid) const {
  Eigen::ArrayXd rho = Eigen::ArrayXd::Zero(grid.size());
  for (std::size_t j = 0; j < randomized_functions.size(); ++j) {
    const auto idx = static_cast<Eigen::Index>(j);
    rho += base.eigenvalues()(idx) * g2_draws(idx) * propagate(randomized_functions[j], t).values().array().abs2();
  }
  return {grid, t, std::move(rho)};
}

RandomizedOperator randomize_operator(const CompactOperatorRep& gamma0, const CounterRng& g1, const CounterRng& g2) {
  RandomizedOperator out{gamma0, Eigen::ArrayXd(static_cast<Eigen::Index>(gamma0.rank())), {}};
  out.randomized_functions.reserve(gamma0.rank());
  for (std::size_t j = 0; j < gamma0.rank(); ++j) {
    out.g2_draws(static_cast<Eigen::Index>(j)) = g2.draw(static_cast<std::int64_t>(j) + 1);
    out.randomized_functions.push_back(randomize_function(gamma0.system()[j], g1));
  }
  return out;
}

RandomizedOperator randomize_operator(const CompactOperatorRep& gamma0, const RandomSeedPair& seeds,
                                      VariateKind kind) {
  return randomize_operator(gamma0, CounterRng(seeds.omega, kind), CounterRng(seeds.omega_tilde, kind));
}

double khinchin_ratio(const Eigen::ArrayXd& a, double r, int n_samples, const CounterRng& rng) {
  if (!(r >= 2.0)) throw std::invalid_argument("Khinchin ratio needs r >= 2");
  if (n_samples < 1) throw std::invalid_argument("need at least one sample");
  const double norm = std::sqrt(a.abs2().sum());
  if (norm == 0.0) throw std::invalid_argument("coefficient vector must be nonzero");
  std::vector<double> moments(static_cast<std::size_t>(n_samples));
  parallel_for(moments.size(), [&](std::size_t i) {
    const CounterRng stream = rng.substream(i);
    double s = 0.0;
    for (Eigen::Index k = 0; k < a.size(); ++k) s += a(k) * stream.draw(k);
    moments[i] = std::pow(std::abs(s), r);
  });
  return std::pow(pairwise_sum(moments) / n_samples, 1.0 / r) / norm;
}

CsvTable ContinuityTable::to_csv() const {
  CsvTable table({"t", "point_norm", "l2_norm"});
  table.add_comment("geometry", boussinesq::to_string(geometry));
  table.add_comment("seed_omega", std::to_string(seeds.omega));
  table.add_comment("seed_omega_tilde", std::to_string(seeds.omega_tilde));
  table.add_comment("variates", boussinesq::to_string(kind));
  table.add_comment("r", format_double(r));
  table.add_comment("samples", std::to_string(samples));
  table.add_comment("x0", format_double(x0));
  for (const auto& row : rows) table.add_numeric_row({row.t, row.point_norm, row.l2_norm});
  return table;
}

namespace {

/// |e^{it√(∂⁴−∂²)} f|² for each t, from a precomputed representation of f.
class Evolver {
 public:
  Evolver(const WaveFunction& f) : grid_(f.grid()) {
    if (grid_.geometry() == Geometry::BallRadial) {
      coefficients_ = f.ball_coefficients();
    } else {
      coefficients_ = spectrum(f.values());
      symbol_ = grid_.frequencies().unaryExpr([](double xi) { return boussinesq_symbol(xi); });
    }
  }

  /// Randomized spectrum: coefficients times the ω multiplier.
  Evolver randomized(const CounterRng& g1) const {
    Evolver copy = *this;
    if (grid_.geometry() == Geometry::BallRadial) {
      copy.coefficients_.array() *= ball_multiplier(coefficients_.size(), g1);
    } else {
      copy.coefficients_.array() *= randomization_multiplier(grid_, g1);
    }
    return copy;
  }

  Eigen::ArrayXd intensity(double t) const {
    if (grid_.geometry() == Geometry::BallRadial) {
      Eigen::VectorXcd c = coefficients_;
      if (t != 0.0) {
        for (Eigen::Index m = 1; m <= c.size(); ++m) c(m - 1) *= std::polar(1.0, t * ball_symbol(static_cast<int>(m)));
      }
      return ball_values(grid_, c).array().abs2();
    }
    if (t == 0.0) return from_spectrum(coefficients_).array().abs2();
    Eigen::VectorXcd c = coefficients_;
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) *= std::polar(1.0, t * symbol_(i));
    return from_spectrum(c).array().abs2();
  }

 private:
  Grid1D grid_;
  Eigen::VectorXcd coefficients_;
  Eigen::ArrayXd symbol_;
};

}  // namespace

ContinuityTable stochastic_continuity_experiment(const CompactOperatorRep& gamma0, const std::vector<double>& t_list,
                                                 double r, int n_samples, const RandomSeedPair& seeds,
                                                 VariateKind kind) {
  if (!(r >= 2.0) || std::isinf(r)) throw std::invalid_argument("stochastic continuity needs r in [2, inf)");
  if (n_samples < 1) throw std::invalid_argument("need at least one sample");
  if (gamma0.rank() == 0) throw std::invalid_argument("stochastic continuity needs a positive-rank operator");
  const Grid1D& grid = gamma0.system()[0].grid();

  ContinuityTable table;
  table.geometry = grid.geometry();
  table.r = r;
  table.samples = n_samples;
  table.seeds = seeds;
  table.kind = kind;

  const DensityField rho0 = density_function(gamma0, 0.0, grid);
  Eigen::Index x0 = 0;
  rho0.values.abs().maxCoeff(&x0);
  table.x0 = grid.points()(x0);

  std::vector<Evolver> base;
  base.reserve(gamma0.rank());
  for (const auto& f : gamma0.system().functions()) base.emplace_back(f);

  const std::size_t nt = t_list.size();
  const auto samples = static_cast<std::size_t>(n_samples);
  std::vector<double> point(samples * nt);
  std::vector<double> l2(samples * nt);
  const CounterRng root1(seeds.omega, kind);
  const CounterRng root2(seeds.omega_tilde, kind);
  parallel_for(samples, [&](std::size_t s) {
    const CounterRng g1 = root1.substream(s);
    const CounterRng g2 = root2.substream(s);
    std::vector<Evolver> randomized;
    std::vector<Eigen::ArrayXd> initial;
    randomized.reserve(base.size());
    for (const auto& e : base) {
      randomized.push_back(e.randomized(g1));
      initial.push_back(randomized.back().intensity(0.0));
    }
    for (std::size_t i = 0; i < nt; ++i) {
      Eigen::ArrayXd F = Eigen::ArrayXd::Zero(grid.size());
      for (std::size_t j = 0; j < randomized.size(); ++j) {
        const auto idx = static_cast<Eigen::Index>(j);
        const double weight = gamma0.eigenvalues()(idx) * g2.draw(idx + 1);
        F += weight * (initial[j] - randomized[j].intensity(t_list[i]));
      }
      point[s * nt + i] = std::pow(std::abs(F(x0)), r);
      l2[s * nt + i] = std::pow(std::sqrt((grid.weights() * F.square()).sum()), r);
    }
  });

  std::vector<double> column(samples);
  for (std::size_t i = 0; i < nt; ++i) {
    ContinuityRow row;
    row.t = t_list[i];
    for (std::size_t s = 0; s < samples; ++s) column[s] = point[s * nt + i];
    row.point_norm = std::pow(pairwise_sum(column) / n_samples, 1.0 / r);
    for (std::size_t s = 0; s < samples; ++s) column[s] = l2[s * nt + i];
    row.l2_norm = std::pow(pairwise_sum(column) / n_samples, 1.0 / r);
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace boussinesq
