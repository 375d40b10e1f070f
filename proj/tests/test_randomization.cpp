#include "boussinesq/experiments.hpp"
#include "boussinesq/oscillatory.hpp"
#include "boussinesq/parallel.hpp"
#include "boussinesq/randomization.hpp"
#include "boussinesq/spectral.hpp"

#include <doctest.h>

#include <cmath>

using namespace boussinesq;

namespace {

WaveFunction torus_mode(const Grid1D& grid, int j, double scale = 1.0) {
  Eigen::VectorXcd v(grid.size());
  for (int i = 0; i < grid.size(); ++i) v(i) = scale * std::polar(1.0, j * grid.points()(i));
  return WaveFunction(grid, v);
}

double max_distance(const WaveFunction& a, const WaveFunction& b) { return (a.values() - b.values()).cwiseAbs().maxCoeff(); }

/// Sample variance of f^ω at grid index i0 over draws g1 = root.substream(s).
double empirical_variance(const WaveFunction& f, Eigen::Index i0, int draws, const CounterRng& root) {
  double sum = 0.0;
  for (int s = 0; s < draws; ++s) sum += std::norm(randomize_function(f, root.substream(s)).values()(i0));
  return sum / draws;
}

}  // namespace

TEST_SUITE("randomization") {
  TEST_CASE("counter-based draws") {
    const CounterRng a(42);
    const CounterRng b(42);
    for (std::int64_t i = -5; i < 5; ++i) CHECK(a.draw(i) == b.draw(i));
    CHECK(a.substream(1).draw(0) != a.substream(2).draw(0));
    const CounterRng r(42, VariateKind::Rademacher);
    for (std::int64_t i = 0; i < 50; ++i) CHECK(std::abs(r.draw(i)) == 1.0);
    CHECK(variate_from_string("rademacher") == VariateKind::Rademacher);
    CHECK_THROWS_AS(variate_from_string("cauchy"), std::invalid_argument);
  }

  TEST_CASE("Gaussian moment generating function") {
    const CounterRng rng(2024);
    const int n = 100000;
    for (double gamma : {0.5, 1.0, 1.5}) {
      std::vector<double> v(n);
      for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = std::exp(gamma * rng.draw(i));
      CHECK(pairwise_sum(v) / n == doctest::Approx(std::exp(gamma * gamma / 2.0)).epsilon(0.05));
    }
  }

  TEST_CASE("zero input stays zero") {
    const CounterRng g(3);
    const Grid1D line = Grid1D::line(64);
    CHECK(wiener_randomize_line(WaveFunction(line, Eigen::VectorXcd::Zero(64)), g).values().isZero(0.0));
    const Grid1D torus = Grid1D::torus(16);
    CHECK(fourier_randomize_torus(WaveFunction(torus, Eigen::VectorXcd::Zero(16)), g).values().isZero(0.0));
    const Grid1D ball = Grid1D::ball_radial(16);
    CHECK(ball_randomize(WaveFunction::from_ball_coefficients(ball, Eigen::VectorXcd::Zero(4)), g)
              .values()
              .isZero(0.0));
  }

  TEST_CASE("single block is multiplied by its variate") {
    const CounterRng g(17);
    SUBCASE("line") {
      const Grid1D grid = Grid1D::line(256);
      Eigen::VectorXcd v(256);
      for (int i = 0; i < 256; ++i) v(i) = std::polar(1.0, 1.0 * grid.points()(i));
      const WaveFunction f(grid, v);
      const WaveFunction out = wiener_randomize_line(f, g);
      CHECK(max_distance(out, WaveFunction(grid, g.draw(1) * v)) <= 1e-12);
    }
    SUBCASE("torus") {
      const Grid1D grid = Grid1D::torus(16);
      const WaveFunction out = fourier_randomize_torus(torus_mode(grid, -3), g);
      CHECK(max_distance(out, WaveFunction(grid, g.draw(-3) * torus_mode(grid, -3).values())) <= 1e-12);
    }
    SUBCASE("ball") {
      const Grid1D grid = Grid1D::ball_radial(32);
      Eigen::VectorXcd c = Eigen::VectorXcd::Zero(3);
      c(2) = 2.0;
      const WaveFunction out = ball_randomize(WaveFunction::from_ball_coefficients(grid, c), g);
      CHECK(std::abs(out.ball_coefficients()(2) - g.draw(3) * 2.0 / (3.0 * kPi)) <= 1e-15);
      CHECK(std::abs(out.ball_coefficients()(0)) == 0.0);
    }
  }

  TEST_CASE("variance oracles") {
    const int draws = 10000;
    const CounterRng root(99);
    SUBCASE("line: Σ_k |ψ(D − k) f(x₀)|²") {
      const Grid1D grid = Grid1D::line(256);
      const WaveFunction f = random_operator(grid, 64, 1, RandomSeedPair{5, 6}).system()[0];
      const Eigen::Index i0 = 128;
      double oracle = 0.0;
      for (int k = -3; k <= 3; ++k) {
        const WaveFunction block = apply_symbol(f, [k](double xi) { return BumpFunction::wiener(xi - k); });
        oracle += std::norm(block.values()(i0));
      }
      CHECK(empirical_variance(f, i0, draws, root) == doctest::Approx(oracle).epsilon(0.05));
    }
    SUBCASE("torus: Σ_k |f̂(k)|²") {
      const Grid1D grid = Grid1D::torus(32);
      const WaveFunction f = random_operator(grid, 5, 1, RandomSeedPair{7, 8}).system()[0];
      const Eigen::VectorXcd c = spectrum(f.values());
      CHECK(empirical_variance(f, 3, draws, root) == doctest::Approx(c.squaredNorm()).epsilon(0.05));
    }
    SUBCASE("ball: Σ_m |c_m/(mπ)|² e_m(r₀)²") {
      const Grid1D grid = Grid1D::ball_radial(64);
      const WaveFunction f = random_operator(grid, 4, 1, RandomSeedPair{9, 10}).system()[0];
      const Eigen::Index i0 = 10;
      double oracle = 0.0;
      for (int m = 1; m <= 4; ++m) {
        oracle += std::norm(f.ball_coefficients()(m - 1) / (m * kPi)) *
                  std::pow(ball_eigenfunction(m, grid.points()(i0)), 2);
      }
      CHECK(empirical_variance(f, i0, draws, root) == doctest::Approx(oracle).epsilon(0.05));
    }
  }

  TEST_CASE("linearity with shared draws") {
    const CounterRng g(55);
    const Grid1D grid = Grid1D::line(128);
    const auto sys = random_operator(grid, 32, 2, RandomSeedPair{1, 1}).system();
    const Complex a(0.5, -1.0);
    const double b = 2.5;
    const WaveFunction mix(grid, a * sys[0].values() + b * sys[1].values());
    const WaveFunction lhs = randomize_function(mix, g);
    const WaveFunction rhs(grid, a * randomize_function(sys[0], g).values() + b * randomize_function(sys[1], g).values());
    CHECK(max_distance(lhs, rhs) <= 1e-12);
  }

  TEST_CASE("randomized operators") {
    const Grid1D grid = Grid1D::torus(16);
    SUBCASE("seeded determinism") {
      const CompactOperatorRep op = random_operator(grid, 4, 3, RandomSeedPair{1, 2});
      const RandomizedOperator a = randomize_operator(op, RandomSeedPair{8, 9});
      const RandomizedOperator b = randomize_operator(op, RandomSeedPair{8, 9});
      CHECK((a.g2_draws == b.g2_draws).all());
      for (std::size_t j = 0; j < op.rank(); ++j) CHECK(a.randomized_functions[j].values() == b.randomized_functions[j].values());
      CHECK((a.density(0.3, grid).values == b.density(0.3, grid).values).all());
    }
    SUBCASE("degenerate draws reduce to the unrandomized density") {
      const CompactOperatorRep op = random_operator(grid, 4, 3, RandomSeedPair{1, 2});
      const CounterRng ones(1, VariateKind::Rademacher);
      RandomizedOperator r = randomize_operator(op, ones, ones);
      r.g2_draws.setOnes();
      Eigen::ArrayXd expected = Eigen::ArrayXd::Zero(16);
      for (std::size_t j = 0; j < op.rank(); ++j) {
        expected += op.eigenvalues()(static_cast<Eigen::Index>(j)) * r.randomized_functions[j].values().array().abs2();
      }
      CHECK((r.density(0.0, grid).values - expected).abs().maxCoeff() <= 1e-14);
    }
    SUBCASE("rank 0") {
      const CompactOperatorRep op(Eigen::ArrayXd(0), OrthonormalSystem{});
      CHECK(randomize_operator(op, RandomSeedPair{}).density(0.2, grid).values.isZero(0.0));
    }
    SUBCASE("mean trace vanishes") {
      const CompactOperatorRep op = random_operator(grid, 4, 2, RandomSeedPair{3, 4});
      const int n = 10000;
      std::vector<double> traces(n);
      const CounterRng r1(11);
      const CounterRng r2(12);
      for (int s = 0; s < n; ++s) {
        traces[static_cast<std::size_t>(s)] =
            randomize_operator(op, r1.substream(s), r2.substream(s)).density(0.0, grid).integral();
      }
      const double mean = pairwise_sum(traces) / n;
      double var = 0.0;
      for (double v : traces) var += (v - mean) * (v - mean);
      const double sigma = std::sqrt(var / (n - 1) / n);
      CHECK(std::abs(mean) <= 3.0 * sigma);
    }
  }

  TEST_CASE("Khinchin ratios") {
    const CounterRng rng = CounterRng(1).substream(0x4b48);
    const int n = 10000;
    Eigen::ArrayXd a(16);
    for (int k = 0; k < 16; ++k) a(k) = 1.0 / (k + 1);
    CHECK(std::abs(khinchin_ratio(a, 2.0, n, rng) - 1.0) <= 3.0 / std::sqrt(double(n)));
    CHECK(khinchin_ratio(a, 4.0, n, rng) == doctest::Approx(std::pow(3.0, 0.25)).epsilon(0.05 / 1.3161));
    Eigen::ArrayXd single = Eigen::ArrayXd::Zero(4);
    single(2) = -3.0;
    const double third = std::cbrt(2.0 * std::sqrt(2.0 / kPi));
    CHECK(khinchin_ratio(single, 3.0, 20000, rng) == doctest::Approx(third).epsilon(0.03));
    CHECK_THROWS_AS(khinchin_ratio(a, 1.5, n, rng), std::invalid_argument);
  }

  TEST_CASE("stochastic continuity") {
    const std::vector<double> ts{0.25, 1.0 / 64, 1.0 / 1024, 0.0};
    SUBCASE("single Fourier mode gives F ≡ 0") {
      const Grid1D grid = Grid1D::torus(16);
      const OrthonormalSystem sys({torus_mode(grid, 3, 1.0 / std::sqrt(kTwoPi))});
      const CompactOperatorRep op(Eigen::ArrayXd::Ones(1), sys);
      const ContinuityTable table = stochastic_continuity_experiment(op, ts, 2.0, 50, RandomSeedPair{});
      for (const auto& row : table.rows) {
        CHECK(row.point_norm <= 1e-14);
        CHECK(row.l2_norm <= 1e-14);
      }
    }
    SUBCASE("generic torus operator decays toward t = 0") {
      const Grid1D grid = Grid1D::torus(32);
      const CompactOperatorRep op = random_operator(grid, 4, 4, RandomSeedPair{});
      const ContinuityTable table = stochastic_continuity_experiment(op, ts, 2.0, 200, RandomSeedPair{});
      REQUIRE(table.rows.size() == 4);
      CHECK(table.rows[3].point_norm == 0.0);
      CHECK(table.rows[3].l2_norm == 0.0);
      CHECK(table.rows[2].l2_norm <= 0.1 * table.rows[0].l2_norm);
      CHECK(table.rows[2].point_norm <= 0.1 * table.rows[0].point_norm);
      const std::string csv = table.to_csv().str();
      CHECK(csv.find("# seed_omega=1") != std::string::npos);
      CHECK(csv.find("# seed_omega_tilde=2") != std::string::npos);
    }
    SUBCASE("thread count does not change results") {
      const Grid1D grid = Grid1D::torus(32);
      const CompactOperatorRep op = random_operator(grid, 4, 4, RandomSeedPair{});
      const int saved = thread_count();
      set_thread_count(1);
      const ContinuityTable one = stochastic_continuity_experiment(op, ts, 2.0, 64, RandomSeedPair{});
      set_thread_count(3);
      const ContinuityTable three = stochastic_continuity_experiment(op, ts, 2.0, 64, RandomSeedPair{});
      set_thread_count(saved);
      CHECK(one.to_csv().str() == three.to_csv().str());
    }
    SUBCASE("r outside [2, inf) is rejected") {
      const CompactOperatorRep op = random_operator(Grid1D::torus(16), 4, 2, RandomSeedPair{});
      CHECK_THROWS_AS(stochastic_continuity_experiment(op, ts, 1.5, 10, RandomSeedPair{}), std::invalid_argument);
      CHECK_THROWS_AS(stochastic_continuity_experiment(op, ts, kInf, 10, RandomSeedPair{}), std::invalid_argument);
    }
  }
}
