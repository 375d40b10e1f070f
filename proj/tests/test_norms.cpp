#include "boussinesq/experiments.hpp"
#include "boussinesq/norms.hpp"
#include "boussinesq/random.hpp"
#include "boussinesq/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace boussinesq;

TEST_SUITE("norms") {
  TEST_CASE("conjugate exponents") {
    CHECK(conjugate_exponent(2.0) == 2.0);
    CHECK(conjugate_exponent(4.0) == doctest::Approx(4.0 / 3.0));
    CHECK(std::isinf(conjugate_exponent(1.0)));
    CHECK(conjugate_exponent(kInf) == 1.0);
    CHECK_THROWS_AS(conjugate_exponent(0.5), std::invalid_argument);
    const NormSpec spec = NormSpec::mixed(4.0, 2.0).conjugate();
    CHECK(spec.p == doctest::Approx(4.0 / 3.0));
    CHECK(spec.q == 2.0);
    CHECK_THROWS_AS(NormSpec::sequence(0.9).validate(), std::invalid_argument);
  }

  TEST_CASE("mixed norm of constant and half-indicator fields") {
    const Grid1D grid = Grid1D::torus(32);
    const int nt = 16;
    const double c = 1.7;
    const SpaceTimeField<double> F(uniform_times(0.0, 1.0, nt), 1.0 / nt, grid, Eigen::MatrixXd::Constant(nt, 32, c));
    CHECK(mixed_norm(F, 2.0, 2.0) == doctest::Approx(c * std::sqrt(kTwoPi)).epsilon(1e-13));
    CHECK(mixed_norm(F, kInf, 2.0) == doctest::Approx(c * std::sqrt(kTwoPi)).epsilon(1e-13));
    CHECK(mixed_norm(F, 2.0, kInf) == doctest::Approx(c).epsilon(1e-13));
    CHECK(mixed_norm(F, kInf, kInf) == c);

    Eigen::MatrixXd half = Eigen::MatrixXd::Zero(nt, 32);
    half.topRows(nt / 2).setConstant(c);
    const SpaceTimeField<double> H(uniform_times(0.0, 1.0, nt), 1.0 / nt, grid, half);
    const double expected = c * std::pow(0.5, 0.25) * std::sqrt(kTwoPi);
    CHECK(mixed_norm(H, 4.0, 2.0, MixedOrder::TimeOuter) == doctest::Approx(expected).epsilon(1e-13));
  }

  TEST_CASE("mixed norm with p = q is the plain Lebesgue norm") {
    const Grid1D grid = Grid1D::torus(16);
    const CounterRng rng(5);
    Eigen::MatrixXd v(8, 16);
    for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = rng.draw(i);
    const SpaceTimeField<double> F(uniform_times(0.0, 1.0, 8), 1.0 / 8, grid, v);
    for (double p : {1.0, 2.0, 3.5}) {
      const double plain = std::pow((v.array().abs().pow(p) * (grid.spacing() / 8)).sum(), 1.0 / p);
      CHECK(std::abs(mixed_norm(F, p, p) - plain) <= 1e-12 * plain);
      CHECK(std::abs(mixed_norm(F, p, p, MixedOrder::SpaceOuter) - plain) <= 1e-12 * plain);
    }
  }

  TEST_CASE("weak Lorentz norm") {
    const int n = 4000;
    SUBCASE("indicator of [0, a]") {
      const Grid1D grid = Grid1D::torus(n);
      const double a = 1.25;
      const Eigen::ArrayXd f = (grid.points() < a - 1e-12).cast<double>();
      const double measure = f.sum() * grid.spacing();
      CHECK(lorentz_weak_norm(f, grid, 2.0) == doctest::Approx(std::sqrt(measure)).epsilon(1e-14));
      CHECK(std::abs(std::sqrt(measure) - std::sqrt(a)) <= grid.spacing());
    }
    SUBCASE("zero field") {
      CHECK(lorentz_weak_norm(Eigen::ArrayXd::Zero(8), Eigen::ArrayXd::Ones(8), 2.0) == 0.0);
    }
    SUBCASE("x^{-1/2} on (0, 1]") {
      const Eigen::ArrayXd x = Eigen::ArrayXd::LinSpaced(n, 1.0, n) / n;
      const Eigen::ArrayXd w = Eigen::ArrayXd::Constant(n, 1.0 / n);
      CHECK(lorentz_weak_norm(x.rsqrt(), w, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("weaker than L^p and invariant under permutation") {
      const CounterRng rng(9);
      Eigen::ArrayXd f(256);
      for (Eigen::Index i = 0; i < f.size(); ++i) f(i) = rng.draw(i);
      const Eigen::ArrayXd w = Eigen::ArrayXd::Constant(256, 0.01);
      for (double p : {1.0, 2.0, 4.0}) CHECK(lorentz_weak_norm(f, w, p) <= weighted_lp_norm(f, w, p));
      Eigen::ArrayXd g = f.reverse();
      std::rotate(g.data(), g.data() + 17, g.data() + g.size());
      CHECK(lorentz_weak_norm(g, w, 2.0) == lorentz_weak_norm(f, w, 2.0));
    }
  }

  TEST_CASE("sequence norms") {
    Eigen::ArrayXd e = Eigen::ArrayXd::Zero(5);
    e(0) = 1.0;
    for (double b : {1.0, 1.5, 2.0, kInf}) CHECK(sequence_norm(e, b) == 1.0);
    const Eigen::ArrayXd ones = Eigen::ArrayXd::Ones(64);
    CHECK(sequence_norm(ones, 1.5) == doctest::Approx(std::pow(64.0, 1.0 / 1.5)));
    CHECK(sequence_norm(ones, kInf) == 1.0);
    const Eigen::ArrayXd harmonic = Eigen::ArrayXd::LinSpaced(100, 1.0, 100.0).inverse();
    CHECK(sequence_norm(harmonic, 2.0) == doctest::Approx(1.2786648897130524).epsilon(1e-13));
  }

  TEST_CASE("singular values") {
    CHECK(singular_values(Eigen::MatrixXd::Identity(2, 2)).isApprox(Eigen::ArrayXd::Ones(2)));
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = 4.0;
    const Eigen::ArrayXd s = singular_values(d);
    CHECK(s(0) == doctest::Approx(4.0));
    CHECK(s(1) == doctest::Approx(3.0));

    const CounterRng rng(13);
    Eigen::MatrixXcd M(8, 8);
    for (Eigen::Index i = 0; i < 64; ++i) M.data()[i] = Complex(rng.draw(2 * i), rng.draw(2 * i + 1));
    const Eigen::ArrayXd sv = singular_values(M);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(M.adjoint() * M);
    const Eigen::ArrayXd oracle = eig.eigenvalues().array().sqrt().reverse();
    CHECK((sv - oracle).abs().maxCoeff() <= 1e-10 * oracle(0));
    for (Eigen::Index i = 1; i < sv.size(); ++i) CHECK(sv(i) <= sv(i - 1));
    CHECK_THROWS_AS(singular_values(M, Eigen::ArrayXd::Ones(7)), std::invalid_argument);
  }

  TEST_CASE("Schatten norms") {
    const Grid1D grid = Grid1D::torus(64);
    Eigen::ArrayXd lambda(2);
    lambda << 3.0, 4.0;
    const CompactOperatorRep two(lambda, random_operator(grid, 8, 2, RandomSeedPair{1, 2}).system());
    CHECK(schatten_norm(two, 2.0) == 5.0);

    const CompactOperatorRep proj(Eigen::ArrayXd::Ones(1), OrthonormalSystem({two.system()[0]}));
    const Eigen::MatrixXcd P = operator_kernel(proj, 0.0);
    for (double a : {1.0, 2.0, 3.0, kInf}) CHECK(schatten_norm(P, grid.weights(), a) == doctest::Approx(1.0).epsilon(1e-12));

    const CompactOperatorRep op = random_operator(grid, 12, 6, RandomSeedPair{41, 42});
    const Eigen::MatrixXcd K = operator_kernel(op, 0.4);
    const double s2 = schatten_norm(K, grid.weights(), 2.0);
    CHECK(std::abs(s2 - kernel_l2_norm(K, grid.weights())) <= 1e-8 * s2);
    CHECK(std::abs(s2 - sequence_norm(op.eigenvalues(), 2.0)) <= 1e-8 * s2);
    double previous = kInf;
    for (double a : {1.0, 1.5, 2.0, 4.0, kInf}) {
      const double value = schatten_norm(K, grid.weights(), a);
      CHECK(value <= previous * (1.0 + 1e-12));
      previous = value;
    }
  }
}
