#include "boussinesq/wave_function.hpp"

#include "boussinesq/spectral.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace boussinesq {

WaveFunction::WaveFunction(Grid1D grid, Eigen::VectorXcd values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    std::ostringstream msg;
    msg << "wave function has " << values_.size() << " samples on a grid of " << grid_.size() << " points";
    throw std::invalid_argument(msg.str());
  }
  if (!values_.allFinite()) throw std::invalid_argument("wave function samples must be finite");
}

WaveFunction WaveFunction::from_ball_coefficients(Grid1D grid, Eigen::VectorXcd coefficients) {
  if (grid.geometry() != Geometry::BallRadial) throw std::invalid_argument("eigenbasis coefficients need a ball grid");
  if (coefficients.size() >= grid.size()) {
    throw std::invalid_argument("ball grid must have more points than eigenbasis coefficients");
  }
  Eigen::VectorXcd values = ball_values(grid, coefficients);
  WaveFunction f(std::move(grid), std::move(values));
  f.coefficients_ = std::move(coefficients);
  return f;
}

const Eigen::VectorXcd& WaveFunction::ball_coefficients() const {
  if (!coefficients_) throw std::logic_error("ball propagation requires eigenbasis coefficients");
  return *coefficients_;
}

double ball_eigenfunction(int m, double r) { return std::sin(m * kPi * r) / (std::sqrt(kTwoPi) * r); }

Eigen::VectorXcd ball_values(const Grid1D& grid, const Eigen::VectorXcd& coefficients) {
  const Eigen::ArrayXd& r = grid.points();
  Eigen::VectorXcd values = Eigen::VectorXcd::Zero(r.size());
  for (Eigen::Index m = 1; m <= coefficients.size(); ++m) {
    const Complex c = coefficients(m - 1);
    if (c == Complex{}) continue;
    for (Eigen::Index i = 0; i < r.size(); ++i) values(i) += c * ball_eigenfunction(static_cast<int>(m), r(i));
  }
  return values;
}

Complex inner_product(const WaveFunction& f, const WaveFunction& g, const InnerProduct& ip) {
  if (f.grid() != g.grid()) throw std::invalid_argument("inner product of functions on different grids");
  const Grid1D& grid = f.grid();
  if (ip.kind == InnerProduct::Kind::L2) {
    if (f.has_ball_coefficients() && g.has_ball_coefficients()) {
      const auto& a = f.ball_coefficients();
      const auto& b = g.ball_coefficients();
      const Eigen::Index m = std::min(a.size(), b.size());
      return b.head(m).dot(a.head(m));
    }
    return (g.values().array().conjugate() * f.values().array() * grid.weights()).sum();
  }
  if (grid.geometry() == Geometry::BallRadial) throw std::invalid_argument("Sobolev inner product is not defined on the ball");
  const Eigen::VectorXcd a = spectrum(f.values());
  const Eigen::VectorXcd b = spectrum(g.values());
  const Eigen::ArrayXd xi = grid.frequencies();
  Complex sum{};
  for (Eigen::Index k = 0; k < xi.size(); ++k) {
    if (xi(k) == 0.0) continue;
    sum += std::pow(std::abs(xi(k)), 2.0 * ip.s) * a(k) * std::conj(b(k));
  }
  return grid.period() * sum;
}

double l2_norm(const WaveFunction& f) { return std::sqrt(std::max(0.0, inner_product(f, f).real())); }

OrthonormalSystem::OrthonormalSystem(std::vector<WaveFunction> functions, InnerProduct ip, double tolerance)
    : functions_(std::move(functions)), ip_(ip) {
  for (const auto& f : functions_) {
    if (f.grid() != functions_.front().grid()) throw std::invalid_argument("orthonormal system mixes grids");
  }
  if (functions_.empty()) return;
  const Eigen::MatrixXcd g = gram_matrix();
  const double deviation = (g - Eigen::MatrixXcd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
  if (!(deviation <= tolerance)) {
    std::ostringstream msg;
    msg << "system is not orthonormal: max |G - I| = " << deviation << " exceeds " << tolerance;
    throw std::invalid_argument(msg.str());
  }
}

Eigen::MatrixXcd OrthonormalSystem::gram_matrix() const {
  const auto r = static_cast<Eigen::Index>(functions_.size());
  Eigen::MatrixXcd g(r, r);
  for (Eigen::Index j = 0; j < r; ++j) {
    for (Eigen::Index k = 0; k <= j; ++k) {
      g(j, k) = inner_product(functions_[j], functions_[k], ip_);
      g(k, j) = std::conj(g(j, k));
    }
  }
  return g;
}

CompactOperatorRep::CompactOperatorRep(Eigen::ArrayXd eigenvalues, OrthonormalSystem system)
    : eigenvalues_(std::move(eigenvalues)), system_(std::move(system)) {
  if (static_cast<std::size_t>(eigenvalues_.size()) != system_.size()) {
    throw std::invalid_argument("eigenvalue count does not match system rank");
  }
  if (!eigenvalues_.allFinite()) throw std::invalid_argument("eigenvalues must be finite");
}

}  // namespace boussinesq
