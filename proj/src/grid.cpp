#include "boussinesq/grid.hpp"

#include <cstdlib>
#include <stdexcept>

namespace boussinesq {

std::string to_string(Geometry g) {
  switch (g) {
    case Geometry::Line:
      return "line";
    case Geometry::Torus:
      return "torus";
    case Geometry::BallRadial:
      return "ball";
  }
  return "unknown";
}

Geometry geometry_from_string(const std::string& name) {
  if (name == "line") return Geometry::Line;
  if (name == "torus") return Geometry::Torus;
  if (name == "ball") return Geometry::BallRadial;
  throw std::invalid_argument("unknown geometry '" + name + "' (expected line, torus or ball)");
}

Grid1D::Grid1D(Geometry g, Eigen::ArrayXd points, Eigen::ArrayXd weights, double spacing, double period)
    : geometry_(g), points_(std::move(points)), weights_(std::move(weights)), spacing_(spacing), period_(period) {}

Grid1D Grid1D::line(int n, double period) {
  if (n < 2) throw std::invalid_argument("grid needs at least 2 points");
  if (!(period > 0.0)) throw std::invalid_argument("line period must be positive");
  const double dx = period / n;
  Eigen::ArrayXd x(n);
  for (int i = 0; i < n; ++i) x(i) = -0.5 * period + i * dx;
  return Grid1D(Geometry::Line, std::move(x), Eigen::ArrayXd::Constant(n, dx), dx, period);
}

Grid1D Grid1D::torus(int n) {
  if (n < 2) throw std::invalid_argument("grid needs at least 2 points");
  const double dx = kTwoPi / n;
  Eigen::ArrayXd x(n);
  for (int i = 0; i < n; ++i) x(i) = i * dx;
  return Grid1D(Geometry::Torus, std::move(x), Eigen::ArrayXd::Constant(n, dx), dx, kTwoPi);
}

Grid1D Grid1D::ball_radial(int n) {
  if (n < 2) throw std::invalid_argument("grid needs at least 2 points");
  const double dr = 1.0 / n;
  Eigen::ArrayXd r(n);
  Eigen::ArrayXd w(n);
  for (int i = 0; i < n; ++i) {
    r(i) = (i + 0.5) * dr;
    w(i) = 4.0 * kPi * r(i) * r(i) * dr;
  }
  return Grid1D(Geometry::BallRadial, std::move(r), std::move(w), dr, 1.0);
}

Eigen::ArrayXd Grid1D::frequencies() const {
  if (geometry_ == Geometry::BallRadial) throw std::logic_error("ball grid has no Fourier frequencies");
  const int n = size();
  const double scale = kTwoPi / period_;
  Eigen::ArrayXd xi(n);
  for (int i = 0; i < n; ++i) xi(i) = scale * wavenumber(i, n);
  return xi;
}

bool Grid1D::operator==(const Grid1D& other) const {
  return geometry_ == other.geometry_ && size() == other.size() && period_ == other.period_;
}

int fft_bin(int k, int n) {
  if (2 * std::abs(k) >= n && !(n % 2 == 0 && k == -n / 2)) return -1;
  return k >= 0 ? k : k + n;
}

}  // namespace boussinesq
