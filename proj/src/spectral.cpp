#include "boussinesq/spectral.hpp"

#include <unsupported/Eigen/FFT>

#include <sstream>
#include <stdexcept>

namespace boussinesq {

namespace {

Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> fft = [] {
    Eigen::FFT<double> engine;
    engine.SetFlag(Eigen::FFT<double>::Unscaled);
    return engine;
  }();
  return fft;
}

void require_fourier_grid(const Grid1D& grid, const char* what) {
  if (grid.geometry() == Geometry::BallRadial) {
    throw std::invalid_argument(std::string(what) + " is defined on line and torus grids only");
  }
}

WaveFunction propagate_ball(const WaveFunction& f, double t) {
  if (!f.has_ball_coefficients()) throw std::invalid_argument("ball propagation requires eigenbasis coefficients");
  Eigen::VectorXcd c = f.ball_coefficients();
  for (Eigen::Index m = 1; m <= c.size(); ++m) c(m - 1) *= std::polar(1.0, t * ball_symbol(static_cast<int>(m)));
  return WaveFunction::from_ball_coefficients(f.grid(), std::move(c));
}

/// Evolved samples of every system function at time t, one column per function.
Eigen::MatrixXcd evolved_columns(const CompactOperatorRep& op, double t) {
  const auto& fs = op.system().functions();
  if (fs.empty()) return {};
  Eigen::MatrixXcd u(fs.front().grid().size(), static_cast<Eigen::Index>(fs.size()));
  for (std::size_t j = 0; j < fs.size(); ++j) u.col(static_cast<Eigen::Index>(j)) = propagate(fs[j], t).values();
  return u;
}

}  // namespace

Eigen::VectorXcd spectrum(const Eigen::VectorXcd& values) {
  Eigen::VectorXcd c(values.size());
  fft_engine().fwd(c, values);
  return c / static_cast<double>(values.size());
}

Eigen::VectorXcd from_spectrum(const Eigen::VectorXcd& coefficients) {
  Eigen::VectorXcd v(coefficients.size());
  fft_engine().inv(v, coefficients);
  return v;
}

WaveFunction apply_multiplier(const WaveFunction& f, const Eigen::ArrayXcd& multiplier) {
  require_fourier_grid(f.grid(), "Fourier multiplier");
  if (multiplier.size() != f.grid().size()) throw std::invalid_argument("multiplier length does not match grid");
  Eigen::VectorXcd c = spectrum(f.values());
  c.array() *= multiplier;
  return WaveFunction(f.grid(), from_spectrum(c));
}

WaveFunction propagate(const WaveFunction& f, double t) {
  if (f.grid().geometry() == Geometry::BallRadial) return propagate_ball(f, t);
  if (t == 0.0) return f;
  return apply_symbol(f, [t](double xi) { return std::polar(1.0, t * boussinesq_symbol(xi)); });
}

namespace {

void require_truncation(const Grid1D& grid, int N) {
  if (grid.geometry() != Geometry::Torus) throw std::invalid_argument("truncated propagation is defined on the torus");
  if (N < 0) throw std::invalid_argument("truncation order N must be non-negative");
  if (2 * N + 1 > grid.size()) {
    std::ostringstream msg;
    msg << "truncation order N = " << N << " is beyond Nyquist for a " << grid.size() << "-point grid (need 2N+1 <= n)";
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

WaveFunction truncated_propagate_torus(const WaveFunction& f, double t, int N) {
  const Eigen::ArrayXd times = Eigen::ArrayXd::Constant(1, t);
  const Eigen::MatrixXcd row = truncated_evolution_torus(f, times, N);
  return WaveFunction(f.grid(), row.row(0).transpose());
}

Eigen::MatrixXcd truncated_evolution_torus(const WaveFunction& f, const Eigen::ArrayXd& times, int N) {
  const Grid1D& grid = f.grid();
  require_truncation(grid, N);
  const int n = grid.size();
  const Eigen::VectorXcd c = spectrum(f.values());
  Eigen::MatrixXcd out(times.size(), n);
  Eigen::VectorXcd shifted(n);
  for (Eigen::Index i = 0; i < times.size(); ++i) {
    shifted.setZero();
    for (int k = -N; k <= N; ++k) {
      const int bin = fft_bin(k, n);
      shifted(bin) = c(bin) * std::polar(1.0 / kTwoPi, times(i) * boussinesq_symbol(k));
    }
    out.row(i) = from_spectrum(shifted).transpose();
  }
  return out;
}

WaveFunction homogeneous_sobolev_lift(const WaveFunction& g, double s) {
  require_fourier_grid(g.grid(), "homogeneous Sobolev lift");
  const Eigen::VectorXcd c = spectrum(g.values());
  if (std::abs(c(0)) > 1e-12 * std::max(1.0, c.norm())) {
    throw std::invalid_argument("zero frequency obstructs homogeneous lift");
  }
  return apply_symbol(g, [s](double xi) { return xi == 0.0 ? Complex{} : Complex{std::pow(std::abs(xi), -s)}; });
}

OrthonormalSystem gram_orthonormalize(const std::vector<WaveFunction>& raw, const InnerProduct& ip) {
  std::vector<WaveFunction> basis;
  basis.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const bool use_coefficients = raw[i].has_ball_coefficients() && ip.kind == InnerProduct::Kind::L2;
    WaveFunction v = raw[i];
    const double original = std::sqrt(std::abs(inner_product(v, v, ip).real()));
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) {
        const Complex proj = inner_product(v, q, ip);
        if (use_coefficients) {
          Eigen::VectorXcd c = v.ball_coefficients();
          const auto& qc = q.ball_coefficients();
          const Eigen::Index m = std::min(c.size(), qc.size());
          c.head(m) -= proj * qc.head(m);
          v = WaveFunction::from_ball_coefficients(v.grid(), std::move(c));
        } else {
          v = WaveFunction(v.grid(), v.values() - proj * q.values());
        }
      }
    }
    const double norm = std::sqrt(std::abs(inner_product(v, v, ip).real()));
    if (!(norm > kPivotThreshold * std::max(1.0, original))) {
      std::ostringstream msg;
      msg << "rank deficiency: function " << i << " is linearly dependent on its predecessors (residual norm " << norm
          << ")";
      throw std::invalid_argument(msg.str());
    }
    if (use_coefficients) {
      basis.push_back(WaveFunction::from_ball_coefficients(v.grid(), v.ball_coefficients() / norm));
    } else {
      basis.emplace_back(v.grid(), v.values() / norm);
    }
  }
  return OrthonormalSystem(std::move(basis), ip);
}

DensityField density_function(const CompactOperatorRep& op, double t, const Grid1D& grid) {
  const auto& fs = op.system().functions();
  Eigen::ArrayXd rho = Eigen::ArrayXd::Zero(grid.size());
  for (std::size_t j = 0; j < fs.size(); ++j) {
    if (fs[j].grid() != grid) throw std::invalid_argument("density grid does not match the system grid");
    rho += op.eigenvalues()(static_cast<Eigen::Index>(j)) * propagate(fs[j], t).values().array().abs2();
  }
  return {grid, t, std::move(rho)};
}

DensityField density_function(const CompactOperatorRep& op, double t) {
  if (op.rank() == 0) throw std::invalid_argument("density of a rank-0 operator needs an explicit grid");
  return density_function(op, t, op.system()[0].grid());
}

Eigen::MatrixXd density_evolution(const CompactOperatorRep& op, const Eigen::ArrayXd& times) {
  const auto& fs = op.system().functions();
  if (fs.empty()) throw std::invalid_argument("density of a rank-0 operator needs a grid; use a zero field");
  const Grid1D& grid = fs.front().grid();
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(times.size(), grid.size());
  for (std::size_t j = 0; j < fs.size(); ++j) {
    const double lambda = op.eigenvalues()(static_cast<Eigen::Index>(j));
    for (Eigen::Index i = 0; i < times.size(); ++i) {
      rho.row(i).array() += lambda * propagate(fs[j], times(i)).values().transpose().array().abs2();
    }
  }
  return rho;
}

Eigen::MatrixXcd operator_kernel(const CompactOperatorRep& op, double t) {
  const auto& fs = op.system().functions();
  if (fs.empty()) throw std::invalid_argument("kernel of a rank-0 operator needs a grid");
  const int n = fs.front().grid().size();
  if (n > kMaxKernelPoints) {
    std::ostringstream msg;
    msg << "kernel size limit exceeded: n = " << n << " > " << kMaxKernelPoints;
    throw std::invalid_argument(msg.str());
  }
  const Eigen::MatrixXcd u = evolved_columns(op, t);
  return u * op.eigenvalues().matrix().asDiagonal() * u.adjoint();
}

}  // namespace boussinesq
