#include "boussinesq/oscillatory.hpp"

#include "boussinesq/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace boussinesq {

double BumpFunction::mollifier(double u) {
  const double d = 1.0 - u * u;
  return d > 0.0 ? std::exp(-1.0 / d) : 0.0;
}

namespace {

/// Σ_m η(u − m): period 1 and bounded below by η(1/2)·2 > 0.
double periodized_mollifier(double u) {
  const double base = std::floor(u);
  double sum = 0.0;
  for (double m = base - 1.0; m <= base + 2.0; m += 1.0) sum += BumpFunction::mollifier(u - m);
  return sum;
}

}  // namespace

double BumpFunction::wiener(double xi) {
  const double eta = mollifier(xi);
  return eta > 0.0 ? eta / periodized_mollifier(xi) : 0.0;
}

double BumpFunction::dyadic(double xi) {
  if (!(xi > 0.0)) return 0.0;
  const double u = std::log2(xi);
  const double eta = mollifier(u);
  return eta > 0.0 ? std::sqrt(eta / periodized_mollifier(u)) : 0.0;
}

double smooth_step(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / u);
  const double b = std::exp(-1.0 / (1.0 - u));
  return a / (a + b);
}

double dyadic_partition_check(double xi_min, double xi_max, int k_min, int k_max, int samples) {
  if (!(xi_min > 0.0) || xi_max < xi_min) throw std::invalid_argument("frequency range must satisfy 0 < min <= max");
  if (k_min > k_max) return 1.0;
  const int count = xi_max == xi_min ? 1 : std::max(samples, 2);
  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    const double xi = count == 1 ? xi_min : xi_min * std::pow(xi_max / xi_min, static_cast<double>(i) / (count - 1));
    double sum = 0.0;
    for (int k = k_min; k <= k_max; ++k) {
      const double psi = BumpFunction::dyadic(std::ldexp(xi, k));
      sum += psi * psi;
    }
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

std::complex<double> exp_sum_range(int k_lo, int k_hi, double t, double x) {
  std::complex<double> sum{};
  for (int k = k_lo; k <= k_hi; ++k) sum += std::polar(1.0, t * odd_phase(k) + k * x);
  return sum;
}

std::complex<double> exp_sum(int N, double t, double x) {
  if (N < 1) throw std::invalid_argument("exponential sum needs N >= 1");
  return exp_sum_range(-N, N, t, x);
}

std::vector<std::pair<double, double>> DecayScanReport::slice_max() const {
  std::vector<std::pair<double, double>> out;
  for (const auto& row : rows) {
    const double key = row.params.empty() ? 0.0 : row.params.front();
    auto it = std::find_if(out.begin(), out.end(), [key](const auto& p) { return p.first == key; });
    if (it == out.end()) {
      out.emplace_back(key, row.ratio);
    } else {
      it->second = std::max(it->second, row.ratio);
    }
  }
  return out;
}

double DecayScanReport::slice_spread() const {
  const auto slices = slice_max();
  if (slices.empty()) return std::numeric_limits<double>::quiet_NaN();
  double lo = slices.front().second;
  double hi = lo;
  for (const auto& [key, value] : slices) {
    lo = std::min(lo, value);
    hi = std::max(hi, value);
  }
  return hi / lo;
}

CsvTable DecayScanReport::to_csv() const {
  std::vector<std::string> header = param_names;
  header.insert(header.end(), {"magnitude", "bound", "ratio"});
  CsvTable table(std::move(header));
  table.add_comment("bound", bound_expression);
  for (const auto& row : rows) {
    std::vector<double> values = row.params;
    values.insert(values.end(), {row.magnitude, row.bound, row.ratio});
    table.add_numeric_row(values);
  }
  return table;
}

Eigen::ArrayXd log_spaced_times(double t_min, double t_max, int count) {
  if (!(t_min > 0.0) || t_max < t_min || count < 1) throw std::invalid_argument("invalid log-spaced range");
  Eigen::ArrayXd t(count);
  for (int i = 0; i < count; ++i) {
    t(i) = count == 1 ? t_max : t_min * std::pow(t_max / t_min, static_cast<double>(i) / (count - 1));
  }
  t(count - 1) = t_max;
  return t;
}

ExpSumScan exp_sum_decay_scan(const std::vector<int>& N_list,
                              const std::function<Eigen::ArrayXd(int)>& t_samples_for_N,
                              const Eigen::ArrayXd& x_grid) {
  ExpSumScan scan;
  const std::string bound = "|t|^(-1/2)";
  for (DecayScanReport* r : {&scan.full, &scan.positive, &scan.negative}) {
    r->param_names = {"N", "t", "x"};
    r->bound_expression = bound;
  }
  scan.positive.bound_expression = bound + " (1<=k<=N)";
  scan.negative.bound_expression = bound + " (-N<=k<=-1)";
  for (int N : N_list) {
    if (N < 1) throw std::invalid_argument("exponential sum needs N >= 1");
    const Eigen::ArrayXd times = t_samples_for_N(N);
    for (double t : times) {
      if (!(t > 0.0) || t > 1.0 / N) {
        std::ostringstream msg;
        msg << "t = " << t << " outside (0, 1/N] for N = " << N;
        throw std::invalid_argument(msg.str());
      }
    }
    // e^{ikx} for 1 <= k <= N, one row per x.
    Eigen::MatrixXcd modes(x_grid.size(), N);
    for (Eigen::Index i = 0; i < x_grid.size(); ++i) {
      for (int k = 1; k <= N; ++k) modes(i, k - 1) = std::polar(1.0, k * x_grid(i));
    }
    Eigen::MatrixXcd conj_modes = modes.conjugate();
    Eigen::VectorXcd plus(N);
    Eigen::VectorXcd minus(N);
    for (double t : times) {
      for (int k = 1; k <= N; ++k) {
        plus(k - 1) = std::polar(1.0, t * odd_phase(k));
        minus(k - 1) = std::polar(1.0, t * odd_phase(-k));
      }
      const Eigen::VectorXcd pos = modes * plus;
      const Eigen::VectorXcd neg = conj_modes * minus;
      const double root_t = std::sqrt(t);
      for (Eigen::Index i = 0; i < x_grid.size(); ++i) {
        const std::vector<double> params{static_cast<double>(N), t, x_grid(i)};
        const std::complex<double> full = pos(i) + neg(i) + 1.0;
        scan.full.rows.push_back({params, std::abs(full), 1.0 / root_t, std::abs(full) * root_t});
        scan.positive.rows.push_back({params, std::abs(pos(i)), 1.0 / root_t, std::abs(pos(i)) * root_t});
        scan.negative.rows.push_back({params, std::abs(neg(i)), 1.0 / root_t, std::abs(neg(i)) * root_t});
      }
    }
  }
  return scan;
}

double phase_value(PhaseKind kind, double xi) {
  switch (kind) {
    case PhaseKind::Boussinesq: {
      const double xi2 = xi * xi;
      return std::sqrt(xi2 + xi2 * xi2);
    }
    case PhaseKind::Odd:
      return odd_phase(xi);
    case PhaseKind::Quadratic:
      return xi * xi + 0.5;
  }
  return 0.0;
}

QuadraturePlan plan_oscillatory_quadrature(double x, double t, const OscillatoryOptions& options) {
  if (!(options.weight_exponent < 1.0)) throw std::invalid_argument("weight exponent s must be < 1");
  if (!(std::abs(t) <= 1.0)) throw std::invalid_argument("oscillatory integral requires |t| <= 1");
  if (!(options.points_per_oscillation >= 16.0)) throw std::invalid_argument("need at least 16 points per oscillation");
  QuadraturePlan plan;
  if (options.dyadic_scale) {
    plan.cutoff = std::ldexp(2.0, *options.dyadic_scale);
  } else if (options.cutoff > 0.0) {
    plan.cutoff = options.cutoff;
  } else if (t == 0.0) {
    throw std::invalid_argument("an untapered integral at t = 0 needs an explicit cutoff or window");
  } else {
    plan.cutoff = std::max(16.0, 40.0 / std::sqrt(std::abs(t)));
  }
  const double xi_max = plan.cutoff;
  const double omega = std::abs(x) + 2.0 * std::abs(t) * std::sqrt(xi_max * xi_max + 1.0);
  plan.max_step = omega > 0.0 ? kTwoPi / (16.0 * omega) : std::numeric_limits<double>::infinity();
  plan.graded_extent = options.dyadic_scale ? 0.0 : std::min(1.0, xi_max / 4.0);
  if (options.step > 0.0) {
    if (options.step > plan.max_step) {
      std::ostringstream msg;
      msg << "oscillation resolution violated: step h = " << options.step << " but the phase requires h <= "
          << plan.max_step;
      throw std::invalid_argument(msg.str());
    }
    plan.step = options.step;
  } else {
    const double resolved = omega > 0.0 ? kTwoPi / (options.points_per_oscillation * omega) : plan.max_step;
    plan.step = std::min(resolved, xi_max / (64.0 * options.points_per_oscillation));
  }
  const double span = xi_max - plan.graded_extent;
  plan.points = static_cast<long>(std::ceil(span / plan.step));
  if (plan.graded_extent > 0.0) plan.points += static_cast<long>(options.grading_levels) * options.points_per_level;
  return plan;
}

std::complex<double> osc_integral(double x, double t, const OscillatoryOptions& options) {
  const QuadraturePlan plan = plan_oscillatory_quadrature(x, t, options);
  const double s = options.weight_exponent;
  const double xi_max = plan.cutoff;
  const PhaseKind kind = options.phase;

  auto window = [&](double xi) {
    if (options.dyadic_scale) return BumpFunction::dyadic_window(xi, *options.dyadic_scale);
    const double half = 0.5 * xi_max;
    return 1.0 - smooth_step((xi - half) / half);
  };
  // Integrand on ξ > 0 with the mirror point −ξ folded in.
  auto folded = [&](double xi) {
    const double w = window(xi);
    if (w == 0.0) return std::complex<double>{};
    const double amplitude = s == 0.0 ? w : w * std::pow(xi, -s);
    return amplitude * (std::polar(1.0, x * xi + t * phase_value(kind, xi)) +
                        std::polar(1.0, -x * xi + t * phase_value(kind, -xi)));
  };

  std::complex<double> total{};
  const double a = plan.graded_extent;
  if (a > 0.0) {
    const double core = std::ldexp(a, -options.grading_levels);
    // Below the finest level the phase is constant to O(core); integrate ξ^{-s} exactly.
    total += 2.0 * window(0.0) * std::pow(core, 1.0 - s) / (1.0 - s);
    for (int level = options.grading_levels - 1; level >= 0; --level) {
      const double lo = std::ldexp(a, -level - 1);
      const double hi = std::ldexp(a, -level);
      const double h = (hi - lo) / options.points_per_level;
      std::complex<double> part{};
      for (int i = 0; i < options.points_per_level; ++i) part += folded(lo + (i + 0.5) * h);
      total += part * h;
    }
  }
  const long cells = std::max(1L, static_cast<long>(std::ceil((xi_max - a) / plan.step)));
  const double h = (xi_max - a) / cells;
  std::complex<double> uniform{};
  for (long i = 0; i < cells; ++i) uniform += folded(a + (i + 0.5) * h);
  return total + uniform * h;
}

double osc_integral_step_halving(double x, double t, const OscillatoryOptions& options) {
  OscillatoryOptions fine = options;
  fine.points_per_oscillation *= 2.0;
  fine.points_per_level *= 2;
  if (fine.step > 0.0) fine.step *= 0.5;
  if (options.cutoff <= 0.0 && !options.dyadic_scale) {
    fine.cutoff = plan_oscillatory_quadrature(x, t, options).cutoff;
  }
  const std::complex<double> coarse_value = osc_integral(x, t, options);
  const std::complex<double> fine_value = osc_integral(x, t, fine);
  return std::abs(coarse_value - fine_value) / std::abs(fine_value);
}

DecayScanReport kernel_decay_scan(const Eigen::ArrayXd& x_grid, const std::vector<double>& t_list,
                                  const OscillatoryOptions& options) {
  DecayScanReport report;
  report.param_names = {"t", "x"};
  report.bound_expression = "|x|^(-1/2)";
  for (double t : t_list) {
    for (double x : x_grid) {
      const double magnitude = std::abs(osc_integral(x, t, options));
      const double bound = 1.0 / std::sqrt(std::abs(x));
      report.rows.push_back({{t, x}, magnitude, bound, magnitude / bound});
    }
  }
  return report;
}

DecayScanReport windowed_kernel_scan(const std::vector<int>& k_list, int x_samples, const std::vector<double>& t_list,
                                     double points_per_oscillation) {
  DecayScanReport report;
  report.param_names = {"k", "t", "x"};
  report.bound_expression = "2^k / (1 + 2^k |x|)^(1/2)";
  OscillatoryOptions options;
  options.weight_exponent = 0.0;
  options.points_per_oscillation = points_per_oscillation;
  for (int k : k_list) {
    options.dyadic_scale = k;
    const Eigen::ArrayXd xs = log_spaced_times(std::ldexp(1.0, -k), 1.0, x_samples);
    for (double t : t_list) {
      for (double x : xs) {
        const double magnitude = std::abs(osc_integral(x, t, options));
        const double scale = std::ldexp(1.0, k);
        const double bound = scale / std::sqrt(1.0 + scale * std::abs(x));
        report.rows.push_back({{static_cast<double>(k), t, x}, magnitude, bound, magnitude / bound});
      }
    }
  }
  return report;
}

}  // namespace boussinesq
