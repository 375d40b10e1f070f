// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all pass.
#include "boussinesq/experiments.hpp"
#include "boussinesq/oscillatory.hpp"
#include "boussinesq/randomization.hpp"
#include "boussinesq/spectral.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace boussinesq;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

bool monotone(const std::vector<double>& v, double tol) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[i - 1] * (1.0 + tol)) return false;
  }
  return true;
}

std::string fmt(double v) { return format_double(v); }

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : "; ") + p;
  return out;
}

Outcome unitarity_trace() {
  double trace_err = 0.0;
  double unit_err = 0.0;
  for (int i = 0; i < 100; ++i) {
    const RandomSeedPair seeds{1000u + static_cast<std::uint64_t>(i), 5000u + static_cast<std::uint64_t>(i)};
    const int rank = 1 + i % 8;
    Grid1D grid = Grid1D::torus(64);
    int band = 12;
    if (i % 3 == 0) {
      grid = Grid1D::line(256);
      band = 24;
    } else if (i % 3 == 2) {
      grid = Grid1D::ball_radial(128);
      band = 10;
    }
    const CompactOperatorRep op = random_operator(grid, band, rank, seeds);
    const double scale = op.eigenvalues().abs().sum();
    for (double t : {0.0, 0.1, 1.0}) {
      const DensityField rho = density_function(op, t, grid);
      trace_err = std::max(trace_err, std::abs(rho.integral() - op.eigenvalues().sum()) / scale);
      for (const auto& f : op.system().functions()) {
        unit_err = std::max(unit_err, std::abs(l2_norm(propagate(f, t)) - l2_norm(f)));
      }
    }
  }
  return {trace_err <= 1e-8 && unit_err <= 1e-10,
          "trace error " + fmt(trace_err) + ", L2 deviation " + fmt(unit_err)};
}

Outcome exp_sum_decay() {
  const int nt = 32;
  const Eigen::ArrayXd x = Eigen::ArrayXd::LinSpaced(257, -1.0, 1.0);
  const ExpSumScan scan = exp_sum_decay_scan(
      {64, 256, 1024}, [nt](int N) { return log_spaced_times(1.0 / (double(N) * N), 1.0 / N, nt); }, x);
  const double spread = scan.full.slice_spread();
  return {std::isfinite(spread) && spread <= 4.0, "spread " + fmt(spread)};
}

Outcome kernel_decay() {
  OscillatoryOptions opts;
  opts.weight_exponent = 0.5;
  const std::vector<double> ts{0.01, 0.1, 1.0};
  const DecayScanReport report = kernel_decay_scan(Eigen::ArrayXd::LinSpaced(64, 0.05, 1.0), ts, opts);
  bool finite = true;
  for (const auto& slice : report.slice_max()) finite = finite && std::isfinite(slice.second);
  const double spread = report.slice_spread();
  double halving = 0.0;
  for (double t : ts) {
    for (double x : {0.05, 0.5, 1.0}) halving = std::max(halving, osc_integral_step_halving(x, t, opts));
  }
  return {finite && spread <= 4.0 && halving <= 1e-6, "spread " + fmt(spread) + ", step halving " + fmt(halving)};
}

Outcome optimality() {
  const std::vector<int> Ns{64, 128, 256, 512, 1024};
  const std::vector<ExponentTriple> triples{{4.0, 2.0, 4.0 / 3.0}, {4.0, 2.0, 2.0}, {kInf, 1.0, 1.0}, {8.0 / 3.0, 4.0, 1.6}};
  const auto scans = counterexample_scan(Ns, triples);
  bool pass = true;
  std::vector<std::string> detail;
  for (const auto& s : scans) {
    pass = pass && std::abs(s.lhs.slope - 1.0) <= 0.05 && std::abs(s.ratio.slope - s.ratio.claimed) <= 0.05;
    detail.push_back("(" + format_exponent(s.exponents.p) + "," + format_exponent(s.exponents.q) + "," +
                     format_exponent(s.exponents.beta) + ") ratio slope " + fmt(s.ratio.slope) + " vs " +
                     fmt(s.ratio.claimed));
  }
  const CounterexampleScan ms = maximal_space_scaling(Ns, 2.0);
  pass = pass && std::abs(ms.ratio.slope) <= 0.05 && std::abs(ms.lhs.slope - 1.0) <= 0.05;
  detail.push_back("L2_t Linf_x ratio slope " + fmt(ms.ratio.slope));
  return {pass, join(detail)};
}

Outcome typicality() {
  ExperimentConfig cfg;
  const std::vector<ExponentTriple> triples{{4.0, 2.0, 4.0 / 3.0}, {kInf, 1.0, 1.0}, {8.0 / 3.0, 4.0, 1.6}};
  const auto scans = strichartz_scaling_torus(cfg, triples);
  bool pass = true;
  std::vector<std::string> detail;
  for (const auto& s : scans) {
    pass = pass && std::isfinite(s.ratio_spread()) && s.ratio_spread() <= 4.0;
    detail.push_back("(" + format_exponent(s.exponents.p) + "," + format_exponent(s.exponents.q) + "," +
                     format_exponent(s.exponents.beta) + ") spread " + fmt(s.ratio_spread()));
  }
  return {pass, join(detail)};
}

Outcome pointwise_convergence() {
  const CompactOperatorRep op = random_operator(Grid1D::line(1024), 64, 4, RandomSeedPair{});
  const auto rows = pointwise_convergence_scan(op, dyadic_times(2, 12));
  std::vector<double> dev;
  for (const auto& r : rows) dev.push_back(r.deviation);
  const double ratio = dev.back() / dev.front();
  return {ratio <= 0.01 && monotone(dev, 0.05), "ratio " + fmt(ratio)};
}

Outcome maximal_rank() {
  const MaximalRankScan scan = maximal_rank_scan(MaximalScanConfig{});
  return {scan.spread() <= 4.0, "spread " + fmt(scan.spread())};
}

Outcome khinchin() {
  Eigen::ArrayXd a(16);
  for (int k = 0; k < a.size(); ++k) a(k) = 1.0 / (k + 1);
  const CounterRng rng = CounterRng(1).substream(0x4b48);
  const double r2 = khinchin_ratio(a, 2.0, 10000, rng);
  const double r4 = khinchin_ratio(a, 4.0, 10000, rng);
  return {std::abs(r2 - 1.0) <= 0.05 && std::abs(r4 - std::pow(3.0, 0.25)) <= 0.05,
          "r=2 " + fmt(r2) + ", r=4 " + fmt(r4)};
}

Outcome stochastic_continuity() {
  std::vector<double> ts = dyadic_times(2, 12);
  ts.push_back(0.0);
  const RandomSeedPair seeds{};
  bool pass = true;
  std::vector<std::string> detail;
  const std::vector<std::pair<Grid1D, int>> cases{
      {Grid1D::line(1024), 64}, {Grid1D::torus(64), 4}, {Grid1D::ball_radial(256), 4}};
  for (const auto& [grid, band] : cases) {
    const auto start = std::chrono::steady_clock::now();
    const CompactOperatorRep op = random_operator(grid, band, 4, seeds);
    const ContinuityTable table = stochastic_continuity_experiment(op, ts, 2.0, 1000, seeds);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const auto& first = table.rows.front();
    const auto& small = table.rows[table.rows.size() - 2];
    const auto& zero = table.rows.back();
    const double pr = small.point_norm / first.point_norm;
    const double lr = small.l2_norm / first.l2_norm;
    pass = pass && pr <= 0.1 && lr <= 0.1 && zero.point_norm == 0.0 && zero.l2_norm == 0.0 && secs < 120.0;
    detail.push_back(to_string(grid.geometry()) + " point " + fmt(pr) + ", L2 " + fmt(lr));
  }
  return {pass, join(detail)};
}

Outcome duality() {
  const DualityRecord rec = duality_consistency_check(DualityConfig{});
  return {rec.holds && rec.schatten_kernel_error <= 1e-8,
          "primal " + fmt(rec.primal) + " <= dual " + fmt(rec.dual) + ", Schatten-2 error " +
              fmt(rec.schatten_kernel_error)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "unitarity and trace", 10.0, unitarity_trace},
      {2, "exponential sum decay", 30.0, exp_sum_decay},
      {3, "oscillatory kernel decay", 60.0, kernel_decay},
      {4, "Strichartz optimality", 60.0, optimality},
      {5, "Strichartz bound typicality", 300.0, typicality},
      {6, "pointwise convergence", 10.0, pointwise_convergence},
      {7, "maximal-in-time rank stability", 60.0, maximal_rank},
      {8, "Khinchin", 5.0, khinchin},
      {9, "stochastic continuity", 360.0, stochastic_continuity},
      {10, "duality consistency", 60.0, duality},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = o.pass && secs < c.budget_seconds;
    if (!pass) ++failures;
    std::printf("criterion %2d %-32s %s  (%s; %.1f s of %.0f s)\n", c.id, c.name, pass ? "PASS" : "FAIL",
                o.detail.c_str(), secs, c.budget_seconds);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
