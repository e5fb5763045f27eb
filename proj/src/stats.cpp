#include "kinetic/stats.hpp"

#include <algorithm>
#include <cmath>

#include "kinetic/rng.hpp"

namespace kinetic {

namespace {

Eigen::VectorXd two_step(const SpMat& Pt, const Eigen::VectorXd& mu) {
  return Pt * (Pt * mu);
}

}  // namespace

StationaryResult exact_stationary(const SpMat& P,
                                  const std::vector<int>& class_states) {
  const int n = static_cast<int>(P.rows());
  if (P.cols() != n) throw ContractViolation("exact_stationary: square matrix");
  if (n > 1000000) throw SizeError("exact_stationary: state space too large");
  if (class_states.empty())
    throw ContractViolation("exact_stationary: empty class");
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd row_sums = P * ones;
  for (int i = 0; i < n; ++i) {
    if (std::abs(row_sums(i) - 1.0) > 1e-12)
      throw ContractViolation("exact_stationary: matrix is not row-stochastic");
  }
  SpMat Pt = SpMat(P.transpose());

  auto iterate = [&](Eigen::VectorXd mu, int& iters, double& residual) {
    constexpr int kMaxIters = 100000;
    constexpr double kTol = 1e-12;
    for (iters = 0; iters < kMaxIters; ++iters) {
      Eigen::VectorXd next = two_step(Pt, mu);
      next /= next.sum();
      residual = (next - mu).cwiseAbs().sum();
      mu = next;
      if (residual < kTol) return mu;
    }
    throw NumericalError("exact_stationary: no convergence", residual);
  };

  Eigen::VectorXd start = Eigen::VectorXd::Zero(n);
  for (int s : class_states) start(s) = 1.0;
  start /= start.sum();

  StationaryResult out;
  out.distribution = iterate(start, out.iterations, out.residual);

  // Probe a second, tilted start; disagreement flags a reducible class.
  Eigen::VectorXd tilted = Eigen::VectorXd::Zero(n);
  RngStream rng = RngStream::derive(0x57A710, {static_cast<std::uint64_t>(n)});
  for (int s : class_states) tilted(s) = 0.5 + rng.uniform();
  tilted /= tilted.sum();
  int probe_iters = 0;
  double probe_residual = 0.0;
  Eigen::VectorXd probe = iterate(tilted, probe_iters, probe_residual);
  out.unique = (probe - out.distribution).cwiseAbs().maxCoeff() < 1e-8;
  return out;
}

int default_batch_count(std::size_t n) {
  return static_cast<int>(std::cbrt(static_cast<double>(n)));
}

BatchMeans batch_means(const std::vector<double>& series, int b) {
  if (b < 2) throw ContractViolation("batch_means: need at least 2 batches");
  if (series.size() < 2 * static_cast<std::size_t>(b))
    throw SizeError("batch_means: series shorter than 2 batches");
  BatchMeans out;
  out.batches = b;
  out.batch_size = static_cast<std::int64_t>(series.size() / b);
  const std::int64_t m = out.batch_size;
  std::vector<double> averages(b);
  double grand = 0.0;
  for (int k = 0; k < b; ++k) {
    double s = 0.0;
    for (std::int64_t i = 0; i < m; ++i) s += series[k * m + i];
    averages[k] = s / static_cast<double>(m);
    grand += averages[k];
  }
  grand /= b;
  out.mean = grand;
  double ss = 0.0;
  for (int k = 0; k < b; ++k) {
    double d = averages[k] - grand;
    ss += d * d;
  }
  out.sigma2 = static_cast<double>(m) * ss / (b - 1);
  return out;
}

double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf) {
  if (samples.empty()) throw SizeError("ks_statistic: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double f = cdf(samples[i]);
    d = std::max(d, std::max(f - static_cast<double>(i) / n,
                             static_cast<double>(i + 1) / n - f));
  }
  return d;
}

namespace {

// Kolmogorov tail Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_tail(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double total = 0.0;
  for (int k = 1; k <= 100; ++k) {
    double term = 2.0 * std::exp(-2.0 * k * k * lambda * lambda);
    total += (k % 2 == 1) ? term : -term;
    if (term < 1e-16) break;
  }
  return std::min(1.0, std::max(0.0, total));
}

}  // namespace

double ks_p_value(double statistic, std::size_t n) {
  double root = std::sqrt(static_cast<double>(n));
  // Stephens' small-sample correction.
  double lambda = (root + 0.12 + 0.11 / root) * statistic;
  return kolmogorov_tail(lambda);
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw SizeError("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return d;
}

double ks_two_sample_p(const std::vector<double>& a,
                       const std::vector<double>& b) {
  double d = ks_two_sample(a, b);
  double ne = static_cast<double>(a.size()) * static_cast<double>(b.size()) /
              (static_cast<double>(a.size()) + static_cast<double>(b.size()));
  return kolmogorov_tail(std::sqrt(ne) * d);
}

double wasserstein1(std::vector<double> a, std::vector<double> b) {
  if (a.empty()) throw SizeError("wasserstein1: empty sample");
  if (a.size() != b.size())
    throw SizeError("wasserstein1: sample counts must match");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) total += std::abs(a[i] - b[i]);
  return total / static_cast<double>(a.size());
}

std::vector<double> msd(const std::vector<double>& traj,
                        const std::vector<int>& lags) {
  if (traj.empty()) throw SizeError("msd: empty trajectory");
  std::vector<double> out;
  out.reserve(lags.size());
  for (int lag : lags) {
    if (lag < 0 || static_cast<std::size_t>(lag) >= traj.size())
      throw SizeError("msd: lag out of range");
    if (lag == 0) {
      out.push_back(0.0);
      continue;
    }
    double s = 0.0;
    std::size_t count = traj.size() - lag;
    for (std::size_t t = 0; t < count; ++t) {
      double d = traj[t + lag] - traj[t];
      s += d * d;
    }
    out.push_back(s / static_cast<double>(count));
  }
  return out;
}

double richardson_ratio(double v1, double v2, double v3) {
  double den = v2 - v3;
  if (den == 0.0) throw NumericalError("richardson_ratio: zero denominator", 0);
  return (v1 - v2) / den;
}

double loglog_slope(const std::vector<double>& x,
                    const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw SizeError("loglog_slope: need matched samples, at least two");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double lx = std::log(x[i]);
    double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  double n = static_cast<double>(x.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double autocorrelation(const std::vector<double>& series, int lag) {
  if (lag < 0 || static_cast<std::size_t>(lag) >= series.size())
    throw SizeError("autocorrelation: lag out of range");
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(series.size());
  double num = 0.0, den = 0.0;
  for (std::size_t t = 0; t < series.size(); ++t) {
    double d = series[t] - mean;
    den += d * d;
    if (t + lag < series.size()) num += d * (series[t + lag] - mean);
  }
  return den == 0.0 ? 0.0 : num / den;
}

SeriesSummary summarize_series(const std::vector<double>& series,
                               const std::vector<int>& msd_lags,
                               std::uint64_t seed,
                               const std::string& config_hash) {
  SeriesSummary out;
  out.n = series.size();
  out.seed = seed;
  out.config_hash = config_hash;
  int b = std::max(2, default_batch_count(series.size()));
  BatchMeans bm = batch_means(series, b);
  out.mean = bm.mean;
  out.sigma2 = bm.sigma2;
  out.batches = bm.batches;
  std::vector<double> curve = msd(series, msd_lags);
  for (std::size_t i = 0; i < msd_lags.size(); ++i)
    out.msd_curve.emplace_back(msd_lags[i], curve[i]);
  return out;
}

}  // namespace kinetic
