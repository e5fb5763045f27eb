#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "kinetic/errors.hpp"

namespace kinetic {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Stationary distribution of a (possibly period-2) kernel by power iteration
// on P^2, restricted to a declared class of states.  The result vector lives
// on the full state space with zero mass off the class.  When the restriction
// of P^2 to the class is reducible (e.g. P = identity) the output is flagged
// non-unique and the uniform-start answer is returned.
struct StationaryResult {
  Eigen::VectorXd distribution;
  double residual = 0.0;  // || pi P^2 - pi ||_1 at exit
  int iterations = 0;
  bool unique = true;
};
StationaryResult exact_stationary(const SpMat& P,
                                  const std::vector<int>& class_states);

// Non-overlapping batch means; sigma2 estimates the asymptotic variance of
// the series mean (batch-size-scaled sample variance of the batch averages).
struct BatchMeans {
  double mean = 0.0;
  double sigma2 = 0.0;
  int batches = 0;
  std::int64_t batch_size = 0;
};
BatchMeans batch_means(const std::vector<double>& series, int b);
int default_batch_count(std::size_t n);  // floor(n^(1/3))

// One-sample Kolmogorov-Smirnov statistic sup |F_hat - F|.
double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf);
// Asymptotic p-value for the one-sample statistic at sample size n.
double ks_p_value(double statistic, std::size_t n);
double ks_two_sample(std::vector<double> a, std::vector<double> b);
double ks_two_sample_p(const std::vector<double>& a,
                       const std::vector<double>& b);

// 1-D Wasserstein-1 as the mean absolute difference of sorted samples;
// requires equal sample counts.
double wasserstein1(std::vector<double> a, std::vector<double> b);

// Time-averaged mean squared displacement at the given lags.
std::vector<double> msd(const std::vector<double>& traj,
                        const std::vector<int>& lags);

// (v_d - v_{d/2}) / (v_{d/2} - v_{d/4}); ~4 for a second-order bias family,
// ~2 for first order.
double richardson_ratio(double v1, double v2, double v3);

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// Lag-k autocorrelation of a series.
double autocorrelation(const std::vector<double>& series, int lag);

struct SeriesSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double sigma2 = 0.0;
  int batches = 0;
  std::vector<std::pair<int, double>> msd_curve;
  std::uint64_t seed = 0;
  std::string config_hash;
};
SeriesSummary summarize_series(const std::vector<double>& series,
                               const std::vector<int>& msd_lags,
                               std::uint64_t seed,
                               const std::string& config_hash);

}  // namespace kinetic
