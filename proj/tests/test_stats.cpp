#include <doctest.h>

#include <cmath>

#include "kinetic/rng.hpp"
#include "kinetic/stats.hpp"

using namespace kinetic;

TEST_SUITE_BEGIN("stats");

TEST_CASE("rng stream basics") {
  RngStream a = RngStream::derive(42, {1, 2});
  RngStream b = RngStream::derive(42, {1, 2});
  RngStream c = RngStream::derive(42, {1, 3});
  CHECK(a.next_u64() == b.next_u64());
  CHECK(a.next_u64() != c.next_u64());

  RngStream rng = RngStream::derive(7, {0});
  double mean = 0.0, var = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double g = rng.gaussian();
    mean += g;
    var += g * g;
  }
  mean /= n;
  var = var / n - mean * mean;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));

  double pm = 0.0;
  for (int i = 0; i < n; ++i) pm += static_cast<double>(rng.poisson(3.7));
  CHECK(pm / n == doctest::Approx(3.7).epsilon(0.02));
  CHECK(rng.poisson(0.0) == 0);

  for (int i = 0; i < 1000; ++i) CHECK(rng.uniform_index(7) < 7);
}

TEST_CASE("exact_stationary degenerate and swap kernels") {
  SUBCASE("identity returns uniform on the class with a non-unique flag") {
    SpMat P(4, 4);
    P.setIdentity();
    StationaryResult st = exact_stationary(P, {0, 1, 2});
    CHECK_FALSE(st.unique);
    CHECK(st.distribution(0) == doctest::Approx(1.0 / 3));
    CHECK(st.distribution(3) == 0.0);
    CHECK(st.residual < 1e-12);
  }
  SUBCASE("two-state swap: point mass per class") {
    SpMat P(2, 2);
    P.insert(0, 1) = 1.0;
    P.insert(1, 0) = 1.0;
    StationaryResult st = exact_stationary(P, {0});
    CHECK(st.unique);
    CHECK(st.distribution(0) == doctest::Approx(1.0));
    CHECK(st.distribution(1) == 0.0);
  }
  SUBCASE("non-stochastic rows are rejected") {
    SpMat P(2, 2);
    P.insert(0, 0) = 0.7;
    P.insert(1, 1) = 1.0;
    CHECK_THROWS_AS(exact_stationary(P, {0}), ContractViolation);
  }
  SUBCASE("re-running the solver is idempotent") {
    SpMat P(4, 4);
    P.insert(0, 1) = 0.5;
    P.insert(0, 3) = 0.5;
    P.insert(1, 0) = 0.25;
    P.insert(1, 2) = 0.75;
    P.insert(2, 1) = 1.0;
    P.insert(3, 0) = 1.0;
    StationaryResult first = exact_stationary(P, {0, 2});
    StationaryResult second = exact_stationary(P, {0, 2});
    CHECK(first.distribution == second.distribution);
    CHECK(first.residual == second.residual);
  }
}

TEST_CASE("batch means") {
  SUBCASE("constant series has zero variance") {
    std::vector<double> series(1000, 2.5);
    BatchMeans bm = batch_means(series, 10);
    CHECK(bm.mean == doctest::Approx(2.5));
    CHECK(bm.sigma2 == 0.0);
  }
  SUBCASE("iid standard normals give sigma2 near 1") {
    RngStream rng = RngStream::derive(9, {0});
    std::vector<double> series(1000000);
    for (double& v : series) v = rng.gaussian();
    BatchMeans bm = batch_means(series, 100);
    CHECK(bm.sigma2 == doctest::Approx(1.0).epsilon(0.10));
  }
  SUBCASE("short series rejected") {
    std::vector<double> series(10, 0.0);
    CHECK_THROWS_AS(batch_means(series, 10), SizeError);
  }
  CHECK(default_batch_count(1000000) == 100);
}

TEST_CASE("ks statistic against own cdf") {
  RngStream rng = RngStream::derive(10, {0});
  const int n = 100000;
  std::vector<double> samples(n);
  for (double& v : samples) v = rng.exponential();
  double d = ks_statistic(samples, [](double t) {
    return t <= 0 ? 0.0 : 1.0 - std::exp(-t);
  });
  CHECK(d < 1.36 / std::sqrt(static_cast<double>(n)));
  CHECK(ks_p_value(d, n) > 0.05);
  // a far-off cdf is detected
  double bad = ks_statistic(samples, [](double t) {
    return t <= 0 ? 0.0 : 1.0 - std::exp(-2.0 * t);
  });
  CHECK(bad > 0.1);
  CHECK(ks_p_value(bad, n) < 1e-6);
}

TEST_CASE("two-sample ks") {
  RngStream rng = RngStream::derive(11, {0});
  std::vector<double> a(20000), b(20000), c(20000);
  for (double& v : a) v = rng.gaussian();
  for (double& v : b) v = rng.gaussian();
  for (double& v : c) v = rng.gaussian() + 0.1;
  CHECK(ks_two_sample_p(a, b) > 0.01);
  CHECK(ks_two_sample_p(a, c) < 1e-6);
}

TEST_CASE("wasserstein1 metric behaviour") {
  std::vector<double> a{0.0, 1.0, 2.0, 5.0};
  CHECK(wasserstein1(a, a) == 0.0);
  RngStream rng = RngStream::derive(12, {0});
  std::vector<double> x(500), y(500), z(500);
  for (int i = 0; i < 500; ++i) {
    x[i] = rng.gaussian();
    y[i] = rng.gaussian() * 1.3;
    z[i] = rng.gaussian() + 0.4;
  }
  CHECK(wasserstein1(x, y) == doctest::Approx(wasserstein1(y, x)));
  CHECK(wasserstein1(x, z) <= wasserstein1(x, y) + wasserstein1(y, z) + 1e-12);
  std::vector<double> shorter{1.0};
  CHECK_THROWS_AS(wasserstein1(a, shorter), SizeError);
}

TEST_CASE("msd discriminates ballistic from diffusive") {
  const int n = 200000;
  std::vector<double> ballistic(n), diffusive(n);
  RngStream rng = RngStream::derive(13, {0});
  double pos = 0.0;
  for (int k = 0; k < n; ++k) {
    ballistic[k] = static_cast<double>(k);
    diffusive[k] = pos;
    pos += rng.uniform() < 0.5 ? 1.0 : -1.0;
  }
  std::vector<int> lags{0, 1, 2, 4, 8, 16, 32, 64, 128};
  std::vector<double> mb = msd(ballistic, lags);
  std::vector<double> md = msd(diffusive, lags);
  CHECK(mb[0] == 0.0);
  CHECK(md[0] == 0.0);
  std::vector<double> xs(lags.begin() + 1, lags.end());
  double slope_b = loglog_slope(xs, {mb.begin() + 1, mb.end()});
  double slope_d = loglog_slope(xs, {md.begin() + 1, md.end()});
  CHECK(slope_b == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(slope_d - 1.0) < 0.1);
}

TEST_CASE("richardson ratio") {
  double v = 1.7, c = -0.3;
  CHECK(richardson_ratio(v + c * 0.04, v + c * 0.01, v + c * 0.0025) ==
        doctest::Approx(4.0).epsilon(1e-12));
  CHECK_THROWS_AS(richardson_ratio(1.0, 2.0, 2.0), NumericalError);
}

TEST_CASE("series summary fields") {
  RngStream rng = RngStream::derive(14, {0});
  std::vector<double> series(4096);
  for (double& v : series) v = rng.gaussian();
  SeriesSummary s = summarize_series(series, {0, 1, 2}, 99, "abc");
  CHECK(s.n == 4096);
  CHECK(s.sigma2 >= 0.0);
  CHECK(s.msd_curve[0].second == 0.0);
  CHECK(s.seed == 99);
  CHECK(s.config_hash == "abc");
}

TEST_SUITE_END();
