#include <doctest.h>

#include <cmath>
#include <vector>

#include "kinetic/stats.hpp"
#include "kinetic/zigzag1d.hpp"
#include "kinetic/zigzagd.hpp"

using namespace kinetic;

TEST_SUITE_BEGIN("zigzag1d");

namespace {

DiscretePotential custom_1d(std::function<double(std::int64_t)> g) {
  DiscretePotential U;
  U.dim = 1;
  U.energy1d = g;
  U.energy = [g](const Eigen::VectorXi& x) { return g(x(0)); };
  return U;
}

}  // namespace

TEST_CASE("single step transitions") {
  DiscretePotential flat = make_discrete_potential("zero", 1);
  DiscretePotential quad = make_discrete_potential("quadratic", 1);

  SUBCASE("flat potential never flips") {
    Walk1D s{5, 1, 0};
    for (double u : {0.001, 0.5, 0.999}) {
      Walk1D next = step1d(s, flat, u);
      CHECK(next.x == 6);
      CHECK(next.v == 1);
      CHECK(next.step_count == 1);
    }
  }
  SUBCASE("downhill moves are certain") {
    Walk1D s{1, -1, 7};
    for (double u : {0.01, 0.99}) {
      Walk1D next = step1d(s, quad, u);
      CHECK(next.x == 0);
      CHECK(next.v == -1);
    }
  }
  SUBCASE("uphill threshold at exp(-1)") {
    // scalar evaluation pins the acceptance constant
    CHECK(std::exp(-1.0) == doctest::Approx(0.36788).epsilon(1e-4));
    Walk1D s{0, 1, 0};
    Walk1D flip = step1d(s, quad, 0.5);  // 0.5 > e^{-1}: reject, flip
    CHECK(flip.x == 0);
    CHECK(flip.v == -1);
    Walk1D move = step1d(s, quad, 0.3);  // 0.3 < e^{-1}: accept
    CHECK(move.x == 1);
    CHECK(move.v == 1);
  }
}

TEST_CASE("parity is conserved along trajectories") {
  DiscretePotential U = custom_1d([](std::int64_t x) {
    return 0.3 * std::abs(static_cast<double>(x)) +
           0.2 * std::sin(0.7 * static_cast<double>(x));
  });
  RngStream rng = RngStream::derive(17, {0});
  Walk1D s{3, -1, 0};
  auto parity = [](const Walk1D& w) {
    int px = (w.x % 2 + 2) % 2 ? -1 : 1;
    int pn = w.step_count % 2 ? -1 : 1;
    return px * w.v * pn;
  };
  int start = parity(s);
  for (int n = 0; n < 20000; ++n) {
    s = step1d(s, U, rng);
    CHECK(parity(s) == start);
  }
}

TEST_CASE("clt variance bound") {
  DiscretePotential U = make_discrete_potential("abs", 1);

  SUBCASE("zero function") {
    CltBound b = clt_variance_bound(U, [](std::int64_t, int) { return 0.0; },
                                    50);
    CHECK(b.m_f == 0.0);
  }
  SUBCASE("pure velocity function cancels in g") {
    CltBound b = clt_variance_bound(
        U, [](std::int64_t, int v) { return static_cast<double>(v); }, 50);
    CHECK(b.m_f == 0.0);
  }
  SUBCASE("sign observable against the renewal-block oracle") {
    auto f = [](std::int64_t x, int) {
      return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0);
    };
    CltBound b = clt_variance_bound(U, f, 50);
    CHECK(b.tail_estimate < 1e-20);

    // Independent oracle: lambda * M_f = E[(A')^2] + E[(A'')^2] + g(0)^2,
    // with A' and A'' the one-sided block sums.  Block laws are explicit:
    // P(T >= k) = e^{-U(k)}, so P(T = k) = e^{-k} (1 - e^{-1}) here.
    auto g = [&f](std::int64_t x) { return f(x, 1) + f(x, -1); };
    double e_up = 0.0, e_down = 0.0, partial_up = 0.0, partial_down = 0.0;
    for (int k = 0; k <= 300; ++k) {
      double pk = std::exp(-static_cast<double>(k)) * (1.0 - std::exp(-1.0));
      e_up += pk * partial_up * partial_up;      // sum_{i=1..k} g(i)
      e_down += pk * partial_down * partial_down;
      partial_up += g(k + 1);
      partial_down += g(-(k + 1));
    }
    double q = std::exp(-1.0);
    double z = (1.0 + q) / (1.0 - q);  // closed form for U = |x|
    double lambda = 2.0 * z;
    double oracle = (e_up + e_down + g(0) * g(0)) / lambda;
    CHECK(b.m_f == doctest::Approx(oracle).epsilon(1e-10));
    // frozen value: both routes reduce to 4/(e-1)
    CHECK(b.m_f == doctest::Approx(4.0 / (std::exp(1.0) - 1.0)).epsilon(1e-10));
  }
  SUBCASE("non-centered observable is rejected") {
    CHECK_THROWS_AS(
        clt_variance_bound(U, [](std::int64_t, int) { return 1.0; }, 50),
        ContractViolation);
  }
  SUBCASE("non-unimodal potential is rejected") {
    DiscretePotential W = custom_1d([](std::int64_t x) {
      return std::abs(std::abs(static_cast<double>(x)) - 3.0);
    });
    CHECK_THROWS_AS(
        clt_variance_bound(W, [](std::int64_t, int) { return 0.0; }, 50),
        ContractViolation);
  }
}

TEST_CASE("renewal block variance matches the closed form") {
  DiscretePotential U = make_discrete_potential("abs", 1);
  auto f = [](std::int64_t x, int) {
    return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0);
  };
  RngStream rng = RngStream::derive(18, {0});
  RenewalVariance rv = renewal_block_variance(U, f, 40000, rng);
  // block sums are 2(T1 - T2) with T geometric, so sigma^2 = 4e/(e^2-1)
  double e = std::exp(1.0);
  double exact = 4.0 * e / (e * e - 1.0);
  CHECK(rv.sigma2 == doctest::Approx(exact).epsilon(0.05));
  CHECK(rv.lambda == doctest::Approx(2.0 * (1.0 + 1.0 / e) / (1.0 - 1.0 / e))
                         .epsilon(1e-12));
  CHECK(rv.mean_block_length == doctest::Approx(rv.lambda).epsilon(0.05));
  // the bound of the central limit theorem holds with room to spare
  CltBound b = clt_variance_bound(U, f, 60);
  CHECK(rv.sigma2 <= 3.0 * b.m_f);
}

TEST_CASE("return times to the origin state are uncorrelated") {
  DiscretePotential U = make_discrete_potential("abs", 1);
  RngStream rng = RngStream::derive(19, {0});
  const int n_blocks = 4000;
  std::vector<double> lengths;
  lengths.reserve(n_blocks);
  Walk1D s{0, 1, 0};
  for (int blk = 0; blk < n_blocks; ++blk) {
    std::uint64_t steps = 0;
    do {
      s = step1d(s, U, rng);
      ++steps;
    } while (!(s.x == 0 && s.v == 1));
    lengths.push_back(static_cast<double>(steps));
  }
  double band = 3.0 / std::sqrt(static_cast<double>(n_blocks));
  for (int lag = 1; lag <= 5; ++lag)
    CHECK(std::abs(autocorrelation(lengths, lag)) < band);
}

TEST_CASE("escape experiment") {
  SUBCASE("ballistic exit without a barrier") {
    // flat on the right of the origin: every rightward move is accepted
    EscapeConfig cfg;
    cfg.potential = custom_1d([](std::int64_t x) {
      return x < 0 ? 0.5 * static_cast<double>(-x) : 0.0;
    });
    cfg.window_a = -3;
    cfg.window_b = 3;
    cfg.alpha = 0;
    cfg.beta = 0;
    cfg.eps = 0.37;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      RngStream rng = RngStream::derive(20, {seed});
      EscapeSample s = escape_time_sample(cfg, rng);
      CHECK(s.tau == 3);
      CHECK_FALSE(s.exit_left);
    }
  }

  EscapeConfig cfg;
  cfg.potential = make_discrete_potential("doublewell:1,1,2", 1);
  cfg.window_a = -2;
  cfg.window_b = 2;
  cfg.alpha = 0;
  cfg.beta = 0;
  cfg.eps = 0.6;
  validate_escape_config(cfg);

  SUBCASE("symmetric wells split exits evenly") {
    const int n = 10000;
    int lefts = 0;
    for (int i = 0; i < n; ++i) {
      RngStream rng = RngStream::derive(21, {static_cast<std::uint64_t>(i)});
      lefts += escape_time_sample(cfg, rng).exit_left;
    }
    // at finite eps the renewal argument gives the side law exactly
    double barrier_prob = std::exp(-1.0 / cfg.eps);
    double exact_left = (1.0 - barrier_prob) / (2.0 - barrier_prob);
    double freq = static_cast<double>(lefts) / n;
    CHECK(std::abs(freq - exact_left) < 3.0 * std::sqrt(0.25 / n));
    // and the limiting prediction is one half
    CHECK(eyring_kramers_prediction(cfg).p_exit_left == 0.5);
  }

  SUBCASE("geometric sandwich on the escape-time distribution") {
    const int n = 10000;
    std::vector<double> taus(n);
    for (int i = 0; i < n; ++i) {
      RngStream rng = RngStream::derive(22, {static_cast<std::uint64_t>(i)});
      taus[i] = static_cast<double>(escape_time_sample(cfg, rng).tau);
    }
    EscapePrediction pred = eyring_kramers_prediction(cfg);
    double p = pred.geometric_parameter;
    double lower_scale = 2.0 * static_cast<double>(cfg.beta - cfg.alpha + 1);
    double upper_scale =
        2.0 * static_cast<double>(cfg.window_b - cfg.window_a + 1);
    // strict cdfs of the sandwich variables at t:
    //   lower 2(beta-alpha+1)(G-1), upper 2(b-a+1)G, G geometric(p) on {1,2,..}
    auto geometric_strict_cdf = [p](double y) {  // P(G < y)
      double m = std::floor(y);
      if (y == m) m -= 1.0;
      if (m < 1.0) return 0.0;
      return 1.0 - std::pow(1.0 - p, m);
    };
    auto cdf_lower = [&](double t) {
      return geometric_strict_cdf(t / lower_scale + 1.0);
    };
    auto cdf_upper = [&](double t) {
      return geometric_strict_cdf(t / upper_scale);
    };
    std::sort(taus.begin(), taus.end());
    double tol = 0.02;  // DKW band at n = 1e4
    for (int grid = 1; grid <= 60; ++grid) {
      double t = 0.5 + taus[static_cast<std::size_t>(
                     (taus.size() - 1) * grid / 60)];
      double empirical =
          static_cast<double>(std::lower_bound(taus.begin(), taus.end(), t) -
                              taus.begin()) /
          n;
      CHECK(empirical >= cdf_upper(t) - tol);
      CHECK(empirical <= cdf_lower(t) + tol);
    }
  }

  SUBCASE("timeout carries a partial count") {
    EscapeConfig cold = cfg;
    cold.eps = 0.05;  // mean escape time ~ e^{20}
    RngStream rng = RngStream::derive(23, {0});
    CHECK_THROWS_AS(escape_time_sample(cold, rng, 1000), EscapeTimeout);
    try {
      RngStream rng2 = RngStream::derive(23, {1});
      escape_time_sample(cold, rng2, 1000);
    } catch (const EscapeTimeout& e) {
      CHECK(e.steps == 1000);
    }
  }
}

TEST_CASE("leading-order escape predictions") {
  SUBCASE("equal barriers at height 2") {
    EscapeConfig cfg;
    cfg.potential = make_discrete_potential("doublewell:2,2,2", 1);
    cfg.window_a = -2;
    cfg.window_b = 2;
    cfg.alpha = 0;
    cfg.beta = 0;
    cfg.eps = 1.0;
    EscapePrediction pred = eyring_kramers_prediction(cfg);
    CHECK(pred.mean_tau == doctest::Approx(std::exp(2.0)).epsilon(1e-12));
    CHECK(pred.mean_tau == doctest::Approx(7.389).epsilon(1e-3));
    CHECK(pred.p_exit_left == 0.5);
    CHECK(pred.e1 == 2.0);
  }
  SUBCASE("asymmetric barriers exit on the shallow side") {
    EscapeConfig cfg;
    cfg.potential = make_discrete_potential("doublewell:4,2,2", 1);
    cfg.window_a = -2;
    cfg.window_b = 2;
    cfg.alpha = 0;
    cfg.beta = 0;
    cfg.eps = 0.5;
    EscapePrediction pred = eyring_kramers_prediction(cfg);
    CHECK(pred.p_exit_left == 0.0);
    CHECK(pred.e1 == 2.0);
    CHECK(pred.e3 == 2.0);
  }
  SUBCASE("infinite temperature removes the exponential factor") {
    EscapeConfig cfg;
    cfg.potential = make_discrete_potential("doublewell:2,2,2", 1);
    cfg.window_a = -2;
    cfg.window_b = 2;
    cfg.alpha = 0;
    cfg.beta = 0;
    cfg.eps = 1e12;
    CHECK(eyring_kramers_prediction(cfg).mean_tau ==
          doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("two-step kernel is stationary for the class law on a torus") {
  DiscretePotential U = make_discrete_potential("abs:0.25", 1, 64);
  SpMat P = build_transition_matrix(U, KernelMode::Plain);
  Eigen::VectorXd mu = gibbs_distribution(U);
  Eigen::VectorXi sig(1);
  sig << 1;
  std::vector<int> cls = signature_class(U, sig);
  Eigen::VectorXd mu_s = Eigen::VectorXd::Zero(mu.size());
  for (int idx : cls) mu_s(idx) = mu(idx);
  mu_s /= mu_s.sum();

  // direct residual: mu_s is exactly stationary for Q^2
  SpMat Pt = SpMat(P.transpose());
  Eigen::VectorXd two_step = Pt * (Pt * mu_s).eval();
  CHECK((two_step - mu_s).cwiseAbs().sum() < 1e-12);

  // and the solver recovers it from a cold start
  StationaryResult st = exact_stationary(P, cls);
  CHECK(st.unique);
  CHECK((st.distribution - mu_s).cwiseAbs().sum() < 1e-10);
}

TEST_SUITE_END();
