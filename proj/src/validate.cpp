#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "kinetic/config.hpp"
#include "kinetic/hybrid.hpp"
#include "kinetic/pdmp.hpp"
#include "kinetic/potentials.hpp"
#include "kinetic/stats.hpp"
#include "kinetic/thinning.hpp"
#include "kinetic/zigzagd.hpp"

namespace kinetic {

namespace {

struct Check {
  std::string name;
  double residual = 0.0;
  double threshold = 0.0;
  bool pass = false;
  double seconds = 0.0;
};

double invariance_residual(const DiscretePotential& U, KernelMode mode,
                           const FactorBoundSpec* bounds = nullptr) {
  SpMat P = build_transition_matrix(U, mode, bounds);
  Eigen::VectorXd mu = gibbs_distribution(U);
  return (SpMat(P.transpose()) * mu - mu).cwiseAbs().sum();
}

FactorBoundSpec half_exponent_bound(const DiscretePotential& U) {
  FactorBoundSpec spec;
  spec.levels.push_back(
      [U](const Eigen::VectorXi& x, int axis, int sign, int) {
        double rise = increment(U, x, axis, sign);
        return rise > 0.0 ? std::exp(-0.5 * rise) : 1.0;
      });
  return spec;
}

}  // namespace

int run_validation_suite(const std::string& out_prefix, std::uint64_t seed) {
  std::vector<Check> checks;
  auto record = [&checks](const std::string& name, double residual,
                          double threshold, double seconds) {
    checks.push_back({name, residual, threshold, residual <= threshold,
                      seconds});
  };
  auto timed = [&record](const std::string& name, double threshold,
                         auto&& fn) {
    auto t0 = std::chrono::steady_clock::now();
    double residual;
    try {
      residual = fn();
    } catch (const std::exception& e) {
      std::cerr << name << " raised: " << e.what() << "\n";
      residual = std::numeric_limits<double>::infinity();
    }
    double dt = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
    record(name, residual, threshold, dt);
  };

  timed("invariance_plain_d1", 1e-12, [&] {
    DiscretePotential U = make_discrete_potential("abs:0.7", 1, 32);
    return invariance_residual(U, KernelMode::Plain);
  });
  timed("invariance_factorized_d1", 1e-12, [&] {
    DiscretePotential U = make_discrete_potential("abs:0.7", 1, 32);
    U.factor_terms = fraction_factors(U, {0.3, 0.7});
    return invariance_residual(U, KernelMode::Factorized);
  });
  timed("invariance_thinned_matches_plain_d1", 1e-12, [&] {
    DiscretePotential U = make_discrete_potential("quadratic:0.05", 1, 32);
    FactorBoundSpec bound = half_exponent_bound(U);
    SpMat thin = build_transition_matrix(U, KernelMode::Thinned, &bound);
    SpMat plain = build_transition_matrix(U, KernelMode::Plain);
    return (Eigen::MatrixXd(thin) - Eigen::MatrixXd(plain))
        .cwiseAbs()
        .maxCoeff();
  });
  timed("invariance_plain_d2_random", 1e-12, [&] {
    DiscretePotential U = make_discrete_potential("random:7,2.0", 2, 6);
    return invariance_residual(U, KernelMode::Plain);
  });
  timed("stationary_solver_class", 1e-11, [&] {
    DiscretePotential U = make_discrete_potential("abs:0.5", 1, 6);
    SpMat P = build_transition_matrix(U, KernelMode::Plain);
    Eigen::VectorXi sig(1);
    sig << 1;
    std::vector<int> cls = signature_class(U, sig);
    StationaryResult st = exact_stationary(P, cls);
    Eigen::VectorXd mu = gibbs_distribution(U);
    Eigen::VectorXd mu_s = Eigen::VectorXd::Zero(mu.size());
    for (int idx : cls) mu_s(idx) = mu(idx);
    mu_s /= mu_s.sum();
    return (st.distribution - mu_s).cwiseAbs().sum();
  });
  timed("thinning_measure_exactness", 1e-12, [&] {
    RngStream rng = RngStream::derive(seed, {0x7411});
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      int levels = 1 + static_cast<int>(rng.uniform_index(4));
      std::vector<double> vals(levels);
      double prev = 1.0;
      for (int k = 0; k < levels; ++k) {
        prev *= rng.uniform();
        vals[k] = prev;
      }
      BoundSpec<int> spec;
      for (int k = 0; k < levels; ++k)
        spec.levels.push_back([vals, k](const int&) { return vals[k]; });
      worst = std::max(worst, std::abs(thinned_acceptance_measure(0, spec) -
                                       vals.back()));
    }
    return worst;
  });
  timed("reflection_isometry", 1e-12, [&] {
    RngStream rng = RngStream::derive(seed, {0x3F1});
    double worst = 0.0;
    for (int trial = 0; trial < 100000; ++trial) {
      Eigen::Vector3d v(rng.gaussian(), rng.gaussian(), rng.gaussian());
      Eigen::Vector3d f(rng.gaussian(), rng.gaussian(), rng.gaussian());
      worst = std::max(worst, std::abs(reflect(v, f).norm() - v.norm()));
    }
    return worst;
  });
  timed("kinetic_identity_lj", 1e-12, [&] {
    LJSystem sys;
    sys.particles = 8;
    sys.box = 6.0;
    sys.radius = 1.0;
    sys.u0 = 0.5;
    sys.split_r = 2.0;
    sys.positions = lattice_configuration(8, 6.0);
    HybridConfig hc;
    hc.delta = 0.01;
    hc.gamma = 1.0;
    hc.lambda = 0.5;
    LJHybridSampler sampler(sys, hc, seed);
    double worst = 0.0;
    for (int n = 0; n < 200; ++n) {
      Eigen::Matrix3Xd x0 = sampler.system().positions;
      Eigen::VectorXd v0 = sampler.velocity();
      sampler.step();
      const Eigen::Matrix3Xd& x1 = sampler.system().positions;
      const Eigen::VectorXd& v1 = sampler.velocity();
      for (int i = 0; i < sys.particles; ++i) {
        Eigen::Vector3d lhs = x1.col(i) - x0.col(i);
        Eigen::Vector3d rhs = 0.5 * hc.delta *
                              (v0.segment<3>(3 * i) + v1.segment<3>(3 * i));
        worst = std::max(worst,
                         min_image(sys.box, lhs - rhs).cwiseAbs().maxCoeff());
      }
    }
    return worst;
  });
  timed("lj_split_consistency", 1e-10, [&] {
    RngStream rng = RngStream::derive(seed, {0x57});
    LJSystem sys;
    sys.particles = 6;
    sys.box = 8.0;
    sys.radius = 1.0;
    sys.u0 = 1.0;
    sys.split_r = 2.5;
    sys.positions = lattice_configuration(6, 8.0);
    for (int i = 0; i < 6; ++i)
      sys.positions.col(i) += 0.3 * Eigen::Vector3d(rng.uniform(), rng.uniform(),
                                                    rng.uniform());
    ForceSplit fs = lj_force_split(sys);
    Eigen::VectorXd rebuilt = fs.f0(sys.positions);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        if (j == i) continue;
        rebuilt.segment<3>(3 * i) += fs.pair_field(sys.positions, i, j);
      }
    Eigen::VectorXd grad = lj_gradient(sys);
    return (rebuilt - grad).cwiseAbs().maxCoeff() /
           (1.0 + grad.cwiseAbs().maxCoeff());
  });
  timed("batch_means_iid", 0.25, [&] {
    RngStream rng = RngStream::derive(seed, {0xBA7C});
    std::vector<double> series(100000);
    for (double& v : series) v = rng.gaussian();
    BatchMeans bm = batch_means(series, default_batch_count(series.size()));
    return std::abs(bm.sigma2 - 1.0);
  });
  timed("ks_self_uniform", 1.63 / 100.0, [&] {
    RngStream rng = RngStream::derive(seed, {0x4B5});
    std::vector<double> samples(10000);
    for (double& v : samples) v = rng.uniform();
    return ks_statistic(samples, [](double x) {
      return std::min(1.0, std::max(0.0, x));
    });
  });
  timed("gradient_finite_difference", 1e-5, [&] {
    double worst = 0.0;
    worst = std::max(worst, check_gradient(
                                make_continuous_potential("quadratic", 3), 50,
                                3.0, seed));
    worst = std::max(worst, check_gradient(
                                make_continuous_potential("doublewell:2,1.5", 1),
                                50, 3.0, seed));
    return worst;
  });
  timed("wasserstein_identical", 0.0, [&] {
    std::vector<double> a{0.3, -1.2, 4.5, 0.0};
    return wasserstein1(a, a);
  });
  timed("richardson_second_order", 1e-12, [&] {
    double v = 3.0, c = 0.37;
    return std::abs(richardson_ratio(v + c * 0.04, v + c * 0.01,
                                     v + c * 0.0025) -
                    4.0);
  });
  timed("geometric_skip_pmf", 3.5, [&] {
    RngStream rng = RngStream::derive(seed, {0x6E0});
    const double q = 0.3;
    const int n = 100000;
    std::vector<std::int64_t> counts(18, 0);
    for (int i = 0; i < n; ++i) {
      std::int64_t k = geometric_skip(q, rng.uniform());
      if (k < 18) ++counts[k];
    }
    double worst_z = 0.0;
    for (int k = 0; k < 18; ++k) {
      double p = std::pow(1.0 - q, k) * q;
      double sd = std::sqrt(n * p * (1.0 - p));
      worst_z = std::max(worst_z, std::abs(counts[k] - n * p) / sd);
    }
    return worst_z;
  });

  int failures = 0;
  nlohmann::json report = nlohmann::json::array();
  for (const Check& c : checks) {
    if (!c.pass) ++failures;
    std::printf("[%s] %s (residual=%.3g threshold=%.3g, %.2fs)\n",
                c.pass ? " PASS " : " FAIL ", c.name.c_str(), c.residual,
                c.threshold, c.seconds);
    report.push_back({{"name", c.name},
                      {"residual", c.residual},
                      {"threshold", c.threshold},
                      {"pass", c.pass},
                      {"seconds", c.seconds}});
  }
  std::printf("%zu checks, %d failures\n", checks.size(), failures);
  nlohmann::json top{{"seed", seed}, {"checks", report},
                     {"failures", failures}};
  write_file_atomic(out_prefix + "_validate.json", top.dump(2) + "\n");
  return failures;
}

}  // namespace kinetic
