#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "kinetic/lj.hpp"
#include "kinetic/rng.hpp"

using namespace kinetic;

TEST_SUITE_BEGIN("lj");

namespace {

LJSystem two_body(double separation, double box) {
  LJSystem sys;
  sys.particles = 2;
  sys.box = box;
  sys.radius = 1.0;
  sys.u0 = 1.0;
  sys.split_r = box / 4.0;
  sys.positions.resize(3, 2);
  sys.positions.col(0) = Eigen::Vector3d(1.0, 1.0, 1.0);
  sys.positions.col(1) = Eigen::Vector3d(1.0 + separation, 1.0, 1.0);
  return sys;
}

// Configuration with every pair separated by at least min_sep.
LJSystem random_system(int m, double box, double r, double u0, double split_r,
                       double min_sep, RngStream& rng) {
  LJSystem sys;
  sys.particles = m;
  sys.box = box;
  sys.radius = r;
  sys.u0 = u0;
  sys.split_r = split_r;
  sys.positions.resize(3, m);
  for (int i = 0; i < m; ++i) {
    for (int attempt = 0;; ++attempt) {
      REQUIRE(attempt < 1000);
      Eigen::Vector3d p(rng.uniform(0, box), rng.uniform(0, box),
                        rng.uniform(0, box));
      bool ok = true;
      for (int j = 0; j < i && ok; ++j)
        ok = min_image(box, p - sys.positions.col(j)).norm() > min_sep;
      if (ok) {
        sys.positions.col(i) = p;
        break;
      }
    }
  }
  return sys;
}

Eigen::VectorXd finite_difference_gradient(LJSystem sys) {
  const double h = 1e-6;
  Eigen::VectorXd grad(3 * sys.particles);
  for (int i = 0; i < sys.particles; ++i) {
    for (int k = 0; k < 3; ++k) {
      double saved = sys.positions(k, i);
      sys.positions(k, i) = saved + h;
      double up = lj_energy(sys);
      sys.positions(k, i) = saved - h;
      double down = lj_energy(sys);
      sys.positions(k, i) = saved;
      grad(3 * i + k) = (up - down) / (2 * h);
    }
  }
  return grad;
}

}  // namespace

TEST_CASE("cutoff profile plateaus and range") {
  CHECK(smooth_cutoff(0.4) == 1.0);
  CHECK(smooth_cutoff(0.5) == 1.0);
  CHECK(smooth_cutoff(1.0) == 0.0);
  CHECK(smooth_cutoff(1.1) == 0.0);
  for (int k = 0; k <= 100; ++k) {
    double s = 0.02 * k;
    double c = smooth_cutoff(s);
    CHECK(c >= 0.0);
    CHECK(c <= 1.0);
  }
  // derivative consistent with finite differences across the bridge
  for (double s : {0.55, 0.7, 0.85, 0.95}) {
    double fd = (smooth_cutoff(s + 1e-6) - smooth_cutoff(s - 1e-6)) / 2e-6;
    CHECK(smooth_cutoff_deriv(s) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("lj energy on tiny systems") {
  SUBCASE("single particle has no pairs") {
    LJSystem sys;
    sys.particles = 1;
    sys.box = 5.0;
    sys.positions = Eigen::Matrix3Xd::Zero(3, 1);
    CHECK(lj_energy(sys) == 0.0);
  }
  SUBCASE("pair at h = r sits at the zero crossing") {
    LJSystem sys = two_body(1.0, 20.0);  // h/a = 0.05, cutoff inactive
    CHECK(lj_energy(sys) == doctest::Approx(0.0).epsilon(1e-14));
  }
  SUBCASE("pair at the minimum h = r 2^(1/6)") {
    double h_min = std::pow(2.0, 1.0 / 6.0);
    LJSystem sys = two_body(h_min, 20.0);
    // brute-force scalar evaluation of the pair term
    double q6 = std::pow(1.0 / h_min, 6.0);
    double w = q6 * q6 - q6;
    CHECK(w == doctest::Approx(-0.25).epsilon(1e-12));
    CHECK(lj_energy(sys) == doctest::Approx(2.0 * w).epsilon(1e-12));
    CHECK(lj_energy(sys) == doctest::Approx(-0.5).epsilon(1e-12));
  }
  SUBCASE("coincident particles raise") {
    LJSystem sys = two_body(0.0, 20.0);
    CHECK_THROWS_AS(lj_energy(sys), SingularityError);
  }
}

TEST_CASE("minimum image stays within the box diagonal bound") {
  RngStream rng = RngStream::derive(21, {0});
  double box = 7.0;
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::Vector3d p(rng.uniform(-30, 30), rng.uniform(-30, 30),
                      rng.uniform(-30, 30));
    CHECK(min_image(box, p).norm() <= box * std::sqrt(3.0) / 2.0 + 1e-12);
  }
}

TEST_CASE("force split degenerate limits") {
  SUBCASE("guard on the split radius") {
    LJSystem sys = two_body(1.3, 8.0);
    sys.split_r = 4.0;  // == a/2
    CHECK_THROWS_AS(lj_force_split(sys), ConfigError);
  }
  SUBCASE("R past twice the box swallows every pair into F0") {
    LJSystem sys = two_body(1.3, 8.0);
    sys.split_r = 2.0 * sys.box;  // chi(h/R) = 1 wherever W' != 0
    ForceSplit fs = lj_force_split_unchecked(sys);
    CHECK(fs.c_r == 0.0);
    CHECK(fs.pair_field(sys.positions, 0, 1).norm() == 0.0);
    CHECK(fs.pair_field(sys.positions, 1, 0).norm() == 0.0);
    Eigen::VectorXd f0 = fs.f0(sys.positions);
    Eigen::VectorXd grad = lj_gradient(sys);
    CHECK((f0 - grad).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("no interaction at all") {
    LJSystem sys = two_body(1.3, 8.0);
    sys.u0 = 0.0;
    sys.split_r = 2.0;
    ForceSplit fs = lj_force_split(sys);
    CHECK(fs.c_r == 0.0);
    CHECK(fs.f0(sys.positions).norm() == 0.0);
    CHECK(fs.pair_field(sys.positions, 0, 1).norm() == 0.0);
  }
}

TEST_CASE("C_R dense-scan value for r=1 a=10 R=3") {
  LJSystem sys;
  sys.particles = 2;
  sys.box = 10.0;
  sys.radius = 1.0;
  sys.u0 = 1.0;
  sys.split_r = 3.0;
  sys.positions = Eigen::Matrix3Xd::Zero(3, 2);
  sys.positions(0, 1) = 3.0;
  ForceSplit fs = lj_force_split(sys);

  // independent scalar scan of |W'| over [R/2, a]
  double peak = 0.0;
  const int n = 20000;  // step ~4e-4 < r/1000
  for (int k = 0; k <= n; ++k) {
    double h = 1.5 + (10.0 - 1.5) * static_cast<double>(k) / n;
    double q6 = std::pow(1.0 / h, 6.0);
    double core = q6 * q6 - q6;
    double core_d = (-12.0 * q6 * q6 + 6.0 * q6) / h;
    double w_d = core_d * smooth_cutoff(h / 10.0) +
                 core * smooth_cutoff_deriv(h / 10.0) / 10.0;
    peak = std::max(peak, std::abs(w_d));
  }
  CHECK(fs.c_r == doctest::Approx(1.01 * 2.0 * peak).epsilon(1e-9));
  // |W'| is maximal at the inner scan edge h = R/2 here, so the constant is
  // pinned in closed form; kept as a regression value.
  double w_inner = 6.0 / std::pow(1.5, 7.0) - 12.0 / std::pow(1.5, 13.0);
  CHECK(fs.c_r == doctest::Approx(1.01 * 2.0 * w_inner).epsilon(1e-9));
}

TEST_CASE("split consistency against finite differences") {
  RngStream rng = RngStream::derive(77, {0});
  for (int trial = 0; trial < 100; ++trial) {
    int m = 2 + static_cast<int>(rng.uniform_index(7));  // M <= 8
    LJSystem sys = random_system(m, 8.0, 1.0, 0.7, 2.5, 0.85, rng);
    ForceSplit fs = lj_force_split(sys);
    Eigen::VectorXd rebuilt = fs.f0(sys.positions);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        if (j == i) continue;
        rebuilt.segment<3>(3 * i) += fs.pair_field(sys.positions, i, j);
      }
    Eigen::VectorXd fd = finite_difference_gradient(sys);
    double scale = 1.0 + fd.cwiseAbs().maxCoeff();
    CHECK((rebuilt - fd).cwiseAbs().maxCoeff() < 1e-8 * scale);
    // and the analytic gradient agrees to machine precision
    CHECK((rebuilt - lj_gradient(sys)).cwiseAbs().maxCoeff() <
          1e-10 * scale);
  }
}

TEST_CASE("rate bound holds at random configurations") {
  RngStream rng = RngStream::derive(78, {0});
  LJSystem sys = random_system(6, 8.0, 1.0, 0.9, 2.5, 0.85, rng);
  ForceSplit fs = lj_force_split(sys);
  for (int trial = 0; trial < 1000; ++trial) {
    int i = static_cast<int>(rng.uniform_index(6));
    int j = static_cast<int>(rng.uniform_index(6));
    if (j == i) continue;
    if (trial % 7 == 0) {  // refresh positions now and then
      sys = random_system(6, 8.0, 1.0, 0.9, 2.5, 0.85, rng);
      fs = lj_force_split(sys);
    }
    Eigen::Vector3d v(rng.gaussian(), rng.gaussian(), rng.gaussian());
    Eigen::Vector3d g = fs.pair_field(sys.positions, i, j);
    CHECK(g.norm() <= fs.c_r + 1e-12);
    CHECK(std::max(v.dot(g), 0.0) <= v.norm() * fs.c_r + 1e-12);
  }
}

TEST_CASE("C_R is non-increasing in R") {
  LJSystem sys = two_body(1.3, 10.0);
  double previous = std::numeric_limits<double>::infinity();
  for (double split : {1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0}) {
    sys.split_r = split;
    ForceSplit fs = lj_force_split(sys);
    CHECK(fs.c_r <= previous + 1e-15);
    previous = fs.c_r;
  }
}

TEST_CASE("xyz round trip") {
  RngStream rng = RngStream::derive(79, {0});
  LJSystem sys = random_system(5, 6.5, 1.0, 1.0, 2.0, 0.8, rng);
  const char* path = "test_roundtrip.xyz";
  write_xyz(path, sys);
  XyzData data = read_xyz(path);
  CHECK(data.particles == 5);
  CHECK(data.box == doctest::Approx(6.5));
  CHECK((data.positions - sys.positions).cwiseAbs().maxCoeff() < 1e-15);
  std::remove(path);
}

TEST_CASE("lattice packing stays inside the box") {
  Eigen::Matrix3Xd pos = lattice_configuration(32, 9.0);
  CHECK(pos.cols() == 32);
  CHECK(pos.minCoeff() >= 0.0);
  CHECK(pos.maxCoeff() < 9.0);
  double min_sep = 1e9;
  for (int i = 0; i < 32; ++i)
    for (int j = i + 1; j < 32; ++j)
      min_sep =
          std::min(min_sep, min_image(9.0, pos.col(i) - pos.col(j)).norm());
  CHECK(min_sep > 1.0);
}

TEST_SUITE_END();
