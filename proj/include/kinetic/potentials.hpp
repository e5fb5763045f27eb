#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kinetic/errors.hpp"

namespace kinetic {

// Increment factor f_j(x, s*e_axis).  A valid factor family must telescope,
//   sum_j f_j(x, s*e_axis) = U(x + s*e_axis) - U(x),
// and each term must be edge-antisymmetric,
//   f_j(x + s*e_axis, -s*e_axis) = -f_j(x, s*e_axis),
// otherwise the factorized walk does not keep the Gibbs measure invariant.
using FactorTerm =
    std::function<double(const Eigen::VectorXi& x, int axis, int sign)>;

// Energy landscape on Z^d or on a periodic box (torus of side N per
// coordinate).  For sampling on all of Z^d the caller is responsible for
// sum_x exp(-U(x)) being finite; this is not checkable here.
struct DiscretePotential {
  int dim = 1;
  int torus = 0;  // 0: all of Z^d; N > 0: coordinates wrapped into [0, N)
  std::function<double(const Eigen::VectorXi&)> energy;
  std::function<double(std::int64_t)> energy1d;  // optional fast path, dim == 1
  std::vector<FactorTerm> factor_terms;

  double operator()(const Eigen::VectorXi& x) const;
  double value1d(std::int64_t x) const;
  bool has_factors() const { return !factor_terms.empty(); }
};

// Wraps a single coordinate into [0, N).
inline std::int64_t wrap_coordinate(std::int64_t x, int n) {
  std::int64_t m = x % n;
  return m < 0 ? m + n : m;
}

Eigen::VectorXi wrap_lattice(const Eigen::VectorXi& x, int n);

// U(x + s*e_axis) - U(x), torus-aware.  axis is 0-based.
double increment(const DiscretePotential& U, const Eigen::VectorXi& x,
                 int axis, int sign);
double increment1d(const DiscretePotential& U, std::int64_t x, int sign);

// U scaled by 1/eps (the low-temperature chain uses U/eps).
DiscretePotential scaled_potential(const DiscretePotential& U,
                                   double inverse_eps);

// Factor family from a component split U = sum_j U_j.
std::vector<FactorTerm> component_factors(
    const std::vector<DiscretePotential>& parts);
// Factor family f_j = w_j * (U(x+v) - U(x)); weights must sum to 1.
std::vector<FactorTerm> fraction_factors(const DiscretePotential& U,
                                         const std::vector<double>& weights);

// Max telescoping / antisymmetry defect of U.factor_terms over |x_i| <= box
// (torus: over the whole box).  Zero for a valid family.
double verify_factor_terms(const DiscretePotential& U, int box);

// Adaptive partition function for d = 1: expand until the tail bound
// e^{U(0)-U(x)} drops below 1e-14 on both sides, cap at 1e6 terms per side.
struct TruncatedSum {
  double value = 0.0;
  std::int64_t reach = 0;
  double tail_bound = 0.0;
};
TruncatedSum partition_function_1d(const DiscretePotential& U);

// Named potentials: "zero", "quadratic[:scale]", "abs[:scale]",
// "doublewell:h1,h2,w", "random:seed[,amp]" (torus only).
// Torus variants are built on the minimal signed representative, so they are
// N-periodic by construction.
DiscretePotential make_discrete_potential(const std::string& name, int dim,
                                          int torus = 0);

// Smooth landscape on R^d.
struct ContinuousPotential {
  int dim = 1;
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  // Bound on the spectral norm of the Hessian over {|x| <= radius}; used to
  // build affine jump-rate majorants.
  std::function<double(double radius)> hessian_bound;
};

// Max relative error between gradient and centered finite differences at
// n_points draws from [-span, span]^d, seeded deterministically.
double check_gradient(const ContinuousPotential& H, int n_points, double span,
                      std::uint64_t seed);

// Named potentials: "zero", "quadratic[:scale]" (scale*|x|^2/2),
// "doublewell:h,w" (d = 1, h((x/w)^2-1)^2).
ContinuousPotential make_continuous_potential(const std::string& name,
                                              int dim);

}  // namespace kinetic
