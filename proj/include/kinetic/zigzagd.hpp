#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "kinetic/potentials.hpp"
#include "kinetic/rng.hpp"
#include "kinetic/stats.hpp"

namespace kinetic {

// Walk state on Z^d x {-1,+1}^d.
struct LatticeStateD {
  Eigen::VectorXi x;
  Eigen::VectorXi v;
};

// Coordinate update order for the sweep: the default identity order, a fixed
// permutation, or a fresh uniform permutation per step.  All invariance
// results transfer across orders by renumbering.
enum class SweepOrder { Identity, Fixed, Random };
struct SweepSpec {
  SweepOrder order = SweepOrder::Identity;
  std::vector<int> permutation;  // used when order == Fixed
};

// Signature sigma(x,v) = ((-1)^{x_i} v_i)_i; it flips globally at every step,
// confining trajectories to a class pair.
Eigen::VectorXi signature(const Eigen::VectorXi& x, const Eigen::VectorXi& v);

// Nested bounds on the per-factor acceptance of a coordinate move: level k
// maps (x, axis, sign, factor) to [0,1] and must dominate the exact factor
// acceptance exp(-(f_j(x, sign*e_axis))_+).
struct FactorBoundSpec {
  std::vector<
      std::function<double(const Eigen::VectorXi&, int axis, int sign, int j)>>
      levels;
};

struct SweepCounters {
  std::uint64_t exact_evals = 0;             // increment / factor evaluations
  std::vector<std::uint64_t> bound_evals;    // per bound level
};

// One Gibbs sweep: for each coordinate k in order, keep v_k with probability
// exp(-(U(Y + v_k e_k) - U(Y))_+) at the current intermediate position Y,
// else flip it; accepted coordinates move immediately.  Exactly d increment
// evaluations.
LatticeStateD sweep_transition(const LatticeStateD& s,
                               const DiscretePotential& U, RngStream& rng,
                               const SweepSpec& sweep = {});

// Same sweep with the coordinate acceptance replaced by the product of
// per-factor acceptances, each sampled lazily (evaluation stops at the first
// rejecting factor).  Optional nested bounds short-circuit factor evaluation.
LatticeStateD sweep_transition_factorized(const LatticeStateD& s,
                                          const DiscretePotential& U,
                                          RngStream& rng,
                                          SweepCounters* counters = nullptr,
                                          const FactorBoundSpec* thin = nullptr,
                                          const SweepSpec& sweep = {});

// Exact one-step kernel of the sweep on a torus, enumerated by dynamic
// programming over the 2^d accept/flip branches.  Plain uses the full
// increment, Factorized the factor product, Thinned the bound-chain measure
// (which telescopes to the factorized value and validates dominance).
enum class KernelMode { Plain, Factorized, Thinned };
SpMat build_transition_matrix(const DiscretePotential& U,
                              KernelMode mode = KernelMode::Plain,
                              const FactorBoundSpec* bounds = nullptr,
                              const SweepSpec& sweep = {});

// State indexing for the matrix oracle: index = flat(x) * 2^d + bits(v).
int state_count(const DiscretePotential& U);
int state_index(const DiscretePotential& U, const LatticeStateD& s);
LatticeStateD state_from_index(const DiscretePotential& U, int index);
// mu(x,v) = e^{-U(x)} / (Z 2^d) over all torus states.
Eigen::VectorXd gibbs_distribution(const DiscretePotential& U);
// Indices of the states with signature s.
std::vector<int> signature_class(const DiscretePotential& U,
                                 const Eigen::VectorXi& s);

// Drift function V(x,v) = sum_i exp(a|x_i| + b 1{x_i v_i > 0}) and the drift
// inequality Q V <= gamma V + C it satisfies when the potential rises by at
// least h on outward moves beyond R.
struct LyapunovParams {
  double a = 0.0, b = 0.0, R = 0.0, h = 0.0;
  // a = h/2 with e^{-b} = e^{-h/4} - e^{-h/2}: balances both contraction
  // branches so that gamma <= e^{-h/4}.
  static LyapunovParams balanced(double h, double R);
};
struct LyapunovReport {
  double gamma = 0.0, C = 0.0;
  double max_violation = 0.0;  // max over the box of QV - (gamma V + C)
  double min_margin = 0.0;     // min over the box of (gamma V + C) - QV
  bool condition_ok = true;    // outward-increase hypothesis on the box
  std::int64_t states = 0;
};
LyapunovReport lyapunov_report(const DiscretePotential& U,
                               const LyapunovParams& params, int sample_box);

double lyapunov_value(const LyapunovParams& params, const Eigen::VectorXi& x,
                      const Eigen::VectorXi& v);
// Exact Q V(x,v) for the identity-order sweep, by branch enumeration.
double lyapunov_drift(const DiscretePotential& U, const LyapunovParams& params,
                      const Eigen::VectorXi& x, const Eigen::VectorXi& v);

}  // namespace kinetic
