#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "kinetic/potentials.hpp"
#include "kinetic/rng.hpp"

namespace kinetic {

// Continuous-time Zig-Zag state: between events the position follows
// y(t) = y(t0) + (t - t0) w with w in {-1,+1}^d.
struct PDMPState {
  Eigen::VectorXd y;
  Eigen::VectorXi w;
  double t = 0.0;
};

// Per-coordinate affine-in-time rate majorant lambda_i(t) = c_i + m_i t,
// guaranteed to dominate (w_i d_i H(y + t w))_+ on [0, horizon].
struct RateBound {
  Eigen::VectorXd c;
  Eigen::VectorXd m;
  double horizon = 1.0;
};
using RateBoundSupplier =
    std::function<RateBound(const Eigen::VectorXd&, const Eigen::VectorXi&)>;

// Majorant from a Hessian bound of H on the ball reachable within one
// horizon: c_i = (w_i d_i H(y))_+, m_i = L sqrt(d).
RateBoundSupplier lipschitz_rate_bound(const ContinuousPotential& H,
                                       double horizon = 1.0);

// Max over a grid of (0, horizon] of true rate minus majorant; <= 0 for a
// valid bound.
double rate_bound_defect(const ContinuousPotential& H, const RateBound& bound,
                         const Eigen::VectorXd& y, const Eigen::VectorXi& w,
                         int grid = 100);

struct ZZEvent {
  double time = 0.0;
  int coordinate = 0;
};
struct ZZResult {
  PDMPState state;  // at t_end
  std::vector<ZZEvent> events;
  std::uint64_t proposals = 0;
};

// Exact simulation by superposition of per-coordinate thinned clocks:
// proposals from the affine majorant by closed-form inversion, acceptance
// with ratio true-rate / majorant.  A ratio above 1 + 1e-9 aborts with
// BoundViolation.
ZZResult simulate_zz(const ContinuousPotential& H,
                     const RateBoundSupplier& bound, double t_end,
                     PDMPState init, RngStream& rng);

// U_eps(k) = H(eps k): the lattice embedding used by the scaling limits.
DiscretePotential embed_discrete(const ContinuousPotential& H, double eps);

// Wasserstein-1 distance (summed over coordinates) between the time-t_probe
// marginal of the rescaled discrete walk eps X_{t/eps} under U_eps and the
// continuous process, one entry per eps.
std::vector<std::pair<double, double>> scaling_gap(
    const ContinuousPotential& H, const std::vector<double>& eps_list,
    double t_probe, int n_samples, std::uint64_t seed);

}  // namespace kinetic
