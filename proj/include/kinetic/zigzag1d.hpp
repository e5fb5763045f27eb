#pragma once

#include <cstdint>
#include <functional>

#include "kinetic/potentials.hpp"
#include "kinetic/rng.hpp"

namespace kinetic {

// Walk state on Z x {-1,+1}.  Along any trajectory the parity product
// (-1)^x * v * (-1)^step_count is conserved.
struct Walk1D {
  std::int64_t x = 0;
  int v = 1;
  std::uint64_t step_count = 0;
};

// One transition: move to x+v with probability exp(-(U(x+v)-U(x))_+), else
// flip the velocity in place.
Walk1D step1d(const Walk1D& s, const DiscretePotential& U, double u);
Walk1D step1d(const Walk1D& s, const DiscretePotential& U, RngStream& rng);

// Observable on Z x {-1,+1}.
using WalkFunction = std::function<double(std::int64_t, int)>;

// Upper bound on the CLT variance for a centered observable under a unimodal
// potential: M_f = E_pi(g(X) F(X)) with g(x) = f(x,1)+f(x,-1) and F the
// one-sided partial sums of g; the CLT variance satisfies sigma_f^2 <= 3 M_f.
// Sums are truncated to |x| <= truncation and the reported tail_estimate
// e^{U(0)-U(truncation)} lets the caller judge convergence.
struct CltBound {
  double m_f = 0.0;
  double tail_estimate = 0.0;
};
CltBound clt_variance_bound(const DiscretePotential& U, const WalkFunction& f,
                            std::int64_t truncation);

// The CLT variance itself via the renewal representation: blocks between
// returns to (0,+1) are i.i.d., sigma_f^2 = E(A^2)/lambda with A the block sum
// of f and lambda = 2 e^{U(0)} Z the mean block length.  E(A^2) is estimated
// by Monte Carlo over n_blocks blocks; lambda is computed exactly.
struct RenewalVariance {
  double sigma2 = 0.0;
  double lambda = 0.0;
  double mean_block_length = 0.0;
  std::int64_t blocks = 0;
};
RenewalVariance renewal_block_variance(const DiscretePotential& U,
                                       const WalkFunction& f,
                                       std::int64_t n_blocks, RngStream& rng);

// Escape experiment from the well window [a, b] at temperature eps.  The base
// potential must satisfy U(0) = 0, decrease on [a, 0], increase on [0, b],
// and have {U = 0} within the window exactly equal to [alpha, beta].
struct EscapeConfig {
  DiscretePotential potential;
  std::int64_t window_a = -1, window_b = 1;
  std::int64_t alpha = 0, beta = 0;
  double eps = 1.0;
};
void validate_escape_config(const EscapeConfig& cfg);

struct EscapeSample {
  std::uint64_t tau = 0;
  bool exit_left = false;
};
// Runs the walk under U/eps from (0,+1) until X leaves ]a, b[.  Throws
// EscapeTimeout (carrying the partial count) past step_cap.
EscapeSample escape_time_sample(const EscapeConfig& cfg, RngStream& rng,
                                std::uint64_t step_cap = 10000000000ULL);

// Leading-order escape laws: mean time, exit side, and the parameter of the
// geometric variable sandwiching tau.
struct EscapePrediction {
  double mean_tau = 0.0;
  double p_exit_left = 0.0;
  double e1 = 0.0, e2 = 0.0, e3 = 0.0;
  double geometric_parameter = 0.0;
};
EscapePrediction eyring_kramers_prediction(const EscapeConfig& cfg);

}  // namespace kinetic
