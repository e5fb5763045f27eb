#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kinetic/errors.hpp"
#include "kinetic/rng.hpp"

namespace kinetic {

// Nested acceptance bounds, cheapest first, innermost level last.  Every
// level maps a state to [0,1] and must dominate the next one pointwise; the
// innermost level is the exact acceptance probability.
template <class State>
struct BoundSpec {
  std::vector<std::function<double(const State&)>> levels;
  std::vector<std::string> cost_labels;
};

struct ThinDecision {
  bool accepted = false;
  int levels_evaluated = 0;
};

namespace detail {

inline double checked_level_value(double value, double previous) {
  if (!(value >= -1e-12) || !(value <= 1.0 + 1e-12))
    throw ContractViolation("thinning: bound level outside [0,1]");
  if (value > previous + 1e-12)
    throw DominanceViolation("thinning: deeper bound exceeds shallower one");
  return std::min(std::max(value, 0.0), 1.0);
}

}  // namespace detail

// Lazy Bernoulli with exact parameter equal to the innermost level: one
// uniform per level, each tested against the ratio to the previous level.
// Evaluation stops at the first rejection, so a rejecting cheap bound costs
// exactly one evaluation.
template <class State>
ThinDecision thinned_bernoulli(const State& s, const BoundSpec<State>& spec,
                               RngStream& rng) {
  if (spec.levels.empty())
    throw ContractViolation("thinned_bernoulli: no bound levels");
  ThinDecision out;
  double previous = 1.0;
  for (const auto& level : spec.levels) {
    double value = detail::checked_level_value(level(s), previous);
    ++out.levels_evaluated;
    double ratio = previous == 0.0 ? 0.0 : value / previous;
    if (rng.uniform() > ratio) return out;
    previous = value;
  }
  out.accepted = true;
  return out;
}

// Acceptance measure of the chain computed as the product of level ratios
// (telescopes to the innermost value); validates range and dominance on the
// way.  Used by the exact kernel oracles.
template <class State>
double thinned_acceptance_measure(const State& s,
                                  const BoundSpec<State>& spec) {
  if (spec.levels.empty())
    throw ContractViolation("thinned_acceptance_measure: no bound levels");
  double previous = 1.0;
  double product = 1.0;
  for (const auto& level : spec.levels) {
    double value = detail::checked_level_value(level(s), previous);
    product *= previous == 0.0 ? 0.0 : value / previous;
    previous = value;
  }
  return product;
}

// First firing index under a constant bound, by inverse transform: the
// proposal fires with probability q at each step, so P(K = k) = (1-q)^k q and
// K+1 is Geometric(q).  K = floor(ln u / ln(1-q)).
inline std::int64_t geometric_skip(double q_tilde, double u) {
  if (!(q_tilde > 0.0) || !(q_tilde < 1.0))
    throw ContractViolation("geometric_skip: q must lie in (0,1)");
  if (!(u > 0.0) || !(u < 1.0))
    throw ContractViolation("geometric_skip: u must lie in (0,1)");
  return static_cast<std::int64_t>(
      std::floor(std::log(u) / std::log(1.0 - q_tilde)));
}

// First firing index along a deterministic flow, one uniform per step:
// P(K > n) = prod_{k=0..n} (1 - q(phi_k(s))).  fired=false reports the cap
// being hit, with the state reached.
template <class State>
struct FlowSkip {
  std::int64_t index = 0;
  State state;
  bool fired = false;
};

template <class State, class Flow, class Prob>
FlowSkip<State> flow_skip(State s, Flow&& phi, Prob&& q_tilde, RngStream& rng,
                          std::int64_t cap) {
  if (cap < 1) throw ContractViolation("flow_skip: cap must be >= 1");
  for (std::int64_t k = 0; k < cap; ++k) {
    double q = q_tilde(s);
    if (!(q >= 0.0) || !(q <= 1.0))
      throw ContractViolation("flow_skip: probability outside [0,1]");
    if (rng.uniform() <= q) return {k, s, true};
    s = phi(s);
  }
  return {cap, s, false};
}

}  // namespace kinetic
