#include "kinetic/zigzagd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kinetic/thinning.hpp"

namespace kinetic {

namespace {

void check_state(const LatticeStateD& s, const DiscretePotential& U) {
  if (s.x.size() != U.dim || s.v.size() != U.dim)
    throw ContractViolation("lattice state dimension mismatch");
  for (int i = 0; i < s.v.size(); ++i)
    if (s.v(i) != 1 && s.v(i) != -1)
      throw ContractViolation("velocity components must be +-1");
}

std::vector<int> sweep_axes(const SweepSpec& sweep, int d, RngStream* rng) {
  std::vector<int> axes(d);
  std::iota(axes.begin(), axes.end(), 0);
  switch (sweep.order) {
    case SweepOrder::Identity:
      break;
    case SweepOrder::Fixed:
      if (static_cast<int>(sweep.permutation.size()) != d)
        throw ConfigError("sweep permutation has the wrong length");
      axes = sweep.permutation;
      break;
    case SweepOrder::Random: {
      if (!rng) throw ContractViolation("random sweep order needs a stream");
      if (d > 1) {
        for (int i = d - 1; i > 0; --i) {
          int j = static_cast<int>(rng->uniform_index(i + 1));
          std::swap(axes[i], axes[j]);
        }
      }
      break;
    }
  }
  return axes;
}

double plain_acceptance(const DiscretePotential& U, const Eigen::VectorXi& y,
                        int axis, int sign) {
  double rise = increment(U, y, axis, sign);
  return rise > 0.0 ? std::exp(-rise) : 1.0;
}

double factor_acceptance(const DiscretePotential& U, const Eigen::VectorXi& y,
                         int axis, int sign, int j) {
  double rise = U.factor_terms[j](y, axis, sign);
  return rise > 0.0 ? std::exp(-rise) : 1.0;
}

// A factor move plus the chain of bounds above it, adapted to the generic
// thinning engine.
struct FactorMove {
  const Eigen::VectorXi* y;
  int axis, sign, factor;
};

BoundSpec<FactorMove> factor_chain(const DiscretePotential& U,
                                   const FactorBoundSpec* thin) {
  BoundSpec<FactorMove> spec;
  if (thin) {
    for (const auto& level : thin->levels) {
      spec.levels.push_back([&level](const FactorMove& m) {
        return level(*m.y, m.axis, m.sign, m.factor);
      });
    }
  }
  spec.levels.push_back([&U](const FactorMove& m) {
    return factor_acceptance(U, *m.y, m.axis, m.sign, m.factor);
  });
  return spec;
}

}  // namespace

Eigen::VectorXi signature(const Eigen::VectorXi& x, const Eigen::VectorXi& v) {
  Eigen::VectorXi s(x.size());
  for (int i = 0; i < x.size(); ++i) {
    int parity = static_cast<int>(wrap_coordinate(x(i), 2));  // 0 even, 1 odd
    s(i) = parity == 0 ? v(i) : -v(i);
  }
  return s;
}

LatticeStateD sweep_transition(const LatticeStateD& s,
                               const DiscretePotential& U, RngStream& rng,
                               const SweepSpec& sweep) {
  check_state(s, U);
  LatticeStateD next = s;
  for (int axis : sweep_axes(sweep, U.dim, &rng)) {
    double acc = plain_acceptance(U, next.x, axis, s.v(axis));
    if (rng.uniform() <= acc) {
      next.x(axis) += s.v(axis);
      if (U.torus > 0)
        next.x(axis) =
            static_cast<int>(wrap_coordinate(next.x(axis), U.torus));
    } else {
      next.v(axis) = -s.v(axis);
    }
  }
  return next;
}

LatticeStateD sweep_transition_factorized(const LatticeStateD& s,
                                          const DiscretePotential& U,
                                          RngStream& rng,
                                          SweepCounters* counters,
                                          const FactorBoundSpec* thin,
                                          const SweepSpec& sweep) {
  check_state(s, U);
  if (!U.has_factors())
    throw ConfigError("factorized sweep requires factor terms");
  const int n_factors = static_cast<int>(U.factor_terms.size());
  BoundSpec<FactorMove> chain = factor_chain(U, thin);
  const int n_bound_levels = static_cast<int>(chain.levels.size()) - 1;
  if (counters && counters->bound_evals.size() !=
                      static_cast<std::size_t>(n_bound_levels))
    counters->bound_evals.assign(n_bound_levels, 0);

  LatticeStateD next = s;
  for (int axis : sweep_axes(sweep, U.dim, &rng)) {
    bool accept = true;
    for (int j = 0; j < n_factors && accept; ++j) {
      FactorMove move{&next.x, axis, s.v(axis), j};
      ThinDecision d = thinned_bernoulli(move, chain, rng);
      accept = d.accepted;
      if (counters) {
        for (int lvl = 0; lvl < d.levels_evaluated; ++lvl) {
          if (lvl < n_bound_levels)
            ++counters->bound_evals[lvl];
          else
            ++counters->exact_evals;
        }
      }
    }
    if (accept) {
      next.x(axis) += s.v(axis);
      if (U.torus > 0)
        next.x(axis) =
            static_cast<int>(wrap_coordinate(next.x(axis), U.torus));
    } else {
      next.v(axis) = -s.v(axis);
    }
  }
  return next;
}

int state_count(const DiscretePotential& U) {
  if (U.torus <= 0)
    throw ContractViolation("state indexing requires a torus domain");
  double count = std::pow(static_cast<double>(U.torus), U.dim) *
                 std::pow(2.0, U.dim);
  if (count > 1e6) throw SizeError("state space too large");
  int positions = 1;
  for (int i = 0; i < U.dim; ++i) positions *= U.torus;
  return positions << U.dim;
}

int state_index(const DiscretePotential& U, const LatticeStateD& s) {
  int flat = 0;
  for (int i = U.dim - 1; i >= 0; --i) {
    flat = flat * U.torus + static_cast<int>(wrap_coordinate(s.x(i), U.torus));
  }
  int bits = 0;
  for (int i = 0; i < U.dim; ++i)
    if (s.v(i) == 1) bits |= 1 << i;
  return (flat << U.dim) | bits;
}

LatticeStateD state_from_index(const DiscretePotential& U, int index) {
  LatticeStateD s;
  s.x.resize(U.dim);
  s.v.resize(U.dim);
  int bits = index & ((1 << U.dim) - 1);
  int flat = index >> U.dim;
  for (int i = 0; i < U.dim; ++i) {
    s.v(i) = (bits >> i) & 1 ? 1 : -1;
    s.x(i) = flat % U.torus;
    flat /= U.torus;
  }
  return s;
}

Eigen::VectorXd gibbs_distribution(const DiscretePotential& U) {
  const int n = state_count(U);
  Eigen::VectorXd mu(n);
  for (int idx = 0; idx < n; ++idx) {
    LatticeStateD s = state_from_index(U, idx);
    mu(idx) = std::exp(-U(s.x));
  }
  mu /= mu.sum();
  return mu;
}

std::vector<int> signature_class(const DiscretePotential& U,
                                 const Eigen::VectorXi& target) {
  const int n = state_count(U);
  std::vector<int> members;
  for (int idx = 0; idx < n; ++idx) {
    LatticeStateD s = state_from_index(U, idx);
    if (signature(s.x, s.v) == target) members.push_back(idx);
  }
  return members;
}

namespace {

// Enumerates the 2^d accept/flip branches of one sweep from (x, v) in the
// given axis order, calling leaf(final_state, probability) for each branch.
template <class Leaf>
void enumerate_sweep(const DiscretePotential& U, const LatticeStateD& start,
                     const std::vector<int>& axes, int depth,
                     LatticeStateD& current, double prob,
                     const std::function<double(const Eigen::VectorXi&, int,
                                                int)>& acceptance,
                     Leaf&& leaf) {
  if (depth == static_cast<int>(axes.size())) {
    leaf(current, prob);
    return;
  }
  const int axis = axes[depth];
  const int v0 = start.v(axis);
  double acc = acceptance(current.x, axis, v0);

  if (acc > 0.0) {
    int old_x = current.x(axis);
    current.x(axis) += v0;
    if (U.torus > 0)
      current.x(axis) = static_cast<int>(wrap_coordinate(current.x(axis),
                                                         U.torus));
    enumerate_sweep(U, start, axes, depth + 1, current, prob * acc, acceptance,
                    leaf);
    current.x(axis) = old_x;
  }
  if (acc < 1.0) {
    current.v(axis) = -v0;
    enumerate_sweep(U, start, axes, depth + 1, current, prob * (1.0 - acc),
                    acceptance, leaf);
    current.v(axis) = v0;
  }
}

std::function<double(const Eigen::VectorXi&, int, int)> kernel_acceptance(
    const DiscretePotential& U, KernelMode mode,
    const FactorBoundSpec* bounds) {
  switch (mode) {
    case KernelMode::Plain:
      return [&U](const Eigen::VectorXi& y, int axis, int sign) {
        return plain_acceptance(U, y, axis, sign);
      };
    case KernelMode::Factorized:
      if (!U.has_factors())
        throw ConfigError("factorized kernel requires factor terms");
      return [&U](const Eigen::VectorXi& y, int axis, int sign) {
        double acc = 1.0;
        for (int j = 0; j < static_cast<int>(U.factor_terms.size()); ++j)
          acc *= factor_acceptance(U, y, axis, sign, j);
        return acc;
      };
    case KernelMode::Thinned: {
      const int n_factors =
          U.has_factors() ? static_cast<int>(U.factor_terms.size()) : 1;
      return [&U, bounds, n_factors](const Eigen::VectorXi& y, int axis,
                                     int sign) {
        double acc = 1.0;
        for (int j = 0; j < n_factors; ++j) {
          BoundSpec<FactorMove> chain;
          if (bounds) {
            for (const auto& level : bounds->levels) {
              chain.levels.push_back([&level](const FactorMove& m) {
                return level(*m.y, m.axis, m.sign, m.factor);
              });
            }
          }
          if (U.has_factors()) {
            chain.levels.push_back([&U](const FactorMove& m) {
              return factor_acceptance(U, *m.y, m.axis, m.sign, m.factor);
            });
          } else {
            chain.levels.push_back([&U](const FactorMove& m) {
              return plain_acceptance(U, *m.y, m.axis, m.sign);
            });
          }
          FactorMove move{&y, axis, sign, j};
          acc *= thinned_acceptance_measure(move, chain);
        }
        return acc;
      };
    }
  }
  throw ContractViolation("unknown kernel mode");
}

}  // namespace

SpMat build_transition_matrix(const DiscretePotential& U, KernelMode mode,
                              const FactorBoundSpec* bounds,
                              const SweepSpec& sweep) {
  const int n = state_count(U);
  auto acceptance = kernel_acceptance(U, mode, bounds);

  std::vector<std::vector<int>> orders;
  if (sweep.order == SweepOrder::Random) {
    std::vector<int> axes(U.dim);
    std::iota(axes.begin(), axes.end(), 0);
    do {
      orders.push_back(axes);
    } while (std::next_permutation(axes.begin(), axes.end()));
  } else {
    orders.push_back(sweep_axes(sweep, U.dim, nullptr));
  }
  const double order_weight = 1.0 / static_cast<double>(orders.size());

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(n) << U.dim);
  for (int idx = 0; idx < n; ++idx) {
    LatticeStateD start = state_from_index(U, idx);
    for (const auto& axes : orders) {
      LatticeStateD current = start;
      enumerate_sweep(U, start, axes, 0, current, order_weight, acceptance,
                      [&](const LatticeStateD& leaf, double prob) {
                        triplets.emplace_back(idx, state_index(U, leaf), prob);
                      });
    }
  }
  SpMat P(n, n);
  P.setFromTriplets(triplets.begin(), triplets.end());
  return P;
}

LyapunovParams LyapunovParams::balanced(double h, double R) {
  if (h <= 0.0) throw ConfigError("balanced: h must be positive");
  LyapunovParams p;
  p.h = h;
  p.R = R;
  p.a = h / 2.0;
  p.b = -std::log(std::exp(-h / 4.0) - std::exp(-h / 2.0));
  return p;
}

double lyapunov_value(const LyapunovParams& params, const Eigen::VectorXi& x,
                      const Eigen::VectorXi& v) {
  double total = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    double xi = std::abs(static_cast<double>(x(i)));
    double aligned =
        static_cast<double>(x(i)) * static_cast<double>(v(i)) > 0.0 ? params.b
                                                                    : 0.0;
    total += std::exp(params.a * xi + aligned);
  }
  return total;
}

double lyapunov_drift(const DiscretePotential& U, const LyapunovParams& params,
                      const Eigen::VectorXi& x, const Eigen::VectorXi& v) {
  LatticeStateD start{x, v};
  std::vector<int> axes(U.dim);
  std::iota(axes.begin(), axes.end(), 0);
  auto acceptance = [&U](const Eigen::VectorXi& y, int axis, int sign) {
    return plain_acceptance(U, y, axis, sign);
  };
  double expectation = 0.0;
  LatticeStateD current = start;
  enumerate_sweep(U, start, axes, 0, current, 1.0, acceptance,
                  [&](const LatticeStateD& leaf, double prob) {
                    expectation +=
                        prob * lyapunov_value(params, leaf.x, leaf.v);
                  });
  return expectation;
}

LyapunovReport lyapunov_report(const DiscretePotential& U,
                               const LyapunovParams& params, int sample_box) {
  if (U.torus > 0)
    throw ContractViolation("lyapunov_report works on the full lattice");
  LyapunovReport out;
  out.gamma = std::max(
      std::exp(-params.h + params.a) +
          (1.0 - std::exp(-params.h)) * std::exp(-params.b),
      std::exp(-params.a));
  out.C = U.dim * std::exp(params.a * (params.R + 1.0) + params.b);

  const std::int64_t span = 2 * sample_box + 1;
  std::int64_t n_states = 1;
  for (int i = 0; i < U.dim; ++i) n_states *= span;

  out.max_violation = -std::numeric_limits<double>::infinity();
  out.min_margin = std::numeric_limits<double>::infinity();
  Eigen::VectorXi x(U.dim);
  Eigen::VectorXi v(U.dim);
  for (std::int64_t sx = 0; sx < n_states; ++sx) {
    std::int64_t rem = sx;
    for (int i = 0; i < U.dim; ++i) {
      x(i) = static_cast<int>(rem % span - sample_box);
      rem /= span;
    }
    // Outward-increase hypothesis at this point.
    for (int i = 0; i < U.dim && out.condition_ok; ++i) {
      for (int sign : {1, -1}) {
        if (static_cast<double>(sign) * x(i) > params.R) {
          double rise = increment(U, x, i, sign);
          if (rise < params.h - 1e-12) out.condition_ok = false;
        }
      }
    }
    for (int bits = 0; bits < (1 << U.dim); ++bits) {
      for (int i = 0; i < U.dim; ++i) v(i) = (bits >> i) & 1 ? 1 : -1;
      double value = lyapunov_value(params, x, v);
      double drift = lyapunov_drift(U, params, x, v);
      double slack = out.gamma * value + out.C - drift;
      out.max_violation = std::max(out.max_violation, -slack);
      out.min_margin = std::min(out.min_margin, slack);
      ++out.states;
    }
  }
  return out;
}

}  // namespace kinetic
