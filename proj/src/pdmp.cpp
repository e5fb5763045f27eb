#include "kinetic/pdmp.hpp"

#include <cmath>

#include "kinetic/stats.hpp"
#include "kinetic/zigzag1d.hpp"
#include "kinetic/zigzagd.hpp"

namespace kinetic {

namespace {

void check_pdmp_state(const PDMPState& s, int dim) {
  if (s.y.size() != dim || s.w.size() != dim)
    throw ContractViolation("pdmp state dimension mismatch");
  for (int i = 0; i < s.w.size(); ++i)
    if (s.w(i) != 1 && s.w(i) != -1)
      throw ContractViolation("pdmp velocity components must be +-1");
}

// First arrival time of an inhomogeneous Poisson clock with rate c + m t,
// solving c t + m t^2 / 2 = E.
double affine_first_arrival(double c, double m, double target) {
  if (c <= 0.0 && m <= 0.0) return std::numeric_limits<double>::infinity();
  if (m <= 0.0) return target / c;
  return (-c + std::sqrt(c * c + 2.0 * m * target)) / m;
}

}  // namespace

RateBoundSupplier lipschitz_rate_bound(const ContinuousPotential& H,
                                       double horizon) {
  if (!H.hessian_bound)
    throw ConfigError("lipschitz_rate_bound: potential lacks a Hessian bound");
  const double root_d = std::sqrt(static_cast<double>(H.dim));
  return [&H, horizon, root_d](const Eigen::VectorXd& y,
                               const Eigen::VectorXi& w) {
    RateBound b;
    double radius = y.norm() + horizon * root_d;
    double lipschitz = H.hessian_bound(radius);
    Eigen::VectorXd grad = H.gradient(y);
    b.c.resize(y.size());
    b.m = Eigen::VectorXd::Constant(y.size(), lipschitz * root_d);
    for (int i = 0; i < y.size(); ++i)
      b.c(i) = std::max(w(i) * grad(i), 0.0);
    b.horizon = horizon;
    return b;
  };
}

double rate_bound_defect(const ContinuousPotential& H, const RateBound& bound,
                         const Eigen::VectorXd& y, const Eigen::VectorXi& w,
                         int grid) {
  double worst = -std::numeric_limits<double>::infinity();
  for (int k = 1; k <= grid; ++k) {
    double t = bound.horizon * static_cast<double>(k) / grid;
    Eigen::VectorXd pos = y + t * w.cast<double>();
    Eigen::VectorXd grad = H.gradient(pos);
    for (int i = 0; i < y.size(); ++i) {
      double rate = std::max(w(i) * grad(i), 0.0);
      worst = std::max(worst, rate - (bound.c(i) + bound.m(i) * t));
    }
  }
  return worst;
}

ZZResult simulate_zz(const ContinuousPotential& H,
                     const RateBoundSupplier& bound, double t_end,
                     PDMPState init, RngStream& rng) {
  check_pdmp_state(init, H.dim);
  ZZResult out;
  out.state = init;
  PDMPState& s = out.state;
  constexpr std::uint64_t kProposalCap = 100000000ULL;

  while (s.t < t_end) {
    RateBound b = bound(s.y, s.w);
    if (b.c.size() != H.dim || b.m.size() != H.dim || b.horizon <= 0.0)
      throw ContractViolation("rate bound has the wrong shape");
    for (int i = 0; i < H.dim; ++i)
      if (b.c(i) < 0.0 || b.m(i) < 0.0)
        throw ContractViolation("rate bound coefficients must be >= 0");

    double window = std::min(b.horizon, t_end - s.t);
    // Earliest proposal among the d majorant clocks.
    double first = std::numeric_limits<double>::infinity();
    int which = -1;
    for (int i = 0; i < H.dim; ++i) {
      double t_i = affine_first_arrival(b.c(i), b.m(i), rng.exponential());
      if (t_i < first) {
        first = t_i;
        which = i;
      }
    }
    if (first >= window) {  // no proposal: ride the flow to the window edge
      s.y += window * s.w.cast<double>();
      s.t += window;
      continue;
    }
    s.y += first * s.w.cast<double>();
    s.t += first;
    if (++out.proposals > kProposalCap)
      throw RunawayError("simulate_zz: proposal cap exceeded");

    double majorant = b.c(which) + b.m(which) * first;
    double rate = std::max(s.w(which) * H.gradient(s.y)(which), 0.0);
    double ratio = rate / majorant;
    if (ratio > 1.0 + 1e-9)
      throw BoundViolation("simulate_zz: thinning bound below the true rate");
    if (rng.uniform() <= ratio) {
      s.w(which) = -s.w(which);
      out.events.push_back({s.t, which});
    }
    // Bounds are re-derived after every proposal; restarting the clocks at a
    // stopping time keeps the thinning exact.
  }
  return out;
}

DiscretePotential embed_discrete(const ContinuousPotential& H, double eps) {
  if (eps <= 0.0) throw ContractViolation("embed_discrete: eps must be > 0");
  DiscretePotential U;
  U.dim = H.dim;
  auto value = H.value;
  U.energy = [value, eps](const Eigen::VectorXi& k) {
    return value(eps * k.cast<double>());
  };
  if (H.dim == 1) {
    U.energy1d = [value, eps](std::int64_t k) {
      Eigen::VectorXd y(1);
      y(0) = eps * static_cast<double>(k);
      return value(y);
    };
  }
  return U;
}

std::vector<std::pair<double, double>> scaling_gap(
    const ContinuousPotential& H, const std::vector<double>& eps_list,
    double t_probe, int n_samples, std::uint64_t seed) {
  const int d = H.dim;
  RateBoundSupplier bound = lipschitz_rate_bound(H);

  // One shared continuous reference sample: per-coordinate pools.
  std::vector<std::vector<double>> reference(d);
  for (int s = 0; s < n_samples; ++s) {
    RngStream rng = RngStream::derive(seed, {0xC0117, static_cast<std::uint64_t>(s)});
    PDMPState init;
    init.y = Eigen::VectorXd::Zero(d);
    init.w = Eigen::VectorXi::Ones(d);
    ZZResult res = simulate_zz(H, bound, t_probe, init, rng);
    for (int i = 0; i < d; ++i) reference[i].push_back(res.state.y(i));
  }

  std::vector<std::pair<double, double>> out;
  for (std::size_t e = 0; e < eps_list.size(); ++e) {
    double eps = eps_list[e];
    DiscretePotential U = embed_discrete(H, eps);
    std::int64_t n_steps = static_cast<std::int64_t>(t_probe / eps);
    std::vector<std::vector<double>> rescaled(d);
    for (int s = 0; s < n_samples; ++s) {
      RngStream rng = RngStream::derive(
          seed, {0xD15C, e, static_cast<std::uint64_t>(s)});
      if (d == 1) {
        Walk1D walk;
        for (std::int64_t k = 0; k < n_steps; ++k) walk = step1d(walk, U, rng);
        rescaled[0].push_back(eps * static_cast<double>(walk.x));
      } else {
        LatticeStateD state;
        state.x = Eigen::VectorXi::Zero(d);
        state.v = Eigen::VectorXi::Ones(d);
        for (std::int64_t k = 0; k < n_steps; ++k)
          state = sweep_transition(state, U, rng);
        for (int i = 0; i < d; ++i)
          rescaled[i].push_back(eps * static_cast<double>(state.x(i)));
      }
    }
    double w1 = 0.0;
    for (int i = 0; i < d; ++i) w1 += wasserstein1(rescaled[i], reference[i]);
    out.emplace_back(eps, w1);
  }
  return out;
}

}  // namespace kinetic
