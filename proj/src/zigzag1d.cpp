#include "kinetic/zigzag1d.hpp"

#include <cmath>
#include <vector>

namespace kinetic {

Walk1D step1d(const Walk1D& s, const DiscretePotential& U, double u) {
  if (U.dim != 1) throw ContractViolation("step1d: potential must be 1-d");
  double rise = increment1d(U, s.x, s.v);
  double accept = rise > 0.0 ? std::exp(-rise) : 1.0;
  Walk1D next = s;
  ++next.step_count;
  if (u <= accept) {
    next.x += s.v;
  } else {
    next.v = -s.v;
  }
  return next;
}

Walk1D step1d(const Walk1D& s, const DiscretePotential& U, RngStream& rng) {
  return step1d(s, U, rng.uniform());
}

namespace {

void require_unimodal(const DiscretePotential& U, std::int64_t reach) {
  for (std::int64_t x = 0; x < reach; ++x) {
    if (U.value1d(x + 1) < U.value1d(x) - 1e-12)
      throw ContractViolation("potential is not increasing on [0, inf)");
    if (U.value1d(-x - 1) < U.value1d(-x) - 1e-12)
      throw ContractViolation("potential is not decreasing on (-inf, 0]");
  }
}

}  // namespace

CltBound clt_variance_bound(const DiscretePotential& U, const WalkFunction& f,
                            std::int64_t truncation) {
  if (truncation < 1) throw ContractViolation("truncation must be positive");
  require_unimodal(U, truncation);

  const std::int64_t n = 2 * truncation + 1;
  std::vector<double> weight(n), g(n);
  double z = 0.0;
  for (std::int64_t x = -truncation; x <= truncation; ++x) {
    std::int64_t i = x + truncation;
    weight[i] = std::exp(-U.value1d(x));
    z += weight[i];
    g[i] = f(x, 1) + f(x, -1);
  }

  double mu_f = 0.0;
  for (std::int64_t i = 0; i < n; ++i) mu_f += weight[i] * g[i] / 2.0;
  mu_f /= z;
  if (std::abs(mu_f) > 1e-10)
    throw ContractViolation("clt_variance_bound: observable is not centered");

  // F(x) = g(x)/2 + sum of g over the open interval between 0 and x.
  double m_f = 0.0;
  double partial = 0.0;
  for (std::int64_t x = 0; x <= truncation; ++x) {
    std::int64_t i = x + truncation;
    double capital_f = g[i] / 2.0 + (x >= 1 ? partial : 0.0);
    m_f += weight[i] * g[i] * capital_f;
    if (x >= 1) partial += g[i];
  }
  partial = 0.0;
  for (std::int64_t x = -1; x >= -truncation; --x) {
    std::int64_t i = x + truncation;
    double capital_f = g[i] / 2.0 + partial;
    m_f += weight[i] * g[i] * capital_f;
    partial += g[i];
  }
  m_f /= z;

  double u0 = U.value1d(0);
  CltBound out;
  out.m_f = m_f;
  out.tail_estimate = std::max(std::exp(u0 - U.value1d(truncation)),
                               std::exp(u0 - U.value1d(-truncation)));
  return out;
}

RenewalVariance renewal_block_variance(const DiscretePotential& U,
                                       const WalkFunction& f,
                                       std::int64_t n_blocks, RngStream& rng) {
  if (n_blocks < 1) throw ContractViolation("need at least one block");
  TruncatedSum zsum = partition_function_1d(U);
  RenewalVariance out;
  out.lambda = 2.0 * std::exp(U.value1d(0)) * zsum.value;
  out.blocks = n_blocks;

  double sum_sq = 0.0;
  std::uint64_t total_steps = 0;
  constexpr std::uint64_t kBlockCap = 1000000000ULL;
  for (std::int64_t blk = 0; blk < n_blocks; ++blk) {
    Walk1D s{0, 1, 0};
    double a = 0.0;
    std::uint64_t steps = 0;
    do {
      a += f(s.x, s.v);
      s = step1d(s, U, rng);
      if (++steps > kBlockCap)
        throw RunawayError("renewal block exceeded the step cap");
    } while (!(s.x == 0 && s.v == 1));
    sum_sq += a * a;
    total_steps += steps;
  }
  out.sigma2 = sum_sq / static_cast<double>(n_blocks) / out.lambda;
  out.mean_block_length =
      static_cast<double>(total_steps) / static_cast<double>(n_blocks);
  return out;
}

void validate_escape_config(const EscapeConfig& cfg) {
  const auto& U = cfg.potential;
  if (U.dim != 1) throw ConfigError("escape: potential must be 1-d");
  if (!(cfg.window_a < cfg.alpha && cfg.alpha <= 0 && 0 <= cfg.beta &&
        cfg.beta < cfg.window_b))
    throw ConfigError("escape: need a < alpha <= 0 <= beta < b");
  if (std::abs(U.value1d(0)) > 1e-12)
    throw ConfigError("escape: potential must vanish at the origin");
  if (cfg.eps <= 0.0) throw ConfigError("escape: eps must be positive");
  for (std::int64_t x = cfg.window_a; x < 0; ++x) {
    if (U.value1d(x + 1) > U.value1d(x) + 1e-12)
      throw ConfigError("escape: potential must decrease on [a, 0]");
  }
  for (std::int64_t x = 0; x < cfg.window_b; ++x) {
    if (U.value1d(x + 1) < U.value1d(x) - 1e-12)
      throw ConfigError("escape: potential must increase on [0, b]");
  }
  for (std::int64_t x = cfg.window_a; x <= cfg.window_b; ++x) {
    bool zero = std::abs(U.value1d(x)) <= 1e-12;
    bool inside = cfg.alpha <= x && x <= cfg.beta;
    if (zero != inside)
      throw ConfigError("escape: zero set must equal [alpha, beta]");
  }
}

EscapeSample escape_time_sample(const EscapeConfig& cfg, RngStream& rng,
                                std::uint64_t step_cap) {
  // Acceptance table over the window; the walk never queries U outside [a,b].
  const std::int64_t a = cfg.window_a, b = cfg.window_b;
  const std::int64_t width = b - a + 1;
  std::vector<double> accept_up(width, 1.0), accept_down(width, 1.0);
  for (std::int64_t x = a; x <= b; ++x) {
    if (x + 1 <= b) {
      double rise = (cfg.potential.value1d(x + 1) - cfg.potential.value1d(x)) /
                    cfg.eps;
      accept_up[x - a] = rise > 0.0 ? std::exp(-rise) : 1.0;
    }
    if (x - 1 >= a) {
      double rise = (cfg.potential.value1d(x - 1) - cfg.potential.value1d(x)) /
                    cfg.eps;
      accept_down[x - a] = rise > 0.0 ? std::exp(-rise) : 1.0;
    }
  }

  std::int64_t x = 0;
  int v = 1;
  std::uint64_t steps = 0;
  while (x > a && x < b) {
    if (steps >= step_cap)
      throw EscapeTimeout("escape_time_sample: step cap exceeded", steps);
    double acc = v > 0 ? accept_up[x - a] : accept_down[x - a];
    if (rng.uniform() <= acc) {
      x += v;
    } else {
      v = -v;
    }
    ++steps;
  }
  return {steps, x <= a};
}

EscapePrediction eyring_kramers_prediction(const EscapeConfig& cfg) {
  const auto& U = cfg.potential;
  double ua = U.value1d(cfg.window_a);
  double ub = U.value1d(cfg.window_b);
  auto close = [](double p, double q) {
    return std::abs(p - q) <= 1e-12 * std::max({1.0, std::abs(p), std::abs(q)});
  };
  EscapePrediction out;
  out.e1 = std::min(ua, ub);
  out.e2 = std::min(U.value1d(cfg.alpha - 1), U.value1d(cfg.beta + 1));
  out.e3 = std::abs(ua - ub);
  double plateau = static_cast<double>(cfg.beta - cfg.alpha + 1);
  out.mean_tau = std::exp(out.e1 / cfg.eps) * 2.0 * plateau /
                 (close(ua, ub) ? 2.0 : 1.0);
  double left_le = (ua <= ub + 1e-12) ? 1.0 : 0.0;
  double right_le = (ub <= ua + 1e-12) ? 1.0 : 0.0;
  out.p_exit_left = (1.0 + left_le - right_le) / 2.0;
  double qa = std::exp(-ua / cfg.eps), qb = std::exp(-ub / cfg.eps);
  out.geometric_parameter = qa + qb - qa * qb;
  return out;
}

}  // namespace kinetic
