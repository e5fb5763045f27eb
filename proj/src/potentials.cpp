#include "kinetic/potentials.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

#include "kinetic/rng.hpp"

namespace kinetic {

namespace {

// Minimal signed representative of x on the torus of side n: [-n/2, n/2).
std::int64_t signed_rep(std::int64_t x, int n) {
  std::int64_t w = wrap_coordinate(x + n / 2, n);
  return w - n / 2;
}

std::vector<double> parse_params(const std::string& name, std::size_t colon) {
  std::vector<double> out;
  if (colon == std::string::npos) return out;
  std::string rest = name.substr(colon + 1);
  std::size_t pos = 0;
  while (pos < rest.size()) {
    std::size_t comma = rest.find(',', pos);
    std::string tok = rest.substr(pos, comma == std::string::npos
                                           ? std::string::npos
                                           : comma - pos);
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0')
      throw ConfigError("potential parameter is not a number: " + tok);
    out.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

double DiscretePotential::operator()(const Eigen::VectorXi& x) const {
  if (x.size() != dim)
    throw ContractViolation("potential: dimension mismatch");
  if (torus > 0) return energy(wrap_lattice(x, torus));
  return energy(x);
}

double DiscretePotential::value1d(std::int64_t x) const {
  if (dim != 1) throw ContractViolation("value1d requires dim == 1");
  std::int64_t xx = torus > 0 ? wrap_coordinate(x, torus) : x;
  if (energy1d) return energy1d(xx);
  thread_local Eigen::VectorXi scratch(1);
  scratch(0) = static_cast<int>(xx);
  return energy(scratch);
}

Eigen::VectorXi wrap_lattice(const Eigen::VectorXi& x, int n) {
  Eigen::VectorXi w = x;
  for (int i = 0; i < w.size(); ++i)
    w(i) = static_cast<int>(wrap_coordinate(w(i), n));
  return w;
}

double increment(const DiscretePotential& U, const Eigen::VectorXi& x,
                 int axis, int sign) {
  if (axis < 0 || axis >= U.dim)
    throw ContractViolation("increment: axis out of range");
  if (sign != 1 && sign != -1)
    throw ContractViolation("increment: sign must be +1 or -1");
  if (U.dim == 1) return increment1d(U, x(0), sign);
  Eigen::VectorXi y = x;
  y(axis) += sign;
  return U(y) - U(x);
}

double increment1d(const DiscretePotential& U, std::int64_t x, int sign) {
  return U.value1d(x + sign) - U.value1d(x);
}

DiscretePotential scaled_potential(const DiscretePotential& U,
                                   double inverse_eps) {
  DiscretePotential s = U;
  auto base = U.energy;
  s.energy = [base, inverse_eps](const Eigen::VectorXi& x) {
    return inverse_eps * base(x);
  };
  if (U.energy1d) {
    auto base1 = U.energy1d;
    s.energy1d = [base1, inverse_eps](std::int64_t x) {
      return inverse_eps * base1(x);
    };
  }
  s.factor_terms.clear();
  for (const auto& f : U.factor_terms) {
    s.factor_terms.push_back(
        [f, inverse_eps](const Eigen::VectorXi& x, int axis, int sign) {
          return inverse_eps * f(x, axis, sign);
        });
  }
  return s;
}

std::vector<FactorTerm> component_factors(
    const std::vector<DiscretePotential>& parts) {
  std::vector<FactorTerm> out;
  for (const auto& part : parts) {
    out.push_back([part](const Eigen::VectorXi& x, int axis, int sign) {
      return increment(part, x, axis, sign);
    });
  }
  return out;
}

std::vector<FactorTerm> fraction_factors(const DiscretePotential& U,
                                         const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (std::abs(total - 1.0) > 1e-12)
    throw ConfigError("fraction_factors: weights must sum to 1");
  std::vector<FactorTerm> out;
  DiscretePotential base = U;
  base.factor_terms.clear();
  for (double w : weights) {
    out.push_back([base, w](const Eigen::VectorXi& x, int axis, int sign) {
      return w * increment(base, x, axis, sign);
    });
  }
  return out;
}

double verify_factor_terms(const DiscretePotential& U, int box) {
  if (!U.has_factors())
    throw ConfigError("verify_factor_terms: potential has no factor terms");
  double worst = 0.0;
  Eigen::VectorXi x(U.dim);
  std::int64_t lo = U.torus > 0 ? 0 : -box;
  std::int64_t hi = U.torus > 0 ? U.torus - 1 : box;
  std::int64_t span = hi - lo + 1;
  std::int64_t n_states = 1;
  for (int i = 0; i < U.dim; ++i) n_states *= span;
  for (std::int64_t s = 0; s < n_states; ++s) {
    std::int64_t rem = s;
    for (int i = 0; i < U.dim; ++i) {
      x(i) = static_cast<int>(lo + rem % span);
      rem /= span;
    }
    for (int axis = 0; axis < U.dim; ++axis) {
      for (int sign : {1, -1}) {
        double total = 0.0;
        for (const auto& f : U.factor_terms) total += f(x, axis, sign);
        worst = std::max(worst,
                         std::abs(total - increment(U, x, axis, sign)));
        Eigen::VectorXi y = x;
        y(axis) += sign;
        if (U.torus > 0) y = wrap_lattice(y, U.torus);
        for (const auto& f : U.factor_terms)
          worst = std::max(std::abs(f(y, axis, -sign) + f(x, axis, sign)),
                           worst);
      }
    }
  }
  return worst;
}

TruncatedSum partition_function_1d(const DiscretePotential& U) {
  if (U.dim != 1)
    throw ContractViolation("partition_function_1d requires dim == 1");
  constexpr double kTailTol = 1e-14;
  constexpr std::int64_t kCap = 1000000;
  double u0 = U.value1d(0);
  TruncatedSum out;
  out.value = std::exp(-(u0 - u0));  // x = 0 term, relative normalization
  double tail_right = 1.0, tail_left = 1.0;
  std::int64_t x = 1;
  for (; x <= kCap; ++x) {
    if (tail_right >= kTailTol) {
      tail_right = std::exp(u0 - U.value1d(x));
      out.value += tail_right;
    }
    if (tail_left >= kTailTol) {
      tail_left = std::exp(u0 - U.value1d(-x));
      out.value += tail_left;
    }
    if (tail_right < kTailTol && tail_left < kTailTol) break;
  }
  out.reach = x;
  out.tail_bound = std::max(tail_right, tail_left);
  out.value *= std::exp(-u0);
  return out;
}

DiscretePotential make_discrete_potential(const std::string& name, int dim,
                                          int torus) {
  if (dim < 1) throw ConfigError("potential: dimension must be positive");
  std::size_t colon = name.find(':');
  std::string kind = name.substr(0, colon);
  std::vector<double> par = parse_params(name, colon);

  DiscretePotential U;
  U.dim = dim;
  U.torus = torus;

  auto coordinate_sum = [dim, torus](std::function<double(std::int64_t)> g) {
    return [g, torus](const Eigen::VectorXi& x) {
      double total = 0.0;
      for (int i = 0; i < x.size(); ++i) {
        std::int64_t c = x(i);
        if (torus > 0) c = signed_rep(c, torus);
        total += g(c);
      }
      return total;
    };
  };

  if (kind == "zero") {
    U.energy = [](const Eigen::VectorXi&) { return 0.0; };
    U.energy1d = [](std::int64_t) { return 0.0; };
  } else if (kind == "quadratic") {
    double scale = par.empty() ? 1.0 : par[0];
    auto g = [scale](std::int64_t c) {
      return scale * static_cast<double>(c) * static_cast<double>(c);
    };
    U.energy = coordinate_sum(g);
    if (torus == 0 && dim == 1) U.energy1d = g;
  } else if (kind == "abs") {
    double scale = par.empty() ? 1.0 : par[0];
    auto g = [scale](std::int64_t c) {
      return scale * static_cast<double>(c < 0 ? -c : c);
    };
    U.energy = coordinate_sum(g);
    if (torus == 0 && dim == 1) U.energy1d = g;
  } else if (kind == "doublewell") {
    if (par.size() != 3)
      throw ConfigError("doublewell potential needs parameters h1,h2,w");
    if (dim != 1) throw ConfigError("doublewell potential is 1-dimensional");
    double h1 = par[0], h2 = par[1], w = par[2];
    if (w < 1) throw ConfigError("doublewell: width must be >= 1");
    auto g = [h1, h2, w, torus](std::int64_t c0) {
      std::int64_t c = c0;
      double h = c < 0 ? h1 : h2;
      double s = static_cast<double>(c < 0 ? -c : c);
      if (s <= w) return h * s / w;
      if (s <= 2 * w) return h * (2 * w - s) / w;
      return h * (s - 2 * w) / w;
    };
    if (torus > 0) {
      int n = torus;
      U.energy = [g, n](const Eigen::VectorXi& x) {
        return g(signed_rep(x(0), n));
      };
      U.energy1d = [g, n](std::int64_t c) { return g(signed_rep(c, n)); };
    } else {
      U.energy = [g](const Eigen::VectorXi& x) { return g(x(0)); };
      U.energy1d = g;
    }
  } else if (kind == "random") {
    if (torus == 0)
      throw ConfigError("random potential requires a torus domain");
    if (par.empty()) throw ConfigError("random potential needs a seed");
    std::uint64_t seed = static_cast<std::uint64_t>(par[0]);
    double amp = par.size() > 1 ? par[1] : 2.0;
    int n = torus;
    U.energy = [seed, amp, n](const Eigen::VectorXi& x) {
      std::uint64_t h = detail::mix64(seed ^ 0x6a09e667f3bcc909ULL);
      for (int i = 0; i < x.size(); ++i) {
        std::uint64_t c = static_cast<std::uint64_t>(wrap_coordinate(x(i), n));
        h = detail::mix64(h ^ detail::mix64(c + 0x9e3779b97f4a7c15ULL));
      }
      return amp * (static_cast<double>(h >> 11) * 0x1.0p-53);
    };
  } else {
    throw ConfigError("unknown discrete potential: " + name);
  }
  return U;
}

double check_gradient(const ContinuousPotential& H, int n_points, double span,
                      std::uint64_t seed) {
  RngStream rng = RngStream::derive(seed, {0x67726164});
  double worst = 0.0;
  const double h = 1e-5;
  Eigen::VectorXd x(H.dim);
  for (int p = 0; p < n_points; ++p) {
    for (int i = 0; i < H.dim; ++i) x(i) = rng.uniform(-span, span);
    Eigen::VectorXd g = H.gradient(x);
    for (int i = 0; i < H.dim; ++i) {
      Eigen::VectorXd xp = x, xm = x;
      xp(i) += h;
      xm(i) -= h;
      double fd = (H.value(xp) - H.value(xm)) / (2 * h);
      double scale = std::max(1.0, std::abs(g(i)));
      worst = std::max(worst, std::abs(fd - g(i)) / scale);
    }
  }
  return worst;
}

ContinuousPotential make_continuous_potential(const std::string& name,
                                              int dim) {
  if (dim < 1) throw ConfigError("potential: dimension must be positive");
  std::size_t colon = name.find(':');
  std::string kind = name.substr(0, colon);
  std::vector<double> par = parse_params(name, colon);

  ContinuousPotential H;
  H.dim = dim;
  if (kind == "zero") {
    H.value = [](const Eigen::VectorXd&) { return 0.0; };
    H.gradient = [dim](const Eigen::VectorXd&) {
      return Eigen::VectorXd::Zero(dim).eval();
    };
    H.hessian_bound = [](double) { return 0.0; };
  } else if (kind == "quadratic") {
    double scale = par.empty() ? 1.0 : par[0];
    H.value = [scale](const Eigen::VectorXd& x) {
      return 0.5 * scale * x.squaredNorm();
    };
    H.gradient = [scale](const Eigen::VectorXd& x) {
      return (scale * x).eval();
    };
    H.hessian_bound = [scale](double) { return scale; };
  } else if (kind == "doublewell") {
    if (dim != 1) throw ConfigError("doublewell potential is 1-dimensional");
    if (par.size() != 2)
      throw ConfigError("doublewell potential needs parameters h,w");
    double h = par[0], w = par[1];
    H.value = [h, w](const Eigen::VectorXd& x) {
      double s = x(0) / w;
      double q = s * s - 1.0;
      return h * q * q;
    };
    H.gradient = [h, w](const Eigen::VectorXd& x) {
      double s = x(0) / w;
      Eigen::VectorXd g(1);
      g(0) = 4.0 * h * s * (s * s - 1.0) / w;
      return g;
    };
    H.hessian_bound = [h, w](double radius) {
      double s = radius / w;
      return 4.0 * h * (3.0 * s * s + 1.0) / (w * w);
    };
  } else {
    throw ConfigError("unknown continuous potential: " + name);
  }
  return H;
}

}  // namespace kinetic
