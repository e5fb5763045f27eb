#include <cstdio>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "kinetic/config.hpp"
#include "kinetic/hybrid.hpp"
#include "kinetic/parallel.hpp"
#include "kinetic/pdmp.hpp"
#include "kinetic/potentials.hpp"
#include "kinetic/stats.hpp"
#include "kinetic/zigzag1d.hpp"
#include "kinetic/zigzagd.hpp"

namespace kinetic {

namespace {

constexpr const char* kVersion = "kinetic 0.1.0";

std::string banner(const RunConfig& cfg) {
  std::ostringstream out;
  out << "# " << kVersion << " seed=" << cfg.seed()
      << " config=" << cfg.config_hash() << "\n";
  return out.str();
}

int run_escape(const RunConfig& cfg) {
  DiscretePotential base =
      make_discrete_potential(cfg.get_string("potential"), 1, 0);
  std::vector<double> eps_list = cfg.get_list("eps");
  const std::int64_t samples = cfg.get_int("samples");
  const std::uint64_t seed = cfg.seed();

  std::ostringstream csv;
  csv << banner(cfg);
  csv << "eps,mean_tau,predicted_tau,p_left,predicted_p_left,ks_exp\n";
  for (std::size_t e = 0; e < eps_list.size(); ++e) {
    EscapeConfig ec;
    ec.potential = base;
    ec.window_a = cfg.get_int("a");
    ec.window_b = cfg.get_int("b");
    ec.alpha = cfg.get_int("alpha");
    ec.beta = cfg.get_int("beta");
    ec.eps = eps_list[e];
    validate_escape_config(ec);
    EscapePrediction pred = eyring_kramers_prediction(ec);

    std::vector<double> taus(samples);
    std::vector<char> lefts(samples);
    parallel_for(samples, cfg.threads(), [&](std::size_t i) {
      RngStream rng = RngStream::derive(seed, {0xE5CA, e, i});
      EscapeSample s = escape_time_sample(ec, rng);
      taus[i] = static_cast<double>(s.tau);
      lefts[i] = s.exit_left ? 1 : 0;
    });
    double mean_tau = 0.0, p_left = 0.0;
    for (std::int64_t i = 0; i < samples; ++i) {
      mean_tau += taus[i];
      p_left += lefts[i];
    }
    mean_tau /= static_cast<double>(samples);
    p_left /= static_cast<double>(samples);
    std::vector<double> normalized = taus;
    for (double& t : normalized) t /= mean_tau;
    double ks = ks_statistic(normalized,
                             [](double t) { return 1.0 - std::exp(-t); });
    csv << format_dbl(eps_list[e]) << "," << format_dbl(mean_tau) << ","
        << format_dbl(pred.mean_tau) << "," << format_dbl(p_left) << ","
        << format_dbl(pred.p_exit_left) << "," << format_dbl(ks) << "\n";
  }
  write_file_atomic(cfg.out_prefix() + ".csv", csv.str());
  std::cout << csv.str();
  return 0;
}

DiscretePotential zzd_potential(const RunConfig& cfg) {
  DiscretePotential U = make_discrete_potential(
      cfg.get_string("potential"), static_cast<int>(cfg.get_int("dim")),
      static_cast<int>(cfg.get_int("torus")));
  if (cfg.get_int("factorized") != 0 && !U.has_factors())
    U.factor_terms = fraction_factors(U, {0.5, 0.5});
  return U;
}

int run_zzd(const RunConfig& cfg) {
  DiscretePotential U = zzd_potential(cfg);
  const int dim = U.dim;
  const std::int64_t steps = cfg.get_int("steps");
  const std::int64_t chains = cfg.get_int("chains");
  bool factorized = cfg.get_int("factorized") != 0;
  SweepSpec sweep;
  std::string order = cfg.get_string("order");
  if (order == "id") {
    sweep.order = SweepOrder::Identity;
  } else if (order == "random") {
    sweep.order = SweepOrder::Random;
  } else {
    throw ConfigError("zzd: order must be 'id' or 'random'");
  }

  // built-in bound chain: dominate each factor acceptance by its square root
  FactorBoundSpec bounds;
  const FactorBoundSpec* thin = nullptr;
  std::string thin_name = cfg.get_string("thin");
  if (thin_name == "half") {
    if (!factorized) {  // thinning runs through the factor engine
      U.factor_terms = fraction_factors(U, {1.0});
      factorized = true;
    }
    DiscretePotential closure = U;
    bounds.levels.push_back(
        [closure](const Eigen::VectorXi& x, int axis, int sign, int j) {
          double rise = closure.factor_terms[j](x, axis, sign);
          return rise > 0.0 ? std::exp(-0.5 * rise) : 1.0;
        });
    thin = &bounds;
  } else if (thin_name != "none") {
    throw ConfigError("zzd: thin must be 'none' or 'half'");
  }

  std::vector<std::string> files(chains);
  std::vector<SweepCounters> all_counters(chains);
  parallel_for(chains, cfg.threads(), [&](std::size_t c) {
    RngStream rng = RngStream::derive(cfg.seed(), {0x22D, c});
    LatticeStateD s;
    s.x = Eigen::VectorXi::Zero(dim);
    s.v = Eigen::VectorXi::Ones(dim);
    std::ostringstream csv;
    csv << "step";
    for (int i = 1; i <= dim; ++i) csv << ",x" << i;
    for (int i = 1; i <= dim; ++i) csv << ",v" << i;
    csv << "\n";
    SweepCounters& counters = all_counters[c];
    for (std::int64_t n = 0; n <= steps; ++n) {
      csv << n;
      for (int i = 0; i < dim; ++i) csv << "," << s.x(i);
      for (int i = 0; i < dim; ++i) csv << "," << s.v(i);
      csv << "\n";
      if (n == steps) break;
      s = factorized
              ? sweep_transition_factorized(s, U, rng, &counters, thin, sweep)
              : sweep_transition(s, U, rng, sweep);
    }
    if (factorized) {
      csv << "# exact_evals=" << counters.exact_evals;
      for (std::size_t lvl = 0; lvl < counters.bound_evals.size(); ++lvl)
        csv << ",bound_evals_l" << lvl + 1 << "="
            << counters.bound_evals[lvl];
      csv << "\n";
    }
    files[c] = csv.str();
  });

  for (std::int64_t c = 0; c < chains; ++c) {
    std::string path = chains == 1 ? cfg.out_prefix() + ".csv"
                                   : cfg.out_prefix() + "_chain" +
                                         std::to_string(c) + ".csv";
    write_file_atomic(path, banner(cfg) + files[c]);
  }
  return 0;
}

int run_validate_invariance(const RunConfig& cfg) {
  DiscretePotential U = zzd_potential(cfg);
  if (U.torus <= 0)
    throw ConfigError("validate-invariance requires a torus domain");
  const bool factorized = cfg.get_int("factorized") != 0;
  SpMat P = build_transition_matrix(
      U, factorized ? KernelMode::Factorized : KernelMode::Plain);
  Eigen::VectorXd mu = gibbs_distribution(U);
  double residual = (SpMat(P.transpose()) * mu - mu).cwiseAbs().sum();
  std::cout << "invariance_l1_residual=" << format_dbl(residual) << "\n";
  return residual < 1e-12 ? 0 : 1;
}

int run_scaling(const RunConfig& cfg) {
  ContinuousPotential H = make_continuous_potential(cfg.get_string("H"), 1);
  auto gaps = scaling_gap(H, cfg.get_list("eps"), cfg.get_real("t"),
                          static_cast<int>(cfg.get_int("samples")),
                          cfg.seed());
  std::ostringstream csv;
  csv << banner(cfg) << "eps,w1\n";
  for (const auto& [eps, w1] : gaps)
    csv << format_dbl(eps) << "," << format_dbl(w1) << "\n";
  write_file_atomic(cfg.out_prefix() + ".csv", csv.str());
  std::cout << csv.str();
  return 0;
}

int run_hybrid(const RunConfig& cfg) {
  LJSystem sys;
  sys.radius = cfg.get_real("r");
  sys.u0 = cfg.get_real("U0");
  sys.split_r = cfg.get_real("R");
  if (cfg.has("xyz_in")) {
    XyzData data = read_xyz(cfg.get_string("xyz_in"));
    sys.particles = data.particles;
    sys.box = data.box;
    sys.positions = data.positions;
  } else {
    sys.particles = static_cast<int>(cfg.get_int("M"));
    sys.box = cfg.get_real("a");
    sys.positions = lattice_configuration(sys.particles, sys.box);
  }

  HybridConfig hc;
  hc.delta = cfg.get_real("delta");
  hc.gamma = cfg.get_real("gamma");
  hc.lambda = cfg.get_real("lambda");
  std::string split = cfg.get_string("split");
  if (split == "full-drift") {
    hc.split = SplitMode::FullDrift;
  } else if (split == "pairwise") {
    hc.split = SplitMode::Pairwise;
  } else if (split == "per-particle") {
    hc.split = SplitMode::PerParticle;
  } else {
    throw ConfigError("hybrid: split must be full-drift|pairwise|per-particle");
  }
  std::string ou = cfg.get_string("ou_mode");
  if (ou == "exact") {
    hc.ou_mode = OuMode::Exact;
  } else if (ou == "paper-literal") {
    hc.ou_mode = OuMode::PaperLiteral;
  } else {
    throw ConfigError("hybrid: ou_mode must be exact|paper-literal");
  }

  const std::int64_t steps = cfg.get_int("steps");
  std::int64_t block = cfg.get_int("block");
  if (block <= 0) block = std::max<std::int64_t>(1, steps / 100);
  std::int64_t stride = cfg.get_int("traj_stride");
  if (stride <= 0) stride = std::max<std::int64_t>(1, steps / 1000);

  LJHybridSampler sampler(sys, hc, cfg.seed());
  sampler.threads = cfg.threads();
  sampler.use_verlet = cfg.get_int("use_verlet") != 0;
  sampler.naive_segment = cfg.get_int("naive_segment") != 0;

  std::ostringstream traj, stats_lines, cost;
  traj << banner(cfg) << "step";
  for (int i = 1; i <= 3 * sys.particles; ++i) traj << ",x" << i;
  for (int i = 1; i <= 3 * sys.particles; ++i) traj << ",v" << i;
  traj << "\n";
  cost << banner(cfg) << "step,f0_evals,gij_evals,proposals,accepts\n";

  auto write_traj_row = [&](std::int64_t n) {
    traj << n;
    const auto& pos = sampler.system().positions;
    for (int i = 0; i < sys.particles; ++i)
      for (int k = 0; k < 3; ++k) traj << "," << format_dbl(pos(k, i));
    for (int i = 0; i < 3 * sys.particles; ++i)
      traj << "," << format_dbl(sampler.velocity()(i));
    traj << "\n";
  };
  auto write_block = [&](std::int64_t n, std::int64_t k) {
    const CostCounters& c = sampler.counters();
    nlohmann::json j{
        {"block", k},
        {"step", n},
        {"kinetic", sampler.kinetic_energy()},
        {"potential", sampler.potential_energy()},
        {"counters",
         {{"f0_evals", c.f0_evals},
          {"gij_evals", c.gij_evals},
          {"jump_proposals", c.jump_proposals},
          {"jumps_accepted", c.jumps_accepted},
          {"refreshments", c.refreshments}}},
        {"seed", cfg.seed()},
        {"config", cfg.config_hash()},
        {"version", kVersion}};
    stats_lines << j.dump() << "\n";
    cost << n << "," << c.f0_evals << "," << c.gij_evals << ","
         << c.jump_proposals << "," << c.jumps_accepted << "\n";
  };

  write_traj_row(0);
  std::int64_t block_index = 0;
  for (std::int64_t n = 1; n <= steps; ++n) {
    sampler.step();
    if (n % stride == 0) write_traj_row(n);
    if (n % block == 0 || n == steps) write_block(n, block_index++);
  }

  const std::string prefix = cfg.out_prefix();
  write_file_atomic(prefix + "_traj.csv", traj.str());
  write_file_atomic(prefix + "_stats.jsonl", stats_lines.str());
  write_file_atomic(prefix + "_cost.csv", cost.str());
  std::cout << "steps=" << steps
            << " H=" << format_dbl(sampler.mean_particle_speed())
            << " C_R=" << format_dbl(sampler.force_split().c_r)
            << " gij_evals=" << sampler.counters().gij_evals << "\n";
  return 0;
}

}  // namespace

int run(const RunConfig& cfg) {
  if (!cfg.seed_given)
    std::cerr << "warning: --seed not given, defaulting to 0; pass an "
                 "explicit seed for publication-grade runs\n";
  try {
    if (cfg.subcommand == "escape") return run_escape(cfg);
    if (cfg.subcommand == "zzd") return run_zzd(cfg);
    if (cfg.subcommand == "validate-invariance")
      return run_validate_invariance(cfg);
    if (cfg.subcommand == "scaling") return run_scaling(cfg);
    if (cfg.subcommand == "hybrid") return run_hybrid(cfg);
    if (cfg.subcommand == "validate")
      return run_validation_suite(cfg.out_prefix(), cfg.seed()) == 0 ? 0 : 1;
    throw ConfigError("unknown subcommand: " + cfg.subcommand);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace kinetic
