#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "kinetic/config.hpp"

namespace {

// All subcommands funnel through the same key=value text representation, so
// flag input and config-file input share one validation path.
int dispatch(const std::string& subcommand, const std::string& text) {
  kinetic::ParseResult parsed = kinetic::parse_config(text, subcommand);
  if (!parsed.ok()) {
    for (const auto& issue : parsed.errors) {
      if (issue.line > 0)
        std::cerr << "config error (line " << issue.line
                  << "): " << issue.message << "\n";
      else
        std::cerr << "config error: " << issue.message << "\n";
    }
    return 2;
  }
  return kinetic::run(parsed.config);
}

std::string kv(const std::string& key, const std::string& value) {
  return value.empty() ? std::string() : key + "=" + value + "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kinetic walk samplers and their validation engine"};
  app.require_subcommand(1);

  std::string potential, order = "id", hname, split = "pairwise";
  std::string ou_mode = "exact", config_path, out_prefix, thin = "none";
  std::vector<double> eps;
  std::int64_t wa = 0, wb = 0, alpha = 0, beta = 0;
  std::int64_t samples = 10000, steps = 1000, chains = 1, dim = 1, torus = 0;
  std::int64_t seed = 0, threads = 0;
  bool factorized = false;
  double t_probe = 1.0;
  bool seed_given = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "RNG seed")->each([&](const std::string&) {
      seed_given = true;
    });
    cmd->add_option("--threads", threads, "worker threads (0 = env/1)");
    cmd->add_option("--out", out_prefix, "output file prefix");
  };
  auto common_text = [&]() {
    std::ostringstream text;
    if (seed_given) text << "seed=" << seed << "\n";
    text << "threads=" << threads << "\n" << kv("out_prefix", out_prefix);
    return text.str();
  };

  CLI::App* escape = app.add_subcommand("escape", "metastable exit times");
  escape->add_option("--potential", potential)->required();
  escape->add_option("--a", wa)->required();
  escape->add_option("--b", wb)->required();
  escape->add_option("--alpha", alpha);
  escape->add_option("--beta", beta);
  escape->add_option("--eps", eps, "temperature (repeatable)")->required();
  escape->add_option("--samples", samples);
  add_common(escape);

  CLI::App* zzd = app.add_subcommand("zzd", "lattice walk trajectories");
  zzd->add_option("--dim", dim);
  zzd->add_option("--potential", potential)->required();
  zzd->add_option("--torus", torus);
  zzd->add_option("--steps", steps);
  zzd->add_option("--chains", chains);
  zzd->add_flag("--factorized", factorized);
  zzd->add_option("--order", order)->check(CLI::IsMember({"id", "random"}));
  zzd->add_option("--thin", thin, "bound chain for lazy acceptance")
      ->check(CLI::IsMember({"none", "half"}));
  add_common(zzd);

  CLI::App* vinv = app.add_subcommand("validate-invariance",
                                      "matrix-oracle invariance residual");
  vinv->add_option("--dim", dim);
  vinv->add_option("--potential", potential)->required();
  vinv->add_option("--torus", torus)->required();
  vinv->add_flag("--factorized", factorized);
  add_common(vinv);

  CLI::App* scaling = app.add_subcommand("scaling",
                                         "rescaled-walk vs process gap");
  scaling->add_option("--H", hname)->required();
  scaling->add_option("--eps", eps, "scale (repeatable)")->required();
  scaling->add_option("--t", t_probe)->required();
  scaling->add_option("--samples", samples);
  add_common(scaling);

  CLI::App* hybrid = app.add_subcommand("hybrid", "jump/diffusion sampler");
  hybrid->add_option("--config", config_path, "key=value config file")
      ->required()
      ->check(CLI::ExistingFile);

  CLI::App* validate = app.add_subcommand("validate", "built-in oracle suite");
  add_common(validate);

  CLI11_PARSE(app, argc, argv);

  auto join_eps = [&eps]() {
    std::ostringstream s;
    for (std::size_t i = 0; i < eps.size(); ++i)
      s << (i ? "," : "") << kinetic::format_dbl(eps[i]);
    return s.str();
  };

  if (escape->parsed()) {
    std::ostringstream text;
    text << common_text() << "potential=" << potential << "\na=" << wa
         << "\nb=" << wb << "\nalpha=" << alpha << "\nbeta=" << beta
         << "\neps=" << join_eps() << "\nsamples=" << samples << "\n";
    return dispatch("escape", text.str());
  }
  if (zzd->parsed()) {
    std::ostringstream text;
    text << common_text() << "dim=" << dim << "\npotential=" << potential
         << "\ntorus=" << torus << "\nsteps=" << steps
         << "\nchains=" << chains << "\nfactorized=" << (factorized ? 1 : 0)
         << "\norder=" << order << "\nthin=" << thin << "\n";
    return dispatch("zzd", text.str());
  }
  if (vinv->parsed()) {
    std::ostringstream text;
    text << common_text() << "dim=" << dim << "\npotential=" << potential
         << "\ntorus=" << torus << "\nfactorized=" << (factorized ? 1 : 0)
         << "\n";
    return dispatch("validate-invariance", text.str());
  }
  if (scaling->parsed()) {
    std::ostringstream text;
    text << common_text() << "H=" << hname << "\neps=" << join_eps()
         << "\nt=" << kinetic::format_dbl(t_probe)
         << "\nsamples=" << samples << "\n";
    return dispatch("scaling", text.str());
  }
  if (hybrid->parsed()) {
    std::ifstream in(config_path);
    std::ostringstream text;
    text << in.rdbuf();
    return dispatch("hybrid", text.str());
  }
  if (validate->parsed()) {
    return dispatch("validate", common_text());
  }
  return 2;
}
