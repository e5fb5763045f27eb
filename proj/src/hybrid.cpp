#include "kinetic/hybrid.hpp"

#include <cmath>

#include "kinetic/errors.hpp"
#include "kinetic/parallel.hpp"

namespace kinetic {

namespace {

constexpr std::uint64_t kTagKickOne = 1;
constexpr std::uint64_t kTagSegment = 2;
constexpr std::uint64_t kTagParticle = 3;
constexpr std::uint64_t kTagKickTwo = 4;
constexpr std::uint64_t kBounceCap = 1000000;

// Time of the last point of a rate-lambda Poisson process on [0, delta],
// or 0 when there is none (looking backwards from delta, the gap to the
// last point is Exp(lambda)).
double last_refresh_time(double delta, double lambda, RngStream& rng,
                         bool& refreshed) {
  refreshed = false;
  if (lambda <= 0.0) return 0.0;
  double gap = rng.exponential() / lambda;
  if (gap >= delta) return 0.0;
  refreshed = true;
  return delta - gap;
}

}  // namespace

void HybridConfig::validate() const {
  if (!(delta > 0.0)) throw ConfigError("hybrid: delta must be positive");
  if (gamma < 0.0 || lambda < 0.0)
    throw ConfigError("hybrid: gamma and lambda must be >= 0");
}

Eigen::VectorXd ou_half_kick(const Eigen::VectorXd& v,
                             const Eigen::VectorXd& f0_at_half_drift,
                             const HybridConfig& cfg, RngStream& rng) {
  if (v.size() != f0_at_half_drift.size())
    throw ContractViolation("ou_half_kick: dimension mismatch");
  if (cfg.gamma == 0.0) return v - 0.5 * cfg.delta * f0_at_half_drift;
  double contraction = std::exp(-cfg.gamma * cfg.delta / 2.0);
  double variance = cfg.ou_mode == OuMode::Exact
                        ? 1.0 - std::exp(-cfg.gamma * cfg.delta)
                        : 1.0 - contraction;
  double amplitude = std::sqrt(variance);
  Eigen::VectorXd out(v.size());
  for (int i = 0; i < v.size(); ++i) {
    out(i) = contraction * v(i) - (1.0 - contraction) * f0_at_half_drift(i) +
             amplitude * rng.gaussian();
  }
  return out;
}

JumpSegmentResult jump_segment_naive(Eigen::VectorXd v,
                                     const std::vector<Eigen::VectorXd>& fields,
                                     double delta, double lambda,
                                     RngStream& rng) {
  JumpSegmentResult out;
  double t = last_refresh_time(delta, lambda, rng, out.refreshed);
  if (out.refreshed) {
    for (int i = 0; i < v.size(); ++i) v(i) = rng.gaussian();
  }
  while (true) {
    double first = std::numeric_limits<double>::infinity();
    int which = -1;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      double rate = std::max(fields[i].dot(v), 0.0);
      if (rate <= 0.0) continue;
      double wait = rng.exponential() / rate;
      if (wait < first) {
        first = wait;
        which = static_cast<int>(i);
      }
    }
    if (which < 0 || t + first > delta) break;
    t += first;
    v = reflect(v, fields[which]);
    if (++out.bounces > kBounceCap)
      throw RunawayError("jump segment: bounce cap exceeded");
  }
  out.v = std::move(v);
  return out;
}

Eigen::VectorXd lj_jump_segment_naive(const ForceSplit& split,
                                      const Eigen::Matrix3Xd& positions,
                                      Eigen::VectorXd v,
                                      const HybridConfig& cfg, RngStream& rng,
                                      CostCounters& counters) {
  const int m = split.particles;
  bool refreshed = false;
  double t0 = last_refresh_time(cfg.delta, cfg.lambda, rng, refreshed);
  if (refreshed) {
    ++counters.refreshments;
    for (int i = 0; i < v.size(); ++i) v(i) = rng.gaussian();
  }
  // All pair fields are evaluated up front: that is the point of the naive
  // construction.  Particles evolve independently at frozen positions.
  std::vector<std::vector<Eigen::Vector3d>> fields(m);
  for (int i = 0; i < m; ++i) {
    fields[i].reserve(m - 1);
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      fields[i].push_back(split.pair_field(positions, i, j));
      ++counters.gij_evals;
    }
  }
  for (int i = 0; i < m; ++i) {
    Eigen::Vector3d w = v.segment<3>(3 * i);
    double t = t0;
    std::uint64_t bounces = 0;
    while (true) {
      double first = std::numeric_limits<double>::infinity();
      int which = -1;
      for (std::size_t k = 0; k < fields[i].size(); ++k) {
        double rate = std::max(fields[i][k].dot(w), 0.0);
        if (rate <= 0.0) continue;
        double wait = rng.exponential() / rate;
        if (wait < first) {
          first = wait;
          which = static_cast<int>(k);
        }
      }
      if (which < 0 || t + first > cfg.delta) break;
      t += first;
      w = reflect(w, fields[i][which]);
      ++counters.jumps_accepted;
      if (++bounces > kBounceCap)
        throw RunawayError("jump segment: bounce cap exceeded");
    }
    v.segment<3>(3 * i) = w;
  }
  return v;
}

Eigen::VectorXd lj_jump_segment_thinned(const ForceSplit& split,
                                        const Eigen::Matrix3Xd& positions,
                                        Eigen::VectorXd v,
                                        const HybridConfig& cfg,
                                        std::uint64_t seed,
                                        std::uint64_t step_index, int threads,
                                        CostCounters& counters) {
  const int m = split.particles;
  RngStream refresh_stream =
      RngStream::derive(seed, {kTagSegment, step_index});
  bool refreshed = false;
  double t0 = last_refresh_time(cfg.delta, cfg.lambda, refresh_stream,
                                refreshed);
  if (refreshed) {
    ++counters.refreshments;
    for (int i = 0; i < v.size(); ++i) v(i) = refresh_stream.gaussian();
  }
  const double horizon = cfg.delta - t0;
  const bool per_particle = cfg.split == SplitMode::PerParticle;
  const double bound_rate =
      per_particle ? static_cast<double>(m) * split.c_r : split.c_r;

  struct Local {
    std::uint64_t proposals = 0, evals = 0, accepts = 0;
  };
  std::vector<Local> local(m);

  parallel_for(m, threads, [&](std::size_t pi) {
    const int i = static_cast<int>(pi);
    RngStream ps = RngStream::derive(
        seed, {kTagParticle, step_index, static_cast<std::uint64_t>(i)});
    Eigen::Vector3d w = v.segment<3>(3 * i);
    const double speed = w.norm();
    // |W_i| is conserved by reflections, so the proposal count can be drawn
    // up front.
    std::uint64_t k_i =
        ps.poisson(speed * split.c_r * static_cast<double>(m) * horizon);
    local[pi].proposals = k_i;
    for (std::uint64_t k = 0; k < k_i; ++k) {
      Eigen::Vector3d field;
      double u;
      if (per_particle) {
        u = ps.uniform();
        field.setZero();
        for (int jj = 0; jj < m; ++jj) {
          if (jj == i) continue;
          field += split.pair_field(positions, i, jj);
          ++local[pi].evals;
        }
      } else {
        int j = static_cast<int>(ps.uniform_index(m));
        u = ps.uniform();
        if (j == i) continue;  // discarded, no field evaluated
        field = split.pair_field(positions, i, j);
        ++local[pi].evals;
      }
      double ratio = speed == 0.0
                         ? 0.0
                         : std::max(w.dot(field), 0.0) / (speed * bound_rate);
      if (ratio > 1.0 + 1e-9)
        throw BoundViolation("thinned jump segment: C_R bound violated");
      if (u <= ratio) {
        w = reflect(w, field);
        ++local[pi].accepts;
      }
    }
    v.segment<3>(3 * i) = w;
  });

  for (const Local& l : local) {
    counters.jump_proposals += l.proposals;
    counters.gij_evals += l.evals;
    counters.jumps_accepted += l.accepts;
  }
  return v;
}

LJHybridSampler::LJHybridSampler(LJSystem sys, HybridConfig cfg,
                                 std::uint64_t seed)
    : sys_(std::move(sys)), cfg_(cfg), seed_(seed) {
  cfg_.validate();
  split_ = lj_force_split(sys_);
  v_ = Eigen::VectorXd::Zero(3 * sys_.particles);
  RngStream init = RngStream::derive(seed_, {0});
  for (int i = 0; i < v_.size(); ++i) v_(i) = init.gaussian();
  wrap_positions();
}

void LJHybridSampler::wrap_positions() {
  for (int i = 0; i < sys_.particles; ++i)
    for (int k = 0; k < 3; ++k) {
      double& c = sys_.positions(k, i);
      c -= sys_.box * std::floor(c / sys_.box);
    }
}

double LJHybridSampler::mean_particle_speed() const {
  if (step_ == 0) return 0.0;
  return speed_accum_ /
         (static_cast<double>(step_) * static_cast<double>(sys_.particles));
}

void LJHybridSampler::step() {
  const double half = 0.5 * cfg_.delta;
  // 1. half transport
  for (int i = 0; i < sys_.particles; ++i)
    sys_.positions.col(i) += half * v_.segment<3>(3 * i);
  wrap_positions();

  // 2. half kick at the frozen half-drifted positions
  Eigen::VectorXd f0;
  if (use_verlet) {
    bool rebuild = step_ % static_cast<std::uint64_t>(verlet_every) == 0;
    if (!rebuild) {
      // displacement guard: a particle moving more than half the skin since
      // the last build could cross into range undetected
      double skin = 0.3 * sys_.split_r;
      double worst = 0.0;
      for (int i = 0; i < sys_.particles; ++i) {
        Eigen::Vector3d d = min_image(
            sys_.box, sys_.positions.col(i) - list_positions_.col(i));
        worst = std::max(worst, d.norm());
      }
      rebuild = worst > 0.5 * skin;
    }
    if (rebuild) {
      list_.build(sys_.box, sys_.positions,
                  sys_.split_r + 0.3 * sys_.split_r);
      list_positions_ = sys_.positions;
    }
    f0 = split_.f0(sys_.positions, list_);
  } else {
    f0 = split_.f0(sys_.positions);
  }
  ++counters_.f0_evals;
  RngStream kick1 = RngStream::derive(seed_, {kTagKickOne, step_});
  v_ = ou_half_kick(v_, f0, cfg_, kick1);

  for (int i = 0; i < sys_.particles; ++i)
    speed_accum_ += v_.segment<3>(3 * i).norm();

  // 3. jump segment at frozen positions
  if (cfg_.split != SplitMode::FullDrift) {
    if (naive_segment) {
      RngStream seg = RngStream::derive(seed_, {kTagSegment, step_});
      v_ = lj_jump_segment_naive(split_, sys_.positions, v_, cfg_, seg,
                                 counters_);
    } else {
      v_ = lj_jump_segment_thinned(split_, sys_.positions, v_, cfg_, seed_,
                                   step_, threads, counters_);
    }
  } else if (cfg_.lambda > 0.0) {
    RngStream seg = RngStream::derive(seed_, {kTagSegment, step_});
    bool refreshed = false;
    last_refresh_time(cfg_.delta, cfg_.lambda, seg, refreshed);
    if (refreshed) {
      ++counters_.refreshments;
      for (int i = 0; i < v_.size(); ++i) v_(i) = seg.gaussian();
    }
  }

  // 4. second half kick, same frozen positions and forces
  RngStream kick2 = RngStream::derive(seed_, {kTagKickTwo, step_});
  v_ = ou_half_kick(v_, f0, cfg_, kick2);

  // 5. half transport
  for (int i = 0; i < sys_.particles; ++i)
    sys_.positions.col(i) += half * v_.segment<3>(3 * i);
  wrap_positions();
  ++step_;
}

GenericHybridSampler::GenericHybridSampler(Eigen::VectorXd x0,
                                           Eigen::VectorXd v0, Field f0,
                                           std::vector<Field> fields,
                                           HybridConfig cfg,
                                           std::uint64_t seed)
    : x_(std::move(x0)),
      v_(std::move(v0)),
      f0_(std::move(f0)),
      fields_(std::move(fields)),
      cfg_(cfg),
      seed_(seed) {
  cfg_.validate();
  if (x_.size() != v_.size())
    throw ContractViolation("hybrid: position/velocity size mismatch");
}

void GenericHybridSampler::step() {
  const double half = 0.5 * cfg_.delta;
  x_ += half * v_;

  Eigen::VectorXd f0 = f0_ ? f0_(x_) : Eigen::VectorXd::Zero(x_.size());
  ++counters_.f0_evals;
  RngStream kick1 = RngStream::derive(seed_, {kTagKickOne, step_});
  v_ = ou_half_kick(v_, f0, cfg_, kick1);

  std::vector<Eigen::VectorXd> values;
  values.reserve(fields_.size());
  for (const auto& field : fields_) {
    values.push_back(field(x_));
    ++counters_.gij_evals;
  }
  RngStream seg = RngStream::derive(seed_, {kTagSegment, step_});
  JumpSegmentResult jump =
      jump_segment_naive(v_, values, cfg_.delta, cfg_.lambda, seg);
  v_ = jump.v;
  counters_.jumps_accepted += jump.bounces;
  if (jump.refreshed) ++counters_.refreshments;

  RngStream kick2 = RngStream::derive(seed_, {kTagKickTwo, step_});
  v_ = ou_half_kick(v_, f0, cfg_, kick2);

  x_ += half * v_;
  ++step_;
}

}  // namespace kinetic
