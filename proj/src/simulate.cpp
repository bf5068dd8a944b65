#include "mjpot/simulate.hpp"

#include "mjpot/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace mjpot::sim {

namespace {

constexpr std::int64_t kMinSamples = 100;
constexpr std::int64_t kJumpGuard = 50'000'000;

void require_state(const RateGraph& g, int x) {
  if (x < 0 || x >= g.size()) throw UnknownState("#" + std::to_string(x));
}

McEstimate run_estimator(std::int64_t samples, std::uint64_t seed,
                         const std::function<double(Xoshiro256pp&)>& draw) {
  if (samples < kMinSamples)
    throw InputError("need at least " + std::to_string(kMinSamples) + " samples");
  double mean = 0.0;
  double m2 = 0.0;
  for (std::int64_t i = 0; i < samples; ++i) {
    Xoshiro256pp rng = sample_stream(seed, static_cast<std::uint64_t>(i));
    const double value = draw(rng);
    const double delta = value - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (value - mean);
  }
  McEstimate e;
  e.mean = mean;
  e.std_error = std::sqrt(std::max(m2, 0.0) / static_cast<double>(samples - 1) /
                          static_cast<double>(samples));
  e.count = samples;
  e.seed = seed;
  return e;
}

}  // namespace

StopRule StopRule::at_horizon(double T) {
  if (!(T >= 0.0) || !std::isfinite(T)) throw InputError("horizon must be nonnegative and finite");
  StopRule r;
  r.kind = StopKind::Horizon;
  r.horizon = T;
  return r;
}

StopRule StopRule::on_hit(int target) {
  StopRule r;
  r.kind = StopKind::Hit;
  r.target = target;
  return r;
}

StopRule StopRule::on_escape(const std::vector<int>& interior, int n_states) {
  StopRule r;
  r.kind = StopKind::Escape;
  r.inside.assign(n_states, 0);
  for (int x : interior) {
    if (x < 0 || x >= n_states) throw UnknownState("#" + std::to_string(x));
    r.inside[x] = 1;
  }
  return r;
}

Trajectory sample_path(const RateGraph& g, int start, const StopRule& rule, Xoshiro256pp& rng) {
  require_state(g, start);
  Trajectory path;
  path.initial = start;
  path.terminal = start;

  if (rule.kind == StopKind::Hit) {
    require_state(g, rule.target);
    if (start == rule.target) {
      path.reason = Termination::Hit;
      return path;
    }
  }
  if (rule.kind == StopKind::Escape && !rule.inside[start]) {
    path.reason = Termination::Escaped;
    return path;
  }

  int state = start;
  double elapsed = 0.0;
  for (std::int64_t guard = 0; guard < kJumpGuard; ++guard) {
    const double exit = g.exit_rate(state);
    const double holding = rng.exponential(exit);

    if (rule.kind == StopKind::Horizon && elapsed + holding >= rule.horizon) {
      path.terminal = state;
      path.reason = Termination::Horizon;
      path.elapsed = rule.horizon;
      return path;
    }

    // Next state by cumulative scan over the ordered out-arcs.
    const double coin = rng.uniform_open() * exit;
    double acc = 0.0;
    int next = g.arcs()[g.out_arcs(state).back()].to;
    for (int id : g.out_arcs(state)) {
      acc += g.arcs()[id].rate;
      if (coin <= acc) {
        next = g.arcs()[id].to;
        break;
      }
    }

    elapsed += holding;
    path.jumps.push_back({holding, next});
    state = next;

    if (rule.kind == StopKind::Hit && state == rule.target) {
      path.terminal = state;
      path.reason = Termination::Hit;
      path.elapsed = elapsed;
      return path;
    }
    if (rule.kind == StopKind::Escape && !rule.inside[state]) {
      path.terminal = state;
      path.reason = Termination::Escaped;
      path.elapsed = elapsed;
      return path;
    }
  }
  throw Error("path exceeded the jump guard; stopping set looks unreachable");
}

Trajectory sample_path(const RateGraph& g, int start, const StopRule& rule, std::uint64_t seed) {
  Xoshiro256pp rng = sample_stream(seed, 0);
  return sample_path(g, start, rule, rng);
}

McEstimate estimate_mfpt(const RateGraph& g, int from, int to, std::int64_t samples,
                         std::uint64_t seed) {
  require_state(g, from);
  require_state(g, to);
  if (from == to) throw InputError("first-passage estimate needs distinct states");
  const StopRule rule = StopRule::on_hit(to);
  return run_estimator(samples, seed, [&](Xoshiro256pp& rng) {
    return sample_path(g, from, rule, rng).elapsed;
  });
}

McEstimate estimate_stopped_accumulation(const RateGraph& g, int start,
                                         const std::vector<int>& interior, const ScalarField& f,
                                         std::int64_t samples, std::uint64_t seed) {
  require_state(g, start);
  if (f.size() != g.size()) throw InputError("field length does not match the graph");
  const StopRule rule = StopRule::on_escape(interior, g.size());
  if (!rule.inside[start]) throw InputError("start state is outside the interior");
  return run_estimator(samples, seed, [&](Xoshiro256pp& rng) {
    const Trajectory path = sample_path(g, start, rule, rng);
    double acc = 0.0;
    int state = path.initial;
    for (const Jump& jump : path.jumps) {
      acc += jump.holding * f(state);
      state = jump.to;
    }
    return acc;
  });
}

McEstimate estimate_pair_accumulation(const RateGraph& g, const ScalarField& f, int x, int y,
                                      std::int64_t samples, std::uint64_t seed) {
  require_state(g, x);
  require_state(g, y);
  if (x == y) throw InputError("pair accumulation needs distinct states");
  if (f.size() != g.size()) throw InputError("field length does not match the graph");
  const Vector rho = spectral::stationary_distribution(generator(g));
  const Vector fc = f.values.array() - stationary_mean(f.values, rho);
  const StopRule rule = StopRule::on_hit(y);
  return run_estimator(samples, seed, [&](Xoshiro256pp& rng) {
    const Trajectory path = sample_path(g, x, rule, rng);
    double acc = 0.0;
    int state = path.initial;
    for (const Jump& jump : path.jumps) {
      acc += jump.holding * fc(state);
      state = jump.to;
    }
    return acc;
  });
}

McEstimate estimate_excess(const RateGraph& g, const ScalarField& f, int start, double horizon,
                           std::int64_t samples, std::uint64_t seed) {
  require_state(g, start);
  if (f.size() != g.size()) throw InputError("field length does not match the graph");
  const GeneratorMatrix gen = generator(g);
  const double gap = spectral::spectral_gap(gen);
  if (std::isfinite(gap) && gap > 0.0) {
    const double needed = 5.0 / gap;
    if (horizon < needed) throw HorizonTooShort(horizon, needed);
  }
  const Vector rho = spectral::stationary_distribution(gen);
  const Vector fc = f.values.array() - stationary_mean(f.values, rho);
  const StopRule rule = StopRule::at_horizon(horizon);
  return run_estimator(samples, seed, [&](Xoshiro256pp& rng) {
    const Trajectory path = sample_path(g, start, rule, rng);
    double acc = 0.0;
    double used = 0.0;
    int state = path.initial;
    for (const Jump& jump : path.jumps) {
      acc += jump.holding * fc(state);
      used += jump.holding;
      state = jump.to;
    }
    acc += (horizon - used) * fc(state);
    return acc;
  });
}

}  // namespace mjpot::sim
