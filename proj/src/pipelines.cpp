#include "ddcsf/pipelines.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace ddcsf {

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

GridExport empty_grid(int resolution, const EnvironmentSpec& env, std::vector<std::string> value_names) {
  if (resolution < 1) throw ConfigError("grid resolution must be >= 1");
  GridExport g;
  g.resolution = resolution;
  g.cells = grid_points(resolution);
  g.on_wall.resize(g.cells.size());
  const double half = 0.5 / resolution;
  for (std::size_t i = 0; i < g.cells.size(); ++i)
    g.on_wall[i] = distance_to_segment(g.cells[i], env.internal_wall) <= half + 1e-12 ? 1 : 0;
  g.values = Matrix::Zero(static_cast<Eigen::Index>(g.cells.size()), static_cast<Eigen::Index>(value_names.size()));
  g.value_names = std::move(value_names);
  return g;
}

CsvTable grid_table(const GridExport& g) {
  CsvTable t{{"ix", "iy", "x", "y", "on_wall"}, {}};
  t.header.insert(t.header.end(), g.value_names.begin(), g.value_names.end());
  const int r = g.resolution;
  for (std::size_t i = 0; i < g.cells.size(); ++i) {
    const auto idx = static_cast<int>(i);
    std::vector<std::string> row{std::to_string(idx % r), std::to_string(idx / r), format_double(g.cells[i].x()),
                                 format_double(g.cells[i].y()), g.on_wall[i] ? "1" : "0"};
    for (Eigen::Index j = 0; j < g.values.cols(); ++j)
      row.push_back(format_double(g.values(static_cast<Eigen::Index>(i), j)));
    t.add_row(std::move(row));
  }
  return t;
}

StateFeatureBasis make_basis(const ExperimentConfig& config) {
  return StateFeatureBasis::from_spec(config.basis, config.environment.internal_wall);
}

WakeSleepResult train_ssm(const ExperimentConfig& config) {
  config.validate();
  return run_wake_sleep(config.wake_sleep, config.environment, make_basis(config));
}

SsmCheckpoint make_checkpoint(const ExperimentConfig& config, const StateSpaceModel& model) {
  return SsmCheckpoint{config.basis, config.environment, model};
}

const std::vector<std::string>& diagnostics_header() {
  static const std::vector<std::string> h{"cycle", "sleep_residual", "wake_pred_error"};
  return h;
}

CsvTable diagnostics_table(const WakeSleepResult& result) {
  CsvTable t{diagnostics_header(), {}};
  auto add = [&](const CycleDiagnostics& d) {
    t.add_row({std::to_string(d.cycle), format_double(d.sleep_residual), format_double(d.wake_pred_error)});
  };
  add(result.initial);
  for (const auto& d : result.diagnostics) add(d);
  return t;
}

GridExport dynamics_grid(const StateSpaceModel& model, int resolution, const EnvironmentSpec& env) {
  model.check_shapes();
  GridExport g = empty_grid(resolution, env, {"dx", "dy"});
  const Matrix feats = model.basis.encode_batch(g.cells);
  const Matrix next = model.decoder.alpha * (model.transition.T * feats);
  for (std::size_t i = 0; i < g.cells.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    g.values.row(r) = (next.col(r) - g.cells[i]).transpose();
  }
  return g;
}

FilterOutput filter_trajectory(const StateSpaceModel& model, Trajectory traj) {
  model.check_shapes();
  traj.validate();
  const Matrix mus = run_filter(traj.observed, model.prior, model.recognition, model.transition, model.basis);
  FilterOutput out{std::move(traj), model.decoder.alpha * mus};
  return out;
}

const std::vector<std::string>& filter_header() {
  static const std::vector<std::string> h{"t", "sx", "sy", "ox", "oy", "mx", "my"};
  return h;
}

CsvTable filter_table(const FilterOutput& out) {
  CsvTable t{filter_header(), {}};
  const Trajectory& tr = out.trajectory;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    t.add_row({std::to_string(i), format_double(tr.latent[i].x()), format_double(tr.latent[i].y()),
               format_double(tr.observed[i].x()), format_double(tr.observed[i].y()), format_double(out.means(0, c)),
               format_double(out.means(1, c))});
  }
  return t;
}

double posterior_mse(const FilterOutput& out) {
  const Trajectory& tr = out.trajectory;
  if (tr.size() == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < tr.size(); ++i)
    sum += (out.means.col(static_cast<Eigen::Index>(i)) - tr.latent[i]).squaredNorm();
  return sum / static_cast<double>(tr.size());
}

double observation_mse(const Trajectory& traj) {
  if (traj.size() == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) sum += (traj.observed[i] - traj.latent[i]).squaredNorm();
  return sum / static_cast<double>(traj.size());
}

AgentContext make_context(const ExperimentConfig& config, std::optional<StateSpaceModel> ssm) {
  return AgentContext{make_basis(config), ActionFeatureBasis::from_spec(config.basis), std::move(ssm)};
}

Agent random_walk_value_agent(Condition condition, const AgentContext& context, const ExperimentConfig& config,
                              SfMethod sf_method) {
  GpiConfig gc = config.gpi;
  gc.sf_method = sf_method;
  const SeedSequence seeds = SeedSequence(config.seed).child("value-grid/explore");
  const std::vector<Episode> eps =
      explore(condition, context, config.environment, config.reward, static_cast<std::size_t>(gc.exploration_steps),
              static_cast<std::size_t>(gc.steps_per_episode), seeds);
  return random_walk_agent(condition, context, eps, gc, config.environment);
}

double probe_value(const Agent& agent, const AgentContext& context, const Point2& s, const ValueGridConfig& config,
                   const EnvironmentSpec& env, Rng& rng) {
  FeatureTracker tracker(agent, context);
  if (agent.condition != Condition::inferred) return value(agent.reward, agent.sf, tracker.update(s, s));
  double total = 0.0;
  for (int rep = 0; rep < config.burn_in_repeats; ++rep) {
    tracker.reset();
    for (int t = 0; t < config.burn_in; ++t) tracker.update(s, observe(s, env, rng));
    total += value(agent.reward, agent.sf, tracker.current());
  }
  return total / config.burn_in_repeats;
}

GridExport value_grid(const Agent& agent, const AgentContext& context, const ValueGridConfig& config,
                      const EnvironmentSpec& env, const SeedSequence& seeds) {
  config.validate();
  agent.check_shapes();
  GridExport g = empty_grid(config.resolution, env, {"value"});
  const auto n = static_cast<long long>(g.cells.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) {
    Rng rng = seeds.stream("value-grid", static_cast<std::uint64_t>(i));
    g.values(i, 0) = probe_value(agent, context, g.cells[static_cast<std::size_t>(i)], config, env, rng);
  }
  return g;
}

std::vector<std::pair<Point2, Point2>> wall_probe_pairs(const RewardField& field, const EnvironmentSpec& env,
                                                        int min_pairs) {
  const Segment& w = env.internal_wall;
  // Only vertical walls have a well-defined left/right split.
  if (w.a.x() != w.b.x()) throw ConfigError("wall_probe_pairs: internal wall must be vertical");
  const double wx = w.a.x();
  const double ylo = std::min(w.a.y(), w.b.y()), yhi = std::max(w.a.y(), w.b.y());
  const Point2 g = field.goal_center;
  const double side = g.x() < wx ? -1.0 : 1.0;
  const double margin = 0.05;
  auto behind = [&](const Point2& p) {
    return side * (p.x() - wx) < -margin && p.y() > ylo + margin && p.y() < yhi - margin && p.x() > margin &&
           p.x() < 1.0 - margin;
  };
  auto same = [&](const Point2& p) {
    return side * (p.x() - wx) > margin && p.x() > margin && p.x() < 1.0 - margin && p.y() > margin &&
           p.y() < 1.0 - margin;
  };
  constexpr int kAngles = 144;
  std::vector<std::pair<Point2, Point2>> pairs;
  const double dmin = std::abs(g.x() - wx) + margin + 0.02;
  for (double d = dmin; d < 1.0 && static_cast<int>(pairs.size()) < 4 * min_pairs; d += 0.03) {
    for (int k = 0; k < kAngles; k += 3) {
      const double th = 2.0 * std::numbers::pi * k / kAngles;
      const Point2 q = g + d * Point2(std::cos(th), std::sin(th));
      if (!behind(q)) continue;
      // Partner on the goal's side closest to the mirror image of q.
      const Point2 mirror(2.0 * g.x() - q.x(), q.y());
      std::optional<Point2> best;
      for (int m = 0; m < kAngles; ++m) {
        const double ph = 2.0 * std::numbers::pi * m / kAngles;
        const Point2 p = g + d * Point2(std::cos(ph), std::sin(ph));
        if (same(p) && (!best || (p - mirror).norm() < (*best - mirror).norm())) best = p;
      }
      if (best) pairs.emplace_back(*best, q);
    }
  }
  if (static_cast<int>(pairs.size()) < min_pairs)
    throw ConfigError("wall_probe_pairs: only " + std::to_string(pairs.size()) + " pairs for this goal");
  return pairs;
}

WallContrast wall_contrast(const Agent& agent, const AgentContext& context,
                           std::span<const std::pair<Point2, Point2>> pairs, const ValueGridConfig& config,
                           const EnvironmentSpec& env, const SeedSequence& seeds) {
  WallContrast c;
  c.pairs = static_cast<int>(pairs.size());
  if (pairs.empty()) return c;
  std::vector<double> same(pairs.size()), far(pairs.size());
  const auto n = static_cast<long long>(pairs.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    Rng rng_same = seeds.stream("probe/same", u);
    Rng rng_far = seeds.stream("probe/far", u);
    same[u] = probe_value(agent, context, pairs[u].first, config, env, rng_same);
    far[u] = probe_value(agent, context, pairs[u].second, config, env, rng_far);
  }
  c.mean_same = mean(same);
  c.mean_far = mean(far);
  const double denom = std::abs(c.mean_same) + std::abs(c.mean_far);
  c.normalized = denom > 0.0 ? (c.mean_same - c.mean_far) / denom : 0.0;
  return c;
}

const std::vector<std::string>& returns_header() {
  static const std::vector<std::string> h{"episode", "return"};
  return h;
}

CsvTable returns_table(std::span<const double> returns) {
  CsvTable t{returns_header(), {}};
  for (std::size_t i = 0; i < returns.size(); ++i) t.add_row({std::to_string(i), format_double(returns[i])});
  return t;
}

CsvTable histogram_table(std::span<const double> values, double lo, double hi, int bins) {
  if (bins < 1 || !(hi > lo)) throw ConfigError("histogram: need bins >= 1 and hi > lo");
  std::vector<long> counts(static_cast<std::size_t>(bins), 0);
  const double width = (hi - lo) / bins;
  for (double v : values) {
    if (v < lo || v > hi) continue;
    auto b = static_cast<int>((v - lo) / width);
    counts[static_cast<std::size_t>(std::min(b, bins - 1))]++;
  }
  CsvTable t{{"bin_lo", "bin_hi", "count"}, {}};
  for (int b = 0; b < bins; ++b)
    t.add_row({format_double(lo + b * width), format_double(b + 1 == bins ? hi : lo + (b + 1) * width),
               std::to_string(counts[static_cast<std::size_t>(b)])});
  return t;
}

}  // namespace ddcsf
