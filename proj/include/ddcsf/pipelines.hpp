#pragma once

// Experiment pipelines shared by the CLI and the acceptance tests.

#include "ddcsf/config.hpp"
#include "ddcsf/io.hpp"
#include "ddcsf/policy.hpp"
#include "ddcsf/wakesleep.hpp"

#include <span>
#include <vector>

namespace ddcsf {

/// Per-cell data over an R x R lattice of cell centres, row-major in y then x.
struct GridExport {
  int resolution = 0;
  std::vector<Point2> cells;
  /// Cell touches the internal wall (centre within half a cell of it, inclusive).
  std::vector<char> on_wall;
  /// R^2 x d: one scalar (value) or a 2-vector (dynamics arrow) per cell.
  Matrix values;
  std::vector<std::string> value_names;
};

GridExport empty_grid(int resolution, const EnvironmentSpec& env, std::vector<std::string> value_names);
/// Header ix,iy,x,y,on_wall followed by the value names.
CsvTable grid_table(const GridExport& grid);

StateFeatureBasis make_basis(const ExperimentConfig& config);
WakeSleepResult train_ssm(const ExperimentConfig& config);
SsmCheckpoint make_checkpoint(const ExperimentConfig& config, const StateSpaceModel& model);

const std::vector<std::string>& diagnostics_header();
/// Cycle 0 is the initial model.
CsvTable diagnostics_table(const WakeSleepResult& result);

/// decode_mean(T psi(s)) - s at every cell centre.
GridExport dynamics_grid(const StateSpaceModel& model, int resolution, const EnvironmentSpec& env);

struct FilterOutput {
  Trajectory trajectory;
  /// 2 x n decoded posterior means.
  Matrix means;
};

FilterOutput filter_trajectory(const StateSpaceModel& model, Trajectory traj);
const std::vector<std::string>& filter_header();
CsvTable filter_table(const FilterOutput& out);

/// Mean squared distance of decoded posteriors and of raw observations to
/// the latent states.
double posterior_mse(const FilterOutput& out);
double observation_mse(const Trajectory& traj);

AgentContext make_context(const ExperimentConfig& config, std::optional<StateSpaceModel> ssm);

/// Agent for the random-walk policy with U from `sf_method`, fitted on
/// config.gpi.exploration_steps random-walk transitions.
Agent random_walk_value_agent(Condition condition, const AgentContext& context, const ExperimentConfig& config,
                              SfMethod sf_method);

/**
 * V at a probe state. Latent and observed agents read w^T U psi(s); the
 * inferred agent holds still at s, filters config.burn_in noisy
 * observations from the prior and reads w^T U mu, averaged over
 * config.burn_in_repeats runs.
 */
double probe_value(const Agent& agent, const AgentContext& context, const Point2& s, const ValueGridConfig& config,
                   const EnvironmentSpec& env, Rng& rng);

/// probe_value over the lattice; cell i uses stream seeds.derive("value-grid", i).
GridExport value_grid(const Agent& agent, const AgentContext& context, const ValueGridConfig& config,
                      const EnvironmentSpec& env, const SeedSequence& seeds);

/// Probe pairs at equal distance from the goal, `first` on the goal's side of
/// the internal wall and `second` behind it.
std::vector<std::pair<Point2, Point2>> wall_probe_pairs(const RewardField& field, const EnvironmentSpec& env,
                                                        int min_pairs = 20);

struct WallContrast {
  double mean_same = 0.0;
  double mean_far = 0.0;
  /// (mean_same - mean_far) / (|mean_same| + |mean_far|).
  double normalized = 0.0;
  int pairs = 0;
};

WallContrast wall_contrast(const Agent& agent, const AgentContext& context,
                           std::span<const std::pair<Point2, Point2>> pairs, const ValueGridConfig& config,
                           const EnvironmentSpec& env, const SeedSequence& seeds);

const std::vector<std::string>& returns_header();
CsvTable returns_table(std::span<const double> returns);

/// Equal-width bins over [lo, hi]; the last bin is closed.
CsvTable histogram_table(std::span<const double> values, double lo, double hi, int bins);

double mean(std::span<const double> v);

}  // namespace ddcsf
