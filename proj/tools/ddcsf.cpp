#include "ddcsf/config.hpp"
#include "ddcsf/io.hpp"
#include "ddcsf/pipelines.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

using namespace ddcsf;
namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string output_dir;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "JSON experiment config")->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "Master seed (overrides the config)");
  cmd->add_option("--output-dir", c.output_dir, "Output directory (default: $DDCSF_OUTPUT_DIR or .)");
}

ExperimentConfig base_config(const Common& c) {
  ExperimentConfig cfg = c.config_path.empty() ? ExperimentConfig{} : load_config(c.config_path);
  if (c.seed) cfg.set_seed(*c.seed);
  if (!c.output_dir.empty()) cfg.output_dir = c.output_dir;
  return cfg;
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
  const fs::path dir = resolve_output_dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return (dir / name).string();
}

SsmCheckpoint load_ssm(const std::string& path) { return ssm_from_json(read_text(path)); }

// Basis and environment come from the checkpoint when one is given.
void adopt_checkpoint(ExperimentConfig& cfg, const SsmCheckpoint& ckpt) {
  cfg.basis = ckpt.basis;
  cfg.environment.internal_wall = ckpt.environment.internal_wall;
  cfg.environment.step_length = ckpt.environment.step_length;
}

std::optional<StateSpaceModel> optional_ssm(ExperimentConfig& cfg, const std::string& path, bool required,
                                            const char* why) {
  if (path.empty()) {
    if (required) throw ConfigError(std::string(why) + " needs --checkpoint");
    return std::nullopt;
  }
  SsmCheckpoint ckpt = load_ssm(path);
  adopt_checkpoint(cfg, ckpt);
  return std::move(ckpt.model);
}

CsvTable histogram_for(const std::vector<double>& returns, const ExperimentConfig& cfg) {
  const double extreme = cfg.reward.magnitude * cfg.gpi.steps_per_episode;
  double lo = std::min(0.0, extreme), hi = std::max(0.0, extreme);
  if (!(hi > lo)) hi = lo + 1.0;
  return histogram_table(returns, lo, hi, 20);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributional successor features in a partially observed box world"};
  app.require_subcommand(1);

  // train-ssm
  Common tc;
  std::optional<int> cycles;
  std::optional<long> sleep_samples, wake_obs;
  std::optional<std::string> mode;
  auto* train = app.add_subcommand("train-ssm", "Wake-sleep training of the DDC state-space model");
  add_common(train, tc);
  train->add_option("--cycles", cycles, "Wake-sleep cycles");
  train->add_option("--sleep-samples", sleep_samples, "Sleep samples per cycle");
  train->add_option("--wake-observations", wake_obs, "Wake observations per cycle");
  train->add_option("--mode", mode, "Update mode: batch, minibatch or online");

  // export-dynamics
  Common ec;
  std::string dyn_ckpt;
  std::optional<int> dyn_res;
  auto* dyn = app.add_subcommand("export-dynamics", "Mean-dynamics arrows on a lattice");
  add_common(dyn, ec);
  dyn->add_option("--checkpoint", dyn_ckpt, "SSM checkpoint")->required();
  dyn->add_option("--resolution", dyn_res, "Lattice resolution R (R^2 rows)");

  // filter
  Common fc;
  std::string filt_ckpt, filt_traj;
  std::optional<long> filt_steps;
  std::optional<double> filt_noise;
  auto* filt = app.add_subcommand("filter", "Posterior means along a trajectory");
  add_common(filt, fc);
  filt->add_option("--checkpoint", filt_ckpt, "SSM checkpoint")->required();
  filt->add_option("--trajectory", filt_traj, "Trajectory CSV (t,sx,sy,ox,oy,action,reward)");
  filt->add_option("--steps", filt_steps, "Length of the fresh rollout when no trajectory is given");
  filt->add_option("--obs-noise", filt_noise, "Observation noise of the fresh rollout");

  // value-grid
  Common vc;
  std::string val_ckpt, val_cond = "latent";
  std::optional<std::string> val_method;
  std::optional<int> val_res, val_burn;
  std::vector<double> val_goal;
  std::optional<double> val_radius, val_mag;
  auto* val = app.add_subcommand("value-grid", "Values under the random-walk policy on a lattice");
  add_common(val, vc);
  val->add_option("--checkpoint", val_ckpt, "SSM checkpoint (required for inferred)");
  val->add_option("--condition", val_cond, "latent, inferred or observed");
  val->add_option("--sf-method", val_method, "analytic, fixed-point, td-sleep or td-wake");
  val->add_option("--resolution", val_res, "Lattice resolution R");
  val->add_option("--burn-in", val_burn, "Filtering steps at each probe point (inferred)");
  val->add_option("--goal", val_goal, "Goal centre x y")->expected(2);
  val->add_option("--goal-radius", val_radius, "Goal radius");
  val->add_option("--magnitude", val_mag, "Reward magnitude");

  // gpi
  Common gc;
  std::string gpi_ckpt, gpi_cond = "latent";
  std::optional<int> gpi_cycles, gpi_eps;
  std::optional<std::string> gpi_method;
  auto* gpi = app.add_subcommand("gpi", "Generalized policy iteration with successor features");
  add_common(gpi, gc);
  gpi->add_option("--checkpoint", gpi_ckpt, "SSM checkpoint (required for inferred)");
  gpi->add_option("--condition", gpi_cond, "latent, inferred or observed");
  gpi->add_option("--cycles", gpi_cycles, "GPI cycles");
  gpi->add_option("--episodes", gpi_eps, "Evaluation episodes");
  gpi->add_option("--sf-method", gpi_method, "analytic, fixed-point, td-sleep or td-wake");

  // evaluate
  Common vc2;
  std::string ev_agent, ev_ckpt;
  bool ev_random = false;
  std::optional<int> ev_eps;
  auto* ev = app.add_subcommand("evaluate", "Greedy returns of a saved agent, or of the random walk");
  add_common(ev, vc2);
  ev->add_option("--agent", ev_agent, "Agent checkpoint");
  ev->add_option("--checkpoint", ev_ckpt, "SSM checkpoint (required for inferred agents)");
  ev->add_flag("--random-walk", ev_random, "Evaluate the random-walk policy instead");
  ev->add_option("--episodes", ev_eps, "Evaluation episodes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*train) {
      ExperimentConfig cfg = base_config(tc);
      if (cycles) cfg.wake_sleep.n_cycles = *cycles;
      if (sleep_samples) cfg.wake_sleep.sleep_samples_per_cycle = *sleep_samples;
      if (wake_obs) cfg.wake_sleep.wake_observations_per_cycle = *wake_obs;
      if (mode) cfg.wake_sleep.mode = parse_update_mode(*mode);
      cfg.validate();
      const WakeSleepResult res = train_ssm(cfg);
      write_text(out_path(cfg, "ssm.json"), ssm_to_json(make_checkpoint(cfg, res.model)));
      write_csv(out_path(cfg, "ssm_diagnostics.csv"), diagnostics_table(res));
      const CycleDiagnostics& last = res.diagnostics.empty() ? res.initial : res.diagnostics.back();
      std::cout << "wake_pred_error initial " << format_double(res.initial.wake_pred_error) << " final "
                << format_double(last.wake_pred_error) << "\n";
    } else if (*dyn) {
      ExperimentConfig cfg = base_config(ec);
      if (dyn_res) cfg.export_resolution = *dyn_res;
      cfg.validate();
      const SsmCheckpoint ckpt = load_ssm(dyn_ckpt);
      const GridExport g = dynamics_grid(ckpt.model, cfg.export_resolution, ckpt.environment);
      write_csv(out_path(cfg, "dynamics_grid.csv"), grid_table(g));
    } else if (*filt) {
      ExperimentConfig cfg = base_config(fc);
      if (filt_steps) cfg.filter_steps = *filt_steps;
      if (filt_noise) cfg.environment.obs_noise_sigma = *filt_noise;
      cfg.validate();
      const SsmCheckpoint ckpt = load_ssm(filt_ckpt);
      Trajectory traj;
      if (!filt_traj.empty()) {
        traj = read_trajectory_csv(filt_traj);
      } else {
        EnvironmentSpec env = ckpt.environment;
        env.obs_noise_sigma = cfg.environment.obs_noise_sigma;
        Rng rng = SeedSequence(cfg.seed).stream("filter/rollout");
        traj = rollout(random_walk_policy(), static_cast<std::size_t>(cfg.filter_steps), env, cfg.reward, rng);
        write_csv(out_path(cfg, "trajectory.csv"), trajectory_table(traj));
      }
      const FilterOutput out = filter_trajectory(ckpt.model, std::move(traj));
      write_csv(out_path(cfg, "filter.csv"), filter_table(out));
      std::cout << "posterior_mse " << format_double(posterior_mse(out)) << " observation_mse "
                << format_double(observation_mse(out.trajectory)) << "\n";
    } else if (*val) {
      ExperimentConfig cfg = base_config(vc);
      if (val_method) cfg.sf_method = parse_sf_method(*val_method);
      if (val_res) cfg.value_grid.resolution = *val_res;
      if (val_burn) cfg.value_grid.burn_in = *val_burn;
      if (val_goal.size() == 2) cfg.reward.goal_center = Point2(val_goal[0], val_goal[1]);
      if (val_radius) cfg.reward.goal_radius = *val_radius;
      if (val_mag) cfg.reward.magnitude = *val_mag;
      const Condition cond = parse_condition(val_cond);
      auto ssm = optional_ssm(cfg, val_ckpt, cond == Condition::inferred, "inferred condition");
      cfg.validate();
      const AgentContext ctx = make_context(cfg, std::move(ssm));
      const Agent agent = random_walk_value_agent(cond, ctx, cfg, cfg.sf_method);
      const GridExport g =
          value_grid(agent, ctx, cfg.value_grid, cfg.environment, SeedSequence(cfg.seed).child("value-grid"));
      write_csv(out_path(cfg, "value_grid_" + std::string(to_string(cond)) + ".csv"), grid_table(g));
    } else if (*gpi) {
      ExperimentConfig cfg = base_config(gc);
      if (gpi_cycles) cfg.gpi.n_cycles = *gpi_cycles;
      if (gpi_eps) cfg.gpi.eval_episodes = *gpi_eps;
      if (gpi_method) cfg.gpi.sf_method = parse_sf_method(*gpi_method);
      const Condition cond = parse_condition(gpi_cond);
      auto ssm = optional_ssm(cfg, gpi_ckpt, cond == Condition::inferred, "inferred condition");
      cfg.validate();
      const AgentContext ctx = make_context(cfg, std::move(ssm));
      const GpiResult res = generalized_policy_iteration(cfg.gpi, cond, ctx, cfg.environment, cfg.reward);
      const std::vector<double> returns =
          evaluate_policy(res.agent, ctx, cfg.gpi.eval_episodes, static_cast<std::size_t>(cfg.gpi.steps_per_episode),
                          cfg.environment, cfg.reward, SeedSequence(cfg.seed).child("evaluate"));
      const std::string tag(to_string(cond));
      write_text(out_path(cfg, "agent_" + tag + ".json"), agent_to_json(res.agent));
      write_csv(out_path(cfg, "gpi_training_" + tag + ".csv"), returns_table(res.returns));
      write_csv(out_path(cfg, "returns_" + tag + ".csv"), returns_table(returns));
      write_csv(out_path(cfg, "histogram_" + tag + ".csv"), histogram_for(returns, cfg));
      std::cout << tag << " mean_return " << format_double(mean(returns)) << "\n";
    } else if (*ev) {
      ExperimentConfig cfg = base_config(vc2);
      if (ev_eps) cfg.gpi.eval_episodes = *ev_eps;
      if (ev_random == !ev_agent.empty()) throw ConfigError("evaluate: give exactly one of --agent or --random-walk");
      std::vector<double> returns;
      std::string tag = "random";
      const SeedSequence seeds = SeedSequence(cfg.seed).child("evaluate");
      const auto steps = static_cast<std::size_t>(cfg.gpi.steps_per_episode);
      if (ev_random) {
        cfg.validate();
        returns = evaluate_random_walk(cfg.gpi.eval_episodes, steps, cfg.environment, cfg.reward, seeds);
      } else {
        const Agent agent = agent_from_json(read_text(ev_agent));
        auto ssm = optional_ssm(cfg, ev_ckpt, agent.condition == Condition::inferred, "inferred agent");
        cfg.validate();
        const AgentContext ctx = make_context(cfg, std::move(ssm));
        returns = evaluate_policy(agent, ctx, cfg.gpi.eval_episodes, steps, cfg.environment, cfg.reward, seeds);
        tag = std::string(to_string(agent.condition));
      }
      write_csv(out_path(cfg, "eval_returns_" + tag + ".csv"), returns_table(returns));
      write_csv(out_path(cfg, "eval_histogram_" + tag + ".csv"), histogram_for(returns, cfg));
      std::cout << tag << " mean_return " << format_double(mean(returns)) << "\n";
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
