#include "ddcsf/config.hpp"

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace ddcsf {

using nlohmann::json;

namespace {

// Reads fields of one JSON object and rejects keys nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (auto it = j_.find(key); it != j_.end()) {
      try {
        out = it->template get<T>();
      } catch (const json::exception& e) {
        throw ConfigError(path_ + "." + key + ": " + e.what());
      }
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string sub(const char* key) const { return path_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(path_ + ": unknown key '" + it.key() + "'");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json point(const Point2& p) { return json::array({p.x(), p.y()}); }

void read_point(ObjectReader& r, const char* key, Point2& p) {
  std::vector<double> v;
  r.get(key, v);
  if (const json* c = r.child(key); c && v.size() != 2) throw ConfigError(r.sub(key) + ": expected [x, y]");
  if (v.size() == 2) p = Point2(v[0], v[1]);
}

json env_json(const EnvironmentSpec& e) {
  return {{"internal_wall", {point(e.internal_wall.a), point(e.internal_wall.b)}},
          {"step_length", e.step_length},
          {"obs_noise_sigma", e.obs_noise_sigma},
          {"direction_noise_sigma", e.direction_noise_sigma}};
}

void read_env(const json& j, const std::string& path, EnvironmentSpec& e) {
  ObjectReader r(j, path);
  if (const json* w = r.child("internal_wall")) {
    std::vector<std::vector<double>> ends;
    try {
      ends = w->get<std::vector<std::vector<double>>>();
    } catch (const json::exception& ex) {
      throw ConfigError(r.sub("internal_wall") + ": " + ex.what());
    }
    if (ends.size() != 2 || ends[0].size() != 2 || ends[1].size() != 2)
      throw ConfigError(r.sub("internal_wall") + ": expected [[x, y], [x, y]]");
    e.internal_wall = {Point2(ends[0][0], ends[0][1]), Point2(ends[1][0], ends[1][1])};
  }
  r.get("step_length", e.step_length);
  r.get("obs_noise_sigma", e.obs_noise_sigma);
  r.get("direction_noise_sigma", e.direction_noise_sigma);
  r.finish();
}

json reward_json(const RewardField& f) {
  return {{"goal_center", point(f.goal_center)}, {"goal_radius", f.goal_radius}, {"magnitude", f.magnitude}};
}

void read_reward(const json& j, const std::string& path, RewardField& f) {
  ObjectReader r(j, path);
  read_point(r, "goal_center", f.goal_center);
  r.get("goal_radius", f.goal_radius);
  r.get("magnitude", f.magnitude);
  r.finish();
}

json basis_json(const BasisSpec& b) {
  return {{"lattice_nx", b.lattice_nx},
          {"lattice_ny", b.lattice_ny},
          {"width", b.width},
          {"truncation_radius_factor", b.truncation_radius_factor},
          {"n_action_features", b.n_action_features},
          {"action_concentration", b.action_concentration}};
}

void read_basis(const json& j, const std::string& path, BasisSpec& b) {
  ObjectReader r(j, path);
  r.get("lattice_nx", b.lattice_nx);
  r.get("lattice_ny", b.lattice_ny);
  r.get("width", b.width);
  r.get("truncation_radius_factor", b.truncation_radius_factor);
  r.get("n_action_features", b.n_action_features);
  r.get("action_concentration", b.action_concentration);
  r.finish();
}

json ws_json(const WakeSleepConfig& c) {
  return {{"n_cycles", c.n_cycles},
          {"sleep_samples_per_cycle", c.sleep_samples_per_cycle},
          {"wake_observations_per_cycle", c.wake_observations_per_cycle},
          {"sleep_sequence_length", c.sleep_sequence_length},
          {"wake_episode_length", c.wake_episode_length},
          {"mode", std::string(to_string(c.mode))},
          {"batch_size", c.batch_size},
          {"batch_step", c.batch_step},
          {"max_filter_radius", c.max_filter_radius},
          {"lr_W", c.lr_W},
          {"lr_T", c.lr_T},
          {"lr_decay_cycles", c.lr_decay_cycles},
          {"ridge_W", c.ridge_W},
          {"ridge_T", c.ridge_T},
          {"ridge_obs", c.ridge_obs},
          {"ridge_decoder", c.ridge_decoder},
          {"sleep_noise_sigma", c.sleep_noise_sigma},
          {"transition_init_scale", c.transition_init_scale},
          {"initial_obs_noise", c.initial_obs_noise},
          {"learn_observation_map", c.learn_observation_map},
          {"heldout_steps", c.heldout_steps},
          {"early_stopping", c.early_stopping},
          {"early_stopping_rel_tol", c.early_stopping_rel_tol}};
}

void read_ws(const json& j, const std::string& path, WakeSleepConfig& c) {
  ObjectReader r(j, path);
  r.get("n_cycles", c.n_cycles);
  r.get("sleep_samples_per_cycle", c.sleep_samples_per_cycle);
  r.get("wake_observations_per_cycle", c.wake_observations_per_cycle);
  r.get("sleep_sequence_length", c.sleep_sequence_length);
  r.get("wake_episode_length", c.wake_episode_length);
  std::string mode(to_string(c.mode));
  r.get("mode", mode);
  c.mode = parse_update_mode(mode);
  r.get("batch_size", c.batch_size);
  r.get("batch_step", c.batch_step);
  r.get("max_filter_radius", c.max_filter_radius);
  r.get("lr_W", c.lr_W);
  r.get("lr_T", c.lr_T);
  r.get("lr_decay_cycles", c.lr_decay_cycles);
  r.get("ridge_W", c.ridge_W);
  r.get("ridge_T", c.ridge_T);
  r.get("ridge_obs", c.ridge_obs);
  r.get("ridge_decoder", c.ridge_decoder);
  r.get("sleep_noise_sigma", c.sleep_noise_sigma);
  r.get("transition_init_scale", c.transition_init_scale);
  r.get("initial_obs_noise", c.initial_obs_noise);
  r.get("learn_observation_map", c.learn_observation_map);
  r.get("heldout_steps", c.heldout_steps);
  r.get("early_stopping", c.early_stopping);
  r.get("early_stopping_rel_tol", c.early_stopping_rel_tol);
  r.finish();
}

json gpi_json(const GpiConfig& c) {
  return {{"discount", c.discount},
          {"n_cycles", c.n_cycles},
          {"steps_per_episode", c.steps_per_episode},
          {"action_candidates", c.action_candidates},
          {"positive_return_filter", c.positive_return_filter},
          {"eval_episodes", c.eval_episodes},
          {"epsilon", c.epsilon},
          {"epsilon_decay_fraction", c.epsilon_decay_fraction},
          {"exploration_steps", c.exploration_steps},
          {"ridge_reward", c.ridge_reward},
          {"ridge_dynamics", c.ridge_dynamics},
          {"ridge_transition", c.ridge_transition},
          {"lr_transition", c.lr_transition},
          {"sf_method", std::string(to_string(c.sf_method))},
          {"td_lr0", c.td_schedule.lr0},
          {"td_k0", c.td_schedule.k0},
          {"td_epochs", c.td_epochs},
          {"refit_recognition", c.refit_recognition},
          {"sleep_samples_per_cycle", c.sleep_samples_per_cycle}};
}

void read_gpi(const json& j, const std::string& path, GpiConfig& c) {
  ObjectReader r(j, path);
  r.get("discount", c.discount);
  r.get("n_cycles", c.n_cycles);
  r.get("steps_per_episode", c.steps_per_episode);
  r.get("action_candidates", c.action_candidates);
  r.get("positive_return_filter", c.positive_return_filter);
  r.get("eval_episodes", c.eval_episodes);
  r.get("epsilon", c.epsilon);
  r.get("epsilon_decay_fraction", c.epsilon_decay_fraction);
  r.get("exploration_steps", c.exploration_steps);
  r.get("ridge_reward", c.ridge_reward);
  r.get("ridge_dynamics", c.ridge_dynamics);
  r.get("ridge_transition", c.ridge_transition);
  r.get("lr_transition", c.lr_transition);
  std::string method(to_string(c.sf_method));
  r.get("sf_method", method);
  c.sf_method = parse_sf_method(method);
  r.get("td_lr0", c.td_schedule.lr0);
  r.get("td_k0", c.td_schedule.k0);
  r.get("td_epochs", c.td_epochs);
  r.get("refit_recognition", c.refit_recognition);
  r.get("sleep_samples_per_cycle", c.sleep_samples_per_cycle);
  r.finish();
}

}  // namespace

void ValueGridConfig::validate() const {
  if (resolution < 1) throw ConfigError("value_grid: resolution must be >= 1");
  if (burn_in < 1) throw ConfigError("value_grid: burn_in must be >= 1");
  if (burn_in_repeats < 1) throw ConfigError("value_grid: burn_in_repeats must be >= 1");
}

void ExperimentConfig::set_seed(std::uint64_t master) {
  seed = master;
  const SeedSequence seeds(master);
  wake_sleep.seed = seeds.derive("wake-sleep");
  gpi.seed = seeds.derive("gpi");
}

void ExperimentConfig::validate() const {
  environment.validate();
  reward.validate();
  basis.validate();
  wake_sleep.validate();
  gpi.validate();
  value_grid.validate();
  if (conditions.empty()) throw ConfigError("conditions: need at least one");
  if (export_resolution < 1) throw ConfigError("export_resolution must be >= 1");
  if (filter_steps < 1) throw ConfigError("filter_steps must be >= 1");
}

std::string to_json(const ExperimentConfig& c) {
  json conds = json::array();
  for (Condition x : c.conditions) conds.push_back(std::string(to_string(x)));
  const json j = {{"schema", kConfigSchema},
                  {"environment", env_json(c.environment)},
                  {"reward", reward_json(c.reward)},
                  {"basis", basis_json(c.basis)},
                  {"wake_sleep", ws_json(c.wake_sleep)},
                  {"gpi", gpi_json(c.gpi)},
                  {"sf_method", std::string(to_string(c.sf_method))},
                  {"conditions", conds},
                  {"value_grid",
                   {{"resolution", c.value_grid.resolution},
                    {"burn_in", c.value_grid.burn_in},
                    {"burn_in_repeats", c.value_grid.burn_in_repeats}}},
                  {"export_resolution", c.export_resolution},
                  {"filter_steps", c.filter_steps},
                  {"output_dir", c.output_dir},
                  {"seed", c.seed}};
  return j.dump(2) + "\n";
}

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  ObjectReader r(j, "config");
  std::string schema;
  r.get("schema", schema);
  if (schema != kConfigSchema) throw ConfigError("config: schema must be \"" + std::string(kConfigSchema) + "\"");

  ExperimentConfig c;
  if (const json* x = r.child("environment")) read_env(*x, r.sub("environment"), c.environment);
  if (const json* x = r.child("reward")) read_reward(*x, r.sub("reward"), c.reward);
  if (const json* x = r.child("basis")) read_basis(*x, r.sub("basis"), c.basis);
  if (const json* x = r.child("wake_sleep")) read_ws(*x, r.sub("wake_sleep"), c.wake_sleep);
  if (const json* x = r.child("gpi")) read_gpi(*x, r.sub("gpi"), c.gpi);
  std::string method(to_string(c.sf_method));
  r.get("sf_method", method);
  c.sf_method = parse_sf_method(method);
  if (r.child("conditions")) {
    std::vector<std::string> names;
    r.get("conditions", names);
    c.conditions.clear();
    for (const auto& n : names) c.conditions.push_back(parse_condition(n));
  }
  if (const json* x = r.child("value_grid")) {
    ObjectReader v(*x, r.sub("value_grid"));
    v.get("resolution", c.value_grid.resolution);
    v.get("burn_in", c.value_grid.burn_in);
    v.get("burn_in_repeats", c.value_grid.burn_in_repeats);
    v.finish();
  }
  r.get("export_resolution", c.export_resolution);
  r.get("filter_steps", c.filter_steps);
  r.get("output_dir", c.output_dir);
  std::uint64_t seed = 0;
  r.get("seed", seed);
  r.finish();
  c.set_seed(seed);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

std::string resolve_output_dir(const std::string& explicit_dir) {
  if (!explicit_dir.empty()) return explicit_dir;
  if (const char* env = std::getenv("DDCSF_OUTPUT_DIR"); env && *env) return env;
  return ".";
}

}  // namespace ddcsf
