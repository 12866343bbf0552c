// Acceptance suite. One line per criterion:
//   A<n> PASS|FAIL <measurements>
// Usage: ddcsf_acceptance [A1 ... A8] [--cli PATH] [--workdir DIR]
// With no criteria every criterion runs. Exit status is nonzero if any fails.

#include "ddcsf/config.hpp"
#include "ddcsf/io.hpp"
#include "ddcsf/linalg.hpp"
#include "ddcsf/pipelines.hpp"
#include "ddcsf/successor.hpp"
#include "ddcsf/wakesleep.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace ddcsf;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and scales.
constexpr double kNeumannTol = 1e-6;
constexpr int kNeumannTerms = 200;
constexpr int kNeumannMatrices = 50;
constexpr double kNeumannMaxRadius = 0.95;
constexpr double kFixedPointTol = 1e-4;
constexpr double kOracleTol = 1e-10;
constexpr double kA1Seconds = 10.0;

constexpr double kChainTol = 0.05;
constexpr long kChainSweeps = 10'000;
constexpr double kTdIdentityTol = 1e-9;
constexpr double kA2Seconds = 30.0;

constexpr double kWakeDropFraction = 0.30;
constexpr double kFilterGainFraction = 0.20;
constexpr long kHeldoutSteps = 5'000;

constexpr int kMinProbePairs = 20;

constexpr int kGpiCycles = 100;
constexpr int kGpiEvalEpisodes = 100;
constexpr std::uint64_t kGpiSeeds[] = {0, 1, 2, 3, 4, 5, 6, 7};
constexpr double kInferredFractionOfLatent = 0.5;

constexpr double kA7Discount = 0.9;
constexpr double kA7RelTol = 0.10;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Desk-scale SSM: 10 cycles at a tenth of the full sample counts.
ExperimentConfig desk_config(std::uint64_t seed = 0) {
  ExperimentConfig cfg;
  cfg.wake_sleep.n_cycles = 10;
  cfg.wake_sleep.sleep_samples_per_cycle = 3'000;
  cfg.wake_sleep.wake_observations_per_cycle = 5'000;
  cfg.set_seed(seed);
  return cfg;
}

const WakeSleepResult& desk_ssm() {
  static const WakeSleepResult res = train_ssm(desk_config());
  return res;
}

// Random T with rho(gamma T) equal to `radius`.
Matrix random_transition(Eigen::Index k, double discount, double radius, Rng& rng) {
  std::normal_distribution<double> n01;
  Matrix t(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) t(i, j) = n01(rng);
  Eigen::EigenSolver<Matrix> eig(t, false);
  const double rho = eig.eigenvalues().cwiseAbs().maxCoeff();
  return t * (radius / (discount * rho));
}

Outcome a1() {
  const auto t0 = std::chrono::steady_clock::now();
  const double gamma = 0.9;
  const Eigen::Index k = 20;
  Rng rng = SeedSequence(101).stream("a1");
  double worst_neumann = 0.0, worst_fp = 0.0, worst_radius_ok = 0.0;
  int neumann_fail = 0;
  for (int m = 0; m < kNeumannMatrices; ++m) {
    // Radii spread evenly over [0.5, 0.95].
    const double radius = 0.5 + (kNeumannMaxRadius - 0.5) * m / (kNeumannMatrices - 1);
    const Matrix t = random_transition(k, gamma, radius, rng);
    const Matrix u = sf_analytic(t, gamma).U;
    Matrix sum = Matrix::Identity(k, k), power = Matrix::Identity(k, k);
    for (int p = 1; p <= kNeumannTerms; ++p) {
      power = (gamma * t) * power;
      sum += power;
    }
    const double err = inf_norm(u - sum);
    worst_neumann = std::max(worst_neumann, err);
    if (err > kNeumannTol) {
      ++neumann_fail;
    } else {
      worst_radius_ok = std::max(worst_radius_ok, radius);
    }
    if (m % 10 == 0) {
      Vector mu = Vector::Random(k).cwiseAbs();
      const Vector fp = sf_fixed_point(t, gamma, mu, FixedPointSolver{});
      worst_fp = std::max(worst_fp, (fp - u * mu).lpNorm<Eigen::Infinity>());
    }
  }
  double worst_oracle = 0.0;
  for (int n : {2, 5, 20}) {
    Matrix p = Matrix::Random(n, n).cwiseAbs();
    p = p.array().colwise() / p.rowwise().sum().array();
    const DiscreteMdp mdp{p, 0.9};
    const Matrix mm = discrete_sr_oracle(mdp);
    worst_oracle = std::max(worst_oracle, inf_norm(mm * (Matrix::Identity(n, n) - 0.9 * p) - Matrix::Identity(n, n)));
  }
  const double secs = seconds_since(t0);
  const bool pass = neumann_fail == 0 && worst_fp <= kFixedPointTol && worst_oracle <= kOracleTol && secs < kA1Seconds;
  return {pass, "neumann_max_err=" + fmt(worst_neumann) + " neumann_failures=" + std::to_string(neumann_fail) + "/" +
                    std::to_string(kNeumannMatrices) + " largest_passing_radius=" + fmt(worst_radius_ok) +
                    " fixed_point_err=" + fmt(worst_fp) + " oracle_residual=" + fmt(worst_oracle) +
                    " seconds=" + fmt(secs)};
}

Outcome a2() {
  const auto t0 = std::chrono::steady_clock::now();
  // Reflecting random walk on a 5-state chain.
  const int n = 5;
  Matrix p = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    p(i, std::max(0, i - 1)) += 0.5;
    p(i, std::min(n - 1, i + 1)) += 0.5;
  }
  const DiscreteMdp mdp{p, 0.9};
  const Matrix oracle = discrete_sr_oracle(mdp);
  // Row-convention SR M has rows over start states; TD on one-hot features
  // learns U with U e_i = M(i, :)^T, i.e. U = M^T.
  Matrix u = Matrix::Zero(n, n);
  const TdSchedule schedule;
  Rng rng = SeedSequence(202).stream("a2/chain");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  long long k = 0;
  for (long sweep = 0; sweep < kChainSweeps; ++sweep) {
    for (int i = 0; i < n; ++i) {
      const double r = unif(rng);
      int j = n - 1;
      double acc = 0.0;
      for (int c = 0; c < n; ++c) {
        acc += p(i, c);
        if (r < acc) {
          j = c;
          break;
        }
      }
      td_step(u, Vector::Unit(n, i), Vector::Unit(n, j), mdp.discount, schedule.at(k++));
    }
  }
  const double chain_err = (u.transpose() - oracle).cwiseAbs().maxCoeff();

  // Identity: at U = (I - gamma T)^-1 with feat_next = T feat, delta = 0.
  Rng rng2 = SeedSequence(202).stream("a2/continuous");
  const Eigen::Index kk = 30;
  const Matrix t = random_transition(kk, 0.9, 0.8, rng2);
  const Matrix uc = sf_analytic(t, 0.9).U;
  double worst_delta = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Vector f = Vector::Random(kk).cwiseAbs();
    const Vector delta = td_error(uc, f, t * f, 0.9);
    worst_delta = std::max(worst_delta, delta.lpNorm<Eigen::Infinity>() / std::max(1.0, (uc * f).lpNorm<Eigen::Infinity>()));
  }
  const double secs = seconds_since(t0);
  const bool pass = chain_err < kChainTol && worst_delta <= kTdIdentityTol && secs < kA2Seconds;
  return {pass, "chain_max_err=" + fmt(chain_err) + " max_rel_delta=" + fmt(worst_delta) + " seconds=" + fmt(secs)};
}

Outcome a3() {
  const auto t0 = std::chrono::steady_clock::now();
  const WakeSleepResult& res = desk_ssm();
  const double init = res.initial.wake_pred_error;
  const double fin = res.diagnostics.back().wake_pred_error;
  const double drop = 1.0 - fin / init;
  return {drop >= kWakeDropFraction, "initial=" + fmt(init) + " final=" + fmt(fin) + " drop=" + fmt(drop) +
                                         " seconds=" + fmt(seconds_since(t0))};
}

Outcome a4() {
  const WakeSleepResult& res = desk_ssm();
  const ExperimentConfig cfg = desk_config();
  Rng rng = SeedSequence(cfg.seed).stream("acceptance/a4-heldout");
  const Trajectory traj =
      rollout(random_walk_policy(), static_cast<std::size_t>(kHeldoutSteps), cfg.environment, cfg.reward, rng);
  const FilterOutput out = filter_trajectory(res.model, traj);
  const double post = posterior_mse(out), obs = observation_mse(traj);
  const double gain = 1.0 - post / obs;
  return {gain >= kFilterGainFraction,
          "posterior_mse=" + fmt(post) + " observation_mse=" + fmt(obs) + " reduction=" + fmt(gain)};
}

Outcome a5() {
  const ExperimentConfig cfg = desk_config();
  const AgentContext ctx = make_context(cfg, desk_ssm().model);
  const auto pairs = wall_probe_pairs(cfg.reward, cfg.environment, kMinProbePairs);
  const SeedSequence seeds = SeedSequence(cfg.seed).child("acceptance/a5");
  std::map<Condition, WallContrast> c;
  for (Condition cond : {Condition::latent, Condition::inferred, Condition::observed}) {
    const Agent agent = random_walk_value_agent(cond, ctx, cfg, cfg.sf_method);
    c[cond] = wall_contrast(agent, ctx, pairs, cfg.value_grid, cfg.environment, seeds);
  }
  const auto& l = c[Condition::latent];
  const auto& i = c[Condition::inferred];
  const auto& o = c[Condition::observed];
  const bool pass = static_cast<int>(pairs.size()) >= kMinProbePairs && l.mean_same > l.mean_far &&
                    i.mean_same > i.mean_far && o.normalized < i.normalized;
  auto show = [](const char* name, const WallContrast& w) {
    return std::string(name) + "(same=" + fmt(w.mean_same) + " far=" + fmt(w.mean_far) +
           " contrast=" + fmt(w.normalized) + ")";
  };
  return {pass, "pairs=" + std::to_string(pairs.size()) + " " + show("latent", l) + " " + show("inferred", i) + " " +
                    show("observed", o) + " observed_separates=" + (o.mean_same > o.mean_far ? "yes" : "no")};
}

Outcome a6() {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig base = desk_config();
  const AgentContext ctx = make_context(base, desk_ssm().model);
  std::map<Condition, std::vector<double>> per_seed;
  for (std::uint64_t seed : kGpiSeeds) {
    ExperimentConfig cfg = base;
    cfg.gpi.n_cycles = kGpiCycles;
    cfg.gpi.eval_episodes = kGpiEvalEpisodes;
    cfg.gpi.seed = SeedSequence(seed).derive("gpi");
    for (Condition cond : {Condition::latent, Condition::inferred, Condition::observed}) {
      const GpiResult res = generalized_policy_iteration(cfg.gpi, cond, ctx, cfg.environment, cfg.reward);
      const std::vector<double> r =
          evaluate_policy(res.agent, ctx, cfg.gpi.eval_episodes, static_cast<std::size_t>(cfg.gpi.steps_per_episode),
                          cfg.environment, cfg.reward, SeedSequence(seed).child("evaluate"));
      per_seed[cond].push_back(mean(r));
    }
  }
  const double l = mean(per_seed[Condition::latent]);
  const double i = mean(per_seed[Condition::inferred]);
  const double o = mean(per_seed[Condition::observed]);
  const bool pass = l >= i && i > o && i >= kInferredFractionOfLatent * l;
  return {pass, "latent=" + fmt(l) + " inferred=" + fmt(i) + " observed=" + fmt(o) +
                    " seeds=" + std::to_string(std::size(kGpiSeeds)) + " seconds=" + fmt(seconds_since(t0))};
}

Outcome a7() {
  const ExperimentConfig cfg = desk_config();
  const EnvironmentSpec& env = cfg.environment;
  const RewardField none{Point2::Zero(), 0.0, 0.0};
  const StateFeatureBasis basis = make_basis(cfg);
  const Eigen::Index k = basis.size();
  const SeedSequence seeds(707);

  // True mean dynamics in feature space, regressed on latent random walks.
  const std::vector<Trajectory> walks = random_walk_episodes(100, 500, env, none, seeds, "a7/true-walk");
  RidgeAccumulator acc(k, k);
  for (const auto& w : walks) {
    const Matrix f = basis.encode_batch(w.latent);
    acc.add_batch(f.leftCols(f.cols() - 1), f.rightCols(f.cols() - 1));
  }
  StateSpaceModel model = initial_model(basis, cfg.wake_sleep.ridge_decoder, 1.0, env.obs_noise_sigma);
  model.transition.T = acc.solve(1e-3 * static_cast<double>(acc.count()));

  // Recognition trained by sleep phases under the true dynamics.
  WakeSleepConfig ws = cfg.wake_sleep;
  ws.sleep_samples_per_cycle = 10'000;
  for (int phase = 0; phase < 10; ++phase)
    model.recognition = sleep_phase(model, ws, env, seeds, "a7/sleep/phase=" + std::to_string(phase), ws.lr_W);

  // td_wake on posteriors of environment rollouts.
  const std::vector<Trajectory> train = random_walk_episodes(40, 500, env, none, seeds, "a7/wake");
  std::vector<Matrix> seqs;
  for (const auto& tr : train)
    seqs.push_back(run_filter(tr.observed, model.prior, model.recognition, model.transition, basis));
  TdLearnConfig td;
  td.epochs = 20;
  const Matrix u = learn_sf_td(seqs, kA7Discount, td, Matrix::Identity(k, k));
  const Matrix u_true = sf_analytic(model.transition.T, kA7Discount).U;

  Rng rng = seeds.stream("a7/heldout");
  const Trajectory held = rollout(random_walk_policy(), static_cast<std::size_t>(kHeldoutSteps), env, none, rng);
  const Matrix mus = run_filter(held.observed, model.prior, model.recognition, model.transition, basis);
  double rel = 0.0;
  for (Eigen::Index t = 0; t < mus.cols(); ++t) {
    const Vector ref = u_true * mus.col(t);
    rel += (u * mus.col(t) - ref).norm() / ref.norm();
  }
  rel /= static_cast<double>(mus.cols());
  return {rel <= kA7RelTol, "mean_rel_l2=" + fmt(rel) + " discount=" + fmt(kA7Discount)};
}

// Runs a command, returns its exit status.
int run(const std::string& cmd) {
  const int rc = std::system((cmd + " > /dev/null 2>&1").c_str());
  return rc;
}

bool same_tree(const fs::path& a, const fs::path& b, std::string& why) {
  std::vector<std::string> na, nb;
  for (const auto& e : fs::directory_iterator(a)) na.push_back(e.path().filename().string());
  for (const auto& e : fs::directory_iterator(b)) nb.push_back(e.path().filename().string());
  std::sort(na.begin(), na.end());
  std::sort(nb.begin(), nb.end());
  if (na != nb) {
    why = "file lists differ";
    return false;
  }
  for (const auto& n : na) {
    if (read_text((a / n).string()) != read_text((b / n).string())) {
      why = n + " differs";
      return false;
    }
  }
  return true;
}

Outcome a8(const std::string& cli, const fs::path& workdir) {
  if (cli.empty()) return {false, "no --cli given"};
  const fs::path root = workdir / "a8";
  fs::remove_all(root);
  const std::string train = " train-ssm --cycles 2 --sleep-samples 1000 --wake-observations 2000 --seed 11";
  std::vector<std::pair<std::string, std::string>> steps;  // name, arguments ({d} = run dir)
  steps.push_back({"train-ssm", train});
  steps.push_back({"export-dynamics", " export-dynamics --checkpoint {d}/ssm.json --resolution 12 --seed 11"});
  steps.push_back({"filter", " filter --checkpoint {d}/ssm.json --steps 500 --seed 11"});
  steps.push_back({"value-grid", " value-grid --checkpoint {d}/ssm.json --condition inferred --resolution 8 --seed 11"});
  steps.push_back({"gpi", " gpi --checkpoint {d}/ssm.json --condition inferred --cycles 5 --episodes 5 --seed 11"});
  steps.push_back(
      {"evaluate", " evaluate --agent {d}/agent_inferred.json --checkpoint {d}/ssm.json --episodes 5 --seed 11"});
  std::string failures;
  for (int run_idx = 0; run_idx < 2; ++run_idx) {
    const fs::path d = root / ("run" + std::to_string(run_idx));
    fs::create_directories(d);
    for (const auto& [name, args] : steps) {
      std::string a = args;
      for (std::size_t pos; (pos = a.find("{d}")) != std::string::npos;) a.replace(pos, 3, d.string());
      if (run(cli + a + " --output-dir " + d.string()) != 0) failures += name + "(exit) ";
    }
  }
  std::string why;
  const bool same = failures.empty() && same_tree(root / "run0", root / "run1", why);
  std::size_t files = 0;
  if (fs::exists(root / "run0"))
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(root / "run0")) ++files;
  return {same, "subcommands=" + std::to_string(steps.size()) + " files=" + std::to_string(files) +
                    (failures.empty() ? "" : " failures=" + failures) + (why.empty() ? "" : " " + why)};
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> wanted;
  std::string cli;
  fs::path workdir = fs::temp_directory_path() / "ddcsf_acceptance";
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--cli" && i + 1 < argc) {
      cli = argv[++i];
    } else if (a == "--workdir" && i + 1 < argc) {
      workdir = argv[++i];
    } else {
      wanted.push_back(a);
    }
  }
  const std::vector<std::pair<std::string, std::function<Outcome()>>> all{
      {"A1", a1}, {"A2", a2}, {"A3", a3}, {"A4", a4}, {"A5", a5}, {"A6", a6}, {"A7", a7},
      {"A8", [&] { return a8(cli, workdir); }}};
  if (wanted.empty())
    for (const auto& [name, fn] : all) wanted.push_back(name);

  int failed = 0;
  for (const auto& name : wanted) {
    auto it = std::find_if(all.begin(), all.end(), [&](const auto& p) { return p.first == name; });
    if (it == all.end()) {
      std::cerr << "unknown criterion " << name << "\n";
      return 2;
    }
    Outcome o;
    try {
      o = it->second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << name << (o.pass ? " PASS " : " FAIL ") << o.detail << std::endl;
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
