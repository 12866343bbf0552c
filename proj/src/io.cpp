#include "ddcsf/io.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ddcsf {

using nlohmann::json;

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view cell, std::string_view what) {
  double v = 0.0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
    throw ConfigError(std::string(what) + ": not a number '" + std::string(cell) + "'");
  return v;
}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header.size()) throw DimensionError("csv row has the wrong number of cells");
  rows.push_back(std::move(row));
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
  out.close();
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::string join(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  return line;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

CsvTable read_csv(const std::string& path, const std::vector<std::string>& expected_header) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  CsvTable table{split(line), {}};
  if (table.header != expected_header)
    throw ConfigError(path + ": header must be '" + join(expected_header) + "', got '" + line + "'");
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != expected_header.size())
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(expected_header.size()) +
                        " cells, got " + std::to_string(cells.size()));
    table.rows.push_back(std::move(cells));
  }
  return table;
}

void check_csv_schema(const std::string& path, const std::vector<std::string>& expected_header, long expected_rows) {
  const CsvTable t = read_csv(path, expected_header);
  if (expected_rows >= 0 && static_cast<long>(t.rows.size()) != expected_rows)
    throw ConfigError(path + ": expected " + std::to_string(expected_rows) + " rows, got " +
                      std::to_string(t.rows.size()));
  for (const auto& row : t.rows) {
    for (const auto& cell : row) {
      if (cell.empty()) continue;
      if (!std::isfinite(parse_double(cell, path))) throw ConfigError(path + ": non-finite value");
    }
  }
}

void write_csv(const std::string& path, const CsvTable& table) {
  std::string text = join(table.header) + "\n";
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) throw DimensionError("csv row has the wrong number of cells");
    text += join(row);
    text += '\n';
  }
  write_text(path, text);
  check_csv_schema(path, table.header, static_cast<long>(table.rows.size()));
}

const std::vector<std::string>& trajectory_header() {
  static const std::vector<std::string> h{"t", "sx", "sy", "ox", "oy", "action", "reward"};
  return h;
}

CsvTable trajectory_table(const Trajectory& traj) {
  traj.validate();
  CsvTable t{trajectory_header(), {}};
  for (std::size_t i = 0; i < traj.size(); ++i) {
    t.add_row({std::to_string(i), format_double(traj.latent[i].x()), format_double(traj.latent[i].y()),
               format_double(traj.observed[i].x()), format_double(traj.observed[i].y()),
               i < traj.actions.size() ? format_double(traj.actions[i]) : std::string(),
               i < traj.rewards.size() ? format_double(traj.rewards[i]) : std::string()});
  }
  return t;
}

Trajectory read_trajectory_csv(const std::string& path) {
  const CsvTable t = read_csv(path, trajectory_header());
  Trajectory traj;
  bool any_action = false, any_reward = false;
  for (const auto& r : t.rows) {
    any_action = any_action || !r[5].empty();
    any_reward = any_reward || !r[6].empty();
  }
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    if (parse_double(r[0], path) != static_cast<double>(i)) throw ConfigError(path + ": t must count from 0");
    traj.latent.emplace_back(parse_double(r[1], path), parse_double(r[2], path));
    traj.observed.emplace_back(parse_double(r[3], path), parse_double(r[4], path));
    if (any_action && !r[5].empty()) traj.actions.push_back(parse_double(r[5], path));
    if (any_reward) {
      if (r[6].empty()) throw ConfigError(path + ": reward column is partially empty");
      traj.rewards.push_back(parse_double(r[6], path));
    }
  }
  for (const auto& p : traj.observed) {
    if (!p.allFinite()) throw ConfigError(path + ": non-finite observation");
  }
  traj.validate();
  return traj;
}

// Checkpoints. Matrices are stored row-major as {"rows", "cols", "data"}.

namespace {

json matrix_json(const Eigen::Ref<const Matrix>& m) {
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Matrix matrix_from(const json& j, const char* what) {
  try {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto data = j.at("data").get<std::vector<double>>();
    if (rows < 0 || cols < 0 || static_cast<Eigen::Index>(data.size()) != rows * cols)
      throw ConfigError(std::string(what) + ": data size does not match shape");
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j2 = 0; j2 < cols; ++j2) m(i, j2) = data[static_cast<std::size_t>(i * cols + j2)];
    if (!m.allFinite()) throw ConfigError(std::string(what) + ": non-finite entries");
    return m;
  } catch (const json::exception& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

Vector vector_from(const json& j, const char* what) {
  const Matrix m = matrix_from(j, what);
  if (m.cols() != 1) throw ConfigError(std::string(what) + ": expected a column vector");
  return m.col(0);
}

json parse_checked(const std::string& text, const char* schema) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("checkpoint: ") + e.what());
  }
  if (!j.is_object() || j.value("schema", std::string()) != schema)
    throw ConfigError(std::string("checkpoint: schema must be \"") + schema + "\"");
  return j;
}

}  // namespace

std::string ssm_to_json(const SsmCheckpoint& c) {
  const StateSpaceModel& m = c.model;
  m.check_shapes();
  const EnvironmentSpec& e = c.environment;
  const json j = {
      {"schema", kSsmSchema},
      {"basis",
       {{"lattice_nx", c.basis.lattice_nx},
        {"lattice_ny", c.basis.lattice_ny},
        {"width", c.basis.width},
        {"truncation_radius_factor", c.basis.truncation_radius_factor},
        {"n_action_features", c.basis.n_action_features},
        {"action_concentration", c.basis.action_concentration}}},
      {"environment",
       {{"internal_wall",
         {{e.internal_wall.a.x(), e.internal_wall.a.y()}, {e.internal_wall.b.x(), e.internal_wall.b.y()}}},
        {"step_length", e.step_length},
        {"obs_noise_sigma", e.obs_noise_sigma},
        {"direction_noise_sigma", e.direction_noise_sigma}}},
      {"decoder", matrix_json(m.decoder.alpha)},
      {"T", matrix_json(m.transition.T)},
      {"C", matrix_json(m.observation.C)},
      {"noise_sigma", {m.observation.noise_sigma.x(), m.observation.noise_sigma.y()}},
      {"W", matrix_json(m.recognition.W)},
      {"prior", matrix_json(m.prior)}};
  return j.dump(1) + "\n";
}

SsmCheckpoint ssm_from_json(const std::string& text) {
  const json j = parse_checked(text, kSsmSchema);
  try {
    BasisSpec bs;
    EnvironmentSpec env;
    const json& b = j.at("basis");
    bs.lattice_nx = b.at("lattice_nx").get<int>();
    bs.lattice_ny = b.at("lattice_ny").get<int>();
    bs.width = b.at("width").get<double>();
    bs.truncation_radius_factor = b.at("truncation_radius_factor").get<double>();
    bs.n_action_features = b.at("n_action_features").get<int>();
    bs.action_concentration = b.at("action_concentration").get<double>();
    const json& e = j.at("environment");
    const auto wall = e.at("internal_wall").get<std::vector<std::vector<double>>>();
    if (wall.size() != 2 || wall[0].size() != 2 || wall[1].size() != 2)
      throw ConfigError("checkpoint: malformed internal_wall");
    env.internal_wall = {Point2(wall[0][0], wall[0][1]), Point2(wall[1][0], wall[1][1])};
    env.step_length = e.at("step_length").get<double>();
    env.obs_noise_sigma = e.at("obs_noise_sigma").get<double>();
    env.direction_noise_sigma = e.at("direction_noise_sigma").get<double>();
    env.validate();

    const StateFeatureBasis basis = StateFeatureBasis::from_spec(bs, env.internal_wall);
    const Matrix alpha = matrix_from(j.at("decoder"), "decoder");
    const Matrix cm = matrix_from(j.at("C"), "C");
    if (alpha.rows() != 2 || cm.rows() != 2) throw ConfigError("checkpoint: decoder and C must have 2 rows");
    const auto noise = j.at("noise_sigma").get<std::vector<double>>();
    if (noise.size() != 2) throw ConfigError("checkpoint: noise_sigma must have 2 entries");
    SsmCheckpoint c{bs, env, StateSpaceModel{basis,
                              MeanDecoder{alpha},
                              TransitionModel{matrix_from(j.at("T"), "T")},
                              ObservationModel{cm, Point2(noise[0], noise[1])},
                              RecognitionModel{matrix_from(j.at("W"), "W")},
                              vector_from(j.at("prior"), "prior")}};
    c.model.check_shapes();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("checkpoint: ") + e.what());
  } catch (const DimensionError& e) {
    throw ConfigError(std::string("checkpoint: ") + e.what());
  }
}

std::string agent_to_json(const Agent& a) {
  a.check_shapes();
  json j = {{"schema", kAgentSchema},
            {"condition", std::string(to_string(a.condition))},
            {"reward", {{"w", matrix_json(a.reward.w)}, {"residual", a.reward.residual}}},
            {"sf",
             {{"U", matrix_json(a.sf.U)},
              {"discount", a.sf.discount},
              {"method", std::string(to_string(a.sf.method))}}},
            {"dynamics", matrix_json(a.dynamics.P)},
            {"transition", matrix_json(a.transition.T)},
            {"candidates", a.candidates},
            {"td_steps", a.td_steps}};
  if (a.recognition) j["recognition"] = matrix_json(a.recognition->W);
  return j.dump(1) + "\n";
}

Agent agent_from_json(const std::string& text) {
  const json j = parse_checked(text, kAgentSchema);
  try {
    Agent a;
    a.condition = parse_condition(j.at("condition").get<std::string>());
    a.reward.w = vector_from(j.at("reward").at("w"), "reward.w");
    a.reward.residual = j.at("reward").at("residual").get<double>();
    const json& sf = j.at("sf");
    a.sf.U = matrix_from(sf.at("U"), "sf.U");
    a.sf.discount = sf.at("discount").get<double>();
    a.sf.method = parse_sf_method(sf.at("method").get<std::string>());
    a.dynamics.P = matrix_from(j.at("dynamics"), "dynamics");
    a.transition.T = matrix_from(j.at("transition"), "transition");
    if (j.contains("recognition")) a.recognition = RecognitionModel{matrix_from(j.at("recognition"), "recognition")};
    a.candidates = j.at("candidates").get<std::vector<double>>();
    a.td_steps = j.at("td_steps").get<long long>();
    if (a.condition == Condition::inferred && !a.recognition)
      throw ConfigError("checkpoint: inferred agent needs a recognition model");
    a.check_shapes();
    return a;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("checkpoint: ") + e.what());
  } catch (const DimensionError& e) {
    throw ConfigError(std::string("checkpoint: ") + e.what());
  }
}

}  // namespace ddcsf
