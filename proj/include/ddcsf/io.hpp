#pragma once

#include "ddcsf/environment.hpp"
#include "ddcsf/features.hpp"
#include "ddcsf/policy.hpp"
#include "ddcsf/ssm.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace ddcsf {

inline constexpr const char* kSsmSchema = "ddcsf.ssm/1";
inline constexpr const char* kAgentSchema = "ddcsf.agent/1";

/// Shortest decimal string that parses back to exactly `x`.
std::string format_double(double x);

/// Rows of already formatted cells under a fixed header.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
};

/// Writes the table, then re-reads the file and checks it against
/// `table.header`; throws ConfigError on any mismatch or I/O failure.
void write_csv(const std::string& path, const CsvTable& table);

/// Reads a CSV with a header line. Throws ConfigError if the header is not
/// exactly `expected_header` or a row has the wrong number of cells.
CsvTable read_csv(const std::string& path, const std::vector<std::string>& expected_header);

/// Checks header, column count and that every cell parses as a finite number.
void check_csv_schema(const std::string& path, const std::vector<std::string>& expected_header,
                      long expected_rows = -1);

double parse_double(std::string_view cell, std::string_view what);

const std::vector<std::string>& trajectory_header();
CsvTable trajectory_table(const Trajectory& traj);
/// Accepts the trajectory CSV; empty action/reward columns are allowed.
Trajectory read_trajectory_csv(const std::string& path);

/// Everything needed to rebuild a StateSpaceModel.
struct SsmCheckpoint {
  BasisSpec basis;
  EnvironmentSpec environment;
  StateSpaceModel model;
};

std::string ssm_to_json(const SsmCheckpoint& ckpt);
SsmCheckpoint ssm_from_json(const std::string& text);

std::string agent_to_json(const Agent& agent);
Agent agent_from_json(const std::string& text);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace ddcsf
