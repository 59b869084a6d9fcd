#pragma once

// JSON documents for models, fit reports, and run manifests; CSV for
// samples, exact tables, traces, and evidence blocks. Numbers in CSVs are
// printed with enough digits to round-trip.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pnet/evidence.hpp"
#include "pnet/model.hpp"
#include "pnet/sem.hpp"

namespace pnet {

nlohmann::json proposition_to_json(const Proposition& p, const VariableTable& vars);
Proposition proposition_from_json(const nlohmann::json& j, const VariableTable& vars);

nlohmann::json model_to_json(const MaxEntModel& m);
MaxEntModel model_from_json(const nlohmann::json& j);

nlohmann::json fit_config_to_json(const FitConfig& cfg);
FitConfig fit_config_from_json(const nlohmann::json& j);
nlohmann::json fit_report_to_json(const FitReport& rep);

struct RunManifest {
  std::string command;
  std::vector<std::string> argv;     // full invocation, for reruns
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::uint64_t seed = 0;
  std::string version;
  std::optional<FitConfig> fit;
};

nlohmann::json manifest_to_json(const RunManifest& m);

std::string samples_to_csv(const VariableTable& vars,
                           const std::vector<WorldState>& states);
std::string exact_table_to_csv(const VariableTable& vars, const ExactTable& table);
// Table shape: block, multiplicity, one 0/1/? column per variable. Extension
// rows appear as all-missing rows when a block carries a nonzero count.
std::string blocks_to_csv(const VariableTable& vars,
                          const std::vector<SampleBlock>& blocks);
std::string traces_to_csv(const FitReport& rep);
std::string lambda_trajectory_to_csv(const FitReport& rep);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace pnet
