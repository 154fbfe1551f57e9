#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "nmc/engine.hpp"
#include "nmc/models.hpp"

namespace nmc {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ColumnType { Real, Int };

// Column-major table whose header row carries `name:real` or `name:int`.
struct Table {
  std::vector<std::string> names;
  std::vector<ColumnType> types;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  void add(std::string name, ColumnType type, std::vector<double> values);
  const std::vector<double>& column(const std::string& name) const;
};

void write_table(const std::filesystem::path& path, const Table& table);
Table read_table(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

// Dataset directory: train.csv, heldout.csv and dataset.json (sizes,
// hyperparameters, node bindings, j_sizes and the generating values).
struct StoredDataset {
  ModelSpec spec;
  Split split;
  std::uint64_t seed = 0;
  double holdout_fraction = 0.5;
};

nlohmann::json to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(const nlohmann::json& j);

void write_dataset(const std::filesystem::path& dir, const StoredDataset& data);
StoredDataset read_dataset(const std::filesystem::path& dir);

// trace.csv holds the per-sweep diagnostics; samples/<node>.csv one row per sweep.
void write_trace(const std::filesystem::path& dir, const Trace& trace);
Trace read_trace(const std::filesystem::path& dir);

// Flattened coordinate names: "alpha" for scalars, "beta[0]", "beta[1]", ... otherwise.
std::vector<std::string> coordinate_names(const std::string& node, std::size_t dim);

}  // namespace nmc
