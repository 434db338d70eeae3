#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "boundsmith/model.hpp"

namespace boundsmith {

/// One (model, mode, size) measurement cell.
struct MetricsRecord {
  std::string model;
  std::string mode;  // analyzer | baseline | reach
  std::optional<int> size;
  int numPrimary = 0;
  int numVars = 0;
  int numClauses = 0;
  int numScenarios = 0;
  double avgDiscoveryMillis = 0;
  double totalMillis = 0;
  std::uint64_t solveCalls = 0;
  bool timedOut = false;
  int timeoutMillis = 0;
};

nlohmann::ordered_json to_json(const MetricsRecord& r);
MetricsRecord metrics_from_json(const nlohmann::ordered_json& doc);

struct BenchModel {
  std::string name;
  Model model;
};

struct BenchOptions {
  std::vector<std::string> modes{"reach", "baseline", "analyzer"};
  /// Overrides every command scope when set.
  std::optional<int> scope;
  /// Per-cell limit; 0 disables.
  int timeoutMillis = 0;
  bool parallel = false;
};

/// Runs every (model, mode, size) cell to exhaustion on each model's first command.
/// Reach and baseline produce one cell per size 0..scope, analyzer one cell per model.
std::vector<MetricsRecord> bench_run(const std::vector<BenchModel>& models, const BenchOptions& options);

/// Sorts rows by (model, mode, size).
void sort_records(std::vector<MetricsRecord>& records);

/// Columns: model,mode,size,pv,vars,clauses,scenarios,avg_ms,total_ms.
std::string report_csv(std::vector<MetricsRecord> records);
/// Aligned table; timed-out cells show TIMEOUT(<ms>).
std::string report_table(std::vector<MetricsRecord> records);

}  // namespace boundsmith
