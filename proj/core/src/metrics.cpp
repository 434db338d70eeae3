#include "boundsmith/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <iomanip>
#include <sstream>
#include <tuple>

#include "boundsmith/strategies.hpp"

namespace boundsmith {

nlohmann::ordered_json to_json(const MetricsRecord& r) {
  nlohmann::ordered_json j;
  j["model"] = r.model;
  j["mode"] = r.mode;
  j["size"] = r.size ? nlohmann::ordered_json(*r.size) : nlohmann::ordered_json(nullptr);
  j["numPrimary"] = r.numPrimary;
  j["numVars"] = r.numVars;
  j["numClauses"] = r.numClauses;
  j["numScenarios"] = r.numScenarios;
  j["avgDiscoveryMillis"] = r.avgDiscoveryMillis;
  j["totalMillis"] = r.totalMillis;
  j["solveCalls"] = r.solveCalls;
  j["timedOut"] = r.timedOut;
  if (r.timedOut) j["timeoutMillis"] = r.timeoutMillis;
  return j;
}

MetricsRecord metrics_from_json(const nlohmann::ordered_json& j) {
  MetricsRecord r;
  r.model = j.value("model", "");
  r.mode = j.value("mode", "");
  if (j.contains("size") && !j.at("size").is_null()) r.size = j.at("size").get<int>();
  r.numPrimary = j.value("numPrimary", 0);
  r.numVars = j.value("numVars", 0);
  r.numClauses = j.value("numClauses", 0);
  r.numScenarios = j.value("numScenarios", 0);
  r.avgDiscoveryMillis = j.value("avgDiscoveryMillis", 0.0);
  r.totalMillis = j.value("totalMillis", 0.0);
  r.solveCalls = j.value("solveCalls", std::uint64_t{0});
  r.timedOut = j.value("timedOut", false);
  r.timeoutMillis = j.value("timeoutMillis", 0);
  return r;
}

namespace {

struct Cell {
  const BenchModel* model;
  const Command* command;
  int scope;
  std::string mode;
  std::optional<int> size;
};

MetricsRecord run_cell(const Cell& cell, int timeoutMillis) {
  using Clock = std::chrono::steady_clock;
  Command cmd = *cell.command;
  cmd.scope = cell.scope;
  const Model& m = cell.model->model;
  std::unique_ptr<ScenarioStream> stream;
  if (cell.mode == "reach") stream = enumerate_reach(m, cmd, *cell.size);
  else if (cell.mode == "baseline") stream = enumerate_baseline(m, cmd, *cell.size);
  else stream = enumerate_analyzer_mode(m, cmd);

  auto deadline = Clock::now() + std::chrono::milliseconds(timeoutMillis);
  bool timedOut = false;
  while (stream->next()) {
    if (timeoutMillis > 0 && Clock::now() > deadline) {
      timedOut = true;
      break;
    }
  }
  MetricsRecord r = stream->metrics();
  r.model = cell.model->name;
  r.mode = cell.mode;
  r.size = cell.size;
  r.timedOut = timedOut;
  if (timedOut) r.timeoutMillis = timeoutMillis;
  return r;
}

std::string ms(double v) { return std::to_string(std::llround(v)); }

}  // namespace

std::vector<MetricsRecord> bench_run(const std::vector<BenchModel>& models, const BenchOptions& options) {
  std::vector<Cell> cells;
  for (const auto& bm : models) {
    if (bm.model.commands.empty()) continue;
    const Command* c = &bm.model.commands.front();
    int scope = options.scope.value_or(c->scope);
    for (const auto& mode : options.modes) {
      if (mode == "analyzer") {
        cells.push_back({&bm, c, scope, mode, std::nullopt});
      } else if (mode == "reach" || mode == "baseline") {
        for (int k = 0; k <= scope; ++k) cells.push_back({&bm, c, scope, mode, k});
      } else {
        throw std::invalid_argument("unknown mode '" + mode + "'");
      }
    }
  }
  std::vector<MetricsRecord> out;
  if (options.parallel) {
    std::vector<std::future<MetricsRecord>> futures;
    for (const auto& cell : cells)
      futures.push_back(std::async(std::launch::async, run_cell, cell, options.timeoutMillis));
    for (auto& f : futures) out.push_back(f.get());
  } else {
    for (const auto& cell : cells) out.push_back(run_cell(cell, options.timeoutMillis));
  }
  sort_records(out);
  return out;
}

void sort_records(std::vector<MetricsRecord>& records) {
  std::stable_sort(records.begin(), records.end(), [](const MetricsRecord& a, const MetricsRecord& b) {
    return std::tie(a.model, a.mode, a.size) < std::tie(b.model, b.mode, b.size);
  });
}

std::string report_csv(std::vector<MetricsRecord> records) {
  sort_records(records);
  std::ostringstream out;
  out << "model,mode,size,pv,vars,clauses,scenarios,avg_ms,total_ms\n";
  for (const auto& r : records) {
    out << r.model << ',' << r.mode << ',' << (r.size ? std::to_string(*r.size) : "") << ',' << r.numPrimary
        << ',' << r.numVars << ',' << r.numClauses << ',';
    if (r.timedOut) out << ",,\n";
    else out << r.numScenarios << ',' << ms(r.avgDiscoveryMillis) << ',' << ms(r.totalMillis) << '\n';
  }
  return out.str();
}

std::string report_table(std::vector<MetricsRecord> records) {
  sort_records(records);
  std::vector<std::vector<std::string>> rows{{"Model", "Mode", "Size", "#PV", "#Var", "#Cls", "#Scr", "T_avg", "T_tot"}};
  for (const auto& r : records) {
    std::vector<std::string> row{r.model, r.mode, r.size ? std::to_string(*r.size) : "-",
                                 std::to_string(r.numPrimary), std::to_string(r.numVars),
                                 std::to_string(r.numClauses)};
    if (r.timedOut) {
      row.push_back("TIMEOUT(" + std::to_string(r.timeoutMillis) + ")");
      row.push_back("-");
      row.push_back("-");
    } else {
      row.push_back(std::to_string(r.numScenarios));
      row.push_back(ms(r.avgDiscoveryMillis));
      row.push_back(ms(r.totalMillis));
    }
    rows.push_back(std::move(row));
  }
  std::vector<std::size_t> width(rows.front().size(), 0);
  for (const auto& row : rows)
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  std::ostringstream out;
  out << "# No symmetry breaking: counts include every labelling of each scenario. Times in ms.\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << "  ";
      if (i < 2) out << std::left;
      else out << std::right;
      out << std::setw(static_cast<int>(width[i])) << row[i];
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace boundsmith
