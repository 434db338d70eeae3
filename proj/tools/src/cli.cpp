#include "boundsmith/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "boundsmith/lang.hpp"
#include "boundsmith/metrics.hpp"
#include "boundsmith/service.hpp"
#include "boundsmith/strategies.hpp"

namespace boundsmith {

namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::stringstream text;
  text << in.rdbuf();
  return text.str();
}

struct SizeRange {
  int lo = 0;
  int hi = 0;
};

SizeRange parse_size(const std::string& text, int scope) {
  SizeRange r;
  try {
    auto dots = text.find("..");
    std::size_t used = 0;
    if (dots == std::string::npos) {
      r.lo = r.hi = std::stoi(text, &used);
      if (used != text.size()) throw UsageError("");
    } else {
      r.lo = std::stoi(text.substr(0, dots), &used);
      if (used != dots) throw UsageError("");
      r.hi = std::stoi(text.substr(dots + 2), &used);
      if (used != text.size() - dots - 2) throw UsageError("");
    }
  } catch (const std::exception&) {
    throw UsageError("--size expects N or A..B, got '" + text + "'");
  }
  if (r.lo < 0 || r.hi > scope || r.lo > r.hi)
    throw UsageError("--size " + text + " is outside 0.." + std::to_string(scope));
  return r;
}

std::string phase_summary(const std::vector<PhaseCount>& phases) {
  std::string out;
  for (const auto& p : phases) {
    if (!out.empty()) out += ", ";
    out += p.sig + " phase: " + std::to_string(p.found);
  }
  return out;
}

struct EnumerateArgs {
  std::string model;
  std::string command;
  std::string mode = "reach";
  std::string size;
  std::string format = "text";
  std::string dumpCnf;
  std::string dumpVarmap;
  std::string solverTrace;
  std::string cacheDir;
  bool storeScenarios = false;
  int timeoutMs = 0;
};

struct BenchArgs {
  std::vector<std::string> models;
  std::string modes = "reach,baseline,analyzer";
  int scope = -1;
  int timeoutMs = 0;
  std::string csv;
  bool parallel = false;
};

struct ServeArgs {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string models;
  std::string cacheDir;
  std::string ui;
};

int cmd_check(const std::string& path, std::ostream& out) {
  Model m = load_model(read_file(path));
  int fields = m.field_count();
  out << path << ": " << m.sigs.size() << " sigs, " << fields << " fields, " << m.commands.size()
      << (m.commands.size() == 1 ? " command" : " commands") << '\n';
  out << "  preds: " << m.preds.size() << ", facts: " << m.facts.size() << '\n';
  for (const auto& c : m.commands) out << "  run " << c.name << " for " << c.scope << '\n';
  return kExitOk;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw UsageError("cannot write " + path);
  f << text;
}

std::string dump_path(const std::string& base, int size, bool many) {
  return many ? base + "." + std::to_string(size) : base;
}

void emit(const Model& m, const Scenario& s, const std::string& format, std::ostream& out) {
  if (format == "scenario-doc") out << to_json(s).dump() << '\n';
  else if (format == "dot") out << to_dot(m, s);
  else out << to_text(s);
}

int cmd_enumerate(const EnumerateArgs& a, std::ostream& out, std::ostream& err) {
  Model m = load_model(read_file(a.model));
  if (m.commands.empty()) throw UsageError(a.model + " has no run command");
  const Command* c = a.command.empty() ? &m.commands.front() : m.find_command(a.command);
  if (!c) throw UsageError("no command named '" + a.command + "'");
  std::string name = fs::path(a.model).stem().string();

  std::vector<std::optional<int>> sizes;
  if (a.mode == "analyzer") {
    if (!a.size.empty()) throw UsageError("analyzer mode enumerates the whole scope; drop --size");
    sizes.push_back(std::nullopt);
  } else {
    SizeRange r = a.size.empty() ? SizeRange{0, c->scope} : parse_size(a.size, c->scope);
    for (int k = r.lo; k <= r.hi; ++k) sizes.push_back(k);
  }
  if (!a.cacheDir.empty() && a.mode != "reach") throw UsageError("--cache-dir applies to reach mode only");

  std::ofstream trace;
  if (!a.solverTrace.empty()) {
    trace.open(a.solverTrace, std::ios::trunc);
    if (!trace) throw UsageError("cannot write " + a.solverTrace);
  }
  std::optional<DeepeningState> deepening;
  if (!a.cacheDir.empty()) deepening = start_deepening(m, *c, fs::path(a.cacheDir));

  using Clock = std::chrono::steady_clock;
  std::vector<MetricsRecord> records;
  std::vector<std::string> counts;
  bool timedOut = false;
  const bool many = sizes.size() > 1;
  for (const auto& size : sizes) {
    std::unique_ptr<ScenarioStream> stream;
    bool cached = false;
    if (deepening && deepening->completed.count(*size)) {
      stream = replay(deepening->completed.at(*size));
      cached = stream != nullptr;
    }
    if (!stream) {
      if (a.mode == "reach") stream = enumerate_reach(m, *c, *size, name);
      else if (a.mode == "baseline") stream = enumerate_baseline(m, *c, *size, name);
      else stream = enumerate_analyzer_mode(m, *c, name);
    }
    if (trace.is_open()) stream->set_trace(&trace);
    if (const CnfDocument* cnf = stream->cnf()) {
      int k = size.value_or(c->scope);
      if (!a.dumpCnf.empty()) write_text(dump_path(a.dumpCnf, k, many), cnf->to_dimacs());
      if (!a.dumpVarmap.empty()) write_text(dump_path(a.dumpVarmap, k, many), cnf->symbols.dump(cnf->universe));
    }

    auto deadline = Clock::now() + std::chrono::milliseconds(a.timeoutMs);
    std::vector<Scenario> found;
    bool cellTimeout = false;
    while (auto s = stream->next()) {
      emit(m, *s, a.format, out);
      found.push_back(std::move(*s));
      if (a.timeoutMs > 0 && Clock::now() > deadline) {
        cellTimeout = true;
        break;
      }
    }
    MetricsRecord r = stream->metrics();
    r.model = name;
    r.mode = a.mode;
    r.size = size;
    if (cellTimeout) {
      r.timedOut = true;
      r.timeoutMillis = a.timeoutMs;
    }
    records.push_back(r);

    std::string label = size ? "size " + std::to_string(*size) : "scope " + std::to_string(c->scope);
    err << label << ": " << found.size() << (found.size() == 1 ? " scenario" : " scenarios");
    if (cellTimeout) err << " (timed out)";
    if (cached) err << " (from cache)";
    auto phases = stream->phase_counts();
    if (!phases.empty()) err << "; " << phase_summary(phases);
    err << '\n';
    counts.push_back(label + "=" + std::to_string(found.size()));

    if (cellTimeout) {
      timedOut = true;
      break;
    }
    if (deepening && !cached && a.mode == "reach") {
      std::optional<std::vector<Scenario>> keep;
      if (a.storeScenarios) keep = std::move(found);
      record_completion(*deepening, *stream, *size, std::move(keep));
    }
  }
  if (many) {
    err << "counts:";
    for (const auto& c2 : counts) err << ' ' << c2;
    err << '\n';
  }
  err << report_table(records);
  return timedOut ? kExitTimeout : kExitOk;
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<fs::path> files;
  for (const auto& p : a.models) {
    if (fs::is_directory(p)) {
      for (const auto& e : fs::directory_iterator(p))
        if (e.path().extension() == ".bsm") files.push_back(e.path());
    } else if (fs::exists(p)) {
      files.push_back(p);
    } else {
      throw UsageError("no such model file or directory: " + p);
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw UsageError("no .bsm models found");

  std::vector<BenchModel> models;
  for (const auto& f : files) {
    try {
      models.push_back({f.stem().string(), load_model(read_file(f.string()))});
    } catch (const ModelError& e) {
      err << f.string() << ':' << e.what() << '\n';
      return kExitModel;
    }
  }
  BenchOptions options;
  options.modes = split_csv(a.modes);
  for (const auto& mode : options.modes)
    if (mode != "reach" && mode != "baseline" && mode != "analyzer")
      throw UsageError("unknown mode '" + mode + "'");
  if (a.scope >= 0) options.scope = a.scope;
  options.timeoutMillis = a.timeoutMs;
  options.parallel = a.parallel;

  auto records = bench_run(models, options);
  std::string csv = report_csv(records);
  if (!a.csv.empty()) write_text(a.csv, csv);
  else out << csv;
  if (a.parallel) err << "# --parallel: timings are not comparable across cells\n";
  err << report_table(records);
  bool anyTimeout = std::any_of(records.begin(), records.end(), [](const MetricsRecord& r) { return r.timedOut; });
  return anyTimeout ? kExitTimeout : kExitOk;
}

Service* g_service = nullptr;

int cmd_serve(const ServeArgs& a, std::ostream& err) {
  ServiceOptions options;
  if (!a.models.empty()) options.modelsDir = a.models;
  if (!a.cacheDir.empty()) options.cacheDir = a.cacheDir;
  if (!a.ui.empty()) options.uiDir = a.ui;
  Service service(options);
  int port = service.bind(a.host, a.port);
  if (port < 0) {
    err << "cannot bind " << a.host << ':' << a.port << '\n';
    return kExitUsage;
  }
  err << "listening on http://" << a.host << ':' << port << '\n';
  g_service = &service;
  std::signal(SIGINT, [](int) {
    if (g_service) g_service->stop();
  });
  service.listen();
  g_service = nullptr;
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bounded relational model finder with size-staged scenario enumeration", "boundsmith"};
  app.require_subcommand(1);

  std::string checkPath;
  auto* check = app.add_subcommand("check", "Parse and resolve a model, print a summary");
  check->add_option("model", checkPath, "Model file (.bsm)")->required();

  EnumerateArgs en;
  auto* enumerate = app.add_subcommand("enumerate", "Enumerate the scenarios of a command");
  enumerate->add_option("model", en.model, "Model file (.bsm)")->required();
  enumerate->add_option("--command", en.command, "Command name (default: first command)");
  enumerate->add_option("--mode", en.mode, "reach, baseline or analyzer")
      ->check(CLI::IsMember({"reach", "baseline", "analyzer"}));
  enumerate->add_option("--size", en.size, "Size N or range A..B (default 0..scope)");
  enumerate->add_option("--format", en.format, "text, scenario-doc or dot")
      ->check(CLI::IsMember({"text", "scenario-doc", "dot"}));
  enumerate->add_option("--dump-cnf", en.dumpCnf, "Write the DIMACS translation (suffixed .<size> for ranges)");
  enumerate->add_option("--dump-varmap", en.dumpVarmap, "Write the primary variable map");
  enumerate->add_option("--solver-trace", en.solverTrace, "Write a decision/propagate/conflict/learn log");
  enumerate->add_option("--cache-dir", en.cacheDir, "Reuse and record completed sizes (reach mode)");
  enumerate->add_flag("--store-scenarios", en.storeScenarios, "Keep scenario lists in the cache");
  enumerate->add_option("--timeout-ms", en.timeoutMs, "Stop a size after this many milliseconds")
      ->check(CLI::NonNegativeNumber);

  BenchArgs bn;
  auto* bench = app.add_subcommand("bench", "Measure every (model, mode, size) cell");
  bench->add_option("--models", bn.models, "Model directories or files")->required();
  bench->add_option("--modes", bn.modes, "Comma-separated modes");
  bench->add_option("--scope", bn.scope, "Override every command scope")->check(CLI::NonNegativeNumber);
  bench->add_option("--timeout-ms", bn.timeoutMs, "Per-cell limit")->check(CLI::NonNegativeNumber);
  bench->add_option("--csv", bn.csv, "Write CSV here instead of stdout");
  bench->add_flag("--parallel", bn.parallel, "Run cells concurrently");

  ServeArgs sv;
  auto* serve = app.add_subcommand("serve", "Start the HTTP service");
  serve->add_option("--host", sv.host, "Listen address");
  serve->add_option("--port", sv.port, "Port (0 picks a free one)")->check(CLI::Range(0, 65535));
  serve->add_option("--models", sv.models, "Preload every .bsm file in this directory");
  serve->add_option("--cache-dir", sv.cacheDir, "Result cache directory");
  serve->add_option("--ui", sv.ui, "Static UI bundle served at /");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*check) return cmd_check(checkPath, out);
    if (*enumerate) return cmd_enumerate(en, out, err);
    if (*bench) return cmd_bench(bn, out, err);
    if (*serve) return cmd_serve(sv, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ModelError& e) {
    std::string path = *check ? checkPath : en.model;
    err << path << ':' << e.what() << '\n';
    return kExitModel;
  }
  return kExitUsage;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, out, err);
}

}  // namespace boundsmith
