#include "boundsmith/strategies.hpp"

#include <openssl/evp.h>
#include <unistd.h>

#include <atomic>
#include <fstream>
#include <sstream>
#include <system_error>

#include "boundsmith/lang.hpp"
#include "boundsmith/translator.hpp"

namespace boundsmith {

namespace fs = std::filesystem;

std::unique_ptr<ScenarioStream> enumerate_analyzer_mode(const Model& m, const Command& c, std::string modelName) {
  return std::make_unique<PlainEnumeration>(m, c, c.scope, "analyzer", std::nullopt, std::move(modelName));
}

std::unique_ptr<EnumerationSession> enumerate_reach(const Model& m, const Command& c, int k, std::string modelName) {
  return std::make_unique<EnumerationSession>(m, c, k, std::move(modelName));
}

Command baseline_augment(const Model& m, const Command& c, int k) {
  if (k < 1) throw std::invalid_argument("baseline_augment: size must be at least 1");
  std::vector<std::string> roots;
  for (auto it = m.sigs.rbegin(); it != m.sigs.rend(); ++it)
    if (it->top_level()) roots.push_back(it->name);

  std::vector<Formula> exact;
  for (const auto& name : roots) exact.push_back(Formula::card(Expr::ref(ExprKind::Name, name), CmpOp::Eq, k));
  std::vector<Formula> parts{c.body, Formula::disj(std::move(exact))};
  if (roots.size() > 1)
    for (const auto& name : roots) {
      if (m.find_sig(name)->isOne) continue;
      parts.push_back(Formula::card(Expr::ref(ExprKind::Name, name), CmpOp::Le, k));
    }
  Command out = c;
  out.body = resolve_formula(m, Formula::conj(std::move(parts)));
  return out;
}

std::unique_ptr<ScenarioStream> enumerate_baseline(const Model& m, const Command& c, int k, std::string modelName) {
  if (k == 0) return std::make_unique<EnumerationSession>(m, c, 0, std::move(modelName));
  return std::make_unique<PlainEnumeration>(m, baseline_augment(m, c, k), c.scope, "baseline", k,
                                            std::move(modelName));
}

std::string model_hash(const Model& m, const Command& c) {
  std::string text = m.source.empty() ? print_model(m) : m.source;
  if (!m.source.empty() && c.scopeLength > 0 && c.scopeOffset + c.scopeLength <= text.size())
    text.replace(c.scopeOffset, c.scopeLength, "#");
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static const char* kHex = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < 8 && i < len; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 15];
  }
  return hex;
}

// ---------------------------------------------------------------------------
// Cache

fs::path ResultCache::entry_path(const std::string& hash, const std::string& command, int size,
                                 const char* ext) const {
  return dir_ / hash / command / (std::to_string(size) + ext);
}

bool ResultCache::contains(const std::string& hash, const std::string& command, int size) const {
  return fs::exists(entry_path(hash, command, size, ".meta"));
}

namespace {

void write_atomically(const fs::path& target, const std::string& content) {
  fs::create_directories(target.parent_path());
  static std::atomic<unsigned> counter{0};
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, target);
}

}  // namespace

std::optional<CacheEntry> ResultCache::load(const std::string& hash, const std::string& command, int size) const {
  auto metaPath = entry_path(hash, command, size, ".meta");
  std::ifstream meta(metaPath);
  if (!meta) return std::nullopt;
  auto doc = nlohmann::ordered_json::parse(meta);
  CacheEntry entry;
  entry.metrics = metrics_from_json(doc.at("metrics"));
  for (const auto& p : doc.at("phases")) entry.phases.push_back({p.at("sig"), p.at("found")});
  if (doc.value("hasScenarios", false)) {
    std::ifstream scen(entry_path(hash, command, size, ".scen"));
    if (!scen) return std::nullopt;
    std::vector<Scenario> list;
    std::string line;
    while (std::getline(scen, line))
      if (!line.empty()) list.push_back(scenario_from_json(nlohmann::ordered_json::parse(line)));
    entry.scenarios = std::move(list);
  }
  return entry;
}

bool ResultCache::store(const std::string& hash, const std::string& command, int size, const CacheEntry& entry) const {
  if (contains(hash, command, size)) return false;
  if (entry.scenarios) {
    std::string lines;
    for (const auto& s : *entry.scenarios) lines += to_json(s).dump() + "\n";
    write_atomically(entry_path(hash, command, size, ".scen"), lines);
  }
  nlohmann::ordered_json doc;
  doc["size"] = size;
  doc["count"] = entry.metrics.numScenarios;
  doc["hasScenarios"] = entry.scenarios.has_value();
  doc["phases"] = nlohmann::ordered_json::array();
  for (const auto& p : entry.phases) doc["phases"].push_back({{"sig", p.sig}, {"found", p.found}});
  doc["metrics"] = to_json(entry.metrics);
  // .meta is the commit marker, so it goes last.
  write_atomically(entry_path(hash, command, size, ".meta"), doc.dump(2) + "\n");
  return true;
}

// ---------------------------------------------------------------------------
// Deepening

DeepeningState start_deepening(const Model& m, const Command& c, std::optional<fs::path> cacheDir) {
  DeepeningState st;
  st.modelHash = model_hash(m, c);
  st.command = c.name;
  st.cacheDir = std::move(cacheDir);
  if (st.cacheDir) {
    ResultCache cache(*st.cacheDir);
    for (int k = 0;; ++k) {
      auto entry = cache.load(st.modelHash, c.name, k);
      if (!entry) break;
      st.completed[k] = std::move(*entry);
    }
  }
  return st;
}

std::vector<std::unique_ptr<EnumerationSession>> deepen(const DeepeningState& st, const Model& m, int newScope,
                                                        std::string modelName) {
  const Command* c = m.find_command(st.command);
  if (!c) throw StaleStateError("command '" + st.command + "' no longer exists");
  if (model_hash(m, *c) != st.modelHash) throw StaleStateError("model changed since the last run; restart");
  if (newScope < st.max_completed())
    throw StaleStateError("scope " + std::to_string(newScope) + " is below the completed size " +
                          std::to_string(st.max_completed()));
  Command cmd = *c;
  cmd.scope = std::max(newScope, 1);
  std::vector<std::unique_ptr<EnumerationSession>> out;
  for (int k = st.max_completed() + 1; k <= newScope; ++k)
    out.push_back(std::make_unique<EnumerationSession>(m, cmd, k, modelName));
  return out;
}

void record_completion(DeepeningState& st, const ScenarioStream& session, int size,
                       std::optional<std::vector<Scenario>> scenarios) {
  CacheEntry entry;
  entry.metrics = session.metrics();
  entry.phases = session.phase_counts();
  entry.scenarios = std::move(scenarios);
  if (st.cacheDir) ResultCache(*st.cacheDir).store(st.modelHash, st.command, size, entry);
  st.completed[size] = std::move(entry);
}

std::unique_ptr<ScenarioStream> replay(const CacheEntry& entry) {
  if (!entry.scenarios) return nullptr;
  return std::make_unique<CachedStream>(*entry.scenarios, entry.metrics, entry.phases);
}

}  // namespace boundsmith
