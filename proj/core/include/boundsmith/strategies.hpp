#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "boundsmith/enumerator.hpp"
#include "boundsmith/model.hpp"

namespace boundsmith {

/// Whole-scope enumeration: one translation at the command scope, no size forcing.
std::unique_ptr<ScenarioStream> enumerate_analyzer_mode(const Model& m, const Command& c,
                                                        std::string modelName = {});

/// Staged enumeration of the size-k scenarios.
std::unique_ptr<EnumerationSession> enumerate_reach(const Model& m, const Command& c, int k,
                                                    std::string modelName = {});

/// Conjoins `(#Sn = k or ... or #S1 = k) and (#Sn <= k) and ... and (#S1 <= k)` over the
/// top-level signatures (last declared first) to the command body. The `<=` conjuncts are
/// left out when there is a single signature.
Command baseline_augment(const Model& m, const Command& c, int k);

/// All-SAT over baseline_augment(m, c, k), translated at the full command scope. k = 0
/// falls back to the size-0 session.
std::unique_ptr<ScenarioStream> enumerate_baseline(const Model& m, const Command& c, int k,
                                                   std::string modelName = {});

/// SHA-256 of the model text with the command's scope literal replaced by `#`, as 16 hex
/// digits. Scope-only edits keep the hash.
std::string model_hash(const Model& m, const Command& c);

struct CacheEntry {
  MetricsRecord metrics;
  std::vector<PhaseCount> phases;
  std::optional<std::vector<Scenario>> scenarios;
};

/// On-disk results: <dir>/<hash>/<command>/<size>.meta and .scen. Entries are written
/// once, via a temporary file and rename.
class ResultCache {
 public:
  explicit ResultCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::filesystem::path& dir() const { return dir_; }
  bool contains(const std::string& hash, const std::string& command, int size) const;
  std::optional<CacheEntry> load(const std::string& hash, const std::string& command, int size) const;
  /// Returns false when the entry already existed.
  bool store(const std::string& hash, const std::string& command, int size, const CacheEntry& entry) const;

 private:
  std::filesystem::path entry_path(const std::string& hash, const std::string& command, int size,
                                   const char* ext) const;
  std::filesystem::path dir_;
};

class StaleStateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sizes already enumerated for one (model, command).
struct DeepeningState {
  std::string modelHash;
  std::string command;
  std::map<int, CacheEntry> completed;
  std::optional<std::filesystem::path> cacheDir;

  /// -1 when nothing is complete.
  int max_completed() const { return completed.empty() ? -1 : completed.rbegin()->first; }
};

/// Fresh state, seeded with the contiguous run of sizes 0, 1, ... found in the cache.
DeepeningState start_deepening(const Model& m, const Command& c,
                               std::optional<std::filesystem::path> cacheDir = std::nullopt);

/// Sessions for the sizes in (max_completed, newScope]; none when newScope is already
/// covered. Throws StaleStateError when the model hash changed or the scope shrank.
std::vector<std::unique_ptr<EnumerationSession>> deepen(const DeepeningState& st, const Model& m,
                                                        int newScope, std::string modelName = {});

/// Records a drained session (and writes it to the cache when one is configured).
void record_completion(DeepeningState& st, const ScenarioStream& session, int size,
                       std::optional<std::vector<Scenario>> scenarios);

/// Replays a completed size; nullptr when its scenarios were not stored.
std::unique_ptr<ScenarioStream> replay(const CacheEntry& entry);

}  // namespace boundsmith
