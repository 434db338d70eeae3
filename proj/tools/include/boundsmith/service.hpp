#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace boundsmith {

struct ServiceOptions {
  /// Every *.bsm file here is registered at startup under its file stem.
  std::optional<std::filesystem::path> modelsDir;
  /// Completed reach sessions are written here and replayed on later requests.
  std::optional<std::filesystem::path> cacheDir;
  /// Static files served at `/`.
  std::optional<std::filesystem::path> uiDir;
  bool storeScenarios = true;
};

/// JSON-over-HTTP facade for models and enumeration sessions. See docs/api.md.
class Service {
 public:
  explicit Service(ServiceOptions options = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Registers model text; returns its id. Throws ModelError.
  std::string add_model(const std::string& name, const std::string& source);

  /// Binds to `port` (0 picks a free one) and returns the bound port, or -1.
  int bind(const std::string& host, int port);
  /// Serves until stop(). Requires a successful bind().
  bool listen();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace boundsmith
