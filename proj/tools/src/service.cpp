#include "boundsmith/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <set>
#include <shared_mutex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "boundsmith/lang.hpp"
#include "boundsmith/strategies.hpp"

namespace boundsmith {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

const char* kJson = "application/json";

struct ModelEntry {
  std::string id;
  std::string name;
  Model model;
  std::mutex mu;  // guards deepening
  std::map<std::string, DeepeningState> deepening;
};

struct SessionEntry {
  std::string id;
  std::shared_ptr<ModelEntry> model;
  std::string command;
  std::string mode;
  std::optional<int> size;
  std::string createdAt;
  bool fromCache = false;

  std::mutex mu;  // serializes next() calls
  std::unique_ptr<ScenarioStream> stream;
  std::vector<Scenario> emitted;
  int found = 0;
  bool exhaustedReported = false;
};

std::string utc_now() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

Json error_body(const std::string& message) { return Json{{"error", message}}; }

void reply(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

}  // namespace

struct Service::Impl {
  ServiceOptions options;
  httplib::Server server;
  int port = -1;

  std::shared_mutex storeMu;
  std::map<std::string, std::shared_ptr<ModelEntry>> models;
  std::map<std::string, std::shared_ptr<SessionEntry>> sessions;
  std::atomic<int> nextModel{1};
  std::atomic<int> nextSession{1};

  explicit Impl(ServiceOptions opts) : options(std::move(opts)) { routes(); }

  std::shared_ptr<ModelEntry> find_model(const std::string& id) {
    std::shared_lock lock(storeMu);
    auto it = models.find(id);
    return it == models.end() ? nullptr : it->second;
  }

  std::shared_ptr<SessionEntry> find_session(const std::string& id) {
    std::shared_lock lock(storeMu);
    auto it = sessions.find(id);
    return it == sessions.end() ? nullptr : it->second;
  }

  std::string add_model(const std::string& name, const std::string& source) {
    auto entry = std::make_shared<ModelEntry>();
    entry->model = load_model(source);
    entry->name = name;
    std::unique_lock lock(storeMu);
    std::string id = name;
    if (id.empty() || models.count(id)) id = "m" + std::to_string(nextModel++);
    while (models.count(id)) id = "m" + std::to_string(nextModel++);
    entry->id = id;
    models[id] = entry;
    return id;
  }

  DeepeningState& deepening_for(ModelEntry& entry, const Command& c) {
    auto it = entry.deepening.find(c.name);
    if (it == entry.deepening.end())
      it = entry.deepening.emplace(c.name, start_deepening(entry.model, c, options.cacheDir)).first;
    return it->second;
  }

  Json model_summary(ModelEntry& entry) {
    Json j;
    j["modelId"] = entry.id;
    j["name"] = entry.name;
    auto& sigs = j["sigs"] = Json::array();
    for (const auto& s : entry.model.sigs) {
      Json sj{{"name", s.name}, {"abstract", s.isAbstract}, {"one", s.isOne}};
      sj["parent"] = s.parent ? Json(*s.parent) : Json(nullptr);
      sj["fields"] = Json::array();
      for (const auto& f : s.fields)
        sj["fields"].push_back({{"name", f.name}, {"mult", to_string(f.mult)}, {"target", f.target}});
      sigs.push_back(std::move(sj));
    }
    auto& cmds = j["commands"] = Json::array();
    std::lock_guard lock(entry.mu);
    for (const auto& c : entry.model.commands) {
      Json cj{{"name", c.name}, {"scope", c.scope}};
      cj["completedSizes"] = Json::array();
      for (int k : completed_sizes(entry, c)) cj["completedSizes"].push_back(k);
      cmds.push_back(std::move(cj));
    }
    return j;
  }

  // Caller holds entry.mu.
  std::vector<int> completed_sizes(ModelEntry& entry, const Command& c) {
    auto& st = deepening_for(entry, c);
    std::set<int> sizes;
    for (const auto& [k, e] : st.completed) sizes.insert(k);
    if (options.cacheDir) {
      ResultCache cache(*options.cacheDir);
      for (int k = 0; k <= c.scope; ++k)
        if (cache.contains(st.modelHash, c.name, k)) sizes.insert(k);
    }
    return {sizes.begin(), sizes.end()};
  }

  Json session_json(SessionEntry& s) {
    Json j;
    j["id"] = s.id;
    j["modelId"] = s.model->id;
    j["command"] = s.command;
    j["mode"] = s.mode;
    j["size"] = s.size ? Json(*s.size) : Json(nullptr);
    j["state"] = s.stream->state() == SessionState::Exhausted ? "exhausted" : "running";
    j["found"] = s.found;
    j["phases"] = Json::array();
    for (const auto& p : s.stream->phase_counts()) j["phases"].push_back({{"sig", p.sig}, {"found", p.found}});
    j["fromCache"] = s.fromCache;
    j["createdAt"] = s.createdAt;
    return j;
  }

  std::shared_ptr<SessionEntry> open_session(const std::shared_ptr<ModelEntry>& model, const Command& c,
                                             const std::string& mode, std::optional<int> size,
                                             std::unique_ptr<ScenarioStream> stream = nullptr) {
    auto s = std::make_shared<SessionEntry>();
    s->model = model;
    s->command = c.name;
    s->mode = mode;
    s->size = size;
    s->createdAt = utc_now();
    if (!stream && mode == "reach") {
      std::lock_guard lock(model->mu);
      auto& st = deepening_for(*model, c);
      if (auto it = st.completed.find(*size); it != st.completed.end()) {
        stream = replay(it->second);
      } else if (options.cacheDir) {
        // Sizes past a gap are not part of the deepening state but can still be replayed.
        if (auto entry = ResultCache(*options.cacheDir).load(st.modelHash, c.name, *size)) stream = replay(*entry);
      }
      s->fromCache = stream != nullptr;
    }
    if (!stream) {
      if (mode == "reach") stream = enumerate_reach(model->model, c, *size, model->name);
      else if (mode == "baseline") stream = enumerate_baseline(model->model, c, *size, model->name);
      else stream = enumerate_analyzer_mode(model->model, c, model->name);
    }
    s->stream = std::move(stream);
    std::unique_lock lock(storeMu);
    s->id = "s" + std::to_string(nextSession++);
    sessions[s->id] = s;
    return s;
  }

  void on_session_exhausted(SessionEntry& s) {
    if (s.mode != "reach" || s.fromCache) return;
    const Command* c = s.model->model.find_command(s.command);
    std::lock_guard lock(s.model->mu);
    auto& st = deepening_for(*s.model, *c);
    if (st.completed.count(*s.size)) return;
    std::optional<std::vector<Scenario>> scenarios;
    if (options.storeScenarios) scenarios = s.emitted;
    record_completion(st, *s.stream, *s.size, std::move(scenarios));
  }

  // -------------------------------------------------------------------------

  void routes() {
    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        reply(res, 500, error_body(e.what()));
      } catch (...) {
        reply(res, 500, error_body("internal error"));
      }
    });

    server.Post("/models", [this](const httplib::Request& req, httplib::Response& res) {
      std::string name = req.get_param_value("name");
      std::string source = req.body;
      if (req.get_header_value("Content-Type").rfind(kJson, 0) == 0) {
        auto body = Json::parse(req.body, nullptr, false);
        if (body.is_discarded() || !body.is_object() || !body.contains("source") || !body["source"].is_string())
          return reply(res, 400, error_body("expected {\"source\": <model text>}"));
        source = body["source"].get<std::string>();
        if (body.contains("name") && body["name"].is_string()) name = body["name"].get<std::string>();
      }
      try {
        auto id = add_model(name, source);
        reply(res, 201, model_summary(*find_model(id)));
      } catch (const ModelError& e) {
        Json err{{"line", e.pos().line}, {"column", e.pos().column}, {"kind", to_string(e.kind())},
                 {"message", e.message()}};
        reply(res, 422, Json{{"errors", Json::array({err})}});
      }
    });

    server.Get("/models", [this](const httplib::Request&, httplib::Response& res) {
      std::vector<std::shared_ptr<ModelEntry>> all;
      {
        std::shared_lock lock(storeMu);
        for (const auto& [id, m] : models) all.push_back(m);
      }
      Json list = Json::array();
      for (auto& m : all) list.push_back(model_summary(*m));
      reply(res, 200, Json{{"models", list}});
    });

    server.Get(R"(/models/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      auto m = find_model(req.matches[1]);
      if (!m) return reply(res, 404, error_body("unknown model"));
      reply(res, 200, model_summary(*m));
    });

    server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
      auto body = Json::parse(req.body, nullptr, false);
      if (body.is_discarded() || !body.is_object() || !body.contains("modelId") || !body["modelId"].is_string())
        return reply(res, 400, error_body("expected {\"modelId\", \"command\", \"size\", \"mode\"}"));
      auto m = find_model(body["modelId"].get<std::string>());
      if (!m) return reply(res, 404, error_body("unknown model"));
      std::string mode = body.value("mode", "reach");
      if (mode != "reach" && mode != "baseline" && mode != "analyzer")
        return reply(res, 400, error_body("mode must be reach, baseline or analyzer"));
      const Command* c = nullptr;
      if (body.contains("command") && !body["command"].is_null()) {
        if (!body["command"].is_string()) return reply(res, 400, error_body("command must be a string"));
        c = m->model.find_command(body["command"].get<std::string>());
        if (!c) return reply(res, 404, error_body("unknown command"));
      } else if (!m->model.commands.empty()) {
        c = &m->model.commands.front();
      } else {
        return reply(res, 400, error_body("model has no commands"));
      }
      std::optional<int> size;
      if (body.contains("size") && !body["size"].is_null()) {
        if (!body["size"].is_number_integer()) return reply(res, 400, error_body("size must be an integer"));
        size = body["size"].get<int>();
      }
      if (mode == "analyzer") {
        if (size) return reply(res, 400, error_body("analyzer mode takes no size"));
      } else if (!size || *size < 0 || *size > c->scope) {
        return reply(res, 400, error_body("size must be within 0.." + std::to_string(c->scope)));
      }
      auto s = open_session(m, *c, mode, size);
      std::lock_guard lock(s->mu);
      reply(res, 201, session_json(*s));
    });

    server.Get("/sessions", [this](const httplib::Request&, httplib::Response& res) {
      std::vector<std::shared_ptr<SessionEntry>> all;
      {
        std::shared_lock lock(storeMu);
        for (const auto& [id, s] : sessions) all.push_back(s);
      }
      Json list = Json::array();
      for (auto& s : all) {
        std::lock_guard lock(s->mu);
        list.push_back(session_json(*s));
      }
      reply(res, 200, Json{{"sessions", list}});
    });

    server.Post(R"(/sessions/([^/]+)/next)", [this](const httplib::Request& req, httplib::Response& res) {
      auto s = find_session(req.matches[1]);
      if (!s) return reply(res, 404, error_body("unknown session"));
      std::lock_guard lock(s->mu);
      if (s->exhaustedReported) return reply(res, 409, Json{{"status", "exhausted"}, {"session", session_json(*s)}});
      if (auto scenario = s->stream->next()) {
        ++s->found;
        s->emitted.push_back(*scenario);
        return reply(res, 200, Json{{"status", "scenario"}, {"scenario", to_json(*scenario)}});
      }
      s->exhaustedReported = true;
      on_session_exhausted(*s);
      reply(res, 200, Json{{"status", "exhausted"}, {"session", session_json(*s)}});
    });

    server.Get(R"(/sessions/([^/]+)/metrics)", [this](const httplib::Request& req, httplib::Response& res) {
      auto s = find_session(req.matches[1]);
      if (!s) return reply(res, 404, error_body("unknown session"));
      std::lock_guard lock(s->mu);
      reply(res, 200, to_json(s->stream->metrics()));
    });

    server.Get(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      auto s = find_session(req.matches[1]);
      if (!s) return reply(res, 404, error_body("unknown session"));
      std::lock_guard lock(s->mu);
      reply(res, 200, session_json(*s));
    });

    server.Delete(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      std::shared_ptr<SessionEntry> s;
      {
        std::unique_lock lock(storeMu);
        auto it = sessions.find(req.matches[1]);
        if (it == sessions.end()) return reply(res, 404, error_body("unknown session"));
        s = it->second;
        sessions.erase(it);
      }
      std::lock_guard lock(s->mu);  // let an in-flight next() finish
      res.status = 204;
    });

    server.Post(R"(/models/([^/]+)/deepen)", [this](const httplib::Request& req, httplib::Response& res) {
      auto m = find_model(req.matches[1]);
      if (!m) return reply(res, 404, error_body("unknown model"));
      auto body = Json::parse(req.body, nullptr, false);
      if (body.is_discarded() || !body.is_object() || !body.contains("newScope") ||
          !body["newScope"].is_number_integer())
        return reply(res, 400, error_body("expected {\"command\", \"newScope\"}"));
      const Command* c = m->model.commands.empty() ? nullptr : &m->model.commands.front();
      if (body.contains("command") && body["command"].is_string()) c = m->model.find_command(body["command"]);
      if (!c) return reply(res, 404, error_body("unknown command"));
      int newScope = body["newScope"].get<int>();
      if (newScope < 0) return reply(res, 400, error_body("newScope must be non-negative"));

      std::vector<std::unique_ptr<EnumerationSession>> fresh;
      try {
        std::lock_guard lock(m->mu);
        fresh = deepen(deepening_for(*m, *c), m->model, newScope, m->name);
      } catch (const StaleStateError& e) {
        return reply(res, 409, error_body(e.what()));
      }
      Json list = Json::array();
      for (auto& session : fresh) {
        int k = session->target_size();
        auto s = open_session(m, *c, "reach", k, std::move(session));
        std::lock_guard lock(s->mu);
        list.push_back(session_json(*s));
      }
      reply(res, 201, Json{{"sessions", list}});
    });

    if (options.uiDir) server.set_mount_point("/", options.uiDir->string());
  }
};

Service::Service(ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {
  if (impl_->options.modelsDir) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(*impl_->options.modelsDir))
      if (e.path().extension() == ".bsm") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
      std::ifstream in(path);
      std::stringstream text;
      text << in.rdbuf();
      add_model(path.stem().string(), text.str());
    }
  }
}

Service::~Service() { stop(); }

std::string Service::add_model(const std::string& name, const std::string& source) {
  return impl_->add_model(name, source);
}

int Service::bind(const std::string& host, int port) {
  if (port == 0) impl_->port = impl_->server.bind_to_any_port(host);
  else impl_->port = impl_->server.bind_to_port(host, port) ? port : -1;
  return impl_->port;
}

bool Service::listen() { return impl_->server.listen_after_bind(); }

void Service::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

void Service::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace boundsmith
