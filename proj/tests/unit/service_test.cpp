#include <gtest/gtest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "boundsmith/sat.hpp"
#include "boundsmith/service.hpp"
#include "oracle.hpp"

using namespace boundsmith;
using Json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

class Server {
 public:
  explicit Server(ServiceOptions options = {}) : service_(std::move(options)) {
    port_ = service_.bind("127.0.0.1", 0);
    thread_ = std::thread([this] { service_.listen(); });
    service_.wait_until_ready();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
  }
  ~Server() {
    service_.stop();
    thread_.join();
  }

  Service& service() { return service_; }
  int port() const { return port_; }

  std::pair<int, Json> post(const std::string& path, const Json& body) {
    return unpack(client_->Post(path, body.dump(), "application/json"));
  }
  std::pair<int, Json> post_text(const std::string& path, const std::string& text) {
    return unpack(client_->Post(path, text, "text/plain"));
  }
  std::pair<int, Json> get(const std::string& path) { return unpack(client_->Get(path)); }
  int del(const std::string& path) {
    auto r = client_->Delete(path);
    return r ? r->status : -1;
  }

 private:
  static std::pair<int, Json> unpack(const httplib::Result& r) {
    if (!r) return {-1, Json()};
    return {r->status, r->body.empty() ? Json() : Json::parse(r->body)};
  }

  Service service_;
  int port_ = -1;
  std::thread thread_;
  std::unique_ptr<httplib::Client> client_;
};

ServiceOptions with_models() {
  ServiceOptions o;
  o.modelsDir = BOUNDSMITH_MODELS_DIR;
  return o;
}

std::string open(Server& srv, int size, const std::string& model = "sll") {
  auto [code, body] = srv.post("/sessions", {{"modelId", model}, {"command", "acyclic"}, {"size", size}});
  EXPECT_EQ(code, 201) << body;
  return body.value("id", "");
}

fs::path temp_dir(const std::string& tag) {
  auto p = fs::temp_directory_path() / ("boundsmith-svc-" + tag + "-" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Service, PreloadedModels) {
  Server srv(with_models());
  auto [code, body] = srv.get("/models");
  ASSERT_EQ(code, 200);
  ASSERT_EQ(body["models"].size(), 4u);
  auto [c2, sll] = srv.get("/models/sll");
  ASSERT_EQ(c2, 200);
  EXPECT_EQ(sll["commands"][0]["name"], "acyclic");
  EXPECT_EQ(sll["commands"][0]["scope"], 3);
  EXPECT_EQ(sll["sigs"][0]["fields"][0]["mult"], "lone");
  EXPECT_EQ(srv.get("/models/nope").first, 404);
}

TEST(Service, UploadModel) {
  Server srv;
  auto [code, body] = srv.post("/models", {{"name", "tiny"}, {"source", "sig A {}\nrun {} for 2\n"}});
  EXPECT_EQ(code, 201);
  EXPECT_EQ(body["modelId"], "tiny");
  auto [c2, b2] = srv.post_text("/models", "sig B {}\nrun {} for 1\n");
  EXPECT_EQ(c2, 201);
  EXPECT_EQ(b2["modelId"].get<std::string>().rfind("m", 0), 0u);
}

TEST(Service, UploadWithErrors) {
  Server srv;
  auto [code, body] = srv.post("/models", {{"source", "sig A {}\nfact { some B }\n"}});
  ASSERT_EQ(code, 422);
  auto err = body["errors"][0];
  EXPECT_EQ(err["line"], 2);
  EXPECT_EQ(err["column"], 13);
  EXPECT_EQ(err["kind"], "unknown-name");
  EXPECT_EQ(srv.post("/models", {{"text", "x"}}).first, 400);
}

TEST(Service, SizeOneWalkthrough) {
  Server srv(with_models());
  std::string id = open(srv, 1);
  std::vector<std::string> phases;
  for (int i = 0; i < 6; ++i) {
    auto [code, body] = srv.post("/sessions/" + id + "/next", Json::object());
    ASSERT_EQ(code, 200);
    ASSERT_EQ(body["status"], "scenario");
    EXPECT_EQ(body["scenario"]["size"], 1);
    EXPECT_EQ(body["scenario"]["ordinal"], i);
    phases.push_back(body["scenario"]["phase"]);
  }
  EXPECT_EQ(phases, (std::vector<std::string>{"List", "List", "List", "List", "Node", "Node"}));
  auto [code, body] = srv.post("/sessions/" + id + "/next", Json::object());
  ASSERT_EQ(code, 200);
  EXPECT_EQ(body["status"], "exhausted");
  EXPECT_EQ(body["session"]["found"], 6);
  EXPECT_EQ(body["session"]["state"], "exhausted");
  EXPECT_EQ(body["session"]["phases"][0]["found"], 4);
  EXPECT_EQ(srv.post("/sessions/" + id + "/next", Json::object()).first, 409);

  auto [mc, metrics] = srv.get("/sessions/" + id + "/metrics");
  EXPECT_EQ(mc, 200);
  EXPECT_EQ(metrics["numScenarios"], 6);
  EXPECT_EQ(metrics["numPrimary"], 4);

  auto [sc, summary] = srv.get("/models/sll");
  EXPECT_EQ(summary["commands"][0]["completedSizes"], Json::array({1}));
}

TEST(Service, InterleavedSessionsMatchSoloRuns) {
  Server srv(with_models());
  auto drain_solo = [&](int size) {
    std::string id = open(srv, size);
    std::vector<Json> out;
    for (;;) {
      auto [code, body] = srv.post("/sessions/" + id + "/next", Json::object());
      if (body["status"] != "scenario") break;
      out.push_back(body["scenario"]);
    }
    return out;
  };
  auto solo1 = drain_solo(1);
  auto solo2 = drain_solo(2);

  Server fresh(with_models());
  std::string a = open(fresh, 1), b = open(fresh, 2);
  std::vector<Json> got1, got2;
  bool doneA = false, doneB = false;
  while (!doneA || !doneB) {
    if (!doneA) {
      auto [c, body] = fresh.post("/sessions/" + a + "/next", Json::object());
      if (body["status"] == "scenario") got1.push_back(body["scenario"]);
      else doneA = true;
    }
    for (int i = 0; i < 3 && !doneB; ++i) {
      auto [c, body] = fresh.post("/sessions/" + b + "/next", Json::object());
      if (body["status"] == "scenario") got2.push_back(body["scenario"]);
      else doneB = true;
    }
  }
  EXPECT_EQ(got1, solo1);
  EXPECT_EQ(got2, solo2);
  EXPECT_EQ(got2.size(), 93u);
}

TEST(Service, ConcurrentNextCallsOnOneSession) {
  Server srv(with_models());
  std::string id = open(srv, 2);
  std::atomic<int> scenarios{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t)
    threads.emplace_back([&] {
      httplib::Client c("127.0.0.1", srv.port());
      for (;;) {
        auto r = c.Post("/sessions/" + id + "/next", "{}", "application/json");
        if (!r || r->status != 200) break;
        if (Json::parse(r->body)["status"] != "scenario") break;
        ++scenarios;
      }
    });
  for (auto& t : threads) t.join();
  EXPECT_EQ(scenarios.load(), 93);
}

TEST(Service, SessionValidation) {
  Server srv(with_models());
  EXPECT_EQ(srv.post("/sessions", {{"modelId", "nope"}, {"size", 1}}).first, 404);
  EXPECT_EQ(srv.post("/sessions", {{"modelId", "sll"}, {"command", "nope"}, {"size", 1}}).first, 404);
  EXPECT_EQ(srv.post("/sessions", {{"modelId", "sll"}, {"size", 4}}).first, 400);
  EXPECT_EQ(srv.post("/sessions", {{"modelId", "sll"}, {"size", -1}}).first, 400);
  EXPECT_EQ(srv.post("/sessions", {{"modelId", "sll"}}).first, 400);
  EXPECT_EQ(srv.post("/sessions", {{"modelId", "sll"}, {"size", 1}, {"mode", "fast"}}).first, 400);
  EXPECT_EQ(srv.post("/sessions", {{"modelId", "sll"}, {"size", 1}, {"mode", "analyzer"}}).first, 400);
  EXPECT_EQ(srv.post("/sessions", {{"size", 1}}).first, 400);
  EXPECT_EQ(srv.post("/sessions/s999/next", Json::object()).first, 404);
  EXPECT_EQ(srv.get("/sessions/s999").first, 404);
}

TEST(Service, OtherModes) {
  Server srv(with_models());
  auto [code, body] = srv.post("/sessions", {{"modelId", "classes"}, {"mode", "analyzer"}});
  ASSERT_EQ(code, 201);
  EXPECT_TRUE(body["size"].is_null());
  int n = 0;
  while (srv.post("/sessions/" + body["id"].get<std::string>() + "/next", Json::object()).second["status"] ==
         "scenario")
    ++n;
  EXPECT_EQ(n, 6);
  auto [bc, bb] = srv.post("/sessions", {{"modelId", "sll"}, {"mode", "baseline"}, {"size", 1}});
  EXPECT_EQ(bc, 201);
  EXPECT_EQ(bb["mode"], "baseline");
}

TEST(Service, ListAndDeleteSessions) {
  Server srv(with_models());
  std::string a = open(srv, 0), b = open(srv, 1);
  auto [code, list] = srv.get("/sessions");
  EXPECT_EQ(list["sessions"].size(), 2u);
  EXPECT_EQ(srv.del("/sessions/" + a), 204);
  EXPECT_EQ(srv.del("/sessions/" + a), 404);
  EXPECT_EQ(srv.get("/sessions/" + a).first, 404);
  auto [c2, one] = srv.get("/sessions/" + b);
  EXPECT_EQ(c2, 200);
  EXPECT_EQ(one["state"], "running");
  EXPECT_FALSE(one["fromCache"].get<bool>());
}

TEST(Service, DeepenAfterCompletedSizes) {
  Server srv(with_models());
  for (int k = 0; k <= 1; ++k) {
    std::string id = open(srv, k);
    while (srv.post("/sessions/" + id + "/next", Json::object()).second["status"] == "scenario") {
    }
  }
  auto [code, body] = srv.post("/models/sll/deepen", {{"command", "acyclic"}, {"newScope", 2}});
  ASSERT_EQ(code, 201) << body;
  ASSERT_EQ(body["sessions"].size(), 1u);
  EXPECT_EQ(body["sessions"][0]["size"], 2);
  EXPECT_EQ(srv.post("/models/sll/deepen", {{"command", "acyclic"}, {"newScope", 0}}).first, 409);
  EXPECT_EQ(srv.post("/models/sll/deepen", {{"command", "nope"}, {"newScope", 2}}).first, 404);
  EXPECT_EQ(srv.post("/models/nope/deepen", {{"newScope", 2}}).first, 404);
  EXPECT_EQ(srv.post("/models/sll/deepen", Json::object()).first, 400);
}

TEST(Service, RestartServesCompletedSizesFromCache) {
  auto cache = temp_dir("cache");
  std::vector<Json> first;
  {
    ServiceOptions o = with_models();
    o.cacheDir = cache;
    Server srv(o);
    std::string id = open(srv, 2);
    for (;;) {
      auto [c, body] = srv.post("/sessions/" + id + "/next", Json::object());
      if (body["status"] != "scenario") break;
      first.push_back(body["scenario"]);
    }
  }
  ServiceOptions o = with_models();
  o.cacheDir = cache;
  Server srv(o);
  auto [c0, model] = srv.get("/models/sll");
  EXPECT_EQ(model["commands"][0]["completedSizes"], Json::array({2}));
  auto before = sat::Solver::total_solve_calls();
  std::string id = open(srv, 2);
  std::vector<Json> second;
  for (;;) {
    auto [c, body] = srv.post("/sessions/" + id + "/next", Json::object());
    if (body["status"] != "scenario") {
      EXPECT_TRUE(body["session"]["fromCache"].get<bool>());
      break;
    }
    second.push_back(body["scenario"]);
  }
  EXPECT_EQ(second, first);
  auto [mc, metrics] = srv.get("/sessions/" + id + "/metrics");
  EXPECT_EQ(metrics["solveCalls"], 0);
  EXPECT_EQ(sat::Solver::total_solve_calls(), before);
  fs::remove_all(cache);
}

TEST(Service, StaticUi) {
  auto ui = temp_dir("ui");
  fs::create_directories(ui);
  { std::ofstream(ui / "index.html") << "<html>ok</html>"; }
  ServiceOptions o;
  o.uiDir = ui;
  Server srv(o);
  httplib::Client c("127.0.0.1", srv.port());
  auto r = c.Get("/index.html");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(r->body, "<html>ok</html>");
  fs::remove_all(ui);
}
