#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "boundsmith/cnf.hpp"
#include "boundsmith/metrics.hpp"
#include "boundsmith/model.hpp"
#include "boundsmith/sat.hpp"
#include "boundsmith/scenario.hpp"

namespace boundsmith {

enum class SessionState { Running, Exhausted };

struct PhaseCount {
  std::string sig;
  int found = 0;
};

/// Pull interface shared by staged sessions, plain all-SAT loops and cache replays.
class ScenarioStream {
 public:
  virtual ~ScenarioStream() = default;
  /// Next scenario, or nullopt once exhausted (and on every later call).
  virtual std::optional<Scenario> next() = 0;
  virtual SessionState state() const = 0;
  virtual MetricsRecord metrics() const = 0;
  virtual std::vector<PhaseCount> phase_counts() const { return {}; }
  virtual std::uint64_t solve_calls() const = 0;
  /// Translation behind the stream, if any.
  virtual const CnfDocument* cnf() const { return nullptr; }
  virtual void set_trace(std::ostream*) {}
};

/// Unit clauses forcing every membership variable of `sig` true. Abstract signatures
/// have no membership variables; for them `relationalFact` is set and the caller uses
/// the translator's `#sig = k` clause group instead.
struct SizeUnits {
  std::vector<Clause> clauses;
  bool relationalFact = false;
};
SizeUnits size_unit_clauses(const Model& m, const std::string& sig, const TupleTable& table);

/// Staged generation for one (command, size): one phase per signature of
/// signature_order(), each forcing that signature to the target size.
class EnumerationSession : public ScenarioStream {
 public:
  EnumerationSession(const Model& m, const Command& command, int size, std::string modelName = {});

  std::optional<Scenario> next() override;
  SessionState state() const override { return state_; }
  MetricsRecord metrics() const override;
  std::vector<PhaseCount> phase_counts() const override;
  std::uint64_t solve_calls() const override { return solver_ ? solver_->solve_calls() : 0; }
  const CnfDocument* cnf() const override { return &cnf_; }
  void set_trace(std::ostream* trace) override;

  int target_size() const { return size_; }
  const std::string& command_name() const { return command_; }
  /// Phase labels: signature_order(), plus a trailing singleton phase at size 1 when
  /// top-level `one` signatures exist.
  const std::vector<std::string>& phases() const { return phases_; }
  int active_phase() const { return activePhase_; }
  const std::vector<Clause>& blockers() const { return blockers_; }

 private:
  void enter_phase();
  std::optional<Scenario> next_size_zero();

  Model model_;
  std::string command_;
  std::string modelName_;
  int size_;
  CnfDocument cnf_;
  std::unique_ptr<sat::Solver> solver_;
  std::vector<std::string> phases_;
  std::vector<int> found_;
  std::vector<Clause> blockers_;
  int activePhase_ = 0;
  int emitted_ = 0;
  SessionState state_ = SessionState::Running;
  bool zeroDone_ = false;
  bool anyOne_ = false;
  std::chrono::steady_clock::duration elapsed_{};
};

/// Plain blocking-clause all-SAT loop at a fixed bound, no phases.
class PlainEnumeration : public ScenarioStream {
 public:
  PlainEnumeration(const Model& m, const Command& command, int bound, std::string mode,
                   std::optional<int> size, std::string modelName = {});

  std::optional<Scenario> next() override;
  SessionState state() const override { return state_; }
  MetricsRecord metrics() const override;
  std::uint64_t solve_calls() const override { return solver_.solve_calls(); }
  const CnfDocument* cnf() const override { return &cnf_; }
  void set_trace(std::ostream* trace) override { solver_.set_trace(trace); }

 private:
  Model model_;
  std::string mode_;
  std::optional<int> size_;
  std::string modelName_;
  CnfDocument cnf_;
  sat::Solver solver_;
  int emitted_ = 0;
  SessionState state_ = SessionState::Running;
  std::chrono::steady_clock::duration elapsed_{};
};

/// Replays a stored scenario list without solving.
class CachedStream : public ScenarioStream {
 public:
  CachedStream(std::vector<Scenario> scenarios, MetricsRecord metrics, std::vector<PhaseCount> phases)
      : scenarios_(std::move(scenarios)), metrics_(std::move(metrics)), phases_(std::move(phases)) {
    metrics_.solveCalls = 0;
  }

  std::optional<Scenario> next() override;
  SessionState state() const override { return state_; }
  MetricsRecord metrics() const override { return metrics_; }
  std::vector<PhaseCount> phase_counts() const override { return phases_; }
  std::uint64_t solve_calls() const override { return 0; }

 private:
  std::vector<Scenario> scenarios_;
  MetricsRecord metrics_;
  std::vector<PhaseCount> phases_;
  std::size_t pos_ = 0;
  SessionState state_ = SessionState::Running;
};

/// Drains a stream.
std::vector<Scenario> collect(ScenarioStream& stream);

}  // namespace boundsmith
