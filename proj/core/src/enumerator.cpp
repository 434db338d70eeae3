#include "boundsmith/enumerator.hpp"

#include <stdexcept>

#include "boundsmith/lang.hpp"
#include "boundsmith/translator.hpp"

namespace boundsmith {

namespace {

using Clock = std::chrono::steady_clock;

double millis(Clock::duration d) { return std::chrono::duration<double, std::milli>(d).count(); }

MetricsRecord base_metrics(const std::string& model, const std::string& mode, std::optional<int> size,
                           const CnfDocument& cnf, int scenarios, Clock::duration elapsed,
                           std::uint64_t solveCalls) {
  MetricsRecord r;
  r.model = model;
  r.mode = mode;
  r.size = size;
  r.numPrimary = cnf.numPrimary;
  r.numVars = cnf.numVars;
  r.numClauses = static_cast<int>(cnf.clauses.size());
  r.numScenarios = scenarios;
  r.totalMillis = millis(elapsed);
  r.avgDiscoveryMillis = r.totalMillis / std::max(scenarios, 1);
  r.solveCalls = solveCalls;
  return r;
}

}  // namespace

SizeUnits size_unit_clauses(const Model& m, const std::string& sig, const TupleTable& table) {
  const SigDecl* s = m.find_sig(sig);
  if (!s) throw std::invalid_argument("unknown signature '" + sig + "'");
  SizeUnits out;
  if (s->isOne) return out;
  if (s->isAbstract) {
    out.relationalFact = true;
    return out;
  }
  for (int v : table.sig_vars(sig)) out.clauses.push_back({v});
  return out;
}

// ---------------------------------------------------------------------------

EnumerationSession::EnumerationSession(const Model& m, const Command& command, int size, std::string modelName)
    : model_(m), command_(command.name), modelName_(std::move(modelName)), size_(size) {
  if (size < 0) throw std::invalid_argument("size must be non-negative");
  for (const auto& s : m.sigs) anyOne_ = anyOne_ || s.isOne;

  TranslateOptions options;
  for (const auto& name : signature_order(m))
    if (m.find_sig(name)->isAbstract) options.sizeFactSigs.push_back(name);
  cnf_ = translate(model_, command, size, options);
  if (size == 0) return;

  phases_ = signature_order(m);
  if (size == 1) {
    for (const auto& s : m.sigs)
      if (s.isOne && s.top_level()) {
        phases_.push_back(s.name);
        break;
      }
  }
  found_.assign(phases_.size(), 0);
  solver_ = std::make_unique<sat::Solver>(cnf_);
  if (phases_.empty()) {
    state_ = SessionState::Exhausted;
    return;
  }
  enter_phase();
}

void EnumerationSession::set_trace(std::ostream* trace) {
  if (solver_) solver_->set_trace(trace);
}

void EnumerationSession::enter_phase() {
  const auto& name = phases_[static_cast<std::size_t>(activePhase_)];
  const SigDecl* sig = model_.find_sig(name);
  if (sig->isOne) return;  // singleton phase: blockers only
  SizeUnits units = size_unit_clauses(model_, name, cnf_.symbols);
  if (!units.relationalFact && static_cast<int>(units.clauses.size()) < size_) {
    // Extension of a `one` sig: its pool holds a single atom, so it cannot reach the size.
    solver_->add_clause(std::span<const int>{}, true);
    return;
  }
  const auto& clauses = units.relationalFact ? cnf_.sizeFacts.at(name) : units.clauses;
  for (const auto& c : clauses) solver_->add_clause(c, true);
}

std::optional<Scenario> EnumerationSession::next_size_zero() {
  if (zeroDone_) return std::nullopt;
  zeroDone_ = true;
  state_ = SessionState::Exhausted;
  // A `one` signature always contributes an atom, so nothing has size 0.
  if (anyOne_) return std::nullopt;
  std::vector<bool> empty(static_cast<std::size_t>(cnf_.numVars) + 1, false);
  if (cnf_.trivially_unsat()) return std::nullopt;
  if (!cnf_.clauses.empty()) {
    sat::Solver solver(cnf_);
    auto r = solver.solve();
    if (!r.sat()) return std::nullopt;
    empty = r.assignment;
    solver_ = std::make_unique<sat::Solver>(std::move(solver));
  }
  ++emitted_;
  return decode_scenario(model_, cnf_, empty, std::nullopt, 0);
}

std::optional<Scenario> EnumerationSession::next() {
  if (state_ == SessionState::Exhausted && size_ != 0) return std::nullopt;
  auto start = Clock::now();
  if (size_ == 0) {
    auto s = next_size_zero();
    elapsed_ += Clock::now() - start;
    return s;
  }
  for (;;) {
    auto result = solver_->solve();
    if (result.sat()) {
      auto phase = static_cast<std::size_t>(activePhase_);
      Scenario s = decode_scenario(model_, cnf_, result.assignment, phases_[phase], emitted_++);
      Clause blocker = blocking_clause(result.assignment, cnf_.numPrimary);
      solver_->add_clause(blocker, true);
      blockers_.push_back(std::move(blocker));
      ++found_[phase];
      elapsed_ += Clock::now() - start;
      return s;
    }
    ++activePhase_;
    if (activePhase_ >= static_cast<int>(phases_.size())) {
      state_ = SessionState::Exhausted;
      elapsed_ += Clock::now() - start;
      return std::nullopt;
    }
    solver_->rebuild(blockers_);
    enter_phase();
  }
}

MetricsRecord EnumerationSession::metrics() const {
  return base_metrics(modelName_, "reach", size_, cnf_, emitted_, elapsed_, solve_calls());
}

std::vector<PhaseCount> EnumerationSession::phase_counts() const {
  std::vector<PhaseCount> out;
  for (std::size_t i = 0; i < phases_.size(); ++i) out.push_back({phases_[i], found_[i]});
  return out;
}

// ---------------------------------------------------------------------------

PlainEnumeration::PlainEnumeration(const Model& m, const Command& command, int bound, std::string mode,
                                   std::optional<int> size, std::string modelName)
    : model_(m),
      mode_(std::move(mode)),
      size_(size),
      modelName_(std::move(modelName)),
      cnf_(translate(model_, command, bound)),
      solver_(cnf_) {}

std::optional<Scenario> PlainEnumeration::next() {
  if (state_ == SessionState::Exhausted) return std::nullopt;
  auto start = Clock::now();
  auto result = solver_.solve();
  if (!result.sat()) {
    state_ = SessionState::Exhausted;
    elapsed_ += Clock::now() - start;
    return std::nullopt;
  }
  Scenario s = decode_scenario(model_, cnf_, result.assignment, std::nullopt, emitted_++);
  solver_.add_clause(blocking_clause(result.assignment, cnf_.numPrimary));
  elapsed_ += Clock::now() - start;
  return s;
}

MetricsRecord PlainEnumeration::metrics() const {
  return base_metrics(modelName_, mode_, size_, cnf_, emitted_, elapsed_, solve_calls());
}

// ---------------------------------------------------------------------------

std::optional<Scenario> CachedStream::next() {
  if (pos_ >= scenarios_.size()) {
    state_ = SessionState::Exhausted;
    return std::nullopt;
  }
  return scenarios_[pos_++];
}

std::vector<Scenario> collect(ScenarioStream& stream) {
  std::vector<Scenario> out;
  while (auto s = stream.next()) out.push_back(std::move(*s));
  return out;
}

}  // namespace boundsmith
