#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "boundsmith/model.hpp"

namespace boundsmith {

/// Atoms owned by one top-level signature. Extensions draw from their root's pool.
struct AtomPool {
  int sig = -1;  // top-level signature index
  std::vector<int> atoms;  // global atom indices, ascending
};

/// The bounded universe for one target size k.
class Universe {
 public:
  int size() const { return size_; }
  int atom_count() const { return static_cast<int>(names_.size()); }
  const std::string& atom_name(int atom) const { return names_.at(static_cast<std::size_t>(atom)); }
  const std::vector<AtomPool>& pools() const { return pools_; }

  /// Pool of the top-level ancestor of `sig`.
  const AtomPool& pool_of(int sig) const;
  /// Index of the pool that owns `atom`, and the atom's position within it.
  int pool_index_of_atom(int atom) const { return atomPool_.at(static_cast<std::size_t>(atom)); }
  int position_in_pool(int atom) const;

  /// Atoms a signature may contain: its pinned atom for `one` signatures, else its root pool.
  std::vector<int> upper_bound(int sig) const;
  /// Fixed atom of a `one` signature, or -1.
  int pinned_atom(int sig) const;
  /// False when `one` extensions outnumber the atoms of their root pool at this size.
  bool feasible() const { return feasible_; }

  /// Atoms by top-level signature name, in pool order.
  std::map<std::string, std::vector<std::string>> atoms_by_sig(const Model& m) const;

 private:
  friend Universe build_universe(const Model& m, int k);
  int size_ = 0;
  std::vector<std::string> names_;
  std::vector<AtomPool> pools_;
  std::vector<int> poolOfSig_;  // per signature: index into pools_
  std::vector<int> atomPool_;   // per atom: index into pools_
  std::vector<int> pinned_;     // per signature: atom or -1
  bool feasible_ = true;
};

Universe build_universe(const Model& m, int k);

struct TupleEntry {
  std::string relation;
  std::vector<int> tuple;  // global atom indices
  int var = 0;
};

/// Bijection between candidate tuples and primary variables 1..P.
class TupleTable {
 public:
  int num_primary() const { return static_cast<int>(entries_.size()); }
  const std::vector<TupleEntry>& entries() const { return entries_; }
  const TupleEntry& entry(int var) const { return entries_.at(static_cast<std::size_t>(var - 1)); }

  /// Membership variables of a signature, in pool order; empty for `one`/abstract sigs.
  const std::vector<int>& sig_vars(const std::string& sig) const;
  /// Variable for (relation, tuple), or 0 when the tuple is outside the bounds.
  int lookup(const std::string& relation, const std::vector<int>& tuple) const;

  /// `varId TAB relation TAB tuple` lines in allocation order.
  std::string dump(const Universe& u) const;

 private:
  friend TupleTable allocate_primary_vars(const Model& m, const Universe& u);
  std::vector<TupleEntry> entries_;
  std::map<std::string, std::vector<int>> perSigVars_;
  std::map<std::pair<std::string, std::vector<int>>, int> index_;
};

TupleTable allocate_primary_vars(const Model& m, const Universe& u);

/// "L0" or "L0->N1".
std::string tuple_text(const Universe& u, const std::vector<int>& tuple);

}  // namespace boundsmith
