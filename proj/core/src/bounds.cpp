#include "boundsmith/bounds.hpp"

#include <algorithm>
#include <sstream>

namespace boundsmith {

const AtomPool& Universe::pool_of(int sig) const {
  return pools_.at(static_cast<std::size_t>(poolOfSig_.at(static_cast<std::size_t>(sig))));
}

int Universe::position_in_pool(int atom) const {
  const auto& pool = pools_.at(static_cast<std::size_t>(pool_index_of_atom(atom)));
  return atom - pool.atoms.front();
}

std::vector<int> Universe::upper_bound(int sig) const {
  int pin = pinned_atom(sig);
  if (pin >= 0) return {pin};
  return pool_of(sig).atoms;
}

int Universe::pinned_atom(int sig) const { return pinned_.at(static_cast<std::size_t>(sig)); }

std::map<std::string, std::vector<std::string>> Universe::atoms_by_sig(const Model& m) const {
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& pool : pools_) {
    auto& names = out[m.sigs[static_cast<std::size_t>(pool.sig)].name];
    for (int a : pool.atoms) names.push_back(atom_name(a));
  }
  return out;
}

Universe build_universe(const Model& m, int k) {
  Universe u;
  u.size_ = k;
  u.poolOfSig_.assign(m.sigs.size(), -1);
  u.pinned_.assign(m.sigs.size(), -1);

  std::vector<int> roots;
  for (const auto& s : m.sigs)
    if (s.top_level()) roots.push_back(s.declIndex);

  // Atom prefix: first letter of the signature, or the full name when two roots share it.
  std::map<char, int> initials;
  for (int r : roots) ++initials[m.sigs[static_cast<std::size_t>(r)].name.front()];

  for (int r : roots) {
    const auto& sig = m.sigs[static_cast<std::size_t>(r)];
    std::string prefix = initials[sig.name.front()] > 1 ? sig.name : std::string(1, sig.name.front());
    int count = sig.isOne ? 1 : k;
    AtomPool pool;
    pool.sig = r;
    for (int i = 0; i < count; ++i) {
      pool.atoms.push_back(static_cast<int>(u.names_.size()));
      u.names_.push_back(prefix + std::to_string(i));
      u.atomPool_.push_back(static_cast<int>(u.pools_.size()));
    }
    u.pools_.push_back(std::move(pool));
  }
  for (const auto& s : m.sigs) {
    int root = m.root_of(s.declIndex);
    for (std::size_t p = 0; p < u.pools_.size(); ++p)
      if (u.pools_[p].sig == root) u.poolOfSig_[static_cast<std::size_t>(s.declIndex)] = static_cast<int>(p);
  }

  // `one` signatures: top-level ones own their single atom; extensions take the lowest
  // unclaimed atom of the root pool, in declaration order.
  std::map<int, int> nextFree;
  for (const auto& s : m.sigs) {
    if (!s.isOne) continue;
    const auto& pool = u.pool_of(s.declIndex);
    if (s.top_level()) {
      u.pinned_[static_cast<std::size_t>(s.declIndex)] = pool.atoms.front();
      continue;
    }
    int& next = nextFree[pool.sig];
    if (next >= static_cast<int>(pool.atoms.size())) {
      u.feasible_ = false;
      continue;
    }
    u.pinned_[static_cast<std::size_t>(s.declIndex)] = pool.atoms[static_cast<std::size_t>(next++)];
  }
  return u;
}

const std::vector<int>& TupleTable::sig_vars(const std::string& sig) const {
  static const std::vector<int> kEmpty;
  auto it = perSigVars_.find(sig);
  return it == perSigVars_.end() ? kEmpty : it->second;
}

int TupleTable::lookup(const std::string& relation, const std::vector<int>& tuple) const {
  auto it = index_.find({relation, tuple});
  return it == index_.end() ? 0 : it->second;
}

std::string tuple_text(const Universe& u, const std::vector<int>& tuple) {
  std::string out;
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    if (i) out += "->";
    out += u.atom_name(tuple[i]);
  }
  return out;
}

std::string TupleTable::dump(const Universe& u) const {
  std::ostringstream out;
  for (const auto& e : entries_) out << e.var << '\t' << e.relation << '\t' << tuple_text(u, e.tuple) << '\n';
  return out.str();
}

TupleTable allocate_primary_vars(const Model& m, const Universe& u) {
  TupleTable t;
  auto add = [&](const std::string& rel, std::vector<int> tuple) {
    TupleEntry e;
    e.relation = rel;
    e.tuple = std::move(tuple);
    e.var = static_cast<int>(t.entries_.size()) + 1;
    t.index_[{e.relation, e.tuple}] = e.var;
    t.entries_.push_back(std::move(e));
    return t.entries_.back().var;
  };
  for (const auto& s : m.sigs) {
    if (s.isOne || s.isAbstract) continue;
    auto& vars = t.perSigVars_[s.name];
    for (int a : u.upper_bound(s.declIndex)) vars.push_back(add(s.name, {a}));
  }
  for (int f = 0; f < m.field_count(); ++f) {
    const auto& fd = m.field(f);
    auto owners = u.upper_bound(fd.ownerSig);
    auto targets = u.upper_bound(fd.targetSig);
    for (int a : owners)
      for (int b : targets) add(fd.name, {a, b});
  }
  return t;
}

}  // namespace boundsmith
