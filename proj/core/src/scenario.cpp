#include "boundsmith/scenario.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace boundsmith {

const std::vector<std::string>* Scenario::atoms_of(const std::string& sig) const {
  for (const auto& [name, atoms] : sigs)
    if (name == sig) return &atoms;
  return nullptr;
}

const std::vector<AtomPair>* Scenario::tuples_of(const std::string& field) const {
  for (const auto& [name, tuples] : fields)
    if (name == field) return &tuples;
  return nullptr;
}

namespace {

std::vector<int> members(const Model& m, const CnfDocument& cnf, const std::vector<bool>& a,
                         int sig, std::map<int, std::vector<int>>& memo) {
  if (auto it = memo.find(sig); it != memo.end()) return it->second;
  const auto& s = m.sigs[static_cast<std::size_t>(sig)];
  std::vector<int> out;
  if (s.isOne) {
    int pin = cnf.universe.pinned_atom(sig);
    if (pin >= 0) out.push_back(pin);
  } else if (s.isAbstract) {
    for (int child : m.children_of(sig)) {
      auto sub = members(m, cnf, a, child, memo);
      out.insert(out.end(), sub.begin(), sub.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  } else {
    for (int v : cnf.symbols.sig_vars(s.name))
      if (a.at(static_cast<std::size_t>(v))) out.push_back(cnf.symbols.entry(v).tuple[0]);
  }
  memo[sig] = out;
  return out;
}

// "L12" -> "L"
std::string atom_prefix(const std::string& atom) {
  auto end = atom.find_last_not_of("0123456789");
  return atom.substr(0, end == std::string::npos ? 0 : end + 1);
}

std::string render_key(const Scenario& s, const std::map<std::string, std::string>* rename) {
  auto name = [&](const std::string& atom) -> const std::string& {
    if (rename) {
      auto it = rename->find(atom);
      if (it != rename->end()) return it->second;
    }
    return atom;
  };
  std::ostringstream out;
  for (const auto& [sig, atoms] : s.sigs) {
    out << sig << '=';
    for (const auto& a : atoms) out << name(a) << ',';
    out << ';';
  }
  out << '|';
  for (const auto& [field, tuples] : s.fields) {
    out << field << '=';
    for (const auto& [a, b] : tuples) out << name(a) << "->" << name(b) << ',';
    out << ';';
  }
  return out.str();
}

}  // namespace

Scenario decode_scenario(const Model& m, const CnfDocument& cnf, const std::vector<bool>& assignment,
                         std::optional<std::string> phase, int ordinal) {
  if (static_cast<int>(assignment.size()) <= cnf.numPrimary)
    throw std::invalid_argument("decode_scenario: assignment does not cover the primary variables");
  Scenario s;
  s.ordinal = ordinal;
  s.phase = std::move(phase);
  std::map<int, std::vector<int>> memo;
  for (const auto& sig : m.sigs) {
    auto atoms = members(m, cnf, assignment, sig.declIndex, memo);
    std::vector<std::string> names;
    for (int a : atoms) names.push_back(cnf.universe.atom_name(a));
    if (sig.top_level()) s.size = std::max(s.size, static_cast<int>(names.size()));
    s.sigs.emplace_back(sig.name, std::move(names));
  }
  for (int f = 0; f < m.field_count(); ++f) s.fields.emplace_back(m.field(f).name, std::vector<AtomPair>{});
  for (const auto& e : cnf.symbols.entries()) {
    if (e.tuple.size() != 2 || !assignment[static_cast<std::size_t>(e.var)]) continue;
    for (auto& [name, tuples] : s.fields)
      if (name == e.relation)
        tuples.emplace_back(cnf.universe.atom_name(e.tuple[0]), cnf.universe.atom_name(e.tuple[1]));
  }
  return s;
}

Clause blocking_clause(const std::vector<bool>& assignment, int numPrimary) {
  Clause c;
  c.reserve(static_cast<std::size_t>(numPrimary));
  for (int v = 1; v <= numPrimary; ++v) c.push_back(assignment.at(static_cast<std::size_t>(v)) ? -v : v);
  return c;
}

Clause blocking_clause(const Scenario& s, const CnfDocument& cnf) {
  std::map<std::string, int> atomIndex;
  for (int a = 0; a < cnf.universe.atom_count(); ++a) atomIndex[cnf.universe.atom_name(a)] = a;
  std::vector<bool> a(static_cast<std::size_t>(cnf.numPrimary) + 1, false);
  auto mark = [&](const std::string& rel, std::vector<int> tuple) {
    int v = cnf.symbols.lookup(rel, tuple);
    if (v > 0) a[static_cast<std::size_t>(v)] = true;
  };
  for (const auto& [sig, atoms] : s.sigs)
    for (const auto& atom : atoms) mark(sig, {atomIndex.at(atom)});
  for (const auto& [field, tuples] : s.fields)
    for (const auto& [x, y] : tuples) mark(field, {atomIndex.at(x), atomIndex.at(y)});
  return blocking_clause(a, cnf.numPrimary);
}

std::string scenario_key(const Scenario& s) { return render_key(s, nullptr); }

std::string canonical_key(const Model& m, const Scenario& s) {
  std::map<std::string, std::string> rename;
  for (const auto& sig : m.sigs) {
    if (!sig.top_level()) continue;
    const auto* atoms = s.atoms_of(sig.name);
    if (!atoms) continue;
    for (std::size_t i = 0; i < atoms->size(); ++i)
      rename[(*atoms)[i]] = atom_prefix((*atoms)[i]) + std::to_string(i);
  }
  return render_key(s, &rename);
}

nlohmann::ordered_json to_json(const Scenario& s) {
  nlohmann::ordered_json doc;
  doc["size"] = s.size;
  doc["ordinal"] = s.ordinal;
  doc["phase"] = s.phase ? nlohmann::ordered_json(*s.phase) : nlohmann::ordered_json(nullptr);
  auto& sigs = doc["sigs"] = nlohmann::ordered_json::object();
  for (const auto& [name, atoms] : s.sigs) sigs[name] = atoms;
  auto& fields = doc["fields"] = nlohmann::ordered_json::object();
  for (const auto& [name, tuples] : s.fields) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& [a, b] : tuples) arr.push_back({a, b});
    fields[name] = std::move(arr);
  }
  return doc;
}

Scenario scenario_from_json(const nlohmann::ordered_json& doc) {
  Scenario s;
  s.size = doc.at("size").get<int>();
  s.ordinal = doc.at("ordinal").get<int>();
  if (doc.contains("phase") && !doc.at("phase").is_null()) s.phase = doc.at("phase").get<std::string>();
  for (const auto& [name, atoms] : doc.at("sigs").items())
    s.sigs.emplace_back(name, atoms.get<std::vector<std::string>>());
  for (const auto& [name, tuples] : doc.at("fields").items()) {
    std::vector<AtomPair> pairs;
    for (const auto& t : tuples) pairs.emplace_back(t.at(0).get<std::string>(), t.at(1).get<std::string>());
    s.fields.emplace_back(name, std::move(pairs));
  }
  return s;
}

std::string to_dot(const Model& m, const Scenario& s) {
  static const char* kShapes[] = {"box", "ellipse", "diamond", "hexagon", "octagon", "triangle"};
  std::ostringstream out;
  out << "digraph scenario" << s.ordinal << " {\n";
  std::set<std::string> drawn;
  int shape = 0;
  for (const auto& sig : m.sigs) {
    if (!sig.top_level()) continue;
    const char* sh = kShapes[shape++ % 6];
    const auto* atoms = s.atoms_of(sig.name);
    if (!atoms) continue;
    for (const auto& atom : *atoms) {
      std::string label = atom;
      for (const auto& [name, members] : s.sigs)
        if (name != sig.name && std::find(members.begin(), members.end(), atom) != members.end())
          label += "\\n(" + name + ")";
      out << "  \"" << atom << "\" [shape=" << sh << ", label=\"" << label << "\"];\n";
      drawn.insert(atom);
    }
  }
  if (drawn.empty()) out << "  empty [shape=plaintext, label=\"(empty)\"];\n";
  for (const auto& [field, tuples] : s.fields)
    for (const auto& [a, b] : tuples) out << "  \"" << a << "\" -> \"" << b << "\" [label=\"" << field << "\"];\n";
  out << "}\n";
  return out.str();
}

std::string to_text(const Scenario& s) {
  std::ostringstream out;
  out << "scenario " << s.ordinal << " (size " << s.size;
  if (s.phase) out << ", " << *s.phase << " phase";
  out << ")\n";
  for (const auto& [name, atoms] : s.sigs) {
    out << "  " << name << " = {";
    for (std::size_t i = 0; i < atoms.size(); ++i) out << (i ? ", " : "") << atoms[i];
    out << "}\n";
  }
  for (const auto& [name, tuples] : s.fields) {
    out << "  " << name << " = {";
    for (std::size_t i = 0; i < tuples.size(); ++i)
      out << (i ? ", " : "") << tuples[i].first << "->" << tuples[i].second;
    out << "}\n";
  }
  return out.str();
}

}  // namespace boundsmith
