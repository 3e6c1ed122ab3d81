#include "momloc/symbol.hpp"

#include <stdexcept>

namespace momloc {

std::string symbol_kind_str(SymbolKind k) {
  switch (k) {
    case SymbolKind::Energy: return "energy";
    case SymbolKind::EnergySum: return "energy-sum";
    case SymbolKind::Mass: return "mass";
    case SymbolKind::Momentum: return "momentum";
    case SymbolKind::Formal: return "formal";
  }
  return "?";
}

std::optional<SymbolKind> symbol_kind_parse(const std::string& s) {
  if (s == "energy") return SymbolKind::Energy;
  if (s == "energy-sum") return SymbolKind::EnergySum;
  if (s == "mass") return SymbolKind::Mass;
  if (s == "momentum") return SymbolKind::Momentum;
  if (s == "formal") return SymbolKind::Formal;
  return std::nullopt;
}

Symbol SymbolTable::intern(const std::string& name, SymbolKind kind) {
  if (name.empty()) throw std::invalid_argument("SymbolTable: empty symbol name");
  std::lock_guard<std::mutex> lock(mu_);
  auto it = by_name_.find(name);
  if (it != by_name_.end()) {
    if (it->second.kind() != kind)
      throw std::invalid_argument("SymbolTable: symbol '" + name + "' already interned with kind " +
                                  symbol_kind_str(it->second.kind()));
    return it->second;
  }
  Symbol s(std::make_shared<const Symbol::Data>(Symbol::Data{name, kind}));
  by_name_.emplace(name, s);
  return s;
}

std::optional<Symbol> SymbolTable::find(const std::string& name) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

std::size_t SymbolTable::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return by_name_.size();
}

SymbolTable& global_symbols() {
  static SymbolTable table;
  return table;
}

}  // namespace momloc
