#pragma once

#include <compare>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

namespace momloc {

/// Role of a symbol in the kinematic algebra. The kind never changes after
/// creation; it documents intent (and drives evaluation) but symbols of all
/// kinds behave identically inside polynomials.
enum class SymbolKind {
  Energy,     // on-shell energy, one symbol per (slot, species)
  EnergySum,  // the sum of the energies not integrated out
  Mass,       // mass parameter of a species
  Momentum,   // a single component k_l^mu
  Formal,     // free variable with no kinematic meaning
};

std::string symbol_kind_str(SymbolKind k);
std::optional<SymbolKind> symbol_kind_parse(const std::string& s);

/// Immutable interned symbol. Value semantics; equality and ordering are by
/// (name, kind) so symbols interned in different tables with the same name
/// and kind are interchangeable. Ordering is the variable order used by the
/// lexicographic monomial order everywhere in the kernel.
class Symbol {
 public:
  Symbol() = default;

  const std::string& name() const { return data_->name; }
  SymbolKind kind() const { return data_->kind; }
  bool valid() const { return data_ != nullptr; }

  friend bool operator==(const Symbol& a, const Symbol& b) {
    if (a.data_ == b.data_) return true;
    if (!a.data_ || !b.data_) return false;
    return a.data_->name == b.data_->name && a.data_->kind == b.data_->kind;
  }
  friend bool operator!=(const Symbol& a, const Symbol& b) { return !(a == b); }
  friend bool operator<(const Symbol& a, const Symbol& b) {
    if (a.data_ == b.data_) return false;
    if (!a.data_) return b.data_ != nullptr;
    if (!b.data_) return false;
    if (a.data_->name != b.data_->name) return a.data_->name < b.data_->name;
    return a.data_->kind < b.data_->kind;
  }

 private:
  struct Data {
    std::string name;
    SymbolKind kind;
  };
  explicit Symbol(std::shared_ptr<const Data> d) : data_(std::move(d)) {}
  std::shared_ptr<const Data> data_;
  friend class SymbolTable;
};

/// Factory enforcing name uniqueness: within one table a name maps to exactly
/// one symbol, and re-interning with a different kind is an error. Interning
/// is thread safe; the returned symbols are immutable and freely shareable.
class SymbolTable {
 public:
  /// Returns the existing symbol for `name` or creates one. Throws
  /// std::invalid_argument if `name` exists with a different kind.
  Symbol intern(const std::string& name, SymbolKind kind);

  /// Shorthand for intern(name, SymbolKind::Formal).
  Symbol formal(const std::string& name) { return intern(name, SymbolKind::Formal); }

  std::optional<Symbol> find(const std::string& name) const;
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, Symbol> by_name_;
};

/// Process-wide table used by the physics layers so that symbol identity is
/// stable across modules ("om2_1" always denotes the same symbol).
SymbolTable& global_symbols();

}  // namespace momloc
