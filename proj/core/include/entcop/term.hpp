#pragma once

// First-order syntax: interned symbols, terms, literals and substitutions.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace entcop {

using SymbolId = std::uint32_t;

enum class SymbolKind : std::uint8_t { Function, Predicate };

/// Per-problem interning table. Predicates and functions live in separate
/// namespaces; the equality predicate "=" is always predicate id 0.
class SymbolTable {
public:
    static constexpr SymbolId kEquality = 0;

    SymbolTable();

    /// Interns `name` with the given arity. Throws std::invalid_argument when
    /// the name is already known with a different arity.
    SymbolId intern(std::string_view name, int arity, SymbolKind kind);
    std::optional<SymbolId> find(std::string_view name, SymbolKind kind) const;

    const std::string& name(SymbolId id) const { return entries_.at(id).name; }
    int arity(SymbolId id) const { return entries_.at(id).arity; }
    SymbolKind kind(SymbolId id) const { return entries_.at(id).kind; }
    std::size_t size() const { return entries_.size(); }

    /// Returns a fresh Skolem function name `skN` not yet in the table.
    std::string fresh_skolem_name();

private:
    struct Entry {
        std::string name;
        int arity;
        SymbolKind kind;
    };
    std::vector<Entry> entries_;
    std::unordered_map<std::string, SymbolId> functions_;
    std::unordered_map<std::string, SymbolId> predicates_;
    int skolem_counter_ = 0;
};

/// Immutable first-order term with shared structure. A default-constructed
/// Term is null and is used as "unbound" inside substitutions.
class Term {
public:
    Term() = default;

    static Term variable(int id);
    static Term compound(SymbolId symbol, std::vector<Term> args = {});
    static Term constant(SymbolId symbol) { return compound(symbol); }

    bool is_null() const { return node_ == nullptr; }
    bool is_var() const { return node_->var >= 0; }
    int var() const { return node_->var; }
    SymbolId symbol() const { return node_->symbol; }
    std::span<const Term> args() const { return node_->args; }
    bool ground() const { return node_->max_var < 0; }
    /// Largest variable id occurring in the term, -1 when ground.
    int max_var() const { return node_->max_var; }
    /// Number of symbol and variable occurrences.
    std::size_t size() const { return node_->size; }
    std::size_t hash() const { return node_->hash; }

    /// Renames every variable X_i to X_{i+delta}.
    Term offset(int delta) const;

    friend bool operator==(const Term& a, const Term& b);

private:
    struct Node {
        int var = -1;
        SymbolId symbol = 0;
        std::vector<Term> args;
        int max_var = -1;
        std::uint32_t size = 1;
        std::size_t hash = 0;
    };
    explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    std::shared_ptr<const Node> node_;
};

struct Literal {
    bool positive = true;
    SymbolId predicate = 0;
    std::vector<Term> args;

    bool is_equality() const { return predicate == SymbolTable::kEquality; }
    int max_var() const;
    Literal offset(int delta) const;
    Literal negated() const { return Literal{!positive, predicate, args}; }

    friend bool operator==(const Literal&, const Literal&) = default;
};

/// Term position: 1-based argument indices from the literal (or term) root.
using Position = std::vector<int>;

/// All (position, subterm) pairs of a literal's arguments in left-to-right,
/// outside-in order. The literal itself is never included.
std::vector<std::pair<Position, Term>> subterm_positions(const Literal& literal);
/// Same for a term; the root appears first with the empty position.
std::vector<std::pair<Position, Term>> subterm_positions(const Term& term);

/// Subterm at `pos`; throws std::out_of_range for invalid positions.
const Term& subterm_at(const Literal& literal, const Position& pos);
const Term& subterm_at(const Term& term, const Position& pos);
Literal replace_at(const Literal& literal, const Position& pos, const Term& replacement);
Term replace_at(const Term& term, const Position& pos, const Term& replacement);

std::string position_to_string(const Position& pos);
Position position_from_string(std::string_view text);

/// Triangular substitution over integer variable ids with an undo trail.
class Substitution {
public:
    Substitution() = default;

    /// Binding of `var` or nullptr.
    const Term* lookup(int var) const;
    bool bound(int var) const { return lookup(var) != nullptr; }
    /// Records a binding. Throws std::invalid_argument when `var` is already
    /// bound or occurs in `value` under the current bindings.
    void bind(int var, Term value);

    /// Follows variable bindings at the top of `t` only.
    Term resolve(const Term& t) const;
    /// Fully applies the substitution.
    Term apply(const Term& t) const;
    Literal apply(const Literal& l) const;

    /// True when `var` occurs in `t` after resolution.
    bool occurs(int var, const Term& t) const;

    std::size_t mark() const { return trail_.size(); }
    void undo(std::size_t mark);
    /// Drops the undo trail; bindings are kept.
    void commit() { trail_.clear(); }

    std::size_t binding_count() const;
    /// Bound variable ids in ascending order.
    std::vector<int> domain() const;
    /// Each binding fully applied, giving an idempotent substitution.
    Substitution normalized() const;

    friend bool operator==(const Substitution& a, const Substitution& b);

private:
    friend struct UnifyAccess;
    // bind without the checks; unification has already done them.
    void assign(int var, Term value);

    std::vector<Term> bindings_;
    std::vector<int> trail_;
};

/// Unifies in place with occurs check. On failure the substitution is
/// restored to its state on entry.
bool unify_in_place(const Term& a, const Term& b, Substitution& subst);
/// Unifies the argument lists of two atoms with the same predicate; polarity
/// is ignored.
bool unify_atoms_in_place(const Literal& a, const Literal& b, Substitution& subst);

std::optional<Substitution> unify(const Term& a, const Term& b, const Substitution& under = {});
std::optional<Substitution> unify(const Literal& a, const Literal& b, const Substitution& under = {});

std::string to_string(const Term& t, const SymbolTable& symbols);
std::string to_string(const Literal& l, const SymbolTable& symbols);

}  // namespace entcop
