#pragma once

// Clausal matrix the prover works on, and clausification from TPTP problems.
//
// Clauses are stored in the polarity of the clausal form of the negated
// conjecture (an axiom `p(a)` is the clause {p(a)}, the conjecture `p(a)`
// yields the start clause {~p(a)}). The connection calculus is symmetric in
// polarity, so this is the dual reading of the disjunctive-normal-form matrix:
// a positive equation `s = t` here plays the role of `s != t` there.

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "entcop/term.hpp"
#include "entcop/tptp.hpp"

namespace entcop {

struct Clause {
    int id = 0;
    std::vector<Literal> literals;
    /// Variables are numbered 0..var_count-1 in order of first occurrence.
    int var_count = 0;
    bool from_conjecture = false;
    /// Name of the annotated formula the clause came from.
    std::string origin;
};

/// Index entry for a clause literal: (clause id, literal index).
struct LiteralRef {
    int clause = 0;
    int literal = 0;

    friend bool operator==(const LiteralRef&, const LiteralRef&) = default;
};

class Matrix {
public:
    /// Validates ids (dense, in order), non-empty clauses and start clauses.
    Matrix(std::shared_ptr<const SymbolTable> symbols, std::vector<Clause> clauses, std::vector<int> start_clauses);

    const SymbolTable& symbols() const { return *symbols_; }
    std::shared_ptr<const SymbolTable> symbol_table() const { return symbols_; }
    const std::vector<Clause>& clauses() const { return clauses_; }
    const Clause& clause(int id) const { return clauses_.at(static_cast<std::size_t>(id)); }
    const std::vector<int>& start_clauses() const { return start_clauses_; }
    std::size_t size() const { return clauses_.size(); }

    /// Clause literals with the given predicate and polarity, ordered by
    /// (clause id, literal index).
    const std::vector<LiteralRef>& literals_with(SymbolId predicate, bool positive) const;
    /// Positive equations `s = t` usable for rewriting (sides not identical),
    /// ordered by (clause id, literal index).
    const std::vector<LiteralRef>& equations() const { return equations_; }
    bool has_equality() const { return has_equality_; }

private:
    std::shared_ptr<const SymbolTable> symbols_;
    std::vector<Clause> clauses_;
    std::vector<int> start_clauses_;
    std::vector<std::vector<LiteralRef>> by_predicate_;  // index 2*pred + positive
    std::vector<LiteralRef> equations_;
    bool has_equality_ = false;
};

class ClausifyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ClausifyOptions {
    /// Adds the reflexivity clause {X = X} when equality occurs.
    bool reflexivity = true;
    /// Guard against exponential CNF blow-up.
    std::size_t max_clauses = 100000;
};

/// Negates the conjecture(s), converts every formula to clausal form with
/// fresh Skolem symbols `skN` and builds the matrix. Start clauses are those
/// derived from the conjecture, or all clauses when there is none.
Matrix clausify(const tptp::Problem& problem, const ClausifyOptions& options = {});

/// Deterministic text dump: one clause per line, canonical variable names.
std::string dump_matrix(const Matrix& matrix);

}  // namespace entcop
