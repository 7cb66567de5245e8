#pragma once

// Parser and printer for the untyped CNF/FOF subset of TPTP.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace entcop::tptp {

struct AstTerm {
    std::string name;
    bool variable = false;
    std::vector<AstTerm> args;

    friend bool operator==(const AstTerm&, const AstTerm&) = default;
};

enum class FormulaKind {
    Atom,
    Equal,
    NotEqual,
    True,
    False,
    Not,
    And,
    Or,
    Implies,         // =>
    ReverseImplies,  // <=
    Iff,             // <=>
    Xor,             // <~>
    Nor,             // ~|
    Nand,            // ~&
    ForAll,
    Exists,
};

struct Formula {
    FormulaKind kind = FormulaKind::True;
    std::string predicate;         // Atom
    std::vector<AstTerm> args;     // Atom args, or the two sides of (Not)Equal
    std::vector<std::string> variables;  // quantifiers
    std::vector<Formula> children;

    friend bool operator==(const Formula&, const Formula&) = default;
};

enum class Language { Cnf, Fof };

enum class Role {
    Axiom,
    Hypothesis,
    Definition,
    Assumption,
    Lemma,
    Theorem,
    Corollary,
    Conjecture,
    NegatedConjecture,
    Plain,
};

struct AnnotatedFormula {
    Language language = Language::Fof;
    std::string name;
    Role role = Role::Axiom;
    Formula formula;

    friend bool operator==(const AnnotatedFormula&, const AnnotatedFormula&) = default;
};

struct Problem {
    std::vector<AnnotatedFormula> formulas;

    friend bool operator==(const Problem&, const Problem&) = default;
};

/// Malformed input. Carries a 1-based line and column.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, int line, int column);
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

/// Well-formed TPTP outside the supported subset (typed languages, unknown
/// roles, arithmetic, ...).
class UnsupportedError : public ParseError {
public:
    using ParseError::ParseError;
};

/// Parses a document. `include('f')` directives are resolved against
/// `base_dir`.
Problem parse_problem(std::string_view text, const std::filesystem::path& base_dir = ".");
/// Reads and parses a file; includes resolve relative to its directory.
Problem parse_problem_file(const std::filesystem::path& path);

std::string print_formula(const Formula& f);
std::string print_problem(const Problem& problem);

std::string_view role_name(Role role);

}  // namespace entcop::tptp
