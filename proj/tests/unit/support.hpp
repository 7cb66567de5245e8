#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "entcop/matrix.hpp"
#include "entcop/term.hpp"
#include "entcop/tptp.hpp"

namespace entcop::testing {

inline std::filesystem::path corpus_dir() { return ENTCOP_TEST_CORPUS_DIR; }

inline std::shared_ptr<const Matrix> matrix_from(std::string_view text) {
    return std::make_shared<const Matrix>(clausify(tptp::parse_problem(text)));
}

inline std::shared_ptr<const Matrix> corpus_matrix(const std::string& name) {
    return std::make_shared<const Matrix>(clausify(tptp::parse_problem_file(corpus_dir() / (name + ".p"))));
}

/// Builds terms over a private symbol table.
class TermBuilder {
public:
    std::shared_ptr<SymbolTable> symbols = std::make_shared<SymbolTable>();

    Term v(int id) const { return Term::variable(id); }
    Term f(std::string_view name, std::vector<Term> args = {}) const {
        SymbolId s = symbols->intern(name, static_cast<int>(args.size()), SymbolKind::Function);
        return Term::compound(s, std::move(args));
    }
    Literal lit(bool positive, std::string_view name, std::vector<Term> args = {}) const {
        SymbolId s = name == "=" ? SymbolTable::kEquality
                                 : symbols->intern(name, static_cast<int>(args.size()), SymbolKind::Predicate);
        return Literal{positive, s, std::move(args)};
    }
    std::string str(const Term& t) const { return to_string(t, *symbols); }
    std::string str(const Literal& l) const { return to_string(l, *symbols); }
};

}  // namespace entcop::testing
