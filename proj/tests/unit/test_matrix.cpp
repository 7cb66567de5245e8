#include <gtest/gtest.h>

#include <functional>
#include <map>
#include <random>
#include <set>

#include "entcop/search.hpp"
#include "support.hpp"

using namespace entcop;
using entcop::testing::matrix_from;

TEST(Clausify, ConjectureBecomesStartClause) {
    auto m = matrix_from("fof(ax, axiom, p(a)). fof(c, conjecture, p(a)).");
    ASSERT_EQ(m->size(), 2u);
    ASSERT_EQ(m->start_clauses(), std::vector<int>{1});
    EXPECT_EQ(to_string(m->clause(1).literals[0], m->symbols()), "~p(a)");
    auto r = prove(m, UniformPredictor{});
    ASSERT_EQ(r.status, ProofStatus::Solved);
    // start step plus one extension
    EXPECT_EQ(r.proof->size(), 2u);
    EXPECT_EQ(r.proof->at(1).kind, ActionKind::Extension);
}

TEST(Clausify, ExistentialAxiomIsSkolemized) {
    auto m = matrix_from("fof(a, axiom, ?[X]: p(X)).");
    ASSERT_EQ(m->size(), 1u);
    EXPECT_EQ(to_string(m->clause(0).literals[0], m->symbols()), "p(sk0)");
    // no conjecture: every clause may start
    EXPECT_EQ(m->start_clauses(), std::vector<int>{0});
}

TEST(Clausify, SkolemFunctionsTakeUniversals) {
    auto m = matrix_from("fof(a, axiom, ![X]: ?[Y]: r(X, Y)).");
    EXPECT_EQ(to_string(m->clause(0).literals[0], m->symbols()), "r(X0,sk0(X0))");
}

TEST(Clausify, VariablesAreClauseLocalAndDense) {
    auto m = matrix_from("cnf(a, axiom, p(X, Y) | q(Y)). cnf(b, axiom, q(Z)).");
    EXPECT_EQ(m->clause(0).var_count, 2);
    EXPECT_EQ(m->clause(1).var_count, 1);
    EXPECT_EQ(to_string(m->clause(1).literals[0], m->symbols()), "q(X0)");
}

TEST(Clausify, EqualityAddsReflexivity) {
    auto m = matrix_from("fof(a, axiom, a = b). fof(c, conjecture, b = a).");
    const auto& last = m->clauses().back();
    EXPECT_EQ(last.origin, "reflexivity");
    EXPECT_EQ(to_string(last.literals[0], m->symbols()), "X0 = X0");
    EXPECT_TRUE(m->has_equality());
    ASSERT_EQ(m->equations().size(), 1u);

    ClausifyOptions no_refl;
    no_refl.reflexivity = false;
    auto m2 = clausify(tptp::parse_problem("fof(a, axiom, a = b)."), no_refl);
    EXPECT_EQ(m2.size(), 1u);
}

TEST(Clausify, DuplicatesAreMerged) {
    auto m = matrix_from("cnf(a, axiom, p(X) | p(X)). cnf(b, axiom, p(Y)).");
    EXPECT_EQ(m->size(), 1u);
    EXPECT_EQ(m->clause(0).literals.size(), 1u);
}

TEST(Clausify, Errors) {
    EXPECT_THROW(clausify(tptp::Problem{}), ClausifyError);
    EXPECT_THROW(matrix_from("fof(a, axiom, $false)."), ClausifyError);
    EXPECT_THROW(matrix_from("fof(a, axiom, $true)."), ClausifyError);
}

TEST(Matrix, ValidatesConstruction) {
    auto symbols = std::make_shared<SymbolTable>();
    auto p = symbols->intern("p", 0, SymbolKind::Predicate);
    Clause c{0, {Literal{true, p, {}}}, 0, false, "c"};
    EXPECT_THROW(Matrix(symbols, {}, {0}), std::invalid_argument);
    EXPECT_THROW(Matrix(symbols, {c}, {}), std::invalid_argument);
    EXPECT_THROW(Matrix(symbols, {c}, {1}), std::invalid_argument);
    Clause bad = c;
    bad.id = 3;
    EXPECT_THROW(Matrix(symbols, {bad}, {0}), std::invalid_argument);
    EXPECT_NO_THROW(Matrix(symbols, {c}, {0}));
}

TEST(Matrix, DumpIsDeterministic) {
    const char* text = "fof(a, axiom, ![X]: (p(X) | ~q(f(X)))). fof(c, conjecture, p(a)).";
    EXPECT_EQ(dump_matrix(*matrix_from(text)), dump_matrix(*matrix_from(text)));
    EXPECT_EQ(dump_matrix(*matrix_from(text)), "0 - a : p(X0) | ~q(f(X0))\n1 start c : ~p(a)\n");
}

// --------------------------------------------------------------- truth table

namespace {

using tptp::Formula;
using tptp::FormulaKind;

bool eval(const Formula& f, const std::map<std::string, bool>& v) {
    auto c = [&](std::size_t i) { return eval(f.children[i], v); };
    switch (f.kind) {
        case FormulaKind::Atom: return v.at(f.predicate);
        case FormulaKind::True: return true;
        case FormulaKind::False: return false;
        case FormulaKind::Not: return !c(0);
        case FormulaKind::And: {
            for (std::size_t i = 0; i < f.children.size(); ++i) {
                if (!c(i)) return false;
            }
            return true;
        }
        case FormulaKind::Or: {
            for (std::size_t i = 0; i < f.children.size(); ++i) {
                if (c(i)) return true;
            }
            return false;
        }
        case FormulaKind::Implies: return !c(0) || c(1);
        case FormulaKind::ReverseImplies: return c(0) || !c(1);
        case FormulaKind::Iff: return c(0) == c(1);
        case FormulaKind::Xor: return c(0) != c(1);
        case FormulaKind::Nor: return !(c(0) || c(1));
        case FormulaKind::Nand: return !(c(0) && c(1));
        default: throw std::logic_error("not propositional");
    }
}

Formula random_prop(std::mt19937_64& rng, int depth) {
    static const char* atoms[] = {"p", "q", "r"};
    Formula f;
    if (depth == 0 || rng() % 4 == 0) {
        if (rng() % 12 == 0) {
            f.kind = rng() % 2 ? FormulaKind::True : FormulaKind::False;
        } else {
            f.kind = FormulaKind::Atom;
            f.predicate = atoms[rng() % 3];
        }
        return f;
    }
    static const FormulaKind ops[] = {FormulaKind::Not,     FormulaKind::And, FormulaKind::Or,
                                      FormulaKind::Implies, FormulaKind::Iff, FormulaKind::Xor,
                                      FormulaKind::Nor,     FormulaKind::Nand};
    f.kind = ops[rng() % 8];
    int n = f.kind == FormulaKind::Not ? 1 : 2;
    for (int i = 0; i < n; ++i) f.children.push_back(random_prop(rng, depth - 1));
    return f;
}

std::vector<std::map<std::string, bool>> assignments() {
    std::vector<std::map<std::string, bool>> out;
    for (int mask = 0; mask < 8; ++mask) out.push_back({{"p", mask & 1}, {"q", mask & 2}, {"r", mask & 4}});
    return out;
}

bool clause_true(const Matrix& m, const Clause& c, const std::map<std::string, bool>& v) {
    for (const auto& l : c.literals) {
        if (v.at(m.symbols().name(l.predicate)) == l.positive) return true;
    }
    return false;
}

// Ground connection tableau search over Herbrand instances of the clauses,
// written independently of the engine. Complete for ground problems once
// the path bound reaches the number of ground atoms.
class GroundOracle {
public:
    GroundOracle(const Matrix& m, int max_path) : max_path_(max_path) {
        std::vector<Term> universe;
        for (SymbolId s = 0; s < m.symbols().size(); ++s) {
            if (m.symbols().kind(s) == SymbolKind::Function && m.symbols().arity(s) == 0) {
                universe.push_back(Term::constant(s));
            }
        }
        for (const auto& c : m.clauses()) {
            bool start = std::find(m.start_clauses().begin(), m.start_clauses().end(), c.id) !=
                         m.start_clauses().end();
            std::vector<int> choice(static_cast<std::size_t>(c.var_count), 0);
            if (c.var_count > 0 && universe.empty()) continue;
            for (;;) {
                Substitution s;
                for (int i = 0; i < c.var_count; ++i) s.bind(i, universe[static_cast<std::size_t>(choice[i])]);
                std::vector<std::string> lits;
                for (const auto& l : c.literals) lits.push_back(to_string(s.apply(l), m.symbols()));
                clauses_.push_back(lits);
                if (start) starts_.push_back(clauses_.size() - 1);
                int k = 0;
                while (k < c.var_count && ++choice[k] == static_cast<int>(universe.size())) choice[k++] = 0;
                if (k == c.var_count) break;
            }
        }
    }

    bool provable() const {
        for (std::size_t s : starts_) {
            if (solve(clauses_[s], {})) return true;
        }
        return false;
    }

private:
    static std::string complement(const std::string& l) { return l[0] == '~' ? l.substr(1) : "~" + l; }

    // Ground goals share no variables, so each can be closed on its own.
    bool solve(const std::vector<std::string>& goals, const std::vector<std::string>& path) const {
        for (const auto& g : goals) {
            if (!solve_one(g, path)) return false;
        }
        return true;
    }

    bool solve_one(const std::string& g, const std::vector<std::string>& path) const {
        std::set<std::string> key_set(path.begin(), path.end());
        std::string key = g + "@";
        for (const auto& l : key_set) key += l + ",";
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        bool r = search_one(g, path);
        memo_.emplace(key, r);
        return r;
    }

    bool search_one(const std::string& g, const std::vector<std::string>& path) const {
        std::string neg = complement(g);
        if (std::find(path.begin(), path.end(), neg) != path.end()) return true;
        // regularity keeps the search finite and loses nothing on ground input
        if (std::find(path.begin(), path.end(), g) != path.end()) return false;
        if (static_cast<int>(path.size()) >= max_path_) return false;
        auto below = path;
        below.push_back(g);
        for (const auto& c : clauses_) {
            for (std::size_t i = 0; i < c.size(); ++i) {
                if (c[i] != neg) continue;
                std::vector<std::string> rest;
                for (std::size_t j = 0; j < c.size(); ++j) {
                    if (j != i) rest.push_back(c[j]);
                }
                if (solve(rest, below)) return true;
            }
        }
        return false;
    }

    int max_path_;
    mutable std::map<std::string, bool> memo_;
    std::vector<std::vector<std::string>> clauses_;
    std::vector<std::size_t> starts_;
};

}  // namespace

TEST(Clausify, TruthTableSoundness) {
    std::mt19937_64 rng(7);
    int unsat = 0;
    for (int trial = 0; trial < 400; ++trial) {
        tptp::Problem p;
        int n = 1 + int(rng() % 3);
        for (int i = 0; i < n; ++i) {
            tptp::AnnotatedFormula af;
            af.name = "f" + std::to_string(i);
            af.role = (i == n - 1 && rng() % 2) ? tptp::Role::Conjecture : tptp::Role::Axiom;
            af.formula = random_prop(rng, 3);
            p.formulas.push_back(af);
        }
        bool formula_sat = false;
        for (const auto& v : assignments()) {
            bool all = true;
            for (const auto& af : p.formulas) {
                bool val = eval(af.formula, v);
                all &= af.role == tptp::Role::Conjecture ? !val : val;
            }
            formula_sat |= all;
        }

        bool matrix_sat;
        std::optional<Matrix> m;
        std::string error;
        try {
            m.emplace(clausify(p));
        } catch (const ClausifyError& e) {
            error = e.what();
        }
        if (!m) {
            // "no clauses" means every formula simplified to true.
            bool empty_clause = error.find("empty clause") != std::string::npos;
            ASSERT_TRUE(empty_clause || error.find("no clauses") != std::string::npos) << error;
            matrix_sat = !empty_clause;
        } else {
            matrix_sat = false;
            for (const auto& v : assignments()) {
                bool all = true;
                for (const auto& c : m->clauses()) all &= clause_true(*m, c, v);
                matrix_sat |= all;
            }
            // Ground oracle: refutable iff unsatisfiable, when the start
            // clauses carry the contradiction (they do when there is no
            // conjecture, and when the axioms alone are satisfiable).
            bool axioms_sat = false;
            for (const auto& v : assignments()) {
                bool all = true;
                for (const auto& af : p.formulas) {
                    if (af.role != tptp::Role::Conjecture) all &= eval(af.formula, v);
                }
                axioms_sat |= all;
            }
            if (axioms_sat || m->start_clauses().size() == m->size()) {
                EXPECT_EQ(GroundOracle(*m, 3).provable(), !matrix_sat) << tptp::print_problem(p);
            }
        }
        EXPECT_EQ(formula_sat, matrix_sat) << tptp::print_problem(p);
        unsat += !formula_sat;
    }
    EXPECT_GT(unsat, 20);
}

TEST(Clausify, GroundOracleOnQuantifiedExample) {
    // As stated, p(a) & q(a) does not entail ![X]: (p(X) => q(X)); the
    // negated conjecture introduces a fresh Skolem constant. Both the engine
    // and the oracle must fail on it.
    auto stated = matrix_from(
        "fof(ax, axiom, p(a) & (q(a) | $false)). fof(c, conjecture, ![X]: (p(X) => q(X))).");
    EXPECT_FALSE(GroundOracle(*stated, 6).provable());
    EXPECT_NE(prove(stated, UniformPredictor{}).status, ProofStatus::Solved);

    // The existential reading is a theorem.
    auto m = matrix_from("fof(ax, axiom, p(a) & (q(a) | $false)). fof(c, conjecture, ?[X]: (p(X) => q(X))).");
    EXPECT_TRUE(GroundOracle(*m, 6).provable());
    auto r = prove(m, UniformPredictor{});
    ASSERT_EQ(r.status, ProofStatus::Solved);
    EXPECT_TRUE(check_proof(m, *r.proof).valid);
}

TEST(Clausify, EngineProofsAreGroundRefutable) {
    std::mt19937_64 rng(11);
    int solved = 0;
    for (int trial = 0; trial < 200; ++trial) {
        tptp::Problem p;
        for (int i = 0; i < 3; ++i) {
            tptp::AnnotatedFormula af;
            af.name = "f" + std::to_string(i);
            af.role = i == 2 ? tptp::Role::Conjecture : tptp::Role::Axiom;
            af.formula = random_prop(rng, 2);
            p.formulas.push_back(af);
        }
        std::shared_ptr<const Matrix> m;
        try {
            m = std::make_shared<const Matrix>(clausify(p));
        } catch (const ClausifyError&) {
            continue;
        }
        SearchLimits limits;
        limits.inference_limit = 2000;
        auto r = prove(m, UniformPredictor{}, limits);
        if (r.status != ProofStatus::Solved) continue;
        ++solved;
        EXPECT_TRUE(check_proof(m, *r.proof).valid);
        EXPECT_TRUE(GroundOracle(*m, 3).provable()) << tptp::print_problem(p);
    }
    EXPECT_GT(solved, 10);
}
