#include "entcop/matrix.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace entcop {

// --------------------------------------------------------------------- Matrix

Matrix::Matrix(std::shared_ptr<const SymbolTable> symbols, std::vector<Clause> clauses,
               std::vector<int> start_clauses)
    : symbols_(std::move(symbols)), clauses_(std::move(clauses)), start_clauses_(std::move(start_clauses)) {
    if (!symbols_) throw std::invalid_argument("matrix needs a symbol table");
    if (clauses_.empty()) throw std::invalid_argument("matrix has no clauses");
    if (start_clauses_.empty()) throw std::invalid_argument("matrix has no start clause");
    by_predicate_.resize(2 * symbols_->size());
    for (std::size_t i = 0; i < clauses_.size(); ++i) {
        const Clause& c = clauses_[i];
        if (c.id != static_cast<int>(i)) throw std::invalid_argument("clause ids must be dense and ordered");
        if (c.literals.empty()) throw std::invalid_argument("empty clause in matrix");
        for (std::size_t j = 0; j < c.literals.size(); ++j) {
            const Literal& l = c.literals[j];
            LiteralRef ref{c.id, static_cast<int>(j)};
            by_predicate_.at(2 * l.predicate + (l.positive ? 1 : 0)).push_back(ref);
            if (l.is_equality()) {
                has_equality_ = true;
                if (l.positive && !(l.args[0] == l.args[1])) equations_.push_back(ref);
            }
        }
    }
    for (int s : start_clauses_) {
        if (s < 0 || static_cast<std::size_t>(s) >= clauses_.size()) {
            throw std::invalid_argument("start clause id out of range");
        }
    }
}

const std::vector<LiteralRef>& Matrix::literals_with(SymbolId predicate, bool positive) const {
    static const std::vector<LiteralRef> kEmpty;
    std::size_t idx = 2 * predicate + (positive ? 1 : 0);
    return idx < by_predicate_.size() ? by_predicate_[idx] : kEmpty;
}

// ------------------------------------------------------------ Clausification

namespace {

using tptp::FormulaKind;

struct Nnf {
    enum class Kind { Lit, And, Or, ForAll, Exists, True, False };
    Kind kind = Kind::True;
    Literal lit;
    std::vector<int> vars;
    std::vector<Nnf> kids;
};

Nnf make_const(bool value) {
    Nnf n;
    n.kind = value ? Nnf::Kind::True : Nnf::Kind::False;
    return n;
}

class Clausifier {
public:
    Clausifier(const ClausifyOptions& options) : options_(options), symbols_(std::make_shared<SymbolTable>()) {}

    Matrix run(const tptp::Problem& problem) {
        // All conjectures are proved jointly: their conjunction is negated once.
        tptp::Formula conjunction;
        conjunction.kind = FormulaKind::And;
        std::string conjecture_names;
        for (const auto& af : problem.formulas) {
            if (af.role == tptp::Role::Conjecture) {
                conjunction.children.push_back(closure(af));
                if (!conjecture_names.empty()) conjecture_names += ",";
                conjecture_names += af.name;
            }
        }
        for (const auto& af : problem.formulas) {
            if (af.role == tptp::Role::Conjecture) continue;
            add_formula(closure(af), true, af.role == tptp::Role::NegatedConjecture, af.name);
        }
        if (!conjunction.children.empty()) {
            tptp::Formula goal = conjunction.children.size() == 1 ? conjunction.children[0] : conjunction;
            add_formula(goal, false, true, conjecture_names);
        }
        return build();
    }

private:
    // Universal closure over free variables (implicit in CNF).
    tptp::Formula closure(const tptp::AnnotatedFormula& af) {
        std::vector<std::string> free;
        std::set<std::string> bound;
        collect_free(af.formula, bound, free);
        if (free.empty()) return af.formula;
        tptp::Formula q;
        q.kind = FormulaKind::ForAll;
        q.variables = free;
        q.children.push_back(af.formula);
        return q;
    }

    static void collect_free_term(const tptp::AstTerm& t, const std::set<std::string>& bound,
                                  std::vector<std::string>& out) {
        if (t.variable) {
            if (!bound.contains(t.name) && std::find(out.begin(), out.end(), t.name) == out.end()) {
                out.push_back(t.name);
            }
            return;
        }
        for (const auto& a : t.args) collect_free_term(a, bound, out);
    }

    static void collect_free(const tptp::Formula& f, std::set<std::string>& bound, std::vector<std::string>& out) {
        for (const auto& a : f.args) collect_free_term(a, bound, out);
        if (f.kind == FormulaKind::ForAll || f.kind == FormulaKind::Exists) {
            std::vector<std::string> added;
            for (const auto& v : f.variables) {
                if (bound.insert(v).second) added.push_back(v);
            }
            collect_free(f.children[0], bound, out);
            for (const auto& v : added) bound.erase(v);
            return;
        }
        for (const auto& c : f.children) collect_free(c, bound, out);
    }

    void add_formula(const tptp::Formula& f, bool positive, bool start, const std::string& origin) {
        std::vector<std::pair<std::string, int>> env;
        Nnf n = to_nnf(f, positive, env);
        std::vector<int> universals;
        n = skolemize(n, universals);
        n = simplify(std::move(n));
        for (auto& lits : to_cnf(n)) {
            pending_.push_back(PendingClause{std::move(lits), start, origin});
            if (pending_.size() > options_.max_clauses) {
                throw ClausifyError("clausification exceeds " + std::to_string(options_.max_clauses) + " clauses");
            }
        }
    }

    Term convert_term(const tptp::AstTerm& t, const std::vector<std::pair<std::string, int>>& env) {
        if (t.variable) {
            for (auto it = env.rbegin(); it != env.rend(); ++it) {
                if (it->first == t.name) return Term::variable(it->second);
            }
            throw ClausifyError("unbound variable " + t.name);
        }
        std::vector<Term> args;
        args.reserve(t.args.size());
        for (const auto& a : t.args) args.push_back(convert_term(a, env));
        SymbolId id = intern(t.name, static_cast<int>(t.args.size()), SymbolKind::Function);
        return Term::compound(id, std::move(args));
    }

    SymbolId intern(const std::string& name, int arity, SymbolKind kind) {
        try {
            return symbols_->intern(name, arity, kind);
        } catch (const std::invalid_argument& e) {
            throw ClausifyError(e.what());
        }
    }

    Nnf to_nnf(const tptp::Formula& f, bool positive, std::vector<std::pair<std::string, int>>& env) {
        Nnf n;
        switch (f.kind) {
            case FormulaKind::Atom:
            case FormulaKind::Equal:
            case FormulaKind::NotEqual: {
                n.kind = Nnf::Kind::Lit;
                bool pol = positive;
                if (f.kind == FormulaKind::Atom) {
                    n.lit.predicate = intern(f.predicate, static_cast<int>(f.args.size()), SymbolKind::Predicate);
                } else {
                    n.lit.predicate = SymbolTable::kEquality;
                    if (f.kind == FormulaKind::NotEqual) pol = !pol;
                }
                n.lit.positive = pol;
                for (const auto& a : f.args) n.lit.args.push_back(convert_term(a, env));
                return n;
            }
            case FormulaKind::True:
                return make_const(positive);
            case FormulaKind::False:
                return make_const(!positive);
            case FormulaKind::Not:
                return to_nnf(f.children[0], !positive, env);
            case FormulaKind::And:
            case FormulaKind::Or: {
                bool conj = (f.kind == FormulaKind::And) == positive;
                n.kind = conj ? Nnf::Kind::And : Nnf::Kind::Or;
                for (const auto& c : f.children) n.kids.push_back(to_nnf(c, positive, env));
                return n;
            }
            case FormulaKind::Nand:
            case FormulaKind::Nor: {
                tptp::Formula inner;
                inner.kind = f.kind == FormulaKind::Nand ? FormulaKind::And : FormulaKind::Or;
                inner.children = f.children;
                return to_nnf(inner, !positive, env);
            }
            case FormulaKind::Implies:
            case FormulaKind::ReverseImplies: {
                const auto& lhs = f.kind == FormulaKind::Implies ? f.children[0] : f.children[1];
                const auto& rhs = f.kind == FormulaKind::Implies ? f.children[1] : f.children[0];
                // lhs => rhs  ==  ~lhs | rhs
                n.kind = positive ? Nnf::Kind::Or : Nnf::Kind::And;
                n.kids.push_back(to_nnf(lhs, !positive, env));
                n.kids.push_back(to_nnf(rhs, positive, env));
                return n;
            }
            case FormulaKind::Iff:
            case FormulaKind::Xor: {
                bool pol = f.kind == FormulaKind::Iff ? positive : !positive;
                const auto& a = f.children[0];
                const auto& b = f.children[1];
                if (pol) {
                    // (~a | b) & (a | ~b)
                    n.kind = Nnf::Kind::And;
                    Nnf l, r;
                    l.kind = r.kind = Nnf::Kind::Or;
                    l.kids.push_back(to_nnf(a, false, env));
                    l.kids.push_back(to_nnf(b, true, env));
                    r.kids.push_back(to_nnf(a, true, env));
                    r.kids.push_back(to_nnf(b, false, env));
                    n.kids.push_back(std::move(l));
                    n.kids.push_back(std::move(r));
                } else {
                    // (a & ~b) | (~a & b)
                    n.kind = Nnf::Kind::Or;
                    Nnf l, r;
                    l.kind = r.kind = Nnf::Kind::And;
                    l.kids.push_back(to_nnf(a, true, env));
                    l.kids.push_back(to_nnf(b, false, env));
                    r.kids.push_back(to_nnf(a, false, env));
                    r.kids.push_back(to_nnf(b, true, env));
                    n.kids.push_back(std::move(l));
                    n.kids.push_back(std::move(r));
                }
                return n;
            }
            case FormulaKind::ForAll:
            case FormulaKind::Exists: {
                bool universal = (f.kind == FormulaKind::ForAll) == positive;
                n.kind = universal ? Nnf::Kind::ForAll : Nnf::Kind::Exists;
                for (const auto& v : f.variables) {
                    int id = next_var_++;
                    env.emplace_back(v, id);
                    n.vars.push_back(id);
                }
                n.kids.push_back(to_nnf(f.children[0], positive, env));
                env.resize(env.size() - f.variables.size());
                return n;
            }
        }
        return n;
    }

    static void vars_of(const Term& t, std::unordered_set<int>& out) {
        if (t.is_var()) {
            out.insert(t.var());
            return;
        }
        for (const auto& a : t.args()) vars_of(a, out);
    }

    static void vars_of(const Nnf& n, std::unordered_set<int>& out) {
        if (n.kind == Nnf::Kind::Lit) {
            for (const auto& a : n.lit.args) vars_of(a, out);
        }
        for (const auto& k : n.kids) vars_of(k, out);
    }

    static Term substitute(const Term& t, const std::unordered_map<int, Term>& map) {
        if (t.is_var()) {
            auto it = map.find(t.var());
            return it == map.end() ? t : it->second;
        }
        if (t.ground()) return t;
        std::vector<Term> args;
        for (const auto& a : t.args()) args.push_back(substitute(a, map));
        return Term::compound(t.symbol(), std::move(args));
    }

    static void substitute(Nnf& n, const std::unordered_map<int, Term>& map) {
        if (n.kind == Nnf::Kind::Lit) {
            for (auto& a : n.lit.args) a = substitute(a, map);
        }
        for (auto& k : n.kids) substitute(k, map);
    }

    Nnf skolemize(Nnf n, std::vector<int>& universals) {
        switch (n.kind) {
            case Nnf::Kind::ForAll: {
                for (int v : n.vars) universals.push_back(v);
                Nnf body = skolemize(std::move(n.kids[0]), universals);
                universals.resize(universals.size() - n.vars.size());
                return body;
            }
            case Nnf::Kind::Exists: {
                std::unordered_set<int> free;
                vars_of(n.kids[0], free);
                std::vector<Term> args;
                for (int u : universals) {
                    if (free.contains(u)) args.push_back(Term::variable(u));
                }
                std::unordered_map<int, Term> map;
                for (int v : n.vars) {
                    std::string name = symbols_->fresh_skolem_name();
                    SymbolId id = intern(name, static_cast<int>(args.size()), SymbolKind::Function);
                    map.emplace(v, Term::compound(id, args));
                }
                Nnf body = std::move(n.kids[0]);
                substitute(body, map);
                return skolemize(std::move(body), universals);
            }
            case Nnf::Kind::And:
            case Nnf::Kind::Or:
                for (auto& k : n.kids) k = skolemize(std::move(k), universals);
                return n;
            default:
                return n;
        }
    }

    static Nnf simplify(Nnf n) {
        if (n.kind != Nnf::Kind::And && n.kind != Nnf::Kind::Or) return n;
        const bool conj = n.kind == Nnf::Kind::And;
        std::vector<Nnf> kept;
        for (auto& k : n.kids) {
            Nnf s = simplify(std::move(k));
            if (s.kind == (conj ? Nnf::Kind::False : Nnf::Kind::True)) return s;
            if (s.kind == (conj ? Nnf::Kind::True : Nnf::Kind::False)) continue;
            kept.push_back(std::move(s));
        }
        if (kept.empty()) return make_const(conj);
        if (kept.size() == 1) return std::move(kept[0]);
        n.kids = std::move(kept);
        return n;
    }

    std::vector<std::vector<Literal>> to_cnf(const Nnf& n) {
        switch (n.kind) {
            case Nnf::Kind::Lit:
                return {{n.lit}};
            case Nnf::Kind::True:
                return {};
            case Nnf::Kind::False:
                return {{}};
            case Nnf::Kind::And: {
                std::vector<std::vector<Literal>> out;
                for (const auto& k : n.kids) {
                    for (auto& c : to_cnf(k)) out.push_back(std::move(c));
                }
                return out;
            }
            case Nnf::Kind::Or: {
                std::vector<std::vector<Literal>> acc{{}};
                for (const auto& k : n.kids) {
                    auto part = to_cnf(k);
                    std::vector<std::vector<Literal>> next;
                    if (acc.size() * part.size() > options_.max_clauses) {
                        throw ClausifyError("clausification exceeds " + std::to_string(options_.max_clauses) +
                                            " clauses");
                    }
                    for (const auto& a : acc) {
                        for (const auto& p : part) {
                            auto c = a;
                            c.insert(c.end(), p.begin(), p.end());
                            next.push_back(std::move(c));
                        }
                    }
                    acc = std::move(next);
                }
                return acc;
            }
            default:
                throw ClausifyError("quantifier left after skolemization");
        }
    }

    static Term renumber(const Term& t, std::unordered_map<int, int>& map) {
        if (t.is_var()) {
            auto [it, inserted] = map.emplace(t.var(), static_cast<int>(map.size()));
            return Term::variable(it->second);
        }
        if (t.ground()) return t;
        std::vector<Term> args;
        for (const auto& a : t.args()) args.push_back(renumber(a, map));
        return Term::compound(t.symbol(), std::move(args));
    }

    Matrix build() {
        std::vector<Clause> clauses;
        std::unordered_map<std::string, int> seen;
        bool any_start = false;
        for (auto& pc : pending_) {
            if (pc.literals.empty()) {
                throw ClausifyError("formula '" + pc.origin + "' clausifies to the empty clause");
            }
            Clause c;
            std::unordered_map<int, int> map;
            for (const auto& l : pc.literals) {
                Literal r{l.positive, l.predicate, {}};
                for (const auto& a : l.args) r.args.push_back(renumber(a, map));
                if (std::find(c.literals.begin(), c.literals.end(), r) == c.literals.end()) {
                    c.literals.push_back(std::move(r));
                }
            }
            c.var_count = static_cast<int>(map.size());
            c.from_conjecture = pc.start;
            c.origin = pc.origin;
            std::string key;
            for (const auto& l : c.literals) key += to_string(l, *symbols_) + "|";
            if (auto it = seen.find(key); it != seen.end()) {
                clauses[static_cast<std::size_t>(it->second)].from_conjecture |= pc.start;
                any_start |= pc.start;
                continue;
            }
            c.id = static_cast<int>(clauses.size());
            seen.emplace(key, c.id);
            any_start |= pc.start;
            clauses.push_back(std::move(c));
        }
        if (clauses.empty()) throw ClausifyError("problem clausifies to no clauses");

        std::vector<int> starts;
        for (const auto& c : clauses) {
            if (!any_start || c.from_conjecture) starts.push_back(c.id);
        }

        bool equality = false;
        for (const auto& c : clauses) {
            for (const auto& l : c.literals) equality |= l.is_equality();
        }
        if (equality && options_.reflexivity) {
            Clause refl;
            refl.id = static_cast<int>(clauses.size());
            refl.literals.push_back(Literal{true, SymbolTable::kEquality, {Term::variable(0), Term::variable(0)}});
            refl.var_count = 1;
            refl.origin = "reflexivity";
            clauses.push_back(std::move(refl));
        }
        return Matrix(symbols_, std::move(clauses), std::move(starts));
    }

    struct PendingClause {
        std::vector<Literal> literals;
        bool start;
        std::string origin;
    };

    ClausifyOptions options_;
    std::shared_ptr<SymbolTable> symbols_;
    std::vector<PendingClause> pending_;
    int next_var_ = 0;
};

}  // namespace

Matrix clausify(const tptp::Problem& problem, const ClausifyOptions& options) {
    if (problem.formulas.empty()) throw ClausifyError("problem has no formulas");
    return Clausifier(options).run(problem);
}

std::string dump_matrix(const Matrix& matrix) {
    std::ostringstream os;
    std::vector<bool> is_start(matrix.size(), false);
    for (int s : matrix.start_clauses()) is_start[static_cast<std::size_t>(s)] = true;
    for (const auto& c : matrix.clauses()) {
        os << c.id << (is_start[static_cast<std::size_t>(c.id)] ? " start " : " - ") << c.origin << " : ";
        for (std::size_t i = 0; i < c.literals.size(); ++i) {
            if (i) os << " | ";
            os << to_string(c.literals[i], matrix.symbols());
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace entcop
