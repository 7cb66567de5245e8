#include "entcop/term.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace entcop {

namespace {

constexpr std::size_t kHashMul = 0x9E3779B97F4A7C15ULL;

std::size_t mix(std::size_t seed, std::size_t value) {
    return (seed ^ (value + kHashMul + (seed << 6) + (seed >> 2)));
}

}  // namespace

// ---------------------------------------------------------------- SymbolTable

SymbolTable::SymbolTable() { intern("=", 2, SymbolKind::Predicate); }

SymbolId SymbolTable::intern(std::string_view name, int arity, SymbolKind kind) {
    auto& index = kind == SymbolKind::Function ? functions_ : predicates_;
    std::string key(name);
    if (auto it = index.find(key); it != index.end()) {
        if (entries_[it->second].arity != arity) {
            throw std::invalid_argument("symbol '" + key + "' used with arity " + std::to_string(arity) +
                                        " and " + std::to_string(entries_[it->second].arity));
        }
        return it->second;
    }
    auto id = static_cast<SymbolId>(entries_.size());
    entries_.push_back(Entry{key, arity, kind});
    index.emplace(std::move(key), id);
    return id;
}

std::optional<SymbolId> SymbolTable::find(std::string_view name, SymbolKind kind) const {
    const auto& index = kind == SymbolKind::Function ? functions_ : predicates_;
    if (auto it = index.find(std::string(name)); it != index.end()) return it->second;
    return std::nullopt;
}

std::string SymbolTable::fresh_skolem_name() {
    for (;;) {
        std::string candidate = "sk" + std::to_string(skolem_counter_++);
        if (!functions_.contains(candidate) && !predicates_.contains(candidate)) return candidate;
    }
}

// ----------------------------------------------------------------------- Term

Term Term::variable(int id) {
    if (id < 0) throw std::invalid_argument("variable ids must be nonnegative");
    auto node = std::make_shared<Node>();
    node->var = id;
    node->max_var = id;
    node->hash = mix(0x5bd1e995u, static_cast<std::size_t>(id));
    return Term(std::move(node));
}

Term Term::compound(SymbolId symbol, std::vector<Term> args) {
    auto node = std::make_shared<Node>();
    node->symbol = symbol;
    std::size_t h = mix(0x27d4eb2du, symbol);
    for (const auto& a : args) {
        node->max_var = std::max(node->max_var, a.max_var());
        node->size += a.node_->size;
        h = mix(h, a.hash());
    }
    node->hash = h;
    node->args = std::move(args);
    return Term(std::move(node));
}

Term Term::offset(int delta) const {
    if (delta == 0 || ground()) return *this;
    if (is_var()) return variable(var() + delta);
    std::vector<Term> args;
    args.reserve(node_->args.size());
    for (const auto& a : node_->args) args.push_back(a.offset(delta));
    return compound(symbol(), std::move(args));
}

bool operator==(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return true;
    if (!a.node_ || !b.node_) return false;
    if (a.node_->hash != b.node_->hash || a.node_->var != b.node_->var) return false;
    if (a.is_var()) return true;
    if (a.symbol() != b.symbol() || a.args().size() != b.args().size()) return false;
    for (std::size_t i = 0; i < a.args().size(); ++i) {
        if (!(a.args()[i] == b.args()[i])) return false;
    }
    return true;
}

int Literal::max_var() const {
    int m = -1;
    for (const auto& a : args) m = std::max(m, a.max_var());
    return m;
}

Literal Literal::offset(int delta) const {
    Literal out{positive, predicate, {}};
    out.args.reserve(args.size());
    for (const auto& a : args) out.args.push_back(a.offset(delta));
    return out;
}

// ------------------------------------------------------------------ Positions

namespace {

void collect_positions(const Term& t, Position& prefix, std::vector<std::pair<Position, Term>>& out) {
    out.emplace_back(prefix, t);
    if (t.is_var()) return;
    for (std::size_t i = 0; i < t.args().size(); ++i) {
        prefix.push_back(static_cast<int>(i) + 1);
        collect_positions(t.args()[i], prefix, out);
        prefix.pop_back();
    }
}

const Term& descend(const Term& t, const Position& pos, std::size_t from) {
    const Term* cur = &t;
    for (std::size_t k = from; k < pos.size(); ++k) {
        if (cur->is_var() || pos[k] < 1 || static_cast<std::size_t>(pos[k]) > cur->args().size()) {
            throw std::out_of_range("invalid term position " + position_to_string(pos));
        }
        cur = &cur->args()[static_cast<std::size_t>(pos[k]) - 1];
    }
    return *cur;
}

Term replace_from(const Term& t, const Position& pos, std::size_t k, const Term& replacement) {
    if (k == pos.size()) return replacement;
    if (t.is_var() || pos[k] < 1 || static_cast<std::size_t>(pos[k]) > t.args().size()) {
        throw std::out_of_range("invalid term position " + position_to_string(pos));
    }
    std::vector<Term> args(t.args().begin(), t.args().end());
    auto i = static_cast<std::size_t>(pos[k]) - 1;
    args[i] = replace_from(args[i], pos, k + 1, replacement);
    return Term::compound(t.symbol(), std::move(args));
}

}  // namespace

std::vector<std::pair<Position, Term>> subterm_positions(const Literal& literal) {
    std::vector<std::pair<Position, Term>> out;
    Position prefix;
    for (std::size_t i = 0; i < literal.args.size(); ++i) {
        prefix.push_back(static_cast<int>(i) + 1);
        collect_positions(literal.args[i], prefix, out);
        prefix.pop_back();
    }
    return out;
}

std::vector<std::pair<Position, Term>> subterm_positions(const Term& term) {
    std::vector<std::pair<Position, Term>> out;
    Position prefix;
    collect_positions(term, prefix, out);
    return out;
}

const Term& subterm_at(const Literal& literal, const Position& pos) {
    if (pos.empty() || pos[0] < 1 || static_cast<std::size_t>(pos[0]) > literal.args.size()) {
        throw std::out_of_range("invalid literal position " + position_to_string(pos));
    }
    return descend(literal.args[static_cast<std::size_t>(pos[0]) - 1], pos, 1);
}

const Term& subterm_at(const Term& term, const Position& pos) { return descend(term, pos, 0); }

Literal replace_at(const Literal& literal, const Position& pos, const Term& replacement) {
    if (pos.empty() || pos[0] < 1 || static_cast<std::size_t>(pos[0]) > literal.args.size()) {
        throw std::out_of_range("invalid literal position " + position_to_string(pos));
    }
    Literal out = literal;
    auto i = static_cast<std::size_t>(pos[0]) - 1;
    out.args[i] = replace_from(out.args[i], pos, 1, replacement);
    return out;
}

Term replace_at(const Term& term, const Position& pos, const Term& replacement) {
    return replace_from(term, pos, 0, replacement);
}

std::string position_to_string(const Position& pos) {
    std::string out;
    for (std::size_t i = 0; i < pos.size(); ++i) {
        if (i) out += '.';
        out += std::to_string(pos[i]);
    }
    return out;
}

Position position_from_string(std::string_view text) {
    Position pos;
    if (text.empty()) return pos;
    std::size_t start = 0;
    for (;;) {
        auto dot = text.find('.', start);
        auto part = text.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start);
        if (part.empty() || !std::all_of(part.begin(), part.end(), [](char c) { return c >= '0' && c <= '9'; })) {
            throw std::invalid_argument("malformed position '" + std::string(text) + "'");
        }
        int index = std::stoi(std::string(part));
        if (index < 1) throw std::invalid_argument("positions are 1-based: '" + std::string(text) + "'");
        pos.push_back(index);
        if (dot == std::string_view::npos) break;
        start = dot + 1;
    }
    return pos;
}

// --------------------------------------------------------------- Substitution

const Term* Substitution::lookup(int var) const {
    if (var < 0 || static_cast<std::size_t>(var) >= bindings_.size()) return nullptr;
    const Term& t = bindings_[static_cast<std::size_t>(var)];
    return t.is_null() ? nullptr : &t;
}

void Substitution::bind(int var, Term value) {
    if (var < 0) throw std::invalid_argument("negative variable id");
    if (bound(var)) throw std::invalid_argument("variable X" + std::to_string(var) + " is already bound");
    if (value.is_null()) throw std::invalid_argument("binding to a null term");
    if (occurs(var, value)) throw std::invalid_argument("binding X" + std::to_string(var) + " fails the occurs check");
    assign(var, std::move(value));
}

void Substitution::assign(int var, Term value) {
    if (static_cast<std::size_t>(var) >= bindings_.size()) bindings_.resize(static_cast<std::size_t>(var) + 1);
    bindings_[static_cast<std::size_t>(var)] = std::move(value);
    trail_.push_back(var);
}

Term Substitution::resolve(const Term& t) const {
    Term cur = t;
    while (cur.is_var()) {
        const Term* next = lookup(cur.var());
        if (!next) break;
        cur = *next;
    }
    return cur;
}

Term Substitution::apply(const Term& t) const {
    Term r = resolve(t);
    if (r.is_var() || r.ground()) return r;
    bool changed = false;
    std::vector<Term> args;
    args.reserve(r.args().size());
    for (const auto& a : r.args()) {
        args.push_back(apply(a));
        if (!(args.back().hash() == a.hash() && args.back() == a)) changed = true;
    }
    if (!changed) return r;
    return Term::compound(r.symbol(), std::move(args));
}

Literal Substitution::apply(const Literal& l) const {
    Literal out{l.positive, l.predicate, {}};
    out.args.reserve(l.args.size());
    for (const auto& a : l.args) out.args.push_back(apply(a));
    return out;
}

bool Substitution::occurs(int var, const Term& t) const {
    Term r = resolve(t);
    if (r.is_var()) return r.var() == var;
    if (r.ground()) return false;
    for (const auto& a : r.args()) {
        if (occurs(var, a)) return true;
    }
    return false;
}

void Substitution::undo(std::size_t mark) {
    while (trail_.size() > mark) {
        bindings_[static_cast<std::size_t>(trail_.back())] = Term();
        trail_.pop_back();
    }
}

std::size_t Substitution::binding_count() const {
    return static_cast<std::size_t>(
        std::count_if(bindings_.begin(), bindings_.end(), [](const Term& t) { return !t.is_null(); }));
}

std::vector<int> Substitution::domain() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < bindings_.size(); ++i) {
        if (!bindings_[i].is_null()) out.push_back(static_cast<int>(i));
    }
    return out;
}

Substitution Substitution::normalized() const {
    Substitution out;
    out.bindings_.resize(bindings_.size());
    for (std::size_t i = 0; i < bindings_.size(); ++i) {
        if (!bindings_[i].is_null()) out.bindings_[i] = apply(bindings_[i]);
    }
    return out;
}

bool operator==(const Substitution& a, const Substitution& b) {
    std::size_t n = std::max(a.bindings_.size(), b.bindings_.size());
    for (std::size_t i = 0; i < n; ++i) {
        const Term* x = a.lookup(static_cast<int>(i));
        const Term* y = b.lookup(static_cast<int>(i));
        if ((x == nullptr) != (y == nullptr)) return false;
        if (x && !(*x == *y)) return false;
    }
    return true;
}

// ---------------------------------------------------------------- Unification

struct UnifyAccess {
    static void assign(Substitution& s, int var, const Term& value) { s.assign(var, value); }
};

namespace {

bool unify_rec(const Term& a, const Term& b, Substitution& s) {
    Term x = s.resolve(a);
    Term y = s.resolve(b);
    if (x.is_var() && y.is_var() && x.var() == y.var()) return true;
    if (x.is_var()) {
        if (s.occurs(x.var(), y)) return false;
        UnifyAccess::assign(s, x.var(), y);
        return true;
    }
    if (y.is_var()) {
        if (s.occurs(y.var(), x)) return false;
        UnifyAccess::assign(s, y.var(), x);
        return true;
    }
    if (x.symbol() != y.symbol() || x.args().size() != y.args().size()) return false;
    if (x.ground() && y.ground()) return x == y;
    for (std::size_t i = 0; i < x.args().size(); ++i) {
        if (!unify_rec(x.args()[i], y.args()[i], s)) return false;
    }
    return true;
}

}  // namespace

bool unify_in_place(const Term& a, const Term& b, Substitution& subst) {
    auto m = subst.mark();
    if (unify_rec(a, b, subst)) return true;
    subst.undo(m);
    return false;
}

bool unify_atoms_in_place(const Literal& a, const Literal& b, Substitution& subst) {
    if (a.predicate != b.predicate || a.args.size() != b.args.size()) return false;
    auto m = subst.mark();
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (!unify_rec(a.args[i], b.args[i], subst)) {
            subst.undo(m);
            return false;
        }
    }
    return true;
}

std::optional<Substitution> unify(const Term& a, const Term& b, const Substitution& under) {
    Substitution s = under;
    if (!unify_in_place(a, b, s)) return std::nullopt;
    s.commit();
    return s;
}

std::optional<Substitution> unify(const Literal& a, const Literal& b, const Substitution& under) {
    if (a.positive != b.positive) return std::nullopt;
    Substitution s = under;
    if (!unify_atoms_in_place(a, b, s)) return std::nullopt;
    s.commit();
    return s;
}

// ------------------------------------------------------------------- Printing

namespace {

void print_term(std::ostream& os, const Term& t, const SymbolTable& symbols) {
    if (t.is_var()) {
        os << 'X' << t.var();
        return;
    }
    os << symbols.name(t.symbol());
    if (t.args().empty()) return;
    os << '(';
    for (std::size_t i = 0; i < t.args().size(); ++i) {
        if (i) os << ',';
        print_term(os, t.args()[i], symbols);
    }
    os << ')';
}

}  // namespace

std::string to_string(const Term& t, const SymbolTable& symbols) {
    std::ostringstream os;
    print_term(os, t, symbols);
    return os.str();
}

std::string to_string(const Literal& l, const SymbolTable& symbols) {
    std::ostringstream os;
    if (l.is_equality()) {
        print_term(os, l.args.at(0), symbols);
        os << (l.positive ? " = " : " != ");
        print_term(os, l.args.at(1), symbols);
        return os.str();
    }
    if (!l.positive) os << '~';
    os << symbols.name(l.predicate);
    if (!l.args.empty()) {
        os << '(';
        for (std::size_t i = 0; i < l.args.size(); ++i) {
            if (i) os << ',';
            print_term(os, l.args[i], symbols);
        }
        os << ')';
    }
    return os.str();
}

}  // namespace entcop
