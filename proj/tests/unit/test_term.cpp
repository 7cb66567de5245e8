#include <gtest/gtest.h>

#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>

#include "support.hpp"

using namespace entcop;
using entcop::testing::TermBuilder;

TEST(SymbolTable, EqualityIsReserved) {
    SymbolTable t;
    EXPECT_EQ(t.name(SymbolTable::kEquality), "=");
    EXPECT_EQ(t.find("=", SymbolKind::Predicate), SymbolTable::kEquality);
}

TEST(SymbolTable, ArityMustBeConsistent) {
    SymbolTable t;
    auto f = t.intern("f", 1, SymbolKind::Function);
    EXPECT_EQ(t.intern("f", 1, SymbolKind::Function), f);
    EXPECT_THROW(t.intern("f", 2, SymbolKind::Function), std::invalid_argument);
    // Functions and predicates live in separate namespaces.
    EXPECT_NO_THROW(t.intern("f", 2, SymbolKind::Predicate));
}

TEST(SymbolTable, SkolemNamesAreFresh) {
    SymbolTable t;
    t.intern("sk0", 0, SymbolKind::Function);
    auto a = t.fresh_skolem_name();
    auto b = t.fresh_skolem_name();
    EXPECT_NE(a, "sk0");
    EXPECT_NE(a, b);
    EXPECT_EQ(a.rfind("sk", 0), 0u);
}

TEST(Term, VariableIdsMustBeNonnegative) { EXPECT_THROW(Term::variable(-1), std::invalid_argument); }

TEST(Term, StructuralEqualityAndOffset) {
    TermBuilder b;
    Term t = b.f("g", {b.v(0), b.f("f", {b.v(2)})});
    EXPECT_EQ(t, b.f("g", {b.v(0), b.f("f", {b.v(2)})}));
    EXPECT_NE(t, b.f("g", {b.v(1), b.f("f", {b.v(2)})}));
    EXPECT_EQ(t.max_var(), 2);
    EXPECT_EQ(t.size(), 4u);
    EXPECT_EQ(t.offset(10), b.f("g", {b.v(10), b.f("f", {b.v(12)})}));
    EXPECT_TRUE(b.f("a").ground());
}

// ----------------------------------------------------------------- positions

TEST(Positions, Examples) {
    TermBuilder b;
    Literal l = b.lit(true, "p", {b.f("f", {b.f("a")}), b.f("b")});
    auto ps = subterm_positions(l);
    ASSERT_EQ(ps.size(), 3u);
    EXPECT_EQ(ps[0].first, (Position{1}));
    EXPECT_EQ(ps[0].second, b.f("f", {b.f("a")}));
    EXPECT_EQ(ps[1].first, (Position{1, 1}));
    EXPECT_EQ(ps[1].second, b.f("a"));
    EXPECT_EQ(ps[2].first, (Position{2}));
    EXPECT_EQ(ps[2].second, b.f("b"));

    auto single = subterm_positions(b.lit(true, "r", {b.f("c")}));
    ASSERT_EQ(single.size(), 1u);
    EXPECT_EQ(single[0].first, (Position{1}));
    EXPECT_EQ(position_to_string({1, 2, 3}), "1.2.3");
    EXPECT_EQ(position_from_string("1.2.3"), (Position{1, 2, 3}));
    EXPECT_THROW(position_from_string("1..2"), std::invalid_argument);
    EXPECT_THROW(position_from_string("0"), std::invalid_argument);
}

namespace {

Term random_term(std::mt19937_64& rng, const TermBuilder& b, int depth, int vars = 4) {
    std::uniform_int_distribution<int> pick(0, 5);
    int k = depth <= 0 ? pick(rng) % 3 : pick(rng);
    switch (k) {
        case 0: return b.v(static_cast<int>(rng() % static_cast<unsigned>(vars)));
        case 1: return b.f("a");
        case 2: return b.f("b");
        case 3: return b.f("f", {random_term(rng, b, depth - 1, vars)});
        default: return b.f("g", {random_term(rng, b, depth - 1, vars), random_term(rng, b, depth - 1, vars)});
    }
}

std::size_t node_count(const Term& t) {
    std::size_t n = 1;
    for (const auto& a : t.args()) n += node_count(a);
    return n;
}

}  // namespace

TEST(Positions, CountMatchesNodeCountAndRoundTrips) {
    TermBuilder b;
    std::mt19937_64 rng(11);
    for (int i = 0; i < 300; ++i) {
        Literal l = b.lit(true, "q", {random_term(rng, b, 4), random_term(rng, b, 4)});
        std::size_t nodes = 1;  // the literal itself
        for (const auto& a : l.args) nodes += node_count(a);
        auto ps = subterm_positions(l);
        EXPECT_EQ(ps.size(), nodes - 1);
        for (const auto& [p, t] : ps) {
            EXPECT_EQ(subterm_at(l, p), t);
            EXPECT_EQ(replace_at(l, p, t), l);
        }
        // Outside-in, left-to-right means lexicographic position order.
        for (std::size_t k = 1; k < ps.size(); ++k) EXPECT_LT(ps[k - 1].first, ps[k].first);
    }
}

TEST(Positions, ReplaceAt) {
    TermBuilder b;
    Literal l = b.lit(true, "p", {b.f("f", {b.f("a")}), b.f("b")});
    EXPECT_EQ(replace_at(l, {1, 1}, b.f("c")), b.lit(true, "p", {b.f("f", {b.f("c")}), b.f("b")}));
    EXPECT_THROW(subterm_at(l, {3}), std::out_of_range);
    EXPECT_THROW(subterm_at(l, {}), std::out_of_range);
}

// -------------------------------------------------------------- unification

TEST(Unify, Examples) {
    TermBuilder b;
    auto s = unify(b.lit(true, "p", {b.v(0)}), b.lit(true, "p", {b.f("a")}));
    ASSERT_TRUE(s);
    EXPECT_EQ(s->apply(b.v(0)), b.f("a"));
    EXPECT_EQ(s->binding_count(), 1u);

    EXPECT_FALSE(unify(b.v(0), b.f("f", {b.v(0)})));
    EXPECT_FALSE(unify(b.f("a"), b.f("b")));
    EXPECT_FALSE(unify(b.lit(true, "p", {b.v(0)}), b.lit(false, "p", {b.v(0)})));

    // f(X, g(Y)) against f(g(Z), X') with X' a fresh variable.
    Term lhs = b.f("h", {b.v(0), b.f("g1", {b.v(1)})});
    Term rhs = b.f("h", {b.f("g1", {b.v(2)}), b.v(3)});
    auto m = unify(lhs, rhs);
    ASSERT_TRUE(m);
    EXPECT_EQ(m->apply(lhs), m->apply(rhs));
}

TEST(Unify, ExtendsUnderAndLeavesItIntact) {
    TermBuilder b;
    Substitution under;
    under.bind(0, b.f("a"));
    EXPECT_FALSE(unify(b.v(0), b.f("b"), under));
    auto s = unify(b.f("f", {b.v(0)}), b.f("f", {b.v(1)}), under);
    ASSERT_TRUE(s);
    EXPECT_EQ(s->apply(b.v(1)), b.f("a"));
    EXPECT_EQ(under.binding_count(), 1u);
}

TEST(Unify, InPlaceFailureRestoresState) {
    TermBuilder b;
    Substitution s;
    auto before = s;
    // Binds X0 to a before clashing on the second argument.
    EXPECT_FALSE(unify_in_place(b.f("g", {b.v(0), b.f("a")}), b.f("g", {b.f("a"), b.f("b")}), s));
    EXPECT_EQ(s, before);
    auto m = s.mark();
    EXPECT_TRUE(unify_in_place(b.v(0), b.f("a"), s));
    s.undo(m);
    EXPECT_FALSE(s.bound(0));
}

TEST(Substitution, OccursCheckOnBind) {
    TermBuilder b;
    Substitution s;
    s.bind(0, b.f("f", {b.v(1)}));
    EXPECT_THROW(s.bind(1, b.f("g", {b.v(0), b.f("a")})), std::invalid_argument);
    EXPECT_THROW(s.bind(0, b.f("a")), std::invalid_argument);
}

TEST(Substitution, NormalizedIsIdempotent) {
    TermBuilder b;
    std::mt19937_64 rng(5);
    for (int i = 0; i < 500; ++i) {
        Term x = random_term(rng, b, 3), y = random_term(rng, b, 3);
        auto s = unify(x, y);
        if (!s) continue;
        Substitution n = s->normalized();
        for (int v = 0; v < 4; ++v) {
            Term once = n.apply(b.v(v));
            EXPECT_EQ(n.apply(once), once);
            EXPECT_EQ(once, s->apply(b.v(v)));
        }
        Term t = random_term(rng, b, 3);
        EXPECT_EQ(s->apply(s->apply(t)), s->apply(t));
    }
}

// ------------------------------------------------------------------- oracle
//
// Martelli-Montanari unification over a plain tree representation, written
// independently of the library's triangular substitution.

namespace {

struct OTerm {
    int var = -1;
    std::string sym;
    std::vector<OTerm> args;
    bool operator==(const OTerm&) const = default;
    bool operator<(const OTerm& o) const {
        if (var != o.var) return var < o.var;
        if (sym != o.sym) return sym < o.sym;
        return args < o.args;
    }
};

OTerm to_oracle(const Term& t, const SymbolTable& st) {
    if (t.is_var()) return OTerm{t.var(), "", {}};
    OTerm o{-1, st.name(t.symbol()), {}};
    for (const auto& a : t.args()) o.args.push_back(to_oracle(a, st));
    return o;
}

bool occurs(int v, const OTerm& t) {
    if (t.var == v) return true;
    for (const auto& a : t.args) {
        if (occurs(v, a)) return true;
    }
    return false;
}

OTerm subst1(const OTerm& t, int v, const OTerm& r) {
    if (t.var == v) return r;
    OTerm o = t;
    for (auto& a : o.args) a = subst1(a, v, r);
    return o;
}

std::optional<std::map<int, OTerm>> mm_unify(const OTerm& a, const OTerm& b) {
    std::vector<std::pair<OTerm, OTerm>> eqs{{a, b}};
    std::map<int, OTerm> solved;
    while (!eqs.empty()) {
        auto [s, t] = eqs.back();
        eqs.pop_back();
        if (s == t) continue;
        if (s.var < 0 && t.var >= 0) std::swap(s, t);
        if (s.var >= 0) {
            if (occurs(s.var, t)) return std::nullopt;
            for (auto& [l, r] : eqs) {
                l = subst1(l, s.var, t);
                r = subst1(r, s.var, t);
            }
            for (auto& [v, r] : solved) r = subst1(r, s.var, t);
            solved[s.var] = t;
            continue;
        }
        if (s.sym != t.sym || s.args.size() != t.args.size()) return std::nullopt;
        for (std::size_t i = 0; i < s.args.size(); ++i) eqs.emplace_back(s.args[i], t.args[i]);
    }
    return solved;
}

OTerm apply_map(const OTerm& t, const std::map<int, OTerm>& m) {
    if (t.var >= 0) {
        auto it = m.find(t.var);
        return it == m.end() ? t : apply_map(it->second, m);
    }
    OTerm o = t;
    for (auto& a : o.args) a = apply_map(a, m);
    return o;
}

// True iff x and y are equal up to a bijective renaming of variables.
bool variant(const OTerm& x, const OTerm& y, std::map<int, int>& fwd, std::map<int, int>& bwd) {
    if (x.var >= 0 || y.var >= 0) {
        if (x.var < 0 || y.var < 0) return false;
        auto [i, ins] = fwd.emplace(x.var, y.var);
        auto [j, ins2] = bwd.emplace(y.var, x.var);
        return i->second == y.var && j->second == x.var;
    }
    if (x.sym != y.sym || x.args.size() != y.args.size()) return false;
    for (std::size_t k = 0; k < x.args.size(); ++k) {
        if (!variant(x.args[k], y.args[k], fwd, bwd)) return false;
    }
    return true;
}

std::vector<OTerm> ground_universe() {
    OTerm a{-1, "a", {}}, b{-1, "b", {}};
    return {a, b, OTerm{-1, "f", {a}}, OTerm{-1, "f", {b}}};
}

void collect_vars(const OTerm& t, std::set<int>& out) {
    if (t.var >= 0) out.insert(t.var);
    for (const auto& a : t.args) collect_vars(a, out);
}

}  // namespace

TEST(Unify, AgreesWithMartelliMontanariOnRandomPairs) {
    TermBuilder b;
    std::mt19937_64 rng(2024);
    int unifiable = 0;
    for (int i = 0; i < 1000; ++i) {
        Term x = random_term(rng, b, 3);
        // Mutate a copy so that a good share of pairs unify.
        Term y = (i % 2 == 0) ? random_term(rng, b, 3) : random_term(rng, b, 1).offset(0);
        if (i % 4 == 1) y = x.offset(0);
        if (i % 4 == 3) {
            auto ps = subterm_positions(x);
            if (!ps.empty()) {
                const auto& [p, _] = ps[rng() % ps.size()];
                y = replace_at(x, p, b.v(static_cast<int>(rng() % 4)));
            }
        }
        auto mine = unify(x, y);
        auto ox = to_oracle(x, *b.symbols), oy = to_oracle(y, *b.symbols);
        auto theirs = mm_unify(ox, oy);
        ASSERT_EQ(mine.has_value(), theirs.has_value()) << b.str(x) << " vs " << b.str(y);
        if (!mine) continue;
        ++unifiable;
        EXPECT_EQ(mine->apply(x), mine->apply(y));
        // Both are most general, so their images are variants of each other.
        std::map<int, int> fwd, bwd;
        EXPECT_TRUE(variant(to_oracle(mine->apply(x), *b.symbols), apply_map(ox, *theirs), fwd, bwd));
    }
    EXPECT_GT(unifiable, 200);
}

TEST(Unify, GroundUnifiersFactorThroughTheMgu) {
    TermBuilder b;
    std::mt19937_64 rng(77);
    const auto universe = ground_universe();
    int checked = 0;
    for (int i = 0; i < 300; ++i) {
        Term x = random_term(rng, b, 2, 3), y = random_term(rng, b, 2, 3);
        auto ox = to_oracle(x, *b.symbols), oy = to_oracle(y, *b.symbols);
        std::set<int> vars;
        collect_vars(ox, vars);
        collect_vars(oy, vars);
        std::vector<int> vs(vars.begin(), vars.end());
        auto mine = unify(x, y);
        bool any = false;
        // Enumerate every ground substitution over the small universe.
        std::vector<std::size_t> idx(vs.size(), 0);
        for (;;) {
            std::map<int, OTerm> tau;
            for (std::size_t k = 0; k < vs.size(); ++k) tau[vs[k]] = universe[idx[k]];
            if (apply_map(ox, tau) == apply_map(oy, tau)) {
                any = true;
                ASSERT_TRUE(mine) << b.str(x) << " vs " << b.str(y);
                for (int v : vs) {
                    OTerm through = apply_map(to_oracle(mine->apply(b.v(v)), *b.symbols), tau);
                    EXPECT_EQ(through, tau[v]);
                }
                ++checked;
            }
            std::size_t k = 0;
            while (k < idx.size() && ++idx[k] == universe.size()) idx[k++] = 0;
            if (k == idx.size()) break;
        }
        (void)any;
    }
    EXPECT_GT(checked, 50);
}

TEST(Printing, VariablesAndEquality) {
    TermBuilder b;
    EXPECT_EQ(b.str(b.f("f", {b.v(3), b.f("a")})), "f(X3,a)");
    EXPECT_EQ(b.str(b.lit(false, "=", {b.v(0), b.f("a")})), "X0 != a");
    EXPECT_EQ(b.str(b.lit(false, "p", {b.f("a")})), "~p(a)");
}
