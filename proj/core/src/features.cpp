#include "entcop/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace entcop {

std::uint32_t SparseFeatures::count(std::uint32_t index) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), index,
                               [](const auto& e, std::uint32_t i) { return e.first < i; });
    return it != entries.end() && it->first == index ? it->second : 0;
}

double SparseFeatures::norm() const {
    double s = 0.0;
    for (const auto& [i, c] : entries) s += static_cast<double>(c) * static_cast<double>(c);
    return std::sqrt(s);
}

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint32_t feature_index(std::string_view ns, const std::vector<std::string>& walk, std::uint32_t dim) {
    std::string key(ns);
    for (const auto& t : walk) {
        key += '\x1f';
        key += t;
    }
    return static_cast<std::uint32_t>(fnv1a(key) % dim);
}

namespace {

std::string token(const Term& t, const SymbolTable& symbols) { return t.is_var() ? "*" : symbols.name(t.symbol()); }

void term_walks(const Term& t, const std::string& tok, const SymbolTable& symbols,
                std::vector<std::vector<std::string>>& out) {
    if (t.is_var()) return;
    for (const auto& a : t.args()) {
        std::string child = token(a, symbols);
        out.push_back({tok, child});
        out.push_back({child});
        term_walks(a, child, symbols, out);
    }
}

class Builder {
public:
    explicit Builder(std::uint32_t dim) : dim_(dim) {}

    void add(std::string_view ns, const std::vector<std::string>& walk) { ++counts_[feature_index(ns, walk, dim_)]; }
    void add_literal(std::string_view ns, const Literal& l, const SymbolTable& symbols) {
        for (const auto& w : literal_walks(l, symbols)) add(ns, w);
    }

    SparseFeatures finish() {
        SparseFeatures f;
        f.entries.assign(counts_.begin(), counts_.end());
        return f;
    }

private:
    std::uint32_t dim_;
    std::map<std::uint32_t, std::uint32_t> counts_;
};

std::string root_token(const Literal& l, const SymbolTable& symbols) {
    return (l.positive ? "" : "~") + symbols.name(l.predicate);
}

}  // namespace

std::vector<std::vector<std::string>> literal_walks(const Literal& literal, const SymbolTable& symbols) {
    std::vector<std::vector<std::string>> out;
    std::string root = root_token(literal, symbols);
    out.push_back({root});
    for (const auto& a : literal.args) {
        std::string child = token(a, symbols);
        out.push_back({root, child});
        out.push_back({child});
        term_walks(a, child, symbols, out);
    }
    return out;
}

SparseFeatures extract_features(const TableauState& state, std::uint32_t dim) {
    Builder b(dim);
    const SymbolTable& symbols = state.matrix().symbols();
    if (!state.started()) {
        b.add("s", {"root"});
        return b.finish();
    }
    if (state.closed()) {
        b.add("s", {"closed"});
        return b.finish();
    }
    const Substitution& subst = state.substitution();
    b.add_literal("g", subst.apply(state.current().literal), symbols);
    state.current().path.for_each([&](const Literal& l) { b.add_literal("p", subst.apply(l), symbols); });
    state.open_goals().for_each(
        [&](const TableauState::Goal& g) { b.add_literal("o", subst.apply(g.literal), symbols); });
    return b.finish();
}

SparseFeatures extract_action_features(const TableauState& state, const Action& action, std::uint32_t dim) {
    Builder b(dim);
    const Matrix& m = state.matrix();
    const SymbolTable& symbols = m.symbols();
    std::vector<std::vector<std::string>> walks;
    auto add_walks = [&](const Literal& l) {
        for (auto& w : literal_walks(l, symbols)) walks.push_back(std::move(w));
    };

    std::string kind;
    switch (action.kind) {
        case ActionKind::Start: {
            kind = "start";
            for (const auto& l : m.clause(action.clause).literals) add_walks(l);
            break;
        }
        case ActionKind::Reduction: {
            kind = "red";
            const auto path = state.path();
            add_walks(state.substitution().apply(path.at(static_cast<std::size_t>(action.path_index))));
            break;
        }
        case ActionKind::Extension: {
            kind = "ext";
            const Clause& c = m.clause(action.clause);
            add_walks(c.literals.at(static_cast<std::size_t>(action.literal)));
            b.add("a", {"new-goals", std::to_string(c.literals.size() - 1)});
            for (std::size_t i = 0; i < c.literals.size(); ++i) {
                if (static_cast<int>(i) != action.literal) b.add("a", {"rest", root_token(c.literals[i], symbols)});
            }
            break;
        }
        case ActionKind::Paramodulation: {
            kind = action.direction == Direction::LeftToRight ? "para-lr" : "para-rl";
            const Clause& c = m.clause(action.clause);
            const Literal& eq = c.literals.at(static_cast<std::size_t>(action.literal));
            const bool ltr = action.direction == Direction::LeftToRight;
            const Term& from = ltr ? eq.args[0] : eq.args[1];
            const Term& to = ltr ? eq.args[1] : eq.args[0];
            walks.push_back({"from", token(from, symbols)});
            walks.push_back({"to", token(to, symbols)});
            b.add("a", {"new-goals", std::to_string(c.literals.size())});
            b.add("a", {"depth", std::to_string(action.position.size())});
            break;
        }
    }
    b.add("a", {"kind", kind});
    std::string goal_root = "none";
    if (state.started() && !state.closed()) goal_root = root_token(state.current().literal, symbols);
    for (const auto& w : walks) {
        b.add("a", w);
        std::vector<std::string> cross{goal_root};
        cross.insert(cross.end(), w.begin(), w.end());
        b.add("x", cross);
    }
    return b.finish();
}

}  // namespace entcop
