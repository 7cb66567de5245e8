#include "entcop/tableau.hpp"

#include <algorithm>
#include <sstream>

namespace entcop {

// -------------------------------------------------------------- Action codec

std::string encode_action(const Action& a) {
    std::ostringstream os;
    switch (a.kind) {
        case ActionKind::Start:
            os << "start " << a.clause;
            break;
        case ActionKind::Reduction:
            os << "red " << a.path_index;
            break;
        case ActionKind::Extension:
            os << "ext " << a.clause << ' ' << a.literal;
            break;
        case ActionKind::Paramodulation:
            os << "para " << a.clause << ' ' << a.literal << ' ' << position_to_string(a.position) << ' '
               << (a.direction == Direction::LeftToRight ? "lr" : "rl");
            break;
    }
    return os.str();
}

Action decode_action(std::string_view text) {
    std::istringstream is{std::string(text)};
    std::string kind;
    is >> kind;
    auto fail = [&]() -> Action { throw std::invalid_argument("malformed action '" + std::string(text) + "'"); };
    auto read_int = [&]() {
        long long v = 0;
        if (!(is >> v) || v < 0 || v > 1'000'000'000) fail();
        return static_cast<int>(v);
    };
    Action a;
    if (kind == "start") {
        a = Action::start(read_int());
    } else if (kind == "red") {
        a = Action::reduction(read_int());
    } else if (kind == "ext") {
        int c = read_int();
        a = Action::extension(c, read_int());
    } else if (kind == "para") {
        int c = read_int();
        int l = read_int();
        std::string pos, dir;
        if (!(is >> pos >> dir)) fail();
        Position p;
        try {
            p = position_from_string(pos);
        } catch (const std::invalid_argument&) {
            fail();
        }
        if (p.empty() || (dir != "lr" && dir != "rl")) fail();
        a = Action::paramodulation(c, l, std::move(p), dir == "lr" ? Direction::LeftToRight : Direction::RightToLeft);
    } else {
        fail();
    }
    std::string rest;
    if (is >> rest) fail();
    return a;
}

// ------------------------------------------------------------------- State

TableauState TableauState::root(std::shared_ptr<const Matrix> matrix) {
    if (!matrix) throw std::invalid_argument("null matrix");
    TableauState s;
    s.matrix_ = std::move(matrix);
    return s;
}

std::vector<Literal> TableauState::path() const {
    if (goals_.empty()) return {};
    auto v = goals_.front().path.to_vector();
    std::reverse(v.begin(), v.end());
    return v;
}

std::vector<TableauState> initial_states(std::shared_ptr<const Matrix> matrix) {
    TableauState root = TableauState::root(matrix);
    std::vector<TableauState> out;
    for (int c : matrix->start_clauses()) out.push_back(apply_action(root, Action::start(c)));
    return out;
}

// ------------------------------------------------------------ Enumeration

std::vector<Action> legal_actions(const TableauState& state, const TableauOptions& options) {
    std::vector<Action> out;
    const Matrix& m = state.matrix();
    if (!state.started()) {
        for (int c : m.start_clauses()) out.push_back(Action::start(c));
        return out;
    }
    if (state.closed()) return out;
    const auto& goal = state.current();
    if (static_cast<int>(goal.path.size()) > options.path_limit) return out;

    Substitution subst = state.substitution();
    const Literal g = subst.apply(goal.literal);

    // Reductions.
    std::vector<Literal> path = state.path();
    for (std::size_t i = 0; i < path.size(); ++i) {
        const Literal& p = path[i];
        if (p.positive == g.positive || p.predicate != g.predicate) continue;
        auto mark = subst.mark();
        if (unify_atoms_in_place(g, p, subst)) {
            out.push_back(Action::reduction(static_cast<int>(i)));
            subst.undo(mark);
        }
    }

    // Extensions.
    const int offset = state.next_var();
    for (const LiteralRef& ref : m.literals_with(g.predicate, !g.positive)) {
        const Literal lit = m.clause(ref.clause).literals[static_cast<std::size_t>(ref.literal)].offset(offset);
        auto mark = subst.mark();
        if (unify_atoms_in_place(g, lit, subst)) {
            out.push_back(Action::extension(ref.clause, ref.literal));
            subst.undo(mark);
        }
    }

    // Paramodulations inside the arguments of the goal.
    if (options.paramodulation && !m.equations().empty()) {
        const auto positions = subterm_positions(g);
        for (const LiteralRef& ref : m.equations()) {
            const Literal eq = m.clause(ref.clause).literals[static_cast<std::size_t>(ref.literal)].offset(offset);
            for (const auto& [pos, sub] : positions) {
                for (Direction dir : {Direction::LeftToRight, Direction::RightToLeft}) {
                    const Term& from = dir == Direction::LeftToRight ? eq.args[0] : eq.args[1];
                    auto mark = subst.mark();
                    if (unify_in_place(sub, from, subst)) {
                        out.push_back(Action::paramodulation(ref.clause, ref.literal, pos, dir));
                        subst.undo(mark);
                    }
                }
            }
        }
    }
    return out;
}

// -------------------------------------------------------------- Application

namespace {

[[noreturn]] void illegal(const Action& a, const std::string& why) {
    throw IllegalAction("illegal action '" + encode_action(a) + "': " + why);
}

const Clause& checked_clause(const Matrix& m, const Action& a) {
    if (a.clause < 0 || static_cast<std::size_t>(a.clause) >= m.size()) illegal(a, "no such clause");
    return m.clause(a.clause);
}

}  // namespace

TableauState apply_action(const TableauState& state, const Action& a, const TableauOptions& options) {
    const Matrix& m = state.matrix();
    TableauState next = state;
    next.depth_ = state.depth_ + 1;

    if (a.kind == ActionKind::Start) {
        if (state.started_) illegal(a, "tableau already started");
        const auto& starts = m.start_clauses();
        if (std::find(starts.begin(), starts.end(), a.clause) == starts.end()) illegal(a, "not a start clause");
        const Clause& c = m.clause(a.clause);
        ConsList<TableauState::Goal> goals;
        for (auto it = c.literals.rbegin(); it != c.literals.rend(); ++it) {
            goals = goals.push_front(TableauState::Goal{*it, {}});
        }
        next.goals_ = std::move(goals);
        next.next_var_ = c.var_count;
        next.started_ = true;
        return next;
    }

    if (!state.started_) illegal(a, "tableau not started");
    if (state.closed()) illegal(a, "tableau is closed");
    const auto& goal = state.current();
    if (static_cast<int>(goal.path.size()) > options.path_limit) illegal(a, "path limit exceeded");

    Substitution& subst = next.subst_;
    const Literal g = subst.apply(goal.literal);
    ConsList<TableauState::Goal> rest = state.goals_.pop_front();

    switch (a.kind) {
        case ActionKind::Reduction: {
            std::vector<Literal> path = state.path();
            if (a.path_index < 0 || static_cast<std::size_t>(a.path_index) >= path.size()) {
                illegal(a, "no such path literal");
            }
            const Literal& p = path[static_cast<std::size_t>(a.path_index)];
            if (p.positive == g.positive || !unify_atoms_in_place(g, p, subst)) {
                illegal(a, "path literal is not complementary");
            }
            next.goals_ = rest;
            break;
        }
        case ActionKind::Extension: {
            const Clause& c = checked_clause(m, a);
            if (a.literal < 0 || static_cast<std::size_t>(a.literal) >= c.literals.size()) illegal(a, "no such literal");
            const int offset = state.next_var_;
            const Literal lit = c.literals[static_cast<std::size_t>(a.literal)].offset(offset);
            if (lit.positive == g.positive || !unify_atoms_in_place(g, lit, subst)) {
                illegal(a, "clause literal is not complementary");
            }
            auto path = goal.path.push_front(goal.literal);
            for (std::size_t i = c.literals.size(); i-- > 0;) {
                if (static_cast<int>(i) == a.literal) continue;
                rest = rest.push_front(TableauState::Goal{c.literals[i].offset(offset), path});
            }
            next.goals_ = std::move(rest);
            next.next_var_ = offset + c.var_count;
            break;
        }
        case ActionKind::Paramodulation: {
            if (!options.paramodulation) illegal(a, "paramodulation disabled");
            const Clause& c = checked_clause(m, a);
            if (a.literal < 0 || static_cast<std::size_t>(a.literal) >= c.literals.size()) illegal(a, "no such literal");
            const int offset = state.next_var_;
            const Literal eq = c.literals[static_cast<std::size_t>(a.literal)].offset(offset);
            if (!eq.is_equality() || !eq.positive || eq.args[0] == eq.args[1]) illegal(a, "not a rewriting equation");
            const Term* sub = nullptr;
            try {
                sub = &subterm_at(g, a.position);
            } catch (const std::out_of_range&) {
                illegal(a, "no such position in goal");
            }
            const bool ltr = a.direction == Direction::LeftToRight;
            const Term& from = ltr ? eq.args[0] : eq.args[1];
            const Term& to = ltr ? eq.args[1] : eq.args[0];
            if (!unify_in_place(*sub, from, subst)) illegal(a, "subterm does not unify with equation side");
            // The rewritten goal and the residual literals sit below G, as if
            // G had been extended with an equality substitution axiom. This
            // also lets the path limit bound rewriting chains.
            auto path = goal.path.push_front(goal.literal);
            for (std::size_t i = c.literals.size(); i-- > 0;) {
                if (static_cast<int>(i) == a.literal) continue;
                rest = rest.push_front(TableauState::Goal{c.literals[i].offset(offset), path});
            }
            rest = rest.push_front(TableauState::Goal{replace_at(g, a.position, to), path});
            next.goals_ = std::move(rest);
            next.next_var_ = offset + c.var_count;
            break;
        }
        case ActionKind::Start:
            break;
    }
    subst.commit();
    return next;
}

TableauState replay(std::shared_ptr<const Matrix> matrix, std::span<const Action> actions,
                    const TableauOptions& options) {
    TableauState s = TableauState::root(std::move(matrix));
    for (const auto& a : actions) s = apply_action(s, a, options);
    return s;
}

ProofCheck check_proof(std::shared_ptr<const Matrix> matrix, std::span<const Action> actions,
                       const TableauOptions& options) {
    ProofCheck result;
    TableauState s = TableauState::root(std::move(matrix));
    for (std::size_t i = 0; i < actions.size(); ++i) {
        if (s.closed()) {
            result.failed_step = i;
            result.reason = "tableau already closed before step " + std::to_string(i);
            return result;
        }
        try {
            s = apply_action(s, actions[i], options);
        } catch (const IllegalAction& e) {
            result.failed_step = i;
            result.reason = e.what();
            return result;
        }
    }
    if (!s.closed()) {
        result.failed_step = actions.size();
        result.reason = std::to_string(s.open_goals().size()) + " open goal(s) remain";
        return result;
    }
    result.valid = true;
    return result;
}

}  // namespace entcop
