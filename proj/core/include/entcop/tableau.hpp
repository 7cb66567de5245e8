#pragma once

// Connection tableau calculus with extension, reduction and paramodulation.

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "entcop/matrix.hpp"
#include "entcop/term.hpp"

namespace entcop {

/// Immutable singly linked list with structural sharing.
template <class T>
class ConsList {
public:
    ConsList() = default;

    bool empty() const { return cell_ == nullptr; }
    std::size_t size() const { return cell_ ? cell_->size : 0; }
    const T& front() const { return cell_->head; }
    ConsList pop_front() const { return ConsList(cell_->tail); }
    ConsList push_front(T value) const {
        return ConsList(std::make_shared<const Cell>(Cell{std::move(value), cell_, size() + 1}));
    }

    /// Elements front to back.
    std::vector<T> to_vector() const {
        std::vector<T> out;
        out.reserve(size());
        for (auto c = cell_; c; c = c->tail) out.push_back(c->head);
        return out;
    }

    template <class F>
    void for_each(F&& f) const {
        for (auto c = cell_.get(); c; c = c->tail.get()) f(c->head);
    }

private:
    struct Cell {
        T head;
        std::shared_ptr<const Cell> tail;
        std::size_t size;
    };
    explicit ConsList(std::shared_ptr<const Cell> cell) : cell_(std::move(cell)) {}
    std::shared_ptr<const Cell> cell_;
};

enum class ActionKind { Start, Reduction, Extension, Paramodulation };
enum class Direction { LeftToRight, RightToLeft };

struct Action {
    ActionKind kind = ActionKind::Extension;
    /// Start, extension and paramodulation: input clause id.
    int clause = -1;
    /// Extension: connected literal; paramodulation: equation literal.
    int literal = -1;
    /// Reduction: index into the active path, 0 being the outermost literal.
    int path_index = -1;
    /// Paramodulation: rewritten subterm of the current goal.
    Position position;
    Direction direction = Direction::LeftToRight;

    static Action start(int clause) { return Action{ActionKind::Start, clause, -1, -1, {}, {}}; }
    static Action reduction(int path_index) { return Action{ActionKind::Reduction, -1, -1, path_index, {}, {}}; }
    static Action extension(int clause, int literal) {
        return Action{ActionKind::Extension, clause, literal, -1, {}, {}};
    }
    static Action paramodulation(int clause, int literal, Position position, Direction direction) {
        return Action{ActionKind::Paramodulation, clause, literal, -1, std::move(position), direction};
    }

    friend bool operator==(const Action&, const Action&) = default;
};

/// Canonical one-line encoding, e.g. `start 0`, `red 1`, `ext 3 0`,
/// `para 4 0 1.2 lr`.
std::string encode_action(const Action& action);
/// Inverse of encode_action; throws std::invalid_argument on malformed text.
Action decode_action(std::string_view text);

struct TableauOptions {
    bool paramodulation = true;
    /// Goals whose active path is longer than this have no legal actions.
    int path_limit = 100;
};

class IllegalAction : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Partial connection tableau. Before the start step the state has no goals
/// and its legal actions are the start clauses.
class TableauState {
public:
    struct Goal {
        Literal literal;
        /// Active path of the goal, innermost literal first.
        ConsList<Literal> path;
    };

    /// The state before any start clause is chosen.
    static TableauState root(std::shared_ptr<const Matrix> matrix);

    const Matrix& matrix() const { return *matrix_; }
    const std::shared_ptr<const Matrix>& matrix_ptr() const { return matrix_; }

    bool started() const { return started_; }
    bool closed() const { return started_ && goals_.empty(); }

    /// Leftmost open goal; requires !closed() and started().
    const Goal& current() const { return goals_.front(); }
    /// Open goals, current goal first.
    const ConsList<Goal>& open_goals() const { return goals_; }
    /// Active path of the current goal, outermost literal first.
    std::vector<Literal> path() const;

    const Substitution& substitution() const { return subst_; }
    /// Number of actions applied since the root.
    int depth() const { return depth_; }
    /// First variable id not used by any clause copy.
    int next_var() const { return next_var_; }

private:
    friend TableauState apply_action(const TableauState&, const Action&, const TableauOptions&);

    std::shared_ptr<const Matrix> matrix_;
    ConsList<Goal> goals_;
    Substitution subst_;
    int next_var_ = 0;
    int depth_ = 0;
    bool started_ = false;
};

/// One state per start clause, each with the clause's literals as open goals
/// and an empty path.
std::vector<TableauState> initial_states(std::shared_ptr<const Matrix> matrix);

/// Legal actions in canonical order: start steps (root only), reductions by
/// path index, extensions by (clause, literal), then paramodulations by
/// (clause, literal, position, left-to-right before right-to-left).
std::vector<Action> legal_actions(const TableauState& state, const TableauOptions& options = {});

/// Applies an action, re-deriving its unifier. Throws IllegalAction when the
/// action's side conditions fail.
TableauState apply_action(const TableauState& state, const Action& action, const TableauOptions& options = {});

inline bool is_closed(const TableauState& state) { return state.closed(); }

struct ProofCheck {
    bool valid = false;
    /// Index of the first action that could not be applied, or the action
    /// count when every step applied but goals remain open.
    std::optional<std::size_t> failed_step;
    std::string reason;
};

/// Replays `actions` from the root state. Valid iff every step applies and
/// the final tableau is closed.
ProofCheck check_proof(std::shared_ptr<const Matrix> matrix, std::span<const Action> actions,
                       const TableauOptions& options = {});

/// Replays a prefix of actions without requiring closure.
TableauState replay(std::shared_ptr<const Matrix> matrix, std::span<const Action> actions,
                    const TableauOptions& options = {});

}  // namespace entcop
