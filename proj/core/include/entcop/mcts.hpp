#pragma once

// Monte-Carlo tree search with prior-weighted UCT selection, value-initialized
// leaves and bigsteps, generic over the search domain.
//
// A Domain provides:
//   using State = ...; using Action = ...;
//   bool can_apply() const;                       // inference budget left
//   State apply(const State&, const Action&);     // counts one inference
//   Evaluation<Action> evaluate(const State&);    // actions, priors, value

#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace entcop {

inline constexpr double kProofDiscount = 0.99;

/// r/n + cp * p * sqrt(ln N / n) with the natural logarithm.
inline double uct_score(double reward, int visits, double prior, double parent_visits, double cp) {
    return reward / visits + cp * prior * std::sqrt(std::log(parent_visits) / visits);
}

/// Score of a child slot that has not been expanded yet: the exploration
/// term with n taken as 1 and no reward term.
inline double unexpanded_score(double prior, double parent_visits, double cp) {
    return cp * prior * std::sqrt(std::log(parent_visits));
}

template <class Action>
struct Evaluation {
    bool closed = false;
    std::vector<Action> actions;
    std::vector<double> priors;
    double value = 0.0;
};

enum class PlayoutOutcome { Expanded, Proof, Exhausted, BudgetExhausted };

template <class Domain>
class SearchTree {
public:
    using State = typename Domain::State;
    using Action = typename Domain::Action;

    struct Node {
        State state;
        Node* parent = nullptr;
        std::size_t slot = 0;
        int depth = 0;
        int visits = 0;
        double reward = 0.0;
        double prior = 1.0;
        std::vector<Action> actions;
        std::vector<double> priors;
        std::vector<std::unique_ptr<Node>> children;
        bool closed = false;
        /// Every continuation below this node has been ruled out.
        bool exhausted = false;
        /// A closed tableau occurs in this subtree.
        bool has_proof = false;

        double mean() const { return visits > 0 ? reward / visits : 0.0; }
        bool leaf_expanded(std::size_t i) const { return children[i] != nullptr; }
        std::size_t expanded_count() const {
            std::size_t n = 0;
            for (const auto& c : children) n += c != nullptr;
            return n;
        }
    };

    SearchTree(Domain& domain, State root_state, double cp) : domain_(domain), cp_(cp) {
        absolute_root_ = make_node(std::move(root_state), nullptr, 0, 1.0, 0);
        root_ = absolute_root_.get();
    }

    Node& root() { return *root_; }
    const Node& root() const { return *root_; }
    const Node& absolute_root() const { return *absolute_root_; }
    double cp() const { return cp_; }
    const Node* proof_node() const { return proof_; }
    /// Leaf added by the most recent successful playout.
    const Node* last_leaf() const { return last_leaf_; }

    /// Index of the child slot selection would follow from `node`.
    std::size_t select(const Node& node) const {
        std::size_t best = node.actions.size();
        double best_score = 0.0;
        for (std::size_t i = 0; i < node.actions.size(); ++i) {
            const Node* c = node.children[i].get();
            double s;
            if (c == nullptr) {
                s = unexpanded_score(node.priors[i], node.visits, cp_);
            } else {
                if (c->exhausted) continue;
                s = uct_score(c->reward, c->visits, node.priors[i], node.visits, cp_);
            }
            if (best == node.actions.size() || s > best_score) {
                best = i;
                best_score = s;
            }
        }
        return best;
    }

    /// Descends from the current root by UCT and adds one leaf.
    PlayoutOutcome playout() {
        if (proof_) return PlayoutOutcome::Proof;
        if (root_->exhausted) return PlayoutOutcome::Exhausted;
        Node* node = root_;
        for (;;) {
            std::size_t slot = select(*node);
            if (slot == node->actions.size()) throw std::logic_error("selection reached an exhausted node");
            if (node->children[slot]) {
                node = node->children[slot].get();
                continue;
            }
            if (!domain_.can_apply()) return PlayoutOutcome::BudgetExhausted;
            State next = domain_.apply(node->state, node->actions[slot]);
            node->children[slot] = make_node(std::move(next), node, slot, node->priors[slot], node->depth + 1);
            Node* leaf = node->children[slot].get();
            last_leaf_ = leaf;
            for (Node* a = node; a != nullptr; a = a->parent) {
                a->visits += 1;
                a->reward += leaf->reward;
            }
            if (leaf->closed) {
                proof_ = leaf;
                for (Node* a = leaf; a != nullptr; a = a->parent) a->has_proof = true;
                return PlayoutOutcome::Proof;
            }
            if (leaf->exhausted) propagate_exhaustion(node);
            return PlayoutOutcome::Expanded;
        }
    }

    /// Child the next bigstep would move to: a child containing a proof if
    /// any, otherwise the non-exhausted expanded child with the highest mean
    /// reward, ties by lowest action index. nullptr when there is none.
    const Node* bigstep_target(const Node& node) const {
        for (const auto& c : node.children) {
            if (c && c->has_proof) return c.get();
        }
        const Node* best = nullptr;
        for (const auto& c : node.children) {
            if (!c || c->exhausted) continue;
            if (best == nullptr || c->mean() > best->mean()) best = c.get();
        }
        return best;
    }

    /// Moves the root one level down. Returns false at a dead end.
    bool bigstep() {
        const Node* target = bigstep_target(*root_);
        if (target == nullptr) return false;
        root_ = const_cast<Node*>(target);
        return true;
    }

    /// Actions from the absolute root to `node`.
    std::vector<Action> path_to(const Node& node) const {
        std::vector<Action> out;
        for (const Node* n = &node; n->parent != nullptr; n = n->parent) out.push_back(n->parent->actions[n->slot]);
        return {out.rbegin(), out.rend()};
    }

private:
    std::unique_ptr<Node> make_node(State state, Node* parent, std::size_t slot, double prior, int depth) {
        auto node = std::make_unique<Node>();
        node->state = std::move(state);
        node->parent = parent;
        node->slot = slot;
        node->depth = depth;
        node->prior = prior;
        Evaluation<Action> eval = domain_.evaluate(node->state);
        node->visits = 1;
        if (eval.closed) {
            node->closed = true;
            node->exhausted = true;
            node->reward = std::pow(kProofDiscount, depth);
        } else if (eval.actions.empty()) {
            node->exhausted = true;
            node->reward = 0.0;
        } else {
            if (eval.priors.size() != eval.actions.size()) throw std::logic_error("prior/action length mismatch");
            node->reward = eval.value;
            node->actions = std::move(eval.actions);
            node->priors = std::move(eval.priors);
            node->children.resize(node->actions.size());
        }
        return node;
    }

    static void propagate_exhaustion(Node* node) {
        for (; node != nullptr; node = node->parent) {
            for (const auto& c : node->children) {
                if (!c || !c->exhausted) return;
            }
            node->exhausted = true;
        }
    }

    Domain& domain_;
    double cp_;
    std::unique_ptr<Node> absolute_root_;
    Node* root_ = nullptr;
    const Node* proof_ = nullptr;
    const Node* last_leaf_ = nullptr;
};

}  // namespace entcop
