#include "entcop/search.hpp"

#include <chrono>
#include <stdexcept>

namespace entcop {

void validate(const SearchLimits& limits) {
    if (limits.inference_limit <= 0) throw std::invalid_argument("inference limit must be positive");
    if (limits.bigstep_frequency <= 0) throw std::invalid_argument("bigstep frequency must be positive");
    if (!(limits.cp > 0.0)) throw std::invalid_argument("exploration constant must be positive");
    if (!(limits.wall_clock_seconds > 0.0)) throw std::invalid_argument("wall-clock limit must be positive");
}

std::string to_string(ProofStatus status) {
    switch (status) {
        case ProofStatus::Solved: return "solved";
        case ProofStatus::BudgetExhausted: return "budget-exhausted";
        case ProofStatus::DeadEnd: return "dead-end";
    }
    return "unknown";
}

TableauDomain::TableauDomain(const Predictor& predictor, const TableauOptions& options, int inference_limit)
    : predictor_(predictor), options_(options), inference_limit_(inference_limit) {}

TableauState TableauDomain::apply(const TableauState& state, const Action& action) {
    if (!can_apply()) throw std::logic_error("inference budget exceeded");
    ++inferences_;
    return apply_action(state, action, options_);
}

Evaluation<Action> TableauDomain::evaluate(const TableauState& state) {
    Evaluation<Action> eval;
    if (state.closed()) {
        eval.closed = true;
        return eval;
    }
    eval.actions = legal_actions(state, options_);
    if (eval.actions.empty()) return eval;
    Prediction p = predict(predictor_, state, eval.actions);
    eval.priors = p.policy->vector();
    eval.value = p.value;
    if (eval.actions.size() >= 2) {
        stats_.count += 1;
        stats_.entropy_sum += entropy(*p.policy);
        stats_.normalized_entropy_sum += normalized_entropy(*p.policy);
    }
    return eval;
}

namespace {

using Tree = SearchTree<TableauDomain>;

NodeRecord snapshot(const Tree::Node& node, bool on_proof_path) {
    NodeRecord r;
    r.state = node.state;
    r.actions = node.actions;
    r.child_visits.reserve(node.children.size());
    for (const auto& c : node.children) r.child_visits.push_back(c ? c->visits : 0);
    r.depth = node.depth;
    r.mean = node.mean();
    r.on_proof_path = on_proof_path;
    return r;
}

}  // namespace

ProofResult prove(std::shared_ptr<const Matrix> matrix, const Predictor& predictor, const SearchLimits& limits,
                  const SearchOptions& options) {
    validate(limits);
    const auto started = std::chrono::steady_clock::now();
    TableauDomain domain(predictor, options.tableau, limits.inference_limit);
    Tree tree(domain, TableauState::root(std::move(matrix)), limits.cp);

    ProofResult result;
    auto record_expanded = [&](const Tree::Node& node) {
        if (options.record_expanded && node.actions.size() >= 2 &&
            result.expanded.size() < options.max_expanded_records) {
            result.expanded.push_back(ExpandedRecord{tree.path_to(node), node.actions.size()});
        }
    };
    record_expanded(tree.root());

    std::vector<const Tree::Node*> roots{&tree.root()};
    int since_bigstep = 0;
    for (;;) {
        PlayoutOutcome outcome = tree.playout();
        if (outcome == PlayoutOutcome::Expanded || outcome == PlayoutOutcome::Proof) {
            ++result.playouts;
            record_expanded(*tree.last_leaf());
        }
        if (outcome == PlayoutOutcome::Proof) {
            result.status = ProofStatus::Solved;
            break;
        }
        if (outcome == PlayoutOutcome::Exhausted) {
            result.status = ProofStatus::DeadEnd;
            break;
        }
        if (outcome == PlayoutOutcome::BudgetExhausted) {
            result.status = ProofStatus::BudgetExhausted;
            break;
        }
        if (++since_bigstep == limits.bigstep_frequency) {
            since_bigstep = 0;
            if (!tree.bigstep()) {
                result.status = ProofStatus::DeadEnd;
                break;
            }
            ++result.bigsteps;
            roots.push_back(&tree.root());
        }
        if ((result.playouts & 63) == 0) {
            std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
            if (elapsed.count() > limits.wall_clock_seconds) {
                result.status = ProofStatus::BudgetExhausted;
                result.timed_out = true;
                break;
            }
        }
    }

    const bool solved = result.status == ProofStatus::Solved;
    for (const auto* r : roots) {
        if (r->expanded_count() > 0) result.trace.push_back(snapshot(*r, solved));
    }
    if (solved) {
        const Tree::Node* leaf = tree.proof_node();
        result.proof = tree.path_to(*leaf);
        std::vector<const Tree::Node*> below;
        for (const Tree::Node* n = leaf->parent; n != nullptr && n != roots.back(); n = n->parent) below.push_back(n);
        for (auto it = below.rbegin(); it != below.rend(); ++it) result.trace.push_back(snapshot(**it, true));
    }
    result.inferences = domain.inferences();
    result.policy_stats = domain.policy_stats();
    return result;
}

}  // namespace entcop
