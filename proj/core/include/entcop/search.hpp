#pragma once

// Guided proof search: MCTS over connection tableaux with bigsteps.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "entcop/mcts.hpp"
#include "entcop/predictor.hpp"
#include "entcop/tableau.hpp"

namespace entcop {

struct SearchLimits {
    /// Maximum number of apply_action calls per problem.
    int inference_limit = 20000;
    /// Playouts between bigsteps.
    int bigstep_frequency = 200;
    double cp = 1.0;
    double wall_clock_seconds = 300.0;
};

/// Throws std::invalid_argument unless every limit is positive.
void validate(const SearchLimits& limits);

enum class ProofStatus { Solved, BudgetExhausted, DeadEnd };

std::string to_string(ProofStatus status);

/// Snapshot of a bigstep node (or a node on the proof path below the last
/// bigstep) taken for training-data extraction.
struct NodeRecord {
    TableauState state;
    std::vector<Action> actions;
    /// Visit count of each child slot, 0 when unexpanded.
    std::vector<int> child_visits;
    /// Actions from the search root.
    int depth = 0;
    double mean = 0.0;
    bool on_proof_path = false;
};

/// Expanded state with at least two actions, identified by its action path.
struct ExpandedRecord {
    std::vector<Action> path;
    std::size_t action_count = 0;
};

struct PolicyStats {
    /// Policies with at least two actions emitted during the search.
    std::size_t count = 0;
    double entropy_sum = 0.0;
    double normalized_entropy_sum = 0.0;

    double mean_entropy() const { return count ? entropy_sum / static_cast<double>(count) : 0.0; }
    double mean_normalized_entropy() const {
        return count ? normalized_entropy_sum / static_cast<double>(count) : 0.0;
    }
    void merge(const PolicyStats& other) {
        count += other.count;
        entropy_sum += other.entropy_sum;
        normalized_entropy_sum += other.normalized_entropy_sum;
    }
};

struct ProofResult {
    ProofStatus status = ProofStatus::DeadEnd;
    int inferences = 0;
    int playouts = 0;
    int bigsteps = 0;
    /// Present iff solved: actions from the root state to the closed tableau.
    std::optional<std::vector<Action>> proof;
    /// Bigstep roots in order, followed (when solved) by the nodes on the
    /// proof path below the last bigstep root.
    std::vector<NodeRecord> trace;
    PolicyStats policy_stats;
    /// Only filled when SearchOptions::record_expanded is set.
    std::vector<ExpandedRecord> expanded;
    bool timed_out = false;
};

struct SearchOptions {
    TableauOptions tableau;
    bool record_expanded = false;
    std::size_t max_expanded_records = 200;
};

/// Tableau search domain driving the generic MCTS.
class TableauDomain {
public:
    using State = TableauState;
    using Action = entcop::Action;

    TableauDomain(const Predictor& predictor, const TableauOptions& options, int inference_limit);

    bool can_apply() const { return inferences_ < inference_limit_; }
    State apply(const State& state, const Action& action);
    Evaluation<Action> evaluate(const State& state);

    int inferences() const { return inferences_; }
    const PolicyStats& policy_stats() const { return stats_; }

private:
    const Predictor& predictor_;
    TableauOptions options_;
    int inference_limit_;
    int inferences_ = 0;
    PolicyStats stats_;
};

/// Runs playouts with a bigstep every `bigstep_frequency` playouts until a
/// proof is found, the inference budget or wall clock runs out, or every
/// action below the bigstep root is a dead end.
ProofResult prove(std::shared_ptr<const Matrix> matrix, const Predictor& predictor, const SearchLimits& limits = {},
                  const SearchOptions& options = {});

}  // namespace entcop
