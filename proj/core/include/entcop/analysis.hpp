#pragma once

// Predictor comparison on a fixed bank of proof states, and the CSV reports.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "entcop/loop.hpp"
#include "entcop/policy.hpp"
#include "entcop/predictor.hpp"
#include "entcop/tableau.hpp"

namespace entcop {

/// KL(P || Q) in nats. Terms with P(x) = 0 contribute 0; P(x) > 0 with
/// Q(x) = 0 gives +infinity.
double kl_divergence(std::span<const double> p, std::span<const double> q);
inline double kl_divergence(const PolicyDistribution& p, const PolicyDistribution& q) {
    return kl_divergence(p.probs(), q.probs());
}

/// A state identified by its problem and the action path from the root.
struct BankState {
    std::string problem;
    std::vector<Action> path;
    std::size_t action_count = 0;

    friend bool operator==(const BankState&, const BankState&) = default;
};

struct StateBank {
    std::vector<BankState> states;

    friend bool operator==(const StateBank&, const StateBank&) = default;
};

void write_state_bank(std::ostream& out, const StateBank& bank);
void write_state_bank(const std::filesystem::path& path, const StateBank& bank);
StateBank read_state_bank(std::istream& in);
StateBank read_state_bank(const std::filesystem::path& path);

struct HarvestOptions {
    SearchLimits limits;
    TableauOptions tableau;
    std::size_t per_problem_cap = 200;
    int workers = 1;
};

/// States with at least two actions expanded by the uniform prover, in
/// problem order then expansion order, deduplicated by action path.
StateBank harvest_states(const std::vector<ProblemEntry>& problems, const HarvestOptions& options = {});

struct AgreementReport {
    double best = 0.0;
    double order = 0.0;
    /// Means over states with a finite divergence.
    double kl_ab = 0.0;
    double kl_ba = 0.0;
    std::size_t infinite_ab = 0;
    std::size_t infinite_ba = 0;
    double mean_entropy_a = 0.0;
    double mean_entropy_b = 0.0;
    double mean_normalized_entropy_a = 0.0;
    double mean_normalized_entropy_b = 0.0;
    std::size_t states = 0;
};

/// Policies of two predictors over the same canonical action lists.
/// `problems` maps problem names to their matrices.
AgreementReport compare(const Predictor& a, const Predictor& b, const StateBank& bank,
                        const std::map<std::string, std::shared_ptr<const Matrix>>& problems,
                        const TableauOptions& options = {});

std::size_t argmax_first(std::span<const double> p);

// ------------------------------------------------------------------ Reports

struct AgreementRow {
    std::string label;
    std::optional<int> solved;
    AgreementReport report;
};

/// One row per compared pair: label,succ,best,order,kl_ab,kl_ba,ent_a,ent_b,states,inf_ab,inf_ba.
void write_agreement_csv(std::ostream& out, std::span<const AgreementRow> rows);

struct SweepRow {
    std::string label;
    double alpha = 0.0;
    std::vector<IterationStats> iterations;
};

/// One row per sweep setting with an Ent/Succ column pair per iteration.
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows, int iterations);

/// Splits one CSV line on commas (no quoting is ever produced).
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace entcop
