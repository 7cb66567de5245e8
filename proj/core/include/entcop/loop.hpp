#pragma once

// Problem loading, parallel proving over a problem set and the iterated
// prove/learn loop.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "entcop/learn.hpp"
#include "entcop/matrix.hpp"
#include "entcop/search.hpp"

namespace entcop {

struct ProblemEntry {
    std::string name;
    std::filesystem::path path;
    std::shared_ptr<const Matrix> matrix;
    /// Set instead of `matrix` when the file could not be read or clausified.
    std::optional<std::string> error;
};

/// Name of a problem: the file name without its extension.
std::string problem_name(const std::filesystem::path& path);

ProblemEntry load_problem(const std::filesystem::path& path, const ClausifyOptions& options = {});

/// Expands directories to their *.p files (sorted) and keeps files as given.
std::vector<std::filesystem::path> collect_problem_files(const std::vector<std::filesystem::path>& inputs);

std::vector<ProblemEntry> load_problems(const std::vector<std::filesystem::path>& inputs,
                                        const ClausifyOptions& options = {});

/// Outcome of one problem; `result` is empty when the problem failed to load
/// or the search raised.
struct ProblemOutcome {
    std::string name;
    std::optional<ProofResult> result;
    std::optional<std::string> error;

    bool solved() const { return result && result->status == ProofStatus::Solved; }
};

/// Runs prove on every loadable problem using `workers` threads. The output
/// order follows the input order and does not depend on the worker count.
std::vector<ProblemOutcome> prove_all(const std::vector<ProblemEntry>& problems, const Predictor& predictor,
                                      const SearchLimits& limits, const SearchOptions& options, int workers);

struct IterationStats {
    int iteration = 0;
    int solved = 0;
    double mean_entropy = 0.0;
    double mean_normalized_entropy = 0.0;
    long long inferences_total = 0;

    friend bool operator==(const IterationStats&, const IterationStats&) = default;
};

IterationStats summarize(int iteration, const std::vector<ProblemOutcome>& outcomes);

void write_stats_header(std::ostream& out);
void write_stats_row(std::ostream& out, const IterationStats& row);
void write_stats_csv(std::ostream& out, const std::vector<IterationStats>& rows);
std::vector<IterationStats> read_stats_csv(std::istream& in);

struct LoopConfig {
    /// Iterations 0..iterations-1; iteration 0 is unguided.
    int iterations = 3;
    SearchLimits limits;
    SearchOptions search;
    TrainConfig train;
    int workers = 1;
    /// When set, per-iteration examples, models, stats and a checkpoint are
    /// written here and an interrupted loop resumes from the checkpoint.
    std::optional<std::filesystem::path> out_dir;
};

void validate(const LoopConfig& config);

struct LoopResult {
    std::vector<IterationStats> stats;
    /// Outcomes of the final iteration.
    std::vector<ProblemOutcome> last_outcomes;
    /// Models used in the final iteration (absent when it was unguided).
    std::optional<TrainedModels> last_models;
    /// Iterations skipped because a checkpoint already covered them.
    int resumed_iterations = 0;
};

using LoopObserver = std::function<void(const IterationStats&)>;

/// Iteration 0 proves with the uniform predictor; iteration k > 0 trains
/// fresh models on the examples of iterations 0..k-1 and proves with them.
/// Per-problem failures are recorded and never abort the loop.
LoopResult run_loop(const std::vector<ProblemEntry>& problems, const LoopConfig& config,
                    const LoopObserver& observer = {});

/// Seed used to train the models of iteration `iteration`.
std::uint64_t iteration_seed(std::uint64_t seed, int iteration);

}  // namespace entcop
