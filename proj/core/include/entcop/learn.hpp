#pragma once

// Training targets from search trees and entropy-regularized training of the
// linear policy/value models.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "entcop/features.hpp"
#include "entcop/predictor.hpp"
#include "entcop/search.hpp"

namespace entcop {

struct TrainingExample {
    std::string problem;
    int iteration = 0;
    SparseFeatures state_features;
    std::vector<SparseFeatures> action_features;
    double value_target = 0.0;
    std::vector<double> policy_targets;

    friend bool operator==(const TrainingExample&, const TrainingExample&) = default;
};

/// One example per trace node with at least one expanded child. Value target
/// is 0.99^(proof depth - node depth) on the proof path and 0 otherwise;
/// policy targets are child visit counts normalized to sum 1.
std::vector<TrainingExample> extract_training_data(const ProofResult& result, const std::string& problem,
                                                   int iteration, std::uint32_t dim = kDefaultFeatureDim);

struct LossAndGradient {
    double loss = 0.0;
    /// Derivative with respect to each logit (policy) or the pre-logistic
    /// score (value, single entry).
    std::vector<double> gradient;
};

/// -sum p_i log q_i - alpha * H[q] with q = softmax(logits).
LossAndGradient policy_loss(std::span<const double> targets, std::span<const double> logits, double alpha);
/// (v - logistic(z))^2 and its derivative in z.
LossAndGradient value_loss(double target, double score);

struct TrainConfig {
    double alpha = 0.7;
    double learning_rate = 0.5;
    /// The step in epoch e (from 0) is learning_rate / (1 + decay * e).
    double decay = 0.5;
    int epochs = 20;
    int batch_size = 16;
    std::uint32_t dim = kDefaultFeatureDim;
    std::uint64_t seed = 1;
    /// Temperature written into the trained policy model.
    double temperature = 1.0;
};

void validate(const TrainConfig& config);

class TrainingDiverged : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TrainedModels {
    LinearModel policy;
    LinearModel value;
    /// Mean loss over the data set after each epoch (entry 0: before training).
    std::vector<double> policy_losses;
    std::vector<double> value_losses;
};

/// Mini-batch gradient descent from zero weights; deterministic in the seed.
TrainedModels train(std::span<const TrainingExample> examples, const TrainConfig& config);

/// Mean policy objective and mean value objective of a model pair.
double mean_policy_loss(const LinearModel& model, std::span<const TrainingExample> examples, double alpha);
double mean_value_loss(const LinearModel& model, std::span<const TrainingExample> examples);

/// Line-delimited JSON records, each carrying the schema version.
void write_examples(std::ostream& out, std::span<const TrainingExample> examples);
void write_examples(const std::filesystem::path& path, std::span<const TrainingExample> examples);
std::vector<TrainingExample> read_examples(std::istream& in);
std::vector<TrainingExample> read_examples(const std::filesystem::path& path);

std::string encode_features(const SparseFeatures& f);
SparseFeatures decode_features(const std::string& text);

}  // namespace entcop
