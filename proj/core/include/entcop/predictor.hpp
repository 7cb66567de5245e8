#pragma once

// Policy/value predictors that guide the search.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "entcop/features.hpp"
#include "entcop/policy.hpp"
#include "entcop/tableau.hpp"

namespace entcop {

class Predictor {
public:
    virtual ~Predictor() = default;

    virtual std::string name() const = 0;
    /// One logit per action.
    virtual std::vector<double> policy_logits(const TableauState& state, std::span<const Action> actions) const = 0;
    /// Estimated provability of the state, in [0, 1].
    virtual double value(const TableauState& state) const = 0;
    virtual double temperature() const { return 1.0; }

    /// Softmax of the logits at this predictor's temperature.
    virtual PolicyDistribution policy(const TableauState& state, std::span<const Action> actions) const;
};

struct Prediction {
    /// Absent when the state has no legal actions.
    std::optional<PolicyDistribution> policy;
    double value = 0.0;
};

/// Policy over `actions` and the clamped value estimate.
Prediction predict(const Predictor& predictor, const TableauState& state, std::span<const Action> actions);

/// Uniform policy, value 0.5.
class UniformPredictor final : public Predictor {
public:
    std::string name() const override { return "uniform"; }
    std::vector<double> policy_logits(const TableauState&, std::span<const Action> actions) const override;
    double value(const TableauState&) const override { return 0.5; }
    PolicyDistribution policy(const TableauState&, std::span<const Action> actions) const override;
};

enum class ModelKind { Policy, Value };

/// Linear model over L2-normalized hashed features.
struct LinearModel {
    ModelKind kind = ModelKind::Policy;
    std::uint32_t dim = kDefaultFeatureDim;
    std::vector<double> weights = std::vector<double>(kDefaultFeatureDim, 0.0);
    double bias = 0.0;
    /// Softmax temperature used at prediction time (policy models).
    double temperature = 1.0;
    /// Entropy coefficient the model was trained with; informational.
    double alpha = 0.0;

    static LinearModel zeros(ModelKind kind, std::uint32_t dim = kDefaultFeatureDim);

    double score(const SparseFeatures& x) const;

    friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

void save_model(const LinearModel& model, std::ostream& out);
void save_model(const LinearModel& model, const std::filesystem::path& path);
/// Throws std::runtime_error on malformed or version-mismatched input.
LinearModel load_model(std::istream& in);
LinearModel load_model(const std::filesystem::path& path);

double logistic(double z);

/// Linear policy over action features; logistic value over state features.
/// A missing model falls back to the uniform behaviour for that head.
class LinearPredictor final : public Predictor {
public:
    LinearPredictor(std::optional<LinearModel> policy, std::optional<LinearModel> value);

    std::string name() const override { return "linear"; }
    std::vector<double> policy_logits(const TableauState& state, std::span<const Action> actions) const override;
    double value(const TableauState& state) const override;
    double temperature() const override { return temperature_; }

    /// Same weights, different softmax temperature.
    LinearPredictor with_temperature(double temperature) const;

    const std::optional<LinearModel>& policy_model() const { return policy_; }
    const std::optional<LinearModel>& value_model() const { return value_; }

private:
    std::optional<LinearModel> policy_;
    std::optional<LinearModel> value_;
    double temperature_ = 1.0;
};

/// Replaces every policy of length n by the fixed vector p_n, permuted to
/// follow the ranking of the ordering predictor. Values come from the
/// ordering predictor.
class FixedEntropyPredictor final : public Predictor {
public:
    FixedEntropyPredictor(std::shared_ptr<const Predictor> ordering, double target, std::uint64_t seed,
                          std::size_t max_length = 256);

    std::string name() const override { return "fixed-entropy"; }
    std::vector<double> policy_logits(const TableauState& state, std::span<const Action> actions) const override;
    double value(const TableauState& state) const override { return ordering_->value(state); }
    PolicyDistribution policy(const TableauState& state, std::span<const Action> actions) const override;

    const FixedEntropyPolicy& table() const { return table_; }

private:
    std::shared_ptr<const Predictor> ordering_;
    FixedEntropyPolicy table_;
};

}  // namespace entcop
