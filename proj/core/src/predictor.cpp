#include "entcop/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace entcop {

PolicyDistribution Predictor::policy(const TableauState& state, std::span<const Action> actions) const {
    return softmax_temperature(policy_logits(state, actions), temperature());
}

Prediction predict(const Predictor& predictor, const TableauState& state, std::span<const Action> actions) {
    Prediction out;
    if (!actions.empty()) {
        out.policy = predictor.policy(state, actions);
        if (out.policy->size() != actions.size()) {
            throw std::logic_error("predictor " + predictor.name() + " returned a policy of the wrong length");
        }
    }
    double v = predictor.value(state);
    out.value = std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : 0.0;
    return out;
}

std::vector<double> UniformPredictor::policy_logits(const TableauState&, std::span<const Action> actions) const {
    return std::vector<double>(actions.size(), 0.0);
}

PolicyDistribution UniformPredictor::policy(const TableauState&, std::span<const Action> actions) const {
    return PolicyDistribution::uniform(actions.size());
}

// ---------------------------------------------------------------- LinearModel

LinearModel LinearModel::zeros(ModelKind kind, std::uint32_t dim) {
    LinearModel m;
    m.kind = kind;
    m.dim = dim;
    m.weights.assign(dim, 0.0);
    return m;
}

double LinearModel::score(const SparseFeatures& x) const {
    double norm = x.norm();
    if (norm == 0.0) return bias;
    double s = 0.0;
    for (const auto& [i, c] : x.entries) s += weights[i % dim] * static_cast<double>(c);
    return s / norm + bias;
}

double logistic(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

namespace {

constexpr const char* kModelMagic = "entcop-linear-model";
constexpr int kModelVersion = 1;

}  // namespace

void save_model(const LinearModel& model, std::ostream& out) {
    std::size_t nonzero = static_cast<std::size_t>(
        std::count_if(model.weights.begin(), model.weights.end(), [](double w) { return w != 0.0; }));
    out << kModelMagic << ' ' << kModelVersion << '\n';
    out << "kind " << (model.kind == ModelKind::Policy ? "policy" : "value") << '\n';
    out << std::setprecision(17);
    out << "dim " << model.dim << '\n';
    out << "temperature " << model.temperature << '\n';
    out << "alpha " << model.alpha << '\n';
    out << "bias " << model.bias << '\n';
    out << "weights " << nonzero << '\n';
    for (std::size_t i = 0; i < model.weights.size(); ++i) {
        if (model.weights[i] != 0.0) out << i << ' ' << model.weights[i] << '\n';
    }
}

void save_model(const LinearModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model file '" + path.string() + "'");
    save_model(model, out);
}

LinearModel load_model(std::istream& in) {
    auto fail = [](const std::string& why) -> LinearModel { throw std::runtime_error("bad model file: " + why); };
    std::string magic, key;
    int version = 0;
    if (!(in >> magic >> version) || magic != kModelMagic) fail("missing header");
    if (version != kModelVersion) fail("unsupported version " + std::to_string(version));
    LinearModel m;
    std::string kind;
    if (!(in >> key >> kind) || key != "kind" || (kind != "policy" && kind != "value")) fail("kind");
    m.kind = kind == "policy" ? ModelKind::Policy : ModelKind::Value;
    if (!(in >> key >> m.dim) || key != "dim" || m.dim == 0) fail("dim");
    if (!(in >> key >> m.temperature) || key != "temperature" || !(m.temperature > 0)) fail("temperature");
    if (!(in >> key >> m.alpha) || key != "alpha") fail("alpha");
    if (!(in >> key >> m.bias) || key != "bias") fail("bias");
    std::size_t n = 0;
    if (!(in >> key >> n) || key != "weights") fail("weights");
    m.weights.assign(m.dim, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t i = 0;
        double w = 0.0;
        if (!(in >> i >> w) || i >= m.dim) fail("weight entry " + std::to_string(k));
        m.weights[i] = w;
    }
    return m;
}

LinearModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file '" + path.string() + "'");
    return load_model(in);
}

// ------------------------------------------------------------ LinearPredictor

LinearPredictor::LinearPredictor(std::optional<LinearModel> policy, std::optional<LinearModel> value)
    : policy_(std::move(policy)), value_(std::move(value)) {
    if (policy_ && policy_->kind != ModelKind::Policy) throw std::invalid_argument("expected a policy model");
    if (value_ && value_->kind != ModelKind::Value) throw std::invalid_argument("expected a value model");
    if (policy_) temperature_ = policy_->temperature;
}

std::vector<double> LinearPredictor::policy_logits(const TableauState& state, std::span<const Action> actions) const {
    std::vector<double> out(actions.size(), 0.0);
    if (!policy_) return out;
    for (std::size_t i = 0; i < actions.size(); ++i) {
        out[i] = policy_->score(extract_action_features(state, actions[i], policy_->dim));
    }
    return out;
}

double LinearPredictor::value(const TableauState& state) const {
    if (!value_) return 0.5;
    return logistic(value_->score(extract_features(state, value_->dim)));
}

LinearPredictor LinearPredictor::with_temperature(double temperature) const {
    if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be positive");
    LinearPredictor copy = *this;
    copy.temperature_ = temperature;
    if (copy.policy_) copy.policy_->temperature = temperature;
    return copy;
}

// ------------------------------------------------------ FixedEntropyPredictor

FixedEntropyPredictor::FixedEntropyPredictor(std::shared_ptr<const Predictor> ordering, double target,
                                             std::uint64_t seed, std::size_t max_length)
    : ordering_(std::move(ordering)), table_(target, seed, max_length) {
    if (!ordering_) throw std::invalid_argument("fixed-entropy predictor needs an ordering predictor");
}

std::vector<double> FixedEntropyPredictor::policy_logits(const TableauState& state,
                                                         std::span<const Action> actions) const {
    auto p = policy(state, actions);
    std::vector<double> out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = std::log(p[i]);
    return out;
}

PolicyDistribution FixedEntropyPredictor::policy(const TableauState& state, std::span<const Action> actions) const {
    PolicyDistribution reference = ordering_->policy(state, actions);
    return apply_order_preserving(table_.vector_for(actions.size()), reference);
}

}  // namespace entcop
