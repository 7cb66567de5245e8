#include "entcop/learn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "entcop/policy.hpp"

namespace entcop {

std::vector<TrainingExample> extract_training_data(const ProofResult& result, const std::string& problem,
                                                   int iteration, std::uint32_t dim) {
    std::vector<TrainingExample> out;
    const int proof_depth = result.proof ? static_cast<int>(result.proof->size()) : 0;
    for (const NodeRecord& node : result.trace) {
        const int total = std::accumulate(node.child_visits.begin(), node.child_visits.end(), 0);
        if (total == 0) continue;
        TrainingExample ex;
        ex.problem = problem;
        ex.iteration = iteration;
        ex.state_features = extract_features(node.state, dim);
        ex.action_features.reserve(node.actions.size());
        for (const Action& a : node.actions) ex.action_features.push_back(extract_action_features(node.state, a, dim));
        if (result.proof && node.on_proof_path) ex.value_target = std::pow(kProofDiscount, proof_depth - node.depth);
        ex.policy_targets.reserve(node.child_visits.size());
        for (int v : node.child_visits) ex.policy_targets.push_back(static_cast<double>(v) / total);
        out.push_back(std::move(ex));
    }
    return out;
}

LossAndGradient policy_loss(std::span<const double> targets, std::span<const double> logits, double alpha) {
    if (targets.size() != logits.size() || targets.empty()) {
        throw std::invalid_argument("policy loss needs equal, nonzero lengths");
    }
    const std::size_t n = logits.size();
    const double mx = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (double l : logits) z += std::exp(l - mx);
    const double log_z = std::log(z) + mx;

    std::vector<double> log_q(n), q(n);
    for (std::size_t i = 0; i < n; ++i) {
        log_q[i] = logits[i] - log_z;
        q[i] = std::exp(log_q[i]);
    }
    double cross = 0.0, h = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (targets[i] > 0) cross -= targets[i] * log_q[i];
        if (q[i] > 0) h -= q[i] * log_q[i];
    }
    LossAndGradient out;
    out.loss = cross - alpha * h;
    out.gradient.resize(n);
    double target_sum = 0.0;
    for (double t : targets) target_sum += t;
    for (std::size_t j = 0; j < n; ++j) {
        out.gradient[j] = target_sum * q[j] - targets[j] + alpha * q[j] * (log_q[j] + h);
    }
    return out;
}

LossAndGradient value_loss(double target, double score) {
    const double v = logistic(score);
    const double d = v - target;
    return {d * d, {2.0 * d * v * (1.0 - v)}};
}

void validate(const TrainConfig& c) {
    if (!(c.alpha >= 0.0) || !std::isfinite(c.alpha)) throw std::invalid_argument("alpha must be nonnegative");
    if (!(c.learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
    if (!(c.decay >= 0.0) || !std::isfinite(c.decay)) throw std::invalid_argument("decay must be nonnegative");
    if (c.epochs <= 0) throw std::invalid_argument("epochs must be positive");
    if (c.batch_size <= 0) throw std::invalid_argument("batch size must be positive");
    if (c.dim == 0) throw std::invalid_argument("feature dimension must be positive");
    if (!(c.temperature > 0.0)) throw std::invalid_argument("temperature must be positive");
}

namespace {

std::vector<double> logits_of(const LinearModel& m, const TrainingExample& ex) {
    std::vector<double> z(ex.action_features.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = m.score(ex.action_features[i]);
    return z;
}

// Adds scale * x / |x| to the accumulator.
void add_scaled(std::vector<double>& acc, std::uint32_t dim, const SparseFeatures& x, double scale) {
    const double norm = x.norm();
    if (norm == 0.0 || scale == 0.0) return;
    for (const auto& [i, c] : x.entries) acc[i % dim] += scale * static_cast<double>(c) / norm;
}

bool usable_policy_example(const TrainingExample& ex) {
    return ex.action_features.size() == ex.policy_targets.size() && !ex.policy_targets.empty();
}

}  // namespace

double mean_policy_loss(const LinearModel& model, std::span<const TrainingExample> examples, double alpha) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& ex : examples) {
        if (!usable_policy_example(ex)) continue;
        sum += policy_loss(ex.policy_targets, logits_of(model, ex), alpha).loss;
        ++n;
    }
    return n ? sum / static_cast<double>(n) : 0.0;
}

double mean_value_loss(const LinearModel& model, std::span<const TrainingExample> examples) {
    double sum = 0.0;
    for (const auto& ex : examples) sum += value_loss(ex.value_target, model.score(ex.state_features)).loss;
    return examples.empty() ? 0.0 : sum / static_cast<double>(examples.size());
}

TrainedModels train(std::span<const TrainingExample> examples, const TrainConfig& config) {
    validate(config);
    if (examples.empty()) throw std::invalid_argument("no training examples");
    for (const auto& ex : examples) {
        if (ex.action_features.size() != ex.policy_targets.size()) {
            throw std::invalid_argument("training example from '" + ex.problem + "' has mismatched action count");
        }
    }

    TrainedModels out;
    out.policy = LinearModel::zeros(ModelKind::Policy, config.dim);
    out.policy.temperature = config.temperature;
    out.policy.alpha = config.alpha;
    out.value = LinearModel::zeros(ModelKind::Value, config.dim);
    out.value.alpha = config.alpha;

    out.policy_losses.push_back(mean_policy_loss(out.policy, examples, config.alpha));
    out.value_losses.push_back(mean_value_loss(out.value, examples));

    std::vector<std::size_t> order(examples.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(config.seed);

    std::vector<double> gp(config.dim), gv(config.dim);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        // Fisher-Yates with our own index draw so the permutation does not
        // depend on the standard library's shuffle implementation.
        for (std::size_t i = order.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(rng() % i);
            std::swap(order[i - 1], order[j]);
        }
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
            const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
            std::fill(gp.begin(), gp.end(), 0.0);
            std::fill(gv.begin(), gv.end(), 0.0);
            double gv_bias = 0.0;
            for (std::size_t k = start; k < end; ++k) {
                const TrainingExample& ex = examples[order[k]];
                if (usable_policy_example(ex)) {
                    auto pl = policy_loss(ex.policy_targets, logits_of(out.policy, ex), config.alpha);
                    for (std::size_t a = 0; a < ex.action_features.size(); ++a) {
                        add_scaled(gp, config.dim, ex.action_features[a], pl.gradient[a]);
                    }
                }
                auto vl = value_loss(ex.value_target, out.value.score(ex.state_features));
                add_scaled(gv, config.dim, ex.state_features, vl.gradient[0]);
                gv_bias += vl.gradient[0];
            }
            const double step = config.learning_rate / (1.0 + config.decay * epoch) / static_cast<double>(end - start);
            for (std::uint32_t i = 0; i < config.dim; ++i) {
                out.policy.weights[i] -= step * gp[i];
                out.value.weights[i] -= step * gv[i];
            }
            out.value.bias -= step * gv_bias;
        }
        const double lp = mean_policy_loss(out.policy, examples, config.alpha);
        const double lv = mean_value_loss(out.value, examples);
        if (!std::isfinite(lp) || !std::isfinite(lv)) {
            std::ostringstream msg;
            msg << "training diverged at epoch " << epoch + 1 << " (policy loss " << lp << ", value loss " << lv
                << "); lower the learning rate";
            throw TrainingDiverged(msg.str());
        }
        out.policy_losses.push_back(lp);
        out.value_losses.push_back(lv);
    }
    return out;
}

// ------------------------------------------------------------------ File I/O

namespace {

constexpr int kExampleSchema = 1;

}  // namespace

std::string encode_features(const SparseFeatures& f) {
    std::string out;
    for (const auto& [i, c] : f.entries) {
        if (!out.empty()) out += ' ';
        out += std::to_string(i) + ':' + std::to_string(c);
    }
    return out;
}

SparseFeatures decode_features(const std::string& text) {
    SparseFeatures f;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) {
        auto colon = tok.find(':');
        if (colon == std::string::npos) throw std::runtime_error("bad feature entry '" + tok + "'");
        std::size_t used_i = 0, used_c = 0;
        unsigned long i = std::stoul(tok.substr(0, colon), &used_i);
        unsigned long c = std::stoul(tok.substr(colon + 1), &used_c);
        if (used_i != colon || used_c != tok.size() - colon - 1 || c == 0) {
            throw std::runtime_error("bad feature entry '" + tok + "'");
        }
        if (!f.entries.empty() && f.entries.back().first >= i) throw std::runtime_error("feature indices not sorted");
        f.entries.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(c));
    }
    return f;
}

void write_examples(std::ostream& out, std::span<const TrainingExample> examples) {
    for (const auto& ex : examples) {
        nlohmann::json j;
        j["schema"] = kExampleSchema;
        j["problem"] = ex.problem;
        j["iteration"] = ex.iteration;
        j["state"] = encode_features(ex.state_features);
        auto actions = nlohmann::json::array();
        for (const auto& a : ex.action_features) actions.push_back(encode_features(a));
        j["actions"] = std::move(actions);
        j["value"] = ex.value_target;
        j["policy"] = ex.policy_targets;
        out << j.dump() << '\n';
    }
}

void write_examples(const std::filesystem::path& path, std::span<const TrainingExample> examples) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write example file '" + path.string() + "'");
    write_examples(out, examples);
}

std::vector<TrainingExample> read_examples(std::istream& in) {
    std::vector<TrainingExample> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            auto j = nlohmann::json::parse(line);
            if (j.at("schema").get<int>() != kExampleSchema) {
                throw std::runtime_error("unsupported schema " + j.at("schema").dump());
            }
            TrainingExample ex;
            ex.problem = j.at("problem").get<std::string>();
            ex.iteration = j.at("iteration").get<int>();
            ex.state_features = decode_features(j.at("state").get<std::string>());
            for (const auto& a : j.at("actions")) ex.action_features.push_back(decode_features(a.get<std::string>()));
            ex.value_target = j.at("value").get<double>();
            ex.policy_targets = j.at("policy").get<std::vector<double>>();
            if (ex.policy_targets.size() != ex.action_features.size()) {
                throw std::runtime_error("policy/action length mismatch");
            }
            out.push_back(std::move(ex));
        } catch (const std::exception& e) {
            throw std::runtime_error("example line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

std::vector<TrainingExample> read_examples(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open example file '" + path.string() + "'");
    return read_examples(in);
}

}  // namespace entcop
