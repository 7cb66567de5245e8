#include "entcop/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace entcop {

PolicyDistribution::PolicyDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw std::invalid_argument("policy distribution must have at least one entry");
    double sum = 0.0;
    for (double p : probs_) {
        if (!std::isfinite(p) || p < 0.0) throw std::invalid_argument("policy entries must be finite and nonnegative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("policy entries sum to " + std::to_string(sum) + ", expected 1");
    }
}

PolicyDistribution PolicyDistribution::uniform(std::size_t n) {
    if (n == 0) throw std::invalid_argument("uniform distribution over zero actions");
    return PolicyDistribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

double entropy(std::span<const double> p) {
    double h = 0.0;
    for (double x : p) {
        if (x > 0.0) h -= x * std::log(x);
    }
    return std::max(h, 0.0);
}

double normalized_entropy(std::span<const double> p) {
    if (p.size() <= 1) return 0.0;
    // Summing n equal terms need not reproduce log(n) to the last bit.
    if (std::all_of(p.begin(), p.end(), [&](double x) { return x == p[0]; })) return 1.0;
    return std::clamp(entropy(p) / std::log(static_cast<double>(p.size())), 0.0, 1.0);
}

PolicyDistribution softmax_temperature(std::span<const double> logits, double temperature) {
    if (logits.empty()) throw std::invalid_argument("softmax of an empty logit vector");
    if (!(temperature > 0.0) || !std::isfinite(temperature)) {
        throw std::invalid_argument("softmax temperature must be positive");
    }
    double max = -std::numeric_limits<double>::infinity();
    for (double l : logits) {
        if (!std::isfinite(l)) throw std::invalid_argument("softmax logits must be finite");
        max = std::max(max, l);
    }
    std::vector<double> p(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp((logits[i] - max) / temperature);
        sum += p[i];
    }
    for (double& x : p) x /= sum;
    return PolicyDistribution(std::move(p));
}

std::vector<std::size_t> descending_ranking(std::span<const double> p) {
    std::vector<std::size_t> idx(p.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return p[a] > p[b]; });
    return idx;
}

PolicyDistribution apply_order_preserving(const PolicyDistribution& fixed, const PolicyDistribution& reference) {
    if (fixed.size() != reference.size()) {
        throw std::invalid_argument("apply_order_preserving: length mismatch (" + std::to_string(fixed.size()) +
                                    " vs " + std::to_string(reference.size()) + ")");
    }
    std::vector<double> sorted = fixed.vector();
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    auto rank = descending_ranking(reference.probs());
    std::vector<double> out(fixed.size());
    for (std::size_t k = 0; k < rank.size(); ++k) out[rank[k]] = sorted[k];
    return PolicyDistribution(std::move(out));
}

namespace {

// Uniform double in [0, 1) from the top 53 bits; portable across standard
// libraries, unlike std::uniform_real_distribution.
double unit_double(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::vector<double> seeded_logits(std::size_t n, std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(n), 0x6c6f6769u};
    std::mt19937_64 rng(seq);
    std::vector<double> logits(n);
    for (double& l : logits) l = unit_double(rng);
    std::vector<double> sorted = logits;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        for (std::size_t i = 0; i < n; ++i) logits[i] += 1e-9 * static_cast<double>(i);
    }
    return logits;
}

}  // namespace

PolicyDistribution make_fixed_entropy_vector(std::size_t n, double target, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("fixed-entropy vectors need length >= 2");
    if (!(target > 0.0) || target > 1.0) throw std::invalid_argument("target normalized entropy must be in (0, 1]");
    if (target == 1.0) return PolicyDistribution::uniform(n);

    const std::vector<double> logits = seeded_logits(n, seed);
    auto h_at = [&](double log_t) { return normalized_entropy(softmax_temperature(logits, std::exp(log_t))); };

    double lo = std::log(1e-6);
    double hi = std::log(1e9);
    if (h_at(lo) > target + 1e-6 || h_at(hi) < target - 1e-6) {
        throw std::runtime_error("normalized entropy " + std::to_string(target) + " not reachable for length " +
                                 std::to_string(n));
    }
    double mid = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        mid = 0.5 * (lo + hi);
        double h = h_at(mid);
        if (std::abs(h - target) <= 1e-9) break;
        if (h < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    PolicyDistribution out = softmax_temperature(logits, std::exp(mid));
    if (std::abs(normalized_entropy(out) - target) > 1e-6) {
        throw std::runtime_error("bisection failed to reach normalized entropy " + std::to_string(target));
    }
    return out;
}

FixedEntropyPolicy::FixedEntropyPolicy(double target, std::uint64_t seed, std::size_t max_length)
    : target_(target), seed_(seed) {
    for (std::size_t n = 2; n <= max_length; ++n) cache_.push_back(make_fixed_entropy_vector(n, target, seed));
}

PolicyDistribution FixedEntropyPolicy::vector_for(std::size_t n) const {
    if (n == 0) throw std::invalid_argument("no actions");
    if (n == 1) return PolicyDistribution::uniform(1);
    if (n - 2 < cache_.size()) return cache_[n - 2];
    return make_fixed_entropy_vector(n, target_, seed_);
}

double FixedEntropyPolicy::max_deviation() const {
    double worst = 0.0;
    for (const auto& p : cache_) worst = std::max(worst, std::abs(normalized_entropy(p) - target_));
    return worst;
}

}  // namespace entcop
