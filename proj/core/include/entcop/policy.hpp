#pragma once

// Probability vectors over the legal actions of a state, and the entropy
// arithmetic used to shape and compare them. Natural logarithms throughout.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace entcop {

class PolicyDistribution {
public:
    /// Throws std::invalid_argument unless entries are finite, nonnegative,
    /// at least one, and sum to 1 within 1e-9.
    explicit PolicyDistribution(std::vector<double> probs);

    static PolicyDistribution uniform(std::size_t n);

    std::size_t size() const { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }
    std::span<const double> probs() const { return probs_; }
    const std::vector<double>& vector() const { return probs_; }

    friend bool operator==(const PolicyDistribution&, const PolicyDistribution&) = default;

private:
    std::vector<double> probs_;
};

/// Shannon entropy -sum p log p with 0 log 0 = 0.
double entropy(std::span<const double> p);
/// Entropy divided by log(n); defined as 0 for n = 1.
double normalized_entropy(std::span<const double> p);

inline double entropy(const PolicyDistribution& p) { return entropy(p.probs()); }
inline double normalized_entropy(const PolicyDistribution& p) { return normalized_entropy(p.probs()); }

/// p_i = exp(l_i / T) / sum_j exp(l_j / T), computed with max subtraction.
PolicyDistribution softmax_temperature(std::span<const double> logits, double temperature);

/// Indices sorted by descending probability, ties by ascending index.
std::vector<std::size_t> descending_ranking(std::span<const double> p);

/// Permutation of `fixed` whose descending-rank order matches `reference`.
PolicyDistribution apply_order_preserving(const PolicyDistribution& fixed, const PolicyDistribution& reference);

/// Deterministic vector of length n >= 2 with normalized entropy within 1e-6
/// of `target` (0 < target <= 1): one seeded random logit draw, then
/// bisection on the softmax temperature.
PolicyDistribution make_fixed_entropy_vector(std::size_t n, double target, std::uint64_t seed);

/// Table of fixed-entropy vectors by length, built eagerly for 2..max_length.
class FixedEntropyPolicy {
public:
    FixedEntropyPolicy(double target, std::uint64_t seed, std::size_t max_length = 256);

    double target() const { return target_; }
    std::uint64_t seed() const { return seed_; }
    /// Vector of length n; lengths beyond the table are computed on demand.
    PolicyDistribution vector_for(std::size_t n) const;
    /// Largest |H*(p_n) - target| over the cached table.
    double max_deviation() const;

private:
    double target_;
    std::uint64_t seed_;
    std::vector<PolicyDistribution> cache_;  // index n - 2
};

}  // namespace entcop
