#pragma once

// Hashed symbol-walk features of tableau states and actions.
//
// A walk is a single symbol or a parent/child symbol pair read off a literal
// (predicate with its polarity at the root, `*` for variables). Every walk is
// tagged with a namespace (`g` current goal, `p` active path, `o` open goals,
// `a` action, `x` goal/action cross) and hashed with 64-bit FNV-1a modulo the
// feature dimension.

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "entcop/tableau.hpp"

namespace entcop {

inline constexpr std::uint32_t kDefaultFeatureDim = 1u << 15;

/// Sparse nonnegative count vector, sorted by index with unique indices.
struct SparseFeatures {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> entries;

    std::uint32_t count(std::uint32_t index) const;
    double norm() const;

    friend bool operator==(const SparseFeatures&, const SparseFeatures&) = default;
};

std::uint64_t fnv1a(std::string_view bytes);
/// Bucket of a namespaced walk, e.g. feature_index("g", {"p", "f"}, dim).
std::uint32_t feature_index(std::string_view ns, const std::vector<std::string>& walk, std::uint32_t dim);

/// Walks (as token sequences) of a literal, length 1 and 2.
std::vector<std::vector<std::string>> literal_walks(const Literal& literal, const SymbolTable& symbols);

SparseFeatures extract_features(const TableauState& state, std::uint32_t dim = kDefaultFeatureDim);
SparseFeatures extract_action_features(const TableauState& state, const Action& action,
                                       std::uint32_t dim = kDefaultFeatureDim);

}  // namespace entcop
