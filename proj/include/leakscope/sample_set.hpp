#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "leakscope/value.hpp"

namespace leakscope {

enum class Method { Forward, Rejection, Importance, Metropolis, Exact };

const char* to_string(Method m);
/// Accepts forward|rejection|importance|metropolis|exact; throws std::invalid_argument otherwise.
Method parse_method(std::string_view text);

/// Columnar draws of the query variables of a model.
struct SampleSet {
    std::vector<std::string> names;
    std::vector<std::vector<Value>> columns;
    std::optional<std::vector<double>> weights;
    std::optional<std::vector<int>> chain_ids;
    std::uint64_t seed = 0;
    Method method = Method::Forward;

    std::size_t size() const { return columns.empty() ? 0 : columns.front().size(); }
    bool has_column(std::string_view name) const;
    /// Throws EstimationError for an unknown name.
    const std::vector<Value>& column(std::string_view name) const;
    /// True only when weights are present and not all equal.
    bool is_weighted() const;
    /// Sum of weights (row count when unweighted).
    double total_weight() const;
    /// Number of rows per chain label, in label order.
    std::map<int, std::size_t> chain_counts() const;
};

/// Joint pmf over the query variables, keyed by one value per query.
struct ExactDistribution {
    std::vector<std::string> names;
    std::map<std::vector<Value>, double> outcomes;

    std::size_t index_of(std::string_view name) const;
    /// Marginal pmf of one query.
    std::map<Value, double> pmf(std::string_view name) const;
    /// Joint pmf of the named queries, in the given order.
    ExactDistribution marginal(const std::vector<std::string>& keep) const;
    double total() const;
    /// One row per outcome with its probability as the weight.
    SampleSet to_sample_set() const;
};

/// CSV with header (query names..., weight, chain). Reals use 17 significant digits.
void write_csv(const SampleSet& s, std::ostream& os);

}  // namespace leakscope
