#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "leakscope/rng.hpp"
#include "leakscope/value.hpp"

namespace leakscope {

/// Parameterised distribution attached to a stochastic node. Factories reject
/// out-of-range parameters with InvalidDistribution.
class DistSpec {
public:
    struct Constant {
        Value value;
    };
    struct UniformContinuous {
        double lo, hi;
    };
    struct UniformDiscrete {
        std::shared_ptr<const std::vector<Value>> items;
    };
    struct Normal {
        double mu, sigma;
    };
    struct Binomial {
        std::int64_t n;
        double p;
    };
    struct Bernoulli {
        double p;
    };
    struct Exponential {
        double rate;
    };
    using Rep = std::variant<Constant, UniformContinuous, UniformDiscrete, Normal, Binomial, Bernoulli, Exponential>;

    static DistSpec constant(Value v);
    static DistSpec uniform(double lo, double hi);
    static DistSpec uniform_discrete(std::vector<Value> items);
    /// Shares the support; builders that run per draw should capture one of these.
    static DistSpec uniform_discrete(std::shared_ptr<const std::vector<Value>> items);
    static DistSpec normal(double mu, double sigma);
    static DistSpec binomial(std::int64_t n, double p);
    static DistSpec bernoulli(double p);
    static DistSpec exponential(double rate);

    const Rep& rep() const { return rep_; }

    Value sample(Rng& rng) const;
    /// Log density (continuous) or log mass (discrete); -inf outside the support.
    double log_density(const Value& v) const;

    bool is_continuous() const;
    bool is_constant() const { return std::holds_alternative<Constant>(rep_); }
    bool has_finite_support() const { return !is_continuous(); }
    /// Kind of the values produced; Tuple for mixed-kind UniformDiscrete items is not inferred.
    ValueKind value_kind() const;

    /// Outcomes with positive mass, in a fixed order. Throws ModelError for continuous families.
    std::vector<std::pair<Value, double>> support() const;

    /// Largest Int the distribution can produce; throws ModelError if unbounded or non-integer.
    std::int64_t max_int() const;

    double mean() const;
    double stddev() const;

    std::string describe() const;

private:
    explicit DistSpec(Rep rep) : rep_(std::move(rep)) {}

    Rep rep_;
};

/// Uniform items 0..n inclusive as Int values.
std::shared_ptr<const std::vector<Value>> int_range(std::int64_t lo, std::int64_t hi);

/// Symbols with the given texts.
std::shared_ptr<const std::vector<Value>> symbol_items(const std::vector<std::string>& texts);

double binomial_log_pmf(std::int64_t n, double p, std::int64_t k);

}  // namespace leakscope
