#pragma once

// Small models shared by the unit and acceptance tests.

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "leakscope/inference.hpp"
#include "leakscope/model.hpp"
#include "leakscope/sample_set.hpp"

namespace fixtures {

using namespace leakscope;

inline std::vector<Value> ints(std::int64_t lo, std::int64_t hi) {
    std::vector<Value> out;
    for (std::int64_t i = lo; i <= hi; ++i) out.push_back(Value::integer(i));
    return out;
}

inline Value int_sum(std::span<const Value> xs) {
    std::int64_t s = 0;
    for (const auto& x : xs) s += x.as_int();
    return Value::integer(s);
}

/// x, y uniform on {0,1,2}; sum = x + y and o = (x + y) / 2 as a Real.
inline GenerativeModel pair_average() {
    ModelBuilder b;
    const auto x = b.stochastic(DistSpec::uniform_discrete(ints(0, 2)), {.name = "x"});
    const auto y = b.stochastic(DistSpec::uniform_discrete(ints(0, 2)), {.name = "y"});
    const auto sum = b.derived(int_sum, {x, y}, {.name = "sum", .kind = ValueKind::Int});
    const auto o = b.derived([](std::span<const Value> v) { return Value::real(v[0].as_int() / 2.0); }, {sum},
                             {.name = "o", .kind = ValueKind::Real});
    b.query("sum", sum).query("o", o);
    return b.finalize();
}

/// Two dice on 1..4, evidence sum >= 5, query x.
inline GenerativeModel dice_at_least_five() {
    ModelBuilder b;
    const auto x = b.stochastic(DistSpec::uniform_discrete(ints(1, 4)), {.name = "x"});
    const auto y = b.stochastic(DistSpec::uniform_discrete(ints(1, 4)), {.name = "y"});
    const auto s = b.derived(int_sum, {x, y}, {.name = "s", .kind = ValueKind::Int});
    b.observe(s, Observation::predicate([](const Value& v) { return v.as_int() >= 5; }, "s >= 5"));
    b.query("x", x);
    return b.finalize();
}

/// Three biased coins, evidence "at least two heads", query the first two.
inline GenerativeModel coins_majority() {
    ModelBuilder b;
    const auto a = b.stochastic(DistSpec::bernoulli(0.3), {.name = "a"});
    const auto c = b.stochastic(DistSpec::bernoulli(0.5), {.name = "b"});
    const auto d = b.stochastic(DistSpec::bernoulli(0.7), {.name = "c"});
    const auto heads = b.derived(
        [](std::span<const Value> v) {
            return Value::integer(v[0].as_bool() + v[1].as_bool() + v[2].as_bool());
        },
        {a, c, d}, {.name = "heads", .kind = ValueKind::Int});
    b.observe(heads, Observation::predicate([](const Value& v) { return v.as_int() >= 2; }, "heads >= 2"));
    b.query("a", a).query("b", c);
    return b.finalize();
}

/// Binomial-sized array of fair coins; evidence "exactly one head", query the size.
inline GenerativeModel array_one_head() {
    ModelBuilder b;
    const auto n = b.stochastic(DistSpec::binomial(4, 0.5), {.name = "n"});
    const auto coins = b.array_of(
        n, [](ElementScope& s, std::int64_t) { return s.stochastic(DistSpec::bernoulli(0.5), "coin"); },
        {.name = "coins"});
    const auto heads = b.derived(
        [](std::span<const Value> v) {
            std::int64_t k = 0;
            for (const auto& c : v[0].items()) k += c.as_bool();
            return Value::integer(k);
        },
        {coins}, {.name = "heads", .kind = ValueKind::Int});
    b.observe(heads, Observation::equals(Value::integer(1)));
    b.query("n", n);
    return b.finalize();
}

/// y ~ Binomial(2, (x + 1) / 4) given x uniform on {0,1,2}; evidence y = 1, query x.
inline GenerativeModel dependent_binomial() {
    ModelBuilder b;
    const auto x = b.stochastic(DistSpec::uniform_discrete(ints(0, 2)), {.name = "x"});
    const auto y = b.stochastic(
        [](std::span<const Value> v) { return DistSpec::binomial(2, static_cast<double>(v[0].as_int() + 1) / 4.0); },
        {x}, {.name = "y", .kind = ValueKind::Int});
    b.observe(y, Observation::equals(Value::integer(1)));
    b.query("x", x);
    return b.finalize();
}

/// Noisy symbol channel: o = s, except with probability 0.2 a uniform symbol. Evidence o = A.
inline GenerativeModel noisy_channel() {
    const std::vector<Value> abc{Value::symbol("A"), Value::symbol("B"), Value::symbol("C")};
    ModelBuilder b;
    const auto s = b.stochastic(DistSpec::uniform_discrete(abc), {.name = "s"});
    const auto flip = b.stochastic(DistSpec::bernoulli(0.2), {.name = "flip"});
    const auto r = b.stochastic(DistSpec::uniform_discrete(abc), {.name = "r"});
    const auto o = b.derived([](std::span<const Value> v) { return v[1].as_bool() ? v[2] : v[0]; }, {s, flip, r},
                             {.name = "o", .kind = ValueKind::Symbol});
    b.observe(o, Observation::equals(Value::symbol("A")));
    b.query("s", s).query("flip", flip);
    return b.finalize();
}

using JointKey = std::vector<Value>;

/// Weighted joint pmf of all query columns.
inline std::map<JointKey, double> joint_pmf(const SampleSet& s) {
    std::map<JointKey, double> out;
    double total = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double w = s.weights ? (*s.weights)[i] : 1.0;
        JointKey key;
        for (const auto& c : s.columns) key.push_back(c[i]);
        out[key] += w;
        total += w;
    }
    for (auto& [k, p] : out) p /= total;
    return out;
}

inline double total_variation(const std::map<JointKey, double>& p, const std::map<JointKey, double>& q) {
    std::map<JointKey, double> diff = p;
    for (const auto& [k, v] : q) diff[k] -= v;
    double tv = 0.0;
    for (const auto& [k, v] : diff) tv += std::abs(v);
    return tv / 2.0;
}

}  // namespace fixtures
