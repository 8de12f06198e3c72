#include <doctest.h>

#include <cmath>
#include <string>

#include "fixtures.hpp"
#include "leakscope/errors.hpp"
#include "leakscope/estimators.hpp"
#include "leakscope/inference.hpp"
#include "leakscope/scenarios.hpp"

using namespace leakscope;
using fixtures::ints;

namespace {

bool lt18(const Value& v) { return v.as_real() < 18.0; }

GenerativeModel two_coins_sum_two() {
    ModelBuilder b;
    const auto x = b.stochastic(DistSpec::bernoulli(0.5), {.name = "x"});
    const auto y = b.stochastic(DistSpec::bernoulli(0.5), {.name = "y"});
    const auto s = b.derived([](std::span<const Value> v) { return Value::integer(v[0].as_bool() + v[1].as_bool()); },
                             {x, y}, {.name = "s", .kind = ValueKind::Int});
    b.observe(s, Observation::equals(Value::integer(2)));
    b.query("x", x).query("y", y);
    return b.finalize();
}

GenerativeModel uniform_pair_sum(std::int64_t n) {
    ModelBuilder b;
    const auto x = b.stochastic(DistSpec::uniform_discrete(int_range(0, n)), {.name = "x"});
    const auto y = b.stochastic(DistSpec::uniform_discrete(int_range(0, n)), {.name = "y"});
    const auto o = b.derived(fixtures::int_sum, {x, y}, {.name = "o", .kind = ValueKind::Int});
    b.query("x", x).query("o", o);
    return b.finalize();
}

GenerativeModel impossible() {
    ModelBuilder b;
    const auto x = b.stochastic(DistSpec::uniform_discrete(ints(0, 2)), {.name = "x"});
    b.observe(x, Observation::equals(Value::integer(5)));
    b.query("x", x);
    return b.finalize();
}

}  // namespace

TEST_CASE("prior sampling of the kal age") {
    const auto s = sample_prior(build_agg(Attacker::Kal), 10000, 1);
    const auto [mean, sd] = summary_stats(s, "a");
    CHECK(mean.value == doctest::Approx(50).epsilon(1.0 / 50));
    CHECK(sd.value == doctest::Approx(28.87).epsilon(1.0 / 28.87));
    CHECK(s.method == Method::Forward);
    CHECK_FALSE(s.weights.has_value());
}

TEST_CASE("prior prediction of a uniform sum") {
    const auto s = sample_prior(uniform_pair_sum(100), 10000, 4);
    const auto p = probability_query(s, "o", [](const Value& v) { return v.as_int() == 100; });
    CHECK(std::abs(p.value - 1.0 / 101) < 0.005);
}

TEST_CASE("constant model rows are identical") {
    ModelBuilder b;
    b.query("c", b.constant(Value::symbol("k"), {.name = "c"}));
    const auto s = sample_prior(b.finalize(), 20, 1);
    for (const auto& v : s.column("c")) CHECK(v == Value::symbol("k"));
}

TEST_CASE("rejection keeps only in-evidence kal draws") {
    const auto model = observe_output(build_agg(Attacker::Kal), 55.295, 55.305);
    const auto s = rejection_sample(model, 200, 3);
    CHECK(s.size() == 200);
    for (const auto& v : s.column("a")) {
        CHECK(v.as_real() >= 55.58 - 1e-9);
        CHECK(v.as_real() <= 55.62 + 1e-9);
    }
    for (const auto& v : s.column("o")) {
        CHECK(v.as_real() >= 55.295);
        CHECK(v.as_real() < 55.305);
    }
}

TEST_CASE("vacuous rejection equals prior sampling") {
    const auto prior = uniform_pair_sum(5);
    const auto post = prior.observe(prior.query_node("o"), Observation::predicate([](const Value&) { return true; }));
    const auto a = sample_prior(prior, 500, 9);
    const auto b = rejection_sample(post, 500, 9);
    CHECK(a.columns == b.columns);
}

TEST_CASE("forced outcome") {
    const auto s = rejection_sample(two_coins_sum_two(), 300, 1);
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(s.column("x")[i].as_bool());
        CHECK(s.column("y")[i].as_bool());
    }
}

TEST_CASE("rejection floor aborts with a diagnostic") {
    RejectionSettings rs;
    rs.check_after = 10000;
    rs.min_acceptance = 0.5;
    try {
        rejection_sample(fixtures::dice_at_least_five().observe(
                             fixtures::dice_at_least_five().query_node("x"), Observation::equals(Value::integer(4))),
                         100000, 1, rs);
        FAIL("expected the floor to trigger");
    } catch (const InferenceError& e) {
        CHECK(std::string(e.what()).find("metropolis") != std::string::npos);
    }
}

TEST_CASE("importance sampling of the kal posterior") {
    const auto model = observe_output(build_agg(Attacker::Kal), 55.295, 55.305);
    const auto s = importance_sample(model, 50000, 2);
    REQUIRE(s.weights.has_value());
    CHECK(s.size() == 50000);
    const auto mean = summary_stats(s, "a").first.value;
    CHECK(std::abs(mean - 55.60) <= 0.01);
    CHECK(probability_query(s, "a", lt18).value == 0.0);
}

TEST_CASE("importance sampling of the kab posterior") {
    const auto model = observe_output(build_agg(Attacker::Kab), 55.295, 55.305);
    const auto s = importance_sample(model, 20000, 2);
    const double p = probability_query(s, "a", lt18).value;
    CHECK(p < 0.05);
    CHECK(p < 0.18);
}

TEST_CASE("importance without evidence matches the prior") {
    const auto model = uniform_pair_sum(10);
    const auto s = importance_sample(model, 1000, 5);
    const auto f = sample_prior(model, 1000, 5);
    CHECK_FALSE(s.is_weighted());
    CHECK(s.columns == f.columns);
}

TEST_CASE("all-zero weights abort") {
    CHECK_THROWS_AS(importance_sample(impossible(), 100, 1), InferenceError);
    CHECK_THROWS_AS(metropolis_sample(impossible(), 100, 1), InferenceError);
}

TEST_CASE("metropolis on the continuous convergence program") {
    SyntheticParams p;
    const auto s = metropolis_sample(build_synthetic(p), 5000, 3);
    const double est = probability_query(s, "o", [](const Value& v) { return v.as_real() < 55.0; }).value;
    CHECK(std::abs(est - 0.7882) < 0.01);
    CHECK(s.chain_counts() == std::map<int, std::size_t>{{0, 2500}, {1, 2500}});
}

TEST_CASE("metropolis on the discrete convergence program") {
    SyntheticParams p;
    p.kind = SyntheticParams::Kind::Discrete;
    p.m = 1;
    p.n = 100;
    const auto s = metropolis_sample(build_synthetic(p), 5000, 3);
    const double est = probability_query(s, "o", [](const Value& v) { return v.as_int() == 100; }).value;
    CHECK(std::abs(est - 1.0 / 101) < 0.01);
}

TEST_CASE("metropolis agrees with enumeration and respects evidence") {
    const auto model = fixtures::dependent_binomial();
    const auto s = metropolis_sample(model, 10000, 8);
    const auto exact = enumerate_exact(model);
    CHECK(fixtures::total_variation(fixtures::joint_pmf(s), exact.outcomes) < 0.02);

    const auto kal = observe_output(build_agg(Attacker::Kal), 55.295, 55.305);
    const auto k = metropolis_sample(kal, 2000, 4, ChainSettings{.chains = 2, .burn_in = 200});
    for (const auto& v : k.column("o")) {
        CHECK(v.as_real() >= 55.295);
        CHECK(v.as_real() < 55.305);
    }
}

TEST_CASE("metropolis output does not depend on threading") {
    const auto model = fixtures::noisy_channel();
    ChainSettings par{.chains = 3, .burn_in = 50};
    ChainSettings ser = par;
    ser.parallel = false;
    const auto a = metropolis_sample(model, 300, 12, par);
    const auto b = metropolis_sample(model, 300, 12, ser);
    CHECK(a.columns == b.columns);
    CHECK(a.chain_ids == b.chain_ids);
    CHECK_THROWS_AS(metropolis_sample(model, 301, 12, par), InferenceError);
}

TEST_CASE("identical inputs give identical sample sets") {
    const auto model = fixtures::coins_majority();
    CHECK(importance_sample(model, 500, 7).columns == importance_sample(model, 500, 7).columns);
    CHECK(rejection_sample(model, 500, 7).columns == rejection_sample(model, 500, 7).columns);
    CHECK(sample_prior(model, 500, 7).columns != sample_prior(model, 500, 8).columns);
}

TEST_CASE("exact enumeration examples") {
    const auto d = enumerate_exact(fixtures::pair_average());
    CHECK(std::abs(d.total() - 1.0) < 1e-12);

    ModelBuilder b;
    const auto x = b.stochastic(DistSpec::bernoulli(0.5), {.name = "x"});
    const auto y = b.stochastic(DistSpec::bernoulli(0.5), {.name = "y"});
    const auto a = b.derived([](std::span<const Value> v) { return Value::boolean(v[0].as_bool() && v[1].as_bool()); },
                             {x, y}, {.name = "and", .kind = ValueKind::Bool});
    b.query("and", a);
    const auto e = enumerate_exact(b.finalize());
    CHECK(e.pmf("and").at(Value::boolean(true)) == 0.25);
    CHECK(e.pmf("and").at(Value::boolean(false)) == 0.75);

    try {
        enumerate_exact(impossible());
        FAIL("expected impossible evidence");
    } catch (const InferenceError& err) {
        CHECK(std::string(err.what()).find("impossible evidence") != std::string::npos);
    }
    try {
        enumerate_exact(build_agg(Attacker::Kal));
        FAIL("expected a non-enumerable model");
    } catch (const InferenceError& err) {
        CHECK(std::string(err.what()).find("not enumerable") != std::string::npos);
    }
}

TEST_CASE("exact conditioning equals filtering the prior") {
    const auto model = fixtures::dice_at_least_five();
    const auto post = enumerate_exact(model);
    ModelBuilder b;
    const auto x = b.stochastic(DistSpec::uniform_discrete(ints(1, 4)), {.name = "x"});
    const auto y = b.stochastic(DistSpec::uniform_discrete(ints(1, 4)), {.name = "y"});
    b.query("x", x).query("y", y);
    const auto joint = enumerate_exact(b.finalize());
    std::map<Value, double> filtered;
    double kept = 0.0;
    for (const auto& [k, p] : joint.outcomes) {
        if (k[0].as_int() + k[1].as_int() < 5) continue;
        filtered[k[0]] += p;
        kept += p;
    }
    for (const auto& [v, p] : post.pmf("x")) CHECK(std::abs(p - filtered[v] / kept) < 1e-12);
    CHECK(std::abs(post.total() - 1.0) < 1e-12);
}

TEST_CASE("forward sampling matches enumeration") {
    const auto model = uniform_pair_sum(3);
    const std::size_t n = 10000;
    const auto s = sample_prior(model, n, 21);
    CHECK(fixtures::total_variation(fixtures::joint_pmf(s), enumerate_exact(model).outcomes) < 3.0 / std::sqrt(n));
}

TEST_CASE("systematic resampling of importance output") {
    const auto model = fixtures::coins_majority();
    const auto w = importance_sample(model, 20000, 3);
    const auto r = resample_systematic(w, 10000, 4);
    CHECK(r.size() == 10000);
    CHECK_FALSE(r.is_weighted());
    CHECK(fixtures::total_variation(fixtures::joint_pmf(r), enumerate_exact(model).outcomes) < 0.02);
}

TEST_CASE("csv export of an exact distribution carries probabilities as weights") {
    const auto d = enumerate_exact(fixtures::dependent_binomial());
    const auto s = d.to_sample_set();
    CHECK(s.size() == 3);
    CHECK(s.total_weight() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.method == Method::Exact);
}
