// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers as
// arguments to run a subset.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "leakscope/estimators.hpp"
#include "leakscope/inference.hpp"
#include "leakscope/pipeline.hpp"
#include "leakscope/scenarios.hpp"

using namespace leakscope;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const char* fmt, ...) __attribute__((format(printf, 3, 4)));
};

void Outcome::require(bool ok, const char* fmt, ...) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    if (!detail.empty()) detail += "; ";
    detail += buf;
    if (!ok) {
        detail += " [x]";
        pass = false;
    }
}

bool lt18(const Value& v) { return v.as_real() < 18.0; }

GenerativeModel kal_post() { return observe_output(build_agg(Attacker::Kal), 55.295, 55.305); }
GenerativeModel kab_post() { return observe_output(build_agg(Attacker::Kab), 55.295, 55.305); }

// ------------------------------------------------------------ criteria

Outcome pair_average_oracle() {
    Outcome out;
    const auto d = enumerate_exact(fixtures::pair_average());
    const double p = d.pmf("sum").at(Value::integer(2));
    out.require(std::abs(p - 1.0 / 3.0) <= 1e-12, "P(x+y=2) = %.15f", p);
    const double mean_one = d.pmf("o").at(Value::real(1.0));
    out.require(std::abs(mean_one - 1.0 / 3.0) <= 1e-12, "P((x+y)/2=1) = %.15f", mean_one);
    return out;
}

Outcome kal_posterior() {
    Outcome out;
    const auto s = metropolis_sample(kal_post(), 10000, 1);
    const auto [mean, sd] = summary_stats(s, "a");
    const double p = probability_query(s, "a", lt18).value;
    out.require(std::abs(mean.value - 55.60) <= 0.02, "E[a] = %.4f", mean.value);
    out.require(sd.value <= 0.02, "std[a] = %.4f", sd.value);
    out.require(p == 0.0, "P(a<18) = %g", p);
    return out;
}

Outcome prior_statistics() {
    Outcome out;
    const auto s = sample_prior(build_agg(Attacker::Kal), 10000, 1);
    const auto [mean, sd] = summary_stats(s, "a");
    const double h = entropy(s, "a").value;
    out.require(std::abs(mean.value - 50.0) <= 1.0, "E[a] = %.3f", mean.value);
    out.require(std::abs(sd.value - 28.87) <= 1.0, "sigma[a] = %.3f", sd.value);
    out.require(std::abs(h - 6.64) <= 0.15, "H(a) = %.4f bits", h);
    return out;
}

Outcome attacker_ordering() {
    Outcome out;
    const auto kal = kal_post();
    const auto kab = kab_post();
    const auto prior_model = build_agg(Attacker::Kal);
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto prior = sample_prior(prior_model, 10000, seed + 100);
        const auto pk = rejection_sample(kal, 10000, seed);
        const auto pb = rejection_sample(kab, 10000, seed);
        const double kl_kal = kl_divergence(pk, "a", prior, "a").value;
        const double kl_kab = kl_divergence(pb, "a", prior, "a").value;
        const double sd_kal = summary_stats(pk, "a").second.value;
        const double sd_kab = summary_stats(pb, "a").second.value;
        const double mi_kal = mutual_information(pk, "a", "o").value;
        const double mi_kab = mutual_information(pb, "a", "o").value;
        const double p_kab = probability_query(pb, "a", lt18).value;
        const double p_prior = probability_query(prior, "a", lt18).value;
        out.require(kl_kal - kl_kab >= 4.0, "seed %llu: KL %.2f vs %.2f", static_cast<unsigned long long>(seed), kl_kal,
                    kl_kab);
        out.require(sd_kal < 0.1 * sd_kab, "sigma %.4f vs %.2f", sd_kal, sd_kab);
        out.require(mi_kal - mi_kab >= 2.0, "MI %.2f vs %.3f", mi_kal, mi_kab);
        out.require(p_kab < 0.05 && 0.05 < p_prior, "P(a<18) kab %.4f, prior %.3f", p_kab, p_prior);
    }
    return out;
}

double sweep_error_at(const RunSpec& spec, std::size_t n) {
    const std::vector<std::size_t> grid{500, 1000, 2000, 5000, 10000};
    const auto rows = sweep(spec, grid, 5);
    for (const auto& r : rows)
        if (r.n == n) return r.mean_abs_err;
    return INFINITY;
}

Outcome continuous_convergence() {
    Outcome out;
    for (const auto [ss, sp] : {std::pair{8.0, 1.0}, std::pair{20.0, 20.0}}) {
        RunSpec spec;
        spec.scenario = "syn-cont";
        spec.method = Method::Metropolis;
        spec.sigma_s = ss;
        spec.sigma_p = sp;
        spec.measures = {"P(o<55)"};
        const double oracle = oracle_for(spec, parse_measure_request("P(o<55)")).value();
        const double err = sweep_error_at(spec, 5000);
        out.require(err < 0.01, "(%g,%g) oracle %.4f, error at 5000 = %.4f", ss, sp, oracle, err);
    }
    return out;
}

Outcome discrete_convergence() {
    Outcome out;
    for (const std::int64_t n : {100, 1000}) {
        RunSpec spec;
        spec.scenario = "syn-disc";
        spec.method = Method::Metropolis;
        spec.n = n;
        spec.measures = {"P(o=" + std::to_string(n) + ")"};
        const double err = sweep_error_at(spec, 5000);
        out.require(err < 0.01, "n=%lld error at 5000 = %.4f", static_cast<long long>(n), err);
    }
    return out;
}

// Independent brute-force measures over an outcome table.
double brute_entropy(const std::map<Value, double>& p) {
    double h = 0.0;
    for (const auto& [v, q] : p)
        if (q > 0) h -= q * std::log2(q);
    return h;
}

Outcome estimator_oracles() {
    Outcome out;
    {
        ModelBuilder b;
        const auto x = b.stochastic(DistSpec::normal(0.0, 1.0), {.name = "x"});
        const auto y = b.stochastic(DistSpec::normal(1.0, 1.0), {.name = "y"});
        b.query("x", x).query("y", y);
        const auto s = sample_prior(b.finalize(), 10000, 7);
        const auto t = sample_prior(b.finalize(), 10000, 8);
        const double kl = kl_divergence(s, "x", t, "y").value;
        out.require(std::abs(kl - 0.7213) <= 0.08, "KL(N0||N1) = %.4f", kl);
    }
    double worst = 0.0;
    for (const auto& model : {fixtures::noisy_channel(), fixtures::coins_majority(), fixtures::dependent_binomial()}) {
        const auto d = enumerate_exact(model);
        const auto weighted = d.to_sample_set();
        const auto& names = d.names;
        for (const auto& name : names) {
            const double brute = brute_entropy(d.pmf(name));
            worst = std::max(worst, std::abs(entropy(d, name).value - brute));
            worst = std::max(worst, std::abs(entropy(weighted, name, EstimatorMode::Discrete).value - brute));
        }
        if (names.size() >= 2) {
            // MI from the joint and marginals, by hand.
            std::map<std::pair<Value, Value>, double> joint;
            for (const auto& [k, p] : d.outcomes) joint[{k[0], k[1]}] += p;
            const auto px = d.pmf(names[0]), py = d.pmf(names[1]);
            double mi = 0.0;
            for (const auto& [k, p] : joint)
                if (p > 0) mi += p * std::log2(p / (px.at(k.first) * py.at(k.second)));
            worst = std::max(worst, std::abs(mutual_information(d, names[0], names[1]).value - mi));
            worst = std::max(worst, std::abs(mutual_information(weighted, names[0], names[1]).value - mi));
        }
        // KL of the posterior against the prior.
        const auto prior = enumerate_exact(model.without_observations());
        const auto pp = d.pmf(names[0]), pq = prior.pmf(names[0]);
        double kl = 0.0;
        for (const auto& [v, p] : pp)
            if (p > 0) kl += p * std::log2(p / pq.at(v));
        worst = std::max(worst, std::abs(kl_divergence(d, names[0], prior, names[0]).value - kl));
    }
    out.require(worst <= 1e-9, "plug-in vs exact max deviation %.2e", worst);

    // Explicit joint tables with dyadic entries, so both sums are exact.
    const std::vector<std::vector<std::vector<int>>> tables{
        {{6, 2}, {3, 5}}, {{1, 1, 2}, {4, 0, 8}}, {{3, 3}, {3, 3}, {2, 2}}, {{0, 16}, {16, 0}}};
    bool exact = true;
    for (const auto& t : tables) {
        double total = 0;
        for (const auto& r : t)
            for (int c : r) total += c;
        JointPmf joint;
        for (std::size_t s = 0; s < t.size(); ++s)
            for (std::size_t o = 0; o < t[s].size(); ++o)
                joint[{Value::integer(static_cast<std::int64_t>(s)), Value::integer(static_cast<std::int64_t>(o))}] =
                    t[s][o] / total;
        double success = 0.0;
        for (std::size_t o = 0; o < t[0].size(); ++o) {
            double best = 0.0;
            for (std::size_t s = 0; s < t.size(); ++s) best = std::max(best, t[s][o] / total);
            success += best;
        }
        exact = exact && bayes_risk_table(joint) == 1.0 - success;
    }
    out.require(exact, "Bayes risk equals brute-force max-marginalisation on %zu tables", tables.size());
    return out;
}

Outcome dp_scenario() {
    Outcome out;
    const std::vector<double> eps{0.1, 0.5, 1.0, 1.5, 2.0};
    const ScenarioConfig cfg = ScenarioConfig::defaults();
    std::vector<double> kl(eps.size(), 0.0), mi(eps.size(), 0.0);
    for (std::size_t e = 0; e < eps.size(); ++e) {
        DPConfig dp;
        dp.epsilon = eps[e];
        const auto model = build_dp_agg(cfg, dp);
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const auto s = sample_prior(model, 10000, seed);
            kl[e] += kl_divergence(s, "o", s, "ro").value / 5.0;
            for (int i = 1; i <= kDpUnknown; ++i)
                mi[e] += mutual_information(s, "s_" + std::to_string(i), "o").value / (5.0 * kDpUnknown);
        }
    }
    std::string kl_text, mi_text;
    bool kl_dec = true, mi_inc = true;
    for (std::size_t e = 0; e < eps.size(); ++e) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%s%.3f", e ? " " : "", kl[e]);
        kl_text += buf;
        std::snprintf(buf, sizeof buf, "%s%.4f", e ? " " : "", mi[e]);
        mi_text += buf;
        if (e > 0) {
            kl_dec = kl_dec && kl[e] < kl[e - 1];
            mi_inc = mi_inc && mi[e] >= mi[e - 1];
        }
    }
    out.require(kl_dec, "KL(o||ro) over eps: %s", kl_text.c_str());
    out.require(mi_inc, "MI(s_i;o) over eps: %s", mi_text.c_str());

    DPConfig dp;
    dp.epsilon = 0.5;
    const auto post = rejection_sample(build_dp_agg(cfg, dp).observe(build_dp_agg(cfg, dp).query_node("o"),
                                                                     Observation::interval(84.5, 85.5)),
                                       10000, 1);
    double worst_tv = 1.0;
    for (int i = 1; i <= kDpUnknown; ++i) {
        const auto xs = to_doubles(post.column("s_" + std::to_string(i)));
        // Ten equal bins over the prior support; the prior puts 0.1 in each.
        std::vector<double> bins(10, 0.0);
        for (double x : xs) bins[std::min<std::size_t>(9, static_cast<std::size_t>((x - 10.0) / 19.0))] += 1.0;
        double tv = 0.0;
        for (double b : bins) tv += std::abs(b / static_cast<double>(xs.size()) - 0.1);
        worst_tv = std::min(worst_tv, tv / 2.0);
    }
    out.require(worst_tv > 0.02, "min over s_i of TV(post, prior) = %.4f", worst_tv);
    return out;
}

Outcome naive_anonymization() {
    Outcome out;
    const auto cfg = ScenarioConfig::defaults();
    const auto s = sample_prior(build_ano_prior(cfg), 10000, 1);
    double worst = 0.0;
    std::string text;
    for (const auto& attrs : all_attr_sets()) {
        const double est = positive_disclosure(s, attrs).value;
        const double orc = oracle::positive_disclosure(cfg.dataset_size, cfg.ill_prob, oracle::attr_match_prob(cfg, attrs));
        worst = std::max(worst, std::abs(est - orc));
        char buf[96];
        std::snprintf(buf, sizeof buf, "%s%s %.4f/%.4f", text.empty() ? "" : ", ", attrs_name(attrs).c_str(), est, orc);
        text += buf;
    }
    out.require(worst <= 0.03, "estimate/oracle: %s; max gap %.4f", text.c_str(), worst);
    const double zip = positive_disclosure(s, {Attr::Zip}).value;
    out.require(std::abs(zip - 0.0184) <= 0.03, "zip %.4f", zip);
    const double all = positive_disclosure(s, {Attr::Zip, Attr::Day, Attr::Sex}).value;
    out.require(all >= 0.95, "zip+day+sex %.4f", all);
    return out;
}

Outcome k_anonymity() {
    Outcome out;
    auto cfg = ScenarioConfig::defaults();
    cfg.dataset_size = 500;
    cfg.k = 2;
    const auto s = sample_prior(build_k_ano(cfg), 10000, 1);
    std::size_t verified = 0, sex_masked = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        verified += is_k_anonymous(s.column("output")[i], 2);
        sex_masked += s.column("masked")[i][2].as_bool();
    }
    out.require(verified == s.size(), "%zu/%zu outputs k-anonymous", verified, s.size());
    double worst = 0.0;
    for (const auto& attrs : all_attr_sets()) worst = std::max(worst, positive_disclosure(s, attrs).value);
    out.require(worst == 0.0, "max positive disclosure %.4f", worst);
    const double rate = static_cast<double>(sex_masked) / static_cast<double>(s.size());
    out.require(rate < 0.10, "sex-mask rate %.4f", rate);
    return out;
}

Outcome engine_agreement() {
    Outcome out;
    const std::vector<std::pair<const char*, GenerativeModel>> models{
        {"dice", fixtures::dice_at_least_five()},
        {"coins", fixtures::coins_majority()},
        {"array", fixtures::array_one_head()},
        {"binomial", fixtures::dependent_binomial()},
        {"channel", fixtures::noisy_channel().select_queries({"s"})}};
    for (const auto& [name, model] : models) {
        const auto exact = enumerate_exact(model).outcomes;
        const double r = fixtures::total_variation(fixtures::joint_pmf(rejection_sample(model, 10000, 1)), exact);
        const double i = fixtures::total_variation(fixtures::joint_pmf(importance_sample(model, 10000, 1)), exact);
        const double m = fixtures::total_variation(fixtures::joint_pmf(metropolis_sample(model, 10000, 1)), exact);
        out.require(r < 0.02 && i < 0.02 && m < 0.02, "%s TV rej %.4f imp %.4f mh %.4f", name, r, i, m);
    }
    return out;
}

Outcome sampler_overhead() {
    Outcome out;
    RunSpec spec;
    spec.scenario = "syn-complex";
    spec.samples = 1000;
    spec.c = 2;
    const auto rows = bench(spec, {1000});
    const double total = rows[0].seconds;
    const double payload = rows[0].payload_seconds.value() * static_cast<double>(spec.samples);
    out.require(total <= 2.0 * payload, "sampling %.3fs vs payload %.3fs (ratio %.2f)", total, payload, total / payload);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"exact enumeration of the pair-average example", pair_average_oracle},
        {"kal posterior statistics", kal_posterior},
        {"prior statistics of Alice's age", prior_statistics},
        {"kal versus kab ordering", attacker_ordering},
        {"continuous convergence sweep", continuous_convergence},
        {"discrete convergence sweep", discrete_convergence},
        {"estimator oracles", estimator_oracles},
        {"differential privacy trade-off", dp_scenario},
        {"naive anonymization disclosure", naive_anonymization},
        {"k-anonymity release", k_anonymity},
        {"engine agreement on finite models", engine_agreement},
        {"sampler overhead", sampler_overhead},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && !only.count(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s criterion %2d (%s): %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first,
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
