#include "leakscope/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "leakscope/errors.hpp"
#include "leakscope/inference.hpp"

namespace leakscope {

namespace {

const Value& masked_symbol() {
    static const Value v = Value::symbol(kMasked);
    return v;
}

const Value& ill_symbol() {
    static const Value v = Value::symbol("Ill");
    return v;
}

const Value& healthy_symbol() {
    static const Value v = Value::symbol("Healthy");
    return v;
}

const std::vector<std::string>& sexes() {
    static const std::vector<std::string> s{"M", "F"};
    return s;
}

double mean_of(std::span<const Value> xs) {
    if (xs.empty()) throw DomainError("mean of an empty table");
    double s = 0.0;
    for (const auto& x : xs) s += x.to_double();
    return s / static_cast<double>(xs.size());
}

}  // namespace

// ------------------------------------------------------------ ScenarioConfig

std::vector<std::string> ScenarioConfig::generated(std::string_view prefix, std::size_t count) {
    std::vector<std::string> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(std::string(prefix) + std::to_string(i));
    return out;
}

ScenarioConfig ScenarioConfig::defaults() {
    ScenarioConfig c;
    c.names = generated("name", 5000);
    c.zips = generated("zip", 200);
    c.days = generated("day", 82);
    return c;
}

void ScenarioConfig::validate() const {
    if (dataset_size < 1) throw ModelError("dataset size must be positive");
    if (names.empty() || zips.empty() || days.empty()) throw ModelError("attribute supports must be nonempty");
    if (!(ill_prob > 0.0 && ill_prob < 1.0)) throw ModelError("ill probability must lie in (0, 1)");
    if (k < 2) throw ModelError("k must be at least 2");
    if (!(income_bounds.first < income_bounds.second)) throw ModelError("income bounds need lo < hi");
}

// ----------------------------------------------------------------------- agg

GenerativeModel build_agg(Attacker attacker, const ScenarioConfig& cfg) {
    if (cfg.names.empty()) throw ModelError("name support must be nonempty");
    const auto names = symbol_items(cfg.names);
    const bool kal = attacker == Attacker::Kal;
    const DistSpec other_age = DistSpec::normal(55.2, std::sqrt(3.5));
    ModelBuilder b;
    const NodeId a = b.stochastic(DistSpec::uniform(0.0, 100.0), {.name = "a"});
    const NodeId size =
        kal ? b.constant(Value::integer(4), {.name = "size"}) : b.stochastic(DistSpec::binomial(300, 0.3), {.name = "size"});
    const NodeId name_col = b.array_of(
        size,
        [&](ElementScope& s, std::int64_t i) {
            return i == 0 ? s.constant(Value::symbol("Alice"), "name") : s.stochastic(DistSpec::uniform_discrete(names), "name");
        },
        {.name = "names"});
    const NodeId age_col = b.array_of(
        size,
        [&](ElementScope& s, std::int64_t i) {
            if (i == 0) return s.outer(a);
            // The second listing parameter is a variance, so sigma = sqrt(3.5).
            return kal ? s.constant(Value::real(55.2), "age") : s.stochastic(other_age, "age");
        },
        {.name = "ages"});
    b.derived(
        [](std::span<const Value> xs) {
            const auto ns = xs[0].items();
            const auto as = xs[1].items();
            std::vector<Value> rows;
            rows.reserve(ns.size());
            for (std::size_t i = 0; i < ns.size(); ++i) rows.push_back(Value::tuple({ns[i], as[i]}));
            return Value::list(std::move(rows));
        },
        {name_col, age_col}, {.name = "records", .kind = ValueKind::List});
    const NodeId o = b.derived([](std::span<const Value> xs) { return Value::real(mean_of(xs[0].items())); },
                               {age_col}, {.name = "o", .kind = ValueKind::Real});
    b.query("a", a).query("o", o);
    return b.finalize();
}

GenerativeModel observe_output(const GenerativeModel& model, double lo, double hi) {
    return model.observe(model.query_node("o"), Observation::interval(lo, hi));
}

// -------------------------------------------------------------------- dp-agg

GenerativeModel build_dp_agg(const ScenarioConfig& cfg, const DPConfig& dp) {
    if (!(dp.epsilon > 0.0) || !std::isfinite(dp.epsilon)) throw ModelError("epsilon must be positive");
    const double total = kDpKnown + kDpUnknown;
    const double delta = dp.sensitivity ? *dp.sensitivity : dp.max_income / total;
    if (!(delta > 0.0)) throw ModelError("sensitivity must be positive");
    const auto [lo, hi] = cfg.income_bounds;

    ModelBuilder b;
    std::vector<NodeId> unknown;
    for (int i = 1; i <= kDpUnknown; ++i)
        unknown.push_back(b.stochastic(DistSpec::uniform(10.0, dp.max_income), {.name = "s_" + std::to_string(i)}));
    const NodeId count = b.constant(Value::integer(kDpKnown), {.name = "known_count"});
    const DistSpec known_dist = DistSpec::uniform(lo, hi);
    const NodeId known =
        b.array_of(count, [&](ElementScope& s, std::int64_t) { return s.stochastic(known_dist, "income"); },
                   {.name = "known"});
    std::vector<NodeId> parents = unknown;
    parents.push_back(known);
    const NodeId ro = b.derived(
        [total](std::span<const Value> xs) {
            double s = 0.0;
            for (std::size_t i = 0; i + 1 < xs.size(); ++i) s += xs[i].as_real();
            for (const auto& v : xs.back().items()) s += v.as_real();
            return Value::real(s / total);
        },
        parents, {.name = "ro", .kind = ValueKind::Real});
    const NodeId x = b.stochastic(DistSpec::exponential(dp.epsilon / delta), {.name = "X"});
    const NodeId y = b.stochastic(DistSpec::bernoulli(0.5), {.name = "Y"});
    const NodeId lap = b.derived(
        [](std::span<const Value> xs) { return Value::real(xs[1].as_bool() ? -xs[0].as_real() : xs[0].as_real()); },
        {x, y}, {.name = "lap", .kind = ValueKind::Real});
    const NodeId o = b.derived([](std::span<const Value> xs) { return Value::real(xs[0].as_real() + xs[1].as_real()); },
                               {ro, lap}, {.name = "o", .kind = ValueKind::Real});
    for (int i = 0; i < kDpUnknown; ++i) b.query("s_" + std::to_string(i + 1), unknown[static_cast<std::size_t>(i)]);
    b.query("ro", ro).query("lap", lap).query("o", o);
    return b.finalize();
}

// ----------------------------------------------------------------------- ano

AttrSet parse_attrs(std::string_view text) {
    AttrSet out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('+', pos), text.size());
        const std::string_view part = text.substr(pos, end - pos);
        Attr a;
        if (part == "zip") a = Attr::Zip;
        else if (part == "day") a = Attr::Day;
        else if (part == "sex") a = Attr::Sex;
        else throw std::invalid_argument("unknown attribute '" + std::string(part) + "' (use zip, day, sex)");
        if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
        pos = end + 1;
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string attrs_name(const AttrSet& attrs) {
    static const char* names[] = {"zip", "day", "sex"};
    std::string out;
    for (auto a : attrs) {
        if (!out.empty()) out += '+';
        out += names[static_cast<int>(a)];
    }
    return out;
}

std::vector<AttrSet> all_attr_sets() {
    std::vector<AttrSet> out;
    for (int mask = 1; mask < 8; ++mask) {
        AttrSet s;
        for (int a = 0; a < 3; ++a)
            if (mask & (1 << a)) s.push_back(static_cast<Attr>(a));
        out.push_back(s);
    }
    return out;
}

GenerativeModel build_ano_prior(const ScenarioConfig& cfg) {
    cfg.validate();
    const auto names = DistSpec::uniform_discrete(symbol_items(cfg.names));
    const auto zips = DistSpec::uniform_discrete(symbol_items(cfg.zips));
    const auto days = DistSpec::uniform_discrete(symbol_items(cfg.days));
    const auto sex = DistSpec::uniform_discrete(symbol_items(sexes()));
    const auto ill = DistSpec::bernoulli(cfg.ill_prob);
    const Value governor = Value::tuple({Value::symbol(cfg.names[0]), Value::symbol(cfg.zips[0]),
                                         Value::symbol(cfg.days[0]), Value::symbol(sexes()[0]), ill_symbol()});

    ModelBuilder b;
    const NodeId size = b.constant(Value::integer(cfg.dataset_size), {.name = "size"});
    const NodeId input = b.array_of(
        size,
        [&](ElementScope& s, std::int64_t i) {
            if (i == 0) return s.constant(governor, "record");
            auto n = s.stochastic(names, "name");
            auto z = s.stochastic(zips, "zip");
            auto d = s.stochastic(days, "day");
            auto x = s.stochastic(sex, "sex");
            auto f = s.stochastic(ill, "flip");
            auto diag = s.derived(
                [](std::span<const Value> v) { return v[0].as_bool() ? ill_symbol() : healthy_symbol(); }, {f},
                "diag");
            return s.tuple({n, z, d, x, diag}, "record");
        },
        {.name = "input"});
    const NodeId output = b.derived(
        [](std::span<const Value> xs) {
            const auto rows = xs[0].items();
            std::vector<Value> out;
            out.reserve(rows.size());
            for (const auto& r : rows) {
                const auto f = r.items();
                out.push_back(Value::tuple({f[1], f[2], f[3], f[4]}));
            }
            return Value::list(std::move(out));
        },
        {input}, {.name = "output", .kind = ValueKind::List});
    b.query("input", input).query("output", output);
    return b.finalize();
}

namespace {

bool compatible(const Value& a, const Value& b) { return a == b || a == masked_symbol() || b == masked_symbol(); }

}  // namespace

std::int64_t governor_matches(const Value& output, const AttrSet& attrs) {
    const auto rows = output.items();
    if (rows.empty()) return 0;
    const Value& gov = rows[0];
    std::int64_t count = 0;
    for (const auto& r : rows) {
        bool ok = true;
        for (auto a : attrs) {
            const auto i = static_cast<std::size_t>(a);
            if (!compatible(r[i], gov[i])) {
                ok = false;
                break;
            }
        }
        count += ok;
    }
    return count;
}

bool governor_disclosed(const Value& output, const AttrSet& attrs) {
    const auto rows = output.items();
    if (rows.empty()) return false;
    const Value& gov = rows[0];
    bool any = false;
    for (const auto& r : rows) {
        bool match = true;
        for (auto a : attrs) {
            const auto i = static_cast<std::size_t>(a);
            if (!compatible(r[i], gov[i])) {
                match = false;
                break;
            }
        }
        if (!match) continue;
        if (r[3] != ill_symbol()) return false;
        any = true;
    }
    return any;
}

std::map<std::int64_t, double> quasi_identifier_counts(const SampleSet& s, const AttrSet& attrs,
                                                       std::string_view column) {
    if (attrs.empty()) throw EstimationError("quasi-identifier needs at least one attribute");
    const auto& col = s.column(column);
    std::map<std::int64_t, double> pmf;
    double total = 0.0;
    for (std::size_t i = 0; i < col.size(); ++i) {
        const double w = s.weights ? (*s.weights)[i] : 1.0;
        if (w == 0.0) continue;
        pmf[governor_matches(col[i], attrs)] += w;
        total += w;
    }
    if (!(total > 0.0)) throw EstimationError("no rows with positive weight");
    for (auto& [k, p] : pmf) p /= total;
    return pmf;
}

EstimatorResult positive_disclosure(const SampleSet& s, const AttrSet& attrs, std::string_view column) {
    if (attrs.empty()) throw EstimationError("positive disclosure needs at least one attribute");
    auto r = probability_query(s, column, [&](const Value& v) { return governor_disclosed(v, attrs); });
    r.estimator = "positive-disclosure:" + attrs_name(attrs);
    return r;
}

std::map<std::int64_t, double> conditional_diagnosis(const ScenarioConfig& cfg, std::int64_t given_count,
                                                     std::size_t samples, std::uint64_t seed) {
    if (given_count < 1) throw ModelError("given count must be at least 1");
    const GenerativeModel prior = build_ano_prior(cfg);
    ModelBuilder b = prior.extend();
    const NodeId output = prior.query_node("output");
    const AttrSet zip{Attr::Zip};
    const NodeId count = b.derived(
        [zip](std::span<const Value> xs) { return Value::integer(governor_matches(xs[0], zip)); }, {output},
        {.name = "zip_count", .kind = ValueKind::Int});
    const NodeId ill = b.derived(
        [](std::span<const Value> xs) {
            const auto rows = xs[0].items();
            std::int64_t n = 0;
            for (const auto& r : rows)
                if (r[0] == rows[0][0] && r[3] == ill_symbol()) ++n;
            return Value::integer(n);
        },
        {output}, {.name = "zip_ill", .kind = ValueKind::Int});
    b.clear_queries().query("ill", ill).observe(count, Observation::equals(Value::integer(given_count)));
    const SampleSet s = rejection_sample(b.finalize(), samples, seed);
    std::map<std::int64_t, double> pmf;
    for (const auto& [v, p] : empirical_pmf(s.column("ill"), nullptr)) pmf[v.as_int()] = p;
    return pmf;
}

// ----------------------------------------------------------------- k-ano

namespace {

using Projection = std::array<std::uint32_t, 3>;
constexpr std::uint32_t kHidden = 0xffffffffu;

std::size_t violations(const std::vector<Projection>& rows, const std::array<bool, 3>& masked, int k) {
    std::vector<Projection> keys;
    keys.reserve(rows.size());
    for (const auto& r : rows) {
        Projection p = r;
        for (int c = 0; c < 3; ++c)
            if (masked[static_cast<std::size_t>(c)]) p[static_cast<std::size_t>(c)] = kHidden;
        keys.push_back(p);
    }
    std::sort(keys.begin(), keys.end());
    std::size_t bad = 0;
    for (std::size_t i = 0; i < keys.size();) {
        std::size_t j = i;
        while (j < keys.size() && keys[j] == keys[i]) ++j;
        if (j - i < static_cast<std::size_t>(k)) bad += j - i;
        i = j;
    }
    return bad;
}

}  // namespace

KAnonymized k_anonymize(const Value& input, int k) {
    if (k < 2) throw ModelError("k must be at least 2");
    const auto rows = input.items();
    std::vector<Projection> proj;
    proj.reserve(rows.size());
    for (const auto& r : rows)
        proj.push_back({r[1].as_symbol().id(), r[2].as_symbol().id(), r[3].as_symbol().id()});

    KAnonymized out;
    std::size_t current = violations(proj, out.masked, k);
    while (current > 0) {
        int best = -1;
        std::size_t best_v = 0;
        for (int c = 0; c < 3; ++c) {
            if (out.masked[static_cast<std::size_t>(c)]) continue;
            auto trial = out.masked;
            trial[static_cast<std::size_t>(c)] = true;
            const std::size_t v = violations(proj, trial, k);
            if (best < 0 || v < best_v) {
                best = c;
                best_v = v;
            }
        }
        if (best < 0) break;  // everything suppressed; fewer than k rows in total
        out.masked[static_cast<std::size_t>(best)] = true;
        current = best_v;
    }

    std::vector<Value> released;
    released.reserve(rows.size());
    for (const auto& r : rows) {
        released.push_back(Value::tuple({out.masked[0] ? masked_symbol() : r[1], out.masked[1] ? masked_symbol() : r[2],
                                         out.masked[2] ? masked_symbol() : r[3], r[4]}));
    }
    out.output = Value::list(std::move(released));
    return out;
}

bool is_k_anonymous(const Value& output, int k) {
    std::map<std::vector<Value>, int> groups;
    const auto rows = output.items();
    for (const auto& r : rows) ++groups[{r[0], r[1], r[2]}];
    for (const auto& r : rows)
        if (groups[{r[0], r[1], r[2]}] < k) return false;
    return true;
}

GenerativeModel build_k_ano(const ScenarioConfig& cfg) {
    const GenerativeModel prior = build_ano_prior(cfg);
    ModelBuilder b = prior.extend();
    const int k = cfg.k;
    const NodeId anon = b.derived(
        [k](std::span<const Value> xs) {
            auto r = k_anonymize(xs[0], k);
            return Value::tuple({r.output, Value::tuple({Value::boolean(r.masked[0]), Value::boolean(r.masked[1]),
                                                         Value::boolean(r.masked[2])})});
        },
        {prior.query_node("input")}, {.name = "k_anonymized", .kind = ValueKind::Tuple});
    const NodeId out = b.derived([](std::span<const Value> xs) { return xs[0][0]; }, {anon},
                                 {.name = "k_output", .kind = ValueKind::List});
    const NodeId masked = b.derived([](std::span<const Value> xs) { return xs[0][1]; }, {anon},
                                    {.name = "masked", .kind = ValueKind::Tuple});
    b.clear_queries().query("input", prior.query_node("input")).query("output", out).query("masked", masked);
    return b.finalize();
}

// ------------------------------------------------------------- synthetic

namespace {

std::int64_t nest(const std::vector<std::int64_t>& arr, int depth, std::int64_t carry) {
    if (depth == 0) return carry;
    std::uint64_t s = 0;
    for (auto x : arr) s += static_cast<std::uint64_t>(nest(arr, depth - 1, carry + x));
    return static_cast<std::int64_t>(s);
}

}  // namespace

std::int64_t complexity_payload(const std::vector<std::int64_t>& arr, int c) {
    if (c < 1) throw DomainError("loop depth must be at least 1");
    return nest(arr, c, 0);
}

GenerativeModel build_synthetic(const SyntheticParams& p) {
    if (p.m < 0) throw ModelError("m must be nonnegative");
    ModelBuilder b;
    switch (p.kind) {
        case SyntheticParams::Kind::Continuous: {
            const NodeId s = b.stochastic(DistSpec::normal(42.0, p.sigma_s), {.name = "s"});
            const NodeId m = b.constant(Value::integer(p.m), {.name = "m"});
            const DistSpec pd = DistSpec::normal(55.0, p.sigma_p);
            const NodeId ps = b.array_of(m, [&](ElementScope& sc, std::int64_t) { return sc.stochastic(pd, "p"); },
                                         {.name = "p"});
            const NodeId o = b.derived(
                [](std::span<const Value> xs) {
                    double total = xs[0].as_real();
                    const auto items = xs[1].items();
                    for (const auto& v : items) total += v.as_real();
                    return Value::real(total / static_cast<double>(items.size() + 1));
                },
                {s, ps}, {.name = "o", .kind = ValueKind::Real});
            b.query("s", s).query("o", o);
            break;
        }
        case SyntheticParams::Kind::Discrete: {
            if (p.n < 0) throw ModelError("n must be nonnegative");
            const DistSpec u = DistSpec::uniform_discrete(int_range(0, p.n));
            const NodeId x = b.stochastic(u, {.name = "x"});
            const NodeId m = b.constant(Value::integer(p.m), {.name = "m"});
            const NodeId ys = b.array_of(m, [&](ElementScope& sc, std::int64_t) { return sc.stochastic(u, "y"); },
                                         {.name = "y"});
            const NodeId o = b.derived(
                [](std::span<const Value> xs) {
                    std::int64_t total = xs[0].as_int();
                    for (const auto& v : xs[1].items()) total += v.as_int();
                    return Value::integer(total);
                },
                {x, ys}, {.name = "o", .kind = ValueKind::Int});
            b.query("x", x).query("o", o);
            break;
        }
        case SyntheticParams::Kind::Complexity: {
            if (p.n < 0) throw ModelError("n must be nonnegative");
            if (p.c < 1) throw ModelError("c must be at least 1");
            const DistSpec u = DistSpec::uniform_discrete(int_range(0, p.n));
            const NodeId len = b.constant(Value::integer(p.m), {.name = "len"});
            const NodeId arr = b.array_of(len, [&](ElementScope& sc, std::int64_t) { return sc.stochastic(u, "v"); },
                                          {.name = "arr"});
            const int c = p.c;
            const NodeId o = b.derived(
                [c](std::span<const Value> xs) {
                    std::vector<std::int64_t> a;
                    a.reserve(xs[0].items().size());
                    for (const auto& v : xs[0].items()) a.push_back(v.as_int());
                    return Value::integer(complexity_payload(a, c));
                },
                {arr}, {.name = "o", .kind = ValueKind::Int});
            b.query("o", o);
            break;
        }
    }
    return b.finalize();
}

// ------------------------------------------------------------------ oracles

namespace oracle {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

std::pair<double, double> syn_cont_moments(std::int64_t m, double sigma_s, double sigma_p) {
    const double k = static_cast<double>(m) + 1.0;
    const double mu = (42.0 + 55.0 * static_cast<double>(m)) / k;
    const double sd = std::sqrt(sigma_s * sigma_s + static_cast<double>(m) * sigma_p * sigma_p) / k;
    return {mu, sd};
}

double syn_cont_prob_below(double t, std::int64_t m, double sigma_s, double sigma_p) {
    const auto [mu, sd] = syn_cont_moments(m, sigma_s, sigma_p);
    return normal_cdf((t - mu) / sd);
}

std::vector<double> syn_disc_pmf(std::int64_t m, std::int64_t n) {
    const double w = 1.0 / static_cast<double>(n + 1);
    std::vector<double> pmf(static_cast<std::size_t>(n + 1), w);
    for (std::int64_t t = 0; t < m; ++t) {
        // Convolve with uniform{0..n}: a sliding window sum.
        std::vector<double> next(pmf.size() + static_cast<std::size_t>(n), 0.0);
        double window = 0.0;
        for (std::size_t j = 0; j < next.size(); ++j) {
            if (j < pmf.size()) window += pmf[j];
            if (j >= static_cast<std::size_t>(n + 1)) window -= pmf[j - static_cast<std::size_t>(n + 1)];
            next[j] = window * w;
        }
        pmf = std::move(next);
    }
    return pmf;
}

double attr_match_prob(const ScenarioConfig& cfg, const AttrSet& attrs) {
    double p = 1.0;
    for (auto a : attrs) {
        switch (a) {
            case Attr::Zip: p /= static_cast<double>(cfg.zips.size()); break;
            case Attr::Day: p /= static_cast<double>(cfg.days.size()); break;
            case Attr::Sex: p /= 2.0; break;
        }
    }
    return p;
}

double binomial_pmf(std::int64_t n, double p, std::int64_t k) { return std::exp(binomial_log_pmf(n, p, k)); }

std::map<std::int64_t, double> qi_count_pmf(std::int64_t size, double p) {
    std::map<std::int64_t, double> out;
    for (std::int64_t k = 0; k < size; ++k) {
        const double q = binomial_pmf(size - 1, p, k);
        if (q > 0.0) out[k + 1] = q;
    }
    return out;
}

double positive_disclosure(std::int64_t size, double ill_prob, double p_attrs) {
    return std::pow(1.0 - (1.0 - ill_prob) * p_attrs, static_cast<double>(size - 1));
}

std::map<std::int64_t, double> conditional_diagnosis_pmf(std::int64_t given, double ill_prob) {
    std::map<std::int64_t, double> out;
    for (std::int64_t k = 0; k < given; ++k) out[k + 1] = binomial_pmf(given - 1, ill_prob, k);
    return out;
}

}  // namespace oracle

}  // namespace leakscope
