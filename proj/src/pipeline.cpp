#include "leakscope/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <tuple>

#include <json.hpp>

#include "leakscope/inference.hpp"
#include "leakscope/rng.hpp"
#include "leakscope/scenarios.hpp"

namespace leakscope {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return out;
}

/// true/false, then Int, then Real, otherwise a symbol.
Value parse_literal(std::string_view text) {
    const std::string t = trim(text);
    if (t.empty()) throw UsageError("empty value literal");
    if (t == "true") return Value::boolean(true);
    if (t == "false") return Value::boolean(false);
    std::int64_t i = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), i);
    if (ec == std::errc() && ptr == t.data() + t.size()) return Value::integer(i);
    char* end = nullptr;
    const double d = std::strtod(t.c_str(), &end);
    if (end == t.c_str() + t.size()) return Value::real(d);
    return Value::symbol(t);
}

std::pair<std::string, std::string> split_pair(std::string_view args, std::string_view sep, const std::string& text) {
    const auto pos = args.find(sep);
    if (pos == std::string_view::npos) throw UsageError("measure '" + text + "' needs two columns");
    std::string a = trim(args.substr(0, pos));
    std::string b = trim(args.substr(pos + sep.size()));
    if (a.empty() || b.empty()) throw UsageError("measure '" + text + "' has an empty column name");
    return {a, b};
}

bool is_numeric(const Value& v) { return v.is_real() || v.is_int(); }

bool compare(const Value& v, MeasureRequest::Op op, const Value& rhs) {
    using Op = MeasureRequest::Op;
    if (is_numeric(v) && is_numeric(rhs)) {
        const double a = v.to_double();
        const double b = rhs.to_double();
        switch (op) {
            case Op::Lt: return a < b;
            case Op::Le: return a <= b;
            case Op::Gt: return a > b;
            case Op::Ge: return a >= b;
            case Op::Eq: return a == b;
            case Op::Ne: return a != b;
        }
    }
    if (op == Op::Eq) return v == rhs;
    if (op == Op::Ne) return v != rhs;
    throw EstimationError("ordering comparison on non-numeric value " + v.to_string());
}

ScenarioConfig config_for(const RunSpec& spec) {
    ScenarioConfig cfg;
    cfg.names = ScenarioConfig::generated("name", spec.names);
    cfg.zips = ScenarioConfig::generated("zip", spec.zips);
    cfg.days = ScenarioConfig::generated("day", spec.days);
    cfg.ill_prob = spec.ill_prob;
    cfg.k = spec.k;
    cfg.samples = spec.samples;
    cfg.seed = spec.seed;
    if (spec.epsilon) cfg.epsilon = *spec.epsilon;
    if (spec.size) cfg.dataset_size = *spec.size;
    return cfg;
}

SyntheticParams synthetic_for(const RunSpec& spec) {
    SyntheticParams p;
    p.sigma_s = spec.sigma_s;
    p.sigma_p = spec.sigma_p;
    p.n = spec.n;
    p.c = spec.c;
    if (spec.scenario == "syn-cont") {
        p.kind = SyntheticParams::Kind::Continuous;
        p.m = spec.size.value_or(200);
    } else if (spec.scenario == "syn-disc") {
        p.kind = SyntheticParams::Kind::Discrete;
        p.m = spec.size.value_or(1);
    } else {
        p.kind = SyntheticParams::Kind::Complexity;
        p.m = spec.size.value_or(1000);
    }
    return p;
}

bool has_default_evidence(const std::string& scenario) { return scenario == "agg-kal" || scenario == "agg-kab"; }

/// Observation text in effect for the spec, or nullopt for none.
std::optional<std::string> effective_observe(const RunSpec& spec) {
    if (spec.observe) {
        if (trim(*spec.observe) == "none") return std::nullopt;
        return spec.observe;
    }
    if (has_default_evidence(spec.scenario)) return std::string("o:55.295:55.305");
    return std::nullopt;
}

void check_spec(const RunSpec& spec) {
    const auto& names = scenario_names();
    if (std::find(names.begin(), names.end(), spec.scenario) == names.end()) {
        std::string all;
        for (const auto& n : names) all += (all.empty() ? "" : ", ") + n;
        throw UsageError("unknown scenario '" + spec.scenario + "' (choose from " + all + ")");
    }
    if (spec.samples == 0) throw UsageError("samples must be positive");
    if (spec.chains < 1) throw UsageError("chains must be positive");
    if (spec.burn_in < 0) throw UsageError("burn-in must be nonnegative");
    if (spec.size && (spec.scenario == "agg-kal" || spec.scenario == "agg-kab" || spec.scenario == "dp-agg"))
        throw UsageError("scenario " + spec.scenario + " has no size parameter");
    if (spec.size && *spec.size < 0) throw UsageError("size must be nonnegative");
}

/// Evaluates measure requests against one sample set, sharing lazily drawn prior samples.
class Analyzer {
public:
    Analyzer(const GenerativeModel& model, const RunSpec& spec, const SampleSet& samples,
             const ExactDistribution* exact)
        : model_(model), spec_(spec), samples_(samples), exact_(exact) {}

    /// Scalar measures only.
    EstimatorResult scalar(const MeasureRequest& m) {
        using K = MeasureRequest::Kind;
        switch (m.kind) {
            case K::Probability: {
                auto pred = [&m](const Value& v) { return compare(v, m.op, m.rhs); };
                return exact_ ? probability_query(*exact_, m.column, pred) : probability_query(samples_, m.column, pred);
            }
            case K::Mean: return summary_stats(samples_, m.column).first;
            case K::Std: return summary_stats(samples_, m.column).second;
            case K::Entropy: return exact_ ? entropy(*exact_, m.column) : entropy(samples_, m.column);
            case K::Kl:
                if (!m.other.empty()) {
                    return exact_ ? kl_divergence(*exact_, m.column, *exact_, m.other)
                                  : kl_divergence(samples_, m.column, samples_, m.other);
                }
                if (exact_) return kl_divergence(*exact_, m.column, exact_prior(), m.column);
                return kl_divergence(samples_, m.column, prior_samples(), m.column);
            case K::Mi:
                return exact_ ? mutual_information(*exact_, m.column, m.other)
                              : mutual_information(samples_, m.column, m.other);
            case K::BayesRisk:
            case K::Vulnerability:
            case K::Leakage: {
                const BayesRisk r =
                    exact_ ? bayes_risk(*exact_, m.column, m.other) : bayes_risk(samples_, m.column, m.other);
                return m.kind == K::BayesRisk ? r.risk : m.kind == K::Vulnerability ? r.vulnerability : r.mult_leakage;
            }
            case K::Disclosure: return positive_disclosure(samples_, parse_attrs_or_usage(m.attrs), m.column);
            case K::Masked: {
                const AttrSet a = parse_attrs_or_usage(m.attrs);
                if (a.size() != 1) throw UsageError("masked(...) takes a single attribute");
                const auto idx = static_cast<std::size_t>(a[0]);
                auto r = probability_query(samples_, m.column, [idx](const Value& v) { return v[idx].as_bool(); });
                r.estimator = "masked-rate:" + attrs_name(a);
                return r;
            }
            default: throw UsageError("measure '" + m.text + "' is not a scalar");
        }
    }

    SeriesRow series(const MeasureRequest& m) {
        SeriesRow row;
        row.label = m.text;
        if (m.kind == MeasureRequest::Kind::QiCounts) {
            row.kind = "pmf";
            for (const auto& [k, p] : quasi_identifier_counts(samples_, parse_attrs_or_usage(m.attrs), m.column)) {
                row.x.push_back(static_cast<double>(k));
                row.y.push_back(p);
            }
            return row;
        }
        const auto kind = m.kind == MeasureRequest::Kind::Kde ? DensityKind::Kde : DensityKind::Histogram;
        const DensityEstimate d = density_estimate(samples_, m.column, kind);
        row.diagnostic = d.diagnostic;
        if (d.kde) {
            row.kind = "kde";
            row.x = d.kde->grid;
            row.y = d.kde->density;
            row.bandwidth = d.kde->bandwidth;
        } else if (d.histogram) {
            row.kind = "histogram";
            row.x = d.histogram->edges;
            row.y = d.histogram->density;
            row.counts = d.histogram->counts;
        }
        return row;
    }

private:
    static AttrSet parse_attrs_or_usage(const std::string& text) {
        try {
            return parse_attrs(text);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }

    const SampleSet& prior_samples() {
        if (!prior_) {
            // A separate stream keeps prior points from coinciding with posterior draws.
            prior_ = sample_prior(model_.without_observations(), spec_.samples, derive_seed(spec_.seed, 0x707269));
        }
        return *prior_;
    }

    const ExactDistribution& exact_prior() {
        if (!exact_prior_) exact_prior_ = enumerate_exact(model_.without_observations());
        return *exact_prior_;
    }

    const GenerativeModel& model_;
    const RunSpec& spec_;
    const SampleSet& samples_;
    const ExactDistribution* exact_;
    std::optional<SampleSet> prior_;
    std::optional<ExactDistribution> exact_prior_;
};

void check_columns(const MeasureRequest& m, const GenerativeModel& model) {
    const auto names = model.query_names();
    for (const auto& c : m.columns()) {
        if (std::find(names.begin(), names.end(), c) == names.end()) {
            std::string all;
            for (const auto& n : names) all += (all.empty() ? "" : ", ") + n;
            throw UsageError("measure '" + m.text + "' refers to unknown column '" + c + "' (columns: " + all + ")");
        }
    }
}

ResultRow to_row(const MeasureRequest& m, const EstimatorResult& r, std::uint64_t seed) {
    return ResultRow{m.text, to_string(r.measure), r.value, r.n, r.params, seed, r.estimator};
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    return os;
}

void finish(std::ofstream& os, const std::string& path) {
    os.flush();
    if (!os) throw IoError("failed writing '" + path + "'");
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ------------------------------------------------------------------ json

json spec_to_json(const RunSpec& s) {
    json j;
    j["scenario"] = s.scenario;
    j["method"] = s.method ? json(to_string(*s.method)) : json(nullptr);
    j["samples"] = s.samples;
    j["seed"] = s.seed;
    j["chains"] = s.chains;
    j["burn_in"] = s.burn_in;
    j["epsilon"] = s.epsilon ? json(*s.epsilon) : json(nullptr);
    j["sensitivity"] = s.sensitivity ? json(*s.sensitivity) : json(nullptr);
    j["k"] = s.k;
    j["size"] = s.size ? json(*s.size) : json(nullptr);
    j["names"] = s.names;
    j["zips"] = s.zips;
    j["days"] = s.days;
    j["ill_prob"] = s.ill_prob;
    j["sigma_s"] = s.sigma_s;
    j["sigma_p"] = s.sigma_p;
    j["n"] = s.n;
    j["c"] = s.c;
    j["observe"] = s.observe ? json(*s.observe) : json(nullptr);
    j["measures"] = s.measures;
    j["out"] = s.out;
    j["samples_out"] = s.samples_out;
    return j;
}

template <class T>
std::optional<T> opt(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<T>();
}

RunSpec spec_from_json(const json& j) {
    RunSpec s;
    s.scenario = j.at("scenario").get<std::string>();
    if (auto m = opt<std::string>(j, "method")) s.method = parse_method(*m);
    s.samples = j.at("samples").get<std::size_t>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.chains = j.at("chains").get<int>();
    s.burn_in = j.at("burn_in").get<int>();
    s.epsilon = opt<double>(j, "epsilon");
    s.sensitivity = opt<double>(j, "sensitivity");
    s.k = j.at("k").get<int>();
    s.size = opt<std::int64_t>(j, "size");
    s.names = j.at("names").get<std::size_t>();
    s.zips = j.at("zips").get<std::size_t>();
    s.days = j.at("days").get<std::size_t>();
    s.ill_prob = j.at("ill_prob").get<double>();
    s.sigma_s = j.at("sigma_s").get<double>();
    s.sigma_p = j.at("sigma_p").get<double>();
    s.n = j.at("n").get<std::int64_t>();
    s.c = j.at("c").get<int>();
    s.observe = opt<std::string>(j, "observe");
    s.measures = j.at("measures").get<std::vector<std::string>>();
    s.out = j.at("out").get<std::string>();
    s.samples_out = j.at("samples_out").get<std::string>();
    return s;
}

}  // namespace

// ---------------------------------------------------------------- errors

ExitCode exit_code_for(const std::exception& e) {
    if (dynamic_cast<const UsageError*>(&e) || dynamic_cast<const ModelError*>(&e) ||
        dynamic_cast<const InvalidDistribution*>(&e) || dynamic_cast<const std::invalid_argument*>(&e))
        return ExitCode::Usage;
    if (dynamic_cast<const IoError*>(&e)) return ExitCode::Io;
    return ExitCode::Inference;
}

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names{"agg-kal", "agg-kab",  "ano",      "k-ano",
                                                "dp-agg",  "syn-cont", "syn-disc", "syn-complex"};
    return names;
}

// -------------------------------------------------------------- measures

std::vector<std::string> MeasureRequest::columns() const {
    std::vector<std::string> out{column};
    if (!other.empty()) out.push_back(other);
    return out;
}

MeasureRequest parse_measure_request(std::string_view raw) {
    using K = MeasureRequest::Kind;
    MeasureRequest m;
    m.text = trim(raw);
    const auto open = m.text.find('(');
    if (open == std::string::npos || m.text.back() != ')')
        throw UsageError("measure '" + m.text + "' must look like name(args), e.g. mean(a) or P(a<18)");
    const std::string head = lower(trim(std::string_view(m.text).substr(0, open)));
    const std::string args = trim(std::string_view(m.text).substr(open + 1, m.text.size() - open - 2));
    if (args.empty()) throw UsageError("measure '" + m.text + "' has no arguments");

    if (head == "p" || head == "prob") {
        m.kind = K::Probability;
        static const std::pair<const char*, MeasureRequest::Op> ops[] = {
            {"<=", MeasureRequest::Op::Le}, {">=", MeasureRequest::Op::Ge}, {"!=", MeasureRequest::Op::Ne},
            {"==", MeasureRequest::Op::Eq}, {"<", MeasureRequest::Op::Lt},  {">", MeasureRequest::Op::Gt},
            {"=", MeasureRequest::Op::Eq}};
        for (const auto& [tok, op] : ops) {
            const auto pos = args.find(tok);
            if (pos == std::string::npos) continue;
            m.column = trim(std::string_view(args).substr(0, pos));
            m.op = op;
            m.rhs = parse_literal(std::string_view(args).substr(pos + std::char_traits<char>::length(tok)));
            if (m.column.empty()) throw UsageError("measure '" + m.text + "' has no column");
            return m;
        }
        throw UsageError("measure '" + m.text + "' needs a comparison (<, <=, >, >=, =, !=)");
    }
    if (head == "mean" || head == "std" || head == "entropy" || head == "h" || head == "kde" || head == "hist" ||
        head == "histogram") {
        m.kind = head == "mean"  ? K::Mean
                 : head == "std" ? K::Std
                 : head == "kde" ? K::Kde
                 : (head == "hist" || head == "histogram") ? K::Histogram
                                                           : K::Entropy;
        m.column = args;
        return m;
    }
    if (head == "kl") {
        m.kind = K::Kl;
        if (args.find("||") != std::string::npos) std::tie(m.column, m.other) = split_pair(args, "||", m.text);
        else m.column = args;
        return m;
    }
    if (head == "mi" || head == "bayes_risk" || head == "risk" || head == "vulnerability" || head == "leakage" ||
        head == "mult_leakage") {
        m.kind = head == "mi"                                 ? K::Mi
                 : (head == "bayes_risk" || head == "risk")   ? K::BayesRisk
                 : head == "vulnerability"                    ? K::Vulnerability
                                                              : K::Leakage;
        std::tie(m.column, m.other) = split_pair(args, args.find(';') != std::string::npos ? ";" : ",", m.text);
        return m;
    }
    if (head == "disclosure" || head == "qi" || head == "masked") {
        m.kind = head == "disclosure" ? K::Disclosure : head == "qi" ? K::QiCounts : K::Masked;
        m.attrs = args;
        m.column = head == "masked" ? "masked" : "output";
        try {
            parse_attrs(args);
        } catch (const std::invalid_argument& e) {
            throw UsageError("measure '" + m.text + "': " + e.what());
        }
        return m;
    }
    throw UsageError("unknown measure '" + m.text +
                     "' (use P, mean, std, entropy, kl, mi, bayes_risk, vulnerability, leakage, kde, hist, "
                     "disclosure, qi, masked)");
}

// ------------------------------------------------------------- scenarios

GenerativeModel apply_observe(const GenerativeModel& model, std::string_view text) {
    const std::string t = trim(text);
    if (t == "none") return model.without_observations();
    const auto check_name = [&](const std::string& name) {
        const auto names = model.query_names();
        if (std::find(names.begin(), names.end(), name) == names.end())
            throw UsageError("observation target '" + name + "' is not a query of this scenario");
        return model.query_node(name);
    };
    if (const auto eq = t.find('='); eq != std::string::npos) {
        const NodeId target = check_name(trim(std::string_view(t).substr(0, eq)));
        return model.observe(target, Observation::equals(parse_literal(std::string_view(t).substr(eq + 1))));
    }
    const auto c1 = t.find(':');
    const auto c2 = c1 == std::string::npos ? c1 : t.find(':', c1 + 1);
    if (c2 == std::string::npos) throw UsageError("observation '" + t + "' must be name:lo:hi, name=value or none");
    const NodeId target = check_name(trim(std::string_view(t).substr(0, c1)));
    const Value lo = parse_literal(std::string_view(t).substr(c1 + 1, c2 - c1 - 1));
    const Value hi = parse_literal(std::string_view(t).substr(c2 + 1));
    if (!is_numeric(lo) || !is_numeric(hi)) throw UsageError("observation bounds must be numbers");
    return model.observe(target, Observation::interval(lo.to_double(), hi.to_double()));
}

GenerativeModel build_scenario(const RunSpec& spec) {
    check_spec(spec);
    try {
        GenerativeModel model = [&] {
            const std::string& s = spec.scenario;
            if (s == "agg-kal" || s == "agg-kab") {
                ScenarioConfig cfg = config_for(spec);
                return build_agg(s == "agg-kal" ? Attacker::Kal : Attacker::Kab, cfg);
            }
            if (s == "ano") return build_ano_prior(config_for(spec));
            if (s == "k-ano") return build_k_ano(config_for(spec));
            if (s == "dp-agg") {
                DPConfig dp;
                if (spec.epsilon) dp.epsilon = *spec.epsilon;
                dp.sensitivity = spec.sensitivity;
                return build_dp_agg(config_for(spec), dp);
            }
            return build_synthetic(synthetic_for(spec));
        }();
        if (auto obs = effective_observe(spec)) model = apply_observe(model, *obs);
        return model;
    } catch (const ModelError& e) {
        throw UsageError(std::string("invalid scenario parameters: ") + e.what());
    } catch (const InvalidDistribution& e) {
        throw UsageError(std::string("invalid scenario parameters: ") + e.what());
    }
}

Method resolve_method(const RunSpec& spec, const GenerativeModel& model) {
    if (spec.method) return *spec.method;
    return model.observations().empty() ? Method::Forward : Method::Metropolis;
}

SampleSet draw_samples(const GenerativeModel& model, const RunSpec& spec, Method method) {
    switch (method) {
        case Method::Forward: return sample_prior(model, spec.samples, spec.seed);
        case Method::Rejection: return rejection_sample(model, spec.samples, spec.seed);
        case Method::Importance: return importance_sample(model, spec.samples, spec.seed);
        case Method::Metropolis: {
            ChainSettings cs;
            cs.chains = spec.chains;
            cs.burn_in = spec.burn_in;
            return metropolis_sample(model, spec.samples, spec.seed, cs);
        }
        case Method::Exact: {
            SampleSet s = enumerate_exact(model).to_sample_set();
            s.seed = spec.seed;
            return s;
        }
    }
    throw UsageError("unknown method");
}

// ------------------------------------------------------------------ json

std::string to_json(const ResultsDocument& doc, int indent) {
    json j;
    j["tool_version"] = doc.tool_version;
    j["spec"] = spec_to_json(doc.spec);
    j["method"] = doc.method;
    j["results"] = json::array();
    for (const auto& r : doc.results) {
        j["results"].push_back({{"label", r.label},
                                {"measure", r.measure},
                                {"value_bits_or_prob", r.value_bits_or_prob},
                                {"n", r.n},
                                {"params", r.params},
                                {"seed", r.seed},
                                {"estimator", r.estimator}});
    }
    j["series"] = json::array();
    for (const auto& s : doc.series) {
        j["series"].push_back({{"label", s.label},
                               {"kind", s.kind},
                               {"x", s.x},
                               {"y", s.y},
                               {"counts", s.counts},
                               {"bandwidth", s.bandwidth},
                               {"diagnostic", s.diagnostic}});
    }
    j["timings"] = {{"model_build", doc.timings.model_build},
                    {"sampling", doc.timings.sampling},
                    {"estimators", doc.timings.estimators}};
    json chains = json::object();
    for (const auto& [c, n] : doc.chain_samples) chains[std::to_string(c)] = n;
    j["chain_samples"] = chains;
    return j.dump(indent);
}

ResultsDocument results_from_json(std::string_view text) {
    try {
        const json j = json::parse(text);
        ResultsDocument doc;
        doc.tool_version = j.at("tool_version").get<std::string>();
        doc.spec = spec_from_json(j.at("spec"));
        doc.method = j.at("method").get<std::string>();
        for (const auto& r : j.at("results")) {
            doc.results.push_back(ResultRow{r.at("label").get<std::string>(), r.at("measure").get<std::string>(),
                                            r.at("value_bits_or_prob").get<double>(), r.at("n").get<std::size_t>(),
                                            r.at("params").get<std::map<std::string, double>>(),
                                            r.at("seed").get<std::uint64_t>(), r.at("estimator").get<std::string>()});
        }
        for (const auto& s : j.at("series")) {
            doc.series.push_back(SeriesRow{s.at("label").get<std::string>(), s.at("kind").get<std::string>(),
                                           s.at("x").get<std::vector<double>>(), s.at("y").get<std::vector<double>>(),
                                           s.at("counts").get<std::vector<double>>(), s.at("bandwidth").get<double>(),
                                           s.at("diagnostic").get<std::string>()});
        }
        const auto& t = j.at("timings");
        doc.timings.model_build = t.at("model_build").get<double>();
        doc.timings.sampling = t.at("sampling").get<double>();
        doc.timings.estimators = t.at("estimators").get<std::map<std::string, double>>();
        for (const auto& [c, n] : j.at("chain_samples").items()) doc.chain_samples[std::stoi(c)] = n.get<std::size_t>();
        return doc;
    } catch (const json::exception& e) {
        throw UsageError(std::string("malformed results document: ") + e.what());
    }
}

// ------------------------------------------------------------------- run

ResultsDocument run(const RunSpec& spec) {
    std::vector<MeasureRequest> measures;
    for (const auto& text : spec.measures) measures.push_back(parse_measure_request(text));

    ResultsDocument doc;
    doc.spec = spec;
    auto t0 = Clock::now();
    const GenerativeModel model = build_scenario(spec);
    const Method method = resolve_method(spec, model);
    if (method == Method::Metropolis && spec.samples % static_cast<std::size_t>(spec.chains) != 0)
        throw UsageError("samples must be divisible by chains for metropolis");
    for (const auto& m : measures) check_columns(m, model);
    doc.method = to_string(method);
    doc.timings.model_build = seconds_since(t0);

    t0 = Clock::now();
    std::optional<ExactDistribution> exact;
    SampleSet samples;
    if (method == Method::Exact) {
        exact = enumerate_exact(model);
        samples = exact->to_sample_set();
        samples.seed = spec.seed;
    } else {
        samples = draw_samples(model, spec, method);
    }
    doc.timings.sampling = seconds_since(t0);
    doc.chain_samples = samples.chain_counts();

    Analyzer analyzer(model, spec, samples, exact ? &*exact : nullptr);
    for (const auto& m : measures) {
        t0 = Clock::now();
        if (m.is_series()) doc.series.push_back(analyzer.series(m));
        else doc.results.push_back(to_row(m, analyzer.scalar(m), spec.seed));
        doc.timings.estimators[m.text] = seconds_since(t0);
    }

    if (!spec.samples_out.empty()) {
        auto os = open_out(spec.samples_out);
        write_csv(samples, os);
        finish(os, spec.samples_out);
    }
    if (!spec.out.empty()) {
        auto os = open_out(spec.out);
        os << to_json(doc) << '\n';
        finish(os, spec.out);
    }
    return doc;
}

// ----------------------------------------------------------------- sweep

std::optional<double> oracle_for(const RunSpec& spec, const MeasureRequest& m) {
    using K = MeasureRequest::Kind;
    using Op = MeasureRequest::Op;
    if (effective_observe(spec)) return std::nullopt;
    if (spec.scenario == "syn-cont" && m.column == "o") {
        const SyntheticParams p = synthetic_for(spec);
        const auto [mu, sd] = oracle::syn_cont_moments(p.m, p.sigma_s, p.sigma_p);
        if (m.kind == K::Mean) return mu;
        if (m.kind == K::Std) return sd;
        if (m.kind == K::Probability && is_numeric(m.rhs)) {
            const double below = oracle::syn_cont_prob_below(m.rhs.to_double(), p.m, p.sigma_s, p.sigma_p);
            if (m.op == Op::Lt || m.op == Op::Le) return below;
            if (m.op == Op::Gt || m.op == Op::Ge) return 1.0 - below;
        }
        return std::nullopt;
    }
    if (spec.scenario == "syn-disc" && m.column == "o" && m.kind == K::Probability && is_numeric(m.rhs)) {
        const SyntheticParams p = synthetic_for(spec);
        const auto pmf = oracle::syn_disc_pmf(p.m, p.n);
        double total = 0.0;
        for (std::size_t v = 0; v < pmf.size(); ++v)
            if (compare(Value::integer(static_cast<std::int64_t>(v)), m.op, m.rhs)) total += pmf[v];
        return total;
    }
    if (spec.scenario == "ano" && m.kind == K::Disclosure) {
        const ScenarioConfig cfg = config_for(spec);
        return oracle::positive_disclosure(cfg.dataset_size, cfg.ill_prob, oracle::attr_match_prob(cfg, parse_attrs(m.attrs)));
    }
    return std::nullopt;
}

std::vector<SweepRow> sweep(const RunSpec& spec, const std::vector<std::size_t>& grid, int repeats,
                            std::optional<double> oracle) {
    if (grid.empty()) throw UsageError("sweep needs a nonempty sample grid");
    if (repeats < 1) throw UsageError("repeats must be positive");
    if (spec.measures.size() != 1) throw UsageError("sweep takes exactly one measure");
    const MeasureRequest m = parse_measure_request(spec.measures.front());
    if (m.is_series()) throw UsageError("sweep needs a scalar measure");
    if (!oracle) oracle = oracle_for(spec, m);
    if (!oracle) throw UsageError("no closed-form oracle for '" + m.text + "' on " + spec.scenario + "; pass one");

    const GenerativeModel model = build_scenario(spec);
    check_columns(m, model);
    const Method method = resolve_method(spec, model);
    std::vector<SweepRow> rows;
    for (const std::size_t n : grid) {
        if (n == 0) throw UsageError("sample grid entries must be positive");
        SweepRow row{n, 0.0, std::numeric_limits<double>::infinity(), 0.0};
        for (int r = 0; r < repeats; ++r) {
            RunSpec point = spec;
            point.samples = n;
            point.seed = spec.seed + static_cast<std::uint64_t>(r);
            const SampleSet s = draw_samples(model, point, method);
            std::optional<ExactDistribution> exact;
            if (method == Method::Exact) exact = enumerate_exact(model);
            Analyzer a(model, point, s, exact ? &*exact : nullptr);
            const double err = std::abs(a.scalar(m).value - *oracle);
            row.mean_abs_err += err / repeats;
            row.min = std::min(row.min, err);
            row.max = std::max(row.max, err);
        }
        rows.push_back(row);
    }
    return rows;
}

// ----------------------------------------------------------------- bench

std::vector<BenchRow> bench(const RunSpec& spec, const std::vector<std::int64_t>& sizes) {
    std::vector<BenchRow> rows;
    for (const std::int64_t size : sizes) {
        RunSpec point = spec;
        point.size = size;
        const GenerativeModel model = build_scenario(point);
        const Method method = resolve_method(point, model);
        auto t0 = Clock::now();
        draw_samples(model, point, method);
        BenchRow row{size, seconds_since(t0), std::nullopt};
        if (spec.scenario == "syn-complex") {
            Rng rng(spec.seed, 1);
            std::vector<std::int64_t> arr(static_cast<std::size_t>(size));
            for (auto& v : arr) v = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(spec.n) + 1));
            const std::size_t reps = std::clamp<std::size_t>(spec.samples, 1, 100);
            volatile std::int64_t sink = 0;
            t0 = Clock::now();
            for (std::size_t i = 0; i < reps; ++i) sink = sink + complexity_payload(arr, spec.c);
            row.payload_seconds = seconds_since(t0) / static_cast<double>(reps);
        }
        rows.push_back(row);
    }
    return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os) {
    os << "n,mean_abs_err,min,max\n";
    for (const auto& r : rows) os << r.n << ',' << fmt17(r.mean_abs_err) << ',' << fmt17(r.min) << ',' << fmt17(r.max) << '\n';
}

void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& os) {
    os << "size,seconds,payload_seconds\n";
    for (const auto& r : rows) {
        os << r.size << ',' << fmt17(r.seconds) << ',';
        if (r.payload_seconds) os << fmt17(*r.payload_seconds);
        os << '\n';
    }
}

void dump_samples(const RunSpec& spec, const std::string& path) {
    const GenerativeModel model = build_scenario(spec);
    const Method method = resolve_method(spec, model);
    const SampleSet s = draw_samples(model, spec, method);
    auto os = open_out(path);
    write_csv(s, os);
    finish(os, path);
}

}  // namespace leakscope
