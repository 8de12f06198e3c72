#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "leakscope/errors.hpp"
#include "leakscope/estimators.hpp"
#include "leakscope/model.hpp"
#include "leakscope/sample_set.hpp"

namespace leakscope {

inline constexpr const char* kToolVersion = "0.1.0";

/// Process exit status contract of the command-line tool.
enum class ExitCode : int { Ok = 0, Usage = 2, Inference = 3, Io = 4 };

/// Bad request: unknown scenario, measure, column or parameter.
class UsageError : public Error {
public:
    using Error::Error;
};

/// A file could not be read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Maps an exception thrown by the pipeline to its exit status.
ExitCode exit_code_for(const std::exception& e);

/// Scenario names accepted by the tool.
const std::vector<std::string>& scenario_names();

/// One end-to-end request. Unset optionals take the scenario's defaults.
struct RunSpec {
    std::string scenario;
    /// Unset: metropolis when the model carries evidence, forward otherwise.
    std::optional<Method> method;
    std::size_t samples = 10000;
    std::uint64_t seed = 1;
    int chains = 2;
    int burn_in = 1000;

    std::optional<double> epsilon;
    std::optional<double> sensitivity;
    int k = 2;
    /// Dataset size (ano, k-ano), m (syn-cont, syn-disc) or array length (syn-complex).
    std::optional<std::int64_t> size;
    std::size_t names = 5000;
    std::size_t zips = 200;
    std::size_t days = 82;
    double ill_prob = 0.2;
    double sigma_s = 8.0;
    double sigma_p = 1.0;
    std::int64_t n = 100;
    int c = 1;

    /// "name:lo:hi" (interval, lo <= x < hi), "name=value" (equality) or "none".
    /// Unset: agg scenarios observe o in [55.295, 55.305), the rest observe nothing.
    std::optional<std::string> observe;
    std::vector<std::string> measures;
    /// Results JSON path; empty writes to stdout.
    std::string out;
    /// Optional samples CSV path.
    std::string samples_out;

    friend bool operator==(const RunSpec&, const RunSpec&) = default;
};

/// Parsed form of a measure string such as "P(a<18)", "mi(a;o)" or "kde(a)".
struct MeasureRequest {
    enum class Kind {
        Probability,
        Mean,
        Std,
        Entropy,
        Kl,
        Mi,
        BayesRisk,
        Vulnerability,
        Leakage,
        Kde,
        Histogram,
        Disclosure,
        QiCounts,
        Masked
    };
    enum class Op { Lt, Le, Gt, Ge, Eq, Ne };

    std::string text;
    Kind kind = Kind::Mean;
    std::string column;
    /// Second column for kl(x||y), mi, bayes measures; empty for kl(x) (posterior vs prior).
    std::string other;
    Op op = Op::Eq;
    Value rhs;
    /// Attribute set for disclosure(...), qi(...), masked(...).
    std::string attrs;

    /// Columns the request reads.
    std::vector<std::string> columns() const;
    bool is_series() const { return kind == Kind::Kde || kind == Kind::Histogram || kind == Kind::QiCounts; }
};

/// Throws UsageError for text outside the grammar.
MeasureRequest parse_measure_request(std::string_view text);

/// Observation parsed from RunSpec::observe against a model's queries.
GenerativeModel apply_observe(const GenerativeModel& model, std::string_view text);

/// Model for the spec, including its evidence. Throws UsageError for unknown names.
GenerativeModel build_scenario(const RunSpec& spec);

/// Samples for the spec's method. Exact specs are exported one row per outcome.
SampleSet draw_samples(const GenerativeModel& model, const RunSpec& spec, Method method);

/// Method used for the spec once defaults are resolved.
Method resolve_method(const RunSpec& spec, const GenerativeModel& model);

struct ResultRow {
    std::string label;
    std::string measure;
    double value_bits_or_prob = 0.0;
    std::size_t n = 0;
    std::map<std::string, double> params;
    std::uint64_t seed = 0;
    std::string estimator;

    friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

/// Plot-ready data: kde (x = grid, y = density), histogram (x = edges, y = density,
/// counts), pmf (x = values, y = probabilities).
struct SeriesRow {
    std::string label;
    std::string kind;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> counts;
    double bandwidth = 0.0;
    std::string diagnostic;

    friend bool operator==(const SeriesRow&, const SeriesRow&) = default;
};

struct Timings {
    double model_build = 0.0;
    double sampling = 0.0;
    std::map<std::string, double> estimators;

    friend bool operator==(const Timings&, const Timings&) = default;
};

struct ResultsDocument {
    RunSpec spec;
    std::string method;
    std::vector<ResultRow> results;
    std::vector<SeriesRow> series;
    Timings timings;
    std::string tool_version = kToolVersion;
    std::map<int, std::size_t> chain_samples;

    friend bool operator==(const ResultsDocument&, const ResultsDocument&) = default;
};

std::string to_json(const ResultsDocument& doc, int indent = 2);
/// Inverse of to_json; throws UsageError on malformed input.
ResultsDocument results_from_json(std::string_view text);

/// Prior, lift, observe, infer and analyse. Writes the results JSON to spec.out (when
/// set) and the samples CSV to spec.samples_out (when set). All measures are validated
/// before any sampling or file output.
ResultsDocument run(const RunSpec& spec);

struct SweepRow {
    std::size_t n = 0;
    double mean_abs_err = 0.0;
    double min = 0.0;
    double max = 0.0;
};

/// Closed-form value of the spec's single measure, when the registry knows it.
std::optional<double> oracle_for(const RunSpec& spec, const MeasureRequest& measure);

/// Mean absolute error of the spec's single scalar measure against the oracle, at each
/// sample count, over `repeats` seeds (seed, seed + 1, ...).
std::vector<SweepRow> sweep(const RunSpec& spec, const std::vector<std::size_t>& grid, int repeats,
                            std::optional<double> oracle = std::nullopt);

struct BenchRow {
    std::int64_t size = 0;
    double seconds = 0.0;
    /// syn-complex only: average time of one payload call on an array of this size.
    std::optional<double> payload_seconds;
};

/// Wall-clock time to draw spec.samples at each size, serially.
std::vector<BenchRow> bench(const RunSpec& spec, const std::vector<std::int64_t>& sizes);

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os);
void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& os);

/// Draws the spec's samples and writes them as CSV to `path`.
void dump_samples(const RunSpec& spec, const std::string& path);

}  // namespace leakscope
