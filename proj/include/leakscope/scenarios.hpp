#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "leakscope/estimators.hpp"
#include "leakscope/model.hpp"
#include "leakscope/sample_set.hpp"

namespace leakscope {

/// Knobs the scenarios leave open. Supports are explicit symbol lists.
struct ScenarioConfig {
    std::int64_t dataset_size = 1000;
    std::vector<std::string> names;
    std::vector<std::string> zips;
    std::vector<std::string> days;
    double ill_prob = 0.2;
    double epsilon = 1.0;
    int k = 2;
    std::pair<double, double> income_bounds{80.0, 90.0};
    std::size_t samples = 10000;
    std::uint64_t seed = 1;

    /// 5000 names, 200 zips, 82 days.
    static ScenarioConfig defaults();
    /// Generated supports "zip0".. of the given sizes.
    static std::vector<std::string> generated(std::string_view prefix, std::size_t count);
    void validate() const;
};

// ------------------------------------------------------------------- agg

enum class Attacker { Kal, Kab };

/// Mean age of a small table with Alice in row 0; queries a (Alice's age) and o (mean).
GenerativeModel build_agg(Attacker attacker, const ScenarioConfig& cfg = ScenarioConfig::defaults());

/// Adds o in [lo, hi) as evidence.
GenerativeModel observe_output(const GenerativeModel& model, double lo, double hi);

// ---------------------------------------------------------------- dp-agg

struct DPConfig {
    double epsilon = 1.0;
    /// Defaults to max_income / 200 (the table holds 200 incomes).
    std::optional<double> sensitivity;
    double max_income = 200.0;
};

inline constexpr int kDpUnknown = 5;
inline constexpr int kDpKnown = 195;

/// Queries s_1..s_5, ro (exact mean), lap (noise) and o (released mean).
GenerativeModel build_dp_agg(const ScenarioConfig& cfg, const DPConfig& dp);

// ------------------------------------------------------------------- ano

enum class Attr { Zip = 0, Day = 1, Sex = 2 };
using AttrSet = std::vector<Attr>;

/// "zip+day" style; throws std::invalid_argument.
AttrSet parse_attrs(std::string_view text);
std::string attrs_name(const AttrSet& attrs);
/// The seven nonempty subsets of {zip, day, sex}.
std::vector<AttrSet> all_attr_sets();

inline constexpr std::string_view kMasked = "*";

/// Queries input (5-tuples name,zip,day,sex,diag) and output (4-tuples, name dropped).
GenerativeModel build_ano_prior(const ScenarioConfig& cfg = ScenarioConfig::defaults());

/// Number of output rows compatible with the governor (row 0) on attrs; a masked
/// cell is compatible with anything.
std::int64_t governor_matches(const Value& output, const AttrSet& attrs);
/// True when every compatible row is Ill.
bool governor_disclosed(const Value& output, const AttrSet& attrs);

/// pmf of the match count over the output column.
std::map<std::int64_t, double> quasi_identifier_counts(const SampleSet& s, const AttrSet& attrs,
                                                       std::string_view column = "output");
EstimatorResult positive_disclosure(const SampleSet& s, const AttrSet& attrs, std::string_view column = "output");

/// Pr(number of Ill rows sharing the governor's zip = k | exactly given_count such rows).
std::map<std::int64_t, double> conditional_diagnosis(const ScenarioConfig& cfg, std::int64_t given_count,
                                                     std::size_t samples, std::uint64_t seed);

struct KAnonymized {
    Value output;                      // list of 4-tuples
    std::array<bool, 3> masked{};      // zip, day, sex
};

/// Greedy whole-column suppression over zip, day, sex until every projection occurs >= k times.
KAnonymized k_anonymize(const Value& input, int k);
/// Independent check: every row's unmasked projection appears at least k times.
bool is_k_anonymous(const Value& output, int k);

/// ano prior lifted through k_anonymize; queries input, output and masked (3-tuple of bools).
GenerativeModel build_k_ano(const ScenarioConfig& cfg);

// -------------------------------------------------------------- synthetic

struct SyntheticParams {
    enum class Kind { Continuous, Discrete, Complexity } kind = Kind::Continuous;
    std::int64_t m = 200;     // number of p_i / y_j, or array length
    double sigma_s = 8.0;
    double sigma_p = 1.0;
    std::int64_t n = 100;     // discrete bound
    int c = 1;                // loop depth
};

GenerativeModel build_synthetic(const SyntheticParams& p);

/// c nested passes over arr; O(|arr|^c).
std::int64_t complexity_payload(const std::vector<std::int64_t>& arr, int c);

// ---------------------------------------------------------------- oracles

namespace oracle {

double normal_cdf(double z);
/// Mean and std of o for the continuous synthetic program.
std::pair<double, double> syn_cont_moments(std::int64_t m, double sigma_s, double sigma_p);
double syn_cont_prob_below(double t, std::int64_t m, double sigma_s, double sigma_p);
/// pmf of x + y_1 + ... + y_m with every term uniform on 0..n.
std::vector<double> syn_disc_pmf(std::int64_t m, std::int64_t n);
/// Probability that a random row agrees with the governor on attrs.
double attr_match_prob(const ScenarioConfig& cfg, const AttrSet& attrs);
/// 1 + Binomial(size - 1, p).
std::map<std::int64_t, double> qi_count_pmf(std::int64_t size, double p);
double positive_disclosure(std::int64_t size, double ill_prob, double p_attrs);
/// 1 + Binomial(given - 1, ill_prob).
std::map<std::int64_t, double> conditional_diagnosis_pmf(std::int64_t given, double ill_prob);
double binomial_pmf(std::int64_t n, double p, std::int64_t k);

}  // namespace oracle

}  // namespace leakscope
