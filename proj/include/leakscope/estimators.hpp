#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "leakscope/model.hpp"
#include "leakscope/sample_set.hpp"

namespace leakscope {

/// All information measures are reported in this base.
inline constexpr double kBitsPerNat = 1.4426950408889634;  // 1 / ln 2

enum class Measure { Probability, Mean, Std, Entropy, Kl, Mi, BayesRisk, BayesVulnerability, MultLeakage };

const char* to_string(Measure m);
Measure parse_measure(std::string_view text);

struct EstimatorResult {
    Measure measure = Measure::Probability;
    double value = 0.0;
    std::size_t n = 0;
    std::map<std::string, double> params;
    std::string estimator;
};

/// auto dispatches on the column kind: Real is continuous, everything else discrete.
enum class EstimatorMode { Auto, Discrete, Continuous };

EstimatorMode parse_mode(std::string_view text);

struct DensitySeries {
    std::vector<double> grid;
    std::vector<double> density;
    double bandwidth = 0.0;
};

struct Histogram {
    std::vector<double> edges;   // bins + 1 ascending edges
    std::vector<double> counts;  // weighted counts per bin
    std::vector<double> density;
};

struct DensityEstimate {
    std::optional<DensitySeries> kde;
    std::optional<Histogram> histogram;
    std::string diagnostic;  // set when a KDE request fell back to a histogram
};

enum class DensityKind { Kde, Histogram };

struct DensityParams {
    std::optional<double> bandwidth;
    std::size_t bins = 20;
    std::size_t points = 512;
};

// ---------------------------------------------------------------- sample sets

EstimatorResult probability_query(const SampleSet& s, std::string_view column, const ValuePredicate& pred);
/// (mean, std): weighted mean and weighted population standard deviation.
std::pair<EstimatorResult, EstimatorResult> summary_stats(const SampleSet& s, std::string_view column);
DensityEstimate density_estimate(const SampleSet& s, std::string_view column, DensityKind kind,
                                 const DensityParams& params = {});

EstimatorResult entropy(const SampleSet& s, std::string_view column, EstimatorMode mode = EstimatorMode::Auto,
                        int k = 4);
EstimatorResult kl_divergence(const SampleSet& p, std::string_view p_column, const SampleSet& q,
                              std::string_view q_column, EstimatorMode mode = EstimatorMode::Auto, int k = 4);
EstimatorResult mutual_information(const SampleSet& s, std::string_view x, std::string_view y,
                                   EstimatorMode mode = EstimatorMode::Auto, int k = 3);

struct BayesRisk {
    EstimatorResult risk;
    EstimatorResult vulnerability;
    EstimatorResult mult_leakage;
};

BayesRisk bayes_risk(const SampleSet& s, std::string_view secret, std::string_view output);

// ------------------------------------------------------- exact distributions

EstimatorResult probability_query(const ExactDistribution& d, std::string_view column, const ValuePredicate& pred);
EstimatorResult entropy(const ExactDistribution& d, std::string_view column);
EstimatorResult kl_divergence(const ExactDistribution& p, std::string_view p_column, const ExactDistribution& q,
                              std::string_view q_column);
EstimatorResult mutual_information(const ExactDistribution& d, std::string_view x, std::string_view y);
BayesRisk bayes_risk(const ExactDistribution& d, std::string_view secret, std::string_view output);

// ------------------------------------------------------------ building blocks

using Pmf = std::map<Value, double>;
using JointPmf = std::map<std::pair<Value, Value>, double>;

/// Weighted empirical pmf, normalised. weights may be null.
Pmf empirical_pmf(std::span<const Value> xs, const std::vector<double>* weights);
JointPmf empirical_joint(std::span<const Value> xs, std::span<const Value> ys, const std::vector<double>* weights);

double plugin_entropy_bits(const Pmf& p);
/// Throws EstimationError when p puts mass where q has none.
double plugin_kl_bits(const Pmf& p, const Pmf& q);
double plugin_mi_bits(const JointPmf& joint);
/// Joint table P(s, o); returns 1 - sum_o max_s P(s, o).
double bayes_risk_table(const JointPmf& joint);

/// Kozachenko-Leonenko k-NN differential entropy of 1-D data, bits.
double knn_entropy_bits(std::vector<double> xs, int k);
/// Wang-Kulkarni-Verdu k-NN divergence estimate D(P||Q) of 1-D data, bits.
double knn_kl_bits(std::vector<double> p, std::vector<double> q, int k);
/// Kraskov-Stoegbauer-Grassberger estimator (first variant, max norm), bits.
double ksg_mi_bits(std::vector<double> x, std::vector<double> y, int k);

/// Gaussian KDE on `points` grid nodes spanning [min - 4h, max + 4h].
DensitySeries kde(std::span<const double> xs, const std::vector<double>* weights, std::optional<double> bandwidth,
                  std::size_t points = 512);
double silverman_bandwidth(std::span<const double> xs);
Histogram histogram(std::span<const double> xs, const std::vector<double>* weights, std::size_t bins);

}  // namespace leakscope
